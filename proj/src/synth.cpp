#include "planesym/synth.hpp"

#include <fftw3.h>

#include <algorithm>
#include <random>

#include "planesym/groups.hpp"

namespace planesym {

SynthGeometry synth_geometry(const MotifSpec& spec) {
  const int c = spec.cell_px;
  if (c < 8 || c % 2 != 0)
    throw Error("cell_px must be an even number >= 8");
  if (spec.cells_x < 1 || spec.cells_y < 1)
    throw Error("cell counts must be positive");
  SynthGeometry g;
  switch (spec.lattice) {
    case LatticeType::square:
      g.basis = {{double(c), 0}, {0, double(c)}};
      g.width = spec.cells_x * c;
      g.height = spec.cells_y * c;
      break;
    case LatticeType::rectangular: {
      double asp = spec.aspect > 0 ? spec.aspect : 1.3;
      int bl = int(std::lround(c * asp));
      if (bl <= c * 1.02)
        throw Error("rectangular aspect must exceed 1.02 (b is the long axis)");
      g.basis = {{double(c), 0}, {0, double(bl)}};
      g.width = spec.cells_x * c;
      g.height = spec.cells_y * bl;
      break;
    }
    case LatticeType::centered: {
      // Conventional axes A = a + b along x and B = a - b along y, |A| < |B|.
      double asp = spec.aspect > 0 ? spec.aspect : 1.5;
      int q = int(std::lround(c * asp / 2));
      if (2 * q <= c * 1.02 || std::abs(2.0 * q / c - std::sqrt(3.0)) < 0.05)
        throw Error("centred aspect must exceed 1.02 and stay clear of the hexagonal ratio");
      g.basis = {{c / 2.0, double(q)}, {c / 2.0, -double(q)}};
      g.width = spec.cells_x * c;
      g.height = spec.cells_y * 2 * q;
      break;
    }
    case LatticeType::hexagonal: {
      int r = int(std::lround(c * std::sqrt(3.0) / 2));
      g.basis = {{double(c), 0}, {-c / 2.0, double(r)}};
      g.ideal = {{double(c), 0}, {-c / 2.0, c * std::sqrt(3.0) / 2}};
      g.width = spec.cells_x * c;
      g.height = spec.cells_y * 2 * r;
      return g;
    }
    case LatticeType::oblique: {
      if (c % 6 != 0)
        throw Error("oblique cell_px must be a multiple of 6");
      double asp = spec.aspect > 0 ? spec.aspect : 1.2;
      int by = int(std::lround(c * asp));
      g.basis = {{double(c), 0}, {c / 3.0, double(by)}};
      g.width = spec.cells_x * c;
      g.height = spec.cells_y * 3 * by;
      break;
    }
  }
  g.ideal = g.basis;
  return g;
}

std::vector<Blob> expand_motif(const MotifSpec& spec) {
  const GroupSetting& G = setting(spec.group);
  if (!applicable(G, spec.lattice))
    throw Error("group " + G.name + " does not fit a " + to_string(spec.lattice) + " lattice");
  const GroupSetting* S = &G;
  if (!spec.pseudo_group.empty()) {
    S = &setting(spec.pseudo_group);
    if (!applicable(*S, spec.lattice))
      throw Error("group " + S->name + " does not fit a " + to_string(spec.lattice) + " lattice");
    for (const auto& g : G.ops)
      if (std::none_of(S->ops.begin(), S->ops.end(), [&](const SymOp& s) { return s.same_mod_lattice(g); }))
        throw Error(spec.pseudo_group + " is not a supergroup of " + spec.group);
  }
  if (spec.pseudo_delta < 0 || spec.pseudo_delta > 1)
    throw Error("pseudo_delta must lie in [0, 1]");

  // Right coset representatives: S = union of G c.
  std::vector<SymOp> reps, covered;
  for (const auto& s : S->ops) {
    if (std::any_of(covered.begin(), covered.end(), [&](const SymOp& o) { return o.same_mod_lattice(s); }))
      continue;
    reps.push_back(s);
    for (const auto& g : G.ops)
      covered.push_back(g * s);
  }

  std::vector<Blob> blobs = spec.blobs.empty() ? random_motif(spec.motif_seed) : spec.blobs;
  std::vector<Blob> out;
  for (const auto& b : blobs)
    for (std::size_t i = 0; i < reps.size(); ++i) {
      Vec2 p = i == 0 ? b.pos : b.pos + b.delta_dir * spec.pseudo_delta;
      Vec2 x = reps[i].apply(p);
      for (const auto& g : G.ops) {
        Blob e = b;
        e.pos = g.apply(x);
        e.pos = {e.pos.x - std::floor(e.pos.x), e.pos.y - std::floor(e.pos.y)};
        out.push_back(e);
      }
    }
  return out;
}

RasterImage generate_pattern(const MotifSpec& spec) {
  SynthGeometry geo = synth_geometry(spec);
  std::vector<Blob> blobs = expand_motif(spec);
  const int W = geo.width, H = geo.height;
  ReciprocalBasis rb = ReciprocalBasis::from_direct(geo.basis, W, H);
  ReciprocalBasis ideal = ReciprocalBasis::from_direct(geo.ideal, 1, 1);  // cycles/pixel
  const double c = spec.cell_px;

  std::vector<Complex> grid(std::size_t(W) * H);
  auto cell = [&](int u, int v) -> Complex& {
    return grid[std::size_t(((v % H) + H) % H) * W + ((u % W) + W) % W];
  };
  int hm = int(std::ceil(0.5 * geo.basis.a.norm())) + 1;
  int km = int(std::ceil(0.5 * geo.basis.b.norm())) + 1;
  for (int h = 0; h <= hm; ++h)
    for (int k = -km; k <= km; ++k) {
      Miller m{h, k};
      if (!CoefficientSet::is_canonical(m))
        continue;
      Vec2 p = rb.position(m);
      int u = int(std::lround(p.x)), v = int(std::lround(p.y));
      if (std::abs(p.x - u) > 1e-6 || std::abs(p.y - v) > 1e-6)
        throw Error("synthesis lattice is not commensurate with the raster");
      if (2 * std::abs(u) >= W || 2 * std::abs(v) >= H)
        continue;
      Vec2 q = ideal.position(m);
      double q2 = q.dot(q);
      Complex f;
      for (const auto& b : blobs) {
        double s = b.sigma * c;
        double damp = std::exp(-2 * kPi * kPi * s * s * q2);
        if (damp < 1e-16)
          continue;
        f += b.weight * damp * std::polar(1.0, -2 * kPi * (h * b.pos.x + k * b.pos.y));
      }
      cell(u, v) += f;
      cell(-u, -v) += std::conj(f);
    }

  auto* buf = reinterpret_cast<fftw_complex*>(grid.data());
  fftw_plan plan = fftw_plan_dft_2d(H, W, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  RasterImage img(W, H);
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < img.size(); ++i) {
    img.pixels[i] = grid[i].real();
    lo = std::min(lo, img.pixels[i]);
    hi = std::max(hi, img.pixels[i]);
  }
  double span = hi - lo > 0 ? hi - lo : 1.0;
  for (double& v : img.pixels)
    v = spec.low + (spec.high - spec.low) * (v - lo) / span;
  return img;
}

RasterImage add_gaussian_noise(const RasterImage& image, double sigma, std::uint64_t seed) {
  if (sigma < 0)
    throw Error("noise sigma must be non-negative");
  if (sigma == 0)
    return image;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  RasterImage out = image;
  for (double& v : out.pixels)
    v = std::clamp(v + dist(rng), 0.0, 255.0);
  return out;
}

RasterImage add_spread_noise(const RasterImage& image, int radius, std::uint64_t seed) {
  if (radius < 0)
    throw Error("spread radius must be non-negative");
  if (radius == 0)
    return image;
  std::mt19937_64 rng(seed);
  RasterImage out = image;
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x) {
      std::uniform_int_distribution<int> dx(std::max(0, x - radius), std::min(out.width - 1, x + radius));
      std::uniform_int_distribution<int> dy(std::max(0, y - radius), std::min(out.height - 1, y + radius));
      int x2 = dx(rng), y2 = dy(rng);
      std::swap(out.at(x, y), out.at(x2, y2));
    }
  return out;
}

RasterImage quantize(const RasterImage& image) {
  RasterImage out = image;
  for (double& v : out.pixels)
    v = std::clamp(std::round(v), 0.0, 255.0);
  return out;
}

RasterImage apply_noise(const RasterImage& image, const NoiseSpec& noise) {
  // Gaussian first, then spread, as the noisy test patterns were made.
  RasterImage g = add_gaussian_noise(image, noise.gaussian_sigma, noise.seed ^ 0x9e3779b97f4a7c15ULL);
  return quantize(add_spread_noise(g, noise.spread_radius, noise.seed));
}

std::vector<Blob> knoll_motif() {
  // A bow-tie lobe next to the (1/2, 0) site, a dark general-position blob,
  // a small bright dot and a broad blob on the 4-fold axis. delta_dir of the
  // lobe stretches its distance from the site: delta = 0.2 gives the 20%
  // tip-offset between the two halves of the bow tie.
  return {
      {{0.60, 0.05}, 1.0, 0.045, {0.10, 0.0}},
      {{0.20, 0.32}, -0.7, 0.060, {0.0, 0.0}},
      {{0.08, 0.18}, 0.6, 0.032, {0.0, 0.0}},
      {{0.00, 0.00}, 0.8, 0.090, {0.0, 0.0}},
  };
}

std::vector<Blob> random_motif(std::uint64_t seed, int n_blobs) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, 1.0), w(0.5, 1.0), s(0.035, 0.07), d(-0.05, 0.05);
  std::vector<Blob> out;
  for (int i = 0; i < n_blobs; ++i) {
    Blob b;
    b.pos = {pos(rng), pos(rng)};
    b.weight = w(rng) * (i % 2 == 0 ? 1.0 : -1.0);
    b.sigma = s(rng);
    b.delta_dir = {d(rng), d(rng)};
    out.push_back(b);
  }
  return out;
}

MotifSpec trio_motif_spec() {
  MotifSpec s;
  s.group = "p4";
  s.pseudo_group = "p4gm";
  s.pseudo_delta = 0.2;
  s.lattice = LatticeType::square;
  s.cell_px = 96;
  s.cells_x = s.cells_y = 12;
  s.blobs = knoll_motif();
  return s;
}

NoiseSpec moderate_noise(std::uint64_t seed) { return {12.0, 1, seed}; }
NoiseSpec heavy_noise(std::uint64_t seed) { return {60.0, 2, seed + 1}; }

PatternTrio pattern_trio(std::uint64_t seed) {
  PatternTrio t;
  t.spec = trio_motif_spec();
  t.moderate = moderate_noise(seed);
  t.heavy = heavy_noise(seed);
  RasterImage base = generate_pattern(t.spec);
  t.clean = quantize(base);
  t.noisy = apply_noise(base, t.moderate);
  t.heavy_noisy = apply_noise(base, t.heavy);
  return t;
}

}  // namespace planesym
