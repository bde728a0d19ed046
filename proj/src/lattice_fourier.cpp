#include "planesym/lattice_fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <numeric>

namespace planesym {

namespace {

// Thin RAII wrapper around an in-place complex 2D transform.
class Fft2 {
public:
  Fft2(int w, int h, int sign) : w_(w), h_(h) {
    buf_ = fftw_alloc_complex(std::size_t(w) * h);
    if (!buf_)
      throw Error("FFT allocation failed");
    plan_ = fftw_plan_dft_2d(h, w, buf_, buf_, sign, FFTW_ESTIMATE);
  }
  ~Fft2() {
    fftw_destroy_plan(plan_);
    fftw_free(buf_);
  }
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  Complex* data() { return reinterpret_cast<Complex*>(buf_); }
  void run() { fftw_execute(plan_); }

private:
  int w_, h_;
  fftw_complex* buf_ = nullptr;
  fftw_plan plan_ = nullptr;
};

int wrap(int i, int n) { return ((i % n) + n) % n; }

double det(Vec2 a, Vec2 b) { return a.cross(b); }

void gauss_reduce(Vec2& a, Vec2& b) {
  for (int iter = 0; iter < 100; ++iter) {
    if (a.dot(a) > b.dot(b))
      std::swap(a, b);
    double mu = std::round(a.dot(b) / a.dot(a));
    if (mu == 0)
      break;
    b = b - a * mu;
  }
  if (det(a, b) < 0)
    b = b * -1.0;
}

}  // namespace

Complex SpectralMap::interpolate(Vec2 uv) const {
  double fu = std::floor(uv.x), fv = std::floor(uv.y);
  int u0 = int(fu), v0 = int(fv);
  double tu = uv.x - fu, tv = uv.y - fv;
  if (u0 < u_min() || v0 < v_min() || u0 > u_max() || v0 > v_max())
    throw Error("interpolation outside the spectral map");
  auto get = [&](int u, int v) {
    return (u > u_max() || v > v_max()) ? Complex{} : at(u, v);
  };
  return (1 - tu) * (1 - tv) * get(u0, v0) + tu * (1 - tv) * get(u0 + 1, v0) +
         (1 - tu) * tv * get(u0, v0 + 1) + tu * tv * get(u0 + 1, v0 + 1);
}

SpectralMap dft2(const RasterImage& image, const std::optional<RegionSelection>& region) {
  int x0 = 0, y0 = 0, w = image.width, h = image.height;
  if (region) {
    region->check_fits(image.width, image.height);
    x0 = int(std::ceil(region->cx - region->radius));
    y0 = int(std::ceil(region->cy - region->radius));
    w = int(std::floor(region->cx + region->radius)) - x0 + 1;
    h = int(std::floor(region->cy + region->radius)) - y0 + 1;
  }
  if (w < 2 || h < 2)
    throw Error("analysis box too small");

  double sum = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (!region || region->contains(x0 + x, y0 + y)) {
        sum += image.at(x0 + x, y0 + y);
        ++n;
      }
  double mean = sum / double(n);

  Fft2 fft(w, h, FFTW_FORWARD);
  Complex* buf = fft.data();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      bool in = !region || region->contains(x0 + x, y0 + y);
      buf[std::size_t(y) * w + x] = in ? image.at(x0 + x, y0 + y) : mean;
    }
  fft.run();

  SpectralMap map;
  map.width = w;
  map.height = h;
  map.mean_level = mean;
  map.box_origin = {double(x0), double(y0)};
  map.data.resize(std::size_t(w) * h);
  for (int v = map.v_min(); v <= map.v_max(); ++v)
    for (int u = map.u_min(); u <= map.u_max(); ++u)
      map.at(u, v) = buf[std::size_t(wrap(v, h)) * w + wrap(u, w)];
  return map;
}

DirectBasis ReciprocalBasis::direct() const {
  Vec2 fa{a_star.x / grid_width, a_star.y / grid_height};
  Vec2 fb{b_star.x / grid_width, b_star.y / grid_height};
  double d = det(fa, fb);
  if (std::abs(d) < 1e-300)
    throw Error("degenerate reciprocal basis");
  // Rows fa, fb form F; the direct vectors are the columns of F^-1.
  return {{fb.y / d, -fb.x / d}, {-fa.y / d, fa.x / d}};
}

ReciprocalBasis ReciprocalBasis::from_direct(const DirectBasis& dir, int gw, int gh) {
  double d = det(dir.a, dir.b);
  if (std::abs(d) < 1e-300)
    throw Error("degenerate direct basis");
  Vec2 fa{dir.b.y / d, -dir.b.x / d};
  Vec2 fb{-dir.a.y / d, dir.a.x / d};
  ReciprocalBasis r;
  r.grid_width = gw;
  r.grid_height = gh;
  r.a_star = {fa.x * gw, fa.y * gh};
  r.b_star = {fb.x * gw, fb.y * gh};
  return r;
}

LatticeParameters ReciprocalBasis::parameters() const {
  DirectBasis d = direct();
  double la = d.a.norm(), lb = d.b.norm();
  double c = std::clamp(d.a.dot(d.b) / (la * lb), -1.0, 1.0);
  return {la, lb, std::acos(c) * 180.0 / kPi};
}

double ReciprocalBasis::cell_area() const {
  DirectBasis d = direct();
  return std::abs(det(d.a, d.b));
}

namespace {

struct Peak {
  Vec2 pos;  // grid units
  double amp;
};

// Spectrum of the Hann-windowed box, by convolving with (-1/4, 1/2, -1/4)
// along each axis. Off-grid lattice peaks then leak far less into sidelobes.
SpectralMap hann(const SpectralMap& map) {
  auto wrap = [](int i, int lo, int n) { return ((i - lo) % n + n) % n + lo; };
  SpectralMap tmp = map, out = map;
  for (int v = map.v_min(); v <= map.v_max(); ++v)
    for (int u = map.u_min(); u <= map.u_max(); ++u)
      tmp.at(u, v) = 0.5 * map.at(u, v) - 0.25 * (map.at(wrap(u - 1, map.u_min(), map.width), v) +
                                                   map.at(wrap(u + 1, map.u_min(), map.width), v));
  for (int v = map.v_min(); v <= map.v_max(); ++v)
    for (int u = map.u_min(); u <= map.u_max(); ++u)
      out.at(u, v) = 0.5 * tmp.at(u, v) - 0.25 * (tmp.at(u, wrap(v - 1, map.v_min(), map.height)) +
                                                   tmp.at(u, wrap(v + 1, map.v_min(), map.height)));
  return out;
}

bool local_max(const SpectralMap& map, int u, int v) {
  double a = map.amplitude(u, v);
  if (!(a > 0))
    return false;
  for (int dv = -1; dv <= 1; ++dv)
    for (int du = -1; du <= 1; ++du) {
      if (!du && !dv)
        continue;
      double n = map.amplitude(u + du, v + dv);
      // plateaus: keep only the first cell in scan order
      if (n > a || (n == a && (dv < 0 || (dv == 0 && du < 0))))
        return false;
    }
  return true;
}

std::vector<Peak> find_peaks(const SpectralMap& map, double min_peak_snr, double& threshold) {
  std::vector<double> amps;
  amps.reserve(map.data.size());
  double max_amp = 0.0;
  for (int v = map.v_min(); v <= map.v_max(); ++v)
    for (int u = map.u_min(); u <= map.u_max(); ++u) {
      if (u == 0 && v == 0)
        continue;
      double a = map.amplitude(u, v);
      amps.push_back(a);
    }
  auto mid = amps.begin() + amps.size() / 2;
  std::nth_element(amps.begin(), mid, amps.end());
  double background = *mid;

  // Leakage sidelobes of off-grid peaks are maxima of the raw spectrum but
  // nearly vanish in the windowed one. An on-grid peak keeps 1/4 of its
  // amplitude there.
  SpectralMap windowed = hann(map);
  std::vector<Peak> peaks;
  for (int v = map.v_min() + 2; v <= map.v_max() - 2; ++v)
    for (int u = std::max(0, map.u_min() + 2); u <= map.u_max() - 2; ++u) {
      if (!CoefficientSet::is_canonical({u, v}) || u * u + v * v < 4 || !local_max(map, u, v))
        continue;
      double a = map.amplitude(u, v), lo = a;
      bool seen = false;
      for (int dv = -1; dv <= 1 && !seen; ++dv)
        for (int du = -1; du <= 1 && !seen; ++du)
          seen = local_max(windowed, u + du, v + dv) && windowed.amplitude(u + du, v + dv) >= 0.15 * a;
      if (!seen)
        continue;
      for (int dv = -1; dv <= 1; ++dv)
        for (int du = -1; du <= 1; ++du)
          lo = std::min(lo, map.amplitude(u + du, v + dv));
      double sw = 0, su = 0, sv = 0;
      for (int dv = -1; dv <= 1; ++dv)
        for (int du = -1; du <= 1; ++du) {
          double w = map.amplitude(u + du, v + dv) - lo;
          sw += w;
          su += w * du;
          sv += w * dv;
        }
      Vec2 pos{double(u), double(v)};
      if (sw > 0)
        pos = {u + su / sw, v + sv / sw};
      peaks.push_back({pos, a});
      max_amp = std::max(max_amp, a);
    }
  threshold = std::max(min_peak_snr * background, 1e-6 * max_amp);
  std::erase_if(peaks, [&](const Peak& p) { return p.amp < threshold; });
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.amp != b.amp)
      return a.amp > b.amp;
    return std::tie(a.pos.x, a.pos.y) < std::tie(b.pos.x, b.pos.y);
  });
  return peaks;
}

Vec2 coords(Vec2 a, Vec2 b, Vec2 p) {
  double d = det(a, b);
  return {det(p, b) / d, det(a, p) / d};
}

// Basis of the integer lattice spanned by the given vectors.
std::array<std::array<long, 2>, 2> integer_lattice_basis(std::vector<std::array<long, 2>> g) {
  for (;;) {
    std::vector<std::size_t> nz;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g[i][0] != 0)
        nz.push_back(i);
    if (nz.size() <= 1)
      break;
    std::size_t piv = *std::min_element(nz.begin(), nz.end(), [&](auto i, auto j) {
      return std::labs(g[i][0]) < std::labs(g[j][0]);
    });
    for (std::size_t i : nz) {
      if (i == piv)
        continue;
      long q = g[i][0] / g[piv][0];
      g[i][0] -= q * g[piv][0];
      g[i][1] -= q * g[piv][1];
    }
  }
  std::array<long, 2> p{0, 0};
  long gy = 0;
  for (auto& v : g) {
    if (v[0] != 0)
      p = v;
    else
      gy = std::gcd(gy, std::labs(v[1]));
  }
  if (p[0] < 0)
    p = {-p[0], -p[1]};
  if (p[0] == 0 || gy == 0)
    throw Error("lattice generators are degenerate");
  p[1] = ((p[1] % gy) + gy) % gy;
  return {{p, {0, gy}}};
}

void least_squares(const std::vector<Peak>& peaks, Vec2& a, Vec2& b, double tol,
                   double& rms, std::size_t& used) {
  double s11 = 0, s12 = 0, s22 = 0;
  Vec2 r1, r2;
  std::vector<std::pair<Vec2, Vec2>> fits;
  for (const auto& p : peaks) {
    Vec2 c = coords(a, b, p.pos);
    Vec2 m{std::round(c.x), std::round(c.y)};
    if (std::abs(c.x - m.x) > tol || std::abs(c.y - m.y) > tol)
      continue;
    double w = p.amp;
    s11 += w * m.x * m.x;
    s12 += w * m.x * m.y;
    s22 += w * m.y * m.y;
    r1 = r1 + p.pos * (w * m.x);
    r2 = r2 + p.pos * (w * m.y);
    fits.push_back({m, p.pos});
  }
  used = fits.size();
  double d = s11 * s22 - s12 * s12;
  if (fits.size() >= 3 && std::abs(d) > 1e-12 * (s11 * s22)) {
    a = (r1 * s22 - r2 * s12) * (1.0 / d);
    b = (r2 * s11 - r1 * s12) * (1.0 / d);
  }
  double ss = 0;
  for (auto& [m, pos] : fits) {
    Vec2 e = pos - (a * m.x + b * m.y);
    ss += e.dot(e);
  }
  rms = fits.empty() ? 0.0 : std::sqrt(ss / double(fits.size()));
}

}  // namespace

ReciprocalBasis find_lattice(const SpectralMap& map, double min_peak_snr) {
  double threshold = 0;
  std::vector<Peak> peaks = find_peaks(map, min_peak_snr, threshold);
  if (peaks.size() < 2)
    throw Error("fewer than 2 independent peaks");
  double max_amp = peaks.front().amp;

  // Basis candidates: shortest strong peak, then the shortest strong peak
  // that is clearly not collinear with it.
  std::vector<Peak> strong;
  for (const auto& p : peaks)
    if (p.amp >= 0.05 * max_amp && strong.size() < 60)
      strong.push_back(p);
  auto by_length = strong;
  std::stable_sort(by_length.begin(), by_length.end(),
                   [](const Peak& x, const Peak& y) { return x.pos.norm() < y.pos.norm() - 1e-9; });
  Vec2 a = by_length.front().pos;
  std::optional<Vec2> b;
  for (const auto& p : by_length)
    if (std::abs(det(a, p.pos)) > 0.2 * a.norm() * p.pos.norm()) {
      b = p.pos;
      break;
    }
  if (!b)
    throw Error("fewer than 2 independent peaks: all strong peaks are collinear");
  Vec2 bb = *b;
  gauss_reduce(a, bb);

  double rms = 0;
  std::size_t used = 0;
  least_squares(strong, a, bb, 0.15, rms, used);

  // Peaks at rational positions of the trial basis mean it spans only a
  // sublattice (e.g. both axial first orders are systematically absent).
  std::vector<Peak> support;
  for (const auto& p : peaks)
    if (p.amp >= 0.01 * max_amp)
      support.push_back(p);
  for (int round = 0; round < 4; ++round) {
    bool extended = false;
    for (int d : {2, 3, 4, 6}) {
      std::vector<std::array<long, 2>> extra;
      for (const auto& p : support) {
        Vec2 c = coords(a, bb, p.pos);
        if (std::abs(c.x - std::round(c.x)) < 0.1 && std::abs(c.y - std::round(c.y)) < 0.1)
          continue;
        long n1 = std::lround(c.x * d), n2 = std::lround(c.y * d);
        if (std::abs(c.x - double(n1) / d) < 0.08 && std::abs(c.y - double(n2) / d) < 0.08)
          extra.push_back({n1, n2});
      }
      if (extra.size() < 2)
        continue;
      std::vector<std::array<long, 2>> gens{{long(d), 0}, {0, long(d)}};
      gens.insert(gens.end(), extra.begin(), extra.end());
      auto basis = integer_lattice_basis(gens);
      Vec2 na = a * (double(basis[0][0]) / d) + bb * (double(basis[0][1]) / d);
      Vec2 nb = a * (double(basis[1][0]) / d) + bb * (double(basis[1][1]) / d);
      if (std::abs(det(na, nb)) > std::abs(det(a, bb)) * 0.99)
        continue;
      a = na;
      bb = nb;
      gauss_reduce(a, bb);
      extended = true;
      break;
    }
    if (!extended)
      break;
    least_squares(strong, a, bb, 0.15, rms, used);
  }

  least_squares(peaks, a, bb, 0.2, rms, used);
  least_squares(peaks, a, bb, 0.2, rms, used);
  gauss_reduce(a, bb);

  ReciprocalBasis r;
  r.a_star = a;
  r.b_star = bb;
  r.grid_width = map.width;
  r.grid_height = map.height;
  r.fit_rms = rms;
  r.indexed_peaks = used;
  return r;
}

StandardLattice standardize_lattice(const ReciprocalBasis& basis, const MetricTolerances& tol) {
  DirectBasis d = basis.direct();
  Vec2 a = d.a, b = d.b;
  gauss_reduce(a, b);
  double la = a.norm(), lb = b.norm();
  double gamma = std::acos(std::clamp(a.dot(b) / (la * lb), -1.0, 1.0)) * 180.0 / kPi;
  double len = std::abs(lb / la - 1.0);

  LatticeType type = LatticeType::oblique;
  if (len <= tol.hex_length &&
      (std::abs(gamma - 120) <= tol.hex_angle || std::abs(gamma - 60) <= tol.hex_angle)) {
    type = LatticeType::hexagonal;
    if (gamma < 90)
      b = b - a;
  } else if (len <= tol.square_length && std::abs(gamma - 90) <= tol.square_angle) {
    type = LatticeType::square;
  } else if (std::abs(gamma - 90) <= tol.square_angle) {
    type = LatticeType::rectangular;
  } else if (len <= tol.square_length) {
    type = LatticeType::centered;
  } else {
    // Reduced cell on the boundary a.b = +-|a|^2/2: a centred rectangular
    // lattice whose short conventional axis is a.
    double r = 2 * a.dot(b) / a.dot(a);
    if (std::abs(std::abs(r) - 1) <= tol.square_length) {
      type = LatticeType::centered;
      Vec2 na = b, nb = r > 0 ? b - a : b + a;
      a = na;
      b = nb;
    }
  }
  // Centred cells: a + b is the short conventional axis.
  if (type == LatticeType::centered && a.dot(b) > 0)
    b = b * -1.0;
  if (det(a, b) < 0) {
    if (type == LatticeType::centered || type == LatticeType::hexagonal)
      std::swap(a, b);
    else
      b = b * -1.0;  // keeps a as the shorter axis
  }

  StandardLattice out;
  out.type = type;
  out.basis = ReciprocalBasis::from_direct({a, b}, basis.grid_width, basis.grid_height);
  out.basis.fit_rms = basis.fit_rms;
  out.basis.indexed_peaks = basis.indexed_peaks;
  return out;
}

Complex CoefficientSet::value(Miller m) const {
  if (m.h == 0 && m.k == 0)
    return {};
  bool canon = is_canonical(m);
  auto it = values.find(canon ? m : -m);
  if (it == values.end())
    return {};
  return canon ? it->second : std::conj(it->second);
}

void CoefficientSet::set(Miller m, Complex c) {
  if (m.h == 0 && m.k == 0)
    throw Error("the (0,0) term is not stored in a coefficient set");
  if (is_canonical(m))
    values[m] = c;
  else
    values[-m] = std::conj(c);
}

double CoefficientSet::total_power() const {
  double s = 0;
  for (const auto& [m, c] : values)
    s += std::norm(c / kMaxAmplitude);
  return s;
}

std::vector<FourierCoefficient> CoefficientSet::list() const {
  std::vector<FourierCoefficient> out;
  out.reserve(values.size());
  for (const auto& [m, c] : values)
    out.push_back({m, std::abs(c), std::arg(c)});
  return out;
}

std::vector<HkaRecord> CoefficientSet::to_hka() const {
  std::vector<HkaRecord> out;
  for (const auto& [m, c] : values)
    out.push_back({m.h, m.k, std::abs(c), std::arg(c) * 180.0 / kPi});
  return out;
}

CoefficientSet CoefficientSet::from_hka(const std::vector<HkaRecord>& records,
                                        double dynamic_range) {
  CoefficientSet s;
  s.dynamic_range = dynamic_range;
  for (const auto& r : records) {
    if (r.h == 0 && r.k == 0)
      continue;
    Miller m{r.h, r.k};
    if (s.contains(m))
      throw Error("hka data lists both (" + std::to_string(r.h) + "," + std::to_string(r.k) +
                  ") and its Friedel mate");
    s.set(m, std::polar(r.amplitude, r.phase * kPi / 180.0));
  }
  return s;
}

CoefficientSet extract_coefficients(const SpectralMap& map, const ReciprocalBasis& basis,
                                    double dynamic_range, double resolution_radius) {
  if (!(dynamic_range >= 1))
    throw Error("dynamic range must be at least 1");
  double radius = resolution_radius > 0 ? resolution_radius : map.width / 2.0;
  double aspect = double(map.width) / map.height;
  DirectBasis d = basis.direct();
  double fmax = radius / map.width;
  int h1 = int(std::ceil(fmax * d.a.norm())) + 1;
  int h2 = int(std::ceil(fmax * d.b.norm())) + 1;
  double M = double(map.pixel_count());

  std::vector<std::pair<Miller, Complex>> raw;
  double max_amp = 0;
  for (int h = 0; h <= h1; ++h)
    for (int k = -h2; k <= h2; ++k) {
      Miller m{h, k};
      if (!CoefficientSet::is_canonical(m))
        continue;
      Vec2 p = basis.position(m);
      if (std::hypot(p.x, p.y * aspect) > radius)
        continue;
      if (p.x <= map.u_min() || p.x >= map.u_max() || p.y <= map.v_min() || p.y >= map.v_max())
        continue;
      Complex c = map.interpolate(p) / M;
      raw.push_back({m, c});
      max_amp = std::max(max_amp, std::abs(c));
    }
  if (max_amp <= 0)
    throw Error("no nonzero reflections inside the resolution limit");

  CoefficientSet s;
  s.basis = basis;
  s.dynamic_range = dynamic_range;
  s.resolution_radius = radius;
  s.raw_scale = max_amp;
  s.mean_level = map.mean_level;
  double cut = s.threshold();
  for (auto& [m, c] : raw) {
    Complex f = c / max_amp * CoefficientSet::kMaxAmplitude;
    if (std::abs(f) >= cut * (1 - 1e-12))
      s.values[m] = f;
  }
  return s;
}

CoefficientSet shift_origin(const CoefficientSet& set, Vec2 shift) {
  CoefficientSet out = set;
  for (auto& [m, c] : out.values)
    c *= std::polar(1.0, -2 * kPi * (m.h * shift.x + m.k * shift.y));
  return out;
}

namespace {

double cubic_weight(double t) {
  // Catmull-Rom
  t = std::abs(t);
  if (t < 1)
    return 1.5 * t * t * t - 2.5 * t * t + 1;
  if (t < 2)
    return -0.5 * t * t * t + 2.5 * t * t - 4 * t + 2;
  return 0;
}

int pow2_at_least(int n) {
  int p = 1;
  while (p < n)
    p <<= 1;
  return p;
}

}  // namespace

RasterImage back_transform(const CoefficientSet& set, int width, int height, double mean_level,
                           Vec2 offset) {
  RasterImage out(width, height, mean_level);
  if (set.values.empty())
    return out;
  const double scale = set.raw_scale / CoefficientSet::kMaxAmplitude;

  // Exact path: every reflection sits on the output frequency grid.
  bool on_grid = true;
  std::vector<std::pair<std::array<int, 2>, Complex>> grid;
  for (const auto& [m, c] : set.values) {
    Vec2 f = set.basis.frequency(m);
    double u = f.x * width, v = f.y * height;
    int iu = int(std::lround(u)), iv = int(std::lround(v));
    if (std::abs(u - iu) > 1e-6 || std::abs(v - iv) > 1e-6 || 2 * std::abs(iu) >= width ||
        2 * std::abs(iv) >= height) {
      on_grid = false;
      break;
    }
    Complex phase = std::polar(1.0, 2 * kPi * f.dot(offset));
    grid.push_back({{iu, iv}, c * scale * phase});
  }
  if (on_grid) {
    Fft2 fft(width, height, FFTW_BACKWARD);
    Complex* buf = fft.data();
    std::fill(buf, buf + std::size_t(width) * height, Complex{});
    for (auto& [uv, c] : grid) {
      buf[std::size_t(wrap(uv[1], height)) * width + wrap(uv[0], width)] += c;
      buf[std::size_t(wrap(-uv[1], height)) * width + wrap(-uv[0], width)] += std::conj(c);
    }
    fft.run();
    for (std::size_t i = 0; i < out.size(); ++i)
      out.pixels[i] += buf[i].real();
    return out;
  }

  // General path: sample one unit cell finely, then interpolate.
  int hmax = 1, kmax = 1;
  for (const auto& [m, c] : set.values) {
    hmax = std::max(hmax, std::abs(m.h));
    kmax = std::max(kmax, std::abs(m.k));
  }
  int n1 = std::min(4096, pow2_at_least(std::max(64, 16 * hmax + 1)));
  int n2 = std::min(4096, pow2_at_least(std::max(64, 16 * kmax + 1)));
  Fft2 fft(n1, n2, FFTW_BACKWARD);
  Complex* cell = fft.data();
  std::fill(cell, cell + std::size_t(n1) * n2, Complex{});
  for (const auto& [m, c] : set.values) {
    cell[std::size_t(wrap(m.k, n2)) * n1 + wrap(m.h, n1)] += c * scale;
    cell[std::size_t(wrap(-m.k, n2)) * n1 + wrap(-m.h, n1)] += std::conj(c * scale);
  }
  fft.run();

  DirectBasis d = set.basis.direct();
  double dd = det(d.a, d.b);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      Vec2 p{x + offset.x, y + offset.y};
      double fx = det(p, d.b) / dd * n1, fy = det(d.a, p) / dd * n2;
      double bx = std::floor(fx), by = std::floor(fy);
      double acc = 0;
      for (int j = -1; j <= 2; ++j) {
        double wy = cubic_weight(fy - (by + j));
        int row = wrap(int(by) + j, n2);
        for (int i = -1; i <= 2; ++i)
          acc += wy * cubic_weight(fx - (bx + i)) *
                 cell[std::size_t(row) * n1 + wrap(int(bx) + i, n1)].real();
      }
      out.at(x, y) += acc;
    }
  return out;
}

}  // namespace planesym
