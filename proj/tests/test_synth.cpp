#include <doctest.h>

#include <set>

#include "planesym/cip.hpp"
#include "planesym/pipeline.hpp"
#include "planesym/synth.hpp"

using namespace planesym;

namespace {

// Largest pixel difference between the raster and its image under every
// operation of g; valid when the operations map pixels to pixels (square
// cells with translations in multiples of half a cell).
double pixel_asymmetry(const RasterImage& img, const GroupSetting& g, int cell) {
  double worst = 0;
  auto wrap = [](int v, int n) { return ((v % n) + n) % n; };
  for (const auto& op : g.ops) {
    int tx = int(std::lround(op.t.x * cell)), ty = int(std::lround(op.t.y * cell));
    for (int y = 0; y < img.height; y += 3)
      for (int x = 0; x < img.width; x += 3) {
        int px = op.r[0] * x + op.r[1] * y + tx, py = op.r[2] * x + op.r[3] * y + ty;
        worst = std::max(worst, std::abs(img.at(x, y) - img.at(wrap(px, img.width), wrap(py, img.height))));
      }
  }
  return worst;
}

MotifSpec square_spec(const std::string& group) {
  MotifSpec s;
  s.group = group;
  s.lattice = LatticeType::square;
  s.cell_px = 48;
  s.cells_x = s.cells_y = 4;
  return s;
}

}  // namespace

TEST_CASE("geometry") {
  MotifSpec s;
  s.lattice = LatticeType::hexagonal;
  s.group = "p6";
  s.cell_px = 48;
  s.cells_x = 3;
  s.cells_y = 2;
  SynthGeometry g = synth_geometry(s);
  CHECK(g.width == 144);
  CHECK(g.height == 2 * 2 * 42);
  CHECK(g.basis.a.x == 48);
  CHECK(g.ideal.b.y == doctest::Approx(48 * std::sqrt(3.0) / 2));

  s.cell_px = 7;
  CHECK_THROWS_AS(synth_geometry(s), Error);
  s.cell_px = 48;
  s.cells_x = 0;
  CHECK_THROWS_AS(synth_geometry(s), Error);
  MotifSpec r = square_spec("p2mm");
  r.lattice = LatticeType::rectangular;
  r.aspect = 1.0;
  CHECK_THROWS_AS(synth_geometry(r), Error);
  MotifSpec o = square_spec("p2");
  o.lattice = LatticeType::oblique;
  o.cell_px = 50;
  CHECK_THROWS_AS(synth_geometry(o), Error);
}

TEST_CASE("motif expansion checks its inputs") {
  MotifSpec s = square_spec("p3");
  CHECK_THROWS_WITH_AS(expand_motif(s), doctest::Contains("does not fit a square lattice"), Error);
  s = square_spec("p4");
  s.pseudo_group = "p2gg";
  CHECK_THROWS_WITH_AS(expand_motif(s), doctest::Contains("not a supergroup"), Error);
  s.pseudo_group = "p4gm";
  s.pseudo_delta = 1.5;
  CHECK_THROWS_AS(expand_motif(s), Error);
  s.pseudo_delta = 0.2;
  s.blobs = knoll_motif();
  // Four blobs, two cosets of p4 in p4gm, four operations each.
  CHECK(expand_motif(s).size() == 4 * 2 * 4);
  for (const auto& b : expand_motif(s)) {
    CHECK(b.pos.x >= 0);
    CHECK(b.pos.x < 1);
  }
  CHECK_THROWS_AS(setting("p7"), Error);
}

TEST_CASE("unbroken supergroup is exact") {
  for (auto [g, super] : {std::pair{"p4", "p4mm"}, {"p2", "p2gg"}, {"p2mm", "p4mm"}}) {
    CAPTURE(g);
    MotifSpec s = square_spec(g);
    s.pseudo_group = super;
    s.pseudo_delta = 0;
    RasterImage img = generate_pattern(s);
    CHECK(pixel_asymmetry(img, setting(super), s.cell_px) < 1e-9);
    s.pseudo_delta = 0.3;
    RasterImage broken = generate_pattern(s);
    CHECK(pixel_asymmetry(broken, setting(g), s.cell_px) < 1e-9);
    CHECK(pixel_asymmetry(broken, setting(super), s.cell_px) > 1);
  }
  MotifSpec k = square_spec("p4");
  k.pseudo_group = "p4gm";
  k.blobs = knoll_motif();
  RasterImage img = generate_pattern(k);
  CHECK(pixel_asymmetry(img, setting("p4gm"), k.cell_px) < 1e-9);
  CHECK(*std::min_element(img.pixels.begin(), img.pixels.end()) == doctest::Approx(k.low));
  CHECK(*std::max_element(img.pixels.begin(), img.pixels.end()) == doctest::Approx(k.high));
}

TEST_CASE("exact patterns keep every group") {
  for (const auto& g : all_settings()) {
    CAPTURE(g.name);
    MotifSpec s;
    s.group = g.name;
    s.lattice = g.lattice;
    s.cell_px = 48;
    s.cells_x = s.cells_y = 3;
    RasterImage img = generate_pattern(s);
    SynthGeometry geo = synth_geometry(s);
    CHECK(img.width == geo.width);
    CHECK(img.height == geo.height);
    if (g.lattice == LatticeType::square)
      CHECK(pixel_asymmetry(img, g, s.cell_px) < 1e-9);
  }
}

TEST_CASE("pseudosymmetric pattern classifies with the pseudo supergroup") {
  MotifSpec s = trio_motif_spec();
  s.cell_px = 64;
  s.cells_x = s.cells_y = 8;
  ImageClassification c = classify_image(quantize(generate_pattern(s)));
  const auto& r = c.result;
  CHECK(r.best_plane == "p4");
  CHECK(std::set<std::string>(r.genuine_plane.begin(), r.genuine_plane.end()) ==
        std::set<std::string>{"p2", "p4"});
  CHECK(r.plane_label("p4gm") == Label::pseudo);
  CHECK(r.genuine_laue == "4");
  CHECK(r.consistent);
}

TEST_CASE("asymmetric motif is reported as translation-only") {
  MotifSpec s;
  s.group = "p1";
  s.lattice = LatticeType::oblique;
  s.cell_px = 48;
  s.cells_x = s.cells_y = 4;
  s.motif_seed = 3;
  ImageClassification c = classify_image(generate_pattern(s));
  CHECK(c.result.best_plane == "p1");
  REQUIRE_FALSE(c.result.warnings.empty());
  CHECK(c.result.warnings[0].find("translation-only") != std::string::npos);
  for (const auto& row : c.result.table.rows)
    if (row.k >= 2)
      CHECK(row.j_complex > 0.1 * *c.result.table.total_power);
}

TEST_CASE("gaussian noise") {
  RasterImage flat(1000, 1000, 128.0);
  CHECK(add_gaussian_noise(flat, 0, 1).pixels == flat.pixels);
  RasterImage n = add_gaussian_noise(flat, 20, 42);
  Histogram h = compute_histogram(n);
  CHECK(h.rms == doctest::Approx(20).epsilon(0.02));
  CHECK(h.mean == doctest::Approx(128).epsilon(0.01));
  CHECK(add_gaussian_noise(flat, 20, 42).pixels == n.pixels);
  CHECK(add_gaussian_noise(flat, 20, 43).pixels != n.pixels);
  CHECK_THROWS_AS(add_gaussian_noise(flat, -1, 1), Error);
  RasterImage clip = add_gaussian_noise(RasterImage(100, 100, 250.0), 50, 1);
  CHECK(*std::max_element(clip.pixels.begin(), clip.pixels.end()) <= 255.0);
}

TEST_CASE("spread noise permutes pixels") {
  MotifSpec s = square_spec("p4");
  RasterImage img = quantize(generate_pattern(s));
  CHECK(add_spread_noise(img, 0, 5).pixels == img.pixels);
  for (int radius : {1, 2, 3, 7})
    for (std::uint64_t seed : {1ULL, 99ULL}) {
      RasterImage sp = add_spread_noise(img, radius, seed);
      CHECK(compute_histogram(sp).bins == compute_histogram(img).bins);
      std::vector<double> a = img.pixels, b = sp.pixels;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      CHECK(a == b);
    }
  CHECK(add_spread_noise(img, 2, 8).pixels == add_spread_noise(img, 2, 8).pixels);
  CHECK_THROWS_AS(add_spread_noise(img, -1, 1), Error);

  // Sharp edges: a checkerboard of 8 px squares.
  RasterImage board(256, 256);
  for (int y = 0; y < 256; ++y)
    for (int x = 0; x < 256; ++x)
      board.at(x, y) = ((x / 8 + y / 8) % 2) ? 200.0 : 50.0;
  RasterImage spread = add_spread_noise(board, 3, 4);
  // Swaps add white noise everywhere, so compare the lattice reflections
  // beyond half-Nyquist, where the edges live.
  double lat_before = 0, lat_after = 0;
  SpectralMap mb = dft2(board), ma = dft2(spread);
  for (int v = mb.v_min(); v <= mb.v_max(); v += 16)
    for (int u = mb.u_min(); u <= mb.u_max(); u += 16)
      if (std::hypot(u / 256.0, v / 256.0) > 0.25) {
        lat_before += std::norm(mb.at(u, v));
        lat_after += std::norm(ma.at(u, v));
      }
  CHECK(lat_after / lat_before < 1);
}

TEST_CASE("noise pipeline and the pattern trio") {
  RasterImage img(64, 64, 100.4);
  CHECK(apply_noise(img, {}).pixels == std::vector<double>(64 * 64, 100.0));
  RasterImage a = apply_noise(img, {10, 1, 3}), b = apply_noise(img, {10, 1, 3});
  CHECK(a.pixels == b.pixels);
  for (double v : a.pixels)
    CHECK(v == std::round(v));

  CHECK(moderate_noise(5).gaussian_sigma == 12);
  CHECK(heavy_noise(5).gaussian_sigma == 5 * moderate_noise(5).gaussian_sigma);
  CHECK(heavy_noise(5).seed != moderate_noise(5).seed);
  MotifSpec p = trio_motif_spec();
  CHECK(p.group == "p4");
  CHECK(p.pseudo_group == "p4gm");
  CHECK(p.pseudo_delta == 0.2);
}
