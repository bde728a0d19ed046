#include <doctest.h>

#include "planesym/cip.hpp"
#include "planesym/synth.hpp"

using namespace planesym;

namespace {

MotifSpec small_knoll() {
  MotifSpec s = trio_motif_spec();
  s.cell_px = 48;
  s.cells_x = s.cells_y = 8;
  return s;
}

// Translation average of an exact periodic raster: mean over all cells.
RasterImage cell_average(const RasterImage& img, int cell) {
  RasterImage out(img.width, img.height);
  int nx = img.width / cell, ny = img.height / cell;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double s = 0;
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
          s += img.at((x + i * cell) % img.width, (y + j * cell) % img.height);
      out.at(x, y) = s / (nx * ny);
    }
  return out;
}

}  // namespace

TEST_CASE("quality metrics") {
  ReciprocalBasis b = ReciprocalBasis::from_direct({{10, 0}, {0, 10}}, 100, 100);
  QualityReport q = quality_metrics(88 * 100.0, b, setting("p4"));
  CHECK(q.n_cells == 88);
  CHECK(q.k_multiplicity == 4);
  CHECK(q.fourier_filter_boost == doctest::Approx(9.3808).epsilon(1e-4));
  CHECK(q.cip_boost == doctest::Approx(2.0));

  QualityReport one = quality_metrics(100.0, b, setting("p1"));
  CHECK(one.fourier_filter_boost == 1.0);
  CHECK(one.cip_boost == 1.0);

  QualityReport h = quality_metrics(144 * 100.0, b, setting("p6mm"), 0.25);
  CHECK(h.fourier_filter_boost == doctest::Approx(12));
  CHECK(h.cip_boost == doctest::Approx(3.4641).epsilon(1e-4));
  CHECK(h.resolution_radius == 0.25);

  QualityReport disc = quality_metrics(RegionSelection{50, 50, 30}, b, setting("p2"));
  CHECK(disc.n_cells == 28);  // pi * 900 / 100
}

TEST_CASE("correlation") {
  RasterImage a(4, 1), b(4, 1);
  a.pixels = {1, 2, 3, 4};
  b.pixels = {10, 20, 30, 40};
  CHECK(correlation(a, b) == doctest::Approx(1));
  b.pixels = {4, 3, 2, 1};
  CHECK(correlation(a, b) == doctest::Approx(-1));
  CHECK_THROWS_AS(correlation(a, RasterImage(2, 2)), Error);
}

TEST_CASE("exact pattern is a fixed point") {
  MotifSpec s = small_knoll();
  s.pseudo_group.clear();
  RasterImage img = generate_pattern(s);
  ProcessResult r = process(img, setting("p4"));
  CHECK(r.group == "p4");
  CHECK(r.output.width == img.width);
  CHECK(correlation(r.output, cell_average(img, s.cell_px)) > 0.999);
  CHECK(r.quality.n_cells == 64);
  CHECK(r.quality.cip_boost == doctest::Approx(2));
  CHECK(r.warnings.empty());
  CHECK(r.before.mean == doctest::Approx(r.after.mean).epsilon(1e-6));
}

TEST_CASE("noise suppression in the true group") {
  MotifSpec s = small_knoll();
  RasterImage clean = generate_pattern(s);
  RasterImage noisy = apply_noise(clean, {20.0, 0, 5});
  ProcessResult r = process(noisy, setting("p4"));
  double before = correlation(noisy, clean);
  double after = correlation(r.output, clean);
  CHECK(after > before);
  CHECK(after > 0.99);
  // Histograms of the processed image are narrower than the noisy ones.
  CHECK(r.after.rms < r.before.rms);

  ProcessResult a = process_auto(noisy);
  CHECK(a.group == a.classification.best_plane);
}

TEST_CASE("processing in a pseudo supergroup") {
  MotifSpec s = small_knoll();
  RasterImage img = generate_pattern(s);
  ProcessResult r = process(img, setting("p4gm"));
  REQUIRE_FALSE(r.warnings.empty());
  CHECK(r.warnings[0].find("not crystallographically consistent") != std::string::npos);
  // The output now carries the full p4gm symmetry, mirrors included.
  ImageClassification c = classify_image(r.output);
  const ResidualRow* p4gm = c.result.table.find("p4gm");
  const ResidualRow* p4gm_in = classify_image(img).result.table.find("p4gm");
  REQUIRE(p4gm);
  REQUIRE(p4gm_in);
  CHECK(p4gm->j_complex < 0.05 * p4gm_in->j_complex);

  CHECK_THROWS_AS(process(img, setting("p6")), Error);
}
