#include <png.h>

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "planesym/image_io.hpp"

using namespace planesym;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "planesym_test_image_io";
  fs::create_directories(dir);
  return dir / name;
}

void write_rgb_png(const fs::path& p, int w, int h, const std::vector<png_byte>& rgb) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = w;
  img.height = h;
  img.format = PNG_FORMAT_RGB;
  REQUIRE(png_image_write_to_file(&img, p.c_str(), 0, rgb.data(), 0, nullptr));
}

}  // namespace

TEST_CASE("PGM decode") {
  std::istringstream p2("P2\n# comment\n2 2\n255\n0 85\n170 255\n");
  RasterImage a = read_pgm(p2);
  CHECK(a.width == 2);
  CHECK(a.height == 2);
  CHECK(a.pixels == std::vector<double>{0, 85, 170, 255});

  std::string raw = "P5\n2 2\n255\n";
  raw += std::string{char(0), char(85), char(170), char(255)};
  std::istringstream p5(raw);
  CHECK(read_pgm(p5).pixels == std::vector<double>{0, 85, 170, 255});

  std::istringstream bad("P6\n1 1\n255\n");
  CHECK_THROWS_AS(read_pgm(bad), Error);
  std::istringstream trunc("P5\n4 4\n255\nab");
  CHECK_THROWS_AS(read_pgm(trunc), Error);
}

TEST_CASE("PNG decode and round trip") {
  RasterImage white(1024, 1024, 255.0);
  fs::path p = scratch("white.png");
  save_png(white, p);
  RasterImage back = load_image(p);
  CHECK(back.width == 1024);
  CHECK(back.height == 1024);
  CHECK(std::all_of(back.pixels.begin(), back.pixels.end(), [](double v) { return v == 255.0; }));

  // Red maps to round(0.299 * 255).
  fs::path rgb = scratch("red.png");
  write_rgb_png(rgb, 2, 1, {255, 0, 0, 10, 10, 10});
  RasterImage r = load_image(rgb);
  CHECK(r.at(0, 0) == 76.0);
  CHECK(r.at(1, 0) == 10.0);

  RasterImage g(5, 3);
  for (std::size_t i = 0; i < g.size(); ++i)
    g.pixels[i] = double(i * 17 % 256);
  fs::path pg = scratch("g.pgm");
  save_image(g, pg);
  CHECK(load_image(pg).pixels == g.pixels);
  fs::path pn = scratch("g.png");
  save_image(g, pn);
  CHECK(load_image(pn).pixels == g.pixels);

  CHECK_THROWS_AS(load_image(scratch("missing.png")), Error);
}

TEST_CASE("saving clips and rounds") {
  RasterImage g(3, 1);
  g.pixels = {-4.0, 127.6, 300.0};
  fs::path p = scratch("clip.png");
  save_png(g, p);
  CHECK(load_image(p).pixels == std::vector<double>{0, 128, 255});
}

TEST_CASE("histogram statistics") {
  Histogram u = compute_histogram(RasterImage(7, 5, 100.0));
  CHECK(u.mean == 100.0);
  CHECK(u.rms == 0.0);
  CHECK(u.mad == 0.0);
  CHECK(u.fwid == 0.0);
  CHECK(u.count == 35);
  CHECK(u.bins[100] == 35);

  RasterImage two(2, 1);
  two.pixels = {0, 200};
  Histogram h = compute_histogram(two);
  CHECK(h.mean == doctest::Approx(100));
  CHECK(h.rms == doctest::Approx(100));
  CHECK(h.mad == doctest::Approx(100));
  CHECK(h.fwid == doctest::Approx(200));

  RasterImage disc(11, 11, 0.0);
  disc.at(5, 5) = 50;
  RegionSelection r{5, 5, 1.0};
  Histogram d = compute_histogram(disc, r);
  CHECK(d.count == 5);
  CHECK(d.mean == doctest::Approx(10));
  CHECK_THROWS_AS(compute_histogram(disc, RegionSelection{-50, -50, 1.0}), Error);
}

TEST_CASE("region checks") {
  RegionSelection r{50, 50, 40};
  CHECK_NOTHROW(r.check_fits(100, 100));
  CHECK_THROWS_AS(r.check_fits(80, 100), Error);
  CHECK_THROWS_AS((RegionSelection{10, 10, 0}).check_fits(100, 100), Error);
  CHECK(RegionSelection{2, 2, 1}.pixel_count(5, 5) == 5);
}

TEST_CASE("hka parsing") {
  std::istringstream one("1 0 10000 0.0\n");
  auto r = parse_hka(one);
  REQUIRE(r.size() == 1);
  CHECK(r[0].h == 1);
  CHECK(r[0].k == 0);
  CHECK(r[0].amplitude == 10000);
  CHECK(r[0].phase == 0);

  std::istringstream three("h k amp phase\n1 0 10 0\n# skip\n\n2 -1 512.3 179.5\n0 1 3 -90\n");
  auto t = parse_hka(three);
  REQUIRE(t.size() == 3);
  CHECK(t[1].h == 2);
  CHECK(t[1].k == -1);
  CHECK(t[1].amplitude == doctest::Approx(512.3));
  CHECK(t[1].phase == doctest::Approx(179.5));

  std::istringstream dup("1 0 1 0\n1 0 2 0\n");
  CHECK_THROWS_WITH_AS(parse_hka(dup), doctest::Contains("duplicate index (1,0)"), Error);
}

TEST_CASE("hka writing") {
  std::ostringstream empty;
  write_hka(empty, {});
  CHECK(empty.str().empty());

  std::ostringstream one;
  write_hka(one, {{1, 0, 10000, 0}});
  CHECK(one.str() == "1 0 10000.0000 0.0000\n");

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> amp(0, 10000), ph(-180, 180);
  std::vector<HkaRecord> recs;
  for (int h = 0; recs.size() < 956; ++h)
    for (int k = -30; k <= 30 && recs.size() < 956; ++k)
      if (h > 0 || k > 0)
        recs.push_back({h, k, amp(rng), ph(rng)});
  std::shuffle(recs.begin(), recs.end(), rng);
  fs::path p = scratch("rt.hka");
  write_hka(p, recs);
  auto back = read_hka(p);
  REQUIRE(back.size() == recs.size());
  auto key = [](const HkaRecord& a, const HkaRecord& b) { return std::tie(a.h, a.k) < std::tie(b.h, b.k); };
  std::sort(recs.begin(), recs.end(), key);
  CHECK(std::is_sorted(back.begin(), back.end(), key));
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].h == recs[i].h);
    CHECK(back[i].k == recs[i].k);
    CHECK(std::abs(back[i].amplitude - recs[i].amplitude) <= 1e-4);
    CHECK(std::abs(back[i].phase - recs[i].phase) <= 1e-4);
  }
}
