#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "planesym/types.hpp"

namespace planesym {

// Grayscale raster. Values live on the 0..255 scale but are kept as doubles
// so that synthesised and reconstructed images are not quantised until saved.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;  // row-major

  RasterImage() = default;
  RasterImage(int w, int h, double fill = 0.0);

  double& at(int x, int y) { return pixels[std::size_t(y) * width + x]; }
  double at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }
  std::size_t size() const { return pixels.size(); }
};

// Circular analysis region in pixel coordinates (pixel centres at integers).
struct RegionSelection {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;

  bool contains(double x, double y) const {
    double dx = x - cx, dy = y - cy;
    return dx * dx + dy * dy <= radius * radius;
  }
  // Throws if the circle does not fit inside a width x height image.
  void check_fits(int width, int height) const;
  std::size_t pixel_count(int width, int height) const;
};

struct Histogram {
  std::array<std::size_t, 256> bins{};
  std::size_t count = 0;
  double mean = 0.0;
  double rms = 0.0;   // standard deviation about the mean
  double mad = 0.0;   // mean absolute deviation about the mean
  double fwid = 0.0;  // max - min
  double min = 0.0;
  double max = 0.0;
  std::size_t mode_count = 0;
};

// PNG (8/16 bit, gray or colour, alpha ignored) and PGM (P2/P5).
// Colour is reduced with Rec. 601 luma and rounded.
RasterImage load_image(const std::filesystem::path& path);
RasterImage read_pgm(std::istream& in);

// Values are clipped to 0..255 and rounded.
void save_png(const RasterImage& image, const std::filesystem::path& path);
void save_pgm(const RasterImage& image, const std::filesystem::path& path);
void save_image(const RasterImage& image, const std::filesystem::path& path);

Histogram compute_histogram(const RasterImage& image,
                            const std::optional<RegionSelection>& region = {});

// One line of an .hka file: amplitude and phase in degrees.
struct HkaRecord {
  int h = 0;
  int k = 0;
  double amplitude = 0.0;
  double phase = 0.0;
};

std::vector<HkaRecord> parse_hka(std::istream& in);
std::vector<HkaRecord> read_hka(const std::filesystem::path& path);
// Sorted by (h, k); "%d %d %.4f %.4f" per line.
void write_hka(std::ostream& out, std::vector<HkaRecord> records);
void write_hka(const std::filesystem::path& path, std::vector<HkaRecord> records);

}  // namespace planesym
