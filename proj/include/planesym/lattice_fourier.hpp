#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "planesym/image_io.hpp"
#include "planesym/types.hpp"

namespace planesym {

using Complex = std::complex<double>;

// Raw (unnormalised) 2D DFT of the analysis box, DC at the centre.
// Frequency (u, v) is stored at column u + width/2, row v + height/2.
struct SpectralMap {
  int width = 0;
  int height = 0;
  std::vector<Complex> data;
  double mean_level = 0.0;  // mean of the analysed pixels
  Vec2 box_origin;          // image coordinates of box pixel (0, 0)

  int u_min() const { return -(width / 2); }
  int u_max() const { return (width - 1) / 2; }
  int v_min() const { return -(height / 2); }
  int v_max() const { return (height - 1) / 2; }
  std::size_t pixel_count() const { return std::size_t(width) * height; }

  const Complex& at(int u, int v) const {
    return data[std::size_t(v + height / 2) * width + (u + width / 2)];
  }
  Complex& at(int u, int v) { return data[std::size_t(v + height / 2) * width + (u + width / 2)]; }
  double amplitude(int u, int v) const { return std::abs(at(u, v)); }
  // Bilinear interpolation; (u, v) must lie inside the grid.
  Complex interpolate(Vec2 uv) const;
};

// Full region -> the whole image; circular region -> its bounding box, with
// pixels outside the disc set to the in-disc mean.
SpectralMap dft2(const RasterImage& image, const std::optional<RegionSelection>& region = {});

struct DirectBasis {
  Vec2 a, b;  // pixels
};

struct LatticeParameters {
  double a = 0.0, b = 0.0;  // pixels
  double gamma = 0.0;       // degrees
};

// Reciprocal basis in grid units (DFT frequency indices) of a map of size
// grid_width x grid_height.
struct ReciprocalBasis {
  Vec2 a_star, b_star;
  int grid_width = 0;
  int grid_height = 0;
  double fit_rms = 0.0;  // grid units, over indexed peaks
  std::size_t indexed_peaks = 0;

  Vec2 position(Miller m) const { return a_star * m.h + b_star * m.k; }
  // Cycles per pixel.
  Vec2 frequency(Miller m) const {
    Vec2 p = position(m);
    return {p.x / grid_width, p.y / grid_height};
  }
  DirectBasis direct() const;
  LatticeParameters parameters() const;
  double cell_area() const;  // pixels^2

  static ReciprocalBasis from_direct(const DirectBasis& d, int grid_width, int grid_height);
};

struct MetricTolerances {
  double hex_length = 0.02;  // relative
  double hex_angle = 2.0;    // degrees
  double square_length = 0.01;
  double square_angle = 1.0;
};

struct StandardLattice {
  ReciprocalBasis basis;
  LatticeType type = LatticeType::oblique;
};

ReciprocalBasis find_lattice(const SpectralMap& map, double min_peak_snr = 5.0);

// Reduces the cell, decides the Bravais type within the tolerances and
// returns the basis the plane-group settings are written in: equal-length
// rhombic for centred, gamma = 120 degrees for hexagonal.
StandardLattice standardize_lattice(const ReciprocalBasis& basis,
                                    const MetricTolerances& tol = {});

struct FourierCoefficient {
  Miller index;
  double amplitude = 0.0;  // normalised scale, strongest = 10000
  double phase = 0.0;      // radians
};

// Fourier coefficients of a lattice-periodic pattern, normalised so that the
// strongest extracted reflection has amplitude 10000. Only one member of each
// Friedel pair is stored (h > 0, or h == 0 and k > 0); the mate is the complex
// conjugate. Missing indices count as zero.
class CoefficientSet {
public:
  static constexpr double kMaxAmplitude = 10000.0;

  std::map<Miller, Complex> values;
  ReciprocalBasis basis;
  double dynamic_range = 200.0;
  double resolution_radius = 0.0;
  double raw_scale = 1.0;   // raw coefficient magnitude that maps to 10000
  double mean_level = 0.0;  // DC term on the pixel scale

  static bool is_canonical(Miller m) { return m.h > 0 || (m.h == 0 && m.k > 0); }
  static Miller canonical(Miller m) { return is_canonical(m) ? m : -m; }

  std::size_t n_count() const { return values.size(); }
  double threshold() const { return kMaxAmplitude / dynamic_range; }
  Complex value(Miller m) const;
  bool contains(Miller m) const { return values.count(canonical(m)) != 0; }
  void set(Miller m, Complex c);
  // Sum of |F / 10000|^2 over the stored half plane.
  double total_power() const;
  std::vector<FourierCoefficient> list() const;
  std::vector<HkaRecord> to_hka() const;
  static CoefficientSet from_hka(const std::vector<HkaRecord>& records,
                                 double dynamic_range = 200.0);
};

CoefficientSet extract_coefficients(const SpectralMap& map, const ReciprocalBasis& basis,
                                    double dynamic_range = 200.0,
                                    double resolution_radius = 0.0);

// Multiplies C(h) by exp(-2 pi i h.shift): the pattern moved by +shift
// (fractional units).
CoefficientSet shift_origin(const CoefficientSet& set, Vec2 shift);

// Synthesises mean_level + sum over h of C(h) exp(2 pi i f_h . x) on a
// width x height raster. Output pixel (x, y) sits at box coordinate
// (x, y) + offset. Uses an exact FFT when every reflection falls on the
// output grid, otherwise interpolates a finely sampled unit cell.
RasterImage back_transform(const CoefficientSet& set, int width, int height,
                           double mean_level, Vec2 offset = {});

}  // namespace planesym
