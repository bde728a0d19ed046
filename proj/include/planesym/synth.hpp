#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "planesym/image_io.hpp"
#include "planesym/lattice_fourier.hpp"

namespace planesym {

// Isotropic Gaussian blob placed in the asymmetric unit.
struct Blob {
  Vec2 pos;        // fractional coordinates
  double weight;   // signed intensity
  double sigma;    // fraction of the cell edge |a|
  Vec2 delta_dir;  // displacement per unit pseudo_delta (fractional)
};

struct MotifSpec {
  std::string group = "p4";   // symmetry that is kept exact
  std::string pseudo_group;   // optional supergroup broken by pseudo_delta
  double pseudo_delta = 0.0;
  LatticeType lattice = LatticeType::square;
  int cell_px = 96;     // |a| in pixels; must be even
  double aspect = 0.0;  // |b|/|a| (rect), B/A (centred); 0 = default
  int cells_x = 12;
  int cells_y = 12;
  std::vector<Blob> blobs;  // empty: random motif from motif_seed
  std::uint64_t motif_seed = 3;
  double low = 32.0;  // output range of the noise-free pattern
  double high = 224.0;
};

struct NoiseSpec {
  double gaussian_sigma = 0.0;
  int spread_radius = 0;
  std::uint64_t seed = 0;
};

// Pixel lattice and raster size used for a spec; a is along +x.
struct SynthGeometry {
  DirectBasis basis;  // pixels, integer components
  DirectBasis ideal;  // exact metric the motif is defined in
  int width = 0;
  int height = 0;
};
SynthGeometry synth_geometry(const MotifSpec& spec);

// Blobs of the asymmetric unit expanded over the group (and, for the
// pseudo-broken copies, over the cosets of the supergroup).
std::vector<Blob> expand_motif(const MotifSpec& spec);

// Band-limited Fourier synthesis of the expanded motif. Every reflection
// lands on the DFT grid, so the raster has the exact symmetry of the MotifSpec
// up to rounding. Values are not quantised.
RasterImage generate_pattern(const MotifSpec& spec);

RasterImage add_gaussian_noise(const RasterImage& image, double sigma, std::uint64_t seed);
RasterImage add_spread_noise(const RasterImage& image, int radius, std::uint64_t seed);
// Gaussian first, then spread; result rounded to integer gray levels.
RasterImage apply_noise(const RasterImage& image, const NoiseSpec& noise);
RasterImage quantize(const RasterImage& image);

std::vector<Blob> knoll_motif();
std::vector<Blob> random_motif(std::uint64_t seed, int n_blobs = 4);

// Three-image experiment: p4 exact, p4gm broken by a 20% tip offset;
// clean, moderate noise and five times that noise.
struct PatternTrio {
  MotifSpec spec;
  NoiseSpec moderate;
  NoiseSpec heavy;
  RasterImage clean;   // quantised
  RasterImage noisy;   // moderate
  RasterImage heavy_noisy;
};
MotifSpec trio_motif_spec();
NoiseSpec moderate_noise(std::uint64_t seed);
NoiseSpec heavy_noise(std::uint64_t seed);
// Default seed: the heavy-noise plane ascent overshoots to p4gm and the
// amplitude map holds it back at Laue class 4.
inline constexpr std::uint64_t kTrioSeed = 6;
PatternTrio pattern_trio(std::uint64_t seed = kTrioSeed);

}  // namespace planesym
