#pragma once

#include <optional>

#include "planesym/hierarchy.hpp"
#include "planesym/image_io.hpp"
#include "planesym/lattice_fourier.hpp"

namespace planesym {

struct AnalysisConfig {
  std::optional<RegionSelection> region;  // none: whole image
  double dynamic_range = 200.0;
  double resolution_radius = 0.0;  // 0: Nyquist
  double min_peak_snr = 5.0;
  MetricTolerances tolerances;
  ClassifyConfig classify;
};

struct Analysis {
  SpectralMap map;
  ReciprocalBasis found;    // as indexed from the peaks
  StandardLattice lattice;  // basis the settings are written in
  CoefficientSet trans;     // translation-averaged set
};

// region -> dft2 -> find_lattice -> standardize_lattice -> extract_coefficients
Analysis analyze(const RasterImage& image, const AnalysisConfig& cfg = {});

struct ImageClassification {
  Analysis analysis;
  ClassificationResult result;
};

ImageClassification classify_image(const RasterImage& image, const AnalysisConfig& cfg = {});

// log(1 + |F|) of the spectral map scaled to 0..255, DC at the centre.
RasterImage amplitude_map_image(const SpectralMap& map);

}  // namespace planesym
