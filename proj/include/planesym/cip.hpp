#pragma once

#include <optional>
#include <string>
#include <vector>

#include "planesym/pipeline.hpp"
#include "planesym/symmetrize.hpp"

namespace planesym {

struct QualityReport {
  int n_cells = 1;                  // unit cells in the analysed region
  int k_multiplicity = 1;           // group operations per lattice point
  double fourier_filter_boost = 1;  // sqrt(n_cells)
  double cip_boost = 1;             // sqrt(k)
  double resolution_radius = 0;     // reciprocal pixels
};

QualityReport quality_metrics(double region_area, const ReciprocalBasis& basis,
                              const GroupSetting& group, double resolution_radius = 0.0);
QualityReport quality_metrics(const RegionSelection& region, const ReciprocalBasis& basis,
                              const GroupSetting& group, double resolution_radius = 0.0);

struct ProcessResult {
  std::string group;
  RasterImage output;  // same size as the input, not quantised
  Histogram before, after;
  QualityReport quality;
  OriginShift origin;
  StandardLattice lattice;
  CoefficientSet symmetrized;  // in the refined origin
  ClassificationResult classification;
  std::vector<std::string> warnings;
};

// Enforces `group` on the translation-averaged cell and back-transforms over
// the whole input raster. The symmetrised band is rescaled to the power of
// the translation-averaged band and the input mean is restored.
ProcessResult process(const RasterImage& image, const GroupSetting& group,
                      const AnalysisConfig& cfg = {});
// Uses the classification's best plane group.
ProcessResult process_auto(const RasterImage& image, const AnalysisConfig& cfg = {});

// Pearson correlation of two equally sized rasters.
double correlation(const RasterImage& a, const RasterImage& b);

}  // namespace planesym
