#include "planesym/pipeline.hpp"

#include <algorithm>

namespace planesym {

Analysis analyze(const RasterImage& image, const AnalysisConfig& cfg) {
  Analysis a;
  a.map = dft2(image, cfg.region);
  a.found = find_lattice(a.map, cfg.min_peak_snr);
  a.lattice = standardize_lattice(a.found, cfg.tolerances);
  a.trans = extract_coefficients(a.map, a.lattice.basis, cfg.dynamic_range, cfg.resolution_radius);
  return a;
}

ImageClassification classify_image(const RasterImage& image, const AnalysisConfig& cfg) {
  ImageClassification out;
  out.analysis = analyze(image, cfg);
  out.result = classify(out.analysis.trans, out.analysis.lattice.type, cfg.classify);
  return out;
}

RasterImage amplitude_map_image(const SpectralMap& map) {
  RasterImage img(map.width, map.height);
  double hi = 0;
  for (std::size_t i = 0; i < map.data.size(); ++i) {
    img.pixels[i] = std::log1p(std::abs(map.data[i]));
    hi = std::max(hi, img.pixels[i]);
  }
  if (hi > 0)
    for (double& v : img.pixels)
      v *= 255.0 / hi;
  return img;
}

}  // namespace planesym
