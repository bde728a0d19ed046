#include "planesym/cip.hpp"

#include <algorithm>
#include <cmath>

namespace planesym {

QualityReport quality_metrics(double region_area, const ReciprocalBasis& basis,
                              const GroupSetting& group, double resolution_radius) {
  double cell = basis.cell_area();
  if (!(cell > 0))
    throw Error("unit cell area must be positive");
  QualityReport q;
  q.n_cells = std::max(1, int(std::lround(region_area / cell)));
  q.k_multiplicity = group.k;
  q.fourier_filter_boost = std::sqrt(double(q.n_cells));
  q.cip_boost = std::sqrt(double(group.k));
  q.resolution_radius = resolution_radius;
  return q;
}

QualityReport quality_metrics(const RegionSelection& region, const ReciprocalBasis& basis,
                              const GroupSetting& group, double resolution_radius) {
  return quality_metrics(kPi * region.radius * region.radius, basis, group, resolution_radius);
}

namespace {

ProcessResult run(const RasterImage& image, const GroupSetting& group, const AnalysisConfig& cfg,
                  ImageClassification cls) {
  const Analysis& a = cls.analysis;
  if (!applicable(group, a.lattice.type))
    throw Error("group " + group.name + " is not allowed by the " + to_string(a.lattice.type) +
                " lattice of this image");
  ProcessResult r;
  r.group = group.name;
  r.lattice = a.lattice;
  r.classification = std::move(cls.result);
  if (compatible(group) != r.classification.genuine_laue)
    r.warnings.push_back("group " + group.name + " (Laue class " + compatible(group) +
                         ") is not crystallographically consistent with the amplitude map's Laue class " +
                         r.classification.genuine_laue + "; processing anyway");

  r.origin = refine_origin(a.trans, group);
  CoefficientSet shifted = shift_origin(a.trans, r.origin.shift);
  r.symmetrized = symmetrize_plane_group(shifted, group);
  CoefficientSet back = shift_origin(r.symmetrized, r.origin.shift * -1.0);
  double p_sym = back.total_power(), p_trans = a.trans.total_power();
  if (p_sym > 0) {
    double g = std::sqrt(p_trans / p_sym);
    for (auto& [m, c] : back.values)
      c *= g;
  }
  r.output = back_transform(back, image.width, image.height, a.map.mean_level, a.map.box_origin * -1.0);

  r.before = compute_histogram(image, cfg.region);
  r.after = compute_histogram(r.output, cfg.region);
  double area = cfg.region ? double(cfg.region->pixel_count(image.width, image.height))
                           : double(image.width) * image.height;
  r.quality = quality_metrics(area, a.lattice.basis, group, a.trans.resolution_radius);
  return r;
}

}  // namespace

ProcessResult process(const RasterImage& image, const GroupSetting& group, const AnalysisConfig& cfg) {
  return run(image, group, cfg, classify_image(image, cfg));
}

ProcessResult process_auto(const RasterImage& image, const AnalysisConfig& cfg) {
  ImageClassification cls = classify_image(image, cfg);
  const GroupSetting& g = setting(cls.result.best_plane);
  return run(image, g, cfg, std::move(cls));
}

double correlation(const RasterImage& a, const RasterImage& b) {
  if (a.width != b.width || a.height != b.height)
    throw Error("correlation needs equally sized images");
  double n = double(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a.pixels[i];
    mb += b.pixels[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double x = a.pixels[i] - ma, y = b.pixels[i] - mb;
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  if (saa <= 0 || sbb <= 0)
    return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace planesym
