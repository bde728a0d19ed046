#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "planesym/hierarchy.hpp"
#include "planesym/lattice_fourier.hpp"

namespace planesym {

struct QualityReport;

enum class ReportFormat { json, csv };

// Context written next to the classification; all of it optional.
struct ReportContext {
  std::string input;
  std::optional<StandardLattice> lattice;
  std::optional<double> dynamic_range;
  std::optional<double> resolution_radius;
  std::optional<double> pseudo_band;
};

// Field names are documented in docs/report_schema.md.
std::string report_json(const ClassificationResult& result, const ReportContext& ctx = {});
std::string report_csv(const ClassificationResult& result, const ReportContext& ctx = {});
void write_report(const ClassificationResult& result, ReportFormat format,
                  const std::filesystem::path& path, const ReportContext& ctx = {});
// json for .json, csv otherwise
ReportFormat format_for(const std::filesystem::path& path);

std::string quality_json(const QualityReport& q);

}  // namespace planesym
