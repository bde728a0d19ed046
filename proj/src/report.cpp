#include "planesym/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "planesym/cip.hpp"

namespace planesym {

using nlohmann::ordered_json;

namespace {

ordered_json opt(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string laue_label(const ClassificationResult& r, const std::string& cls) {
  auto in = [&](const std::vector<std::string>& v) { return std::find(v.begin(), v.end(), cls) != v.end(); };
  if (in(r.laue_chain))
    return "genuine";
  if (in(r.pseudo_laue))
    return "pseudo";
  return "rejected";
}

// p1 is the translation-averaged data itself unless nothing better exists.
std::string model_label(const ClassificationResult& r, const std::string& setting) {
  if (setting == "p1" && r.best_plane != "p1")
    return "translation";
  return to_string(r.plane_label(setting));
}

}  // namespace

std::string report_json(const ClassificationResult& r, const ReportContext& ctx) {
  ordered_json j;
  j["schema"] = "planesym.classification/1";
  if (!ctx.input.empty())
    j["input"] = ctx.input;
  if (ctx.lattice) {
    LatticeParameters p = ctx.lattice->basis.parameters();
    const ReciprocalBasis& b = ctx.lattice->basis;
    j["lattice"] = {{"type", to_string(ctx.lattice->type)},
                    {"a_px", p.a},
                    {"b_px", p.b},
                    {"gamma_deg", p.gamma},
                    {"a_star", {b.a_star.x, b.a_star.y}},
                    {"b_star", {b.b_star.x, b.b_star.y}},
                    {"grid", {b.grid_width, b.grid_height}},
                    {"fit_rms", b.fit_rms},
                    {"indexed_peaks", b.indexed_peaks}};
  }
  j["config"] = {{"dynamic_range", opt(ctx.dynamic_range)},
                 {"resolution_radius", opt(ctx.resolution_radius)},
                 {"pseudo_band", opt(ctx.pseudo_band)}};
  j["anchor_plane"] = r.anchor_plane;
  j["best_plane"] = r.best_plane;
  j["genuine_plane"] = r.genuine_plane;
  j["pseudo_plane"] = r.pseudo_plane;
  j["rejected_plane"] = r.rejected_plane;
  j["ascent_genuine_plane"] = r.ascent_genuine_plane;
  j["anchor_laue"] = r.anchor_laue;
  j["genuine_laue"] = r.genuine_laue;
  j["laue_chain"] = r.laue_chain;
  j["pseudo_laue"] = r.pseudo_laue;
  j["rejected_laue"] = r.rejected_laue;
  j["consistency"] = {{"status", r.consistent ? "consistent" : "conflict"},
                      {"description", r.conflict}};
  j["noise_eps2"] = opt(r.noise_eps2);
  j["total_power"] = opt(r.table.total_power);

  ordered_json models = ordered_json::array();
  for (const auto& row : r.table.rows) {
    auto g = r.gaic.find(row.setting);
    models.push_back({{"group", row.setting},
                      {"k", row.k},
                      {"laue", setting(row.setting).laue},
                      {"label", model_label(r, row.setting)},
                      {"j_complex", num(row.j_complex)},
                      {"j_amplitude", num(row.j_amplitude)},
                      {"n", row.n},
                      {"gaic", g == r.gaic.end() ? ordered_json(nullptr) : num(g->second)},
                      {"origin", {row.origin.x, row.origin.y}},
                      {"phase_residual_deg", row.phase_residual * 180.0 / kPi}});
  }
  j["models"] = models;

  ordered_json laue = ordered_json::array();
  for (const auto& e : r.laue_table)
    laue.push_back({{"class", e.cls},
                    {"j_amplitude", num(e.j_amplitude)},
                    {"n", e.n},
                    {"model", e.model},
                    {"label", laue_label(r, e.cls)}});
  j["laue_classes"] = laue;

  ordered_json asc = ordered_json::array();
  for (const auto& a : r.ascents) {
    auto c = r.confidences.find(a.sub + "->" + a.super);
    asc.push_back({{"level", a.level},
                   {"sub", a.sub},
                   {"super", a.super},
                   {"sub_model", a.sub_model},
                   {"super_model", a.super_model},
                   {"k_sub", a.k_sub},
                   {"k_super", a.k_super},
                   {"n_sub", a.n_sub},
                   {"n_super", a.n_super},
                   {"j_sub", num(a.j_sub)},
                   {"j_super", num(a.j_super)},
                   {"lhs", num(a.lhs)},
                   {"rhs", num(a.rhs)},
                   {"verdict", a.passed ? "pass" : "fail"},
                   {"considered", a.considered},
                   {"confidence", c == r.confidences.end() ? ordered_json(nullptr) : num(c->second)}});
  }
  j["ascents"] = asc;
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

namespace {

std::string fmt(double v) {
  if (!std::isfinite(v))
    return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v)
    s += (s.empty() ? "" : " ") + x;
  return s;
}

// RFC 4180 quoting for free text.
std::string quote(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos)
    return v;
  std::string q = "\"";
  for (char c : v)
    q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

std::string report_csv(const ClassificationResult& r, const ReportContext& ctx) {
  std::ostringstream o;
  o << "record,key,value\n";
  auto kv = [&](const char* k, const std::string& v) { o << "summary," << k << ',' << v << '\n'; };
  if (!ctx.input.empty())
    kv("input", quote(ctx.input));
  if (ctx.lattice)
    kv("lattice", to_string(ctx.lattice->type));
  kv("anchor_plane", r.anchor_plane);
  kv("best_plane", r.best_plane);
  kv("genuine_plane", join(r.genuine_plane));
  kv("pseudo_plane", join(r.pseudo_plane));
  kv("rejected_plane", join(r.rejected_plane));
  kv("anchor_laue", r.anchor_laue);
  kv("genuine_laue", r.genuine_laue);
  kv("pseudo_laue", join(r.pseudo_laue));
  kv("consistency", r.consistent ? "consistent" : "conflict");
  kv("conflict", quote(r.conflict));
  kv("noise_eps2", r.noise_eps2 ? fmt(*r.noise_eps2) : "");
  o << "\nmodel,group,k,laue,label,j_complex,j_amplitude,n,gaic\n";
  for (const auto& row : r.table.rows) {
    auto g = r.gaic.find(row.setting);
    o << "model," << row.setting << ',' << row.k << ',' << setting(row.setting).laue << ','
      << model_label(r, row.setting) << ',' << fmt(row.j_complex) << ','
      << fmt(row.j_amplitude) << ',' << fmt(row.n) << ','
      << (g == r.gaic.end() ? "" : fmt(g->second)) << '\n';
  }
  o << "\nascent,level,sub,super,lhs,rhs,verdict,considered,confidence\n";
  for (const auto& a : r.ascents) {
    auto c = r.confidences.find(a.sub + "->" + a.super);
    o << "ascent," << a.level << ',' << a.sub << ',' << a.super << ',' << fmt(a.lhs) << ','
      << fmt(a.rhs) << ',' << (a.passed ? "pass" : "fail") << ',' << (a.considered ? 1 : 0) << ','
      << (c == r.confidences.end() ? "" : fmt(c->second)) << '\n';
  }
  if (!r.warnings.empty()) {
    o << "\nwarning,message\n";
    for (const auto& w : r.warnings)
      o << "warning," << quote(w) << '\n';
  }
  return o.str();
}

ReportFormat format_for(const std::filesystem::path& path) {
  return path.extension() == ".json" ? ReportFormat::json : ReportFormat::csv;
}

void write_report(const ClassificationResult& result, ReportFormat format,
                  const std::filesystem::path& path, const ReportContext& ctx) {
  std::ofstream f(path);
  if (!f)
    throw Error("cannot write report " + path.string());
  f << (format == ReportFormat::json ? report_json(result, ctx) : report_csv(result, ctx));
}

std::string quality_json(const QualityReport& q) {
  ordered_json j{{"n_cells", q.n_cells},
                 {"k_multiplicity", q.k_multiplicity},
                 {"fourier_filter_boost", q.fourier_filter_boost},
                 {"cip_boost", q.cip_boost},
                 {"resolution_radius", q.resolution_radius}};
  return j.dump(2) + "\n";
}

}  // namespace planesym
