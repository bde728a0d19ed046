#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "planesym/cip.hpp"
#include "planesym/report.hpp"
#include "reference_tables.hpp"

using namespace planesym;
using nlohmann::json;

namespace {

ClassificationResult reference_result(int i) {
  return classify_table(reference::table(reference::datasets()[i]));
}

std::vector<std::string> csv_lines(const std::string& s, const std::string& prefix) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0)
      out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("JSON report fields") {
  ClassificationResult r = reference_result(0);
  ReportContext ctx;
  ctx.input = "clean.png";
  ctx.dynamic_range = 100;
  ctx.lattice = StandardLattice{ReciprocalBasis::from_direct({{96, 0}, {0, 96}}, 1152, 1152),
                                LatticeType::square};
  json j = json::parse(report_json(r, ctx));
  CHECK(j["schema"] == "planesym.classification/1");
  CHECK(j["input"] == "clean.png");
  CHECK(j["anchor_plane"] == "p2");
  CHECK(j["genuine_plane"] == json::array({"p2", "p4"}));
  CHECK(j["best_plane"] == "p4");
  CHECK(j["genuine_laue"] == "4");
  CHECK(j["consistency"]["status"] == "consistent");
  CHECK(j["lattice"]["type"] == "square");
  CHECK(j["lattice"]["a_px"].get<double>() == doctest::Approx(96));
  CHECK(j["config"]["dynamic_range"] == 100.0);
  CHECK(j["config"]["pseudo_band"].is_null());
  CHECK(j["total_power"].is_null());

  REQUIRE(j["models"].size() == r.table.rows.size());
  CHECK(j["models"][0]["group"] == "p1");
  CHECK(j["models"][0]["label"] == "translation");
  for (const auto& m : j["models"]) {
    std::string g = m["group"];
    if (g == "p4gm")
      CHECK(m["label"] == "pseudo");
    if (g == "p4mm")
      CHECK(m["label"] == "rejected");
    if (g == "p4") {
      CHECK(m["label"] == "genuine");
      CHECK(m["j_complex"].get<double>() == doctest::Approx(0.0065));
      CHECK(m["n"] == 948.0);
      CHECK(m["laue"] == "4");
    }
  }

  bool saw = false;
  for (const auto& a : j["ascents"])
    if (a["level"] == "plane" && a["sub"] == "p2" && a["super"] == "p4") {
      saw = true;
      CHECK(a["verdict"] == "pass");
      CHECK(a["lhs"].get<double>() == doctest::Approx(1.547619).epsilon(1e-6));
      CHECK(a["rhs"].get<double>() == doctest::Approx(2.008368).epsilon(1e-6));
      CHECK(a["confidence"].is_number());
      CHECK(a["considered"] == true);
    }
  CHECK(saw);
  CHECK(j["laue_classes"].size() == r.laue_table.size());
  CHECK(j["warnings"].is_array());
}

TEST_CASE("conflict is reported") {
  ClassificationResult r = reference_result(2);
  json j = json::parse(report_json(r));
  CHECK(j["consistency"]["status"] == "conflict");
  CHECK(j["consistency"]["description"].get<std::string>().find("p4gm") != std::string::npos);
  CHECK(j["ascent_genuine_plane"].size() > j["genuine_plane"].size());

  std::string csv = report_csv(r);
  auto conflict = csv_lines(csv, "summary,conflict,");
  REQUIRE(conflict.size() == 1);
  CHECK(conflict[0] == "summary,conflict," + r.conflict);
  ClassificationResult q = r;
  q.conflict = "a, \"b\"";
  CHECK(report_csv(q).find("summary,conflict,\"a, \"\"b\"\"\"\n") != std::string::npos);
}

TEST_CASE("CSV report") {
  ClassificationResult r = reference_result(0);
  std::string csv = report_csv(r);
  CHECK(csv.rfind("record,key,value\n", 0) == 0);
  CHECK(csv.find("summary,best_plane,p4\n") != std::string::npos);
  CHECK(csv.find("summary,genuine_plane,p2 p4\n") != std::string::npos);
  auto models = csv_lines(csv, "model,");
  // header plus one line per row
  CHECK(models.size() == r.table.rows.size() + 1);
  CHECK(models[1].rfind("model,p1,1,2,translation,", 0) == 0);
  auto ascents = csv_lines(csv, "ascent,");
  CHECK(ascents.size() == r.ascents.size() + 1);
  for (const auto& a : ascents)
    CHECK(std::count(a.begin(), a.end(), ',') == 8);

  ClassificationResult w = r;
  w.warnings = {"a, b"};
  CHECK(report_csv(w).find("warning,\"a, b\"\n") != std::string::npos);
}

TEST_CASE("report files") {
  CHECK(format_for("x.json") == ReportFormat::json);
  CHECK(format_for("x.csv") == ReportFormat::csv);
  CHECK(format_for("x") == ReportFormat::csv);
  auto dir = std::filesystem::temp_directory_path() / "planesym_test_report";
  std::filesystem::create_directories(dir);
  ClassificationResult r = reference_result(1);
  write_report(r, ReportFormat::json, dir / "r.json");
  std::ifstream f(dir / "r.json");
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == report_json(r));
  CHECK_THROWS_AS(write_report(r, ReportFormat::csv, dir / "missing" / "r.csv"), Error);
}

TEST_CASE("quality JSON") {
  ReciprocalBasis b = ReciprocalBasis::from_direct({{10, 0}, {0, 10}}, 100, 100);
  json q = json::parse(quality_json(quality_metrics(8800.0, b, setting("p4"))));
  CHECK(q["n_cells"] == 88);
  CHECK(q["k_multiplicity"] == 4);
  CHECK(q["cip_boost"].get<double>() == doctest::Approx(2));
}
