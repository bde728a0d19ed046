// planesym: classify, process and generate periodic images from the shell.
//
// Exit codes: 0 success, 1 error, 2 classification finished but the plane
// and Laue results disagree (reports are still written).

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "planesym/cip.hpp"
#include "planesym/image_io.hpp"
#include "planesym/pipeline.hpp"
#include "planesym/report.hpp"
#include "planesym/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace planesym;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConflict = 2;

// Options shared by classify and process. Values from --config win over flags.
struct RunOptions {
  std::string config;
  std::string input;
  std::vector<double> region;  // cx, cy, r
  double dynamic_range = 200.0;
  double resolution = 0.0;
  double snr = 5.0;
  double pseudo_band = 10.0;
  double hex_length = 0.02, hex_angle = 2.0, square_length = 0.01, square_angle = 1.0;
  std::string output_dir;
};

json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw Error("cannot open config " + path);
  try {
    return json::parse(f, nullptr, true, true);
  } catch (const json::exception& e) {
    throw Error("config " + path + ": " + e.what());
  }
}

template <class T>
void take(const json& j, const char* key, T& out) {
  if (!j.contains(key))
    return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(std::string("config key '") + key + "': " + e.what());
  }
}

void check_keys(const json& j, const std::vector<std::string>& known, const std::string& what) {
  if (!j.is_object())
    throw Error(what + " must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw Error(what + ": unknown key '" + k + "'");
}

void apply_run_config(const json& j, RunOptions& o) {
  take(j, "input", o.input);
  if (j.contains("region")) {
    const json& r = j["region"];
    check_keys(r, {"cx", "cy", "radius"}, "config region");
    o.region = {r.at("cx").get<double>(), r.at("cy").get<double>(), r.at("radius").get<double>()};
  }
  take(j, "dynamic_range", o.dynamic_range);
  take(j, "resolution_radius", o.resolution);
  take(j, "min_peak_snr", o.snr);
  take(j, "pseudo_band", o.pseudo_band);
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    check_keys(t, {"hex_length", "hex_angle", "square_length", "square_angle"}, "config tolerances");
    take(t, "hex_length", o.hex_length);
    take(t, "hex_angle", o.hex_angle);
    take(t, "square_length", o.square_length);
    take(t, "square_angle", o.square_angle);
  }
  take(j, "output_dir", o.output_dir);
}

fs::path output_dir(const std::string& flag) {
  if (!flag.empty())
    return flag;
  if (const char* env = std::getenv("PLANESYM_OUTPUT_DIR"); env && *env)
    return env;
  return ".";
}

// Relative output paths land in the output directory.
fs::path resolve(const fs::path& dir, const std::string& path) {
  fs::path p(path);
  fs::path out = p.is_absolute() ? p : dir / p;
  if (out.has_parent_path())
    fs::create_directories(out.parent_path());
  return out;
}

AnalysisConfig analysis_config(const RunOptions& o) {
  AnalysisConfig cfg;
  if (!o.region.empty()) {
    if (o.region.size() != 3)
      throw Error("region needs cx,cy,radius");
    cfg.region = RegionSelection{o.region[0], o.region[1], o.region[2]};
  }
  cfg.dynamic_range = o.dynamic_range;
  cfg.resolution_radius = o.resolution;
  cfg.min_peak_snr = o.snr;
  cfg.tolerances = {o.hex_length, o.hex_angle, o.square_length, o.square_angle};
  if (!(o.pseudo_band >= 1))
    throw Error("pseudo band must be at least 1");
  cfg.classify.pseudo_band = o.pseudo_band;
  return cfg;
}

void add_run_options(CLI::App* app, RunOptions& o) {
  app->add_option("--config", o.config, "JSON config file; its values override the flags")
      ->check(CLI::ExistingFile);
  app->add_option("--region", o.region, "Circular region cx,cy,radius in pixels (default: whole image)")
      ->delimiter(',')
      ->expected(3);
  app->add_option("--dynamic-range", o.dynamic_range, "Keep coefficients above max/DR")
      ->capture_default_str();
  app->add_option("--resolution", o.resolution, "Resolution radius in reciprocal pixels (0: Nyquist)")
      ->capture_default_str();
  app->add_option("--min-peak-snr", o.snr, "Lattice peak threshold over the median amplitude")
      ->capture_default_str();
  app->add_option("--pseudo-band", o.pseudo_band, "Pseudosymmetry band above the anchor residual")
      ->capture_default_str();
  app->add_option("--hex-length", o.hex_length, "Relative length tolerance for hexagonal metric")
      ->capture_default_str();
  app->add_option("--hex-angle", o.hex_angle, "Angle tolerance (deg) for hexagonal metric")
      ->capture_default_str();
  app->add_option("--square-length", o.square_length, "Relative length tolerance for square metric")
      ->capture_default_str();
  app->add_option("--square-angle", o.square_angle, "Angle tolerance (deg) for square and rectangular metric")
      ->capture_default_str();
  app->add_option("--output-dir", o.output_dir,
                  "Directory for relative output paths (default: $PLANESYM_OUTPUT_DIR or .)");
}

void print_warnings(const std::vector<std::string>& w) {
  for (const auto& s : w)
    std::cerr << "warning: " << s << '\n';
}

void print_summary(const ClassificationResult& r) {
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v)
      s += (s.empty() ? "" : " ") + x;
    return s.empty() ? "-" : s;
  };
  std::cout << "anchor:  " << r.anchor_plane << " / " << r.anchor_laue << '\n'
            << "best:    " << r.best_plane << " (Laue " << r.genuine_laue << ")\n"
            << "genuine: " << join(r.genuine_plane) << '\n'
            << "pseudo:  " << join(r.pseudo_plane) << '\n'
            << "laue:    " << join(r.laue_chain) << " | pseudo " << join(r.pseudo_laue) << '\n'
            << "status:  " << (r.consistent ? "consistent" : "conflict: " + r.conflict) << '\n';
}

// ---- classify

struct ClassifyOptions {
  RunOptions run;
  std::vector<std::string> hka;
  std::string report, csv, amplitude_map, export_hka;
};

// Setting named by a filename token, e.g. model_p2mg.hka -> p2mg.
std::string setting_from_filename(const fs::path& p) {
  std::string stem = p.stem().string(), tok;
  std::vector<std::string> toks;
  for (char c : stem) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      tok += char(std::tolower(static_cast<unsigned char>(c)));
    } else if (!tok.empty()) {
      toks.push_back(tok);
      tok.clear();
    }
  }
  if (!tok.empty())
    toks.push_back(tok);
  std::string found;
  for (const auto& t : toks)
    if (has_setting(t)) {
      if (!found.empty() && found != t)
        throw Error("file name " + p.string() + " names more than one setting");
      found = t;
    }
  if (found.empty())
    throw Error("file name " + p.string() + " does not name a plane group setting (e.g. model_p4gm.hka)");
  return found;
}

int run_classify(ClassifyOptions& o) {
  if (!o.run.config.empty()) {
    json j = load_json(o.run.config);
    check_keys(j, {"input", "region", "dynamic_range", "resolution_radius", "min_peak_snr", "pseudo_band",
                   "tolerances", "output_dir", "hka", "report", "csv", "amplitude_map", "export_hka"},
               "classify config");
    apply_run_config(j, o.run);
    take(j, "hka", o.hka);
    take(j, "report", o.report);
    take(j, "csv", o.csv);
    take(j, "amplitude_map", o.amplitude_map);
    take(j, "export_hka", o.export_hka);
  }
  if (o.run.input.empty() == o.hka.empty())
    throw Error("give either --in IMAGE or one --hka FILE per setting");
  AnalysisConfig cfg = analysis_config(o.run);
  fs::path dir = output_dir(o.run.output_dir);

  ClassificationResult result;
  ReportContext ctx;
  ctx.dynamic_range = cfg.dynamic_range;
  ctx.pseudo_band = cfg.classify.pseudo_band;

  if (!o.hka.empty()) {
    // Models symmetrised elsewhere: residuals only, no image step.
    std::optional<CoefficientSet> trans;
    std::map<std::string, CoefficientSet> models;
    for (const auto& f : o.hka) {
      std::string name = setting_from_filename(f);
      CoefficientSet s = CoefficientSet::from_hka(read_hka(f), cfg.dynamic_range);
      if (name == "p1") {
        trans = std::move(s);
      } else if (!models.emplace(name, std::move(s)).second) {
        throw Error("two files for setting " + name);
      }
    }
    if (!trans)
      throw Error("hka mode needs the translation-averaged data as a p1 file (e.g. model_p1.hka)");
    if (models.empty())
      throw Error("hka mode needs at least one symmetrised model");
    ctx.input = o.hka.front();
    result = classify_table(residual_table(*trans, models), cfg.classify);
  } else {
    RasterImage img = load_image(o.run.input);
    ImageClassification c = classify_image(img, cfg);
    result = std::move(c.result);
    ctx.input = o.run.input;
    ctx.lattice = c.analysis.lattice;
    ctx.resolution_radius = c.analysis.trans.resolution_radius;
    if (!o.amplitude_map.empty())
      save_image(amplitude_map_image(c.analysis.map), resolve(dir, o.amplitude_map));
    if (!o.export_hka.empty()) {
      fs::path hd = resolve(dir, o.export_hka);
      fs::create_directories(hd);
      write_hka(hd / "model_p1.hka", c.analysis.trans.to_hka());
      for (const auto& row : result.table.rows) {
        if (row.k == 1)
          continue;
        CoefficientSet m = model_in_input_origin(c.analysis.trans, setting(row.setting), row.origin);
        write_hka(hd / ("model_" + row.setting + ".hka"), m.to_hka());
      }
    }
  }

  if (!o.report.empty())
    write_report(result, format_for(o.report), resolve(dir, o.report), ctx);
  if (!o.csv.empty())
    write_report(result, ReportFormat::csv, resolve(dir, o.csv), ctx);
  print_summary(result);
  print_warnings(result.warnings);
  return result.consistent ? kExitOk : kExitConflict;
}

// ---- process

struct ProcessOptions {
  RunOptions run;
  std::string group = "auto";
  std::string output = "processed.png";
  std::string histograms, quality, report;
};

void write_histograms(const fs::path& path, const Histogram& before, const Histogram& after) {
  std::ofstream f(path);
  if (!f)
    throw Error("cannot write " + path.string());
  f << "level,before,after\n";
  for (int i = 0; i < 256; ++i)
    f << i << ',' << before.bins[i] << ',' << after.bins[i] << '\n';
}

nlohmann::ordered_json histogram_json(const Histogram& h) {
  return {{"count", h.count}, {"mean", h.mean}, {"rms", h.rms}, {"mad", h.mad},
          {"min", h.min},     {"max", h.max},   {"fwid", h.fwid}};
}

int run_process(ProcessOptions& o) {
  if (!o.run.config.empty()) {
    json j = load_json(o.run.config);
    check_keys(j, {"input", "region", "dynamic_range", "resolution_radius", "min_peak_snr", "pseudo_band",
                   "tolerances", "output_dir", "group", "output", "histograms", "quality", "report"},
               "process config");
    apply_run_config(j, o.run);
    take(j, "group", o.group);
    take(j, "output", o.output);
    take(j, "histograms", o.histograms);
    take(j, "quality", o.quality);
    take(j, "report", o.report);
  }
  if (o.run.input.empty())
    throw Error("--in is required");
  if (o.group != "auto" && !has_setting(o.group))
    throw Error("unknown plane group setting '" + o.group + "'");
  AnalysisConfig cfg = analysis_config(o.run);
  fs::path dir = output_dir(o.run.output_dir);

  RasterImage img = load_image(o.run.input);
  ProcessResult r = o.group == "auto" ? process_auto(img, cfg) : process(img, setting(o.group), cfg);
  fs::path out = resolve(dir, o.output);
  save_image(r.output, out);
  if (!o.histograms.empty())
    write_histograms(resolve(dir, o.histograms), r.before, r.after);
  if (!o.quality.empty()) {
    std::ofstream f(resolve(dir, o.quality));
    if (!f)
      throw Error("cannot write quality report");
    auto j = nlohmann::ordered_json::parse(quality_json(r.quality));
    j["group"] = r.group;
    j["origin"] = {r.origin.shift.x, r.origin.shift.y};
    j["before"] = histogram_json(r.before);
    j["after"] = histogram_json(r.after);
    f << j.dump(2) << '\n';
  }
  if (!o.report.empty()) {
    ReportContext ctx{o.run.input, r.lattice, cfg.dynamic_range, r.quality.resolution_radius,
                      cfg.classify.pseudo_band};
    write_report(r.classification, format_for(o.report), resolve(dir, o.report), ctx);
  }
  std::cout << "processed in " << r.group << " -> " << out.string() << '\n'
            << "cells " << r.quality.n_cells << ", fourier filter boost " << r.quality.fourier_filter_boost
            << ", cip boost " << r.quality.cip_boost << '\n';
  print_warnings(r.classification.warnings);
  print_warnings(r.warnings);
  return kExitOk;
}

// ---- generate

struct GenerateOptions {
  std::string config;
  std::string preset;
  std::uint64_t seed = kTrioSeed;
  std::string group = "p4";
  std::string lattice;
  std::string pseudo_group;
  double delta = 0.0;
  int cell_px = 96;
  double aspect = 0.0;
  std::vector<int> cells{12, 12};
  std::string motif = "random";
  std::uint64_t motif_seed = 3;
  double sigma = 0.0;
  int spread = 0;
  std::string output = "pattern.png";
  std::string output_dir;
};

LatticeType parse_lattice(const std::string& s) {
  for (auto t : {LatticeType::oblique, LatticeType::rectangular, LatticeType::centered, LatticeType::square,
                 LatticeType::hexagonal})
    if (to_string(t) == s)
      return t;
  throw Error("unknown lattice '" + s + "'");
}

std::vector<Blob> parse_blobs(const json& arr) {
  if (!arr.is_array() || arr.empty())
    throw Error("config blobs must be a non-empty array");
  std::vector<Blob> out;
  for (const auto& b : arr) {
    check_keys(b, {"pos", "weight", "sigma", "delta_dir"}, "config blob");
    Blob x;
    auto pos = b.at("pos").get<std::vector<double>>();
    if (pos.size() != 2)
      throw Error("blob pos needs two fractional coordinates");
    x.pos = {pos[0], pos[1]};
    x.weight = b.value("weight", 1.0);
    x.sigma = b.value("sigma", 0.05);
    if (!(x.sigma > 0))
      throw Error("blob sigma must be positive");
    if (b.contains("delta_dir")) {
      auto d = b["delta_dir"].get<std::vector<double>>();
      if (d.size() != 2)
        throw Error("blob delta_dir needs two components");
      x.delta_dir = {d[0], d[1]};
    }
    out.push_back(x);
  }
  return out;
}

int run_generate(GenerateOptions& o, const std::vector<std::string>& set_flags) {
  std::vector<Blob> blobs;
  if (!o.config.empty()) {
    json j = load_json(o.config);
    check_keys(j, {"preset", "seed", "group", "lattice", "pseudo_group", "pseudo_delta", "cell_px", "aspect",
                   "cells", "motif", "motif_seed", "blobs", "noise", "output", "output_dir"},
               "generate config");
    take(j, "preset", o.preset);
    take(j, "seed", o.seed);
    take(j, "group", o.group);
    take(j, "lattice", o.lattice);
    take(j, "pseudo_group", o.pseudo_group);
    take(j, "pseudo_delta", o.delta);
    take(j, "cell_px", o.cell_px);
    take(j, "aspect", o.aspect);
    if (j.contains("cells") && j["cells"].is_number_integer())
      o.cells = {j["cells"].get<int>()};
    else
      take(j, "cells", o.cells);
    take(j, "motif", o.motif);
    take(j, "motif_seed", o.motif_seed);
    take(j, "output", o.output);
    take(j, "output_dir", o.output_dir);
    if (j.contains("blobs"))
      blobs = parse_blobs(j["blobs"]);
    if (j.contains("noise")) {
      const json& n = j["noise"];
      check_keys(n, {"gaussian_sigma", "spread_radius", "seed"}, "config noise");
      take(n, "gaussian_sigma", o.sigma);
      take(n, "spread_radius", o.spread);
      take(n, "seed", o.seed);
    }
  }
  fs::path dir = output_dir(o.output_dir);

  if (!o.preset.empty()) {
    if (o.preset != "paper-trio")
      throw Error("unknown preset '" + o.preset + "' (available: paper-trio)");
    for (const char* f : {"--group", "--lattice", "--pseudo-group", "--delta", "--cell-px", "--cells", "--motif",
                          "--noise-sigma", "--spread"})
      if (std::find(set_flags.begin(), set_flags.end(), f) != set_flags.end())
        throw Error(std::string(f) + " cannot be combined with --preset");
    PatternTrio t = pattern_trio(o.seed);
    fs::create_directories(dir);
    std::string stem = "trio_seed" + std::to_string(o.seed);
    std::vector<std::pair<std::string, const RasterImage*>> files{
        {stem + "_clean.png", &t.clean}, {stem + "_moderate.png", &t.noisy}, {stem + "_heavy.png", &t.heavy_noisy}};
    for (const auto& [name, img] : files) {
      save_png(*img, resolve(dir, name));
      std::cout << resolve(dir, name).string() << '\n';
    }
    return kExitOk;
  }

  MotifSpec spec;
  spec.group = o.group;
  if (!has_setting(spec.group))
    throw Error("unknown plane group setting '" + spec.group + "'");
  spec.lattice = o.lattice.empty() ? setting(spec.group).lattice : parse_lattice(o.lattice);
  spec.pseudo_group = o.pseudo_group;
  spec.pseudo_delta = o.delta;
  spec.cell_px = o.cell_px;
  spec.aspect = o.aspect;
  if (o.cells.size() == 1)
    o.cells.push_back(o.cells[0]);
  if (o.cells.size() != 2)
    throw Error("cells needs one or two counts");
  spec.cells_x = o.cells[0];
  spec.cells_y = o.cells[1];
  spec.motif_seed = o.motif_seed;
  if (!blobs.empty())
    spec.blobs = blobs;
  else if (o.motif == "knoll")
    spec.blobs = knoll_motif();
  else if (o.motif != "random")
    throw Error("unknown motif '" + o.motif + "' (random or knoll)");

  RasterImage img = generate_pattern(spec);
  img = apply_noise(img, NoiseSpec{o.sigma, o.spread, o.seed});
  fs::path out = resolve(dir, o.output);
  save_image(img, out);
  std::cout << out.string() << " (" << img.width << "x" << img.height << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plane symmetry classification and crystallographic image processing of periodic images"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "planesym 1.0");

  ClassifyOptions co;
  CLI::App* classify = app.add_subcommand("classify", "Classify the plane symmetry and Laue class of an image");
  classify->add_option("--in", co.run.input, "Input image (PNG or PGM)");
  classify->add_option("--hka", co.hka, "Coefficient file per setting, named after it (model_p1.hka required)");
  classify->add_option("--report", co.report, "Report file; .json gives JSON, anything else CSV");
  classify->add_option("--csv", co.csv, "Additional CSV report");
  classify->add_option("--amplitude-map", co.amplitude_map, "Write the log amplitude map as an image");
  classify->add_option("--export-hka", co.export_hka, "Write model_<setting>.hka files into this directory");
  add_run_options(classify, co.run);

  ProcessOptions po;
  CLI::App* proc = app.add_subcommand("process", "Symmetrise an image to a plane group and back-transform");
  proc->add_option("--in", po.run.input, "Input image (PNG or PGM)");
  proc->add_option("--group", po.group, "Plane group setting, or auto for the classified best group")
      ->capture_default_str();
  proc->add_option("--out", po.output, "Processed image (.png or .pgm)")->capture_default_str();
  proc->add_option("--histograms", po.histograms, "CSV of before/after intensity histograms");
  proc->add_option("--quality", po.quality, "JSON quality report");
  proc->add_option("--report", po.report, "Classification report; .json gives JSON, anything else CSV");
  add_run_options(proc, po.run);

  GenerateOptions go;
  CLI::App* gen = app.add_subcommand("generate", "Synthesise a periodic test pattern");
  gen->add_option("--config", go.config, "JSON pattern spec; its values override the flags")
      ->check(CLI::ExistingFile);
  gen->add_option("--preset", go.preset, "paper-trio: clean, moderate and heavy noise p4 / pseudo-p4gm set");
  gen->add_option("--seed", go.seed, "Noise seed")->capture_default_str();
  gen->add_option("--group", go.group, "Plane group setting of the pattern")->capture_default_str();
  gen->add_option("--lattice", go.lattice, "oblique, rectangular, centered, square or hexagonal (default: the group's)");
  gen->add_option("--pseudo-group", go.pseudo_group, "Supergroup that the motif breaks");
  gen->add_option("--delta", go.delta, "Breaking of the pseudo group, 0..1")->capture_default_str();
  gen->add_option("--cell-px", go.cell_px, "Cell edge in pixels")->capture_default_str();
  gen->add_option("--aspect", go.aspect, "b/a for rectangular, centred and oblique cells (0: built-in)");
  gen->add_option("--cells", go.cells, "Cells along x and y (one value: both)")->delimiter(',')->expected(1, 2);
  gen->add_option("--motif", go.motif, "random or knoll")->capture_default_str();
  gen->add_option("--motif-seed", go.motif_seed, "Seed of the random motif")->capture_default_str();
  gen->add_option("--noise-sigma", go.sigma, "Gaussian noise sigma in gray levels")->capture_default_str();
  gen->add_option("--spread", go.spread, "Spread noise radius in pixels")->capture_default_str();
  gen->add_option("--out", go.output, "Output image (.png or .pgm)")->capture_default_str();
  gen->add_option("--output-dir", go.output_dir,
                  "Directory for relative output paths (default: $PLANESYM_OUTPUT_DIR or .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitError;
  }

  try {
    if (classify->parsed())
      return run_classify(co);
    if (proc->parsed())
      return run_process(po);
    std::vector<std::string> set_flags;
    for (const CLI::Option* opt : gen->get_options())
      if (opt->count() > 0)
        set_flags.push_back(opt->get_name());
    return run_generate(go, set_flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}
