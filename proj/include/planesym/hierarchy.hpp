#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "planesym/groups.hpp"
#include "planesym/lattice_fourier.hpp"

namespace planesym {

struct TreeEdge {
  std::string sub;
  std::string super;
  int k_sub = 0;
  int k_super = 0;
  double inset = 0.0;  // ascent bound at equal coefficient counts
};

struct HierarchyTree {
  std::vector<std::pair<std::string, int>> nodes;  // name, k
  std::vector<TreeEdge> edges;

  int order(std::string_view node) const;
  bool contains(std::string_view node) const;
  std::vector<std::string> maximal_subgroups(std::string_view node) const;
  std::vector<std::string> minimal_supergroups(std::string_view node) const;
  // Path from `from` up to `to` along edges (reflexive).
  bool reaches(std::string_view from, std::string_view to) const;
};

// Plane-group tree over the 21 settings. p1 is a node but carries no edges:
// an ascent from k = 1 is not defined.
const HierarchyTree& plane_tree();
const HierarchyTree& laue_tree();
// Laue tree extended with the non-crystallographic classes 8, 10, 12 (+ mm).
const HierarchyTree& quasicrystal_tree();

// Neither is a subgroup of the other (p1 is a subgroup of every setting).
bool disjoint(const GroupSetting& a, const GroupSetting& b);
// Projected Laue class of the amplitude map of a pattern in this group.
std::string compatible(const GroupSetting& g);

struct ResidualRow {
  std::string setting;
  int k = 1;
  double j_complex = 0.0;
  double j_amplitude = 0.0;
  double n = 0.0;  // coefficient count of the model
  Vec2 origin;
  double phase_residual = 0.0;
};

struct ResidualTable {
  std::vector<ResidualRow> rows;  // only the settings allowed by the metric
  std::optional<double> total_power;  // of the translation-averaged set
  std::optional<LatticeType> lattice;

  const ResidualRow* find(std::string_view setting) const;
};

struct ClassifyConfig {
  double pseudo_band = 10.0;
  // Lower bound of the pseudosymmetry reference residual, as a fraction of
  // the total power. Keeps the band meaningful on noise-free data.
  double pseudo_floor = 1e-3;
  // An anchor whose residual exceeds this fraction of the total power means
  // the pattern looks translation-only.
  double presence_fraction = 0.1;
  // Residuals are clamped to this fraction of the total power so that exact
  // data gives well-defined ratios. Rounding to 8 bits breaks 3- and 6-fold
  // axes (not pixel-grid symmetries) at about 1e-5 of the power.
  double exact_floor = 1e-4;
};

struct AscentRow {
  std::string level;  // "plane" or "laue"
  std::string sub, super;
  std::string sub_model, super_model;  // plane models providing the residuals
  double j_sub = 0, j_super = 0;
  double n_sub = 0, n_super = 0;
  int k_sub = 0, k_super = 0;
  double lhs = 0, rhs = 0;
  bool passed = false;
  bool considered = false;  // sub was genuine or within the pseudo band
};

struct LaueEntry {
  std::string cls;
  double j_amplitude = 0.0;
  double n = 0.0;
  std::string model;  // plane model with the smallest amplitude residual
};

enum class Label { genuine, pseudo, rejected };
std::string to_string(Label l);

struct ClassificationResult {
  std::string anchor_plane;
  std::vector<std::string> genuine_plane;  // subgroup chain of best_plane
  std::vector<std::string> pseudo_plane;
  std::vector<std::string> rejected_plane;
  std::string best_plane;
  std::vector<std::string> ascent_genuine_plane;  // before consistency arbitration

  std::string anchor_laue;
  std::string genuine_laue;
  std::vector<std::string> laue_chain;  // subclasses of genuine_laue, incl. 2
  std::vector<std::string> pseudo_laue;
  std::vector<std::string> rejected_laue;
  std::vector<LaueEntry> laue_table;

  bool consistent = true;
  std::string conflict;
  std::optional<double> noise_eps2;
  std::map<std::string, double> confidences;  // "sub->super", passed edges only
  std::map<std::string, double> gaic;         // per setting, with noise_eps2
  std::vector<AscentRow> ascents;
  ResidualTable table;
  std::vector<std::string> warnings;

  Label plane_label(std::string_view setting) const;
};

const ResidualRow& anchor_plane(const ResidualTable& table, const ClassifyConfig& cfg = {});
LaueEntry anchor_laue(const ResidualTable& table, const ClassifyConfig& cfg = {});
std::vector<LaueEntry> laue_residuals(const ResidualTable& table, const ClassifyConfig& cfg = {});

// Decision pass on a finished residual table.
ClassificationResult classify_table(const ResidualTable& table, const ClassifyConfig& cfg = {});

// Residual rows for every setting the lattice allows: origin refinement,
// symmetrisation and both residual sums per setting.
ResidualTable residual_table(const CoefficientSet& trans, LatticeType lattice);

// Rows from models symmetrised elsewhere, e.g. one .hka file per setting.
// Every model must be in the origin of `trans`; settings without a model are
// left out. The p1 row comes from `trans` itself.
ResidualTable residual_table(const CoefficientSet& trans,
                             const std::map<std::string, CoefficientSet>& models);

// Model of `trans` in `group` about `origin`, shifted back to the origin of
// `trans` so that it can be compared with it directly.
CoefficientSet model_in_input_origin(const CoefficientSet& trans, const GroupSetting& group,
                                     Vec2 origin);

ClassificationResult classify(const CoefficientSet& trans, LatticeType lattice,
                              const ClassifyConfig& cfg = {});

}  // namespace planesym
