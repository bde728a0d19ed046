#include "planesym/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "planesym/gaic.hpp"
#include "planesym/symmetrize.hpp"

namespace planesym {

int HierarchyTree::order(std::string_view node) const {
  for (const auto& [n, k] : nodes)
    if (n == node)
      return k;
  throw Error("node '" + std::string(node) + "' is not in the tree");
}

bool HierarchyTree::contains(std::string_view node) const {
  return std::any_of(nodes.begin(), nodes.end(), [&](const auto& n) { return n.first == node; });
}

std::vector<std::string> HierarchyTree::maximal_subgroups(std::string_view node) const {
  std::vector<std::string> out;
  for (const auto& e : edges)
    if (e.super == node)
      out.push_back(e.sub);
  return out;
}

std::vector<std::string> HierarchyTree::minimal_supergroups(std::string_view node) const {
  std::vector<std::string> out;
  for (const auto& e : edges)
    if (e.sub == node)
      out.push_back(e.super);
  return out;
}

bool HierarchyTree::reaches(std::string_view from, std::string_view to) const {
  if (from == to)
    return true;
  for (const auto& e : edges)
    if (e.sub == from && reaches(e.super, to))
      return true;
  return false;
}

namespace {

double inset(int k_m, int k_l) { return 1.0 + 2.0 * (k_m - k_l) / (double(k_m) * (k_l - 1)); }

HierarchyTree make_tree(std::vector<std::pair<std::string, int>> nodes,
                        const std::vector<std::pair<const char*, const char*>>& edges) {
  HierarchyTree t;
  t.nodes = std::move(nodes);
  for (auto [sub, super] : edges) {
    int kl = t.order(sub), km = t.order(super);
    t.edges.push_back({sub, super, kl, km, inset(km, kl)});
  }
  return t;
}

HierarchyTree build_plane_tree() {
  std::vector<std::pair<std::string, int>> nodes;
  for (const auto& g : all_settings())
    nodes.push_back({g.name, g.k});
  return make_tree(nodes, {
      {"p2", "p2mm"}, {"p1m1", "p2mm"}, {"p11m", "p2mm"},
      {"p2", "p2mg"}, {"p1m1", "p2mg"}, {"p11g", "p2mg"},
      {"p2", "p2gm"}, {"p1g1", "p2gm"}, {"p11m", "p2gm"},
      {"p2", "p2gg"}, {"p1g1", "p2gg"}, {"p11g", "p2gg"},
      {"p2", "c2mm"}, {"c1m1", "c2mm"}, {"c11m", "c2mm"},
      {"p2", "p4"},
      {"p4", "p4mm"}, {"p2mm", "p4mm"}, {"c2mm", "p4mm"},
      {"p4", "p4gm"}, {"p2gg", "p4gm"}, {"c2mm", "p4gm"},
      {"p3", "p3m1"}, {"c1m1", "p3m1"},
      {"p3", "p31m"}, {"c11m", "p31m"},
      {"p2", "p6"}, {"p3", "p6"},
      {"p6", "p6mm"}, {"p3m1", "p6mm"}, {"p31m", "p6mm"}, {"c2mm", "p6mm"},
  });
}

const std::vector<std::pair<std::string, int>> kLaueNodes{
    {"2", 2}, {"2mm", 4}, {"4", 4}, {"6", 6}, {"4mm", 8}, {"6mm", 12}};
const std::vector<std::pair<const char*, const char*>> kLaueEdges{
    {"2", "2mm"}, {"2", "4"}, {"2", "6"}, {"2mm", "4mm"}, {"2mm", "6mm"}, {"4", "4mm"}, {"6", "6mm"}};

HierarchyTree build_quasi_tree() {
  auto nodes = kLaueNodes;
  for (int n : {8, 10, 12}) {
    nodes.push_back({std::to_string(n), n});
    nodes.push_back({std::to_string(n) + "mm", 2 * n});
  }
  auto edges = kLaueEdges;
  edges.insert(edges.end(), {
      {"8", "8mm"}, {"10", "10mm"}, {"12", "12mm"},
      {"4", "8"}, {"6", "12"}, {"4mm", "8mm"}, {"6mm", "12mm"},
      // index-3 and index-5 maximal subgroups of the 12- and 10-fold classes
      {"4", "12"}, {"4mm", "12mm"}, {"2", "10"}, {"2mm", "10mm"},
  });
  return make_tree(nodes, edges);
}

}  // namespace

const HierarchyTree& plane_tree() {
  static const HierarchyTree t = build_plane_tree();
  return t;
}

const HierarchyTree& laue_tree() {
  static const HierarchyTree t = make_tree(kLaueNodes, kLaueEdges);
  return t;
}

const HierarchyTree& quasicrystal_tree() {
  static const HierarchyTree t = build_quasi_tree();
  return t;
}

bool disjoint(const GroupSetting& a, const GroupSetting& b) {
  if (a.name == "p1" || b.name == "p1")
    return false;
  const auto& t = plane_tree();
  return !t.reaches(a.name, b.name) && !t.reaches(b.name, a.name);
}

std::string compatible(const GroupSetting& g) { return g.laue; }

std::string to_string(Label l) {
  switch (l) {
    case Label::genuine: return "genuine";
    case Label::pseudo: return "pseudo";
    case Label::rejected: return "rejected";
  }
  return "?";
}

const ResidualRow* ResidualTable::find(std::string_view setting) const {
  for (const auto& r : rows)
    if (r.setting == setting)
      return &r;
  return nullptr;
}

Label ClassificationResult::plane_label(std::string_view s) const {
  auto has = [&](const std::vector<std::string>& v) {
    return std::find(v.begin(), v.end(), s) != v.end();
  };
  if (has(genuine_plane))
    return Label::genuine;
  if (has(pseudo_plane))
    return Label::pseudo;
  return Label::rejected;
}

namespace {

const std::vector<std::string> kAnchorOrder{"p2",   "p1m1", "p11m", "p1g1",
                                            "p11g", "c1m1", "c11m", "p3"};
const std::vector<std::string> kLaueAnchorOrder{"2mm", "4", "6"};

int setting_rank(std::string_view name) {
  const auto& all = all_settings();
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i].name == name)
      return int(i);
  return int(all.size());
}

int laue_rank(std::string_view name) {
  for (std::size_t i = 0; i < kLaueNodes.size(); ++i)
    if (kLaueNodes[i].first == name)
      return int(i);
  return int(kLaueNodes.size());
}

double exact_floor(const ResidualTable& t, const ClassifyConfig& cfg) {
  return t.total_power ? cfg.exact_floor * *t.total_power : std::numeric_limits<double>::min();
}

double band_floor(const ResidualTable& t, const ClassifyConfig& cfg) {
  return t.total_power ? cfg.pseudo_floor * *t.total_power : 0.0;
}

template <class Seq>
bool member(const Seq& s, const std::string& x) {
  return std::find(s.begin(), s.end(), x) != s.end();
}

}  // namespace

const ResidualRow& anchor_plane(const ResidualTable& table, const ClassifyConfig& cfg) {
  const double fl = exact_floor(table, cfg);
  const ResidualRow* best = nullptr;
  for (const auto& name : kAnchorOrder) {
    const ResidualRow* r = table.find(name);
    if (!r)
      continue;
    if (!best || std::max(r->j_complex, fl) < std::max(best->j_complex, fl))
      best = r;
  }
  if (!best)
    throw Error("residual table has no k = 2 or k = 3 settings; cannot anchor");
  return *best;
}

std::vector<LaueEntry> laue_residuals(const ResidualTable& table, const ClassifyConfig& cfg) {
  const double fl = exact_floor(table, cfg);
  std::map<std::string, LaueEntry> best;
  for (const auto& r : table.rows) {
    const std::string cls = setting(r.setting).laue;
    if (cls == "2")
      continue;  // class 2 is the root with zero amplitude residual
    double j = std::max(r.j_amplitude, fl);
    auto it = best.find(cls);
    if (it == best.end() || j < it->second.j_amplitude ||
        (j == it->second.j_amplitude && setting_rank(r.setting) < setting_rank(it->second.model)))
      best[cls] = {cls, j, r.n, r.setting};
  }
  std::vector<LaueEntry> out;
  for (auto& [c, e] : best)
    out.push_back(e);
  std::sort(out.begin(), out.end(),
            [](const LaueEntry& a, const LaueEntry& b) { return laue_rank(a.cls) < laue_rank(b.cls); });
  return out;
}

LaueEntry anchor_laue(const ResidualTable& table, const ClassifyConfig& cfg) {
  auto entries = laue_residuals(table, cfg);
  const LaueEntry* best = nullptr;
  for (const auto& name : kLaueAnchorOrder)
    for (const auto& e : entries)
      if (e.cls == name && (!best || e.j_amplitude < best->j_amplitude))
        best = &e;
  if (!best)
    throw Error("no amplitude residuals for point classes 2mm, 4 or 6; cannot anchor");
  return *best;
}

namespace {

struct Node {
  std::string name;
  int k;
  double j, n;
  std::string model;
};

// Shared ascent logic for both levels. `nodes` hold effective residuals.
struct Ascent {
  std::string level;
  const HierarchyTree& tree;
  std::map<std::string, Node> nodes;
  double band = 0;

  bool low(const std::string& n) const { return nodes.at(n).j <= band; }

  AscentRow test(const std::string& sub, const std::string& super) const {
    const Node& l = nodes.at(sub);
    const Node& m = nodes.at(super);
    AscentDecision d{std::nan(""), std::nan(""), false};
    if (m.n > 0 && l.n > 0)  // an empty model cannot be tested and never passes
      d = ascent_test(m.j, l.j, m.k, l.k, m.n, l.n);
    AscentRow row;
    row.level = level;
    row.sub = sub;
    row.super = super;
    row.sub_model = l.model;
    row.super_model = m.model;
    row.j_sub = l.j;
    row.j_super = m.j;
    row.n_sub = l.n;
    row.n_super = m.n;
    row.k_sub = l.k;
    row.k_super = m.k;
    row.lhs = d.lhs;
    row.rhs = d.rhs;
    row.passed = d.passed;
    return row;
  }

  // A supergroup joins when every considered maximal subgroup (genuine or
  // within the band) passes and at least one of them is genuine.
  std::set<std::string> climb(const std::string& anchor) const {
    std::set<std::string> genuine{anchor};
    bool grown = true;
    while (grown) {
      grown = false;
      for (const auto& [name, k] : tree.nodes) {
        if (!nodes.count(name) || genuine.count(name))
          continue;
        bool any_genuine = false, all_pass = true;
        for (const auto& sub : tree.maximal_subgroups(name)) {
          if (!nodes.count(sub))
            continue;
          bool g = genuine.count(sub) != 0;
          if (!g && !low(sub))
            continue;
          if (!test(sub, name).passed) {
            all_pass = false;
            break;
          }
          any_genuine |= g;
        }
        if (any_genuine && all_pass) {
          genuine.insert(name);
          grown = true;
        }
      }
    }
    return genuine;
  }

  std::vector<AscentRow> rows(const std::set<std::string>& genuine) const {
    std::vector<AscentRow> out;
    for (const auto& e : tree.edges) {
      if (!nodes.count(e.sub) || !nodes.count(e.super))
        continue;
      AscentRow r = test(e.sub, e.super);
      r.considered = genuine.count(e.sub) || low(e.sub);
      out.push_back(r);
    }
    return out;
  }

  std::vector<std::string> down_closure(const std::string& top) const {
    std::vector<std::string> out;
    for (const auto& [name, k] : tree.nodes)
      if (nodes.count(name) && tree.reaches(name, top))
        out.push_back(name);
    return out;
  }
};

std::string pick_top(const std::set<std::string>& s, const HierarchyTree& tree,
                     const std::function<bool(const std::string&)>& ok) {
  std::string best;
  int bk = -1;
  for (const auto& [name, k] : tree.nodes)  // tree order is the tie-break order
    if (s.count(name) && ok(name) && k > bk) {
      best = name;
      bk = k;
    }
  return best;
}

}  // namespace

ClassificationResult classify_table(const ResidualTable& table, const ClassifyConfig& cfg) {
  ClassificationResult res;
  res.table = table;
  const double fl = exact_floor(table, cfg);
  const double bfl = band_floor(table, cfg);
  const std::optional<double> P = table.total_power;

  // ---- plane level
  Ascent plane{"plane", plane_tree(), {}, 0};
  for (const auto& r : table.rows) {
    if (r.setting == "p1")
      continue;
    plane.nodes[r.setting] = {r.setting, r.k, std::max(r.j_complex, fl), r.n, r.setting};
  }
  const ResidualRow& anchor = anchor_plane(table, cfg);
  res.anchor_plane = anchor.setting;
  plane.band = cfg.pseudo_band * std::max(plane.nodes.at(anchor.setting).j, bfl);

  std::set<std::string> G;
  const bool translation_only = P && anchor.j_complex > cfg.presence_fraction * *P;
  if (translation_only) {
    res.warnings.push_back("translation-only: even the best k=2/3 model (" + anchor.setting +
                           ") leaves " + std::to_string(anchor.j_complex / *P * 100) +
                           "% of the power unexplained; reporting p1");
  } else {
    G = plane.climb(anchor.setting);
  }
  res.ascents = plane.rows(G);

  // ---- Laue level
  Ascent laue{"laue", laue_tree(), {}, 0};
  res.laue_table = laue_residuals(table, cfg);
  for (const auto& e : res.laue_table)
    laue.nodes[e.cls] = {e.cls, laue_tree().order(e.cls), e.j_amplitude, e.n, e.model};
  std::set<std::string> L;
  res.anchor_laue = "2";
  if (!res.laue_table.empty()) {
    bool any_anchor = std::any_of(res.laue_table.begin(), res.laue_table.end(), [](const LaueEntry& e) {
      return e.cls == "2mm" || e.cls == "4" || e.cls == "6";
    });
    if (any_anchor) {
      LaueEntry la = anchor_laue(table, cfg);
      laue.band = cfg.pseudo_band * std::max(la.j_amplitude, bfl);
      if (P && la.j_amplitude > cfg.presence_fraction * *P) {
        res.warnings.push_back("amplitude map shows no point symmetry beyond 2");
      } else {
        res.anchor_laue = la.cls;
        L = laue.climb(la.cls);
      }
    }
    auto lrows = laue.rows(L);
    res.ascents.insert(res.ascents.end(), lrows.begin(), lrows.end());
  }

  // ---- consistency arbitration
  res.ascent_genuine_plane.assign(G.begin(), G.end());
  std::sort(res.ascent_genuine_plane.begin(), res.ascent_genuine_plane.end(),
            [](const std::string& a, const std::string& b) { return setting_rank(a) < setting_rank(b); });
  std::string best_laue = L.empty() ? "2" : pick_top(L, laue_tree(), [](const std::string&) { return true; });
  auto laue_of = [](const std::string& s) { return setting(s).laue; };

  std::string best;
  if (!G.empty()) {
    int topk = 0;
    for (const auto& g : G)
      topk = std::max(topk, setting(g).k);
    best = pick_top(G, plane_tree(),
                    [&](const std::string& s) { return setting(s).k == topk && laue_of(s) == best_laue; });
    if (best.empty()) {
      std::string plane_top = pick_top(G, plane_tree(), [](const std::string&) { return true; });
      best = pick_top(G, plane_tree(), [&](const std::string& s) { return laue_of(s) == best_laue; });
      res.consistent = false;
      if (!best.empty()) {
        res.conflict = "plane ascent reached " + plane_top + " (Laue class " + laue_of(plane_top) +
                       ") but the amplitude map has Laue class " + best_laue +
                       "; plane symmetry lowered to " + best;
      } else {
        // No genuine plane group fits the Laue class: lower the Laue class to
        // what the highest compatible plane group implies.
        best = pick_top(G, plane_tree(), [&](const std::string& s) {
          return laue_tree().reaches(laue_of(s), best_laue);
        });
        std::string lowered = best.empty() ? "2" : laue_of(best);
        res.conflict = "plane ascent reached " + plane_top + " (Laue class " + laue_of(plane_top) +
                       ") but no genuine plane group is compatible with Laue class " + best_laue +
                       "; Laue class lowered to " + lowered +
                       (best.empty() ? "" : ", plane symmetry " + best);
        best_laue = lowered;
      }
    }
  }
  if (best.empty())
    best = "p1";
  if (best == "p1" && best_laue != "2") {
    res.consistent = false;
    res.conflict = "no genuine plane symmetry but the amplitude map has Laue class " + best_laue +
                   "; Laue class lowered to 2";
    best_laue = "2";
  }
  res.best_plane = best;
  res.genuine_laue = best_laue;

  // ---- final labels
  if (best == "p1") {
    res.genuine_plane = {"p1"};
  } else {
    res.genuine_plane = plane.down_closure(best);
  }
  // Non-genuine nodes reached by a passing ascent from a pseudo node. With
  // no symmetry at all there is nothing to be close to.
  std::set<std::string> pseudo;
  for (const auto& [name, node] : plane.nodes)
    if (!translation_only && !member(res.genuine_plane, name) && (plane.low(name) || G.count(name)))
      pseudo.insert(name);
  bool grown = true;
  while (grown) {
    grown = false;
    for (const auto& row : res.ascents)
      if (row.level == "plane" && row.passed && pseudo.count(row.sub) && !pseudo.count(row.super) &&
          !member(res.genuine_plane, row.super)) {
        pseudo.insert(row.super);
        grown = true;
      }
  }
  for (const auto& g : all_settings()) {
    if (!plane.nodes.count(g.name) || member(res.genuine_plane, g.name))
      continue;
    (pseudo.count(g.name) ? res.pseudo_plane : res.rejected_plane).push_back(g.name);
  }

  res.laue_chain.clear();
  for (const auto& [name, k] : laue_tree().nodes)
    if (laue_tree().reaches(name, best_laue))
      res.laue_chain.push_back(name);
  for (const auto& e : res.laue_table) {
    if (member(res.laue_chain, e.cls))
      continue;
    bool ps = laue.band > 0 && (laue.low(e.cls) || L.count(e.cls));
    (ps ? res.pseudo_laue : res.rejected_laue).push_back(e.cls);
  }

  // ---- noise, information criteria, confidences
  if (best != "p1") {
    const ResidualRow* b = table.find(best);
    try {
      res.noise_eps2 = noise_estimate(b->j_complex, b->n, b->k);
    } catch (const std::domain_error& e) {
      res.warnings.push_back(std::string("noise estimate unavailable: ") + e.what());
    }
  }
  if (res.noise_eps2)
    for (const auto& r : table.rows)
      res.gaic[r.setting] = gaic_value(r.j_complex, r.n, r.k, *res.noise_eps2);
  for (const auto& row : res.ascents) {
    if (!row.passed || !(row.rhs > 1))
      continue;
    res.confidences[row.sub + "->" + row.super] =
        confidence_level(row.lhs, row.k_super, row.k_sub, row.n_super, row.n_sub);
  }
  return res;
}

ResidualTable residual_table(const CoefficientSet& trans, LatticeType lattice) {
  ResidualTable table;
  table.total_power = trans.total_power();
  table.lattice = lattice;
  for (const auto& g : all_settings()) {
    if (!applicable(g, lattice))
      continue;
    ResidualRow row;
    row.setting = g.name;
    row.k = g.k;
    if (g.k == 1) {
      row.n = double(trans.n_count());
      table.rows.push_back(row);
      continue;
    }
    OriginShift o = refine_origin(trans, g);
    CoefficientSet shifted = shift_origin(trans, o.shift);
    CoefficientSet sym = symmetrize_plane_group(shifted, g);
    row.origin = o.shift;
    row.phase_residual = o.phase_residual;
    row.j_complex = residual_complex(shifted, sym);
    row.j_amplitude = residual_amplitude(shifted, sym);
    row.n = double(sym.n_count());
    table.rows.push_back(row);
  }
  return table;
}

ResidualTable residual_table(const CoefficientSet& trans,
                             const std::map<std::string, CoefficientSet>& models) {
  ResidualTable table;
  table.total_power = trans.total_power();
  for (const auto& g : all_settings()) {
    ResidualRow row;
    row.setting = g.name;
    row.k = g.k;
    if (g.k == 1) {
      row.n = double(trans.n_count());
      table.rows.push_back(row);
      continue;
    }
    auto it = models.find(g.name);
    if (it == models.end())
      continue;
    row.j_complex = residual_complex(trans, it->second);
    row.j_amplitude = residual_amplitude(trans, it->second);
    row.n = double(it->second.n_count());
    table.rows.push_back(row);
  }
  for (const auto& [name, m] : models)
    if (!has_setting(name))
      throw Error("unknown plane group setting '" + name + "'");
  return table;
}

CoefficientSet model_in_input_origin(const CoefficientSet& trans, const GroupSetting& group,
                                     Vec2 origin) {
  CoefficientSet sym = symmetrize_plane_group(shift_origin(trans, origin), group);
  return shift_origin(sym, origin * -1.0);
}

ClassificationResult classify(const CoefficientSet& trans, LatticeType lattice,
                              const ClassifyConfig& cfg) {
  if (trans.values.empty())
    throw Error("cannot classify an empty coefficient set");
  return classify_table(residual_table(trans, lattice), cfg);
}

}  // namespace planesym
