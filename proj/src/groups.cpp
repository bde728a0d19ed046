#include "planesym/groups.hpp"

#include <algorithm>

namespace planesym {

namespace {

double frac(double v) {
  double f = v - std::floor(v);
  return f >= 1.0 - 1e-12 ? 0.0 : f;
}

bool near_int(double v) { return std::abs(v - std::round(v)) < 1e-9; }

}  // namespace

SymOp SymOp::operator*(const SymOp& o) const {
  // (this o o)(x) = R1 (R2 x + t2) + t1
  SymOp p;
  p.r = {r[0] * o.r[0] + r[1] * o.r[2], r[0] * o.r[1] + r[1] * o.r[3],
         r[2] * o.r[0] + r[3] * o.r[2], r[2] * o.r[1] + r[3] * o.r[3]};
  Vec2 t2 = SymOp{r, {}}.apply(o.t);
  p.t = {frac(t2.x + t.x), frac(t2.y + t.y)};
  return p;
}

bool SymOp::same_mod_lattice(const SymOp& o) const {
  return r == o.r && near_int(t.x - o.t.x) && near_int(t.y - o.t.y);
}

namespace {

using M = std::array<int, 4>;
constexpr M kE{1, 0, 0, 1};
constexpr M kInv{-1, 0, 0, -1};
constexpr M kMy{1, 0, 0, -1};   // (x, -y): reflection across the a axis
constexpr M kMx{-1, 0, 0, 1};   // (-x, y)
constexpr M kSwap{0, 1, 1, 0};  // (y, x)
constexpr M kAnti{0, -1, -1, 0};
constexpr M kR4{0, -1, 1, 0};   // (-y, x)
constexpr M kR3{0, -1, 1, -1};  // (-y, x - y), gamma = 120
constexpr M kR6{1, -1, 1, 0};   // (x - y, x)

std::vector<SymOp> closure(const std::vector<SymOp>& gens) {
  std::vector<SymOp> ops{SymOp{kE, {}}};
  bool grown = true;
  while (grown) {
    grown = false;
    std::size_t n = ops.size();
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& g : gens) {
        SymOp p = g * ops[i];
        bool known = std::any_of(ops.begin(), ops.end(),
                                 [&](const SymOp& o) { return o.same_mod_lattice(p); });
        if (!known) {
          ops.push_back(p);
          grown = true;
        }
      }
  }
  return ops;
}

GroupSetting make(std::string name, Centering c, LatticeType lat, std::string laue,
                  std::vector<SymOp> gens) {
  GroupSetting g;
  g.name = std::move(name);
  g.centering = c;
  g.lattice = lat;
  g.laue = std::move(laue);
  g.ops = closure(gens);
  g.k = int(g.ops.size());
  return g;
}

std::vector<GroupSetting> build_settings() {
  using L = LatticeType;
  const auto P = Centering::primitive, C = Centering::centered;
  const double h = 0.5;
  std::vector<GroupSetting> s;
  s.push_back(make("p1", P, L::oblique, "2", {}));
  s.push_back(make("p2", P, L::oblique, "2", {{kInv, {}}}));
  s.push_back(make("p1m1", P, L::rectangular, "2mm", {{kMy, {}}}));
  s.push_back(make("p11m", P, L::rectangular, "2mm", {{kMx, {}}}));
  s.push_back(make("p1g1", P, L::rectangular, "2mm", {{kMy, {h, 0}}}));
  s.push_back(make("p11g", P, L::rectangular, "2mm", {{kMx, {0, h}}}));
  s.push_back(make("c1m1", C, L::centered, "2mm", {{kAnti, {}}}));
  s.push_back(make("c11m", C, L::centered, "2mm", {{kSwap, {}}}));
  s.push_back(make("p2mm", P, L::rectangular, "2mm", {{kInv, {}}, {kMy, {}}}));
  s.push_back(make("p2mg", P, L::rectangular, "2mm", {{kInv, {}}, {kMx, {0, h}}}));
  s.push_back(make("p2gm", P, L::rectangular, "2mm", {{kInv, {}}, {kMy, {h, 0}}}));
  s.push_back(make("p2gg", P, L::rectangular, "2mm", {{kInv, {}}, {kMy, {h, h}}}));
  s.push_back(make("c2mm", C, L::centered, "2mm", {{kInv, {}}, {kSwap, {}}}));
  s.push_back(make("p4", P, L::square, "4", {{kR4, {}}}));
  s.push_back(make("p4mm", P, L::square, "4mm", {{kR4, {}}, {kMy, {}}}));
  s.push_back(make("p4gm", P, L::square, "4mm", {{kR4, {}}, {kMy, {h, h}}}));
  s.push_back(make("p3", P, L::hexagonal, "6", {{kR3, {}}}));
  s.push_back(make("p3m1", P, L::hexagonal, "6mm", {{kR3, {}}, {kAnti, {}}}));
  s.push_back(make("p31m", P, L::hexagonal, "6mm", {{kR3, {}}, {kSwap, {}}}));
  s.push_back(make("p6", P, L::hexagonal, "6", {{kR6, {}}}));
  s.push_back(make("p6mm", P, L::hexagonal, "6mm", {{kR6, {}}, {kAnti, {}}}));
  return s;
}

std::vector<PointClass> build_classes() {
  using L = LatticeType;
  auto mats = [](std::vector<M> gens) {
    std::vector<SymOp> g;
    for (auto& m : gens)
      g.push_back({m, {}});
    std::vector<M> out;
    for (auto& op : closure(g))
      out.push_back(op.r);
    return out;
  };
  std::vector<PointClass> c;
  c.push_back({"2", "", 2, true, L::oblique, mats({kInv})});
  c.push_back({"2mm", "", 4, true, L::rectangular, mats({kInv, kMy})});
  c.push_back({"2mm", "diagonal", 4, true, L::centered, mats({kInv, kSwap})});
  c.push_back({"4", "", 4, true, L::square, mats({kR4})});
  c.push_back({"4mm", "", 8, true, L::square, mats({kR4, kMy})});
  c.push_back({"6", "", 6, true, L::hexagonal, mats({kR6})});
  c.push_back({"6mm", "", 12, true, L::hexagonal, mats({kR6, kAnti})});
  for (int n : {8, 10, 12}) {
    c.push_back({std::to_string(n), "", n, false, L::oblique, {}});
    c.push_back({std::to_string(n) + "mm", "", 2 * n, false, L::oblique, {}});
  }
  return c;
}

}  // namespace

const std::vector<GroupSetting>& all_settings() {
  static const std::vector<GroupSetting> s = build_settings();
  return s;
}

bool has_setting(std::string_view name) {
  const auto& all = all_settings();
  return std::any_of(all.begin(), all.end(), [&](const GroupSetting& g) { return g.name == name; });
}

const GroupSetting& setting(std::string_view name) {
  for (const auto& g : all_settings())
    if (g.name == name)
      return g;
  throw Error("unknown plane group setting '" + std::string(name) + "'");
}

bool applicable(const GroupSetting& g, LatticeType lattice) {
  using L = LatticeType;
  if (g.lattice == L::oblique || g.lattice == lattice)
    return true;
  if (lattice == L::square)
    return g.lattice == L::rectangular || g.lattice == L::centered;
  if (lattice == L::hexagonal)
    return g.lattice == L::centered;
  return false;
}

Miller conventional_index(const GroupSetting& g, Miller m) {
  if (g.centering == Centering::centered)
    return {m.h - m.k, m.h + m.k};
  return m;
}

std::vector<AbsenceRule> absence_rules(const GroupSetting& g) {
  auto odd = [](int v) { return v % 2 != 0; };
  std::vector<AbsenceRule> rules;
  if (g.centering == Centering::centered)
    rules.push_back({"h+k odd", [odd](Miller m) { return odd(m.h + m.k); }});
  const std::string& n = g.name;
  bool glide_a = n == "p1g1" || n == "p2gm" || n == "p2gg" || n == "p4gm";
  bool glide_b = n == "p11g" || n == "p2mg" || n == "p2gg" || n == "p4gm";
  if (glide_a)
    rules.push_back({"(h,0): h odd", [odd](Miller m) { return m.k == 0 && odd(m.h); }});
  if (glide_b)
    rules.push_back({"(0,k): k odd", [odd](Miller m) { return m.h == 0 && odd(m.k); }});
  return rules;
}

bool systematically_absent(const GroupSetting& g, Miller m) {
  if (m.h == 0 && m.k == 0)
    return false;
  for (const auto& op : g.ops) {
    if (op.act(m) != m)
      continue;
    double ph = m.h * op.t.x + m.k * op.t.y;
    if (!near_int(ph))
      return true;
  }
  return false;
}

const std::vector<PointClass>& all_point_classes() {
  static const std::vector<PointClass> c = build_classes();
  return c;
}

const PointClass& point_class(std::string_view name, std::string_view setting) {
  for (const auto& c : all_point_classes())
    if (c.name == name && c.setting == setting)
      return c;
  throw Error("unknown point class '" + std::string(name) +
              (setting.empty() ? "" : " (" + std::string(setting) + ")") + "'");
}

}  // namespace planesym
