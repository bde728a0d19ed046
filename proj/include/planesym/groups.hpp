#pragma once

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "planesym/types.hpp"

namespace planesym {

// x -> R x + t on fractional coordinates; R is row-major.
struct SymOp {
  std::array<int, 4> r{1, 0, 0, 1};
  Vec2 t;

  // Index action h -> hR (h as a row vector).
  Miller act(Miller m) const { return {m.h * r[0] + m.k * r[2], m.h * r[1] + m.k * r[3]}; }
  Vec2 apply(Vec2 x) const { return {r[0] * x.x + r[1] * x.y + t.x, r[2] * x.x + r[3] * x.y + t.y}; }
  // Translation part reduced into [0, 1).
  SymOp operator*(const SymOp& o) const;
  bool same_mod_lattice(const SymOp& o) const;
};

enum class Centering { primitive, centered };

// Reflection condition; the predicate sees conventional-cell indices.
struct AbsenceRule {
  std::string description;
  std::function<bool(Miller)> forbidden;
};

// One setting of a plane group in the basis produced by standardize_lattice.
// Centred settings are written in the equal-length primitive (rhombic) basis.
struct GroupSetting {
  std::string name;
  int k = 1;  // point operations per lattice point
  Centering centering = Centering::primitive;
  LatticeType lattice = LatticeType::oblique;  // least specialised lattice allowing it
  std::string laue;                            // compatible Laue class
  std::vector<SymOp> ops;                      // k operations, identity first
};

// The 21 settings in a fixed order: p1, p2, p1m1, p11m, p1g1, p11g, c1m1, c11m,
// p2mm, p2mg, p2gm, p2gg, c2mm, p4, p4mm, p4gm, p3, p3m1, p31m, p6, p6mm.
const std::vector<GroupSetting>& all_settings();
const GroupSetting& setting(std::string_view name);
bool has_setting(std::string_view name);
bool applicable(const GroupSetting& g, LatticeType lattice);

// Primitive (h, k) -> conventional (H, K); identity for primitive settings,
// H = h - k, K = h + k for the centred ones.
Miller conventional_index(const GroupSetting& g, Miller m);
std::vector<AbsenceRule> absence_rules(const GroupSetting& g);
// Derived from the operations: h is extinct when some op fixes h while
// giving it a non-trivial phase.
bool systematically_absent(const GroupSetting& g, Miller m);

// Crystallographic point classes act on indices through integer matrices;
// the non-crystallographic ones (8, 10, 12 and their mm variants) only exist
// as nodes of the quasicrystal tree.
struct PointClass {
  std::string name;
  std::string setting;  // "" or "diagonal" for the second 2mm orientation
  int k = 2;
  bool crystallographic = true;
  LatticeType lattice = LatticeType::oblique;
  std::vector<std::array<int, 4>> matrices;
};

const std::vector<PointClass>& all_point_classes();
const PointClass& point_class(std::string_view name, std::string_view setting = "");

}  // namespace planesym
