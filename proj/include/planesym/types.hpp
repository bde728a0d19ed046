#pragma once

#include <cmath>
#include <compare>
#include <stdexcept>
#include <string>

namespace planesym {

// All library failures throw this (or std::domain_error for bad math input).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

// Miller index pair of a 2D reciprocal lattice point.
struct Miller {
  int h = 0;
  int k = 0;

  auto operator<=>(const Miller&) const = default;
  Miller operator-() const { return {-h, -k}; }
};

// Fundamental 2D Bravais types, in order of increasing metric specialisation
// (square and hexagonal are the terminal ones).
enum class LatticeType { oblique, rectangular, centered, square, hexagonal };

std::string to_string(LatticeType t);

}  // namespace planesym
