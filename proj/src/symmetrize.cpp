#include "planesym/symmetrize.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <map>
#include <set>

namespace planesym {

namespace {

// All indices reachable from the stored ones, in canonical form.
std::set<Miller> orbit_union(const CoefficientSet& set, const std::vector<std::array<int, 4>>& mats) {
  std::set<Miller> out;
  for (const auto& [m, c] : set.values)
    for (const auto& r : mats)
      out.insert(CoefficientSet::canonical(SymOp{r, {}}.act(m)));
  return out;
}

std::vector<std::array<int, 4>> rotations(const GroupSetting& g) {
  std::vector<std::array<int, 4>> r;
  for (const auto& op : g.ops)
    r.push_back(op.r);
  return r;
}

Complex project(const CoefficientSet& set, const GroupSetting& g, Miller q) {
  Complex s;
  for (const auto& op : g.ops)
    s += set.value(op.act(q)) * std::polar(1.0, -2 * kPi * (q.h * op.t.x + q.k * op.t.y));
  return s / double(g.k);
}

double wrap_angle(double a) { return std::remainder(a, 2 * kPi); }

}  // namespace

CoefficientSet symmetrize_plane_group(const CoefficientSet& set, const GroupSetting& group) {
  CoefficientSet out = set;
  out.values.clear();
  double cut = set.threshold() * (1 - 1e-9);
  for (Miller q : orbit_union(set, rotations(group))) {
    Complex c = project(set, group, q);
    if (std::abs(c) >= cut)
      out.values[q] = c;
  }
  return out;
}

CoefficientSet symmetrize_point_class(const CoefficientSet& set, const PointClass& cls) {
  if (!cls.crystallographic)
    throw Error("point class " + cls.name + " has no action on 2D lattice indices");
  CoefficientSet out = set;
  out.values.clear();
  for (Miller q : orbit_union(set, cls.matrices)) {
    double a = 0;
    for (const auto& r : cls.matrices)
      a += std::abs(set.value(SymOp{r, {}}.act(q)));
    a /= double(cls.matrices.size());
    Complex c = set.value(q);
    double m = std::abs(c);
    out.values[q] = m > 0 ? c * (a / m) : Complex(a, 0);
  }
  return out;
}

namespace {

// T(s) = Re sum_d W_d exp(2 pi i d.s) where T is k times the retained power.
struct Objective {
  std::map<Miller, Complex> terms;

  double value(Vec2 s) const {
    double t = 0;
    for (const auto& [d, w] : terms)
      t += (w * std::polar(1.0, 2 * kPi * (d.h * s.x + d.k * s.y))).real();
    return t;
  }
  void derivatives(Vec2 s, std::array<double, 2>& g, std::array<double, 3>& hess) const {
    g = {0, 0};
    hess = {0, 0, 0};
    for (const auto& [d, w] : terms) {
      Complex e = w * std::polar(1.0, 2 * kPi * (d.h * s.x + d.k * s.y));
      Complex ie = Complex(0, 2 * kPi) * e;
      g[0] += (ie * double(d.h)).real();
      g[1] += (ie * double(d.k)).real();
      double c = -4 * kPi * kPi * e.real();
      hess[0] += c * d.h * d.h;
      hess[1] += c * d.h * d.k;
      hess[2] += c * d.k * d.k;
    }
  }
};

}  // namespace

OriginShift refine_origin(const CoefficientSet& set, const GroupSetting& group) {
  OriginShift result;
  if (group.k == 1 || set.values.empty())
    return result;

  Objective obj;
  int maxd = 0;
  for (const auto& [m0, c0] : set.values)
    for (Miller h : {m0, -m0}) {
      Complex ch = set.value(h);
      for (const auto& op : group.ops) {
        Miller hr = op.act(h);
        Complex chr = set.value(hr);
        if (chr == Complex{})
          continue;
        Complex w = std::conj(ch) * chr * std::polar(1.0, -2 * kPi * (h.h * op.t.x + h.k * op.t.y));
        Miller d{h.h - hr.h, h.k - hr.k};
        obj.terms[d] += w;
        maxd = std::max({maxd, std::abs(d.h), std::abs(d.k)});
      }
    }

  // On grid points the transform is exact for any grid size, so 64 suffices;
  // a finer grid only helps the starting point for strongly varying maps.
  int n = 64;
  while (n < 2 * maxd + 1 && n < 512)
    n *= 2;
  std::vector<Complex> buf(std::size_t(n) * n);
  for (const auto& [d, w] : obj.terms) {
    int i = ((d.h % n) + n) % n, j = ((d.k % n) + n) % n;
    buf[std::size_t(j) * n + i] += w;
  }
  auto* fb = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan plan = fftw_plan_dft_2d(n, n, fb, fb, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  double best = -1e300;
  for (const auto& v : buf)
    best = std::max(best, v.real());
  double tol = 1e-9 * std::max(std::abs(best), 1e-300);
  int bi = 0, bj = 0;
  bool found = false;
  for (int i = 0; i < n && !found; ++i)  // s.x outer: lexicographic (s.x, s.y)
    for (int j = 0; j < n; ++j)
      if (buf[std::size_t(j) * n + i].real() >= best - tol) {
        bi = i;
        bj = j;
        found = true;
        break;
      }

  Vec2 s{double(bi) / n, double(bj) / n};
  double step_cap = 1.0 / n;
  for (int iter = 0; iter < 50; ++iter) {
    std::array<double, 2> g;
    std::array<double, 3> H;
    obj.derivatives(s, g, H);
    // Newton step restricted to directions of negative curvature; flat
    // directions (continuous origin freedom) are left alone.
    double tr = H[0] + H[2], dt = H[0] * H[2] - H[1] * H[1];
    double disc = std::sqrt(std::max(0.0, tr * tr / 4 - dt));
    double lam[2] = {tr / 2 - disc, tr / 2 + disc};
    double scale = std::max({std::abs(H[0]), std::abs(H[2]), 1e-300});
    Vec2 step;
    for (double l : lam) {
      if (l >= -1e-9 * scale)
        continue;
      Vec2 v = std::abs(H[1]) > 1e-14 * scale ? Vec2{H[1], l - H[0]}
               : (std::abs(H[0] - l) < std::abs(H[2] - l) ? Vec2{1, 0} : Vec2{0, 1});
      v = v * (1.0 / v.norm());
      double gv = g[0] * v.x + g[1] * v.y;
      step = step + v * (-gv / l);
    }
    double len = step.norm();
    if (len > step_cap)
      step = step * (step_cap / len);
    Vec2 next = s + step;
    if (obj.value(next) < obj.value(s))
      break;
    s = next;
    if (len < 1e-13)
      break;
  }
  auto wrap01 = [](double v) {
    double f = v - std::floor(v);
    return (f > 1 - 1e-10 || f < 1e-10) ? 0.0 : f;
  };
  result.shift = {wrap01(s.x), wrap01(s.y)};

  CoefficientSet shifted = shift_origin(set, result.shift);
  double num = 0, den = 0;
  for (const auto& [m, c] : shifted.values) {
    Complex p = project(shifted, group, m);
    if (std::abs(p) < 1e-9 * std::abs(c))
      continue;
    double w = std::norm(c);
    double d = wrap_angle(std::arg(c) - std::arg(p));
    num += w * d * d;
    den += w;
  }
  result.phase_residual = den > 0 ? std::sqrt(num / den) : 0.0;
  return result;
}

}  // namespace planesym
