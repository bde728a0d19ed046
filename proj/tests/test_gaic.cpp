#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "planesym/gaic.hpp"
#include "planesym/hierarchy.hpp"
#include "planesym/symmetrize.hpp"

using namespace planesym;

namespace {

CoefficientSet random_set(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0, 3000);
  CoefficientSet s;
  s.dynamic_range = 1e9;
  for (int h = 0; h <= 4; ++h)
    for (int k = -4; k <= 4; ++k)
      if (CoefficientSet::is_canonical({h, k}))
        s.set({h, k}, {n(rng), n(rng)});
  return s;
}

std::vector<TreeEdge> all_edges() {
  std::vector<TreeEdge> e = plane_tree().edges;
  for (const auto& x : laue_tree().edges)
    e.push_back(x);
  return e;
}

}  // namespace

TEST_CASE("complex residual") {
  CoefficientSet t, s;
  t.set({1, 0}, Complex(30000, 40000));
  CHECK(residual_complex(t, s) == doctest::Approx(25));
  CHECK(residual_complex(s, t) == doctest::Approx(25));
  CHECK(residual_complex(t, t) == 0);

  // Four coefficients against their p2 projection, summed by hand.
  CoefficientSet toy;
  toy.set({1, 0}, Complex(1000, 2000));
  toy.set({0, 1}, Complex(-500, 300));
  toy.set({1, 1}, Complex(0, -4000));
  toy.set({2, -1}, Complex(700, 0));
  CoefficientSet p2 = symmetrize_plane_group(toy, setting("p2"));
  double by_hand = (2000.0 * 2000 + 300.0 * 300 + 4000.0 * 4000) / 1e8;
  CHECK(residual_complex(toy, p2) == doctest::Approx(by_hand));
}

TEST_CASE("amplitude residual") {
  CoefficientSet t, s;
  t.set({1, 0}, 100000.0);
  s.set({1, 0}, Complex(0, 60000));
  CHECK(residual_amplitude(t, s) == doctest::Approx(16));

  // Class-4 orbit means against a brute-force evaluation.
  CoefficientSet toy = random_set(9);
  CoefficientSet four = symmetrize_point_class(toy, point_class("4"));
  double by_hand = 0;
  for (int h = -4; h <= 4; ++h)
    for (int k = -4; k <= 4; ++k) {
      if (!CoefficientSet::is_canonical({h, k}))
        continue;
      double mean = 0;
      Miller m{h, k};
      for (int i = 0; i < 4; ++i) {
        mean += std::abs(toy.value(m)) / 4;
        m = {-m.k, m.h};
      }
      double d = (std::abs(toy.value({h, k})) - mean) / 1e4;
      by_hand += d * d;
    }
  // Indices outside the stored square add their (mean) amplitude squared.
  double outside = 0;
  for (const auto& [m, c] : four.values)
    if (!toy.contains(m))
      outside += std::norm(c / 1e4);
  CHECK(residual_amplitude(toy, four) == doctest::Approx(by_hand + outside));
}

TEST_CASE("residual identities on arbitrary inputs") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CoefficientSet s = random_set(seed);
    CHECK(residual_complex(s, symmetrize_plane_group(s, setting("p1"))) == 0);
    CHECK(residual_amplitude(s, symmetrize_point_class(s, point_class("2"))) == 0);
  }
}

TEST_CASE("G-AIC value") {
  CHECK(gaic_value(0.7, 100, 4, 0) == 0.7);
  CHECK(gaic_value(0.0065, 948, 4, 9.1421e-6) == doctest::Approx(0.010833).epsilon(1e-4));
  CHECK(gaic_value(0, 100, 1, 1) == 200);
  CHECK_THROWS_AS(gaic_value(1, 1, 0, 1), std::domain_error);
}

TEST_CASE("noise estimate") {
  CHECK(std::abs(noise_estimate(0.0065, 948, 4) - 9.1421e-6) <= 1e-10);
  CHECK(noise_estimate(0.0065, 948, 4) == doctest::Approx(0.0065 / 711));
  CHECK(noise_estimate(0, 500, 4) == 0);
  CHECK(noise_estimate(1, 4, 2) == 0.5);
  CHECK(noise_estimate(0.3, 600, 6) == doctest::Approx(oracle::noise_by_dof(0.3, 600, 6)));
  CHECK_THROWS_AS(noise_estimate(1, 100, 1), std::domain_error);
  CHECK_THROWS_AS(noise_estimate(-1, 100, 2), std::domain_error);
  double prev = -1;
  for (double j = 0; j <= 1; j += 0.05) {
    double e = noise_estimate(j, 300, 4);
    CHECK(e > prev);
    prev = e;
  }
  prev = 1e9;
  for (double n = 10; n <= 2000; n += 37) {
    double e = noise_estimate(0.01, n, 4);
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("ascent bound") {
  CHECK(std::abs(ascent_rhs(4, 2, 948, 956) - 2.008368) < 1e-6);
  CHECK(std::abs(ascent_rhs(8, 4, 912, 948) - 1.3459916) < 1e-6);
  // Printed elsewhere as 2.0225564, two digits transposed.
  CHECK(std::abs(ascent_rhs(4, 2, 648, 665) - 2.0255639) < 1e-6);
  CHECK(ascent_rhs(4, 2, 500, 500) == 2.0);
  CHECK_THROWS_AS(ascent_rhs(2, 2, 10, 10), std::domain_error);
  CHECK_THROWS_AS(ascent_rhs(4, 1, 10, 10), std::domain_error);
  CHECK_THROWS_AS(ascent_rhs(4, 2, 0, 10), std::domain_error);

  // Independent form: largest J_m with G-AIC_m below G-AIC_l.
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> n(50, 1500);
  for (const auto& e : all_edges())
    for (int i = 0; i < 20; ++i) {
      double nm = n(rng), nl = n(rng);
      CHECK(ascent_rhs(e.k_super, e.k_sub, nm, nl) ==
            doctest::Approx(oracle::rhs_by_gaic(e.k_super, e.k_sub, nm, nl)).epsilon(1e-12));
    }
}

TEST_CASE("equal-count insets on every tree edge") {
  for (const auto& e : all_edges()) {
    CAPTURE(e.sub);
    CAPTURE(e.super);
    double expect = 1.0 + 2.0 * (e.k_super - e.k_sub) / (e.k_super * (e.k_sub - 1.0));
    for (double n : {1.0, 37.0, 956.0, 1e6})
      CHECK(ascent_rhs(e.k_super, e.k_sub, n, n) == expect);
    CHECK(e.inset == expect);
  }
}

TEST_CASE("ascent decisions") {
  auto a = ascent_test(0.0065, 0.0042, 4, 2, 948, 956);
  CHECK(a.lhs == doctest::Approx(1.547619).epsilon(1e-6));
  CHECK(a.rhs == doctest::Approx(2.008368).epsilon(1e-6));
  CHECK(a.passed);
  auto b = ascent_test(1.9558, 0.0065, 8, 4, 918, 948);
  CHECK(b.lhs == doctest::Approx(300.89).epsilon(1e-4));
  CHECK_FALSE(b.passed);
  auto c = ascent_test(0.0040, 0.0041, 4, 2, 648, 665);
  CHECK(c.lhs == doctest::Approx(0.9756098).epsilon(1e-7));
  CHECK(c.passed);
  CHECK_THROWS_AS(ascent_test(1, 0, 4, 2, 10, 10), std::domain_error);
}

TEST_CASE("confidence levels") {
  for (const auto& e : all_edges())
    for (auto [nm, nl] : {std::pair{948.0, 956.0}, {500.0, 500.0}, {912.0, 948.0}}) {
      double rhs = ascent_rhs(e.k_super, e.k_sub, nm, nl);
      if (rhs <= 1)
        continue;
      CAPTURE(e.sub);
      CAPTURE(e.super);
      CHECK(std::abs(confidence_level(1.0, e.k_super, e.k_sub, nm, nl) - 1.0) < 1e-9);
      CHECK(std::abs(confidence_level(rhs, e.k_super, e.k_sub, nm, nl)) < 1e-9);
      double mid = confidence_level(0.5 * (1 + rhs), e.k_super, e.k_sub, nm, nl);
      CHECK(mid > 0);
      CHECK(mid < 1);
      double prev = 2;
      for (int i = 0; i < 100; ++i) {
        double r = 1 + (rhs - 1) * i / 99.0;
        double c = confidence_level(r, e.k_super, e.k_sub, nm, nl);
        CHECK(c < prev);
        prev = c;
      }
    }
  CHECK_THROWS_AS(confidence_level(1, 4, 2, 2000, 100), std::domain_error);
}
