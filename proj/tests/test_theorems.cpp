#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "spherimax/theorems.hpp"

using namespace spherimax;

namespace {

ProblemInstance make(const char* name, std::map<std::string, double> params, int n,
                     double rho) {
  return ProblemInstance(zoo_get(name, params, n), n, rho);
}

bool all_status(const VerificationReport& r, ClauseStatus s) {
  return std::all_of(r.clauses.begin(), r.clauses.end(),
                     [s](const Clause& c) { return c.status == s; });
}

}  // namespace

TEST_CASE("the maximizer chain certifies a healthy level") {
  const ProblemInstance inst = make("NORM_POWER", {{"q", 1.0}}, 2, 1.0);
  const EtaSample s = compute_eta(inst, 1.6, 3);
  const VerificationReport rep = verify_maximizer_chain(inst, s, 3);
  CHECK(rep.overall);
  CHECK(rep.clauses.size() >= 5);
  CHECK(all_status(rep, ClauseStatus::pass));
  CHECK(rep.instance.find("NORM_POWER") != std::string::npos);
}

TEST_CASE("the chain is reported conditional when the gate fails") {
  const ProblemInstance inst = make("QUADRATIC", {{"c", 1.0}}, 2, 1.0);
  // eta itself is well-defined for r above beta even without the gate.
  const EtaSample s = compute_eta(inst, 1.5, 3);
  const VerificationReport rep = verify_maximizer_chain(inst, s, 3);
  CHECK(rep.overall);  // skipped clauses do not fail the report
  CHECK(all_status(rep, ClauseStatus::skip));
  CHECK(rep.clauses.size() == 5);
}

TEST_CASE("monotonicity verification passes on a certified curve") {
  const ProblemInstance inst = make("NORM_POWER", {{"q", 1.0}}, 2, 1.0);
  const VerificationReport rep =
      verify_monotonicity(tabulate_curve(inst, 1.1, 4.0, 9, 3));
  CHECK(rep.overall);
  CHECK(std::none_of(rep.clauses.begin(), rep.clauses.end(), [](const Clause& c) {
    return c.status == ClauseStatus::fail;
  }));
  // eta-decreasing, eta-upper-bound, and chord convexity all present.
  CHECK(rep.clauses.size() >= 3 * 7);
}

TEST_CASE("penalized argmins are ordered: 100 random polynomial instances") {
  std::mt19937_64 eng(2024);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> weight(0.05, 2.0);
  const int grid = 401;
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    double cf[5], cg[5];
    for (int k = 0; k < 5; ++k) {
      cf[k] = coef(eng);
      cg[k] = coef(eng);
    }
    std::vector<double> f(grid), g(grid);
    for (int i = 0; i < grid; ++i) {
      const double x = -1.0 + 2.0 * i / (grid - 1);
      double pf = 0.0, pg = 0.0, xx = 1.0;
      for (int k = 0; k < 5; ++k) {
        pf += cf[k] * xx;
        pg += cg[k] * xx;
        xx *= x;
      }
      f[i] = pf;
      g[i] = pg;
    }
    const double a = weight(eng);
    const double b = a + weight(eng);
    auto argmin = [&](double w) {
      int best = 0;
      for (int i = 1; i < grid; ++i) {
        if (f[i] + w * g[i] < f[best] + w * g[best]) best = i;
      }
      return best;
    };
    if (!check_argmin_ordering(f, g, a, b, argmin(a), argmin(b))) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("argmin certificates are validated before the ordering is read") {
  const std::vector<double> f = {0.0, 1.0, 4.0};
  const std::vector<double> g = {2.0, 0.0, -1.0};
  // f + 1*g = {2,1,3} -> argmin 1;  f + 10*g = {20,1,-6} -> argmin 2.
  CHECK(check_argmin_ordering(f, g, 1.0, 10.0, 1, 2));
  CHECK_THROWS_AS(check_argmin_ordering(f, g, 1.0, 10.0, 0, 2), Error);  // not a min
  CHECK_THROWS_AS(check_argmin_ordering(f, g, 10.0, 1.0, 1, 2), Error);  // a >= b
  CHECK_THROWS_AS(check_argmin_ordering(f, g, 1.0, 10.0, -1, 2), Error);
  CHECK_THROWS_AS(check_argmin_ordering({0.0}, g, 1.0, 10.0, 0, 0), Error);
}

TEST_CASE("sub-homogeneity at the ball maximum restores the gate") {
  // J = |x|: <J'(x), x> = |x| = J < 2J strictly away from zero.
  const BallMaxCondition bm =
      condition_at_ball_max(make("NORM_POWER", {{"q", 1.0}}, 2, 1.0), 1.0, 3);
  CHECK(bm.applies);
  CHECK(bm.rho_star == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(bm.euler_gap > 0.0);
  CHECK(bm.condition_checked);
  CHECK(bm.condition.holds);

  // J = c|x|^2 is exactly homogeneous of degree 2: the gap vanishes.
  const BallMaxCondition q =
      condition_at_ball_max(make("QUADRATIC", {{"c", 1.0}}, 2, 1.0), 1.0, 3);
  CHECK(!q.applies);
  CHECK(std::abs(q.euler_gap) <= 1e-7);

  CHECK_THROWS_AS(condition_at_ball_max(make("ZERO", {}, 2, 1.0), 1.0, 3), Error);
}

TEST_CASE("the multiplier map matches its closed form lambda^2") {
  const ProblemInstance inst = make("NORM_POWER", {{"q", 1.0}}, 2, 1.0);
  const EtaCurve curve = tabulate_curve(inst, 1.1, 4.0, 9, 3);
  const PhiMap map = build_phi_map(inst, curve, 10, 3);
  REQUIRE(map.table.size() == 10);
  CHECK(map.lambda_lo == doctest::Approx(curve.samples.back().eta / 2.0));
  CHECK(map.lambda_hi == doctest::Approx(curve.samples.front().eta / 2.0));
  for (std::size_t i = 0; i < map.table.size(); ++i) {
    const PhiEntry& e = map.table[i];
    CHECK(std::abs(e.phi - e.lambda * e.lambda) <= 1e-3);
    CHECK(e.residual_max <= 1e-6);
    CHECK(e.phi > 0.0);
    CHECK(e.phi < 1.0);
    if (i) CHECK(e.phi > map.table[i - 1].phi);
  }
}

TEST_CASE("the multiplier map requires a usable curve") {
  const ProblemInstance inst = make("NORM_POWER", {{"q", 1.0}}, 2, 1.0);
  const EtaCurve curve = tabulate_curve(inst, 1.1, 4.0, 9, 3);
  CHECK_THROWS_AS(build_phi_map(inst, curve, 1, 3), Error);
  EtaCurve tiny = curve;
  tiny.samples.resize(2);
  tiny.singleton_flags.resize(2);
  CHECK_THROWS_AS(build_phi_map(inst, tiny, 10, 3), Error);

  // A curve whose sampled values fail to decrease is rejected up front.
  EtaCurve corrupt = curve;
  std::swap(corrupt.samples[2].eta, corrupt.samples[3].eta);
  try {
    build_phi_map(inst, corrupt, 10, 3);
    FAIL("expected a precondition error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::precondition);
  }
}

TEST_CASE("multiplicity on a radial instance reports the reflection pair") {
  const ProblemInstance inst = make("NORM_POWER", {{"q", 1.0}}, 3, 1.0);
  const EtaCurve curve = tabulate_curve(inst, 1.1, 4.0, 9, 3);
  const MultiplicityResult res = detect_multiplicity(inst, curve, 0.16, 3);
  CHECK(res.mode == MultiplicityMode::radial_manifold);
  CHECK(res.degenerate);
  REQUIRE(res.solutions.size() == 2);
  // |x| = lambda for the unit-norm gradient, and |x|^2 = rho_tilde.
  CHECK(res.lambda_star == doctest::Approx(0.4).epsilon(1e-6));
  CHECK(res.solutions[0].squaredNorm() == doctest::Approx(0.16));
  CHECK((res.solutions[0] + res.solutions[1]).norm() <= 1e-12);
  CHECK(res.residual_max <= 1e-6);
  CHECK(res.penalized_gap <= 1e-10);
}

TEST_CASE("multiplicity on the coordinate power yields a symmetric pair") {
  const ProblemInstance inst = make("COORD_POWER", {}, 2, 1.0);
  const EtaCurve curve = tabulate_curve(inst, 1.02, 3.0, 17, 3);
  const MultiplicityResult res = detect_multiplicity(inst, curve, 0.25, 3);
  CHECK(res.mode == MultiplicityMode::psi_level);
  REQUIRE(res.solutions.size() == 2);
  CHECK(res.lambda_star == doctest::Approx(std::sqrt(2.0) / 3.0).epsilon(1e-5));
  Vector reflected = res.solutions[0];
  reflected[0] = -reflected[0];
  CHECK((reflected - res.solutions[1]).norm() <= 1e-5);
  CHECK(std::abs(std::abs(res.solutions[0][0]) - 0.5) <= 1e-5);
  CHECK(res.penalized_gap <= 1e-8);
}

TEST_CASE("a psi jump yields one multiplier shared across two clusters") {
  // Two radial bumps with the far one taller: as the level r grows, the
  // argmax hops from the outer cluster (|y|^2 near 0.70) to the inner one
  // (|y|^2 near 0.25), so psi skips every target in between.
  const ProblemInstance inst = make("TWO_BUMP",
                                    {{"c1", 0.25},
                                     {"w1", 0.15},
                                     {"h1", 0.6},
                                     {"c2", 0.70},
                                     {"w2", 0.20},
                                     {"h2", 0.8}},
                                    2, 1.0);
  const EtaCurve curve = tabulate_curve(inst, 0.85, 2.5, 13, 3);
  const MultiplicityResult res = detect_multiplicity(inst, curve, 0.5, 3);
  CHECK(res.mode == MultiplicityMode::psi_jump);
  REQUIRE(res.solutions.size() == 2);
  CHECK(res.r_star == doctest::Approx(0.936).epsilon(2e-2));
  // The two solutions straddle the skipped squared radius.
  const double p0 = res.solutions[0].squaredNorm();
  const double p1 = res.solutions[1].squaredNorm();
  CHECK(std::min(p0, p1) < 0.5);
  CHECK(std::max(p0, p1) > 0.5);
  CHECK(res.residual_max <= 1e-6);
  CHECK(res.penalized_gap <= 1e-6);
}

TEST_CASE("multiplicity targets must lie inside the sampled psi range") {
  const ProblemInstance inst = make("NORM_POWER", {{"q", 1.0}}, 2, 1.0);
  const EtaCurve curve = tabulate_curve(inst, 1.1, 4.0, 9, 3);
  CHECK_THROWS_AS(detect_multiplicity(inst, curve, 0.9, 3), Error);
  CHECK_THROWS_AS(detect_multiplicity(inst, curve, 1e-6, 3), Error);
}
