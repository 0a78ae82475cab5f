#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "spherimax/eta.hpp"
#include "spherimax/solvers.hpp"

using namespace spherimax;

namespace {

ProblemInstance make(const char* name, std::map<std::string, double> params, int n,
                     double rho) {
  return ProblemInstance(zoo_get(name, params, n), n, rho);
}

double eta_closed_form(double r, double rho) {
  return 2.0 * (r - std::sqrt(r * r - rho));
}

}  // namespace

TEST_CASE("eta matches the closed form for the norm functional") {
  const ProblemInstance inst = make("NORM_POWER", {{"q", 1.0}}, 3, 1.0);
  for (double r : {1.05, 1.25, 2.0, 5.0, 40.0}) {
    const EtaSample s = compute_eta(inst, r, 3);
    INFO("r = " << r);
    CHECK(s.eta == doctest::Approx(eta_closed_form(r, 1.0)).epsilon(1e-9));
    // psi(r) = (r - sqrt(r^2 - rho))^2 = (eta/2)^2
    CHECK(s.psi == doctest::Approx(std::pow(s.eta / 2.0, 2)).epsilon(1e-7));
    CHECK(s.radial_manifold);
    CHECK(s.residual <= 1e-10);
  }
  CHECK(compute_eta(inst, 1.25, 3).eta == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(compute_eta(inst, 2.0, 3).eta ==
        doctest::Approx(4.0 - 2.0 * std::sqrt(3.0)).epsilon(1e-10));
}

TEST_CASE("dinkelbach iterates climb monotonically to the ratio optimum") {
  const ProblemInstance inst = make("NORM_POWER", {{"q", 1.0}}, 2, 1.0);
  const EtaSample s = compute_eta(inst, 1.7, 3);
  REQUIRE(s.t_history.size() >= 2);
  for (std::size_t i = 1; i < s.t_history.size(); ++i) {
    CHECK(s.t_history[i] >= s.t_history[i - 1] - 1e-12);
  }
  CHECK(s.t_history.front() == doctest::Approx(1.0 / 1.7));  // origin ratio
  CHECK(s.t_history.back() == doctest::Approx(s.eta));
  CHECK(s.dinkelbach_iters < 100);
}

TEST_CASE("eta respects its upper bound and decays like rho / r") {
  const ProblemInstance inst = make("NORM_POWER", {{"q", 1.0}}, 2, 1.0);
  const double beta = 1.0;
  for (double r : {1.1, 1.5, 3.0, 10.0}) {
    CHECK(compute_eta(inst, r, 3).eta <= 1.0 / (r - beta) + 1e-9);
  }
  CHECK(compute_eta(inst, 1e3, 3).eta < 2.0 / 1e3);
}

TEST_CASE("levels at or below the ball supremum are rejected") {
  const ProblemInstance inst = make("NORM_POWER", {{"q", 1.0}}, 2, 1.0);
  CHECK_THROWS_AS(compute_eta(inst, 0.5, 3), Error);
  try {
    compute_eta(inst, 0.9999, 3);
    FAIL("expected infeasible level");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::infeasible_level);
  }
}

TEST_CASE("the feasibility gate distinguishes the zoo entries") {
  CHECK(check_condition(make("NORM_POWER", {{"q", 1.0}}, 2, 1.0), 3).holds);
  CHECK(check_condition(make("NORM_POWER", {{"q", 1.5}}, 2, 1.0), 3).holds);
  CHECK(check_condition(make("COORD_POWER", {}, 2, 1.0), 3).holds);
  CHECK(check_condition(make("TWO_BUMP", {}, 2, 1.0), 3).holds);
  // QUADRATIC: beta/rho = c = delta exactly, so the strict inequality fails.
  const ConditionResult q = check_condition(make("QUADRATIC", {{"c", 1.0}}, 2, 1.0), 3);
  CHECK(!q.holds);
  CHECK(q.beta == doctest::Approx(1.0));
  const ConditionResult z = check_condition(make("ZERO", {}, 2, 1.0), 3);
  CHECK(!z.holds);
  CHECK(z.beta == doctest::Approx(0.0));
}

TEST_CASE("curve tabulation certifies shape and flags the argmax structure") {
  const ProblemInstance inst = make("NORM_POWER", {{"q", 1.0}}, 2, 1.0);
  const EtaCurve curve = tabulate_curve(inst, 1.1, 4.0, 9, 3);
  REQUIRE(curve.samples.size() == 9);
  CHECK(curve.sample_errors.empty());
  CHECK(curve.violations.empty());
  CHECK(curve.beta == doctest::Approx(1.0));
  CHECK(!curve.delta.is_finite());
  for (std::size_t i = 0; i < curve.samples.size(); ++i) {
    CHECK(!curve.singleton_flags[i]);  // radial: argmax is a whole shell
    if (i) CHECK(curve.samples[i].eta < curve.samples[i - 1].eta);
    if (i) CHECK(curve.samples[i].psi < curve.samples[i - 1].psi);
  }

  // Unique off-axis maximizers: every level is a singleton.
  const EtaCurve nl = tabulate_curve(make("NORM_PLUS_LINEAR", {}, 2, 1.0), 1.2, 3.0, 7, 3);
  CHECK(nl.violations.empty());
  CHECK(std::all_of(nl.singleton_flags.begin(), nl.singleton_flags.end(),
                    [](bool b) { return b; }));
}

TEST_CASE("an empty working interval yields diagnostics, not samples") {
  const ProblemInstance inst = make("ZERO", {}, 2, 1.0);
  const EtaCurve curve = tabulate_curve(inst, 0.5, 2.0, 5, 3);
  CHECK(curve.samples.empty());
  REQUIRE(!curve.violations.empty());
  CHECK(curve.violations.front().find("empty") != std::string::npos);
}

TEST_CASE("curve preconditions reject bad sampling windows") {
  const ProblemInstance inst = make("NORM_POWER", {{"q", 1.0}}, 2, 1.0);
  CHECK_THROWS_AS(tabulate_curve(inst, 1.1, 4.0, 2, 3), Error);   // too few
  CHECK_THROWS_AS(tabulate_curve(inst, 0.5, 4.0, 5, 3), Error);   // r_lo <= beta
  CHECK_THROWS_AS(tabulate_curve(inst, 2.0, 1.5, 5, 3), Error);   // reversed
}

TEST_CASE("eta inversion recovers the level from its value") {
  const ProblemInstance inst = make("NORM_POWER", {{"q", 1.0}}, 2, 1.0);
  const EtaCurve curve = tabulate_curve(inst, 1.1, 4.0, 9, 3);
  const double r_star = 1.7;
  const double target = eta_closed_form(r_star, 1.0);
  // Stops at |eta - target| <= tol_val (1 + |target|); with |eta'| ~ 0.5
  // near r = 1.7 that allows a few times 1e-7 of slack in r.
  CHECK(invert_eta(curve, target) == doctest::Approx(r_star).epsilon(1e-6));

  // Targets outside the strictly interior range are rejected.
  CHECK_THROWS_AS(invert_eta(curve, 10.0), Error);
  CHECK_THROWS_AS(invert_eta(curve, 1e-9), Error);
}

TEST_CASE("eta agrees with the brute-force grid oracle across the zoo") {
  for (const char* name : {"NORM_POWER", "COORD_POWER", "TWO_BUMP"}) {
    const std::map<std::string, double> params =
        std::string(name) == "NORM_POWER" ? std::map<std::string, double>{{"q", 1.0}}
                                          : std::map<std::string, double>{};
    const ProblemInstance inst = make(name, params, 2, 1.0);
    const double beta = max_on_ball(inst, 3).value;
    for (double f : {1.08, 1.6, 2.7}) {
      const double r = beta * f + 0.02;
      INFO(name << " r = " << r);
      CHECK(compute_eta(inst, r, 3).eta ==
            doctest::Approx(grid_oracle_max_ratio(inst, r)).epsilon(5e-3));
    }
  }
}

TEST_CASE("representatives move continuously along a singleton branch") {
  // Halving the level step should roughly halve the largest representative
  // jump; a hidden discontinuity would keep it pinned.
  const ProblemInstance inst = make("NORM_PLUS_LINEAR", {}, 2, 1.0);
  auto max_jump = [&](int count) {
    const EtaCurve c = tabulate_curve(inst, 1.3, 2.2, count, 3);
    REQUIRE(c.samples.size() == static_cast<std::size_t>(count));
    double worst = 0.0;
    for (std::size_t i = 1; i < c.samples.size(); ++i) {
      worst = std::max(worst, (c.samples[i].representative -
                               c.samples[i - 1].representative)
                                  .norm());
    }
    return worst;
  };
  const double coarse = max_jump(9);
  const double fine = max_jump(17);
  CHECK(fine <= 0.6 * coarse + 1e-9);
}

TEST_CASE("point clustering groups by radius and keeps distinct clusters") {
  std::vector<Vector> pts;
  Vector a(2), a2(2), b(2);
  a << 1.0, 0.0;
  a2 << 1.0 + 1e-7, 0.0;
  b << -1.0, 0.0;
  pts = {a, a2, b};
  const FunctionalSpec f = zoo_get("QUADRATIC", {{"c", 1.0}}, 2);
  const auto clusters = cluster_points(pts, 1e-4, f);
  REQUIRE(clusters.size() == 2);
  // Within a cluster the representative carries the largest J value.
  CHECK(clusters[0][0] == doctest::Approx(1.0 + 1e-7));
  // Ties across clusters break toward descending J, here |.|^2 equal, so
  // the reflected point stays second.
  CHECK(clusters[1][0] == doctest::Approx(-1.0));
}
