#pragma once

#include <cstdint>
#include <vector>

#include "spherimax/functionals.hpp"

namespace spherimax {

/// Outcome of a constrained solve.
///   stationarity       norm of the projected gradient (sphere) or of the
///                      natural residual x - P(x - grad) (ball)
///   restarts_agreeing  restarts whose final value matches the best within tol_val
struct SolveResult {
  Vector point;
  double value = 0.0;
  double stationarity = 0.0;
  int restarts_agreeing = 0;
};

/// All restart endpoints of a multi-start solve, plus the selected best.
/// Endpoints are ordered by restart index, so reductions are deterministic.
struct MultiStart {
  SolveResult best;
  std::vector<SolveResult> endpoints;
};

class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& message, SolveResult best)
      : Error(Errc::solver_failure, message), best_(std::move(best)) {}
  const SolveResult& best() const { return best_; }

 private:
  SolveResult best_;
};

/// sup of J over the sphere S_r = { |x|^2 = r }, by projected gradient
/// ascent with Armijo backtracking from `restarts` random sphere starts.
SolveResult max_on_sphere(const ProblemInstance& inst, double r,
                          std::uint64_t seed = kDefaultSeed);
MultiStart max_on_sphere_multistart(const ProblemInstance& inst, double r,
                                    std::uint64_t seed = kDefaultSeed);

/// beta_rho = sup of J over the ball B_rho: interior multi-start ascent
/// combined with the boundary sphere solve.
SolveResult max_on_ball(const ProblemInstance& inst, std::uint64_t seed = kDefaultSeed);

/// delta_rho = sup of J(x)/|x|^2 over the punctured ball. Returns +infinity
/// when the blow-up probe (spheres of squared radius rho*10^-2k, k=1..8)
/// is strictly increasing and clears 1e6; otherwise the finite supremum
/// estimated over a logarithmic radius sweep with golden-section refinement.
ExtendedReal delta_rho(const ProblemInstance& inst, std::uint64_t seed = kDefaultSeed);

/// Global minimum of |x|^2 - t J(x) over B_rho (the penalized functional;
/// this is the Dinkelbach subproblem). Multi-start projected descent over
/// the ball, interior minimizers polished by a Newton step on the gradient.
SolveResult min_shifted(const ProblemInstance& inst, double t,
                        std::uint64_t seed = kDefaultSeed);
MultiStart min_shifted_multistart(const ProblemInstance& inst, double t,
                                  std::uint64_t seed = kDefaultSeed);

/// Brute-force evaluation of sup over B_rho of (rho - |y|^2) / (r - J(y))
/// on a polar/spherical grid with `grid_points` nodes per dimension,
/// refined by golden-section search. Radial functionals reduce to a 1-D
/// grid in t = |y|^2. Supports n <= 3. Independent of the iterative path.
double grid_oracle_max_ratio(const ProblemInstance& inst, double r);

}  // namespace spherimax
