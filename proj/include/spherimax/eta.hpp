#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spherimax/solvers.hpp"

namespace spherimax {

/// One evaluated level of the curve: the ratio supremum
///   eta(r) = sup over the ball of (rho - |y|^2) / (r - J(y)),
/// its argmax set, and the derived quantities reported downstream.
struct EtaSample {
  double r = 0.0;
  double eta = 0.0;
  /// Cluster representatives of the argmax set, ordered by descending J
  /// value then lexicographically. A radially degenerate argmax shell is
  /// collapsed to one axis-aligned representative per shell.
  std::vector<Vector> gamma;
  /// Canonical representative v_r: largest J value, ties broken
  /// lexicographically.
  Vector representative;
  /// psi(r) = |v_r|^2.
  double psi = 0.0;
  int dinkelbach_iters = 0;
  /// Multiplier fixed-point residual |v - (eta/2) J'(v)| / (1 + |v|).
  double residual = 0.0;
  /// True when the argmax set is a whole sphere shell (radial functional
  /// with a non-origin argmax), so gamma understates the real set.
  bool radial_manifold = false;
  /// Dinkelbach iterates t_0, t_1, ..., ending at eta.
  std::vector<double> t_history;

  /// Membership proxy for the set of levels with a unique maximizer.
  bool singleton() const { return gamma.size() == 1 && !radial_manifold; }
};

struct ConditionResult {
  bool holds = false;
  double beta = 0.0;          // sup of J over the closed ball
  ExtendedReal delta;         // sup of J(x)/|x|^2 over the punctured ball
};

struct SampleError {
  int index = 0;
  double r = 0.0;
  std::string message;
};

/// Tabulated eta curve over a subinterval of the working interval
/// ]beta, rho*delta[, with certification notes for the monotonicity,
/// convexity, and upper-bound properties the curve must satisfy.
struct EtaCurve {
  explicit EtaCurve(ProblemInstance inst) : instance(std::move(inst)) {}

  ProblemInstance instance;
  std::uint64_t seed = kDefaultSeed;
  double rho = 0.0;
  double beta = 0.0;
  ExtendedReal delta;
  double r_lo = 0.0;
  double r_hi = 0.0;
  std::vector<EtaSample> samples;       // strictly increasing r, failures omitted
  std::vector<bool> singleton_flags;    // parallel to samples
  std::vector<SampleError> sample_errors;
  std::vector<std::string> violations;  // certification failures, empty when clean
};

/// Feasibility gate: beta/rho < delta, trivially true for finite beta when
/// delta is unbounded.
ConditionResult check_condition(const ProblemInstance& inst,
                                std::uint64_t seed = kDefaultSeed);

/// Evaluate eta(r) by Dinkelbach iteration on the equivalent root problem
/// F(t) = max over the ball of (rho - |y|^2) - t (r - J(y)), whose unique
/// zero is eta(r). Each inner problem is min_shifted at the current t.
/// The level must exceed the ball supremum of J; this is certified by the
/// denominator guard rather than assumed.
EtaSample compute_eta(const ProblemInstance& inst, double r,
                      std::uint64_t seed = kDefaultSeed);

/// Sample the curve at `count` geometrically spaced levels in [r_lo, r_hi].
/// Per-level failures are recorded in sample_errors and leave a gap rather
/// than aborting the sweep. An empty working interval yields an empty curve
/// with a diagnostic violation instead of an error.
EtaCurve tabulate_curve(const ProblemInstance& inst, double r_lo, double r_hi,
                        int count, std::uint64_t seed = kDefaultSeed);

/// Same, with beta and delta supplied by a caller that already computed them.
EtaCurve tabulate_curve_with(const ProblemInstance& inst, double beta,
                             ExtendedReal delta, double r_lo, double r_hi,
                             int count, std::uint64_t seed = kDefaultSeed);

/// Solve eta(r*) = target by bisection over the sampled range, re-evaluating
/// compute_eta at each probe (no interpolation). Valid because eta is
/// strictly decreasing; the target must lie strictly inside the sampled
/// eta range.
double invert_eta(const EtaCurve& curve, double target);

/// Greedy clustering of near-optimal points with the given radius; returns
/// one representative per cluster (largest J value, ties lexicographically
/// smallest), ordered by descending J then lexicographically.
std::vector<Vector> cluster_points(const std::vector<Vector>& points,
                                   double radius, const FunctionalSpec& f);

}  // namespace spherimax
