#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spherimax/eta.hpp"

namespace spherimax {

enum class ClauseStatus { pass, fail, skip };

const char* clause_status_name(ClauseStatus s);

/// One verified assertion: an identifier, the measured quantity, the
/// threshold it was compared against, and any witness points.
struct Clause {
  std::string id;
  ClauseStatus status = ClauseStatus::skip;
  double measured = 0.0;
  double threshold = 0.0;
  std::vector<Vector> witness;
  std::string note;
};

struct VerificationReport {
  std::string instance;
  std::vector<Clause> clauses;
  bool overall = true;  // true iff no clause failed

  void add(Clause c);
};

/// Certify the maximizer chain at one computed level: every argmax
/// representative lies strictly inside the ball, is a spherical maximum of J
/// on its own sphere, satisfies the penalized-value identity
/// |x|^2 - eta J(x) = rho - r eta, and solves the multiplier equation
/// x = (eta/2) J'(x) to residual tolerance. When the feasibility gate
/// beta/rho < delta fails, every clause is reported SKIP: the chain's
/// guarantees are conditional on it.
VerificationReport verify_maximizer_chain(const ProblemInstance& inst,
                                          const EtaSample& sample,
                                          std::uint64_t seed = kDefaultSeed);

/// Same, with the feasibility gate result supplied by the caller (avoids
/// recomputing beta and delta for every sample of a curve).
VerificationReport verify_maximizer_chain(const ProblemInstance& inst,
                                          const EtaSample& sample,
                                          const ConditionResult& cond,
                                          std::uint64_t seed = kDefaultSeed);

/// Re-certify curve-level monotonicity sample by sample: psi nonincreasing
/// (strictly, between adjacent samples that both have singleton argmax),
/// eta below its upper bound rho/(r - beta), and chord convexity of eta.
VerificationReport verify_monotonicity(const EtaCurve& curve);

/// Ordering of penalized argmins: if argmin_a minimizes f + a g and
/// argmin_b minimizes f + b g over the same finite sample with a < b, then
/// g at argmin_b cannot exceed g at argmin_a. The indices are validated
/// against the sampled objectives before the ordering is evaluated.
bool check_argmin_ordering(const std::vector<double>& f_values,
                           const std::vector<double>& g_values, double a, double b,
                           int argmin_a, int argmin_b, double tol = 1e-7);

/// Outcome of the ball-maximum test for the feasibility condition.
struct BallMaxCondition {
  bool applies = false;   // the maximizer satisfies <J'(x), x> < 2 J(x) strictly
  double rho_star = 0.0;  // |x|^2 of the ball maximizer, valid when applies
  double euler_gap = 0.0;        // 2 J(x) - <J'(x), x>
  double omega_prime = 0.0;      // d/dt of J(t x)/|t x|^2 at t = 1 (finite diff)
  Vector maximizer;
  bool condition_checked = false;  // condition re-run at rho_star below
  ConditionResult condition;
};

/// Maximize J over the ball of squared radius s; if the maximizer x
/// satisfies the strict sub-homogeneity inequality <J'(x), x> < 2 J(x),
/// the feasibility gate holds on the smaller ball rho = |x|^2, and this is
/// re-checked numerically. A maximizer with J <= 0 is degenerate and
/// rejected.
BallMaxCondition condition_at_ball_max(const ProblemInstance& inst, double s,
                                       std::uint64_t seed = kDefaultSeed);

struct PhiEntry {
  double lambda = 0.0;
  double phi = 0.0;           // squared norm of the spherical maximizer branch
  double residual_max = 0.0;  // worst fixed-point residual among maxima found
};

/// The multiplier map lambda -> phi(lambda) = psi(eta^{-1}(2 lambda)),
/// tabulated on a uniform lambda grid over half the achieved eta range.
struct PhiMap {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  std::vector<PhiEntry> table;
};

/// Tabulate phi on `points` lambdas (endpoints included, mapped to the curve
/// ends; interior lambdas resolved by inverting eta). Certifies that phi is
/// strictly increasing with range inside ]0, rho[, and measures, for every
/// global maximum of J found on the sphere of squared radius phi(lambda),
/// the residual of the fixed-point equation x = lambda J'(x).
PhiMap build_phi_map(const ProblemInstance& inst, const EtaCurve& curve,
                     int points = 10, std::uint64_t seed = kDefaultSeed);

/// How a multiplicity certificate was obtained.
///   psi_level           a level r* with psi(r*) = rho_tilde was found and the
///                       sphere carries >= 2 distinct global maxima
///   psi_jump            psi jumps across rho_tilde; the argmax set at the
///                       jump level has clusters straddling rho_tilde
///   radial_manifold     the whole sphere is an argmax manifold; a reflection
///                       pair is reported
///   degenerate_critical the unique maximum has a vanishing gradient; no
///                       second point is numerically recoverable
enum class MultiplicityMode { psi_level, psi_jump, radial_manifold, degenerate_critical };

const char* multiplicity_mode_name(MultiplicityMode m);

struct MultiplicityResult {
  double lambda_star = 0.0;
  std::vector<Vector> solutions;
  double r_star = 0.0;
  MultiplicityMode mode = MultiplicityMode::psi_level;
  bool degenerate = false;
  double residual_max = 0.0;
  double penalized_gap = 0.0;  // spread of (1/2)|x|^2 - lambda_star J(x) over solutions
};

class MultiplicityNotFound : public Error {
 public:
  MultiplicityNotFound(const std::string& message, double r_lo, double r_hi)
      : Error(Errc::multiplicity_not_found, message), r_lo_(r_lo), r_hi_(r_hi) {}
  double bracket_lo() const { return r_lo_; }
  double bracket_hi() const { return r_hi_; }

 private:
  double r_lo_;
  double r_hi_;
};

/// Search for two distinct nonzero solutions of x = lambda J'(x) sharing one
/// multiplier, both lying on the sphere of squared radius rho_tilde (or on
/// the argmax clusters straddling it when psi jumps). rho_tilde must lie
/// strictly between the smallest and largest sampled psi values.
MultiplicityResult detect_multiplicity(const ProblemInstance& inst,
                                       const EtaCurve& curve, double rho_tilde,
                                       std::uint64_t seed = kDefaultSeed);

}  // namespace spherimax
