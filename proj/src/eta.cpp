#include "spherimax/eta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "spherimax/detail/format.hpp"
#include "spherimax/detail/parallel.hpp"
#include "spherimax/detail/rng.hpp"

namespace spherimax {
namespace {

constexpr std::uint64_t kStreamDinkelbach = 7;
constexpr std::uint64_t kStreamGamma = 8;
constexpr std::uint64_t kStreamCurve = 9;
constexpr std::uint64_t kStreamInvert = 11;
constexpr std::uint64_t kStreamBeta = 21;
constexpr std::uint64_t kStreamDeltaOp = 22;
constexpr int kDinkelbachCap = 100;

using detail::sig12;

struct GammaResult {
  std::vector<Vector> gamma;
  Vector representative;
  bool radial_manifold = false;
};

// Collapse the near-optimal endpoints of the final subproblem into argmax
// representatives. Radial functionals are clustered on the radial coordinate
// (their argmax sets are whole shells) and each shell is reported as its
// axis-aligned point, which keeps the output deterministic.
GammaResult build_gamma(const ProblemInstance& inst, const MultiStart& ms) {
  const Tolerances& tol = inst.tolerances;
  const FunctionalSpec& f = inst.functional;

  std::vector<Vector> candidates;
  for (const SolveResult& e : ms.endpoints) {
    if (e.value <= ms.best.value + tol.tol_val && e.stationarity <= 100.0 * tol.tol_opt) {
      candidates.push_back(e.point);
    }
  }
  if (candidates.empty()) candidates.push_back(ms.best.point);

  GammaResult out;
  if (f.radial) {
    std::vector<double> shells;
    for (const Vector& c : candidates) {
      const double rad = c.norm();
      bool merged = false;
      for (double s : shells) {
        if (std::abs(rad - s) <= tol.tol_cluster) {
          merged = true;
          break;
        }
      }
      if (!merged) shells.push_back(rad);
    }
    for (double s : shells) {
      Vector rep = Vector::Zero(inst.n);
      rep[0] = s;
      out.gamma.push_back(std::move(rep));
      if (s > tol.tol_cluster) out.radial_manifold = true;
    }
  } else {
    out.gamma = cluster_points(candidates, tol.tol_cluster, f);
  }

  std::sort(out.gamma.begin(), out.gamma.end(), [&](const Vector& a, const Vector& b) {
    const double ja = f.value(a);
    const double jb = f.value(b);
    if (ja != jb) return ja > jb;
    return lex_less(a, b);
  });
  out.representative = out.gamma.front();
  return out;
}

}  // namespace

std::vector<Vector> cluster_points(const std::vector<Vector>& points, double radius,
                                   const FunctionalSpec& f) {
  if (!(radius > 0.0)) throw Error(Errc::precondition, "cluster radius must be > 0");
  std::vector<Vector> reps;
  for (const Vector& p : points) {
    bool merged = false;
    for (Vector& rep : reps) {
      if ((p - rep).norm() <= radius) {
        const double jp = f.value(p);
        const double jr = f.value(rep);
        if (jp > jr || (jp == jr && lex_less(p, rep))) rep = p;
        merged = true;
        break;
      }
    }
    if (!merged) reps.push_back(p);
  }
  std::sort(reps.begin(), reps.end(), [&](const Vector& a, const Vector& b) {
    const double ja = f.value(a);
    const double jb = f.value(b);
    if (ja != jb) return ja > jb;
    return lex_less(a, b);
  });
  return reps;
}

ConditionResult check_condition(const ProblemInstance& inst, std::uint64_t seed) {
  ConditionResult out;
  out.beta = max_on_ball(inst, detail::derive_seed(seed, kStreamBeta, 0)).value;
  out.delta = delta_rho(inst, detail::derive_seed(seed, kStreamDeltaOp, 0));
  if (!out.delta.is_finite()) {
    out.holds = std::isfinite(out.beta);
  } else {
    // Strict inequality, guarded by the value tolerance so constant-ratio
    // functionals (beta/rho equal to delta exactly) resolve to "fails"
    // despite solver-level noise in beta.
    const double slack = inst.tolerances.tol_val * (1.0 + std::abs(out.delta.value()));
    out.holds = out.beta / inst.rho < out.delta.value() - slack;
  }
  return out;
}

EtaSample compute_eta(const ProblemInstance& inst, double r, std::uint64_t seed) {
  if (!std::isfinite(r) || r <= 0.0) {
    throw Error(Errc::precondition, "level r must be positive and finite, got " + sig12(r));
  }
  const double rho = inst.rho;
  const Tolerances& tol = inst.tolerances;
  const double den_floor = 1e-12 * std::max(1.0, r);

  EtaSample out;
  out.r = r;
  double t = rho / r;  // the ratio at the origin, always a feasible start
  out.t_history.push_back(t);
  bool converged = false;
  for (int k = 1; k <= kDinkelbachCap; ++k) {
    const MultiStart ms =
        min_shifted_multistart(inst, t, detail::derive_seed(seed, kStreamDinkelbach, k));
    const Vector& x = ms.best.point;
    const double num = rho - x.squaredNorm();
    const double den = r - inst.functional.value(x);
    if (den <= den_floor) {
      throw Error(Errc::infeasible_level,
                  "level r = " + sig12(r) + " does not exceed the ball supremum of " +
                      inst.functional.name + "; the ratio is unbounded");
    }
    const double t_next = num / den;
    const double F = num - t * den;
    out.dinkelbach_iters = k;
    out.t_history.push_back(t_next);
    // Stop well below the value tolerance (the identity checks downstream
    // compare against tol_val), but never below the floating-point noise
    // floor of F at this scale.
    const double stop = std::max(1e-5 * tol.tol_val * rho, 8e-16 * (rho + std::abs(t) * r));
    const double t_prev = t;
    t = t_next;
    if (std::abs(F) <= stop || std::abs(t_next - t_prev) <= 1e-16 * (1.0 + std::abs(t_next))) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(Errc::solver_failure, "ratio iteration did not converge within " +
                                          std::to_string(kDinkelbachCap) +
                                          " rounds at r = " + sig12(r));
  }

  out.eta = t;
  // One more subproblem at the converged multiplier: its minimizers are the
  // argmax set of the ratio, and they satisfy the stationarity equation for
  // the multiplier eta/2 to polish accuracy.
  const MultiStart ms =
      min_shifted_multistart(inst, out.eta, detail::derive_seed(seed, kStreamGamma, 0));
  GammaResult g = build_gamma(inst, ms);
  out.gamma = std::move(g.gamma);
  out.representative = std::move(g.representative);
  out.radial_manifold = g.radial_manifold;
  out.psi = out.representative.squaredNorm();
  out.residual = fixed_point_residual(inst.functional, out.representative, out.eta / 2.0);
  return out;
}

namespace {

void certify_curve(EtaCurve& c) {
  const std::vector<EtaSample>& s = c.samples;
  const Tolerances& tol = c.instance.tolerances;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double bound = c.rho / (s[k].r - c.beta) + tol.tol_val;
    if (!(s[k].eta <= bound)) {
      c.violations.push_back("eta exceeds the upper bound rho/(r - beta) at r = " +
                             sig12(s[k].r));
    }
  }
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (!(s[k].eta < s[k - 1].eta)) {
      c.violations.push_back("eta is not strictly decreasing between r = " +
                             sig12(s[k - 1].r) + " and r = " + sig12(s[k].r));
    }
    if (s[k].psi > s[k - 1].psi + tol.tol_val * (1.0 + std::abs(s[k - 1].psi))) {
      c.violations.push_back("psi increased between r = " + sig12(s[k - 1].r) +
                             " and r = " + sig12(s[k].r));
    }
    if (c.singleton_flags[k - 1] && c.singleton_flags[k] && !(s[k].psi < s[k - 1].psi)) {
      c.violations.push_back("psi is not strictly decreasing on the singleton pair r = " +
                             sig12(s[k - 1].r) + ", r = " + sig12(s[k].r));
    }
  }
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const double ra = s[k - 1].r, rb = s[k].r, rc = s[k + 1].r;
    const double chord =
        ((rc - rb) * s[k - 1].eta + (rb - ra) * s[k + 1].eta) / (rc - ra);
    if (s[k].eta > chord + tol.tol_val) {
      c.violations.push_back("eta fails the chord convexity test at r = " + sig12(rb));
    }
  }
}

}  // namespace

EtaCurve tabulate_curve_with(const ProblemInstance& inst, double beta,
                             ExtendedReal delta, double r_lo, double r_hi,
                             int count, std::uint64_t seed) {
  EtaCurve curve(inst);
  curve.seed = seed;
  curve.rho = inst.rho;
  curve.beta = beta;
  curve.delta = delta;
  curve.r_lo = r_lo;
  curve.r_hi = r_hi;

  if (delta.is_finite() && !(beta < inst.rho * delta.value())) {
    curve.violations.push_back(
        "working interval ]" + sig12(beta) + ", " + sig12(inst.rho * delta.value()) +
        "[ is empty: the ratio supremum does not exceed beta/rho");
    return curve;
  }
  if (count < 3) throw Error(Errc::precondition, "curve needs at least 3 samples");
  if (!(std::isfinite(r_lo) && r_lo > beta)) {
    throw Error(Errc::precondition,
                "r_lo = " + sig12(r_lo) + " must exceed beta = " + sig12(beta));
  }
  if (!(std::isfinite(r_hi) && r_hi > r_lo)) {
    throw Error(Errc::precondition, "r_hi must exceed r_lo");
  }
  if (delta.is_finite() && !(r_hi < inst.rho * delta.value())) {
    throw Error(Errc::precondition, "r_hi = " + sig12(r_hi) +
                                        " must stay below rho * delta = " +
                                        sig12(inst.rho * delta.value()));
  }

  std::vector<double> rs(count);
  const double q = std::pow(r_hi / r_lo, 1.0 / (count - 1));
  for (int i = 0; i < count; ++i) rs[i] = r_lo * std::pow(q, i);
  rs.front() = r_lo;
  rs.back() = r_hi;

  std::vector<std::optional<EtaSample>> slots(count);
  std::vector<std::optional<SampleError>> errors(count);
  detail::parallel_for(count, [&](int i) {
    try {
      slots[i] = compute_eta(inst, rs[i], detail::derive_seed(seed, kStreamCurve, i));
    } catch (const Error& e) {
      errors[i] = SampleError{i, rs[i], e.what()};
    } catch (const std::exception& e) {
      errors[i] = SampleError{i, rs[i], e.what()};
    }
  });
  for (int i = 0; i < count; ++i) {
    if (slots[i]) {
      curve.singleton_flags.push_back(slots[i]->singleton());
      curve.samples.push_back(std::move(*slots[i]));
    } else {
      curve.sample_errors.push_back(std::move(*errors[i]));
    }
  }
  certify_curve(curve);
  return curve;
}

EtaCurve tabulate_curve(const ProblemInstance& inst, double r_lo, double r_hi,
                        int count, std::uint64_t seed) {
  const ConditionResult cond = check_condition(inst, seed);
  return tabulate_curve_with(inst, cond.beta, cond.delta, r_lo, r_hi, count, seed);
}

double invert_eta(const EtaCurve& curve, double target) {
  if (!std::isfinite(target)) {
    throw Error(Errc::precondition, "inversion target must be finite");
  }
  const std::vector<EtaSample>& s = curve.samples;
  if (s.size() < 2) {
    throw Error(Errc::precondition,
                "curve has fewer than two successful samples, nothing to invert");
  }
  const double eta_hi = s.front().eta;
  const double eta_lo = s.back().eta;
  if (!(target > eta_lo && target < eta_hi)) {
    throw Error(Errc::out_of_range, "target " + sig12(target) +
                                        " is outside the achievable range ]" +
                                        sig12(eta_lo) + ", " + sig12(eta_hi) + "[");
  }
  double lo = s.front().r;
  double hi = s.back().r;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k - 1].eta >= target && target >= s[k].eta) {
      lo = s[k - 1].r;
      hi = s[k].r;
      break;
    }
  }
  const Tolerances& tol = curve.instance.tolerances;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const EtaSample probe =
        compute_eta(curve.instance, mid, detail::derive_seed(curve.seed, kStreamInvert, it));
    if (std::abs(probe.eta - target) <= tol.tol_val * (1.0 + std::abs(target))) return mid;
    if (probe.eta > target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + hi)) break;
  }
  throw Error(Errc::solver_failure,
              "eta inversion stalled before reaching the value tolerance");
}

}  // namespace spherimax
