#include "spherimax/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "spherimax/detail/format.hpp"
#include "spherimax/detail/rng.hpp"

namespace spherimax {
namespace {

constexpr std::uint64_t kStreamChain = 31;
constexpr std::uint64_t kStreamBallMax = 32;
constexpr std::uint64_t kStreamPhi = 33;
constexpr std::uint64_t kStreamMult = 35;

using detail::sig12;

// Near-optimal, stationarity-certified endpoints of a multi-start solve.
std::vector<Vector> top_endpoints(const MultiStart& ms, const Tolerances& tol,
                                  bool maximize) {
  std::vector<Vector> out;
  for (const SolveResult& e : ms.endpoints) {
    const double gap = maximize ? ms.best.value - e.value : e.value - ms.best.value;
    if (gap <= tol.tol_val && e.stationarity <= 100.0 * tol.tol_opt) out.push_back(e.point);
  }
  if (out.empty()) out.push_back(ms.best.point);
  return out;
}

}  // namespace

const char* clause_status_name(ClauseStatus s) {
  switch (s) {
    case ClauseStatus::pass: return "PASS";
    case ClauseStatus::fail: return "FAIL";
    case ClauseStatus::skip: return "SKIP";
  }
  return "SKIP";
}

const char* multiplicity_mode_name(MultiplicityMode m) {
  switch (m) {
    case MultiplicityMode::psi_level: return "psi-level";
    case MultiplicityMode::psi_jump: return "psi-jump";
    case MultiplicityMode::radial_manifold: return "radial-manifold";
    case MultiplicityMode::degenerate_critical: return "degenerate-critical";
  }
  return "psi-level";
}

void VerificationReport::add(Clause c) {
  if (c.status == ClauseStatus::fail) overall = false;
  clauses.push_back(std::move(c));
}

VerificationReport verify_maximizer_chain(const ProblemInstance& inst,
                                          const EtaSample& sample,
                                          std::uint64_t seed) {
  const ConditionResult cond =
      check_condition(inst, detail::derive_seed(seed, kStreamChain, 0));
  return verify_maximizer_chain(inst, sample, cond, seed);
}

VerificationReport verify_maximizer_chain(const ProblemInstance& inst,
                                          const EtaSample& sample,
                                          const ConditionResult& cond,
                                          std::uint64_t seed) {
  VerificationReport rep;
  rep.instance = inst.describe();
  const Tolerances& tol = inst.tolerances;
  const FunctionalSpec& f = inst.functional;
  const double rho = inst.rho;

  if (!cond.holds) {
    for (const char* id : {"interior", "sphere-max", "value-identity", "min-bound",
                           "fixed-point"}) {
      Clause c;
      c.id = id;
      c.status = ClauseStatus::skip;
      c.note = "feasibility gate beta/rho < delta fails; the chain's guarantees "
               "are conditional on it";
      rep.add(std::move(c));
    }
    return rep;
  }

  const double target = rho - sample.r * sample.eta;
  {
    Clause c;
    c.id = "min-bound";
    const SolveResult min_at_eta =
        min_shifted(inst, sample.eta, detail::derive_seed(seed, kStreamChain, 1));
    c.measured = std::abs(min_at_eta.value - target);
    c.threshold = tol.tol_val * (1.0 + std::abs(target));
    c.status = c.measured <= c.threshold ? ClauseStatus::pass : ClauseStatus::fail;
    if (c.status == ClauseStatus::fail) c.witness.push_back(min_at_eta.point);
    rep.add(std::move(c));
  }

  for (std::size_t i = 0; i < sample.gamma.size(); ++i) {
    const Vector& x = sample.gamma[i];
    const std::string suffix =
        sample.gamma.size() > 1 ? "[" + std::to_string(i) + "]" : "";
    const double ns = x.squaredNorm();
    {
      Clause c;
      c.id = "interior" + suffix;
      c.measured = ns;
      c.threshold = rho - tol.tol_val;
      c.status = (ns > 0.0 && ns < rho - tol.tol_val) ? ClauseStatus::pass
                                                      : ClauseStatus::fail;
      if (c.status == ClauseStatus::fail) c.witness.push_back(x);
      rep.add(std::move(c));
    }
    {
      Clause c;
      c.id = "sphere-max" + suffix;
      if (ns > 0.0) {
        const double sup =
            max_on_sphere(inst, ns, detail::derive_seed(seed, kStreamChain, 100 + i))
                .value;
        c.measured = sup - f.value(x);
        c.threshold = tol.tol_val;
        c.status = c.measured <= c.threshold ? ClauseStatus::pass : ClauseStatus::fail;
      } else {
        c.status = ClauseStatus::fail;
        c.note = "representative collapsed to the origin; no sphere to maximize on";
      }
      if (c.status == ClauseStatus::fail) c.witness.push_back(x);
      rep.add(std::move(c));
    }
    {
      Clause c;
      c.id = "value-identity" + suffix;
      c.measured = std::abs((ns - sample.eta * f.value(x)) - target);
      c.threshold = tol.tol_val * (1.0 + std::abs(target));
      c.status = c.measured <= c.threshold ? ClauseStatus::pass : ClauseStatus::fail;
      if (c.status == ClauseStatus::fail) c.witness.push_back(x);
      rep.add(std::move(c));
    }
    {
      Clause c;
      c.id = "fixed-point" + suffix;
      c.measured = fixed_point_residual(f, x, sample.eta / 2.0);
      c.threshold = tol.tol_res;
      c.status = c.measured <= c.threshold ? ClauseStatus::pass : ClauseStatus::fail;
      if (c.status == ClauseStatus::fail) c.witness.push_back(x);
      rep.add(std::move(c));
    }
  }
  return rep;
}

VerificationReport verify_monotonicity(const EtaCurve& curve) {
  VerificationReport rep;
  rep.instance = curve.instance.describe();
  const std::vector<EtaSample>& s = curve.samples;
  const Tolerances& tol = curve.instance.tolerances;

  if (s.size() < 2) {
    Clause c;
    c.id = "monotonicity";
    c.status = ClauseStatus::skip;
    c.note = "fewer than two successful samples, nothing to compare";
    rep.add(std::move(c));
    return rep;
  }

  for (std::size_t k = 0; k < s.size(); ++k) {
    Clause c;
    c.id = "eta-upper-bound[" + std::to_string(k) + "]";
    c.measured = s[k].eta;
    c.threshold = curve.rho / (s[k].r - curve.beta) + tol.tol_val;
    c.status = c.measured <= c.threshold ? ClauseStatus::pass : ClauseStatus::fail;
    rep.add(std::move(c));
  }
  for (std::size_t k = 1; k < s.size(); ++k) {
    {
      Clause c;
      c.id = "eta-decreasing[" + std::to_string(k) + "]";
      c.measured = s[k].eta - s[k - 1].eta;  // must be negative
      c.threshold = 0.0;
      c.status = c.measured < 0.0 ? ClauseStatus::pass : ClauseStatus::fail;
      rep.add(std::move(c));
    }
    {
      Clause c;
      c.id = "psi-nonincreasing[" + std::to_string(k) + "]";
      c.measured = s[k].psi - s[k - 1].psi;
      c.threshold = tol.tol_val * (1.0 + std::abs(s[k - 1].psi));
      c.status = c.measured <= c.threshold ? ClauseStatus::pass : ClauseStatus::fail;
      rep.add(std::move(c));
    }
    if (curve.singleton_flags[k - 1] && curve.singleton_flags[k]) {
      Clause c;
      c.id = "psi-strict[" + std::to_string(k) + "]";
      c.measured = s[k - 1].psi - s[k].psi;  // must exceed the margin
      c.threshold = tol.tol_val;
      c.status = c.measured > c.threshold ? ClauseStatus::pass : ClauseStatus::fail;
      if (c.status == ClauseStatus::fail) {
        c.note = "psi fails strict decrease on a singleton pair";
      }
      rep.add(std::move(c));
    }
  }
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    Clause c;
    c.id = "eta-chord-convexity[" + std::to_string(k) + "]";
    const double ra = s[k - 1].r, rb = s[k].r, rc = s[k + 1].r;
    const double chord =
        ((rc - rb) * s[k - 1].eta + (rb - ra) * s[k + 1].eta) / (rc - ra);
    c.measured = s[k].eta - chord;
    c.threshold = tol.tol_val;
    c.status = c.measured <= c.threshold ? ClauseStatus::pass : ClauseStatus::fail;
    rep.add(std::move(c));
  }
  return rep;
}

bool check_argmin_ordering(const std::vector<double>& f_values,
                           const std::vector<double>& g_values, double a, double b,
                           int argmin_a, int argmin_b, double tol) {
  if (f_values.empty() || f_values.size() != g_values.size()) {
    throw Error(Errc::precondition, "f and g samples must be nonempty and equally sized");
  }
  if (!(a < b)) throw Error(Errc::precondition, "weights must satisfy a < b");
  const int n = static_cast<int>(f_values.size());
  if (argmin_a < 0 || argmin_a >= n || argmin_b < 0 || argmin_b >= n) {
    throw Error(Errc::precondition, "argmin index out of range");
  }
  const auto validate = [&](double w, int idx, const char* which) {
    const double claimed = f_values[idx] + w * g_values[idx];
    double vmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) vmin = std::min(vmin, f_values[i] + w * g_values[i]);
    if (claimed > vmin + 1e-12 * (1.0 + std::abs(vmin))) {
      throw Error(Errc::invalid_certificate,
                  std::string(which) + " does not minimize its sampled objective");
    }
  };
  validate(a, argmin_a, "argmin_a");
  validate(b, argmin_b, "argmin_b");
  return g_values[argmin_b] <= g_values[argmin_a] + tol;
}

BallMaxCondition condition_at_ball_max(const ProblemInstance& inst, double s,
                                       std::uint64_t seed) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw Error(Errc::precondition, "ball parameter s must be positive and finite");
  }
  const ProblemInstance ball(inst.functional, inst.n, s, inst.tolerances);
  const SolveResult best = max_on_ball(ball, detail::derive_seed(seed, kStreamBallMax, 0));
  const double jmax = best.value;
  const double ns = best.point.squaredNorm();
  if (!(jmax > 0.0) || !(ns > 0.0)) {
    throw Error(Errc::degenerate_maximum,
                "the ball maximum of " + inst.functional.name +
                    " offers no maximizer with positive value away from the origin");
  }

  BallMaxCondition out;
  out.maximizer = best.point;
  const Vector g = gradient_at(inst.functional, best.point);
  out.euler_gap = 2.0 * jmax - g.dot(best.point);
  const double h = 1e-5;
  const auto omega = [&](double t) {
    return inst.functional.value(t * best.point) / (t * t * ns);
  };
  out.omega_prime = (omega(1.0 + h) - omega(1.0 - h)) / (2.0 * h);
  out.applies = out.euler_gap > inst.tolerances.tol_val;
  if (out.applies) {
    out.rho_star = ns;
    const ProblemInstance shrunk(inst.functional, inst.n, out.rho_star, inst.tolerances);
    out.condition = check_condition(shrunk, detail::derive_seed(seed, kStreamBallMax, 1));
    out.condition_checked = true;
  }
  return out;
}

PhiMap build_phi_map(const ProblemInstance& inst, const EtaCurve& curve, int points,
                     std::uint64_t seed) {
  const std::vector<EtaSample>& s = curve.samples;
  if (points < 2) throw Error(Errc::precondition, "phi map needs at least 2 grid points");
  if (s.size() < 3) {
    throw Error(Errc::precondition,
                "phi map needs a curve with at least 3 successful samples");
  }
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (!(s[k].eta < s[k - 1].eta)) {
      throw Error(Errc::precondition,
                  "curve is not strictly decreasing; eta cannot be inverted");
    }
  }

  const Tolerances& tol = inst.tolerances;
  PhiMap map;
  map.lambda_lo = 0.5 * s.back().eta;
  map.lambda_hi = 0.5 * s.front().eta;

  for (int i = 0; i < points; ++i) {
    PhiEntry entry;
    entry.lambda =
        map.lambda_lo + (map.lambda_hi - map.lambda_lo) * i / (points - 1.0);
    if (i == 0) {
      entry.phi = s.back().psi;  // 2 lambda equals eta at the curve's right end
    } else if (i == points - 1) {
      entry.phi = s.front().psi;
    } else {
      const double r_star = invert_eta(curve, 2.0 * entry.lambda);
      entry.phi =
          compute_eta(inst, r_star, detail::derive_seed(seed, kStreamPhi, i)).psi;
    }
    // Certify the multiplier equation at every global maximum found on the
    // sphere of squared radius phi(lambda).
    const MultiStart ms = max_on_sphere_multistart(
        inst, entry.phi, detail::derive_seed(seed, kStreamPhi, 1000 + i));
    const std::vector<Vector> reps =
        cluster_points(top_endpoints(ms, tol, /*maximize=*/true), tol.tol_cluster,
                       inst.functional);
    for (const Vector& x : reps) {
      entry.residual_max = std::max(
          entry.residual_max, fixed_point_residual(inst.functional, x, entry.lambda));
    }
    map.table.push_back(entry);
  }

  for (std::size_t k = 0; k < map.table.size(); ++k) {
    const PhiEntry& e = map.table[k];
    if (!(e.phi > 0.0 && e.phi < inst.rho)) {
      throw Error(Errc::invalid_certificate,
                  "phi leaves the open interval ]0, rho[ at lambda = " + sig12(e.lambda));
    }
    if (k > 0 && !(e.phi > map.table[k - 1].phi)) {
      throw Error(Errc::invalid_certificate,
                  "phi is not strictly increasing at lambda = " + sig12(e.lambda));
    }
  }
  return map;
}

namespace {

// Certify shared-multiplier solutions: residuals at lambda_star and the
// spread of the penalized values (1/2)|x|^2 - lambda J(x).
void certify_solutions(const ProblemInstance& inst, MultiplicityResult& out) {
  const Tolerances& tol = inst.tolerances;
  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -std::numeric_limits<double>::infinity();
  for (const Vector& x : out.solutions) {
    out.residual_max = std::max(
        out.residual_max, fixed_point_residual(inst.functional, x, out.lambda_star));
    const double v = 0.5 * x.squaredNorm() - out.lambda_star * inst.functional.value(x);
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  out.penalized_gap = vmax - vmin;
  if (out.residual_max > tol.tol_res) {
    throw MultiplicityNotFound(
        "candidate solutions violate the fixed-point residual tolerance (worst " +
            sig12(out.residual_max) + ")",
        out.r_star, out.r_star);
  }
  if (out.penalized_gap > tol.tol_val) {
    throw MultiplicityNotFound(
        "candidate solutions do not share the penalized value (gap " +
            sig12(out.penalized_gap) + ")",
        out.r_star, out.r_star);
  }
}

}  // namespace

MultiplicityResult detect_multiplicity(const ProblemInstance& inst,
                                       const EtaCurve& curve, double rho_tilde,
                                       std::uint64_t seed) {
  const std::vector<EtaSample>& s = curve.samples;
  if (s.size() < 2) {
    throw Error(Errc::precondition, "curve must carry at least two successful samples");
  }
  double psi_min = std::numeric_limits<double>::infinity();
  double psi_max = -std::numeric_limits<double>::infinity();
  for (const EtaSample& e : s) {
    psi_min = std::min(psi_min, e.psi);
    psi_max = std::max(psi_max, e.psi);
  }
  if (!(rho_tilde > psi_min && rho_tilde < psi_max)) {
    throw Error(Errc::precondition,
                "rho_tilde = " + sig12(rho_tilde) +
                    " must lie strictly between the sampled psi extremes ]" +
                    sig12(psi_min) + ", " + sig12(psi_max) + "[");
  }
  const Tolerances& tol = inst.tolerances;

  // A sampled level may already attain the target psi.
  std::optional<EtaSample> hit;
  for (const EtaSample& e : s) {
    if (std::abs(e.psi - rho_tilde) <= tol.tol_val) {
      hit = e;
      break;
    }
  }

  // psi decreases along r: bracket the target between adjacent samples,
  // then bisect in r.
  double lo = s.front().r;
  double hi = s.back().r;
  if (!hit) {
    for (std::size_t k = 1; k < s.size(); ++k) {
      if (s[k - 1].psi >= rho_tilde && rho_tilde >= s[k].psi) {
        lo = s[k - 1].r;
        hi = s[k].r;
        break;
      }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-8; ++it) {
      const double mid = 0.5 * (lo + hi);
      const EtaSample probe =
          compute_eta(inst, mid, detail::derive_seed(seed, kStreamMult, it));
      if (std::abs(probe.psi - rho_tilde) <= tol.tol_val) {
        hit = probe;
        break;
      }
      if (probe.psi > rho_tilde) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }

  if (hit) {
    const EtaSample& at = *hit;
    MultiplicityResult out;
    out.lambda_star = at.eta / 2.0;
    out.r_star = at.r;
    if (inst.functional.radial || at.radial_manifold) {
      // The whole sphere is an argmax manifold; report a reflection pair,
      // which are genuine distinct solutions sharing the multiplier.
      Vector p = Vector::Zero(inst.n);
      p[0] = std::sqrt(rho_tilde);
      out.mode = MultiplicityMode::radial_manifold;
      out.degenerate = true;
      out.solutions = {p, -p};
    } else {
      const MultiStart ms = max_on_sphere_multistart(
          inst, rho_tilde, detail::derive_seed(seed, kStreamMult, 500));
      std::vector<Vector> reps = cluster_points(
          top_endpoints(ms, tol, /*maximize=*/true), tol.tol_cluster, inst.functional);
      const double j_best = inst.functional.value(reps.front());
      reps.erase(std::remove_if(reps.begin(), reps.end(),
                                [&](const Vector& x) {
                                  return inst.functional.value(x) < j_best - tol.tol_val;
                                }),
                 reps.end());
      if (reps.size() >= 2) {
        out.mode = MultiplicityMode::psi_level;
        out.solutions = {reps[0], reps[1]};
      } else {
        const Vector& x = reps.front();
        if (gradient_at(inst.functional, x).norm() <= tol.tol_res) {
          out.mode = MultiplicityMode::degenerate_critical;
          out.degenerate = true;
          out.solutions = {x};
        } else {
          throw MultiplicityNotFound(
              "the sphere at rho_tilde carries a unique global maximum with "
              "nonvanishing gradient; no second solution is numerically recoverable",
              at.r, at.r);
        }
      }
    }
    certify_solutions(inst, out);
    return out;
  }

  // psi skips the target: a jump. Work at the refined bracket midpoint and
  // demand argmax clusters straddling rho_tilde.
  const double r_star = 0.5 * (lo + hi);
  const EtaSample at = compute_eta(inst, r_star, detail::derive_seed(seed, kStreamMult, 901));
  if (at.gamma.size() >= 2) {
    const Vector* above = nullptr;
    const Vector* below = nullptr;
    for (const Vector& rep : at.gamma) {
      const double p = rep.squaredNorm();
      if (p >= rho_tilde - tol.tol_val && (!above || p < above->squaredNorm())) above = &rep;
      if (p <= rho_tilde + tol.tol_val && (!below || p > below->squaredNorm())) below = &rep;
    }
    if (above && below && above != below) {
      MultiplicityResult out;
      out.lambda_star = at.eta / 2.0;
      out.r_star = r_star;
      out.mode = MultiplicityMode::psi_jump;
      out.solutions = {*above, *below};
      out.degenerate = at.radial_manifold;
      certify_solutions(inst, out);
      return out;
    }
  }
  throw MultiplicityNotFound(
      "psi skips rho_tilde = " + sig12(rho_tilde) +
          " across the refined bracket, but the argmax set at the jump level does "
          "not straddle it",
      lo, hi);
}

}  // namespace spherimax
