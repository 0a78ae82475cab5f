#include "spherimax/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "spherimax/detail/parallel.hpp"
#include "spherimax/detail/rng.hpp"

namespace spherimax {
namespace {

constexpr int kMaxIterations = 10000;
constexpr double kArmijo = 1e-4;
constexpr double kStepFloor = 1e-18;
constexpr double kStepCeil = 1e6;

// Seed streams, one per solver family, so different operations sharing a
// user seed do not correlate.
constexpr std::uint64_t kStreamSphere = 1;
constexpr std::uint64_t kStreamBall = 2;
constexpr std::uint64_t kStreamShifted = 3;
constexpr std::uint64_t kStreamDelta = 4;

Vector clip_to_ball(const Vector& y, double rho) {
  const double ns = y.squaredNorm();
  if (ns <= rho) return y;
  return y * std::sqrt(rho / ns);
}

struct RestartOutcome {
  Vector x;
  double value = 0.0;  // objective at x: J for max problems, the penalized g for min
  double stationarity = 0.0;
  bool converged = false;
};

// Projected gradient ascent for J on the sphere |x|^2 = r. The tangential
// gradient doubles as the stationarity measure; steps retract through
// project_to_sphere and adapt a warm Armijo step size.
RestartOutcome sphere_ascent(const FunctionalSpec& f, double r, Vector x,
                             double tol_opt) {
  RestartOutcome out;
  double fx = f.value(x);
  double alpha = 1.0;
  double stat = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const Vector g = gradient_at(f, x);
    const Vector pg = g - (g.dot(x) / r) * x;
    stat = pg.norm();
    if (stat <= tol_opt) {
      converged = true;
      break;
    }
    bool accepted = false;
    while (alpha >= kStepFloor) {
      const Vector cand = project_to_sphere(x + alpha * pg, r);
      const double fc = f.value(cand);
      if (fc >= fx + kArmijo * alpha * stat * stat) {
        x = cand;
        fx = fc;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // value differences fell below rounding noise
    alpha = std::min(alpha * 2.0, kStepCeil);
  }
  // The sufficient-increase test dies near sqrt(machine eps) of J's scale;
  // the projected gradient itself stays measurable much further down, so
  // finish by shrinking it directly (strict decrease, hence terminating).
  if (!converged) {
    double a = 1.0;
    for (int it = 0; it < 200 && stat > tol_opt; ++it) {
      const Vector g = gradient_at(f, x);
      const Vector pg = g - (g.dot(x) / r) * x;
      stat = pg.norm();
      if (stat <= tol_opt) break;
      bool moved = false;
      while (a >= 1e-12) {
        const Vector cand = project_to_sphere(x + a * pg, r);
        const Vector gc = gradient_at(f, cand);
        const Vector pgc = gc - (gc.dot(cand) / r) * cand;
        if (pgc.norm() <= stat * (1.0 - 1e-6)) {
          x = cand;
          moved = true;
          break;
        }
        a *= 0.5;
      }
      if (!moved) break;
      a = std::min(a * 4.0, 1.0);
    }
    converged = stat <= tol_opt;
    fx = f.value(x);
  }
  out.x = std::move(x);
  out.value = fx;
  out.stationarity = stat;
  out.converged = converged;
  return out;
}

// Projected gradient descent over the ball |x|^2 <= rho for a generic
// objective. Stationarity is the natural residual |x - P(x - grad)|.
RestartOutcome ball_descent(const std::function<double(const Vector&)>& val,
                            const std::function<Vector(const Vector&)>& grad,
                            double rho, Vector x, double tol_opt) {
  RestartOutcome out;
  double fx = val(x);
  double alpha = 1.0;
  double stat = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const Vector g = grad(x);
    stat = (x - clip_to_ball(x - g, rho)).norm();
    if (stat <= tol_opt) {
      converged = true;
      break;
    }
    bool accepted = false;
    while (alpha >= kStepFloor) {
      const Vector cand = clip_to_ball(x - alpha * g, rho);
      const double dn2 = (x - cand).squaredNorm();
      if (dn2 > 0.0) {
        const double fc = val(cand);
        if (fc <= fx - (kArmijo / alpha) * dn2) {
          x = cand;
          fx = fc;
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    alpha = std::min(alpha * 2.0, kStepCeil);
  }
  // Same rescue as on the sphere: once value comparisons drown in rounding,
  // drive the natural residual down directly.
  if (!converged) {
    double a = 1.0;
    for (int it = 0; it < 200 && stat > tol_opt; ++it) {
      const Vector g = grad(x);
      stat = (x - clip_to_ball(x - g, rho)).norm();
      if (stat <= tol_opt) break;
      bool moved = false;
      while (a >= 1e-12) {
        const Vector cand = clip_to_ball(x - a * g, rho);
        const Vector gc = grad(cand);
        const double sc = (cand - clip_to_ball(cand - gc, rho)).norm();
        if (sc <= stat * (1.0 - 1e-6)) {
          x = cand;
          moved = true;
          break;
        }
        a *= 0.5;
      }
      if (!moved) break;
      a = std::min(a * 4.0, 1.0);
    }
    converged = stat <= tol_opt;
    fx = val(x);
  }
  out.x = std::move(x);
  out.value = fx;
  out.stationarity = stat;
  out.converged = converged;
  return out;
}

// Newton refinement of an interior stationary point: damped steps on the
// gradient with a finite-difference Hessian, pseudo-inverted so radially
// degenerate minimizer manifolds (rank-deficient Hessians) stay solvable.
// Falls back silently; the projected-gradient answer is already within
// tolerance, polishing just tightens it toward machine precision.
void polish_interior(const std::function<Vector(const Vector&)>& grad,
                     double rho, Vector& x) {
  const int n = static_cast<int>(x.size());
  const double scale = 1.0 + std::sqrt(rho);
  for (int it = 0; it < 8; ++it) {
    const Vector g = grad(x);
    const double gn = g.norm();
    if (!std::isfinite(gn) || gn <= 1e-15 * scale) break;
    const double h = 6e-6 * (1.0 + x.norm());
    Eigen::MatrixXd H(n, n);
    for (int j = 0; j < n; ++j) {
      Vector e = Vector::Zero(n);
      e[j] = h;
      H.col(j) = (grad(x + e) - grad(x - e)) / (2.0 * h);
    }
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-8);
    const Vector d = -svd.solve(g);
    if (!d.allFinite() || d.norm() > 0.25 * scale) break;
    const Vector xn = x + d;
    if (xn.squaredNorm() >= rho * (1.0 - 1e-12)) break;  // left the interior
    const double gn_new = grad(xn).norm();
    if (std::isfinite(gn_new) && gn_new < gn) {
      x = xn;
    } else {
      break;
    }
  }
}

// Deterministic reduction over restart endpoints. better(a, b) returns true
// when a should replace b; exact value ties fall back to lexicographic order
// so the winner never depends on thread scheduling.
const RestartOutcome* select_best(const std::vector<RestartOutcome>& outcomes,
                                  bool maximize) {
  const RestartOutcome* best = nullptr;
  for (const auto& o : outcomes) {
    if (!best) {
      best = &o;
      continue;
    }
    const bool improves = maximize ? o.value > best->value : o.value < best->value;
    const bool ties = o.value == best->value;
    if (improves || (ties && lex_less(o.x, best->x))) best = &o;
  }
  return best;
}

MultiStart finish_multistart(std::vector<RestartOutcome> outcomes, bool maximize,
                             double tol_val, const char* what) {
  const RestartOutcome* best_any = select_best(outcomes, maximize);
  bool any_converged = false;
  for (const auto& o : outcomes) any_converged = any_converged || o.converged;

  MultiStart ms;
  ms.endpoints.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    SolveResult sr;
    sr.point = o.x;
    sr.value = o.value;
    sr.stationarity = o.stationarity;
    sr.restarts_agreeing = 0;
    ms.endpoints.push_back(std::move(sr));
  }

  SolveResult best;
  best.point = best_any->x;
  best.value = best_any->value;
  best.stationarity = best_any->stationarity;
  int agreeing = 0;
  for (const auto& o : outcomes) {
    const double gap = maximize ? best.value - o.value : o.value - best.value;
    if (gap <= tol_val) ++agreeing;
  }
  best.restarts_agreeing = agreeing;
  ms.best = std::move(best);

  if (!any_converged) {
    std::ostringstream msg;
    msg << what << ": no restart reached the stationarity tolerance within "
        << kMaxIterations << " iterations";
    throw SolverFailure(msg.str(), ms.best);
  }
  if (!best_any->converged) {
    // The best value was found by a run that never certified stationarity;
    // prefer the best converged endpoint unless it is materially worse.
    const RestartOutcome* best_conv = nullptr;
    for (const auto& o : outcomes) {
      if (!o.converged) continue;
      if (!best_conv || (maximize ? o.value > best_conv->value : o.value < best_conv->value) ||
          (o.value == best_conv->value && lex_less(o.x, best_conv->x))) {
        best_conv = &o;
      }
    }
    const double gap = maximize ? best_any->value - best_conv->value
                                : best_conv->value - best_any->value;
    if (gap > tol_val) {
      std::ostringstream msg;
      msg << what << ": best objective value came from a non-convergent restart "
          << "(gap " << gap << " above the value tolerance)";
      throw SolverFailure(msg.str(), ms.best);
    }
    ms.best.point = best_conv->x;
    ms.best.value = best_conv->value;
    ms.best.stationarity = best_conv->stationarity;
  }
  return ms;
}

void require_level(double r, const char* what) {
  if (!std::isfinite(r) || r <= 0.0) {
    std::ostringstream msg;
    msg << what << ": level must be positive and finite, got " << r;
    throw Error(Errc::precondition, msg.str());
  }
}

}  // namespace

MultiStart max_on_sphere_multistart(const ProblemInstance& inst, double r,
                                    std::uint64_t seed) {
  require_level(r, "max_on_sphere");
  const int restarts = inst.tolerances.restarts;
  std::vector<RestartOutcome> outcomes(restarts);
  detail::parallel_for(restarts, [&](int i) {
    auto eng = detail::make_engine(detail::derive_seed(seed, kStreamSphere, i));
    const Vector x0 = detail::random_sphere_point(eng, inst.n, r);
    outcomes[i] = sphere_ascent(inst.functional, r, x0, inst.tolerances.tol_opt);
  });
  return finish_multistart(std::move(outcomes), /*maximize=*/true,
                           inst.tolerances.tol_val, "max_on_sphere");
}

SolveResult max_on_sphere(const ProblemInstance& inst, double r, std::uint64_t seed) {
  return max_on_sphere_multistart(inst, r, seed).best;
}

SolveResult max_on_ball(const ProblemInstance& inst, std::uint64_t seed) {
  const FunctionalSpec& f = inst.functional;
  const double rho = inst.rho;
  const auto val = [&](const Vector& y) { return -f.value(y); };
  const auto grad = [&](const Vector& y) -> Vector {
    if (!f.smooth_at_origin && y.squaredNorm() < 1e-28) return Vector::Zero(y.size());
    return Vector(-gradient_at(f, y));
  };

  const int restarts = inst.tolerances.restarts;
  std::vector<RestartOutcome> outcomes(restarts + 1);
  detail::parallel_for(restarts, [&](int i) {
    auto eng = detail::make_engine(detail::derive_seed(seed, kStreamBall, i));
    const Vector x0 = detail::random_ball_point(eng, inst.n, rho);
    outcomes[i] = ball_descent(val, grad, rho, x0, inst.tolerances.tol_opt);
  });
  {
    // The origin is always feasible and J(0) = 0; keeping it as an explicit
    // candidate makes the zero functional resolve to an exact point.
    RestartOutcome origin;
    origin.x = inst.origin();
    origin.value = 0.0;
    origin.stationarity = (origin.x - clip_to_ball(origin.x - grad(origin.x), rho)).norm();
    origin.converged = origin.stationarity <= inst.tolerances.tol_opt;
    outcomes[restarts] = std::move(origin);
  }
  // Ball descents minimized -J; flip values so the reduction maximizes J.
  for (auto& o : outcomes) o.value = -o.value;

  MultiStart interior = finish_multistart(std::move(outcomes), /*maximize=*/true,
                                          inst.tolerances.tol_val, "max_on_ball");
  SolveResult boundary = max_on_sphere(inst, rho, detail::derive_seed(seed, kStreamBall, 977));

  SolveResult best = interior.best;
  // Express the boundary candidate's stationarity in ball terms before
  // comparing: on the boundary the outward gradient component is feasible.
  {
    const Vector g = gradient_at(inst.functional, boundary.point);
    boundary.stationarity =
        (boundary.point - clip_to_ball(boundary.point + g, rho)).norm();
  }
  if (boundary.value > best.value ||
      (boundary.value == best.value && lex_less(boundary.point, best.point))) {
    boundary.restarts_agreeing = best.restarts_agreeing;
    best = boundary;
  }
  return best;
}

MultiStart min_shifted_multistart(const ProblemInstance& inst, double t,
                                  std::uint64_t seed) {
  if (!std::isfinite(t) || t < 0.0) {
    std::ostringstream msg;
    msg << "min_shifted: penalty weight must be finite and nonnegative, got " << t;
    throw Error(Errc::precondition, msg.str());
  }
  const FunctionalSpec& f = inst.functional;
  const double rho = inst.rho;
  const auto val = [&](const Vector& y) {
    return y.squaredNorm() - (t == 0.0 ? 0.0 : t * f.value(y));
  };
  const auto grad = [&](const Vector& y) -> Vector {
    Vector g = 2.0 * y;
    if (t != 0.0 && !(!f.smooth_at_origin && y.squaredNorm() < 1e-28)) {
      g -= t * gradient_at(f, y);
    }
    return g;
  };

  const int restarts = inst.tolerances.restarts;
  std::vector<RestartOutcome> outcomes(restarts + 1);
  detail::parallel_for(restarts, [&](int i) {
    auto eng = detail::make_engine(detail::derive_seed(seed, kStreamShifted, i));
    const Vector x0 = detail::random_ball_point(eng, inst.n, rho);
    RestartOutcome o = ball_descent(val, grad, rho, x0, inst.tolerances.tol_opt);
    if (o.converged && o.x.squaredNorm() < rho * (1.0 - 1e-10)) {
      polish_interior(grad, rho, o.x);
      o.value = val(o.x);
      o.stationarity = (o.x - clip_to_ball(o.x - grad(o.x), rho)).norm();
    }
    outcomes[i] = std::move(o);
  });
  {
    RestartOutcome origin;
    origin.x = inst.origin();
    origin.value = 0.0;
    origin.stationarity = (origin.x - clip_to_ball(origin.x - grad(origin.x), rho)).norm();
    origin.converged = origin.stationarity <= inst.tolerances.tol_opt;
    outcomes[restarts] = std::move(origin);
  }
  return finish_multistart(std::move(outcomes), /*maximize=*/false,
                           inst.tolerances.tol_val, "min_shifted");
}

SolveResult min_shifted(const ProblemInstance& inst, double t, std::uint64_t seed) {
  return min_shifted_multistart(inst, t, seed).best;
}

namespace {

// Argmax of a scalar function on [a, b] by golden-section search; assumes the
// caller bracketed a local maximum. Returns the midpoint of the final interval.
double golden_max(const std::function<double(double)>& fn, double a, double b) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  for (int i = 0; i < 90; ++i) {
    if (b - a <= 1e-14 * (1.0 + std::abs(a) + std::abs(b))) break;
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = fn(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = fn(c);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

ExtendedReal delta_rho(const ProblemInstance& inst, std::uint64_t seed) {
  const FunctionalSpec& f = inst.functional;
  const double rho = inst.rho;
  constexpr double kDivergence = 1e6;

  // sup of J over the sphere of squared radius s.
  const auto sphere_sup = [&](double s, std::uint64_t tag) {
    if (f.radial) return radial_profile(f, s);
    return max_on_sphere(inst, s, detail::derive_seed(seed, kStreamDelta, tag)).value;
  };

  // Blow-up probe: the ratio sup J / s on shrinking spheres. A strictly
  // increasing run that clears the divergence threshold is classified as
  // an unbounded ratio.
  std::vector<double> probe(8);
  for (int k = 1; k <= 8; ++k) {
    const double s = rho * std::pow(10.0, -2.0 * k);
    probe[k - 1] = sphere_sup(s, 1000 + k) / s;
  }
  bool increasing = true;
  for (int k = 1; k < 8; ++k) increasing = increasing && probe[k] > probe[k - 1];
  if (increasing && probe.back() > kDivergence) return ExtendedReal::infinity();

  double best = 0.0;
  for (double m : probe) best = std::max(best, m);

  // Finite branch: sweep sup J / s over a log-spaced radius grid spanning the
  // probe range up to the full ball, then refine around the best node.
  const int grid = 65;
  const double lo = -16.0;  // log10 of the smallest squared radius / rho
  std::vector<double> ratios(grid);
  const auto ratio_at = [&](double e) {
    const double s = rho * std::pow(10.0, e);
    return sphere_sup(s, 2000 + static_cast<std::uint64_t>((e - lo) * 4096.0)) / s;
  };
  int best_idx = 0;
  for (int j = 0; j < grid; ++j) {
    const double e = lo + (0.0 - lo) * j / (grid - 1);
    ratios[j] = ratio_at(e);
    if (ratios[j] > ratios[best_idx]) best_idx = j;
    best = std::max(best, ratios[j]);
  }
  const double step = (0.0 - lo) / (grid - 1);
  const double e_lo = lo + step * std::max(0, best_idx - 1);
  const double e_hi = lo + step * std::min(grid - 1, best_idx + 1);
  const double e_star = golden_max(ratio_at, e_lo, e_hi);
  best = std::max(best, ratio_at(e_star));
  return ExtendedReal::finite(best);
}

double grid_oracle_max_ratio(const ProblemInstance& inst, double r) {
  require_level(r, "grid_oracle_max_ratio");
  const FunctionalSpec& f = inst.functional;
  const double rho = inst.rho;
  const int G = inst.tolerances.grid_points;
  const double den_floor = 1e-12 * std::max(1.0, std::abs(r));

  const auto ratio_of = [&](double num, double jval) {
    const double den = r - jval;
    if (den <= den_floor) {
      throw Error(Errc::infeasible_level,
                  "grid_oracle_max_ratio: the level is not above the functional's "
                  "supremum on the ball, the ratio is unbounded");
    }
    return num / den;
  };

  if (f.radial) {
    const auto rt = [&](double tval) {
      const double t = std::clamp(tval, 0.0, rho);
      return ratio_of(rho - t, t == 0.0 ? 0.0 : radial_profile(f, t));
    };
    int best_i = 0;
    double best = rt(0.0);
    for (int i = 1; i < G; ++i) {
      const double v = rt(rho * i / (G - 1.0));
      if (v > best) {
        best = v;
        best_i = i;
      }
    }
    const double t_lo = rho * std::max(0, best_i - 1) / (G - 1.0);
    const double t_hi = rho * std::min(G - 1, best_i + 1) / (G - 1.0);
    const double t_star = golden_max(rt, t_lo, t_hi);
    return std::max(best, rt(t_star));
  }

  const auto ratio_point = [&](const Vector& y) {
    return ratio_of(rho - y.squaredNorm(), f.value(y));
  };

  if (inst.n == 1) {
    const double R = std::sqrt(rho);
    const int M = 2 * G;
    const auto rx = [&](double x) {
      Vector y(1);
      y[0] = std::clamp(x, -R, R);
      return ratio_point(y);
    };
    int best_j = 0;
    double best = rx(-R);
    for (int j = 1; j <= M; ++j) {
      const double v = rx(-R + 2.0 * R * j / M);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    const double x_lo = -R + 2.0 * R * std::max(0, best_j - 1) / M;
    const double x_hi = -R + 2.0 * R * std::min(M, best_j + 1) / M;
    return std::max(best, rx(golden_max(rx, x_lo, x_hi)));
  }

  if (inst.n == 2) {
    const auto point = [&](double t, double th) {
      Vector y(2);
      const double rr = std::sqrt(std::clamp(t, 0.0, rho));
      y[0] = rr * std::cos(th);
      y[1] = rr * std::sin(th);
      return y;
    };
    const double two_pi = 2.0 * std::acos(-1.0);
    double best = -std::numeric_limits<double>::infinity();
    double bt = 0.0, bth = 0.0;
    for (int i = 0; i < G; ++i) {
      const double t = rho * i / (G - 1.0);
      for (int j = 0; j < G; ++j) {
        const double th = two_pi * j / G;
        const double v = ratio_point(point(t, th));
        if (v > best) {
          best = v;
          bt = t;
          bth = th;
        }
      }
    }
    const double dt = rho / (G - 1.0);
    const double dth = two_pi / G;
    for (int round = 0; round < 5; ++round) {
      bt = golden_max([&](double t) { return ratio_point(point(t, bth)); },
                      std::max(0.0, bt - dt), std::min(rho, bt + dt));
      bth = golden_max([&](double th) { return ratio_point(point(bt, th)); },
                       bth - dth, bth + dth);
      best = std::max(best, ratio_point(point(bt, bth)));
    }
    return best;
  }

  if (inst.n == 3) {
    const double pi = std::acos(-1.0);
    const int Ga = std::min(G, 128);
    const auto point = [&](double t, double th, double ph) {
      Vector y(3);
      const double rr = std::sqrt(std::clamp(t, 0.0, rho));
      y[0] = rr * std::sin(th) * std::cos(ph);
      y[1] = rr * std::sin(th) * std::sin(ph);
      y[2] = rr * std::cos(th);
      return y;
    };
    double best = -std::numeric_limits<double>::infinity();
    double bt = 0.0, bth = 0.0, bph = 0.0;
    for (int i = 0; i < G; ++i) {
      const double t = rho * i / (G - 1.0);
      for (int j = 0; j < Ga; ++j) {
        const double th = pi * j / (Ga - 1.0);
        for (int k = 0; k < Ga; ++k) {
          const double ph = 2.0 * pi * k / Ga;
          const double v = ratio_point(point(t, th, ph));
          if (v > best) {
            best = v;
            bt = t;
            bth = th;
            bph = ph;
          }
        }
      }
    }
    const double dt = rho / (G - 1.0);
    const double da = pi / (Ga - 1.0);
    for (int round = 0; round < 5; ++round) {
      bt = golden_max([&](double t) { return ratio_point(point(t, bth, bph)); },
                      std::max(0.0, bt - dt), std::min(rho, bt + dt));
      bth = golden_max([&](double th) { return ratio_point(point(bt, th, bph)); },
                       std::max(0.0, bth - da), std::min(pi, bth + da));
      bph = golden_max([&](double ph) { return ratio_point(point(bt, bth, ph)); },
                       bph - 2.0 * da, bph + 2.0 * da);
      best = std::max(best, ratio_point(point(bt, bth, bph)));
    }
    return best;
  }

  throw Error(Errc::oracle_unsupported,
              "grid_oracle_max_ratio: brute-force grids support dimension <= 3");
}

}  // namespace spherimax
