#pragma once

#include <functional>
#include <map>
#include <string>

#include "spherimax/core.hpp"

namespace spherimax {

/// A functional J with value and gradient oracles, J(0) = 0.
///
/// The gradient oracle is defined away from the origin; entries whose
/// gradient formula is singular there carry smooth_at_origin = false and
/// gradient_at() refuses the origin for them. Radial entries expose the
/// one-dimensional profile j(t) with J(x) = j(|x|^2).
struct FunctionalSpec {
  std::string name;
  std::map<std::string, double> params;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  bool smooth_at_origin = false;
  bool radial = false;
  std::function<double(double)> profile;  // radial entries only; argument is |x|^2

  std::string describe() const;
};

/// Gradient evaluation with the origin guard.
Vector gradient_at(const FunctionalSpec& f, const Vector& x);

/// Instantiate a zoo entry by name. Shipped entries:
///   NORM_POWER        J(x) = |x|^q, parameter q in (0,2)
///   QUADRATIC         J(x) = c |x|^2, parameter c > 0
///   ZERO              J == 0
///   COORD_POWER       J(x) = |x_1|^(3/2)
///   NORM_PLUS_LINEAR  J(x) = |x|^(3/2) + epsilon * x_1, parameter epsilon > 0
///   TWO_BUMP          two smooth radial bumps in t = |x|^2; parameters
///                     c1,w1,h1,c2,w2,h2 (centers, widths, heights), with
///                     c_i - w_i > 0 so J vanishes near the origin
FunctionalSpec zoo_get(const std::string& name,
                       const std::map<std::string, double>& params, int n);

/// Max over coordinates of |central difference - gradient coordinate| at p
/// with step h. The usual check is result <= K h^2 for a per-functional K.
double gradient_check(const FunctionalSpec& f, const Vector& p, double h);

/// J on any point of squared norm t, for radial entries.
double radial_profile(const FunctionalSpec& f, double t);

/// Scaled residual of the multiplier equation x = lambda J'(x):
/// |x - lambda J'(x)| / (1 + |x|).
double fixed_point_residual(const FunctionalSpec& f, const Vector& x, double lambda);

/// Problem data: a functional on R^n with the ball B_rho and tolerances.
struct ProblemInstance {
  FunctionalSpec functional;
  int n = 0;
  double rho = 0.0;
  Tolerances tolerances;

  ProblemInstance(FunctionalSpec f, int n_, double rho_, Tolerances tol = {});

  Vector origin() const { return Vector::Zero(n); }
  std::string describe() const;
};

}  // namespace spherimax
