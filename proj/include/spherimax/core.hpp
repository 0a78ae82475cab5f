#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace spherimax {

/// Dense real vector; the ambient space is R^n with the Euclidean inner
/// product. Spheres and balls are parameterized by SQUARED norm throughout:
/// S_r = { x : |x|^2 = r },  B_rho = { x : |x|^2 <= rho }.
using Vector = Eigen::VectorXd;

constexpr std::uint64_t kDefaultSeed = 1;

enum class Errc {
  invalid_point,
  degenerate_projection,
  invalid_tolerances,
  invalid_instance,
  unknown_functional,
  parameter_domain,
  not_radial,
  gradient_undefined,
  solver_failure,
  infeasible_level,
  oracle_unsupported,
  out_of_range,
  invalid_certificate,
  degenerate_maximum,
  multiplicity_not_found,
  precondition,
  config_parse,
  config_validation,
  io_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// A real number or +infinity. Only comparisons and interval-endpoint use
/// are supported; extracting a finite value from the infinite element throws.
class ExtendedReal {
 public:
  ExtendedReal() = default;

  static ExtendedReal finite(double v);
  static ExtendedReal infinity() {
    ExtendedReal e;
    e.finite_ = false;
    return e;
  }

  bool is_finite() const { return finite_; }

  double value() const {
    if (!finite_) throw Error(Errc::precondition, "value() on +infinity");
    return value_;
  }

  std::string str() const;

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.finite_ != b.finite_) return false;
    return !a.finite_ || a.value_ == b.value_;
  }
  friend bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
    if (!a.finite_) return false;       // +inf < y never
    if (!b.finite_) return true;        // finite < +inf always
    return a.value_ < b.value_;
  }
  friend bool operator>(const ExtendedReal& a, const ExtendedReal& b) { return b < a; }
  friend bool operator<=(const ExtendedReal& a, const ExtendedReal& b) { return !(b < a); }
  friend bool operator>=(const ExtendedReal& a, const ExtendedReal& b) { return !(a < b); }

  friend bool operator<(double a, const ExtendedReal& b) { return ExtendedReal::finite(a) < b; }
  friend bool operator<(const ExtendedReal& a, double b) { return a < ExtendedReal::finite(b); }

 private:
  double value_ = 0.0;
  bool finite_ = true;
};

/// Numerical policy shared by all solvers and verifiers.
///   tol_opt     solver stationarity target
///   tol_res     fixed-point residual certification threshold
///   tol_val     value-comparison tolerance
///   tol_cluster point clustering radius for argmax-set representatives
///   grid_points per-dimension resolution of the brute-force oracle
///   restarts    multi-start count for global solves
struct Tolerances {
  double tol_opt = 1e-8;
  double tol_res = 1e-6;
  double tol_val = 1e-7;
  double tol_cluster = 1e-4;
  int grid_points = 512;
  int restarts = 32;

  void validate() const;
};

/// Sum of squared coordinates. Rejects NaN/Inf coordinates.
double norm_sq(const Vector& p);

/// Radial retraction onto S_r (squared-norm r): p * sqrt(r / |p|^2).
/// The origin has no nearest sphere point and is rejected.
Vector project_to_sphere(const Vector& p, double r);

/// True if a precedes b lexicographically coordinate by coordinate.
bool lex_less(const Vector& a, const Vector& b);

}  // namespace spherimax
