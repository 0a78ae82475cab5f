#include "spherimax/core.hpp"

#include <cmath>
#include <sstream>

namespace spherimax {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_point: return "invalid-point";
    case Errc::degenerate_projection: return "degenerate-projection";
    case Errc::invalid_tolerances: return "invalid-tolerances";
    case Errc::invalid_instance: return "invalid-instance";
    case Errc::unknown_functional: return "unknown-functional";
    case Errc::parameter_domain: return "parameter-domain";
    case Errc::not_radial: return "not-radial";
    case Errc::gradient_undefined: return "gradient-undefined";
    case Errc::solver_failure: return "solver-failure";
    case Errc::infeasible_level: return "infeasible-level";
    case Errc::oracle_unsupported: return "oracle-unsupported";
    case Errc::out_of_range: return "out-of-range";
    case Errc::invalid_certificate: return "invalid-certificate";
    case Errc::degenerate_maximum: return "degenerate-maximum";
    case Errc::multiplicity_not_found: return "multiplicity-not-found";
    case Errc::precondition: return "precondition";
    case Errc::config_parse: return "config-parse";
    case Errc::config_validation: return "config-validation";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

ExtendedReal ExtendedReal::finite(double v) {
  if (!std::isfinite(v))
    throw Error(Errc::invalid_point, "finite ExtendedReal from non-finite value");
  ExtendedReal e;
  e.value_ = v;
  e.finite_ = true;
  return e;
}

std::string ExtendedReal::str() const {
  if (!finite_) return "inf";
  std::ostringstream os;
  os.precision(12);
  os << value_;
  return os.str();
}

void Tolerances::validate() const {
  auto bad = [](const char* what) {
    throw Error(Errc::invalid_tolerances, std::string(what) + " must be strictly positive");
  };
  if (!(tol_opt > 0) || !std::isfinite(tol_opt)) bad("tol_opt");
  if (!(tol_res > 0) || !std::isfinite(tol_res)) bad("tol_res");
  if (!(tol_val > 0) || !std::isfinite(tol_val)) bad("tol_val");
  if (!(tol_cluster > 0) || !std::isfinite(tol_cluster)) bad("tol_cluster");
  if (grid_points < 16)
    throw Error(Errc::invalid_tolerances, "grid_points must be >= 16");
  if (restarts < 8)
    throw Error(Errc::invalid_tolerances, "restarts must be >= 8");
}

double norm_sq(const Vector& p) {
  if (!p.allFinite())
    throw Error(Errc::invalid_point, "non-finite coordinate");
  return p.squaredNorm();
}

Vector project_to_sphere(const Vector& p, double r) {
  if (!(r > 0))
    throw Error(Errc::precondition, "sphere parameter r must be > 0");
  const double ns = norm_sq(p);
  if (ns == 0.0)
    throw Error(Errc::degenerate_projection,
                "no nearest sphere point is defined for the origin");
  return p * std::sqrt(r / ns);
}

bool lex_less(const Vector& a, const Vector& b) {
  const Eigen::Index n = std::min(a.size(), b.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return a.size() < b.size();
}

}  // namespace spherimax
