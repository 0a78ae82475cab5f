#include "spherimax/functionals.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace spherimax {
namespace {

double get_param(const std::map<std::string, double>& params, const std::string& key,
                 const char* entry) {
  auto it = params.find(key);
  if (it == params.end())
    throw Error(Errc::parameter_domain,
                std::string(entry) + " requires parameter '" + key + "'");
  return it->second;
}

void reject_unknown_params(const std::map<std::string, double>& params,
                           const std::set<std::string>& known, const char* entry) {
  for (const auto& [key, _] : params)
    if (!known.count(key))
      throw Error(Errc::parameter_domain,
                  std::string(entry) + " has no parameter '" + key + "'");
}

// C^inf bump in t, supported on ]c-w, c+w[, peak height h at t = c.
double bump(double t, double c, double w, double h) {
  const double z = (t - c) / w;
  const double d = 1.0 - z * z;
  if (d <= 1e-12) return 0.0;
  return h * std::exp(1.0 - 1.0 / d);
}

double bump_dt(double t, double c, double w, double h) {
  const double z = (t - c) / w;
  const double d = 1.0 - z * z;
  if (d <= 1e-12) return 0.0;
  return h * std::exp(1.0 - 1.0 / d) * (-2.0 * z / (d * d)) / w;
}

}  // namespace

std::string FunctionalSpec::describe() const {
  std::ostringstream os;
  os << name;
  if (!params.empty()) {
    os << "(";
    bool first = true;
    for (const auto& [k, v] : params) {
      if (!first) os << ",";
      os << k << "=" << v;
      first = false;
    }
    os << ")";
  }
  return os.str();
}

Vector gradient_at(const FunctionalSpec& f, const Vector& x) {
  if (!x.allFinite()) throw Error(Errc::invalid_point, "non-finite coordinate");
  if (!f.smooth_at_origin && x.squaredNorm() < 1e-300)
    throw Error(Errc::gradient_undefined,
                f.name + " has no gradient at the origin");
  return f.gradient(x);
}

FunctionalSpec zoo_get(const std::string& name,
                       const std::map<std::string, double>& params, int n) {
  if (n < 1) throw Error(Errc::precondition, "dimension must be >= 1");
  FunctionalSpec f;
  f.name = name;
  f.params = params;

  if (name == "NORM_POWER") {
    reject_unknown_params(params, {"q"}, "NORM_POWER");
    const double q = get_param(params, "q", "NORM_POWER");
    if (!(q > 0.0 && q < 2.0))
      throw Error(Errc::parameter_domain, "NORM_POWER requires 0 < q < 2");
    f.value = [q](const Vector& x) { return std::pow(x.squaredNorm(), q / 2.0); };
    f.gradient = [q](const Vector& x) -> Vector {
      return q * std::pow(x.squaredNorm(), (q - 2.0) / 2.0) * x;
    };
    f.smooth_at_origin = false;
    f.radial = true;
    f.profile = [q](double t) { return std::pow(t, q / 2.0); };
  } else if (name == "QUADRATIC") {
    reject_unknown_params(params, {"c"}, "QUADRATIC");
    const double c = get_param(params, "c", "QUADRATIC");
    if (!(c > 0.0))
      throw Error(Errc::parameter_domain, "QUADRATIC requires c > 0");
    f.value = [c](const Vector& x) { return c * x.squaredNorm(); };
    f.gradient = [c](const Vector& x) -> Vector { return 2.0 * c * x; };
    f.smooth_at_origin = true;
    f.radial = true;
    f.profile = [c](double t) { return c * t; };
  } else if (name == "ZERO") {
    reject_unknown_params(params, {}, "ZERO");
    f.value = [](const Vector&) { return 0.0; };
    f.gradient = [](const Vector& x) -> Vector { return Vector::Zero(x.size()); };
    f.smooth_at_origin = true;
    f.radial = true;
    f.profile = [](double) { return 0.0; };
  } else if (name == "COORD_POWER") {
    reject_unknown_params(params, {}, "COORD_POWER");
    f.value = [](const Vector& x) {
      return std::pow(std::abs(x[0]), 1.5);
    };
    f.gradient = [](const Vector& x) -> Vector {
      Vector g = Vector::Zero(x.size());
      const double a = std::abs(x[0]);
      g[0] = 1.5 * std::sqrt(a) * (x[0] >= 0.0 ? 1.0 : -1.0);
      if (a == 0.0) g[0] = 0.0;
      return g;
    };
    f.smooth_at_origin = true;
    f.radial = false;
  } else if (name == "NORM_PLUS_LINEAR") {
    reject_unknown_params(params, {"epsilon"}, "NORM_PLUS_LINEAR");
    const double eps = params.count("epsilon") ? params.at("epsilon") : 0.1;
    if (!(eps > 0.0))
      throw Error(Errc::parameter_domain, "NORM_PLUS_LINEAR requires epsilon > 0");
    f.params["epsilon"] = eps;
    f.value = [eps](const Vector& x) {
      return std::pow(x.squaredNorm(), 0.75) + eps * x[0];
    };
    f.gradient = [eps](const Vector& x) -> Vector {
      Vector g = 1.5 * std::pow(x.squaredNorm(), -0.25) * x;
      g[0] += eps;
      return g;
    };
    f.smooth_at_origin = false;
    f.radial = false;
  } else if (name == "TWO_BUMP") {
    reject_unknown_params(params, {"c1", "w1", "h1", "c2", "w2", "h2"}, "TWO_BUMP");
    auto pick = [&params](const char* key, double dflt) {
      auto it = params.find(key);
      return it == params.end() ? dflt : it->second;
    };
    const double c1 = pick("c1", 0.25), w1 = pick("w1", 0.15), h1 = pick("h1", 1.0);
    const double c2 = pick("c2", 0.70), w2 = pick("w2", 0.20), h2 = pick("h2", 0.8);
    for (auto [c, w] : {std::pair{c1, w1}, std::pair{c2, w2}}) {
      if (!(w > 0.0)) throw Error(Errc::parameter_domain, "TWO_BUMP widths must be > 0");
      if (!(c - w > 0.0))
        throw Error(Errc::parameter_domain,
                    "TWO_BUMP bump support must exclude the origin (need c - w > 0)");
    }
    if (!(h1 >= 0.0) || !(h2 >= 0.0))
      throw Error(Errc::parameter_domain, "TWO_BUMP heights must be >= 0");
    f.params = {{"c1", c1}, {"w1", w1}, {"h1", h1}, {"c2", c2}, {"w2", w2}, {"h2", h2}};
    auto prof = [c1, w1, h1, c2, w2, h2](double t) {
      return bump(t, c1, w1, h1) + bump(t, c2, w2, h2);
    };
    auto dprof = [c1, w1, h1, c2, w2, h2](double t) {
      return bump_dt(t, c1, w1, h1) + bump_dt(t, c2, w2, h2);
    };
    f.value = [prof](const Vector& x) { return prof(x.squaredNorm()); };
    f.gradient = [dprof](const Vector& x) -> Vector {
      return 2.0 * dprof(x.squaredNorm()) * x;
    };
    f.smooth_at_origin = true;
    f.radial = true;
    f.profile = prof;
  } else {
    throw Error(Errc::unknown_functional, "no zoo entry named '" + name + "'");
  }
  return f;
}

double gradient_check(const FunctionalSpec& f, const Vector& p, double h) {
  if (!(h > 0.0)) throw Error(Errc::precondition, "step h must be > 0");
  if (p.squaredNorm() == 0.0 && !f.smooth_at_origin)
    throw Error(Errc::gradient_undefined,
                f.name + " has no gradient at the origin");
  const Vector g = gradient_at(f, p);
  double worst = 0.0;
  Vector e = p;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    e[i] = p[i] + h;
    const double fp = f.value(e);
    e[i] = p[i] - h;
    const double fm = f.value(e);
    e[i] = p[i];
    worst = std::max(worst, std::abs((fp - fm) / (2.0 * h) - g[i]));
  }
  return worst;
}

double radial_profile(const FunctionalSpec& f, double t) {
  if (!f.radial) throw Error(Errc::not_radial, f.name + " is not radial");
  if (!(t > 0.0)) throw Error(Errc::precondition, "profile argument t must be > 0");
  return f.profile(t);
}

double fixed_point_residual(const FunctionalSpec& f, const Vector& x, double lambda) {
  if (!std::isfinite(lambda))
    throw Error(Errc::precondition, "multiplier must be finite");
  Vector g;
  if (x.squaredNorm() == 0.0 && !f.smooth_at_origin) {
    // The gradient is singular at the origin; the residual is defined only
    // when the multiplier term vanishes anyway.
    if (lambda != 0.0)
      throw Error(Errc::gradient_undefined,
                  f.name + " has no gradient at the origin");
    g = Vector::Zero(x.size());
  } else {
    g = gradient_at(f, x);
  }
  return (x - lambda * g).norm() / (1.0 + x.norm());
}

ProblemInstance::ProblemInstance(FunctionalSpec f, int n_, double rho_, Tolerances tol)
    : functional(std::move(f)), n(n_), rho(rho_), tolerances(tol) {
  if (n < 1) throw Error(Errc::invalid_instance, "dimension must be >= 1");
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw Error(Errc::invalid_instance, "rho must be a finite positive number");
  tolerances.validate();
  if (functional.value(Vector::Zero(n)) != 0.0)
    throw Error(Errc::invalid_instance, "functional must vanish at the origin");
}

std::string ProblemInstance::describe() const {
  std::ostringstream os;
  os << functional.describe() << " n=" << n << " rho=" << rho;
  return os.str();
}

}  // namespace spherimax
