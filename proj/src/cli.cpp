#include "spherimax/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "spherimax/detail/format.hpp"
#include "spherimax/detail/rng.hpp"

namespace spherimax {
namespace {

namespace fs = std::filesystem;
using detail::sig12;
using nlohmann::json;

// ---------------------------------------------------------------- config

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void parse_fail(const std::string& path, int line, int col,
                             const std::string& what) {
  throw Error(Errc::config_parse, path + ":" + std::to_string(line) + ":" +
                                      std::to_string(col) + ": " + what);
}

[[noreturn]] void validate_fail(const std::string& key, const std::string& what) {
  throw Error(Errc::config_validation, "config key '" + key + "': " + what);
}

double parse_real(const std::string& path, int line, int col, const std::string& key,
                  const std::string& raw) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(raw.c_str(), &end);
  if (raw.empty() || end != raw.c_str() + raw.size() || errno == ERANGE) {
    parse_fail(path, line, col, "value of '" + key + "' is not a number: '" + raw + "'");
  }
  return v;
}

long long parse_integer(const std::string& path, int line, int col,
                        const std::string& key, const std::string& raw) {
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(raw.c_str(), &end, 10);
  if (raw.empty() || end != raw.c_str() + raw.size() || errno == ERANGE) {
    parse_fail(path, line, col, "value of '" + key + "' is not an integer: '" + raw + "'");
  }
  return v;
}

}  // namespace

ProblemInstance RunConfig::instance() const {
  return ProblemInstance(zoo_get(functional_name, params, n), n, rho, tolerances);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot read config file " + path);

  RunConfig cfg;
  bool has_n = false, has_rho = false, has_r_lo = false, has_r_hi = false;
  std::vector<std::string> seen;

  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    std::string line = raw_line;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;

    const std::size_t first = line.find_first_not_of(" \t");
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      parse_fail(path, line_no, static_cast<int>(first) + 1,
                 "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const int vcol = static_cast<int>(eq) + 2;
    if (key.empty()) parse_fail(path, line_no, 1, "missing key before '='");
    if (value.empty()) parse_fail(path, line_no, vcol, "missing value for '" + key + "'");
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      parse_fail(path, line_no, 1, "duplicate key '" + key + "'");
    }
    seen.push_back(key);

    if (key == "functional") {
      cfg.functional_name = value;
    } else if (key.rfind("param.", 0) == 0) {
      const std::string pname = key.substr(6);
      if (pname.empty()) parse_fail(path, line_no, 1, "empty parameter name in '" + key + "'");
      cfg.params[pname] = parse_real(path, line_no, vcol, key, value);
    } else if (key == "n") {
      cfg.n = static_cast<int>(parse_integer(path, line_no, vcol, key, value));
      has_n = true;
    } else if (key == "rho") {
      cfg.rho = parse_real(path, line_no, vcol, key, value);
      has_rho = true;
    } else if (key == "r_lo") {
      cfg.r_lo = parse_real(path, line_no, vcol, key, value);
      has_r_lo = true;
    } else if (key == "r_hi") {
      cfg.r_hi = parse_real(path, line_no, vcol, key, value);
      has_r_hi = true;
    } else if (key == "r_count") {
      cfg.r_count = static_cast<int>(parse_integer(path, line_no, vcol, key, value));
    } else if (key == "rho_tilde") {
      cfg.rho_tilde = parse_real(path, line_no, vcol, key, value);
      cfg.has_rho_tilde = true;
    } else if (key == "seed") {
      const long long s = parse_integer(path, line_no, vcol, key, value);
      if (s < 0) parse_fail(path, line_no, vcol, "seed must be nonnegative");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "tol.opt") {
      cfg.tolerances.tol_opt = parse_real(path, line_no, vcol, key, value);
    } else if (key == "tol.res") {
      cfg.tolerances.tol_res = parse_real(path, line_no, vcol, key, value);
    } else if (key == "tol.val") {
      cfg.tolerances.tol_val = parse_real(path, line_no, vcol, key, value);
    } else if (key == "tol.cluster") {
      cfg.tolerances.tol_cluster = parse_real(path, line_no, vcol, key, value);
    } else if (key == "grid_points") {
      cfg.tolerances.grid_points =
          static_cast<int>(parse_integer(path, line_no, vcol, key, value));
    } else if (key == "restarts") {
      cfg.tolerances.restarts =
          static_cast<int>(parse_integer(path, line_no, vcol, key, value));
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else {
      parse_fail(path, line_no, static_cast<int>(first) + 1,
                 "unknown key '" + key + "'");
    }
  }

  if (cfg.functional_name.empty()) validate_fail("functional", "required");
  if (!has_n) validate_fail("n", "required");
  if (cfg.n < 1) validate_fail("n", "must be an integer >= 1");
  if (!has_rho) validate_fail("rho", "required");
  if (!(cfg.rho > 0.0) || !std::isfinite(cfg.rho)) {
    validate_fail("rho", "must be a positive finite real");
  }
  if (has_r_lo != has_r_hi) {
    validate_fail(has_r_lo ? "r_hi" : "r_lo",
                  "r_lo and r_hi must be given together");
  }
  cfg.has_range = has_r_lo && has_r_hi;
  if (cfg.has_range && !(cfg.r_lo < cfg.r_hi)) {
    validate_fail("r_lo", "must satisfy r_lo < r_hi");
  }
  if (cfg.r_count < 3) validate_fail("r_count", "must be >= 3");
  if (cfg.has_rho_tilde && (!(cfg.rho_tilde > 0.0) || !std::isfinite(cfg.rho_tilde))) {
    validate_fail("rho_tilde", "must be a positive finite real");
  }
  try {
    cfg.tolerances.validate();
  } catch (const Error& e) {
    throw Error(Errc::config_validation, std::string("config tolerances: ") + e.what());
  }
  return cfg;
}

namespace {

// ---------------------------------------------------------------- output

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(Errc::io_error,
                "cannot create output directory " + dir.string() + ": " + ec.message());
  }
  if (!fs::is_directory(dir)) {
    throw Error(Errc::io_error, dir.string() + " is not a directory");
  }
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(Errc::io_error, "cannot open " + tmp.string() + " for writing");
    os << content;
    os.flush();
    if (!os) throw Error(Errc::io_error, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw Error(Errc::io_error,
                "cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

std::string eta_curve_csv(const EtaCurve& curve) {
  std::ostringstream os;
  os << "r,eta,psi,n_clusters,residual,singleton,dinkelbach_iters\n";
  for (std::size_t k = 0; k < curve.samples.size(); ++k) {
    const EtaSample& s = curve.samples[k];
    os << sig12(s.r) << ',' << sig12(s.eta) << ',' << sig12(s.psi) << ','
       << s.gamma.size() << ',' << sig12(s.residual) << ','
       << (curve.singleton_flags[k] ? 1 : 0) << ',' << s.dinkelbach_iters << '\n';
  }
  if (!curve.sample_errors.empty()) {
    const SampleError& first = curve.sample_errors.front();
    os << "# incomplete: " << curve.sample_errors.size() << " of "
       << curve.samples.size() + curve.sample_errors.size()
       << " samples failed; first failure at r = " << sig12(first.r) << ": "
       << first.message << '\n';
  }
  return os.str();
}

std::string phi_map_csv(const PhiMap& map) {
  std::ostringstream os;
  os << "lambda,phi,residual_max\n";
  for (const PhiEntry& e : map.table) {
    os << sig12(e.lambda) << ',' << sig12(e.phi) << ',' << sig12(e.residual_max) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------- plotting

struct Series {
  std::string label;
  std::string color;
  bool dashed = false;
  std::vector<std::pair<double, double>> pts;
};

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string render_svg(const std::string& title, const std::string& x_label,
                       const std::vector<Series>& series) {
  const double W = 720, H = 480, ML = 80, MR = 24, MT = 48, MB = 56;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Series& s : series) {
    for (const auto& [x, y] : s.pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!(xmin < xmax)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymin < ymax)) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const auto map_x = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
  const auto map_y = [&](double y) {
    return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"16\">"
     << title << "</text>\n";

  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    const double gx = map_x(xv);
    const double gy = map_y(yv);
    os << "<line x1=\"" << px(gx) << "\" y1=\"" << px(MT) << "\" x2=\"" << px(gx)
       << "\" y2=\"" << px(H - MB) << "\" stroke=\"#dddddd\"/>\n";
    os << "<line x1=\"" << px(ML) << "\" y1=\"" << px(gy) << "\" x2=\"" << px(W - MR)
       << "\" y2=\"" << px(gy) << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << px(gx) << "\" y=\"" << px(H - MB + 18)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
       << tick_label(xv) << "</text>\n";
    os << "<text x=\"" << px(ML - 8) << "\" y=\"" << px(gy + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << tick_label(yv) << "</text>\n";
  }
  os << "<line x1=\"" << px(ML) << "\" y1=\"" << px(H - MB) << "\" x2=\"" << px(W - MR)
     << "\" y2=\"" << px(H - MB) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << px(ML) << "\" y1=\"" << px(MT) << "\" x2=\"" << px(ML)
     << "\" y2=\"" << px(H - MB) << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (ML + (W - ML - MR) / 2) << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
     << "</text>\n";

  double legend_y = MT + 14;
  for (const Series& s : series) {
    if (s.pts.empty()) continue;
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.8\"";
    if (s.dashed) os << " stroke-dasharray=\"6 4\"";
    os << " points=\"";
    for (std::size_t i = 0; i < s.pts.size(); ++i) {
      if (i) os << ' ';
      os << px(map_x(s.pts[i].first)) << ',' << px(map_y(s.pts[i].second));
    }
    os << "\"/>\n";
    os << "<line x1=\"" << px(W - MR - 120) << "\" y1=\"" << px(legend_y) << "\" x2=\""
       << px(W - MR - 92) << "\" y2=\"" << px(legend_y) << "\" stroke=\"" << s.color
       << "\" stroke-width=\"1.8\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
       << "/>\n";
    os << "<text x=\"" << px(W - MR - 86) << "\" y=\"" << px(legend_y + 4)
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
    legend_y += 18;
  }
  os << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------- json

json clause_to_json(const Clause& c) {
  json j;
  j["id"] = c.id;
  j["status"] = clause_status_name(c.status);
  j["measured"] = c.measured;
  j["threshold"] = c.threshold;
  if (!c.witness.empty()) {
    json w = json::array();
    for (const Vector& v : c.witness) {
      w.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    }
    j["witness"] = w;
  }
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

json report_to_json(const VerificationReport& r) {
  json j;
  j["instance"] = r.instance;
  json clauses = json::array();
  for (const Clause& c : r.clauses) clauses.push_back(clause_to_json(c));
  j["clauses"] = clauses;
  j["overall"] = r.overall;
  return j;
}

json point_to_json(const Vector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

// ---------------------------------------------------------------- shared

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
};

// Default sampling window when the config gives none: start just above beta,
// stop at 4 beta + 1 (the tail is checked separately), clipped into the
// working interval when delta is finite.
Range pick_range(const RunConfig& cfg, const ConditionResult& cond, double rho) {
  if (cfg.has_range) return {cfg.r_lo, cfg.r_hi, cfg.r_count};
  const double beta = cond.beta;
  double lo = 1.05 * beta + 0.05;
  double hi = 4.0 * beta + 1.0;
  if (cond.delta.is_finite()) {
    const double cap = rho * cond.delta.value();
    const double width = cap - beta;
    if (!(lo > beta && lo < cap)) lo = beta + 0.05 * width;
    if (!(hi < cap)) hi = beta + 0.95 * width;
    if (!(lo < hi)) {
      lo = beta + 0.25 * width;
      hi = beta + 0.75 * width;
    }
  }
  return {lo, hi, cfg.r_count};
}

void report_infeasible(const ConditionResult& cond, double rho) {
  std::cout << "feasibility gate fails: beta/rho = " << sig12(cond.beta / rho)
            << " does not lie strictly below delta = " << cond.delta.str()
            << "; the working interval ]beta, rho*delta[ is empty\n";
}

}  // namespace

int cmd_eta(const RunConfig& cfg) {
  try {
    const ProblemInstance inst = cfg.instance();
    ensure_dir(cfg.output_dir);
    const ConditionResult cond = check_condition(inst, cfg.seed);
    std::cout << "beta = " << sig12(cond.beta) << ", delta = " << cond.delta.str()
              << '\n';
    if (!cond.holds) {
      report_infeasible(cond, inst.rho);
      return kExitInfeasible;
    }
    const Range range = pick_range(cfg, cond, inst.rho);
    const EtaCurve curve = tabulate_curve_with(inst, cond.beta, cond.delta, range.lo,
                                               range.hi, range.count, cfg.seed);

    write_file_atomic(fs::path(cfg.output_dir) / "eta_curve.csv", eta_curve_csv(curve));
    Series eta_series{"eta", "#1f77b4", false, {}};
    Series psi_series{"psi", "#d62728", true, {}};
    for (const EtaSample& s : curve.samples) {
      eta_series.pts.emplace_back(s.r, s.eta);
      psi_series.pts.emplace_back(s.r, s.psi);
    }
    write_file_atomic(fs::path(cfg.output_dir) / "eta_plot.svg",
                      render_svg("level curve: eta and psi vs r", "r",
                                 {eta_series, psi_series}));

    for (const std::string& v : curve.violations) std::cout << "warning: " << v << '\n';
    std::cout << "wrote eta_curve.csv with " << curve.samples.size() << " rows\n";
    if (!curve.sample_errors.empty()) {
      std::cerr << curve.sample_errors.size()
                << " sample(s) failed; first: " << curve.sample_errors.front().message
                << '\n';
      return kExitError;
    }
    if (curve.samples.empty()) {
      std::cerr << "no samples were produced\n";
      return kExitError;
    }
    return kExitSuccess;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_verify(const RunConfig& cfg) {
  try {
    const ProblemInstance inst = cfg.instance();
    ensure_dir(cfg.output_dir);
    const ConditionResult cond = check_condition(inst, cfg.seed);

    VerificationReport report;
    report.instance = inst.describe();
    {
      Clause c;
      c.id = "condition-gate";
      c.measured = cond.beta / inst.rho;
      if (cond.delta.is_finite()) {
        c.threshold = cond.delta.value();
      } else {
        c.threshold = std::numeric_limits<double>::max();
        c.note = "delta is unbounded; the gate holds for any finite beta";
      }
      c.status = cond.holds ? ClauseStatus::pass : ClauseStatus::fail;
      if (!cond.holds) c.note = "beta/rho must lie strictly below delta";
      report.add(std::move(c));
    }

    if (!cond.holds) {
      write_file_atomic(fs::path(cfg.output_dir) / "report.json",
                        report_to_json(report).dump(2) + "\n");
      report_infeasible(cond, inst.rho);
      return kExitInfeasible;
    }

    const Range range = pick_range(cfg, cond, inst.rho);
    const EtaCurve curve = tabulate_curve_with(inst, cond.beta, cond.delta, range.lo,
                                               range.hi, range.count, cfg.seed);
    for (std::size_t k = 0; k < curve.samples.size(); ++k) {
      const VerificationReport chain = verify_maximizer_chain(
          inst, curve.samples[k], cond, detail::derive_seed(cfg.seed, 61, k));
      for (Clause c : chain.clauses) {
        c.id = "r=" + sig12(curve.samples[k].r) + ":" + c.id;
        report.add(std::move(c));
      }
    }
    for (Clause c : verify_monotonicity(curve).clauses) report.add(std::move(c));

    try {
      const BallMaxCondition bm = condition_at_ball_max(inst, inst.rho, cfg.seed);
      Clause c;
      c.id = "ball-max-subhomogeneity";
      c.measured = bm.euler_gap;
      c.threshold = inst.tolerances.tol_val;
      if (!bm.applies) {
        c.status = ClauseStatus::skip;
        c.note = "the ball maximizer is not strictly sub-homogeneous; "
                 "the criterion does not apply";
      } else if (bm.condition_checked && bm.condition.holds) {
        c.status = ClauseStatus::pass;
      } else {
        c.status = ClauseStatus::fail;
        c.note = "sub-homogeneity holds but the feasibility gate fails on the "
                 "maximizer's ball";
        c.witness.push_back(bm.maximizer);
      }
      report.add(std::move(c));
    } catch (const Error& e) {
      if (e.code() != Errc::degenerate_maximum) throw;
      Clause c;
      c.id = "ball-max-subhomogeneity";
      c.status = ClauseStatus::skip;
      c.note = e.what();
      report.add(std::move(c));
    }

    for (const std::string& v : curve.violations) {
      Clause c;
      c.id = "curve-certification";
      c.status = ClauseStatus::fail;
      c.note = v;
      report.add(std::move(c));
    }
    for (const SampleError& se : curve.sample_errors) {
      Clause c;
      c.id = "sample[r=" + sig12(se.r) + "]";
      c.status = ClauseStatus::fail;
      c.note = se.message;
      report.add(std::move(c));
    }

    write_file_atomic(fs::path(cfg.output_dir) / "report.json",
                      report_to_json(report).dump(2) + "\n");

    int passed = 0, failed = 0, skipped = 0;
    for (const Clause& c : report.clauses) {
      if (c.status == ClauseStatus::pass) ++passed;
      if (c.status == ClauseStatus::fail) ++failed;
      if (c.status == ClauseStatus::skip) ++skipped;
    }
    std::cout << "report: " << passed << " passed, " << failed << " failed, " << skipped
              << " skipped\n";
    return report.overall ? kExitSuccess : kExitError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_phi(const RunConfig& cfg) {
  try {
    const ProblemInstance inst = cfg.instance();
    ensure_dir(cfg.output_dir);
    const ConditionResult cond = check_condition(inst, cfg.seed);
    if (!cond.holds) {
      report_infeasible(cond, inst.rho);
      return kExitInfeasible;
    }
    const Range range = pick_range(cfg, cond, inst.rho);
    const EtaCurve curve = tabulate_curve_with(inst, cond.beta, cond.delta, range.lo,
                                               range.hi, range.count, cfg.seed);
    if (curve.samples.size() < 3) {
      std::cerr << "error: only " << curve.samples.size()
                << " curve samples succeeded; cannot build the multiplier map\n";
      return kExitError;
    }
    const PhiMap map = build_phi_map(inst, curve, 10, cfg.seed);

    write_file_atomic(fs::path(cfg.output_dir) / "phi_map.csv", phi_map_csv(map));
    Series phi_series{"phi", "#2ca02c", false, {}};
    for (const PhiEntry& e : map.table) phi_series.pts.emplace_back(e.lambda, e.phi);
    write_file_atomic(fs::path(cfg.output_dir) / "phi_plot.svg",
                      render_svg("multiplier map: phi vs lambda", "lambda",
                                 {phi_series}));
    std::cout << "wrote phi_map.csv with " << map.table.size()
              << " rows; lambda range [" << sig12(map.lambda_lo) << ", "
              << sig12(map.lambda_hi) << "]\n";
    return kExitSuccess;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_multiplicity(const RunConfig& cfg) {
  try {
    if (!cfg.has_rho_tilde) {
      validate_fail("rho_tilde", "required for the multiplicity command");
    }
    const ProblemInstance inst = cfg.instance();
    ensure_dir(cfg.output_dir);
    const ConditionResult cond = check_condition(inst, cfg.seed);
    if (!cond.holds) {
      report_infeasible(cond, inst.rho);
      return kExitInfeasible;
    }
    const Range range = pick_range(cfg, cond, inst.rho);
    const EtaCurve curve = tabulate_curve_with(inst, cond.beta, cond.delta, range.lo,
                                               range.hi, range.count, cfg.seed);
    if (curve.samples.size() < 2) {
      std::cerr << "error: fewer than two curve samples succeeded\n";
      return kExitError;
    }

    json j;
    j["instance"] = inst.describe();
    j["rho_tilde"] = cfg.rho_tilde;
    try {
      const MultiplicityResult res =
          detect_multiplicity(inst, curve, cfg.rho_tilde, cfg.seed);
      j["found"] = true;
      j["mode"] = multiplicity_mode_name(res.mode);
      j["degenerate"] = res.degenerate;
      j["lambda_star"] = res.lambda_star;
      j["r_star"] = res.r_star;
      json sols = json::array();
      json residuals = json::array();
      json values = json::array();
      for (const Vector& x : res.solutions) {
        sols.push_back(point_to_json(x));
        residuals.push_back(fixed_point_residual(inst.functional, x, res.lambda_star));
        values.push_back(0.5 * x.squaredNorm() -
                         res.lambda_star * inst.functional.value(x));
      }
      j["solutions"] = sols;
      j["residuals"] = residuals;
      j["penalized_values"] = values;
      j["residual_max"] = res.residual_max;
      j["penalized_gap"] = res.penalized_gap;
      write_file_atomic(fs::path(cfg.output_dir) / "multiplicity.json",
                        j.dump(2) + "\n");
      std::cout << "multiplicity " << multiplicity_mode_name(res.mode) << ": "
                << res.solutions.size() << " solution(s) at lambda_star = "
                << sig12(res.lambda_star) << '\n';
      return res.solutions.size() >= 2 ? kExitSuccess : kExitNotFound;
    } catch (const MultiplicityNotFound& e) {
      j["found"] = false;
      j["error"] = e.what();
      j["bracket"] = {e.bracket_lo(), e.bracket_hi()};
      write_file_atomic(fs::path(cfg.output_dir) / "multiplicity.json",
                        j.dump(2) + "\n");
      std::cout << "no multiplicity certificate: " << e.what() << '\n';
      return kExitNotFound;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace spherimax
