#pragma once

// Command-line front end: configuration layering, the simulate / verify /
// analytic commands and their CSV and JSON writers.

#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <array>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fireball/fireball.hpp"

namespace fireball::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsage = 2, kRuntime = 3 };

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Json };

struct RunConfig {
  std::string command = "simulate";
  std::optional<ModelKind> model;
  std::array<std::optional<double>, 3> q{};
  std::array<double, 3> qdot{};
  double t_start = 0.0;
  IntegratorConfig integrator;
  std::string out = "-";
  OutputFormat format = OutputFormat::Csv;
  unsigned jobs = 1;

  // analytic
  std::optional<double> H;
  std::optional<double> I;
  double t0 = 0.0;
  std::optional<double> phi0;
  int sign0 = 1;
  bool compare_numeric = false;

  // verify
  double drift_bound = 1e-8;
  bool check_analytic = true;
  bool check_symmetry = true;
  bool check_hydro = true;

  // physical reference values for the fluid checks
  double n0 = 1.0;
  double T0 = 1.0;
  double X0 = 1.0;
  double Y0 = 1.0;
  double Z0 = 1.0;
  double m = 1.0;
};

/// Keys accepted in configuration files; command-line flags are the same
/// names prefixed with "--".
inline const std::vector<std::string>& setting_keys() {
  static const std::vector<std::string> keys{
      "model",        "X",          "Y",            "Z",           "Xdot",
      "Ydot",         "Zdot",       "t-start",      "t-end",       "rel-tol",
      "abs-tol",      "max-step",   "initial-step", "sample-interval",
      "out",          "format",     "jobs",         "H",           "I",
      "t0",           "phi0",       "sign0",        "compare-numeric",
      "drift-bound",  "check-analytic", "check-symmetry", "check-hydro",
      "n0",           "T0",         "X0",           "Y0",          "Z0",
      "m"};
  return keys;
}

namespace detail {

inline double parse_number(const std::string& key, const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    throw ConfigError(fmt::format("{}: '{}' is not a finite number", key, value));
  }
  return v;
}

inline bool parse_bool(const std::string& key, std::string value) {
  std::transform(value.begin(), value.end(), value.begin(), ::tolower);
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, value));
}

}  // namespace detail

inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  using detail::parse_bool;
  using detail::parse_number;
  auto number = [&] { return parse_number(key, value); };
  auto positive = [&] {
    const double v = number();
    if (!(v > 0.0)) throw ConfigError(fmt::format("{} must be positive", key));
    return v;
  };
  static const std::map<std::string, std::size_t> axis{{"X", 0}, {"Y", 1}, {"Z", 2}};
  static const std::map<std::string, std::size_t> rate{{"Xdot", 0}, {"Ydot", 1}, {"Zdot", 2}};

  if (key == "model") {
    cfg.model = parse_model_kind(value);
    if (!cfg.model) throw ConfigError(fmt::format("model: unknown model '{}'", value));
  } else if (auto a = axis.find(key); a != axis.end()) {
    cfg.q[a->second] = number();
  } else if (auto r = rate.find(key); r != rate.end()) {
    cfg.qdot[r->second] = number();
  } else if (key == "t-start") {
    cfg.t_start = number();
  } else if (key == "t-end") {
    cfg.integrator.t_end = number();
  } else if (key == "rel-tol") {
    cfg.integrator.rel_tol = positive();
  } else if (key == "abs-tol") {
    cfg.integrator.abs_tol = positive();
  } else if (key == "max-step") {
    cfg.integrator.max_step = positive();
  } else if (key == "initial-step") {
    cfg.integrator.initial_step = positive();
  } else if (key == "sample-interval") {
    cfg.integrator.sample_interval = positive();
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "format") {
    if (value == "csv") cfg.format = OutputFormat::Csv;
    else if (value == "json") cfg.format = OutputFormat::Json;
    else throw ConfigError(fmt::format("format: expected csv or json, got '{}'", value));
  } else if (key == "jobs") {
    const double v = number();
    if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("jobs must be a positive integer");
    cfg.jobs = static_cast<unsigned>(v);
  } else if (key == "H") {
    cfg.H = positive();
  } else if (key == "I") {
    cfg.I = positive();
  } else if (key == "t0") {
    cfg.t0 = number();
  } else if (key == "phi0") {
    cfg.phi0 = number();
  } else if (key == "sign0") {
    const double v = number();
    if (v != 1.0 && v != -1.0) throw ConfigError("sign0 must be 1 or -1");
    cfg.sign0 = static_cast<int>(v);
  } else if (key == "compare-numeric") {
    cfg.compare_numeric = parse_bool(key, value);
  } else if (key == "drift-bound") {
    cfg.drift_bound = positive();
  } else if (key == "check-analytic") {
    cfg.check_analytic = parse_bool(key, value);
  } else if (key == "check-symmetry") {
    cfg.check_symmetry = parse_bool(key, value);
  } else if (key == "check-hydro") {
    cfg.check_hydro = parse_bool(key, value);
  } else if (key == "n0") {
    cfg.n0 = positive();
  } else if (key == "T0") {
    cfg.T0 = positive();
  } else if (key == "X0") {
    cfg.X0 = positive();
  } else if (key == "Y0") {
    cfg.Y0 = positive();
  } else if (key == "Z0") {
    cfg.Z0 = positive();
  } else if (key == "m") {
    cfg.m = positive();
  } else {
    throw ConfigError(fmt::format("unknown setting '{}'", key));
  }
}

using Settings = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines; `#` starts a comment.
inline Settings parse_settings(std::istream& in, const std::string& origin) {
  CLI::ConfigTOML parser;
  Settings out;
  for (const CLI::ConfigItem& item : parser.from_config(in)) {
    if (!item.parents.empty()) {
      throw ConfigError(fmt::format("{}: sections are not supported ('{}')", origin, item.fullname()));
    }
    if (item.inputs.size() != 1) {
      throw ConfigError(fmt::format("{}: '{}' needs exactly one value", origin, item.name));
    }
    out.emplace_back(item.name, item.inputs.front());
  }
  return out;
}

inline Settings load_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read configuration file '{}'", path));
  return parse_settings(in, path);
}

inline void apply_settings(RunConfig& cfg, const Settings& settings) {
  for (const auto& [key, value] : settings) apply_setting(cfg, key, value);
}

inline ModelKind require_model(const RunConfig& cfg) {
  if (!cfg.model) throw ConfigError("missing required setting: model (--model 1d|2d|3d|elliptic)");
  return *cfg.model;
}

/// Initial state from the configuration. With `fill_defaults`, missing
/// variances take the reference values X = 1, Y = 1.5, Z = 0.8.
inline State initial_state(const RunConfig& cfg, bool fill_defaults = false) {
  const ModelKind kind = require_model(cfg);
  const std::size_t d = dimension(kind);
  constexpr std::array<const char*, 3> names{"X", "Y", "Z"};
  constexpr std::array<double, 3> fallback{1.0, 1.5, 0.8};
  std::vector<double> q(d), v(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (!cfg.q[i] && !fill_defaults) {
      throw ConfigError(fmt::format("missing required setting for model {}: {} (--{})",
                                    to_string(kind), names[i], names[i]));
    }
    q[i] = cfg.q[i].value_or(fallback[i]);
    v[i] = cfg.qdot[i];
  }
  for (std::size_t i = d; i < 3; ++i) {
    if (cfg.q[i] || cfg.qdot[i] != 0.0) {
      throw ConfigError(fmt::format("{} is not a coordinate of the {} model", names[i], to_string(kind)));
    }
  }
  try {
    return State(kind, cfg.t_start, q, v);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

inline PhysicalParams physical_params(const RunConfig& cfg, ModelKind kind) {
  PhysicalParams p;
  p.n0 = cfg.n0;
  p.T0 = cfg.T0;
  p.X0 = cfg.X0;
  p.m = cfg.m;
  if (kind == ModelKind::OneD) p.Y0.reset();
  else p.Y0 = cfg.Y0;
  if (kind == ModelKind::ThreeD) p.Z0 = cfg.Z0;
  return p;
}

inline IntegratorConfig integrator_config(const RunConfig& cfg) {
  try {
    cfg.integrator.validate(cfg.t_start);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return cfg.integrator;
}

inline std::string fmt_num(double v) { return fmt::format("{:.17g}", v); }

inline std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_num(*v) : std::string(); }

inline nlohmann::ordered_json json_opt(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline nlohmann::ordered_json config_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["model"] = cfg.model ? to_string(*cfg.model) : "";
  j["t_start"] = cfg.t_start;
  j["t_end"] = cfg.integrator.t_end;
  j["rel_tol"] = cfg.integrator.rel_tol;
  j["abs_tol"] = cfg.integrator.abs_tol;
  j["max_step"] = cfg.integrator.max_step;
  j["sample_interval"] = cfg.integrator.sample_interval;
  return j;
}

// ---------------------------------------------------------------- simulate

inline const std::vector<std::string>& trajectory_columns() {
  static const std::vector<std::string> cols{"t",    "X",    "Y", "Z",      "Xdot", "Ydot",
                                             "Zdot", "H",    "I", "Itilde", "J"};
  return cols;
}

/// One output row; absent coordinates and invariants are empty.
inline std::vector<std::optional<double>> trajectory_row(const State& s) {
  const InvariantRow inv = invariant_row(s);
  std::vector<std::optional<double>> row{s.t()};
  for (std::size_t i = 0; i < 3; ++i) row.push_back(i < s.dim() ? std::optional(s.q(i)) : std::nullopt);
  for (std::size_t i = 0; i < 3; ++i) {
    row.push_back(i < s.dim() ? std::optional(s.qdot(i)) : std::nullopt);
  }
  row.push_back(inv.H);
  row.push_back(inv.I);
  row.push_back(inv.Itilde);
  row.push_back(inv.J);
  return row;
}

inline void write_csv_meta(std::ostream& out, const std::string& command, const RunConfig& cfg) {
  out << fmt::format(
      "# schema={} command={} model={} t_start={} t_end={} rel_tol={} abs_tol={} sample_interval={}\n",
      kSchemaVersion, command, cfg.model ? to_string(*cfg.model) : "", fmt_num(cfg.t_start),
      fmt_num(cfg.integrator.t_end), fmt_num(cfg.integrator.rel_tol),
      fmt_num(cfg.integrator.abs_tol), fmt_num(cfg.integrator.sample_interval));
}

inline int run_simulate(const RunConfig& cfg, std::ostream& out) {
  const State s0 = initial_state(cfg);
  const IntegratorConfig ic = integrator_config(cfg);
  spdlog::info("simulate: model={} t=[{}, {}]", to_string(s0.kind()), s0.t(), ic.t_end);
  const Trajectory traj = integrate(s0, ic);
  spdlog::debug("simulate: {} accepted, {} rejected steps", traj.stats().accepted_steps,
                traj.stats().rejected_steps);

  if (cfg.format == OutputFormat::Csv) {
    write_csv_meta(out, "simulate", cfg);
    const auto& cols = trajectory_columns();
    out << fmt::format("{}\n", fmt::join(cols, ","));
    for (const State& s : traj) {
      std::vector<std::string> cells;
      for (const auto& v : trajectory_row(s)) cells.push_back(fmt_opt(v));
      out << fmt::format("{}\n", fmt::join(cells, ","));
    }
  } else {
    nlohmann::ordered_json j;
    j["schema"] = kSchemaVersion;
    j["command"] = "simulate";
    j["config"] = config_json(cfg);
    j["columns"] = trajectory_columns();
    j["rows"] = nlohmann::ordered_json::array();
    for (const State& s : traj) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (const auto& v : trajectory_row(s)) row.push_back(json_opt(v));
      j["rows"].push_back(std::move(row));
    }
    j["stats"] = {{"accepted_steps", traj.stats().accepted_steps},
                  {"rejected_steps", traj.stats().rejected_steps},
                  {"rhs_evaluations", traj.stats().rhs_evaluations}};
    out << j.dump(2) << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- analytic

struct AnalyticRow {
  double t = 0.0;
  double r = 0.0;
  double rdot = 0.0;
  double ttilde = 0.0;
  double phi = 0.0;
  std::optional<double> r_numeric;
};

struct AnalyticRun {
  std::vector<AnalyticRow> rows;
  std::optional<double> max_abs_dr;
};

/// Radial law, reduced time and angle on the sample grid. Parameters come
/// either from (H, I, t0, phi0, sign0) or from an initial state.
inline AnalyticRun analytic_run(const RunConfig& cfg) {
  const ModelKind kind = require_model(cfg);
  if (kind != ModelKind::TwoD && kind != ModelKind::EllipticThreeD) {
    throw ConfigError("analytic: the radial/angular solution covers the 2d and elliptic models");
  }
  const bool by_invariants = cfg.H || cfg.I;
  RadialSolution radial_sol;
  AngularSolution ang;
  std::optional<State> start;
  try {
    if (by_invariants) {
      if (!cfg.H || !cfg.I) throw ConfigError("analytic: H and I must be given together");
      if (cfg.q[0] || cfg.q[1]) throw ConfigError("analytic: give either (H, I) or an initial state");
      if (cfg.t_start < cfg.t0) throw ConfigError("analytic: t-start must not precede t0");
      radial_sol = RadialSolution{*cfg.H, *cfg.I, cfg.t0};
      radial_sol.validate();
      ang = AngularSolution{*cfg.I, cfg.phi0.value_or(angular_potential_argmin(kind)), cfg.sign0, 0.0};
      // the matching phase point at t0, where ṙ = 0
      if (cfg.compare_numeric) {
        const double r = std::sqrt(*cfg.I / *cfg.H);
        const double excess = std::max(0.0, *cfg.I - angular_potential(kind, ang.phi0));
        start = to_cartesian(
            PolarState{r, ang.phi0, 0.0, cfg.sign0 * std::sqrt(2.0 * excess) / (r * r), 0.0}, kind,
            cfg.t0);
      }
    } else {
      start = initial_state(cfg);
      const PolarState p0 = to_polar(*start);
      radial_sol = RadialSolution::from_state(*start);
      ang = AngularSolution{radial_sol.I, p0.phi, p0.phidot < 0.0 ? -1 : 1,
                            time_reparam(radial_sol, start->t())};
    }
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("analytic: {}", e.what()));
  }

  const IntegratorConfig ic = integrator_config(cfg);
  std::vector<double> times{cfg.t_start};
  for (double t : sample_grid(cfg.t_start, ic.t_end, ic.sample_interval)) times.push_back(t);
  std::vector<double> tt;
  for (double t : times) tt.push_back(std::max(ang.ttilde0, time_reparam(radial_sol, t)));
  std::vector<AngularSample> angles;
  try {
    angles = angular_quadrature(ang, kind, tt);
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("analytic: {}", e.what()));
  }

  AnalyticRun run;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const RadialPoint rp = radial(radial_sol, times[i]);
    run.rows.push_back({times[i], rp.r, rp.rdot, angles[i].ttilde, angles[i].phi, std::nullopt});
  }

  if (cfg.compare_numeric) {
    // Integrate from the phase point and sample at the analytic grid.
    std::vector<State> numeric;
    if (start->t() < times.front()) {
      IntegratorConfig pre = ic;
      pre.t_end = times.front();
      pre.sample_interval = times.front() - start->t();
      start = integrate(*start, pre).back();
    }
    IntegratorConfig main = ic;
    main.t_end = times.back();
    const Trajectory traj = integrate(*start, main);
    double worst = 0.0;
    for (std::size_t i = 0; i < run.rows.size(); ++i) {
      const PolarState p = to_polar(traj[i]);
      run.rows[i].r_numeric = p.r;
      worst = std::max(worst, std::abs(p.r - run.rows[i].r));
    }
    run.max_abs_dr = worst;
  }
  return run;
}

inline constexpr double kAnalyticComparisonBound = 1e-6;

inline int run_analytic(const RunConfig& cfg, std::ostream& out) {
  const AnalyticRun run = analytic_run(cfg);
  const bool ok = !run.max_abs_dr || *run.max_abs_dr <= kAnalyticComparisonBound;
  if (cfg.format == OutputFormat::Csv) {
    write_csv_meta(out, "analytic", cfg);
    out << (cfg.compare_numeric ? "t,r,rdot,ttilde,phi,r_numeric,abs_dr\n" : "t,r,rdot,ttilde,phi\n");
    for (const AnalyticRow& row : run.rows) {
      out << fmt::format("{},{},{},{},{}", fmt_num(row.t), fmt_num(row.r), fmt_num(row.rdot),
                         fmt_num(row.ttilde), fmt_num(row.phi));
      if (row.r_numeric) {
        out << fmt::format(",{},{}", fmt_num(*row.r_numeric), fmt_num(std::abs(*row.r_numeric - row.r)));
      }
      out << "\n";
    }
    if (run.max_abs_dr) {
      out << fmt::format("# max_abs_dr={} bound={} passed={}\n", fmt_num(*run.max_abs_dr),
                         fmt_num(kAnalyticComparisonBound), ok);
    }
  } else {
    nlohmann::ordered_json j;
    j["schema"] = kSchemaVersion;
    j["command"] = "analytic";
    j["config"] = config_json(cfg);
    j["columns"] = cfg.compare_numeric
                       ? std::vector<std::string>{"t", "r", "rdot", "ttilde", "phi", "r_numeric"}
                       : std::vector<std::string>{"t", "r", "rdot", "ttilde", "phi"};
    j["rows"] = nlohmann::ordered_json::array();
    for (const AnalyticRow& row : run.rows) {
      nlohmann::ordered_json r{row.t, row.r, row.rdot, row.ttilde, row.phi};
      if (row.r_numeric) r.push_back(*row.r_numeric);
      j["rows"].push_back(std::move(r));
    }
    if (run.max_abs_dr) {
      j["comparison"] = {{"max_abs_dr", *run.max_abs_dr},
                         {"bound", kAnalyticComparisonBound},
                         {"passed", ok}};
    }
    out << j.dump(2) << "\n";
  }
  if (!ok) spdlog::error("analytic: numeric comparison exceeded {}", kAnalyticComparisonBound);
  return ok ? kOk : kVerificationFailed;
}

// ------------------------------------------------------------------ verify

struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  /// Passes when value ≤ bound, or value ≥ bound for lower bounds.
  bool lower_bound = false;

  bool passed() const { return lower_bound ? value >= bound : value <= bound; }
};

/// Checks on a configuration: invariant drift, analytic agreement, Noether
/// machinery, form invariance, and (1d/2d) the fluid equations and energy.
inline std::vector<Check> verification_checks(const RunConfig& cfg) {
  const State s0 = initial_state(cfg, true);
  const ModelKind kind = s0.kind();
  const IntegratorConfig ic = integrator_config(cfg);
  const bool planar = kind == ModelKind::TwoD || kind == ModelKind::EllipticThreeD;
  std::vector<Check> checks;

  const Trajectory traj = integrate(s0, ic);
  const InvariantReport report = invariant_report(traj);
  checks.push_back({"drift_H", report.drift.H, cfg.drift_bound});
  if (report.drift.I) checks.push_back({"drift_I", *report.drift.I, cfg.drift_bound});
  if (report.drift.Itilde) checks.push_back({"drift_Itilde", *report.drift.Itilde, cfg.drift_bound});
  checks.push_back({"drift_J", report.drift.J, cfg.drift_bound});
  if (planar) {
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& row : report.series) lowest = std::min(lowest, *row.I);
    checks.push_back({"ermakov_lower_bound", lowest, ermakov_lower_bound(kind), true});
  }

  if (cfg.check_analytic) {
    std::vector<double> times;
    for (const State& s : traj) times.push_back(s.t());
    if (kind == ModelKind::ThreeD) {
      const double H = hamiltonian(s0);
      double virial = 0.0, r0sq = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        virial += s0.q(i) * s0.qdot(i);
        r0sq += s0.q(i) * s0.q(i);
      }
      double worst = 0.0;
      for (const State& s : traj) {
        const double r = std::hypot(s.q(0), s.q(1), s.q(2));
        const double exact = radial_3d(H, -virial, std::sqrt(r0sq), s.t() - s0.t()).r;
        worst = std::max(worst, std::abs(r - exact) / exact);
      }
      checks.push_back({"analytic_radius_3d", worst, 1e-7});
    } else {
      const auto exact = analytic_states(s0, times);
      double worst = 0.0;
      for (std::size_t i = 0; i < exact.size(); ++i) {
        for (std::size_t k = 0; k < s0.dim(); ++k) {
          worst = std::max(worst, std::abs(exact[i].q(k) - traj[i].q(k)) / std::max(1.0, traj[i].q(k)));
          worst = std::max(worst, std::abs(exact[i].qdot(k) - traj[i].qdot(k)));
        }
      }
      checks.push_back({"analytic_vs_numeric", worst, 1e-6});
    }
  }

  if (kind == ModelKind::EllipticThreeD) {
    double worst_polar = 0.0, worst_tilde = 0.0;
    for (const State& s : traj) {
      const double twice = 2.0 * ermakov_invariant(s);
      worst_polar = std::max(worst_polar,
                             std::abs(polar_invariants(to_polar(s), kind).I - twice) / twice);
      worst_tilde = std::max(worst_tilde, std::abs(ermakov_invariant_tilde(s) - twice));
    }
    checks.push_back({"elliptic_polar_matches_twice_I", worst_polar, 1e-10});
    checks.push_back({"elliptic_tilde_is_twice_I", worst_tilde, 1e-12});
    // The (3/2)(cos²φ sinφ)^{-2/3} normalization evaluated at X = Y against
    // 2I = 9/2; the check passes when the mismatch is detected.
    const State ref(kind, 0.0, {1.0, 1.0}, {0.0, 0.0});
    const PolarState p = to_polar(ref);
    const double c2s = std::cos(p.phi) * std::cos(p.phi) * std::sin(p.phi);
    const double mismatch = std::abs(1.5 * std::pow(c2s, -2.0 / 3.0) - 2.0 * ermakov_invariant(ref));
    checks.push_back({"alternative_reduced_time_normalization_mismatch", mismatch, 1.0, true});
  }

  if (cfg.check_symmetry) {
    const auto scaling = scaling_symmetry();
    const auto shift = time_translation();
    double res_scale = 0.0, res_shift = 0.0, j_err = 0.0, gi = 0.0, dyn_res = 0.0, dyn_inv = 0.0;
    for (const State& s : traj) {
      res_scale = std::max(res_scale, std::abs(noether_condition_residual(scaling, s)));
      res_shift = std::max(res_shift, std::abs(noether_condition_residual(shift, s)));
      const double j = noether_invariant(s);
      j_err = std::max(j_err, std::abs(noether_invariant_from(scaling, s) - j) / std::max(1.0, std::abs(j)));
      if (planar) {
        gi = std::max(gi, std::abs(extended_generator_apply(
                              scaling, [](const State& x) { return ermakov_invariant(x); }, s)));
      }
      if (kind == ModelKind::TwoD) {
        const double I = ermakov_invariant(s);
        auto tau_zero = [](const auto&, const auto&, auto t) { return decltype(t)(0.0); };
        auto tau_one = [](const auto&, const auto&, auto t) { return decltype(t)(1.0); };
        auto tau_xv = [](const auto& q, const auto& v, auto) { return q[0] * v[1]; };
        for (const auto& r : {dynamical_symmetry_check(tau_zero, s), dynamical_symmetry_check(tau_one, s),
                              dynamical_symmetry_check(tau_xv, s)}) {
          dyn_res = std::max(dyn_res, std::abs(r.residual));
          dyn_inv = std::max(dyn_inv, std::abs(r.invariant - I) / I);
        }
      }
    }
    checks.push_back({"noether_residual_scaling", res_scale, 1e-10});
    checks.push_back({"noether_residual_time_translation", res_shift, 1e-10});
    checks.push_back({"noether_J_matches_closed_form", j_err, 1e-12});
    if (planar) checks.push_back({"extended_generator_annihilates_I", gi, 1e-6});
    if (kind == ModelKind::TwoD) {
      checks.push_back({"dynamical_symmetry_residual", dyn_res, 1e-8});
      checks.push_back({"dynamical_symmetry_invariant_is_I", dyn_inv, 1e-10});
    }
  }

  // Densely sampled stretch for the finite-difference checks.
  std::optional<Trajectory> dense;
  auto dense_traj = [&]() -> const Trajectory& {
    if (!dense) {
      IntegratorConfig d = ic;
      d.t_end = s0.t() + std::min(5.0, ic.t_end - s0.t());
      d.sample_interval = 0.01;
      dense = integrate(s0, d);
    }
    return *dense;
  };

  if (cfg.check_symmetry) {
    double worst = 0.0;
    for (double beta : {0.5, 2.0, 5.0}) worst = std::max(worst, ode_residual(scaled_trajectory(dense_traj(), beta)));
    checks.push_back({"scaling_form_invariance", worst, 1e-5});
    // central difference of the finite map at beta = 1 ± 1e-6
    const double eps = 1e-6;
    double near = 0.0;
    for (const State& s : traj) {
      const PhaseTangent g = scaling_generator_action(s);
      const PhaseTangent up = scaling_displacement(s, eps);
      const PhaseTangent down = scaling_displacement(s, -eps);
      auto mismatch = [&](double a, double b, double exact) {
        return std::abs((a - b) / (2.0 * eps) - exact) / std::max(1.0, std::abs(exact));
      };
      near = std::max(near, mismatch(up.t, down.t, g.t));
      for (std::size_t i = 0; i < s.dim(); ++i) {
        near = std::max({near, mismatch(up.q[i], down.q[i], g.q[i]),
                         mismatch(up.qdot[i], down.qdot[i], g.qdot[i])});
      }
    }
    checks.push_back({"scaling_near_identity_generator", near, 1e-10});
  }

  if (cfg.check_hydro && (kind == ModelKind::OneD || kind == ModelKind::TwoD)) {
    const PhysicalParams params = physical_params(cfg, kind);
    const Trajectory& fine = dense_traj();
    const auto probes = default_probes(dimensionalize(params, fine.front()));
    double worst = 0.0;
    for (const auto& r : pde_residuals(params, fine, probes)) worst = std::max(worst, r.max_abs());
    checks.push_back({"pde_residuals", worst, 1e-5});

    const double e0 = total_energy(params, dimensionalize(params, traj.front()));
    double drift = 0.0;
    std::vector<double> ratios;
    for (const State& s : traj) {
      const double e = total_energy(params, dimensionalize(params, s));
      drift = std::max(drift, std::abs(e - e0) / e0);
      ratios.push_back(e / hamiltonian(s));
    }
    checks.push_back({"total_energy_constancy", drift, 1e-8});
    double mean = 0.0, var = 0.0;
    for (double r : ratios) mean += r / static_cast<double>(ratios.size());
    for (double r : ratios) var += (r - mean) * (r - mean) / static_cast<double>(ratios.size());
    checks.push_back({"total_energy_over_H_spread", std::sqrt(var) / mean, 1e-8});
  }
  return checks;
}

inline int run_verify(const RunConfig& cfg, std::ostream& out) {
  const std::vector<Check> checks = verification_checks(cfg);
  bool all = true;
  nlohmann::ordered_json j;
  j["schema"] = kSchemaVersion;
  j["command"] = "verify";
  j["config"] = config_json(cfg);
  j["checks"] = nlohmann::ordered_json::array();
  for (const Check& c : checks) {
    all = all && c.passed();
    if (!c.passed()) spdlog::warn("verify: {} failed ({} vs bound {})", c.name, c.value, c.bound);
    j["checks"].push_back({{"name", c.name},
                           {"passed", c.passed()},
                           {"value", c.value},
                           {"bound", c.bound},
                           {"kind", c.lower_bound ? "min" : "max"}});
  }
  j["passed"] = all;
  out << j.dump(2) << "\n";
  return all ? kOk : kVerificationFailed;
}

// ----------------------------------------------------------------- driver

/// Runs one configuration, mapping failures to exit codes.
inline int execute(const RunConfig& cfg, std::ostream& out) {
  try {
    if (cfg.command == "simulate") return run_simulate(cfg, out);
    if (cfg.command == "verify") return run_verify(cfg, out);
    if (cfg.command == "analytic") return run_analytic(cfg, out);
    throw ConfigError(fmt::format("unknown command '{}'", cfg.command));
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const IntegrationFailure& e) {
    spdlog::error("{}", e.what());
    return kRuntime;
  } catch (const DomainError& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kRuntime;
  }
}

inline int execute_to_path(const RunConfig& cfg) {
  if (cfg.out == "-") return execute(cfg, std::cout);
  // Render fully before touching the file so failures leave no partial output.
  std::ostringstream buffer;
  const int code = execute(cfg, buffer);
  if (code == kUsage || code == kRuntime) return code;
  std::ofstream file(cfg.out);
  if (!file) {
    spdlog::error("cannot write '{}'", cfg.out);
    return kRuntime;
  }
  file << buffer.str();
  return code;
}

/// Runs independent configurations on up to `jobs` threads; the result is
/// the largest exit code.
inline int execute_all(const std::vector<RunConfig>& configs, unsigned jobs) {
  std::vector<std::string> outs;
  for (const RunConfig& c : configs) {
    if (configs.size() > 1 && c.out == "-") {
      spdlog::error("sweep: every run needs its own 'out' path");
      return kUsage;
    }
    if (std::find(outs.begin(), outs.end(), c.out) != outs.end()) {
      spdlog::error("sweep: output path '{}' used twice", c.out);
      return kUsage;
    }
    outs.push_back(c.out);
  }
  std::vector<int> codes(configs.size(), kOk);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) codes[i] = execute_to_path(configs[i]);
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return codes.empty() ? kOk : *std::max_element(codes.begin(), codes.end());
}

inline void configure_logging() {
  spdlog::set_default_logger(spdlog::stderr_logger_mt("fireball"));
  spdlog::set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("FIREBALL_LOG")) {
    const std::string v(env);
    if (v == "error") level = spdlog::level::err;
    else if (v == "warn") level = spdlog::level::warn;
    else if (v == "info") level = spdlog::level::info;
    else if (v == "debug") level = spdlog::level::debug;
  }
  spdlog::set_level(level);
}

inline constexpr const char* kUsageLine =
    "usage: fireball {simulate|verify|analytic} --model {1d|2d|3d|elliptic} [--X .. --Zdot] "
    "[--config FILE] [options]; see --help\n";

/// Full command-line entry point.
inline int main(int argc, char** argv) {
  CLI::App app{"Reduced Gaussian-fireball dynamics: simulate, verify, analytic"};
  app.set_version_flag("--version", "fireball 1.0");
  std::string command;
  app.add_option("command", command, "simulate | verify | analytic")
      ->required()
      ->check(CLI::IsMember({"simulate", "verify", "analytic"}));
  std::string config_path;
  std::vector<std::string> sweeps;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--sweep", sweeps, "configuration file per sweep run (repeatable)");

  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> options;
  const std::map<std::string, std::string> help{
      {"model", "1d | 2d | 3d | elliptic"},
      {"X", "initial variance X (dimensionless)"},
      {"Y", "initial variance Y"},
      {"Z", "initial variance Z (3d)"},
      {"Xdot", "initial rate dX/dt (default 0)"},
      {"Ydot", "initial rate dY/dt (default 0)"},
      {"Zdot", "initial rate dZ/dt (default 0)"},
      {"t-start", "initial time (default 0)"},
      {"t-end", "final time (default 10)"},
      {"rel-tol", "relative tolerance (default 1e-10)"},
      {"abs-tol", "absolute tolerance (default 1e-12)"},
      {"max-step", "largest step (default 1)"},
      {"initial-step", "first trial step (default 1e-3)"},
      {"sample-interval", "output spacing (default 0.1)"},
      {"out", "output path, '-' for stdout (default)"},
      {"format", "csv | json (default csv)"},
      {"jobs", "concurrent sweep runs (default 1)"},
      {"H", "analytic: energy"},
      {"I", "analytic: Ermakov invariant (2I for elliptic)"},
      {"t0", "analytic: time of closest approach (default 0)"},
      {"phi0", "analytic: angle at t0 (default: potential minimum)"},
      {"sign0", "analytic: initial sign of dphi, 1 or -1"},
      {"drift-bound", "verify: relative drift bound (default 1e-8)"},
      {"check-analytic", "verify: compare with closed forms (default true)"},
      {"check-symmetry", "verify: Noether and scaling checks (default true)"},
      {"check-hydro", "verify: fluid equations and energy (default true)"},
      {"n0", "reference density"},
      {"T0", "reference temperature"},
      {"X0", "reference variance X0"},
      {"Y0", "reference variance Y0"},
      {"Z0", "reference variance Z0"},
      {"m", "particle mass"}};
  for (const std::string& key : setting_keys()) {
    if (key == "compare-numeric") continue;
    options[key] = app.add_option("--" + key, raw[key], help.at(key));
  }
  bool compare = false;
  options["compare-numeric"] = app.add_flag("--compare-numeric", compare, "analytic: also integrate and compare r");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  configure_logging();
  try {
    Settings flags;
    for (const auto& [key, opt] : options) {
      if (opt->count() == 0) continue;
      flags.emplace_back(key, key == "compare-numeric" ? std::string(compare ? "true" : "false") : raw[key]);
    }
    const Settings base = config_path.empty() ? Settings{} : load_settings(config_path);
    auto build = [&](const Settings& sweep) {
      RunConfig cfg;
      cfg.command = command;
      apply_settings(cfg, base);
      apply_settings(cfg, sweep);
      apply_settings(cfg, flags);
      return cfg;
    };
    std::vector<RunConfig> configs;
    if (sweeps.empty()) {
      configs.push_back(build({}));
    } else {
      for (const std::string& path : sweeps) configs.push_back(build(load_settings(path)));
    }
    const int code = execute_all(configs, build({}).jobs);
    if (code == kUsage) std::cerr << kUsageLine;
    return code;
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    std::cerr << kUsageLine;
    return kUsage;
  }
}

}  // namespace fireball::cli
