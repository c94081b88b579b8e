#pragma once

// Config ingestion, the four commands and their tabular outputs.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qinv/algebra.hpp"
#include "qinv/arbitration.hpp"
#include "qinv/dynamics.hpp"
#include "qinv/errors.hpp"
#include "qinv/invariant.hpp"
#include "qinv/model.hpp"
#include "qinv/phases.hpp"

#ifndef QINV_VERSION
#define QINV_VERSION "0.0.0"
#endif

namespace qinv::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int { kSuccess = 0, kDomainFailure = 2, kConfigError = 64, kInternalFailure = 70 };

struct RunConfig {
  AlgebraKind algebra = AlgebraKind::su2();
  std::optional<double> j;
  std::optional<std::size_t> fock_dim;
  ModelParams params;
  double t_final = 0.0;
  std::size_t steps = 64;
  Method integrator = Method::magnus2;
  std::size_t initial_n = 0;
  std::string output_path;
  std::string format = "csv";
  std::optional<GridAxis> grid_omega_drive, grid_coupling, grid_phase_rate;
};

namespace detail {

inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> k{"algebra", "j",          "fock_dim",  "Omega",
                                       "G",       "omega",      "t_final",   "steps",
                                       "integrator", "initial_n", "output_path", "format",
                                       "grid_Omega", "grid_G",   "grid_omega"};
  return k;
}

inline double number(const Json& o, const std::string& key) {
  const Json& v = o.at(key);
  if (!v.is_number()) throw ConfigError("config: '" + key + "' must be a number", key);
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("config: '" + key + "' must be finite", key);
  return x;
}

inline std::size_t count(const Json& o, const std::string& key) {
  const Json& v = o.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError("config: '" + key + "' must be a non-negative integer", key);
  return static_cast<std::size_t>(v.get<long long>());
}

inline std::string text(const Json& o, const std::string& key) {
  const Json& v = o.at(key);
  if (!v.is_string()) throw ConfigError("config: '" + key + "' must be a string", key);
  return v.get<std::string>();
}

inline double require_number(const Json& o, const std::string& key) {
  if (!o.contains(key)) throw ConfigError("config: missing required field '" + key + "'", key);
  return number(o, key);
}

inline std::optional<GridAxis> axis(const Json& o, const std::string& key) {
  if (!o.contains(key)) return std::nullopt;
  const Json& v = o.at(key);
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
      !v[2].is_number_integer() || v[2].get<long long>() < 1)
    throw ConfigError("config: '" + key + "' must be [min, max, count] with count >= 1", key);
  GridAxis a{v[0].get<double>(), v[1].get<double>(), static_cast<std::size_t>(v[2].get<long long>())};
  if (!std::isfinite(a.min) || !std::isfinite(a.max))
    throw ConfigError("config: '" + key + "' bounds must be finite", key);
  return a;
}

}  // namespace detail

inline RunConfig parse_config(const std::string& source) {
  Json o;
  try {
    o = Json::parse(source);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what(), "");
  }
  if (!o.is_object()) throw ConfigError("config: top level must be a JSON object", "");
  for (const auto& [k, v] : o.items())
    if (!detail::known_keys().count(k)) throw ConfigError("config: unknown field '" + k + "'", k);

  RunConfig c;
  if (!o.contains("algebra")) throw ConfigError("config: missing required field 'algebra'", "algebra");
  const std::string alg = detail::text(o, "algebra");
  if (alg == "su2")
    c.algebra = AlgebraKind::su2();
  else if (alg == "su11")
    c.algebra = AlgebraKind::su11();
  else
    throw ConfigError("config: 'algebra' must be \"su2\" or \"su11\"", "algebra");

  if (c.algebra.is_su2()) {
    if (o.contains("fock_dim")) throw ConfigError("config: 'fock_dim' is for su11 only", "fock_dim");
    c.j = detail::require_number(o, "j");
    const double twice = 2.0 * *c.j;
    if (twice < 1.0 || twice != std::round(twice))
      throw ConfigError("config: 'j' must be a positive half-integer", "j");
  } else {
    if (o.contains("j")) throw ConfigError("config: 'j' is for su2 only", "j");
    c.fock_dim = o.contains("fock_dim") ? detail::count(o, "fock_dim") : 48;
    if (*c.fock_dim < static_cast<std::size_t>(kMinFockDim))
      throw ConfigError("config: 'fock_dim' must be >= 6", "fock_dim");
  }

  c.params.omega_drive = detail::require_number(o, "Omega");
  c.params.coupling = detail::require_number(o, "G");
  c.params.phase_rate = detail::require_number(o, "omega");

  if (o.contains("t_final")) {
    c.t_final = detail::number(o, "t_final");
    if (!(c.t_final > 0.0)) throw ConfigError("config: 't_final' must be > 0", "t_final");
  } else {
    c.t_final = c.params.phase_rate == 0.0 ? 4.0 * std::numbers::pi : c.params.period();
  }
  if (o.contains("steps")) c.steps = detail::count(o, "steps");
  if (c.steps < 16) throw ConfigError("config: 'steps' must be >= 16", "steps");
  if (o.contains("integrator")) {
    const std::string m = detail::text(o, "integrator");
    if (m == "rk4")
      c.integrator = Method::rk4;
    else if (m == "magnus2")
      c.integrator = Method::magnus2;
    else
      throw ConfigError("config: 'integrator' must be \"rk4\" or \"magnus2\"", "integrator");
  }
  if (o.contains("initial_n")) c.initial_n = detail::count(o, "initial_n");
  if (o.contains("output_path")) c.output_path = detail::text(o, "output_path");
  if (o.contains("format")) {
    c.format = detail::text(o, "format");
    if (c.format != "csv" && c.format != "json")
      throw ConfigError("config: 'format' must be \"csv\" or \"json\"", "format");
  }
  c.grid_omega_drive = detail::axis(o, "grid_Omega");
  c.grid_coupling = detail::axis(o, "grid_G");
  c.grid_phase_rate = detail::axis(o, "grid_omega");
  return c;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read '" + path + "'", "");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline Representation make_representation(const RunConfig& c) {
  return c.algebra.is_su2() ? su2_generators(*c.j) : su11_boson_generators(*c.fock_dim);
}

/// 64-bit FNV-1a, as 16 hex digits.
inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---- tables ----

struct Column {
  std::string name;
  bool is_text = false;
  std::vector<double> values;
  std::vector<std::string> labels;
};

struct Table {
  std::deque<Column> columns;  // stable references across add()

  Column& add(std::string name, bool is_text = false) {
    columns.push_back({std::move(name), is_text, {}, {}});
    return columns.back();
  }
  std::size_t rows() const {
    if (columns.empty()) return 0;
    return columns.front().is_text ? columns.front().labels.size() : columns.front().values.size();
  }
  const Column& at(const std::string& name) const {
    for (const auto& c : columns)
      if (c.name == name) return c;
    throw ContractError("Table: no column '" + name + "'");
  }
};

/// 17 significant digits; NaN is an empty field.
inline std::string format_real(double x) {
  if (std::isnan(x)) return "";
  if (x == 0.0) x = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_csv(const Table& t, std::ostream& out) {
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c].name;
  out << '\n';
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      const Column& col = t.columns[c];
      out << (c ? "," : "") << (col.is_text ? col.labels[r] : format_real(col.values[r]));
    }
    out << '\n';
  }
}

/// {"column": [values...], ...} in column order; NaN becomes null.
inline Json table_json(const Table& t) {
  Json j = Json::object();
  for (const auto& col : t.columns) {
    Json arr = Json::array();
    if (col.is_text)
      for (const auto& s : col.labels) arr.push_back(s);
    else
      for (double v : col.values) {
        if (std::isnan(v))
          arr.push_back(nullptr);
        else
          arr.push_back(v);
      }
    j[col.name] = std::move(arr);
  }
  return j;
}

inline void write_table(const Table& t, const std::string& format, std::ostream& out) {
  if (format == "json")
    out << table_json(t).dump(2) << '\n';
  else
    write_csv(t, out);
}

// ---- commands ----

struct VerifyResult {
  Json report;
  bool pass = false;
};

namespace detail {

inline Json check(double residual, double tolerance) {
  Json j = Json::object();
  j["residual"] = residual;
  j["tolerance"] = tolerance;
  j["pass"] = residual <= tolerance;
  return j;
}

}  // namespace detail

/// Every residual of the algebra and invariant checks. Throws RegimeError /
/// SingularConditionError when no real invariant exists.
inline VerifyResult run_verify(const RunConfig& c) {
  const Representation rep = make_representation(c);
  const ModelParams& p = c.params;
  Json checks = Json::object();

  const auto comm = check_commutation(rep);
  checks["commutation_k0_kplus"] = detail::check(comm.k0_kplus, tol::commutation);
  checks["commutation_k0_kminus"] = detail::check(comm.k0_kminus, tol::commutation);
  checks["commutation_kplus_kminus"] = detail::check(comm.kplus_kminus, tol::commutation);

  const double eps = solve_epsilon(rep.kind(), p);
  checks["auxiliary_condition"] =
      detail::check(std::abs(auxiliary_residual(rep.kind(), p, eps)), tol::auxiliary);

  const double period = p.phase_rate == 0.0 ? 4.0 * std::numbers::pi : p.period();
  double inv_eq = 0.0, pseudo = 0.0, dyson = 0.0;
  std::array<double, 4> sim{};
  for (int k = 0; k < 8; ++k) {
    const double t = period * k / 8.0;
    inv_eq = std::max(inv_eq, check_invariant_equation(rep, p, eps, t, 1e-5).residual);
    const auto ph = check_pseudo_hermiticity(rep, make_frame(rep, p, eps, t));
    pseudo = std::max(pseudo, ph.pseudo_hermitian);
    dyson = std::max(dyson, ph.dyson);
    const auto s = similarity_identities_residual(rep, p, eps, t);
    for (int i = 0; i < 4; ++i) sim[i] = std::max(sim[i], s[i]);
  }
  checks["invariant_equation"] = detail::check(inv_eq, tol::invariant_equation);
  checks["similarity_kplus"] = detail::check(sim[0], tol::similarity_identity);
  checks["similarity_kminus"] = detail::check(sim[1], tol::similarity_identity);
  checks["similarity_k0"] = detail::check(sim[2], tol::similarity_identity);
  checks["similarity_gauge"] = detail::check(sim[3], tol::similarity_identity);
  checks["pseudo_hermiticity"] = detail::check(pseudo, tol::pseudo_hermiticity);
  checks["dyson_reduction"] = detail::check(dyson, tol::dyson_reduction);

  const CMatrix eta = build_metric(rep, p, eps, 0.0);
  const double min_eig = herm_eig(0.5 * (eta + adjoint(eta))).values.front();
  Json pos = Json::object();
  pos["min_eigenvalue"] = min_eig;
  pos["pass"] = min_eig > 0.0;
  checks["metric_positive"] = pos;

  double eig_res = 0.0, gram = 0.0;
  bool frame_ok = true;
  try {
    const auto f = invariant_eigenframe(rep, p, eps, 0.0);
    for (const auto& s : f.states) eig_res = std::max(eig_res, s.eigen_residual / norm2(s.state));
    gram = f.gram_defect;
  } catch (const ConsistencyError&) {
    frame_ok = false;
  }
  Json er = detail::check(eig_res, tol::eigen_residual_rel);
  if (!frame_ok) er["pass"] = false;
  checks["eigen_residual"] = er;
  checks["gram_identity"] = detail::check(gram, tol::gram_identity);

  bool pass = true;
  for (const auto& [k, v] : checks.items()) pass = pass && v["pass"].get<bool>();

  const std::vector<double> pt_times{0.0, 0.3, 1.1, 2.7};
  const auto pt = check_pt_symmetry(rep, p, pt_times);
  Json ptj = Json::object();
  ptj["map"] = pt.map;
  ptj["max_residual"] = pt.max_residual;
  ptj["symmetric"] = pt.symmetric;

  Json r = Json::object();
  r["algebra"] = rep.kind().name();
  r["dim"] = rep.dim();
  r["status"] = pass ? "pass" : "fail";
  r["epsilon"] = eps;
  r["checks"] = checks;
  r["pt_symmetry"] = ptj;
  return {r, pass};
}

inline Table run_solve(const RunConfig& c) {
  const Representation rep = make_representation(c);
  const ModelParams& p = c.params;
  const double eps = solve_epsilon(rep.kind(), p);
  if (c.initial_n >= rep.dim()) throw DomainError("solve: initial_n out of range");
  const auto frame = make_frame(rep, p, eps, 0.0);
  if (std::find(frame.interior.begin(), frame.interior.end(), c.initial_n) == frame.interior.end())
    throw DomainError("solve: initial_n = " + std::to_string(c.initial_n) +
                      " lies outside the truncation guard; raise fock_dim");
  const double lambda = k0_eigenbasis(rep)[c.initial_n].lambda;
  PropagationOptions o;
  o.method = c.integrator;
  o.track_index = c.initial_n;
  const auto grid = uniform_grid(c.t_final, c.steps);
  const Trajectory tr = propagate(rep, p, frame_initial_state(rep, p, eps, c.initial_n), grid, o);

  Table t;
  t.add("t").values = tr.times;
  for (std::size_t i = 0; i < rep.dim(); ++i) {
    auto& re = t.add("re_psi_" + std::to_string(i));
    for (const auto& s : tr.states) re.values.push_back(s[i].real());
    auto& im = t.add("im_psi_" + std::to_string(i));
    for (const auto& s : tr.states) im.values.push_back(s[i].imag());
  }
  t.add("eta_norm").values = tr.eta_norms;
  t.add("invariant_residual").values = tr.invariant_eigen_residuals;
  t.add("phase_numeric").values = tr.extracted_phase;
  auto& an = t.add("phase_analytic");
  for (double x : tr.times) an.values.push_back(lr_phase(rep.kind(), p, eps, lambda, x));
  return t;
}

inline Table run_phases(const RunConfig& c) {
  const Representation rep = make_representation(c);
  ArbitrationOptions o;
  o.method = c.integrator;
  o.t_final = c.t_final;
  const auto rows = phase_table(rep, c.params, o);
  const std::string winner = table_winner(rows);
  Table t;
  auto& n = t.add("n");
  auto& lam = t.add("lambda_n");
  auto& lr = t.add("lr_total");
  auto& dyn = t.add("dynamic");
  auto& geo = t.add("geometric");
  auto& be = t.add("berry_exact");
  auto& ba = t.add("berry_adiabatic");
  auto& w = t.add("arbitration_winner", true);
  for (const auto& r : rows) {
    n.values.push_back(static_cast<double>(r.n));
    lam.values.push_back(r.lambda_n);
    lr.values.push_back(r.lr_total);
    dyn.values.push_back(r.dynamic_part);
    geo.values.push_back(r.geometric_part);
    be.values.push_back(r.berry_exact);
    ba.values.push_back(r.berry_adiabatic);
    w.labels.push_back(winner);
  }
  return t;
}

inline SweepGrid sweep_grid(const RunConfig& c) {
  auto pick = [](const std::optional<GridAxis>& a, double v) { return a ? *a : GridAxis{v, v, 1}; };
  return {pick(c.grid_omega_drive, c.params.omega_drive), pick(c.grid_coupling, c.params.coupling),
          pick(c.grid_phase_rate, c.params.phase_rate)};
}

inline Table run_sweep(const RunConfig& c, unsigned threads = 1) {
  const Representation rep = make_representation(c);
  if (c.initial_n >= rep.dim()) throw DomainError("sweep: initial_n out of range");
  const double lambda = k0_eigenbasis(rep)[c.initial_n].lambda;
  const auto pts = sweep(rep.kind(), sweep_grid(c), lambda, threads);
  Table t;
  auto& om = t.add("Omega");
  auto& g = t.add("G");
  auto& w = t.add("omega");
  auto& reg = t.add("regime", true);
  auto& e = t.add("epsilon");
  auto& sh = t.add("sinh_sq_half");
  auto& be = t.add("berry_exact");
  for (const auto& p : pts) {
    om.values.push_back(p.params.omega_drive);
    g.values.push_back(p.params.coupling);
    w.values.push_back(p.params.phase_rate);
    reg.labels.push_back(regime_name(p.regime));
    e.values.push_back(p.epsilon);
    sh.values.push_back(p.sinh_sq_half);
    be.values.push_back(p.berry_exact);
  }
  return t;
}

// ---- dispatch ----

struct Invocation {
  std::string command;
  std::string config_path;
  std::string out_path;            // empty: stdout
  std::optional<std::string> format;
  unsigned threads = 1;
};

inline void write_sidecar(const std::string& out_path, const std::string& command,
                          const std::string& config_bytes, double wall) {
  Json m = Json::object();
  m["tool"] = "qinv";
  m["version"] = QINV_VERSION;
  m["command"] = command;
  m["config_hash"] = "fnv1a64:" + fnv1a_hex(config_bytes);
  m["wall_time_s"] = wall;
  std::ofstream(out_path + ".meta.json") << m.dump(2) << '\n';
}

inline Json failure_json(const std::string& kind, const std::string& message) {
  Json j = Json::object();
  j["status"] = kind;
  j["message"] = message;
  return j;
}

/// Runs one command; returns the process exit code. Diagnostics go to err.
inline int execute(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  std::string bytes;
  RunConfig cfg;
  try {
    bytes = read_file(inv.config_path);
    cfg = parse_config(bytes);
  } catch (const ConfigError& e) {
    err << "qinv: " << e.what() << (e.field().empty() ? "" : " [field: " + e.field() + "]") << '\n';
    return kConfigError;
  }
  const std::string format = inv.format.value_or(cfg.format);
  const std::string out_path = inv.out_path.empty() ? cfg.output_path : inv.out_path;

  auto emit = [&](const std::string& body) {
    if (out_path.empty()) {
      out << body;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw ConfigError("cannot write '" + out_path + "'", "output_path");
      f << body;
      f.close();
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      write_sidecar(out_path, inv.command, bytes, wall);
    }
  };

  try {
    if (inv.command == "verify") {
      const auto r = run_verify(cfg);
      emit(r.report.dump(2) + "\n");
      return r.pass ? kSuccess : kInternalFailure;
    }
    Table t;
    if (inv.command == "solve")
      t = run_solve(cfg);
    else if (inv.command == "phases")
      t = run_phases(cfg);
    else if (inv.command == "sweep")
      t = run_sweep(cfg, std::max(1u, inv.threads));
    else
      throw ConfigError("unknown command '" + inv.command + "'", "");
    std::ostringstream s;
    write_table(t, format, s);
    emit(s.str());
    return kSuccess;
  } catch (const ConfigError& e) {
    err << "qinv: " << e.what() << (e.field().empty() ? "" : " [field: " + e.field() + "]") << '\n';
    return kConfigError;
  } catch (const RegimeError& e) {
    Json j = failure_json("broken", e.what());
    j["ratio"] = e.ratio();
    err << j.dump() << '\n';
    if (inv.command == "verify") emit(j.dump(2) + "\n");
    return kDomainFailure;
  } catch (const DomainError& e) {
    err << failure_json("domain", e.what()).dump() << '\n';
    return kDomainFailure;
  } catch (const Error& e) {
    err << failure_json("numeric", e.what()).dump() << '\n';
    return kInternalFailure;
  }
}

}  // namespace qinv::cli
