#pragma once

#include <charconv>
#include <cstdlib>
#include <istream>
#include <map>
#include <sstream>

#include "../nonlinear.hpp"

namespace expparadiag::bench {

enum class Problem {
  Heat1d,
  Heat2d,
  Ade1d,
  Schrodinger1d,
  Schrodinger2d,
  Biharmonic1d,
  AllenCahn,
  PowerReaction,
  ExpReaction,
  Fisher,
  AllenCahn2d
};

enum class SolverKind { Richardson, Gmres, Bicgstab, Imex, Newton, Implicit };

/// solve: one iteration history per case; spectrum: dense spectrum only;
/// alpha_table: alpha search over a parameter grid; timing: GMRES vs BiCGStab.
enum class Task { Solve, Spectrum, AlphaTable, Timing };

namespace detail {

template <class E, std::size_t N>
E lookup(const std::array<std::pair<const char*, E>, N>& table, const std::string& key, const char* what) {
  for (const auto& [name, e] : table)
    if (key == name) return e;
  throw config_error(std::string("unknown ") + what + " '" + key + "'");
}

template <class E, std::size_t N>
const char* name_of(const std::array<std::pair<const char*, E>, N>& table, E e) {
  for (const auto& [name, v] : table)
    if (v == e) return name;
  return "?";
}

inline constexpr std::array<std::pair<const char*, Problem>, 11> problems{{
    {"heat1d", Problem::Heat1d},
    {"heat2d", Problem::Heat2d},
    {"ade1d", Problem::Ade1d},
    {"schrodinger1d", Problem::Schrodinger1d},
    {"schrodinger2d", Problem::Schrodinger2d},
    {"biharmonic1d", Problem::Biharmonic1d},
    {"allen_cahn", Problem::AllenCahn},
    {"power_reaction", Problem::PowerReaction},
    {"exp_reaction", Problem::ExpReaction},
    {"fisher", Problem::Fisher},
    {"allen_cahn_2d", Problem::AllenCahn2d},
}};

inline constexpr std::array<std::pair<const char*, SolverKind>, 6> solvers{{
    {"richardson", SolverKind::Richardson},
    {"gmres", SolverKind::Gmres},
    {"bicgstab", SolverKind::Bicgstab},
    {"imex", SolverKind::Imex},
    {"newton", SolverKind::Newton},
    {"implicit", SolverKind::Implicit},
}};

inline constexpr std::array<std::pair<const char*, Task>, 4> tasks{{
    {"solve", Task::Solve},
    {"spectrum", Task::Spectrum},
    {"alpha_table", Task::AlphaTable},
    {"timing", Task::Timing},
}};

inline constexpr std::array<std::pair<const char*, PropagatorMode>, 3> propagators{{
    {"exact", PropagatorMode::ExactSpectral},
    {"pade2", PropagatorMode::Pade2},
    {"pade3", PropagatorMode::Pade3},
}};

inline constexpr std::array<std::pair<const char*, JacobianMode>, 2> jacobians{{
    {"averaged", JacobianMode::TimeAveraged},
    {"initial", JacobianMode::InitialState},
}};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  const double x = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(x))
    throw config_error("'" + key + "': expected a number, got '" + v + "'");
  return x;
}

inline long parse_int(const std::string& key, const std::string& v) {
  const double x = parse_double(key, v);
  if (x != std::floor(x)) throw config_error("'" + key + "': expected an integer, got '" + v + "'");
  return static_cast<long>(x);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw config_error("'" + key + "': expected a boolean, got '" + v + "'");
}

}  // namespace detail

/// Accepts "x", "yi", "x+yi", "x-yi", "i", "-i".
inline cplx parse_complex(const std::string& text) {
  const std::string s = detail::trim(text);
  if (s.empty()) throw config_error("empty complex value");
  if (s.back() != 'i') return detail::parse_double("complex", s);
  const std::string body = s.substr(0, s.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;)
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  auto imag = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return detail::parse_double("complex", t);
  };
  if (split == std::string::npos) return {0.0, imag(body)};
  return {detail::parse_double("complex", body.substr(0, split)), imag(body.substr(split))};
}

/// Shortest representation that round-trips.
inline std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline std::string format_complex(cplx z) {
  if (z.imag() == 0.0) return format_double(z.real());
  if (z.real() == 0.0) return format_double(z.imag()) + "i";
  return format_double(z.real()) + (z.imag() < 0.0 ? "" : "+") + format_double(z.imag()) + "i";
}

struct ExperimentConfig {
  std::string name = "custom";
  Task task = Task::Solve;
  Problem problem = Problem::Heat1d;
  cplx a{0.1, 0.0};
  double b = 0.0;
  cplx c{0.0, 0.0};
  double beta = 0.0;
  /// Allen-Cahn interface width; the diffusion coefficient becomes eps^2.
  double eps = 0.01;
  /// Power-reaction exponent.
  int p = 2;
  /// 2D Schrodinger wave-packet width.
  double mu = 0.05;
  double h = 1.0 / 128.0;
  double dt = 1.0 / 128.0;
  double T = 1.0;
  /// Time steps; 0 derives it from T / dt. Set explicitly, it fixes dt = T / nt.
  std::size_t nt = 0;
  double alpha = 0.0001953125;
  bool alpha_opt = true;
  int order = 1;
  SolverKind solver = SolverKind::Richardson;
  JacobianMode jacobian = JacobianMode::TimeAveraged;
  PropagatorMode propagator = PropagatorMode::ExactSpectral;
  /// Initial iterate: zero | poly | sin_low | sin_high | exp.
  std::string guess = "zero";
  double tol = 1e-10;
  int maxit = 50;
  /// Richardson only: e_k > ratio * e_{k-1} ends the run as stagnated.
  double stagnation_ratio = 0.0;
  /// Spatial unknowns; when set it fixes h for the problem's domain (2D: total count, a square).
  std::size_t nx = 0;
  /// Timing task: wall time is the best of this many runs.
  int repeats = 3;
  bool write_solution = false;
  /// "key=v1,v2;key2=w1,w2" expands to the cartesian product of runs.
  std::string sweep;
  /// Each entry is a space-separated list of key=value overrides; the sweep
  /// is applied on top of every case.
  std::vector<std::string> cases;
  std::string out;
  unsigned jobs = 1;
  bool parallel_time = false;
  unsigned long seed = 0;

  std::size_t steps() const {
    if (nt > 0) return nt;
    const double m = std::round(T / dt);
    if (m < 1.0 || std::abs(T / dt - m) > 1e-8 * std::max(1.0, m))
      throw config_error("T must be a positive multiple of dt");
    return static_cast<std::size_t>(m);
  }
  double step() const { return nt > 0 ? T / static_cast<double>(nt) : dt; }
  bool is_nonlinear() const {
    return problem == Problem::AllenCahn || problem == Problem::PowerReaction || problem == Problem::ExpReaction ||
           problem == Problem::Fisher || problem == Problem::AllenCahn2d;
  }
  bool is_2d() const {
    return problem == Problem::Heat2d || problem == Problem::Schrodinger2d || problem == Problem::AllenCahn2d;
  }
  Exec exec() const { return {parallel_time ? std::max(1u, jobs) : 1u}; }

  /// Applies one key = value pair. Unknown keys and malformed values throw config_error.
  void set(const std::string& raw_key, const std::string& raw_value) {
    const std::string key = detail::trim(raw_key);
    const std::string v = detail::trim(raw_value);
    using namespace detail;
    if (key == "name") name = v;
    else if (key == "task") task = lookup(tasks, v, "task");
    else if (key == "problem") problem = lookup(problems, v, "problem");
    else if (key == "a") a = parse_complex(v);
    else if (key == "b") b = parse_double(key, v);
    else if (key == "c") c = parse_complex(v);
    else if (key == "beta") beta = parse_double(key, v);
    else if (key == "eps") eps = parse_double(key, v);
    else if (key == "p") p = static_cast<int>(parse_int(key, v));
    else if (key == "mu") mu = parse_double(key, v);
    else if (key == "h") h = parse_double(key, v);
    else if (key == "dt") dt = parse_double(key, v);
    else if (key == "T") T = parse_double(key, v);
    else if (key == "nt") nt = static_cast<std::size_t>(parse_int(key, v));
    else if (key == "mesh") {
      // h = dt = 1/m, the refinement knob of the mesh-independence runs
      const double m = parse_double(key, v);
      h = dt = 1.0 / m;
    } else if (key == "alpha") {
      alpha_opt = v == "opt";
      if (!alpha_opt) alpha = parse_double(key, v);
    } else if (key == "order") order = static_cast<int>(parse_int(key, v));
    else if (key == "solver") solver = lookup(solvers, v, "solver");
    else if (key == "jacobian") jacobian = lookup(jacobians, v, "jacobian mode");
    else if (key == "propagator") propagator = lookup(propagators, v, "propagator mode");
    else if (key == "guess") guess = v;
    else if (key == "tol") tol = parse_double(key, v);
    else if (key == "maxit") maxit = static_cast<int>(parse_int(key, v));
    else if (key == "stagnation_ratio") stagnation_ratio = parse_double(key, v);
    else if (key == "nx") nx = static_cast<std::size_t>(parse_int(key, v));
    else if (key == "repeats") repeats = static_cast<int>(parse_int(key, v));
    else if (key == "write_solution") write_solution = parse_bool(key, v);
    else if (key == "sweep") sweep = v;
    else if (key == "case") cases.push_back(v);
    else if (key == "out") out = v;
    else if (key == "jobs") jobs = static_cast<unsigned>(std::max(1L, parse_int(key, v)));
    else if (key == "parallel_time") parallel_time = parse_bool(key, v);
    else if (key == "seed") seed = static_cast<unsigned long>(parse_int(key, v));
    else throw config_error("unknown key '" + key + "'");
  }

  void validate() const {
    if (order < 1 || order > 6) throw config_error("order must lie in 1..6");
    if (!(h > 0.0) || !(dt > 0.0) || !(T > 0.0)) throw config_error("h, dt and T must be positive");
    if (!(tol > 0.0)) throw config_error("tol must be positive");
    if (maxit < 1) throw config_error("maxit must be >= 1");
    if (repeats < 1) throw config_error("repeats must be >= 1");
    if (!alpha_opt && (alpha < 0.0 || alpha > 1.0)) throw config_error("alpha must lie in [0, 1]");
    const bool nonlinear_solver =
        solver == SolverKind::Imex || solver == SolverKind::Newton || solver == SolverKind::Implicit;
    if (task == Task::Solve && nonlinear_solver != is_nonlinear())
      throw config_error(is_nonlinear() ? "nonlinear problems need solver imex, newton or implicit"
                                        : "linear problems need solver richardson, gmres or bicgstab");
    if (is_nonlinear() && order != 1) throw config_error("nonlinear problems use the first-order scheme");
    if (task == Task::Solve || task == Task::Spectrum) (void)steps();
    if (guess != "zero" && guess != "poly" && guess != "sin_low" && guess != "sin_high" && guess != "exp")
      throw config_error("unknown guess '" + guess + "'");
  }

  /// Canonical key = value listing; round-trips through parse_config.
  std::string echo() const {
    std::ostringstream os;
    os << "name = " << name << "\n"
       << "task = " << detail::name_of(detail::tasks, task) << "\n"
       << "problem = " << detail::name_of(detail::problems, problem) << "\n"
       << "a = " << format_complex(a) << "\n"
       << "b = " << format_double(b) << "\n"
       << "c = " << format_complex(c) << "\n"
       << "beta = " << format_double(beta) << "\n"
       << "eps = " << format_double(eps) << "\n"
       << "p = " << p << "\n"
       << "mu = " << format_double(mu) << "\n"
       << "h = " << format_double(h) << "\n"
       << "dt = " << format_double(dt) << "\n"
       << "T = " << format_double(T) << "\n"
       << "nt = " << nt << "\n"
       << "alpha = " << (alpha_opt ? std::string("opt") : format_double(alpha)) << "\n"
       << "order = " << order << "\n"
       << "solver = " << detail::name_of(detail::solvers, solver) << "\n"
       << "jacobian = " << to_string(jacobian) << "\n"
       << "propagator = " << detail::name_of(detail::propagators, propagator) << "\n"
       << "guess = " << guess << "\n"
       << "tol = " << format_double(tol) << "\n"
       << "maxit = " << maxit << "\n"
       << "stagnation_ratio = " << format_double(stagnation_ratio) << "\n"
       << "nx = " << nx << "\n"
       << "repeats = " << repeats << "\n"
       << "write_solution = " << (write_solution ? "true" : "false") << "\n";
    if (!sweep.empty()) os << "sweep = " << sweep << "\n";
    for (const auto& c : cases) os << "case = " << c << "\n";
    os << "jobs = " << jobs << "\n"
       << "parallel_time = " << (parallel_time ? "true" : "false") << "\n"
       << "seed = " << seed << "\n";
    return os.str();
  }
};

/// Line-oriented key = value pairs; '#' starts a comment.
inline std::vector<std::pair<std::string, std::string>> parse_config(std::istream& is) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || detail::trim(line.substr(0, eq)).empty())
      throw config_error("line " + std::to_string(lineno) + ": expected key = value");
    kv.emplace_back(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return kv;
}

inline void apply_settings(ExperimentConfig& cfg, const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [k, v] : kv) cfg.set(k, v);
}

/// "k=v k2=v2" tokens of a case line.
inline std::vector<std::pair<std::string, std::string>> parse_overrides(const std::string& line) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) throw config_error("override '" + tok + "': expected key=value");
    kv.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
  }
  return kv;
}

/// Parsed sweep: ordered keys, each with its list of values.
inline std::vector<std::pair<std::string, std::vector<std::string>>> parse_sweep(const std::string& s) {
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for (const auto& part : detail::split(s, ';')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw config_error("sweep '" + part + "': expected key=v1,v2,...");
    auto values = detail::split(part.substr(eq + 1), ',');
    if (values.empty()) throw config_error("sweep '" + part + "': no values");
    out.emplace_back(detail::trim(part.substr(0, eq)), std::move(values));
  }
  return out;
}

/// Removes `key` from a sweep string, so an explicit override wins over a swept value.
inline std::string drop_from_sweep(const std::string& sweep, const std::string& key) {
  std::string out;
  for (const auto& [k, vals] : parse_sweep(sweep)) {
    if (k == key) continue;
    if (!out.empty()) out += "; ";
    out += k + "=";
    for (std::size_t i = 0; i < vals.size(); ++i) out += (i ? "," : "") + vals[i];
  }
  return out;
}

}  // namespace expparadiag::bench
