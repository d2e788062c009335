#pragma once

#include <filesystem>
#include <fstream>

#include "../analysis.hpp"
#include "presets.hpp"

namespace expparadiag::bench {

struct ProblemSetup {
  Grid grid;
  BoundaryCondition bc = BoundaryCondition::DirichletZero;
  Coefficients k;
  std::vector<double> x, y;
  Vec u0;
  std::optional<Nonlinearity> nl;
  /// Exact solution u(., t) when the problem has one.
  std::function<Vec(double)> exact;
};

namespace detail {

struct Domain {
  double lo, hi;
  BoundaryCondition bc;
};

inline Domain domain_of(Problem p) {
  switch (p) {
    case Problem::Heat2d:
    case Problem::Schrodinger2d:
    case Problem::AllenCahn2d: return {0.0, 1.0, BoundaryCondition::DirichletZero};
    case Problem::Ade1d: return {-1.0, 1.0, BoundaryCondition::Periodic};
    case Problem::Biharmonic1d: return {-1.0, 1.0, BoundaryCondition::BiharmonicClamped};
    case Problem::AllenCahn:
    case Problem::PowerReaction:
    case Problem::ExpReaction: return {0.0, 1.0, BoundaryCondition::NeumannZero};
    default: return {-1.0, 1.0, BoundaryCondition::DirichletZero};
  }
}

/// Mesh size giving `n` unknowns per axis.
inline double mesh_for(const Domain& d, std::size_t n) {
  const double L = d.hi - d.lo;
  const double m = static_cast<double>(n);
  switch (d.bc) {
    case BoundaryCondition::Periodic: return L / m;
    case BoundaryCondition::NeumannZero: return L / (m - 1.0);
    default: return L / (m + 1.0);
  }
}

template <class F>
Vec sample(const std::vector<double>& x, const std::vector<double>& y, F&& f) {
  Vec v(x.size() * y.size());
  for (std::size_t iy = 0; iy < y.size(); ++iy)
    for (std::size_t ix = 0; ix < x.size(); ++ix) v[iy * x.size() + ix] = f(x[ix], y[iy]);
  return v;
}

}  // namespace detail

inline ProblemSetup setup_problem(const ExperimentConfig& cfg) {
  const auto d = detail::domain_of(cfg.problem);
  double h = cfg.h;
  if (cfg.nx > 0) {
    std::size_t n = cfg.nx;
    if (cfg.is_2d()) {
      n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(cfg.nx))));
      if (n * n != cfg.nx) throw config_error("nx must be a perfect square for 2D problems");
    }
    h = detail::mesh_for(d, n);
  }
  ProblemSetup s;
  s.bc = d.bc;
  s.grid = cfg.is_2d() ? Grid::square(d.lo, d.hi, h, d.bc) : Grid::line(d.lo, d.hi, h, d.bc);
  s.x = s.grid.nodes(0, d.bc);
  s.y = cfg.is_2d() ? s.grid.nodes(1, d.bc) : std::vector<double>{0.0};
  s.k.a = cfg.a;
  s.k.b = cfg.b;
  s.k.c = cfg.c;
  s.k.beta = cfg.beta;
  auto on_grid = [&](auto f) { return detail::sample(s.x, s.y, f); };
  switch (cfg.problem) {
    case Problem::Heat1d:
    case Problem::Ade1d:
      s.u0 = on_grid([](double x, double) { return cplx(std::exp(-30.0 * x * x)); });
      break;
    case Problem::Heat2d:
      s.u0 = on_grid([](double x, double y) {
        return cplx(std::exp(-20.0 * ((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5))));
      });
      break;
    case Problem::Schrodinger1d: s.u0 = on_grid([](double x, double) { return cplx(std::sin(pi * x)); }); break;
    case Problem::Schrodinger2d: {
      const double mu = cfg.mu;
      s.u0 = on_grid([mu](double x, double y) {
        const double r2 = (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5);
        return std::exp(-r2 / (2.0 * mu * mu)) * std::exp(cplx(0.0, -5.0 * (x - 0.5)));
      });
      break;
    }
    case Problem::Biharmonic1d:
      s.u0 = on_grid([](double x, double) { return cplx(std::sin(2.0 * pi * x) * std::exp(-15.0 * x * x)); });
      break;
    case Problem::AllenCahn: {
      s.k.a = cfg.eps * cfg.eps;
      s.k.c = 0.0;
      s.nl = allen_cahn_manufactured(cfg.eps, s.x);
      s.exact = [x = s.x](double t) { return allen_cahn_exact(x, t); };
      s.u0 = s.exact(0.0);
      break;
    }
    case Problem::PowerReaction:
    case Problem::ExpReaction:
      s.nl = cfg.problem == Problem::PowerReaction ? Nonlinearity::power(cfg.p) : Nonlinearity::exp_reaction();
      s.u0 = on_grid([](double x, double) { return cplx(0.1 * std::cos(2.0 * pi * x)); });
      break;
    case Problem::Fisher:
      s.nl = Nonlinearity::fisher();
      s.u0 = on_grid([](double x, double) {
        const double sech = 1.0 / std::cosh(10.0 * x);
        return cplx(sech * sech);
      });
      break;
    case Problem::AllenCahn2d:
      s.k.a = cfg.eps * cfg.eps;
      s.k.c = 0.0;
      s.nl = Nonlinearity::allen_cahn();
      s.u0 = on_grid([](double x, double y) { return cplx(0.1 * std::sin(2.0 * pi * x) * std::sin(2.0 * pi * y)); });
      break;
  }
  return s;
}

/// Initial iterate, the same profile in every time block.
inline BlockVector initial_iterate(const ExperimentConfig& cfg, const ProblemSetup& s, std::size_t n_time) {
  BlockVector v(n_time, s.u0.size());
  if (cfg.guess == "zero") return v;
  std::function<double(double)> g;
  if (cfg.guess == "poly") g = [](double x) { return 1.0 - x * x; };
  else if (cfg.guess == "sin_low") g = [](double x) { return std::sin(pi * x); };
  else if (cfg.guess == "sin_high") g = [](double x) { return std::sin(32.0 * pi * x); };
  else g = [](double x) { return std::exp(x); };
  const Vec prof = detail::sample(s.x, s.y, [&](double x, double y) { return cplx(g(x) * (s.y.size() > 1 ? g(y) : 1.0)); });
  for (std::size_t t = 0; t < n_time; ++t) std::copy(prof.begin(), prof.end(), v.block(t).begin());
  return v;
}

inline double resolve_alpha(const ExperimentConfig& cfg, const ProblemSetup& s) {
  if (!cfg.alpha_opt) return cfg.alpha;
  AlphaSearchConfig a;
  a.a = cfg.a.real();
  a.c = cfg.c.real();
  a.T = cfg.T;
  a.nx = s.grid.nx();
  a.length = s.grid.axes[0].length();
  return alpha_opt_search(a).alpha;
}

struct CaseResult {
  std::string label;
  ExperimentConfig cfg;
  double alpha = 0.0;
  std::size_t dof = 0;
  IterationReport report;
  /// Contraction bound of the Richardson iteration (NaN when none applies).
  double bound = NAN;
  /// Grid-L2 distance of the final iterate from the exact solution at T.
  double exact_error = NAN;
  std::optional<SpectrumReport> spectrum;
  std::vector<double> x, y;
  Vec final_state, reference_state, exact_state;
};

struct AlphaRow {
  int nx;
  double T, a, c, alpha;
};

struct TimingRow {
  int order;
  cplx a;
  std::size_t nx, nt;
  int gmres_iterations = 0, bicgstab_iterations = 0;
  double time_gmres = 0.0, time_bicgstab = 0.0;
  double max_difference = 0.0;
  /// Wall-time ratio to the row with half the steps (NaN when absent).
  double ratio_gmres = NAN, ratio_bicgstab = NAN;
  bool converged = false;
};

struct RunRecord {
  std::string preset;
  std::string config_echo;
  std::vector<CaseResult> cases;
  std::vector<AlphaRow> alpha_rows;
  std::vector<TimingRow> timing;
  double wall_seconds = 0.0;
  std::vector<std::filesystem::path> files;

  /// 0 when every case converged (stagnation counts for approximate propagators), 2 otherwise.
  int exit_code() const {
    for (const auto& c : cases) {
      if (c.cfg.task != Task::Solve) continue;
      const auto t = c.report.termination;
      const bool ok = t == Termination::Converged ||
                      (t == Termination::Stagnated && c.cfg.propagator != PropagatorMode::ExactSpectral);
      if (!ok) return 2;
    }
    for (const auto& r : timing)
      if (!r.converged) return 2;
    return 0;
  }
};

/// Expands cases x sweep into concrete configurations, applying `overrides` last.
inline std::vector<std::pair<std::string, ExperimentConfig>> expand(
    const ExperimentConfig& base, const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  std::string sweep = base.sweep;
  for (const auto& [k, v] : overrides) sweep = drop_from_sweep(sweep, k);
  const auto axes = parse_sweep(sweep);
  std::vector<std::string> cases = base.cases.empty() ? std::vector<std::string>{""} : base.cases;
  std::vector<std::pair<std::string, ExperimentConfig>> out;
  for (const auto& cs : cases) {
    std::vector<std::size_t> idx(axes.size(), 0);
    bool done = false;
    while (!done) {
      ExperimentConfig cfg = base;
      cfg.cases.clear();
      cfg.sweep.clear();
      std::string label = cs;
      apply_settings(cfg, parse_overrides(cs));
      for (std::size_t d = 0; d < axes.size(); ++d) {
        const auto& [key, vals] = axes[d];
        cfg.set(key, vals[idx[d]]);
        label += (label.empty() ? "" : " ") + key + "=" + vals[idx[d]];
      }
      apply_settings(cfg, overrides);
      cfg.validate();
      out.emplace_back(label, std::move(cfg));
      done = true;
      for (std::size_t d = axes.size(); d-- > 0;) {
        if (++idx[d] < axes[d].second.size()) {
          done = false;
          break;
        }
        idx[d] = 0;
      }
    }
  }
  return out;
}

namespace detail {

inline void keep_final(CaseResult& r, const BlockVector& u, const BlockVector& ref) {
  r.final_state.assign(u.block(u.nt - 1).begin(), u.block(u.nt - 1).end());
  r.reference_state.assign(ref.block(ref.nt - 1).begin(), ref.block(ref.nt - 1).end());
}

inline CaseResult run_linear(const ExperimentConfig& cfg, const ProblemSetup& s, CaseResult r) {
  const std::size_t steps = cfg.steps();
  const double dt = cfg.step();
  const auto op = build_operator(s.grid, s.bc, s.k);
  const auto exact = std::make_shared<const Propagator>(op, dt);
  const auto prop = cfg.propagator == PropagatorMode::ExactSpectral
                        ? exact
                        : std::make_shared<const Propagator>(op, dt, cfg.propagator);
  const auto sc = SchemeCoefficients::bdf(cfg.order);
  const std::size_t n = sc.unknowns(steps);
  const BlockVector ref = unknowns_from_trajectory(sequential_solve(sc, *exact, s.u0, steps), cfg.order);
  const BlockVector f = build_rhs(sc, *prop, startup_blocks(*prop, s.u0, cfg.order), n);
  const AllAtOnceOperator S(sc, prop, 0.0, n, cfg.exec());
  const ParaDiagPreconditioner P(sc, prop, r.alpha, n, cfg.exec());
  const BlockVector x0 = initial_iterate(cfg, s, n);
  SolverOptions o;
  o.tol = cfg.tol;
  o.maxit = cfg.maxit;
  o.reference = &ref;
  o.error_weight = s.grid.l2_weight();
  o.x0 = &x0;
  o.stagnation_ratio = cfg.stagnation_ratio;
  o.stop_on_error = true;
  r.dof = n * op.size();
  std::pair<BlockVector, IterationReport> out;
  switch (cfg.solver) {
    case SolverKind::Richardson: out = richardson_solve(S, P, f, o); break;
    case SolverKind::Gmres: out = gmres_solve(S, P, f, o, cfg.exec()); break;
    default: out = bicgstab_solve(S, P, f, o, cfg.exec()); break;
  }
  r.report = std::move(out.second);
  keep_final(r, out.first, ref);
  if (cfg.solver == SolverKind::Richardson && cfg.order <= 2 && op.real_spectrum() &&
      cfg.propagator == PropagatorMode::ExactSpectral) {
    try {
      r.bound = theoretical_contraction(cfg.order, r.alpha, op.lambda_max(), static_cast<double>(n) * dt);
    } catch (const config_error&) {
    }
  }
  return r;
}

inline CaseResult run_nonlinear(const ExperimentConfig& cfg, const ProblemSetup& s, CaseResult r) {
  const std::size_t steps = cfg.steps();
  const double dt = cfg.step();
  const auto prop = std::make_shared<const Propagator>(build_operator(s.grid, s.bc, s.k), dt);
  const BlockVector ref = unknowns_from_trajectory(if_sequential_solve(*prop, *s.nl, s.u0, steps), 1);
  const BlockVector x0 = initial_iterate(cfg, s, steps);
  NonlinearOptions o;
  o.tol = cfg.tol;
  o.maxit = cfg.maxit;
  o.reference = &ref;
  o.error_weight = s.grid.l2_weight();
  o.x0 = &x0;
  r.dof = steps * prop->size();
  std::pair<BlockVector, IterationReport> out;
  switch (cfg.solver) {
    case SolverKind::Imex: out = imex_paradiag_solve(prop, *s.nl, r.alpha, s.u0, steps, o, cfg.exec()); break;
    case SolverKind::Newton:
      out = newton_paradiag_solve(prop, *s.nl, r.alpha, s.u0, steps, cfg.jacobian, o, cfg.exec());
      break;
    default: out = implicit_paradiag_solve(prop, *s.nl, r.alpha, s.u0, steps, o, 1e-13, 50, cfg.exec()); break;
  }
  r.report = std::move(out.second);
  keep_final(r, out.first, ref);
  if (s.exact) {
    r.exact_state = s.exact(static_cast<double>(steps) * dt);
    double e = 0.0;
    for (std::size_t j = 0; j < r.exact_state.size(); ++j) e += std::norm(r.final_state[j] - r.exact_state[j]);
    r.exact_error = std::sqrt(e) * s.grid.l2_weight();
  }
  return r;
}

inline CaseResult run_spectrum(const ExperimentConfig& cfg, const ProblemSetup& s, CaseResult r) {
  const auto prop = std::make_shared<const Propagator>(build_operator(s.grid, s.bc, s.k), cfg.step());
  r.spectrum = preconditioned_spectrum(cfg.order, prop, cfg.steps(), r.alpha);
  r.dof = cfg.steps() * prop->size();
  r.report.termination = Termination::Converged;
  return r;
}

}  // namespace detail

/// Runs one concrete configuration (task solve or spectrum).
inline CaseResult run_case(const ExperimentConfig& cfg, const std::string& label = {}) {
  cfg.validate();
  const ProblemSetup s = setup_problem(cfg);
  CaseResult r;
  r.label = label;
  r.cfg = cfg;
  r.x = s.x;
  r.y = cfg.is_2d() ? s.y : std::vector<double>{};
  r.alpha = resolve_alpha(cfg, s);
  if (cfg.task == Task::Spectrum) return detail::run_spectrum(cfg, s, std::move(r));
  return cfg.is_nonlinear() ? detail::run_nonlinear(cfg, s, std::move(r)) : detail::run_linear(cfg, s, std::move(r));
}

/// alpha_opt over the (a, c) x (N_x, T) grid of the alpha table.
inline std::vector<AlphaRow> alpha_table() {
  const std::array<std::pair<int, double>, 4> sizes{{{32, 0.5}, {64, 2.0}, {128, 8.0}, {256, 20.0}}};
  const std::array<std::pair<double, double>, 4> coeffs{{{1.0, 0.0}, {1e-3, 0.0}, {1e-3, 0.1}, {1e-5, 2.0}}};
  std::vector<AlphaRow> rows;
  for (const auto& [nx, T] : sizes)
    for (const auto& [a, c] : coeffs) {
      AlphaSearchConfig cfg;
      cfg.a = a;
      cfg.c = c;
      cfg.T = T;
      cfg.nx = nx;
      rows.push_back({nx, T, a, c, alpha_opt_search(cfg).alpha});
    }
  return rows;
}

struct TimingSpec {
  int order = 1;
  cplx a{0.1, 0.0};
  std::size_t nx = 361;
  std::size_t nt = 400;
};

/// GMRES and BiCGStab on the same all-at-once system: 2D heat (or `base.problem`)
/// with `nx` spatial unknowns and `nt` steps of size base.dt, residual tolerance base.tol.
inline std::vector<TimingRow> run_timing_table(const std::vector<TimingSpec>& grid, const ExperimentConfig& base) {
  std::vector<TimingRow> rows;
  for (const auto& g : grid) {
    ExperimentConfig cfg = base;
    cfg.order = g.order;
    cfg.a = g.a;
    cfg.nx = g.nx;
    cfg.nt = 0;
    cfg.T = static_cast<double>(g.nt) * cfg.dt;
    cfg.validate();
    const ProblemSetup s = setup_problem(cfg);
    const auto prop = std::make_shared<const Propagator>(build_operator(s.grid, s.bc, s.k), cfg.dt);
    const auto sc = SchemeCoefficients::bdf(g.order);
    const std::size_t n = sc.unknowns(g.nt);
    const double alpha = resolve_alpha(cfg, s);
    const BlockVector f = build_rhs(sc, *prop, startup_blocks(*prop, s.u0, g.order), n);
    const AllAtOnceOperator S(sc, prop, 0.0, n, cfg.exec());
    const ParaDiagPreconditioner P(sc, prop, alpha, n, cfg.exec());
    SolverOptions o;
    o.tol = cfg.tol;
    o.maxit = cfg.maxit;
    TimingRow row{g.order, g.a, s.grid.size(), g.nt};
    row.time_gmres = row.time_bicgstab = INFINITY;
    BlockVector xg, xb;
    for (int rep = 0; rep < cfg.repeats; ++rep) {
      auto og = gmres_solve(S, P, f, o, cfg.exec());
      auto ob = bicgstab_solve(S, P, f, o, cfg.exec());
      row.time_gmres = std::min(row.time_gmres, og.second.wall_seconds);
      row.time_bicgstab = std::min(row.time_bicgstab, ob.second.wall_seconds);
      row.gmres_iterations = og.second.iterations;
      row.bicgstab_iterations = ob.second.iterations;
      row.converged = og.second.converged() && ob.second.converged();
      xg = std::move(og.first);
      xb = std::move(ob.first);
    }
    row.max_difference = max_block_error(xg, xb, s.grid.l2_weight());
    rows.push_back(row);
  }
  for (auto& r : rows)
    for (const auto& q : rows)
      if (q.order == r.order && q.a == r.a && q.nx == r.nx && 2 * q.nt == r.nt) {
        r.ratio_gmres = r.time_gmres / q.time_gmres;
        r.ratio_bicgstab = r.time_bicgstab / q.time_bicgstab;
      }
  return rows;
}

/// Rows "order,a,nx,nt" (header optional, '#' comments allowed).
inline std::vector<TimingSpec> parse_timing_grid(std::istream& is) {
  std::vector<TimingSpec> grid;
  std::string line;
  while (std::getline(is, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto f = detail::split(line, ',');
    if (f.empty()) continue;
    if (f[0] == "order") continue;
    if (f.size() != 4) throw config_error("timing grid: expected order,a,nx,nt in '" + line + "'");
    TimingSpec t;
    t.order = static_cast<int>(detail::parse_int("order", f[0]));
    t.a = parse_complex(f[1]);
    t.nx = static_cast<std::size_t>(detail::parse_int("nx", f[2]));
    t.nt = static_cast<std::size_t>(detail::parse_int("nt", f[3]));
    grid.push_back(t);
  }
  return grid;
}

// ---- CSV output ----

inline void write_history_csv(std::ostream& os, const std::string& preset, const std::vector<CaseResult>& cases) {
  os << "preset,iter,residual,error\n";
  for (const auto& c : cases) {
    if (c.cfg.task != Task::Solve) continue;
    const std::string tag = c.label.empty() ? preset : preset + "[" + c.label + "]";
    const auto& res = c.report.residual_history;
    const auto& err = c.report.error_history;
    for (std::size_t i = 0; i < std::max(res.size(), err.size()); ++i) {
      os << tag << "," << i << ",";
      if (i < res.size()) os << format_double(res[i]);
      os << ",";
      if (i < err.size()) os << format_double(err[i]);
      os << "\n";
    }
  }
}

/// Per-case summary; wall_seconds is the last column.
inline void write_summary_csv(std::ostream& os, const std::string& preset, const std::vector<CaseResult>& cases) {
  os << "preset,case,alpha,dof,iterations,termination,final_error,bound,exact_error,wall_seconds\n";
  for (const auto& c : cases) {
    const auto& e = c.report.error_history;
    os << preset << "," << c.label << "," << format_double(c.alpha) << "," << c.dof << "," << c.report.iterations << ","
       << (c.cfg.task == Task::Spectrum ? "spectrum" : to_string(c.report.termination)) << ","
       << (e.empty() ? std::string() : format_double(e.back())) << ","
       << (std::isnan(c.bound) ? std::string() : format_double(c.bound)) << ","
       << (std::isnan(c.exact_error) ? std::string() : format_double(c.exact_error)) << ","
       << format_double(c.report.wall_seconds) << "\n";
  }
}

inline void write_solution_csv(std::ostream& os, const std::vector<CaseResult>& cases) {
  os << "case,x,y,re,im,reference_re,reference_im,exact_re\n";
  for (const auto& c : cases) {
    if (c.final_state.empty()) continue;
    const std::size_t nx = c.x.size();
    for (std::size_t j = 0; j < c.final_state.size(); ++j) {
      os << c.label << "," << format_double(c.x[j % nx]) << ","
         << (c.y.empty() ? std::string("0") : format_double(c.y[j / nx])) << "," << format_double(c.final_state[j].real())
         << "," << format_double(c.final_state[j].imag()) << "," << format_double(c.reference_state[j].real()) << ","
         << format_double(c.reference_state[j].imag()) << ","
         << (c.exact_state.empty() ? std::string() : format_double(c.exact_state[j].real())) << "\n";
    }
  }
}

inline void write_alpha_csv(std::ostream& os, const std::vector<AlphaRow>& rows) {
  os << "nx,T,a,c,alpha_opt\n";
  for (const auto& r : rows)
    os << r.nx << "," << format_double(r.T) << "," << format_double(r.a) << "," << format_double(r.c) << ","
       << format_double(r.alpha) << "\n";
}

inline void write_timing_csv(std::ostream& os, const std::vector<TimingRow>& rows) {
  os << "order,a,nx,nt,dof,gmres_iterations,time_gmres,bicgstab_iterations,time_bicgstab,ratio_gmres,ratio_bicgstab,"
        "max_difference\n";
  auto opt = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  for (const auto& r : rows)
    os << r.order << "," << format_complex(r.a) << "," << r.nx << "," << r.nt << "," << r.nx * r.nt << ","
       << r.gmres_iterations << "," << format_double(r.time_gmres) << "," << r.bicgstab_iterations << ","
       << format_double(r.time_bicgstab) << "," << opt(r.ratio_gmres) << "," << opt(r.ratio_bicgstab) << ","
       << format_double(r.max_difference) << "\n";
}

/// cfg.out, else $EXPPARADIAG_OUT, else ./results.
inline std::filesystem::path output_dir(const ExperimentConfig& cfg) {
  if (!cfg.out.empty()) return cfg.out;
  if (const char* env = std::getenv("EXPPARADIAG_OUT"); env && *env) return env;
  return "results";
}

namespace detail {
template <class F>
std::filesystem::path write_file(const std::filesystem::path& p, F&& body) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  body(os);
  return p;
}
}  // namespace detail

/// Writes every artefact of `rec` into `dir`; returns the paths written.
inline std::vector<std::filesystem::path> write_record(const RunRecord& rec, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  const std::string& n = rec.preset;
  files.push_back(detail::write_file(dir / (n + ".cfg"), [&](std::ostream& os) { os << rec.config_echo; }));
  if (!rec.alpha_rows.empty())
    files.push_back(detail::write_file(dir / (n + ".csv"), [&](std::ostream& os) { write_alpha_csv(os, rec.alpha_rows); }));
  if (!rec.timing.empty())
    files.push_back(detail::write_file(dir / (n + ".csv"), [&](std::ostream& os) { write_timing_csv(os, rec.timing); }));
  if (rec.cases.empty()) return files;
  const bool solves = std::any_of(rec.cases.begin(), rec.cases.end(), [](const CaseResult& c) { return c.cfg.task == Task::Solve; });
  if (solves)
    files.push_back(detail::write_file(dir / (n + ".csv"), [&](std::ostream& os) { write_history_csv(os, n, rec.cases); }));
  files.push_back(
      detail::write_file(dir / (n + "_summary.csv"), [&](std::ostream& os) { write_summary_csv(os, n, rec.cases); }));
  std::size_t k = 0;
  for (const auto& c : rec.cases) {
    if (!c.spectrum) continue;
    const std::string suffix = rec.cases.size() > 1 ? "_" + std::to_string(k++) : "";
    files.push_back(detail::write_file(dir / (n + "_spectrum" + suffix + ".csv"), [&](std::ostream& os) {
      os << "# case=" << c.label << "\n";
      c.spectrum->write_csv(os);
    }));
  }
  if (std::any_of(rec.cases.begin(), rec.cases.end(), [](const CaseResult& c) { return c.cfg.write_solution; }))
    files.push_back(
        detail::write_file(dir / (n + "_solution.csv"), [&](std::ostream& os) { write_solution_csv(os, rec.cases); }));
  return files;
}

/// Runs a configuration with all its cases; nothing is written to disk.
inline RunRecord run_config(const ExperimentConfig& base,
                            const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  expparadiag::detail::Stopwatch sw;
  RunRecord rec;
  rec.preset = base.name;
  ExperimentConfig echo = base;
  apply_settings(echo, overrides);
  for (const auto& [k, v] : overrides) echo.sweep = drop_from_sweep(echo.sweep, k);
  rec.config_echo = echo.echo();
  if (base.task == Task::AlphaTable) {
    rec.alpha_rows = alpha_table();
  } else if (base.task == Task::Timing) {
    std::vector<TimingSpec> grid;
    for (const auto& [label, cfg] : expand(base, overrides))
      grid.push_back({cfg.order, cfg.a, cfg.nx, cfg.nt > 0 ? cfg.nt : cfg.steps()});
    ExperimentConfig b = echo;
    rec.timing = run_timing_table(grid, b);
  } else {
    for (const auto& [label, cfg] : expand(base, overrides)) rec.cases.push_back(run_case(cfg, label));
  }
  rec.wall_seconds = sw.seconds();
  return rec;
}

/// Runs a named preset and writes its CSV files into output_dir().
inline RunRecord run_preset(const std::string& name,
                            const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  const ExperimentConfig base = preset_config(name);
  RunRecord rec = run_config(base, overrides);
  ExperimentConfig where = base;
  apply_settings(where, overrides);
  rec.files = write_record(rec, output_dir(where));
  return rec;
}

}  // namespace expparadiag::bench
