#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <optional>
#include <random>

#include "solvers.hpp"

namespace expparadiag {

/// Pointwise nonlinearity N(u) plus an optional source s_f(x, t).
struct Nonlinearity {
  std::function<cplx(cplx)> f;
  std::function<cplx(cplx)> df;
  std::optional<double> M;
  /// Adds s_f(., t) to `out` (one entry per grid point).
  std::function<void(double, std::span<cplx>)> source;

  void eval(std::span<const cplx> u, double t, std::span<cplx> out) const {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = f(u[i]);
    if (source) source(t, out);
  }

  static Nonlinearity zero() { return {[](cplx) { return cplx{}; }, [](cplx) { return cplx{}; }, 0.0, {}}; }
  static Nonlinearity linear(double M) {
    return {[M](cplx u) { return -M * u; }, [M](cplx) { return cplx(-M); }, M, {}};
  }
  /// u - u^3
  static Nonlinearity allen_cahn() {
    return {[](cplx u) { return u - u * u * u; }, [](cplx u) { return 1.0 - 3.0 * u * u; }, std::nullopt, {}};
  }
  /// -u^p
  static Nonlinearity power(int p) {
    return {[p](cplx u) { return -ipow(u, p); }, [p](cplx u) { return -static_cast<double>(p) * ipow(u, p - 1); },
            std::nullopt, {}};
  }
  /// -exp(u)
  static Nonlinearity exp_reaction() {
    return {[](cplx u) { return -std::exp(u); }, [](cplx u) { return -std::exp(u); }, 0.0, {}};
  }
  /// u - u^2
  static Nonlinearity fisher() {
    return {[](cplx u) { return u - u * u; }, [](cplx u) { return 1.0 - 2.0 * u; }, std::nullopt, {}};
  }
};

/// Allen-Cahn u - u^3 with the source that makes u = 0.5 e^{-t} cos(2 pi x)
/// exact for u_t = eps^2 u_xx + N(u) on the nodes `x`.
inline Nonlinearity allen_cahn_manufactured(double eps, std::vector<double> x) {
  Nonlinearity nl = Nonlinearity::allen_cahn();
  nl.source = [eps, x = std::move(x)](double t, std::span<cplx> out) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double u = 0.5 * std::exp(-t) * std::cos(2.0 * pi * x[i]);
      out[i] += u * (4.0 * pi * pi * eps * eps - 2.0) + u * u * u;
    }
  };
  return nl;
}

inline Vec allen_cahn_exact(const std::vector<double>& x, double t) {
  Vec u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = 0.5 * std::exp(-t) * std::cos(2.0 * pi * x[i]);
  return u;
}

enum class JacobianMode { TimeAveraged, InitialState };

inline const char* to_string(JacobianMode m) { return m == JacobianMode::TimeAveraged ? "averaged" : "initial"; }

struct NonlinearOptions {
  double tol = 1e-10;
  int maxit = 50;
  const BlockVector* reference = nullptr;
  double error_weight = 1.0;
  const BlockVector* x0 = nullptr;
  /// Consecutive error increases that stop the iteration (Diverged, or Stagnated near the best error).
  int divergence_window = 3;
};

/// Samples random pairs on [lo, hi]^n and returns
/// max <N(u1)-N(u2), u1-u2> + M ||u1-u2||^2 (<= 0 when the condition holds).
inline double one_sided_lipschitz_sample(const Nonlinearity& nl, double M, double lo, double hi, std::size_t n,
                                         int pairs, std::uint64_t seed = 0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> U(lo, hi);
  double worst = -INFINITY;
  for (int k = 0; k < pairs; ++k) {
    double ip = 0.0, nn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = U(gen), b = U(gen);
      ip += ((nl.f(a) - nl.f(b)) * (a - b)).real();
      nn += (a - b) * (a - b);
    }
    worst = std::max(worst, ip + M * nn);
  }
  return worst;
}

/// Implicit integrating-factor stepping u_n - dt N(u_n, t_n) = A u_{n-1};
/// pointwise damped Newton. Returns u_0..u_{n_steps}.
inline std::vector<Vec> if_sequential_solve(const Propagator& P, const Nonlinearity& nl, std::span<const cplx> u0,
                                            std::size_t n_steps, double newton_tol = 1e-14, int newton_maxit = 50) {
  const double dt = P.dt();
  const std::size_t nx = P.size();
  std::vector<Vec> u;
  u.emplace_back(u0.begin(), u0.end());
  Vec src(nx);
  for (std::size_t n = 1; n <= n_steps; ++n) {
    const Vec r = P.apply(u.back());
    std::fill(src.begin(), src.end(), cplx{});
    if (nl.source) nl.source(static_cast<double>(n) * dt, src);
    Vec v = r;
    for (std::size_t i = 0; i < nx; ++i) {
      auto g = [&](cplx x) { return x - dt * (nl.f(x) + src[i]) - r[i]; };
      cplx x = v[i];
      cplx gx = g(x);
      bool ok = std::abs(gx) <= newton_tol * (1.0 + std::abs(r[i]));
      for (int it = 0; it < newton_maxit && !ok; ++it) {
        const cplx d = -gx / (1.0 - dt * nl.df(x));
        double lam = 1.0;
        cplx xn = x + d, gn = g(xn);
        for (int h = 0; h < 30 && std::abs(gn) >= std::abs(gx); ++h) {
          lam *= 0.5;
          xn = x + lam * d;
          gn = g(xn);
        }
        x = xn;
        gx = gn;
        ok = std::abs(gx) <= newton_tol * (1.0 + std::abs(r[i])) || std::abs(lam * d) <= newton_tol * (1.0 + std::abs(x));
      }
      if (!ok || !std::isfinite(x.real())) throw breakdown_error("if_sequential_solve: inner Newton did not converge");
      v[i] = x;
    }
    u.push_back(std::move(v));
  }
  return u;
}

/// Dense N x N matrix of A, assembled column by column.
inline Eigen::MatrixXcd dense_propagator(const Propagator& P) {
  const auto n = static_cast<Eigen::Index>(P.size());
  Eigen::MatrixXcd A(n, n);
  Vec e(P.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), cplx{});
    e[static_cast<std::size_t>(j)] = 1.0;
    const Vec c = P.apply(e);
    for (Eigen::Index i = 0; i < n; ++i) A(i, j) = c[static_cast<std::size_t>(i)];
  }
  return A;
}

namespace detail {

inline void track(IterationReport& rep, const NonlinearOptions& o, const BlockVector& u, double residual, int& rises) {
  rep.residual_history.push_back(residual);
  if (o.reference) {
    rep.error_history.push_back(max_block_error(u, *o.reference, o.error_weight));
    const auto& e = rep.error_history;
    if (e.size() >= 2 && e[e.size() - 1] > e[e.size() - 2]) ++rises;
    else rises = 0;
  }
}

inline bool finished(const IterationReport& rep, const NonlinearOptions& o) {
  return o.reference ? rep.error_history.back() < o.tol : rep.residual_history.back() < o.tol;
}

inline std::shared_ptr<const Propagator> borrow(const Propagator& P) {
  return std::shared_ptr<const Propagator>(&P, [](const Propagator*) {});
}

/// U - (C_0^alpha (x) A) U - dt N(U) - (A head, 0, ...)
inline BlockVector nonlinear_residual(const Propagator& P, const Nonlinearity& nl, double alpha,
                                      std::span<const cplx> head, const BlockVector& U) {
  const AllAtOnceOperator S(SchemeCoefficients::bdf(1), borrow(P), alpha, U.nt);
  BlockVector r = S.apply(U);
  const Vec Ah = P.apply(head);
  Vec nv(U.nx);
  for (std::size_t t = 0; t < U.nt; ++t) {
    nl.eval(U.block(t), static_cast<double>(t + 1) * P.dt(), nv);
    auto rb = r.block(t);
    for (std::size_t j = 0; j < U.nx; ++j) rb[j] -= P.dt() * nv[j];
    if (t == 0)
      for (std::size_t j = 0; j < U.nx; ++j) rb[j] -= Ah[j];
  }
  return r;
}

/// Block solver for I - C_0^alpha (x) A - dt I (x) diag(d): one dense LU per
/// time mode, or block forward substitution when alpha = 0.
class ModeJacobian {
 public:
  ModeJacobian(const Propagator& P, double alpha, std::size_t n_steps, Exec exec)
      : n_(n_steps), nx_(P.size()), alpha_(alpha), dt_(P.dt()), exec_(exec), A_(dense_propagator(P)) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw config_error("nonlinear: alpha must lie in [0, 1]");
    if (alpha > 0.0) {
      lam_ = AlphaCirculant{n_, 1, alpha}.eigenvalues();
      tt_ = TimeTransform(n_, alpha, nx_);
    }
  }

  void factorize(const Eigen::VectorXcd& d) {
    if (!lu_.empty() && d == d_) return;
    d_ = d;
    const std::size_t modes = alpha_ > 0.0 ? n_ : 1;
    lu_.assign(modes, {});
    std::atomic<bool> singular{false};
    parallel_for(modes, exec_.jobs, [&](std::size_t k) {
      const cplx l = alpha_ > 0.0 ? lam_[k] : cplx(0.0);
      Eigen::MatrixXcd J = -l * A_;
      J.diagonal().array() += 1.0 - dt_ * d.array();
      lu_[k].compute(J);
      if (!(lu_[k].matrixLU().diagonal().cwiseAbs().minCoeff() > 1e-14)) singular = true;
    });
    if (singular) throw breakdown_error("nonlinear: singular time-mode block");
  }

  /// r <- J^{-1} r
  void solve(BlockVector& r) const {
    const auto N = static_cast<Eigen::Index>(nx_);
    if (alpha_ > 0.0) {
      tt_.forward(r);
      parallel_for(n_, exec_.jobs, [&](std::size_t k) {
        Eigen::Map<Eigen::VectorXcd> x(r.block(k).data(), N);
        const Eigen::VectorXcd y = lu_[k].solve(x);
        x = y;
      });
      tt_.inverse(r);
    } else {
      Eigen::VectorXcd prev = Eigen::VectorXcd::Zero(N);
      for (std::size_t t = 0; t < n_; ++t) {
        Eigen::Map<Eigen::VectorXcd> x(r.block(t).data(), N);
        const Eigen::VectorXcd y = lu_[0].solve(x + A_ * prev);
        x = y;
        prev = y;
      }
    }
  }

 private:
  std::size_t n_, nx_;
  double alpha_, dt_;
  Exec exec_;
  Eigen::MatrixXcd A_;
  Vec lam_;
  TimeTransform tt_;
  Eigen::VectorXcd d_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> lu_;
};

inline Eigen::VectorXcd jacobian_diagonal(const Nonlinearity& nl, JacobianMode mode, std::span<const cplx> u0,
                                          const BlockVector& U) {
  const auto N = static_cast<Eigen::Index>(U.nx);
  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(N);
  if (mode == JacobianMode::InitialState) {
    for (Eigen::Index i = 0; i < N; ++i) d(i) = nl.df(u0[static_cast<std::size_t>(i)]);
  } else {
    for (std::size_t t = 0; t < U.nt; ++t)
      for (Eigen::Index i = 0; i < N; ++i) d(i) += nl.df(U.block(t)[static_cast<std::size_t>(i)]);
    d /= static_cast<double>(U.nt);
  }
  return d;
}

template <class Step>
std::pair<BlockVector, IterationReport> outer_loop(const NonlinearOptions& o, BlockVector U, Step step) {
  Stopwatch sw;
  IterationReport rep;
  int rises = 0;
  track(rep, o, U, step(U, 0), rises);
  rep.termination = Termination::MaxIter;
  if (finished(rep, o)) {
    rep.termination = Termination::Converged;
  } else {
    for (int k = 1; k <= o.maxit; ++k) {
      const double res = step(U, k);
      rep.iterations = k;
      track(rep, o, U, res, rises);
      if (finished(rep, o)) {
        rep.termination = Termination::Converged;
        break;
      }
      if (!std::isfinite(res)) {
        rep.termination = Termination::Diverged;
        break;
      }
      if (rises >= o.divergence_window) {
        // Rising within a decade of the best error is a floor, not divergence.
        const auto& e = rep.error_history;
        const bool grew = e.back() > 10.0 * *std::min_element(e.begin(), e.end());
        rep.termination = grew ? Termination::Diverged : Termination::Stagnated;
        break;
      }
    }
  }
  rep.wall_seconds = sw.seconds();
  return {std::move(U), std::move(rep)};
}

}  // namespace detail

/// Outer iteration (I - C_0^alpha (x) A) U^k = dt N(U^{k-1}) + b^{k-1}.
/// Reported residuals are ||U - (C_0 (x) A) U - dt N(U) - f||.
inline std::pair<BlockVector, IterationReport> imex_paradiag_solve(std::shared_ptr<const Propagator> prop,
                                                                   const Nonlinearity& nl, double alpha,
                                                                   std::span<const cplx> u0, std::size_t n_steps,
                                                                   const NonlinearOptions& o = {}, Exec exec = {}) {
  const auto& P = *prop;
  const std::size_t nx = P.size();
  const ParaDiagPreconditioner M(SchemeCoefficients::bdf(1), prop, alpha, n_steps, exec);
  const Vec Au0 = P.apply(u0);
  Vec nv(nx);
  auto step = [&](BlockVector& U, int k) {
    if (k > 0) {
      BlockVector b(n_steps, nx);
      for (std::size_t t = 0; t < n_steps; ++t) {
        nl.eval(U.block(t), static_cast<double>(t + 1) * P.dt(), nv);
        auto bb = b.block(t);
        for (std::size_t j = 0; j < nx; ++j) bb[j] = P.dt() * nv[j];
      }
      const Vec AuN = P.apply(U.block(n_steps - 1));
      auto b0 = b.block(0);
      for (std::size_t j = 0; j < nx; ++j) b0[j] += Au0[j] - alpha * AuN[j];
      U = M.apply(b);
    }
    return norm2(detail::nonlinear_residual(P, nl, 0.0, u0, U).data);
  };
  return detail::outer_loop(o, o.x0 ? *o.x0 : BlockVector(n_steps, nx), step);
}

/// Inexact Newton in correction form: (I - C_0^alpha (x) A - dt I (x) D) delta = -Psi(U),
/// with D the averaged or initial-state diagonal Jacobian. Each time mode is
/// solved by a dense LU.
inline std::pair<BlockVector, IterationReport> newton_paradiag_solve(std::shared_ptr<const Propagator> prop,
                                                                     const Nonlinearity& nl, double alpha,
                                                                     std::span<const cplx> u0, std::size_t n_steps,
                                                                     JacobianMode mode, const NonlinearOptions& o = {},
                                                                     Exec exec = {}) {
  const auto& P = *prop;
  detail::ModeJacobian J(P, alpha, n_steps, exec);
  BlockVector psi;
  auto step = [&](BlockVector& U, int k) {
    if (k > 0) {
      if (k == 1 || mode == JacobianMode::TimeAveraged) J.factorize(detail::jacobian_diagonal(nl, mode, u0, U));
      J.solve(psi);
      for (std::size_t i = 0; i < U.data.size(); ++i) U.data[i] -= psi.data[i];
    }
    psi = detail::nonlinear_residual(P, nl, 0.0, u0, U);
    return norm2(psi.data);
  };
  return detail::outer_loop(o, o.x0 ? *o.x0 : BlockVector(n_steps, P.size()), step);
}

/// Implicit alpha-iteration: each outer step solves
/// u_n^k = A u_{n-1}^k + dt N(u_n^k), u_0^k = u_0 + alpha (u_N^k - u_N^{k-1})
/// by inner averaged-Jacobian Newton to `inner_tol`.
inline std::pair<BlockVector, IterationReport> implicit_paradiag_solve(
    std::shared_ptr<const Propagator> prop, const Nonlinearity& nl, double alpha, std::span<const cplx> u0,
    std::size_t n_steps, const NonlinearOptions& o = {}, double inner_tol = 1e-13, int inner_maxit = 50,
    Exec exec = {}) {
  const auto& P = *prop;
  const std::size_t nx = P.size();
  detail::ModeJacobian J(P, alpha, n_steps, exec);
  Vec head(nx);
  auto step = [&](BlockVector& U, int k) {
    if (k > 0) {
      const auto last = U.block(n_steps - 1);
      for (std::size_t j = 0; j < nx; ++j) head[j] = u0[j] - alpha * last[j];
      BlockVector psi = detail::nonlinear_residual(P, nl, alpha, head, U);
      const double scale = std::max(norm2(psi.data), 1e-300);
      for (int m = 0; m < inner_maxit && norm2(psi.data) > inner_tol * scale; ++m) {
        J.factorize(detail::jacobian_diagonal(nl, JacobianMode::TimeAveraged, u0, U));
        J.solve(psi);
        for (std::size_t i = 0; i < U.data.size(); ++i) U.data[i] -= psi.data[i];
        psi = detail::nonlinear_residual(P, nl, alpha, head, U);
      }
    }
    return norm2(detail::nonlinear_residual(P, nl, 0.0, u0, U).data);
  };
  return detail::outer_loop(o, o.x0 ? *o.x0 : BlockVector(n_steps, nx), step);
}

/// alpha q / (1 - alpha q), q = exp(-2 T M / (1 + 2 dt M)). Values >= 1 mean no contraction.
inline double nonlinear_contraction_bound(double alpha, double M, double T, double dt) {
  if (M < 0.0) throw config_error("nonlinear bound: M must be >= 0");
  const double q = std::abs(alpha) * std::exp(-2.0 * T * M / (1.0 + 2.0 * dt * M));
  if (q >= 1.0) return INFINITY;
  return q / (1.0 - q);
}

}  // namespace expparadiag
