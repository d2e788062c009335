#pragma once

#include <chrono>
#include <functional>
#include <optional>

#include "allatonce.hpp"

namespace expparadiag {

enum class Termination { Converged, MaxIter, Breakdown, Diverged, Stagnated };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIter: return "maxit";
    case Termination::Breakdown: return "breakdown";
    case Termination::Diverged: return "diverged";
    case Termination::Stagnated: return "stagnated";
  }
  return "?";
}

struct IterationReport {
  int iterations = 0;
  std::vector<double> residual_history;
  std::vector<double> error_history;
  Termination termination = Termination::MaxIter;
  double wall_seconds = 0.0;

  bool converged() const { return termination == Termination::Converged; }
};

struct SolverOptions {
  double tol = 1e-10;
  int maxit = 100;
  /// Reference solution for error histories; Richardson stops on error when set.
  const BlockVector* reference = nullptr;
  double error_weight = 1.0;
  const BlockVector* x0 = nullptr;
  /// Richardson only: stop as Stagnated once e_k > ratio * e_{k-1}. 0 disables.
  double stagnation_ratio = 0.0;
  /// Krylov solvers: test the error against `reference` instead of the residual.
  bool stop_on_error = false;
};

namespace detail {
class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

inline void axpy(cplx a, const BlockVector& x, BlockVector& y) {
  for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += a * x.data[i];
}
}  // namespace detail

/// Diagonalized inverse of I - sum_p w_p C_{p-1}^{alpha} (x) A^p. alpha = 0
/// falls back to exact block forward substitution.
class ParaDiagPreconditioner {
 public:
  static constexpr double breakdown_tol = 1e-14;

  ParaDiagPreconditioner(SchemeCoefficients scheme, std::shared_ptr<const Propagator> prop, double alpha,
                         std::size_t n_time, Exec exec = {})
      : scheme_(std::move(scheme)), prop_(std::move(prop)), alpha_(alpha), n_(n_time), exec_(exec) {
    if (!prop_) throw config_error("preconditioner: missing propagator");
    if (alpha_ == 0.0) return;
    if (n_ <= static_cast<std::size_t>(scheme_.order))
      throw config_error("preconditioner: n_time must exceed the scheme order");
    const std::size_t nx = prop_->size();
    tt_ = TimeTransform(n_, alpha_, nx);
    const Vec lam = AlphaCirculant{n_, 1, alpha_}.eigenvalues();
    inv_delta_ = BlockVector(n_, nx);
    min_delta_ = INFINITY;
    for (std::size_t k = 0; k < n_; ++k) {
      auto row = inv_delta_.block(k);
      for (std::size_t j = 0; j < nx; ++j) {
        cplx sum{};
        cplx lp{1.0, 0.0};
        for (int p = 1; p <= scheme_.order; ++p) {
          lp *= lam[k];
          sum += scheme_.weight(p) * lp * prop_->multipliers(p)[j];
        }
        const cplx delta = 1.0 - sum;
        min_delta_ = std::min(min_delta_, std::abs(delta));
        if (std::abs(delta) < breakdown_tol) throw breakdown_error("preconditioner: vanishing divisor");
        row[j] = 1.0 / delta;
      }
    }
  }

  const SchemeCoefficients& scheme() const { return scheme_; }
  const Propagator& propagator() const { return *prop_; }
  double alpha() const { return alpha_; }
  std::size_t n_time() const { return n_; }
  double min_divisor() const { return min_delta_; }
  const TimeTransform& time_transform() const { return tt_; }

  BlockVector apply(const BlockVector& r) const {
    if (r.nt != n_ || r.nx != prop_->size()) throw config_error("preconditioner: size mismatch");
    if (alpha_ == 0.0) return forward_substitution(AllAtOnceOperator(scheme_, prop_, 0.0, n_), r);
    BlockVector c = r;
    detail::to_coeffs(prop_->op(), c, exec_.jobs);
    apply_coeffs(c);
    detail::from_coeffs(prop_->op(), c, exec_.jobs);
    return c;
  }

  /// Same inverse acting on spatial eigenbasis coefficients, in place.
  void apply_coeffs(BlockVector& c) const {
    if (alpha_ == 0.0) {
      detail::from_coeffs(prop_->op(), c);
      c = forward_substitution(AllAtOnceOperator(scheme_, prop_, 0.0, n_), c);
      detail::to_coeffs(prop_->op(), c);
      return;
    }
    tt_.forward(c);
    parallel_for(n_, exec_.jobs, [&](std::size_t k) {
      auto x = c.block(k);
      auto d = inv_delta_.block(k);
      for (std::size_t j = 0; j < x.size(); ++j) x[j] *= d[j];
    });
    tt_.inverse(c);
  }

 private:
  SchemeCoefficients scheme_;
  std::shared_ptr<const Propagator> prop_;
  double alpha_;
  std::size_t n_;
  Exec exec_;
  TimeTransform tt_;
  BlockVector inv_delta_;
  double min_delta_ = INFINITY;
};

/// v -> P^{-1} S v with one forward and one inverse spatial transform per block.
class PreconditionedOperator {
 public:
  PreconditionedOperator(const AllAtOnceOperator& S, const ParaDiagPreconditioner& P, Exec exec = {})
      : S_(S), P_(P), exec_(exec) {}

  void operator()(const BlockVector& v, BlockVector& out) const {
    const auto& op = S_.propagator().op();
    BlockVector c = v;
    detail::to_coeffs(op, c, exec_.jobs);
    out = BlockVector(v.nt, v.nx);
    S_.apply_coeffs(c, out);
    P_.apply_coeffs(out);
    detail::from_coeffs(op, out, exec_.jobs);
  }

 private:
  const AllAtOnceOperator& S_;
  const ParaDiagPreconditioner& P_;
  Exec exec_;
};

using LinearMap = std::function<void(const BlockVector&, BlockVector&)>;

/// u <- u + P^{-1}(f - S u)
inline std::pair<BlockVector, IterationReport> richardson_solve(const AllAtOnceOperator& S,
                                                                const ParaDiagPreconditioner& P,
                                                                const BlockVector& f, const SolverOptions& o = {}) {
  if (!(o.tol > 0.0)) throw config_error("richardson: tol must be positive");
  detail::Stopwatch sw;
  IterationReport rep;
  BlockVector u = o.x0 ? *o.x0 : S.zeros();
  const double fn = std::max(norm2(f.data), 1e-300);
  auto measure = [&](const BlockVector& r) {
    rep.residual_history.push_back(norm2(r.data) / fn);
    if (o.reference) rep.error_history.push_back(max_block_error(u, *o.reference, o.error_weight));
  };
  auto done = [&]() {
    return o.reference ? rep.error_history.back() < o.tol : rep.residual_history.back() < o.tol;
  };
  BlockVector r = S.apply(u);
  for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] = f.data[i] - r.data[i];
  measure(r);
  rep.termination = Termination::MaxIter;
  if (done()) {
    rep.termination = Termination::Converged;
  } else {
    for (int k = 1; k <= o.maxit; ++k) {
      const BlockVector s = P.apply(r);
      detail::axpy(1.0, s, u);
      r = S.apply(u);
      for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] = f.data[i] - r.data[i];
      rep.iterations = k;
      measure(r);
      if (done()) {
        rep.termination = Termination::Converged;
        break;
      }
      if (o.stagnation_ratio > 0.0 && o.reference) {
        const auto& e = rep.error_history;
        if (e[e.size() - 1] > o.stagnation_ratio * e[e.size() - 2]) {
          rep.termination = Termination::Stagnated;
          break;
        }
      }
    }
  }
  rep.wall_seconds = sw.seconds();
  return {std::move(u), std::move(rep)};
}

/// Head-condition iteration: each sweep solves (I - C_0^alpha (x) A) U^k = b^{k-1}
/// with b^{k-1} = (A u_0 - alpha A u_{N_t}^{k-1}, 0, ...).
inline std::pair<BlockVector, IterationReport> waveform_iterate(std::shared_ptr<const Propagator> prop, double alpha,
                                                                std::span<const cplx> u0, std::size_t n_time,
                                                                const SolverOptions& o = {}, Exec exec = {}) {
  detail::Stopwatch sw;
  const auto sc = SchemeCoefficients::bdf(1);
  ParaDiagPreconditioner P(sc, prop, alpha, n_time, exec);
  IterationReport rep;
  const std::size_t nx = prop->size();
  BlockVector u = o.x0 ? *o.x0 : BlockVector(n_time, nx);
  const Vec Au0 = prop->apply(u0);
  auto err = [&] { return o.reference ? max_block_error(u, *o.reference, o.error_weight) : 0.0; };
  if (o.reference) rep.error_history.push_back(err());
  rep.termination = Termination::MaxIter;
  if (o.reference && rep.error_history.back() < o.tol) {
    rep.termination = Termination::Converged;
  } else {
    for (int k = 1; k <= o.maxit; ++k) {
      BlockVector b(n_time, nx);
      const Vec AuN = prop->apply(u.block(n_time - 1));
      auto b0 = b.block(0);
      for (std::size_t j = 0; j < nx; ++j) b0[j] = Au0[j] - alpha * AuN[j];
      BlockVector next = P.apply(b);
      double change = 0.0;
      for (std::size_t i = 0; i < next.data.size(); ++i) change = std::max(change, std::abs(next.data[i] - u.data[i]));
      u = std::move(next);
      rep.iterations = k;
      rep.residual_history.push_back(change);
      if (o.reference) rep.error_history.push_back(err());
      const bool ok = o.reference ? rep.error_history.back() < o.tol : change < o.tol;
      if (ok) {
        rep.termination = Termination::Converged;
        break;
      }
    }
  }
  rep.wall_seconds = sw.seconds();
  return {std::move(u), std::move(rep)};
}

/// Full GMRES (modified Gram-Schmidt, Givens rotations) on A x = b.
/// Residuals are relative to ||b||.
inline std::pair<BlockVector, IterationReport> gmres(const LinearMap& A, const BlockVector& b,
                                                     const SolverOptions& o = {}) {
  detail::Stopwatch sw;
  IterationReport rep;
  BlockVector x = o.x0 ? *o.x0 : BlockVector(b.nt, b.nx);
  const double bn = norm2(b.data);
  auto record_error = [&](const BlockVector& xk) {
    if (o.reference) rep.error_history.push_back(max_block_error(xk, *o.reference, o.error_weight));
  };
  if (bn == 0.0) {
    x = BlockVector(b.nt, b.nx);
    rep.residual_history.push_back(0.0);
    record_error(x);
    rep.termination = Termination::Converged;
    rep.wall_seconds = sw.seconds();
    return {std::move(x), std::move(rep)};
  }
  BlockVector r(b.nt, b.nx);
  A(x, r);
  for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] = b.data[i] - r.data[i];
  const double beta = norm2(r.data);
  rep.residual_history.push_back(beta / bn);
  record_error(x);
  const bool by_error = o.stop_on_error && o.reference;
  auto small = [&](double res) { return by_error ? rep.error_history.back() < o.tol : res < o.tol; };
  if (small(beta / bn)) {
    rep.termination = Termination::Converged;
    rep.wall_seconds = sw.seconds();
    return {std::move(x), std::move(rep)};
  }
  const int m = o.maxit;
  std::vector<BlockVector> V;
  V.reserve(static_cast<std::size_t>(m) + 1);
  V.push_back(r);
  for (auto& z : V[0].data) z /= beta;
  std::vector<std::vector<cplx>> H(static_cast<std::size_t>(m) + 1, std::vector<cplx>(static_cast<std::size_t>(m)));
  std::vector<cplx> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m)), g(static_cast<std::size_t>(m) + 1);
  g[0] = beta;

  auto solution = [&](int k) {
    std::vector<cplx> y(static_cast<std::size_t>(k));
    for (int i = k - 1; i >= 0; --i) {
      cplx s = g[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) s -= H[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(i)] = s / H[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    }
    BlockVector xk = x;
    for (int j = 0; j < k; ++j) detail::axpy(y[static_cast<std::size_t>(j)], V[static_cast<std::size_t>(j)], xk);
    return xk;
  };

  rep.termination = Termination::MaxIter;
  int k = 0;
  for (; k < m;) {
    const auto ku = static_cast<std::size_t>(k);
    BlockVector w(b.nt, b.nx);
    A(V[ku], w);
    for (std::size_t i = 0; i <= ku; ++i) {
      const cplx hij = dot(V[i].data, w.data);
      H[i][ku] = hij;
      detail::axpy(-hij, V[i], w);
    }
    const double hn = norm2(w.data);
    H[ku + 1][ku] = hn;
    for (std::size_t i = 0; i < ku; ++i) {
      const cplx t = std::conj(cs[i]) * H[i][ku] + std::conj(sn[i]) * H[i + 1][ku];
      H[i + 1][ku] = -sn[i] * H[i][ku] + cs[i] * H[i + 1][ku];
      H[i][ku] = t;
    }
    const cplx a = H[ku][ku];
    const double bb = hn;
    const double rr = std::sqrt(std::norm(a) + bb * bb);
    if (rr == 0.0) {
      rep.termination = Termination::Breakdown;
      break;
    }
    cs[ku] = a / rr;
    sn[ku] = bb / rr;
    H[ku][ku] = rr;
    H[ku + 1][ku] = 0.0;
    g[ku + 1] = -sn[ku] * g[ku];
    g[ku] = std::conj(cs[ku]) * g[ku];
    ++k;
    rep.iterations = k;
    const double res = std::abs(g[ku + 1]) / bn;
    rep.residual_history.push_back(res);
    if (o.reference) record_error(solution(k));
    if (small(res) || hn <= 1e-14 * beta) {
      rep.termination = Termination::Converged;
      break;
    }
    V.push_back(w);
    for (auto& z : V.back().data) z /= hn;
  }
  if (k > 0) x = solution(k);
  rep.wall_seconds = sw.seconds();
  return {std::move(x), std::move(rep)};
}

/// BiCGStab on A x = b; one iteration is two operator applications.
inline std::pair<BlockVector, IterationReport> bicgstab(const LinearMap& A, const BlockVector& b,
                                                        const SolverOptions& o = {}) {
  detail::Stopwatch sw;
  IterationReport rep;
  BlockVector x = o.x0 ? *o.x0 : BlockVector(b.nt, b.nx);
  const double bn = norm2(b.data);
  auto record_error = [&] {
    if (o.reference) rep.error_history.push_back(max_block_error(x, *o.reference, o.error_weight));
  };
  const bool by_error = o.stop_on_error && o.reference;
  auto small = [&](double res) { return by_error ? rep.error_history.back() < o.tol : res < o.tol; };
  auto finish = [&](Termination t) {
    rep.termination = t;
    rep.wall_seconds = sw.seconds();
    return std::pair<BlockVector, IterationReport>{std::move(x), std::move(rep)};
  };
  if (bn == 0.0) {
    x = BlockVector(b.nt, b.nx);
    rep.residual_history.push_back(0.0);
    record_error();
    return finish(Termination::Converged);
  }
  BlockVector r(b.nt, b.nx);
  A(x, r);
  for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] = b.data[i] - r.data[i];
  rep.residual_history.push_back(norm2(r.data) / bn);
  record_error();
  if (small(rep.residual_history.back())) return finish(Termination::Converged);
  const BlockVector rhat = r;
  BlockVector p(b.nt, b.nx), v(b.nt, b.nx), s(b.nt, b.nx), t(b.nt, b.nx);
  cplx rho{1.0}, alpha{1.0}, omega{1.0};
  const double tiny = 1e-300;
  for (int k = 1; k <= o.maxit; ++k) {
    const cplx rho_new = dot(rhat.data, r.data);
    if (std::abs(rho_new) < tiny) return finish(Termination::Breakdown);
    const cplx beta = (rho_new / rho) * (alpha / omega);
    for (std::size_t i = 0; i < p.data.size(); ++i) p.data[i] = r.data[i] + beta * (p.data[i] - omega * v.data[i]);
    A(p, v);
    const cplx den = dot(rhat.data, v.data);
    if (std::abs(den) < tiny) return finish(Termination::Breakdown);
    alpha = rho_new / den;
    for (std::size_t i = 0; i < s.data.size(); ++i) s.data[i] = r.data[i] - alpha * v.data[i];
    rep.iterations = k;
    const double sres = norm2(s.data) / bn;
    if (sres < o.tol) {
      detail::axpy(alpha, p, x);
      rep.residual_history.push_back(sres);
      record_error();
      return finish(small(sres) ? Termination::Converged : Termination::Stagnated);
    }
    A(s, t);
    const double tt = std::real(dot(t.data, t.data));
    if (tt < tiny) return finish(Termination::Breakdown);
    omega = dot(t.data, s.data) / tt;
    for (std::size_t i = 0; i < x.data.size(); ++i) {
      x.data[i] += alpha * p.data[i] + omega * s.data[i];
      r.data[i] = s.data[i] - omega * t.data[i];
    }
    rep.residual_history.push_back(norm2(r.data) / bn);
    record_error();
    if (small(rep.residual_history.back())) return finish(Termination::Converged);
    if (std::abs(omega) < tiny) return finish(Termination::Breakdown);
    rho = rho_new;
  }
  return finish(Termination::MaxIter);
}

/// Left-preconditioned GMRES on P^{-1} S u = P^{-1} f.
inline std::pair<BlockVector, IterationReport> gmres_solve(const AllAtOnceOperator& S, const ParaDiagPreconditioner& P,
                                                           const BlockVector& f, const SolverOptions& o = {},
                                                           Exec exec = {}) {
  detail::Stopwatch sw;
  const PreconditionedOperator A(S, P, exec);
  auto out = gmres(A, P.apply(f), o);
  out.second.wall_seconds = sw.seconds();
  return out;
}

/// Left-preconditioned BiCGStab on P^{-1} S u = P^{-1} f.
inline std::pair<BlockVector, IterationReport> bicgstab_solve(const AllAtOnceOperator& S,
                                                              const ParaDiagPreconditioner& P, const BlockVector& f,
                                                              const SolverOptions& o = {}, Exec exec = {}) {
  detail::Stopwatch sw;
  const PreconditionedOperator A(S, P, exec);
  auto out = bicgstab(A, P.apply(f), o);
  out.second.wall_seconds = sw.seconds();
  return out;
}

/// Drops imaginary parts when they are below tol * ||Re||_inf; returns false otherwise.
inline bool drop_imaginary(BlockVector& v, double tol = 1e-8) {
  double re = 0.0, im = 0.0;
  for (const auto& z : v.data) {
    re = std::max(re, std::abs(z.real()));
    im = std::max(im, std::abs(z.imag()));
  }
  if (im > tol * re) return false;
  for (auto& z : v.data) z = {z.real(), 0.0};
  return true;
}

}  // namespace expparadiag
