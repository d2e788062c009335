#pragma once

#include <memory>

#include "circulant.hpp"
#include "propagator.hpp"

namespace expparadiag {

/// u_n = sum_p w_p A^p u_{n-p}, weights stored as exact rationals num/den.
struct SchemeCoefficients {
  int order = 1;
  std::vector<long> num;
  long den = 1;
  std::vector<double> w;

  static SchemeCoefficients bdf(int s) {
    SchemeCoefficients c;
    c.order = s;
    switch (s) {
      case 1: c.num = {1}; c.den = 1; break;
      case 2: c.num = {4, -1}; c.den = 3; break;
      case 3: c.num = {18, -9, 2}; c.den = 11; break;
      case 4: c.num = {48, -36, 16, -3}; c.den = 25; break;
      case 5: c.num = {300, -300, 200, -75, 12}; c.den = 137; break;
      case 6: c.num = {360, -450, 400, -225, 72, -10}; c.den = 147; break;
      default: throw config_error("scheme: order must lie in 1..6");
    }
    for (long n : c.num) c.w.push_back(static_cast<double>(n) / static_cast<double>(c.den));
    return c;
  }

  double weight(int p) const { return w[static_cast<std::size_t>(p - 1)]; }
  /// Number of unknown blocks u_s..u_{n_steps}.
  std::size_t unknowns(std::size_t n_steps) const {
    if (n_steps < static_cast<std::size_t>(order)) throw config_error("scheme: fewer steps than the scheme order");
    return n_steps - static_cast<std::size_t>(order) + 1;
  }
};

namespace detail {
inline void to_coeffs(const SpectralOperator& op, BlockVector& v, unsigned jobs = 1) {
  parallel_for(v.nt, jobs, [&](std::size_t t) { op.forward(v.block(t)); });
}
inline void from_coeffs(const SpectralOperator& op, BlockVector& v, unsigned jobs = 1) {
  parallel_for(v.nt, jobs, [&](std::size_t t) { op.inverse(v.block(t)); });
}
}  // namespace detail

/// I - sum_p w_p C_{p-1}^{alpha} (x) A^p, applied matrix-free.
class AllAtOnceOperator {
 public:
  AllAtOnceOperator(SchemeCoefficients scheme, std::shared_ptr<const Propagator> prop, double alpha,
                    std::size_t n_time, Exec exec = {})
      : scheme_(std::move(scheme)), prop_(std::move(prop)), alpha_(alpha), n_(n_time), exec_(exec) {
    if (!prop_) throw config_error("all-at-once: missing propagator");
    if (n_ < 1) throw config_error("all-at-once: n_time must be >= 1");
    if (alpha_ != 0.0 && n_ <= static_cast<std::size_t>(scheme_.order))
      throw config_error("all-at-once: n_time must exceed the scheme order when alpha > 0");
    if (alpha_ < 0.0 || alpha_ > 1.0) throw config_error("all-at-once: alpha must lie in [0, 1]");
  }

  const SchemeCoefficients& scheme() const { return scheme_; }
  const Propagator& propagator() const { return *prop_; }
  std::shared_ptr<const Propagator> propagator_ptr() const { return prop_; }
  double alpha() const { return alpha_; }
  std::size_t n_time() const { return n_; }
  std::size_t nx() const { return prop_->size(); }
  BlockVector zeros() const { return BlockVector(n_, nx()); }

  BlockVector apply(const BlockVector& v) const {
    check(v);
    BlockVector c = v;
    detail::to_coeffs(prop_->op(), c, exec_.jobs);
    BlockVector out(n_, nx());
    apply_coeffs(c, out);
    detail::from_coeffs(prop_->op(), out, exec_.jobs);
    return out;
  }

  /// Same operator acting on eigenbasis coefficients (block-diagonal in space).
  void apply_coeffs(const BlockVector& c, BlockVector& out) const {
    const std::size_t nx_ = nx();
    parallel_for(n_, exec_.jobs, [&](std::size_t t) {
      auto o = out.block(t);
      auto x = c.block(t);
      for (std::size_t j = 0; j < nx_; ++j) o[j] = x[j];
      for (int p = 1; p <= scheme_.order; ++p) {
        const auto up = static_cast<std::size_t>(p);
        const cplx* src = nullptr;
        double scale = scheme_.weight(p);
        if (t >= up) {
          src = c.block(t - up).data();
        } else if (alpha_ != 0.0) {
          src = c.block(n_ - up + t).data();
          scale *= alpha_;
        }
        if (!src) continue;
        const Vec& m = prop_->multipliers(p);
        for (std::size_t j = 0; j < nx_; ++j) o[j] -= scale * m[j] * src[j];
      }
    });
  }

 private:
  void check(const BlockVector& v) const {
    if (v.nt != n_ || v.nx != nx()) throw config_error("all-at-once: size mismatch");
  }

  SchemeCoefficients scheme_;
  std::shared_ptr<const Propagator> prop_;
  double alpha_;
  std::size_t n_;
  Exec exec_;
};

/// Startup values u_m = A^m u_0, m = 0..s-1.
inline std::vector<Vec> startup_blocks(const Propagator& P, std::span<const cplx> u0, int s) {
  std::vector<Vec> out;
  out.emplace_back(u0.begin(), u0.end());
  for (int m = 1; m < s; ++m) out.push_back(P.power_apply(m, u0));
  return out;
}

/// Right-hand side carrying the startup blocks u_0..u_{s-1}.
inline BlockVector build_rhs(const SchemeCoefficients& sc, const Propagator& P, const std::vector<Vec>& startup,
                             std::size_t n_time) {
  const int s = sc.order;
  if (startup.size() != static_cast<std::size_t>(s)) throw config_error("build_rhs: need exactly s startup blocks");
  BlockVector f(n_time, P.size());
  for (int i = 0; i < s && static_cast<std::size_t>(i) < n_time; ++i) {
    auto blk = f.block(static_cast<std::size_t>(i));
    for (int p = i + 1; p <= s; ++p) {
      const Vec& u = startup[static_cast<std::size_t>(s - 1 - (p - 1 - i))];
      if (u.size() != P.size()) throw config_error("build_rhs: startup block size mismatch");
      const Vec Au = P.power_apply(p, u);
      const double w = sc.weight(p);
      for (std::size_t j = 0; j < blk.size(); ++j) blk[j] += w * Au[j];
    }
  }
  return f;
}

/// Time stepping u_n = sum_p w_p A^p u_{n-p}; returns u_0..u_{n_steps}.
inline std::vector<Vec> sequential_solve(const SchemeCoefficients& sc, const Propagator& P, std::span<const cplx> u0,
                                         std::size_t n_steps) {
  std::vector<Vec> u = startup_blocks(P, u0, sc.order);
  u.resize(std::min(u.size(), n_steps + 1));
  const auto& op = P.op();
  std::vector<Vec> c;
  for (auto& x : u) {
    c.push_back(x);
    op.forward(c.back());
  }
  for (std::size_t n = u.size(); n <= n_steps; ++n) {
    Vec next(P.size());
    for (int p = 1; p <= sc.order; ++p) {
      const Vec& m = P.multipliers(p);
      const Vec& prev = c[n - static_cast<std::size_t>(p)];
      const double w = sc.weight(p);
      for (std::size_t j = 0; j < next.size(); ++j) next[j] += w * m[j] * prev[j];
    }
    c.push_back(next);
    op.inverse(next);
    u.push_back(std::move(next));
  }
  return u;
}

/// Packs u_s..u_{n_steps} of a trajectory into the unknown vector of order s.
inline BlockVector unknowns_from_trajectory(const std::vector<Vec>& traj, int s) {
  if (traj.size() < static_cast<std::size_t>(s) + 1) throw config_error("trajectory too short");
  const std::size_t n = traj.size() - static_cast<std::size_t>(s);
  BlockVector v(n, traj[0].size());
  for (std::size_t t = 0; t < n; ++t) std::copy(traj[t + static_cast<std::size_t>(s)].begin(), traj[t + static_cast<std::size_t>(s)].end(), v.block(t).begin());
  return v;
}

/// Exact solve of the alpha = 0 system by block forward substitution.
inline BlockVector forward_substitution(const AllAtOnceOperator& S, const BlockVector& rhs) {
  if (S.alpha() != 0.0) throw config_error("forward_substitution: requires alpha = 0");
  const auto& P = S.propagator();
  const auto& sc = S.scheme();
  BlockVector c = rhs;
  detail::to_coeffs(P.op(), c);
  for (std::size_t t = 0; t < c.nt; ++t) {
    auto o = c.block(t);
    for (int p = 1; p <= sc.order && static_cast<std::size_t>(p) <= t; ++p) {
      const Vec& m = P.multipliers(p);
      auto prev = c.block(t - static_cast<std::size_t>(p));
      const double w = sc.weight(p);
      for (std::size_t j = 0; j < o.size(); ++j) o[j] += w * m[j] * prev[j];
    }
  }
  detail::from_coeffs(P.op(), c);
  return c;
}

}  // namespace expparadiag
