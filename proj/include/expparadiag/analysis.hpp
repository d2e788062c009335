#pragma once

#include <Eigen/Dense>

#include <ostream>

#include "solvers.hpp"

namespace expparadiag {

struct SpectrumReport {
  int order = 1;
  double alpha = 0.0;
  std::size_t nx = 0, n_time = 0;
  /// Eigenvalues of P^{-1} S.
  std::vector<cplx> eigenvalues;
  /// rho(I - P^{-1} S)
  double spectral_radius = 0.0;
  /// max |lambda - 1| over the spectrum of P^{-1} S
  double max_distance_from_one = 0.0;
  /// NaN when no bound is available (s >= 3).
  double radius_bound = NAN;
  double cluster_bound = NAN;
  bool bound_satisfied = true;
  /// Numerical rank of I - P^{-1} S (singular values > 1e-10 sigma_max).
  int rank = 0;
  /// Largest entry of I - P^{-1} S outside its last `order` block columns.
  double structure_residual = 0.0;
  /// Smallest reciprocal condition number over the blocks in the last two
  /// block columns of P^{-1} S - I (s = 2 only).
  double min_block_rcond = NAN;

  void write_csv(std::ostream& os) const {
    os << "# order=" << order << ",alpha=" << alpha << ",nx=" << nx << ",n_time=" << n_time
       << ",spectral_radius=" << spectral_radius << ",radius_bound=" << radius_bound
       << ",max_distance_from_one=" << max_distance_from_one << ",cluster_bound=" << cluster_bound
       << ",bound_satisfied=" << (bound_satisfied ? 1 : 0) << ",rank=" << rank << "\n";
    os << "re,im\n";
    os.precision(17);
    for (auto z : eigenvalues) os << z.real() << "," << z.imag() << "\n";
  }
};

/// |alpha| e^{lambda_max T} / (1 - |alpha| e^{lambda_max T}) for s = 1;
/// alpha / (1 - alpha) for s = 2.
inline double theoretical_contraction(int order, double alpha, double lambda_max, double T) {
  double q = std::abs(alpha);
  if (order == 1) q *= std::exp(lambda_max * T);
  else if (order != 2) throw config_error("theoretical_contraction: order must be 1 or 2");
  if (!(q < 1.0)) throw config_error("theoretical_contraction: denominator <= 0");
  return q / (1.0 - q);
}

/// Radius of the disc around 1 holding the spectrum of P^{-1} S.
inline double cluster_radius(int order, double alpha) {
  if (order == 1) return alpha / (1.0 - alpha);
  if (order == 2) return (alpha + alpha * alpha) / (1.0 - alpha - alpha * alpha);
  return NAN;
}

/// The two nonzero eigenvalues of M_z for BDF2 with n unknown blocks.
inline std::pair<cplx, cplx> mz_closed_form(double alpha, cplx z, std::size_t n) {
  const double m = static_cast<double>(n);
  const cplx a = alpha * std::exp(m * z);
  const cplx b = alpha * std::pow(std::exp(z) / 3.0, m);
  return {-a / (1.0 - a), -b / (1.0 - b)};
}

/// Dense matrix of a block linear map, assembled column by column.
inline Eigen::MatrixXcd dense_matrix(const LinearMap& f, std::size_t nt, std::size_t nx) {
  const auto N = static_cast<Eigen::Index>(nt * nx);
  Eigen::MatrixXcd M(N, N);
  BlockVector e(nt, nx);
  for (Eigen::Index j = 0; j < N; ++j) {
    std::fill(e.data.begin(), e.data.end(), cplx{});
    e.data[static_cast<std::size_t>(j)] = 1.0;
    BlockVector c(nt, nx);
    f(e, c);
    M.col(j) = Eigen::Map<const Eigen::VectorXcd>(c.data.data(), N);
  }
  return M;
}

/// Dense P^{-1} S for the given scheme.
inline Eigen::MatrixXcd dense_preconditioned(int order, std::shared_ptr<const Propagator> prop, std::size_t n_time,
                                             double alpha) {
  if (n_time * prop->size() > 4000) throw config_error("preconditioned_spectrum: size exceeds 4000");
  const auto sc = SchemeCoefficients::bdf(order);
  const AllAtOnceOperator S(sc, prop, 0.0, n_time);
  const ParaDiagPreconditioner P(sc, prop, alpha, n_time);
  return dense_matrix([&](const BlockVector& v, BlockVector& out) { out = P.apply(S.apply(v)); }, n_time, prop->size());
}

/// K is a perturbation of the identity, so singular values below `floor` are roundoff.
inline int numerical_rank(const Eigen::MatrixXcd& K, double rel = 1e-10, double floor = 1e-13) {
  if (K.size() == 0) return 0;
  const Eigen::VectorXd sv = K.jacobiSvd().singularValues();
  if (sv.size() == 0) return 0;
  const double cut = std::max(rel * sv(0), floor);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) r += sv(i) > cut;
  return r;
}

/// Spectrum of P^{-1} S from its dense assembly. I - P^{-1} S vanishes outside
/// its last `order` block columns, so the nonzero part of the spectrum is that
/// of the trailing (order*N_x)-square block; the structure is measured, not assumed.
inline SpectrumReport preconditioned_spectrum(int order, std::shared_ptr<const Propagator> prop, std::size_t n_time,
                                              double alpha, double slack = 1e-12) {
  SpectrumReport r;
  r.order = order;
  r.alpha = alpha;
  r.nx = prop->size();
  r.n_time = n_time;
  const auto nx = static_cast<Eigen::Index>(r.nx);
  const auto N = static_cast<Eigen::Index>(n_time) * nx;
  const Eigen::Index tail = std::min<Eigen::Index>(order * nx, N);
  const Eigen::Index head = N - tail;

  Eigen::MatrixXcd K = -dense_preconditioned(order, prop, n_time, alpha);
  K.diagonal().array() += 1.0;
  r.structure_residual = head > 0 ? K.leftCols(head).cwiseAbs().maxCoeff() : 0.0;

  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(K.bottomRightCorner(tail, tail), false);
  if (es.info() != Eigen::Success) throw breakdown_error("preconditioned_spectrum: eigensolver failed");
  r.eigenvalues.assign(static_cast<std::size_t>(head), cplx(1.0));
  for (Eigen::Index i = 0; i < tail; ++i) {
    const cplx mu = es.eigenvalues()(i);
    r.eigenvalues.push_back(1.0 - mu);
    r.spectral_radius = std::max(r.spectral_radius, std::abs(mu));
  }
  r.max_distance_from_one = r.spectral_radius;
  r.rank = numerical_rank(K.rightCols(tail));

  if (order == 2 && n_time >= 2) {
    r.min_block_rcond = INFINITY;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n_time); ++i)
      for (Eigen::Index j : {N - 2 * nx, N - nx}) {
        const Eigen::VectorXd sv = K.block(i * nx, j, nx, nx).jacobiSvd().singularValues();
        r.min_block_rcond = std::min(r.min_block_rcond, sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0);
      }
  }

  if (order <= 2) {
    const double T = static_cast<double>(n_time) * prop->dt();
    const double lmax = prop->op().lambda_max();
    r.radius_bound = theoretical_contraction(order, alpha, lmax, T);
    r.cluster_bound = cluster_radius(order, alpha);
    const double tol = slack * std::max(1.0, r.radius_bound);
    r.bound_satisfied = r.spectral_radius <= r.radius_bound * (1.0 + slack) + tol &&
                        r.max_distance_from_one <= r.cluster_bound * (1.0 + slack) + tol;
  }
  return r;
}

struct AlphaSearchConfig {
  double a = 1.0, c = 0.0, T = 1.0;
  int nx = 32;
  double length = 1.0;
  double initial = 0.1;
  double xtol = 1e-4;
  int max_evals = 200;
};

struct AlphaSearchResult {
  double alpha = 0.0;
  std::vector<std::pair<double, double>> trace;
};

/// max over omega in {0} u {j pi / L, j = 1..nx} u {pi / h} of alpha q / (1 - alpha q),
/// q = exp(-(a omega^2 + c) T).
inline double alpha_objective(const AlphaSearchConfig& cfg, double alpha) {
  const double h = cfg.length / (cfg.nx + 1);
  auto psi = [&](double w) {
    const double q = alpha * std::exp(-(cfg.a * w * w + cfg.c) * cfg.T);
    if (q >= 1.0) throw config_error("alpha objective undefined (alpha e^{...} >= 1)");
    return q / (1.0 - q);
  };
  double m = psi(0.0);
  for (int j = 1; j <= cfg.nx; ++j) m = std::max(m, psi(j * pi / cfg.length));
  return std::max(m, psi(pi / h));
}

/// Halving search from cfg.initial: alpha <- alpha/2 while the step stays
/// >= xtol and the objective does not increase.
inline AlphaSearchResult alpha_opt_search(const AlphaSearchConfig& cfg) {
  if (!(cfg.initial > 0.0 && cfg.initial < 1.0)) throw config_error("alpha search: initial guess must lie in (0, 1)");
  AlphaSearchResult r;
  double x = cfg.initial;
  double fx = alpha_objective(cfg, x);
  r.trace.emplace_back(x, fx);
  while (static_cast<int>(r.trace.size()) < cfg.max_evals && x / 2.0 >= cfg.xtol) {
    const double y = x / 2.0;
    const double fy = alpha_objective(cfg, y);
    r.trace.emplace_back(y, fy);
    if (fy > fx) break;
    x = y;
    fx = fy;
  }
  r.alpha = x;
  return r;
}

struct SupportLemmaReport {
  double g_min = INFINITY;
  double g_threshold = 0.0;
  double alpha_pm_max = 0.0;
  double alpha_pm_threshold = 0.0;
  /// Dense small-instance checks (NaN when no propagator is given).
  double h_min_eigenvalue = NAN;
  double h_minus_identity_norm = NAN;
  double kappa_vhat = NAN;
  double vhat_residual = NAN;
};

/// g_alpha(y) = 4(1 - alpha y^n)(1 - y^2) - alpha^2 (y^2 - y^{2n})
inline double g_alpha(double alpha, double y, std::size_t n) {
  const double m = static_cast<double>(n);
  return 4.0 * (1.0 - alpha * std::pow(y, m)) * (1.0 - y * y) - alpha * alpha * (y * y - std::pow(y, 2.0 * m));
}

/// alpha_pm(y) = (alpha y / (1 - alpha y) +- sqrt(tau)) / 2,
/// tau = alpha^2 / (1 - alpha y)^2 (sum_{j=1}^{n-1} y^{2j} + y^2).
inline std::pair<double, double> alpha_pm(double alpha, double y, std::size_t n) {
  double s = y * y;
  for (std::size_t j = 1; j < n; ++j) s += std::pow(y, 2.0 * static_cast<double>(j));
  const double tau = alpha * alpha / ((1.0 - alpha * y) * (1.0 - alpha * y)) * s;
  const double base = alpha * y / (1.0 - alpha * y);
  return {0.5 * (base + std::sqrt(tau)), 0.5 * (base - std::sqrt(tau))};
}

inline SupportLemmaReport support_lemma_checks(double alpha, std::size_t n_time, const std::vector<double>& y_grid,
                                               std::shared_ptr<const Propagator> prop = nullptr) {
  SupportLemmaReport r;
  const double sq = std::sqrt(static_cast<double>(n_time));
  r.g_threshold = 2.0 / (1.0 + sq);
  r.alpha_pm_threshold = 2.0 / (3.0 + sq);
  for (double y : y_grid) {
    if (!(y > 0.0 && y < 1.0)) throw config_error("support lemmas: y must lie in (0, 1)");
    r.g_min = std::min(r.g_min, g_alpha(alpha, y, n_time));
    const auto [p, m] = alpha_pm(alpha, y, n_time);
    r.alpha_pm_max = std::max({r.alpha_pm_max, std::abs(p), std::abs(m)});
  }
  if (!prop) return r;

  const Eigen::MatrixXcd PS = dense_preconditioned(1, prop, n_time, alpha);
  const Eigen::MatrixXcd H = 0.5 * (PS + PS.adjoint());
  r.h_min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(H, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  Eigen::MatrixXcd Hm = H;
  Hm.diagonal().array() -= 1.0;
  r.h_minus_identity_norm =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(Hm, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();

  // V_hat = (I (x) V_h) V_bar, V_bar = I with last block column (E^{-(n-1)}, ..., E^{-1}, I).
  const auto nx = static_cast<Eigen::Index>(prop->size());
  const auto n = static_cast<Eigen::Index>(n_time);
  Eigen::MatrixXcd Vh(nx, nx);
  {
    Vec e(prop->size());
    for (Eigen::Index j = 0; j < nx; ++j) {
      std::fill(e.begin(), e.end(), cplx{});
      e[static_cast<std::size_t>(j)] = 1.0;
      prop->op().inverse(e);
      Vh.col(j) = Eigen::Map<const Eigen::VectorXcd>(e.data(), nx);
    }
  }
  const Vec& E = prop->multipliers();
  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(n * nx, n * nx);
  Eigen::MatrixXcd Dbar = Eigen::MatrixXcd::Identity(n * nx, n * nx);
  for (Eigen::Index t = 0; t < n; ++t) {
    V.block(t * nx, t * nx, nx, nx) = Vh;
    for (Eigen::Index j = 0; j < nx; ++j) {
      const cplx ej = E[static_cast<std::size_t>(j)];
      V.block(t * nx, (n - 1) * nx, nx, nx).col(j) = Vh.col(j) * std::pow(ej, -static_cast<double>(n - 1 - t));
      if (t == n - 1) Dbar(t * nx + j, t * nx + j) = 1.0 / (1.0 - alpha * std::pow(ej, static_cast<double>(n)));
    }
  }
  const Eigen::VectorXd sv = V.jacobiSvd().singularValues();
  r.kappa_vhat = sv(0) / sv(sv.size() - 1);
  r.vhat_residual = (PS * V - V * Dbar).cwiseAbs().maxCoeff() / std::max(1.0, V.cwiseAbs().maxCoeff());
  return r;
}

/// (4 alpha (1 - alpha))^{k/2} for s = 1; (4 (alpha + alpha^2)(1 - alpha - alpha^2))^{k/2} for s = 2.
inline double elman_bound(int order, double alpha, int k) {
  const double q = order == 1 ? 4.0 * alpha * (1.0 - alpha)
                              : 4.0 * (alpha + alpha * alpha) * (1.0 - alpha - alpha * alpha);
  return std::pow(q, 0.5 * k);
}

}  // namespace expparadiag
