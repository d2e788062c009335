#include <gtest/gtest.h>

#include <expparadiag/analysis.hpp>

#include <sstream>

#include "oracle.hpp"

using namespace expparadiag;

namespace {

std::shared_ptr<const Propagator> heat(double lo, double hi, int nx, cplx a, cplx c, double dt,
                                       BoundaryCondition bc = BoundaryCondition::DirichletZero, double b = 0.0) {
  const double h = bc == BoundaryCondition::Periodic ? (hi - lo) / nx : (hi - lo) / (nx + 1);
  Coefficients k;
  k.a = a;
  k.b = b;
  k.c = c;
  return std::make_shared<const Propagator>(build_operator(Grid::line(lo, hi, h, bc), bc, k), dt);
}

std::shared_ptr<const Propagator> scalar(double d, double dt) {
  Coefficients k;
  k.a = 0.0;
  k.c = -d;
  return std::make_shared<const Propagator>(
      build_operator(Grid::line(0.0, 1.0, 1.0, BoundaryCondition::Periodic), BoundaryCondition::Periodic, k), dt);
}

std::vector<cplx> sorted(std::vector<cplx> v) {
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  return v;
}

constexpr double table_alpha = 0.0001953125;

}  // namespace

TEST(Analysis, TheoreticalContraction) {
  EXPECT_NEAR(theoretical_contraction(1, 0.1, -1.0, 1.0), 0.0381929855, 1e-10);
  EXPECT_EQ(theoretical_contraction(1, 0.0, -1.0, 1.0), 0.0);
  EXPECT_LT(theoretical_contraction(1, 0.1, -1e3, 1.0), 1e-300);
  EXPECT_DOUBLE_EQ(theoretical_contraction(2, 0.1, -5.0, 1.0), 0.1 / 0.9);
  EXPECT_THROW(theoretical_contraction(1, 0.5, 1.0, 1.0), config_error);
  EXPECT_THROW(theoretical_contraction(3, 0.1, -1.0, 1.0), config_error);
  EXPECT_DOUBLE_EQ(cluster_radius(2, 0.1), 0.11 / 0.89);
}

TEST(Analysis, ZeroAlphaSpectrumIsOne) {
  for (int s : {1, 2}) {
    const auto r = preconditioned_spectrum(s, heat(-1, 1, 7, 0.5, 0.0, 0.05), 6, 0.0);
    ASSERT_EQ(r.eigenvalues.size(), 42u);
    for (auto z : r.eigenvalues) EXPECT_NEAR(std::abs(z - 1.0), 0.0, 1e-13);
    EXPECT_EQ(r.rank, 0);
    EXPECT_TRUE(r.bound_satisfied);
  }
}

TEST(Analysis, StructuredSpectrumMatchesFullEigensolve) {
  for (int s : {1, 2, 3})
    for (double alpha : {0.01, 0.2}) {
      const auto P = heat(-1, 1, 7, 0.2, 0.1, 0.05);
      const std::size_t n = 5;
      const auto r = preconditioned_spectrum(s, P, n, alpha);
      EXPECT_LT(r.structure_residual, 1e-13);
      const oracle::MatC A = oracle::expm(0.05 * (0.2 * oracle::dirichlet_laplacian(7, 0.25) - 0.1 * oracle::MatR::Identity(7, 7)).cast<oracle::cplx>());
      const oracle::MatC S = oracle::all_at_once(s, A, static_cast<int>(n), 0.0);
      const oracle::MatC Pa = oracle::all_at_once(s, A, static_cast<int>(n), alpha);
      const oracle::MatC K = oracle::MatC::Identity(S.rows(), S.cols()) - Pa.lu().solve(S);
      ASSERT_EQ(r.eigenvalues.size(), static_cast<std::size_t>(K.rows()));
      cplx tr1 = 0.0, tr2 = 0.0;
      for (auto z : r.eigenvalues) {
        const cplx mu = 1.0 - z;
        tr1 += mu;
        tr2 += mu * mu;
        if (std::abs(mu) < 1e-12) continue;
        const oracle::MatC shifted = K - mu * oracle::MatC::Identity(K.rows(), K.cols());
        const Eigen::VectorXd sv = Eigen::JacobiSVD<oracle::MatC>(shifted).singularValues();
        EXPECT_LT(sv(sv.size() - 1), 1e-10 * std::max(1.0, std::abs(mu))) << s << " " << alpha << " " << mu;
      }
      EXPECT_NEAR(std::abs(tr1 - K.trace()), 0.0, 1e-12) << s << " " << alpha;
      EXPECT_NEAR(std::abs(tr2 - (K * K).trace()), 0.0, 1e-12) << s << " " << alpha;
    }
}

TEST(Analysis, FirstOrderSpectrumClosedForm) {
  const int nx = 9;
  const std::size_t n = 8;
  const double dt = 0.02, alpha = 0.3;
  const auto r = preconditioned_spectrum(1, heat(-1, 1, nx, 0.1, 0.0, dt), n, alpha);
  const Eigen::VectorXd lam = Eigen::SelfAdjointEigenSolver<oracle::MatR>(0.1 * oracle::dirichlet_laplacian(nx, 0.2)).eigenvalues();
  std::vector<cplx> ref(static_cast<std::size_t>(nx) * (n - 1), 1.0);
  for (int j = 0; j < nx; ++j) ref.push_back(1.0 / (1.0 - alpha * std::exp(lam(j) * dt * static_cast<double>(n))));
  const auto got = sorted(r.eigenvalues);
  ref = sorted(ref);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(std::abs(got[i] - ref[i]), 0.0, 1e-12);
  EXPECT_EQ(r.rank, nx);
  EXPECT_NEAR(r.spectral_radius, r.radius_bound, 1e-12);
}

TEST(Analysis, FirstOrderClusteringFig4) {
  for (double c : {0.1}) {
    for (cplx a : {cplx(0.1), cplx(1e-5)}) {
      const auto r = preconditioned_spectrum(1, heat(-1, 1, 63, a, c, 0.01), 30, table_alpha);
      ASSERT_EQ(r.eigenvalues.size(), 1890u);
      EXPECT_TRUE(r.bound_satisfied) << r.spectral_radius << " vs " << r.radius_bound;
      EXPECT_LE(r.max_distance_from_one, table_alpha / (1.0 - table_alpha));
      EXPECT_LT(r.structure_residual, 1e-12);
    }
  }
}

TEST(Analysis, SecondOrderBounds) {
  for (cplx a : {cplx(0.1), cplx(1e-5)}) {
    const auto r = preconditioned_spectrum(2, heat(-1, 1, 63, a, 0.1, 0.01), 30, table_alpha);
    EXPECT_TRUE(r.bound_satisfied);
    EXPECT_LE(r.spectral_radius, table_alpha / (1.0 - table_alpha));
    EXPECT_LE(r.max_distance_from_one, cluster_radius(2, table_alpha));
  }
}

TEST(Analysis, MzClosedForms) {
  const double alpha = 0.1;
  const std::size_t n = 6;
  const auto r = preconditioned_spectrum(2, scalar(std::log(0.5), 1.0), n, alpha);
  const auto [m1, m2] = mz_closed_form(alpha, std::log(0.5), n);
  std::vector<cplx> nonzero;
  for (auto z : r.eigenvalues)
    if (std::abs(1.0 - z) > 1e-14) nonzero.push_back(1.0 - z);
  ASSERT_EQ(nonzero.size(), 2u);
  const bool direct = std::abs(nonzero[0] - m1) < std::abs(nonzero[0] - m2);
  EXPECT_NEAR(std::abs(nonzero[direct ? 0 : 1] - m1), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(nonzero[direct ? 1 : 0] - m2), 0.0, 1e-10);
  EXPECT_NEAR(m1.real(), -0.1 * std::pow(0.5, 6) / (1.0 - 0.1 * std::pow(0.5, 6)), 1e-15);
}

TEST(Analysis, ExactTerminationRanks) {
  const auto P = heat(0, 1, 4, 0.1, 0.0, 0.05);
  const auto r1 = preconditioned_spectrum(1, P, 6, 0.1);
  const auto r2 = preconditioned_spectrum(2, P, 6, 0.1);
  EXPECT_EQ(r1.rank, 4);
  EXPECT_EQ(r2.rank, 8);
  EXPECT_GT(r2.min_block_rcond, 1e-8);
  EXPECT_TRUE(std::isnan(r1.min_block_rcond));
}

TEST(Analysis, AdvectionClustering) {
  const auto P = heat(-1, 1, 65, 0.1, 0.0, 0.01, BoundaryCondition::Periodic, 2.0);
  const auto r = preconditioned_spectrum(1, P, 30, table_alpha);
  EXPECT_TRUE(r.bound_satisfied);
  EXPECT_LE(r.max_distance_from_one, table_alpha / (1.0 - table_alpha) * (1.0 + 1e-12));
  bool complex_found = false;
  for (auto z : r.eigenvalues) complex_found |= std::abs(z.imag()) > 1e-12;
  EXPECT_TRUE(complex_found);
}

TEST(Analysis, HigherOrderHasNoBound) {
  const auto r = preconditioned_spectrum(4, heat(-1, 1, 5, 0.1, 0.0, 0.05), 8, 0.01);
  EXPECT_TRUE(std::isnan(r.radius_bound));
  EXPECT_EQ(r.rank, 20);
  EXPECT_THROW(preconditioned_spectrum(1, heat(-1, 1, 100, 0.1, 0.0, 0.05), 41, 0.01), config_error);
}

TEST(Analysis, AlphaSearchTableOne) {
  const std::pair<double, double> ac[] = {{1.0, 0.0}, {1e-3, 0.0}, {1e-3, 0.1}, {1e-5, 2.0}};
  const std::pair<int, double> nt[] = {{32, 0.5}, {64, 2.0}, {128, 8.0}, {256, 20.0}};
  for (auto [a, c] : ac)
    for (auto [nx, T] : nt) {
      AlphaSearchConfig cfg;
      cfg.a = a;
      cfg.c = c;
      cfg.T = T;
      cfg.nx = nx;
      const auto r = alpha_opt_search(cfg);
      EXPECT_EQ(r.alpha, 0.1 * std::pow(2.0, -9));
      EXPECT_EQ(r.alpha, table_alpha);
      EXPECT_EQ(r.trace.front().first, 0.1);
      EXPECT_EQ(r.trace.size(), 10u);
    }
}

TEST(Analysis, AlphaObjectiveMonotone) {
  AlphaSearchConfig cfg;
  cfg.a = 1e-3;
  cfg.c = 0.1;
  cfg.T = 2.0;
  cfg.nx = 64;
  std::mt19937_64 gen(0);
  std::uniform_real_distribution<double> U(1e-6, 0.99);
  for (int i = 0; i < 200; ++i) {
    double x = U(gen), y = U(gen);
    if (x > y) std::swap(x, y);
    if (x < y) {
      EXPECT_LT(alpha_objective(cfg, x), alpha_objective(cfg, y));
    }
  }
  cfg.c = -1.0;
  cfg.T = 1.0;
  cfg.initial = 0.9;
  EXPECT_THROW(alpha_opt_search(cfg), config_error);
  cfg.initial = 1.0;
  EXPECT_THROW(alpha_opt_search(cfg), config_error);
}

TEST(Analysis, SupportLemmas) {
  std::vector<double> y;
  for (int i = 1; i <= 1000; ++i) y.push_back(i / 1001.0);
  const auto r0 = support_lemma_checks(0.0, 5, y);
  EXPECT_NEAR(r0.g_min, 4.0 * (1.0 - y.back() * y.back()), 1e-15);
  EXPECT_GT(r0.g_min, 0.0);
  EXPECT_EQ(r0.alpha_pm_max, 0.0);

  const auto r1 = support_lemma_checks(0.4, 2, y);
  EXPECT_LT(0.4, r1.g_threshold);
  EXPECT_NEAR(r1.g_threshold, 0.828427125, 1e-9);
  EXPECT_GT(r1.g_min, 0.0);

  for (std::size_t n : {2u, 4u, 9u, 16u}) {
    const double a = 0.99 * 2.0 / (3.0 + std::sqrt(static_cast<double>(n)));
    const auto r = support_lemma_checks(a, n, y);
    EXPECT_GT(r.g_min, 0.0) << n;
    EXPECT_LT(r.alpha_pm_max, 1.0) << n;
  }

  const auto r2 = support_lemma_checks(0.3, 4, y, scalar(-1.0, 0.25));
  EXPECT_GT(r2.h_min_eigenvalue, 0.0);
  EXPECT_LT(r2.h_minus_identity_norm, 1.0);
  EXPECT_LT(r2.vhat_residual, 1e-12);
  EXPECT_GE(r2.kappa_vhat, 1.0);

  const auto r3 = support_lemma_checks(0.2, 4, y, heat(-1, 1, 5, 0.1, 0.0, 0.05));
  EXPECT_GT(r3.h_min_eigenvalue, 0.0);
  EXPECT_LT(r3.h_minus_identity_norm, 1.0);
  EXPECT_LT(r3.vhat_residual, 1e-10);
  EXPECT_TRUE(std::isfinite(r3.kappa_vhat));
  EXPECT_THROW(support_lemma_checks(0.1, 4, {1.0}), config_error);
}

TEST(Analysis, ElmanBoundValues) {
  EXPECT_DOUBLE_EQ(elman_bound(1, 0.1, 2), 0.36);
  EXPECT_DOUBLE_EQ(elman_bound(2, 0.1, 2), 4.0 * 0.11 * 0.89);
  EXPECT_DOUBLE_EQ(elman_bound(1, 0.3, 0), 1.0);
}

TEST(Analysis, CsvExport) {
  const auto r = preconditioned_spectrum(1, heat(-1, 1, 3, 0.1, 0.0, 0.1), 3, 0.1);
  std::ostringstream os;
  r.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line.rfind("# order=1,alpha=0.1", 0), 0u);
  std::getline(is, line);
  EXPECT_EQ(line, "re,im");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 9);
}
