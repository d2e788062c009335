#include <gtest/gtest.h>

#include <expparadiag/circulant.hpp>

#include "oracle.hpp"

using namespace expparadiag;

namespace {

/// Unitary DFT with entries w^{lm}/sqrt(n), w = exp(2 pi i/n).
oracle::MatC dft(int n) {
  oracle::MatC F(n, n);
  for (int l = 0; l < n; ++l)
    for (int m = 0; m < n; ++m) F(l, m) = std::polar(1.0 / std::sqrt(n), 2.0 * pi * l * m / n);
  return F;
}

oracle::MatC gamma(int n, double alpha) {
  oracle::MatC G = oracle::MatC::Zero(n, n);
  for (int t = 0; t < n; ++t) G(t, t) = std::pow(alpha, static_cast<double>(t) / n);
  return G;
}

BlockVector from(const std::vector<cplx>& v, std::size_t nt, std::size_t nx) {
  BlockVector b(nt, nx);
  b.data = v;
  return b;
}

}  // namespace

TEST(Circulant, RootsOfUnity) {
  const auto e = AlphaCirculant{4, 1, 1.0}.eigenvalues();
  const cplx ref[] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(std::abs(e[static_cast<std::size_t>(k)] - ref[k]), 0.0, 1e-15);
}

TEST(Circulant, MagnitudesAndDenseEigenvalues) {
  const AlphaCirculant C{4, 1, 0.5};
  for (auto z : C.eigenvalues()) EXPECT_NEAR(std::abs(z), 0.840896415, 1e-9);
  const oracle::MatC D = oracle::circulant(4, 1, 0.5).cast<oracle::cplx>();
  const Eigen::VectorXcd ev = D.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) EXPECT_NEAR(std::abs(ev(i)), 0.840896415, 1e-9);
}

TEST(Circulant, ShiftTwoEigenvaluesAreSquares) {
  const auto e1 = AlphaCirculant{5, 1, 0.3}.eigenvalues();
  const auto e2 = AlphaCirculant{5, 2, 0.3}.eigenvalues();
  const Eigen::VectorXcd dense = oracle::circulant(5, 2, 0.3).cast<oracle::cplx>().eigenvalues();
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_NEAR(std::abs(e2[k] - e1[k] * e1[k]), 0.0, 1e-14);
    double best = 1.0;
    for (Eigen::Index i = 0; i < dense.size(); ++i) best = std::min(best, std::abs(dense(i) - e2[k]));
    EXPECT_LT(best, 1e-10);
  }
}

TEST(Circulant, ShiftPowerLaw) {
  for (std::size_t n : {7u, 16u, 33u})
    for (int s = 2; s <= 6; ++s) {
      const auto e1 = AlphaCirculant{n, 1, 0.1}.eigenvalues();
      const auto es = AlphaCirculant{n, s, 0.1}.eigenvalues();
      for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(std::abs(es[k] - ipow(e1[k], s)), 0.0, 1e-12);
    }
}

TEST(Circulant, DenseStructure) {
  const double a = 0.37;
  const auto C3 = AlphaCirculant{3, 1, a}.assemble_dense();
  Eigen::Matrix3d ref;
  ref << 0, 0, a, 1, 0, 0, 0, 1, 0;
  EXPECT_EQ((C3 - ref).norm(), 0.0);
  const auto C4 = AlphaCirculant{4, 2, a}.assemble_dense();
  EXPECT_EQ(C4(2, 0), 1.0);
  EXPECT_EQ(C4(3, 1), 1.0);
  EXPECT_EQ(C4(0, 2), a);
  EXPECT_EQ(C4(1, 3), a);
  EXPECT_EQ(C4.cwiseAbs().sum(), 2.0 + 2.0 * a);
  const auto Z = AlphaCirculant{6, 3, 0.0}.assemble_dense();
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) EXPECT_EQ(Z(i, j), i - j == 3 ? 1.0 : 0.0);
  EXPECT_THROW((AlphaCirculant{4, 4, a}.assemble_dense()), config_error);
  for (int s = 1; s <= 6; ++s) EXPECT_EQ((AlphaCirculant{12, s, a}.assemble_dense() - oracle::circulant(12, s, a)).norm(), 0.0);
}

TEST(Circulant, SimilarityInvariant) {
  for (double alpha : {1.0, 0.1, 0.0001953125})
    for (int n : {7, 16, 32})
      for (int s = 1; s <= 6; ++s) {
        const AlphaCirculant C{static_cast<std::size_t>(n), s, alpha};
        const auto e = C.eigenvalues();
        oracle::MatC D = oracle::MatC::Zero(n, n);
        for (int k = 0; k < n; ++k) D(k, k) = e[static_cast<std::size_t>(k)];
        const oracle::MatC P = gamma(n, alpha).inverse() * dft(n).adjoint();
        const oracle::MatC R = P * D * P.inverse();
        const double kappa = std::pow(alpha, -(n - 1.0) / n);
        EXPECT_LT((R - C.assemble_dense().cast<oracle::cplx>()).cwiseAbs().maxCoeff(), 1e-12 * kappa * n)
            << "alpha=" << alpha << " n=" << n << " s=" << s;
      }
}

TEST(Circulant, ForwardOfImpulseIsFlat) {
  const std::size_t n = 8, nx = 3;
  const TimeTransform tt(n, 1.0, nx);
  BlockVector v(n, nx);
  v.block(0)[0] = 1.0;
  v.block(0)[1] = 2.0;
  v.block(0)[2] = -0.5;
  tt.forward(v);
  for (std::size_t t = 0; t < n; ++t) {
    EXPECT_NEAR(std::abs(v.block(t)[0] - 1.0 / std::sqrt(8.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(v.block(t)[1] - 2.0 / std::sqrt(8.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(v.block(t)[2] + 0.5 / std::sqrt(8.0)), 0.0, 1e-15);
  }
}

TEST(Circulant, ForwardMatchesDenseKronecker) {
  {
    const double alpha = 0.0001953125;
    const TimeTransform tt(4, alpha, 1);
    BlockVector v(4, 1);
    v.data = {1.0, 0.0, 0.0, 0.0};
    tt.forward(v);
    const oracle::VecC ref = dft(4) * gamma(4, alpha) * oracle::to_eigen(Vec{1.0, 0.0, 0.0, 0.0});
    EXPECT_LT(oracle::rel_err(v.data, ref), 1e-14);
  }
  for (double alpha : {1.0, 0.1, 0.0001953125})
    for (int n : {4, 9, 32}) {
      const int nx = 2;
      const auto x = oracle::random_vector(static_cast<std::size_t>(n * nx), static_cast<unsigned>(n));
      const oracle::MatC Fk = oracle::kron<oracle::MatC>(dft(n) * gamma(n, alpha), oracle::MatC::Identity(nx, nx));
      const oracle::MatC Ik = oracle::kron<oracle::MatC>(gamma(n, alpha).inverse() * dft(n).adjoint(), oracle::MatC::Identity(nx, nx));
      const TimeTransform tt(static_cast<std::size_t>(n), alpha, nx);
      auto v = from(x, static_cast<std::size_t>(n), nx);
      tt.forward(v);
      EXPECT_LT(oracle::rel_err(v.data, Fk * oracle::to_eigen(x)), 1e-10);
      auto w = from(x, static_cast<std::size_t>(n), nx);
      tt.inverse(w);
      EXPECT_LT(oracle::rel_err(w.data, Ik * oracle::to_eigen(x)), 1e-10);
    }
}

TEST(Circulant, RoundTripAndUnitarity) {
  for (double alpha : {1.0, 0.1, 1e-4})
    for (std::size_t n = 2; n <= 64; n += 7) {
      const std::size_t nx = 3;
      const auto x = oracle::random_vector(n * nx, static_cast<unsigned>(n));
      const TimeTransform tt(n, alpha, nx);
      auto v = from(x, n, nx);
      tt.forward(v);
      if (alpha == 1.0) { EXPECT_NEAR(norm2(v.data), norm2(x), 1e-12 * norm2(x)); }
      tt.inverse(v);
      EXPECT_LT(oracle::rel_err(v.data, oracle::to_eigen(x)), 1e-9);
    }
  const TimeTransform tt(5, 1.0, 2);
  BlockVector z(5, 2);
  tt.inverse(z);
  for (auto c : z.data) EXPECT_EQ(c, cplx(0.0));
  BlockVector bad(4, 2);
  EXPECT_THROW(tt.forward(bad), config_error);
  EXPECT_THROW(TimeTransform(5, 1e-13, 2), config_error);
  EXPECT_THROW(TimeTransform(5, 1.5, 2), config_error);
}

TEST(Circulant, InverseAtUnitAlphaIsPlainInverseDft) {
  const std::size_t n = 6;
  const auto x = oracle::random_vector(n, 5u);
  const TimeTransform tt(n, 1.0, 1);
  auto v = from(x, n, 1);
  tt.inverse(v);
  EXPECT_LT(oracle::rel_err(v.data, dft(static_cast<int>(n)).adjoint() * oracle::to_eigen(x)), 1e-14);
}
