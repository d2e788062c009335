#pragma once

// Dense reference implementations, written independently of the library.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;
using VecC = Eigen::VectorXcd;

/// (1/h^2) tridiag(1,-2,1), homogeneous Dirichlet.
inline MatR dirichlet_laplacian(int n, double h) {
  MatR L = MatR::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    L(i, i) = -2.0;
    if (i) L(i, i - 1) = 1.0;
    if (i + 1 < n) L(i, i + 1) = 1.0;
  }
  return L / (h * h);
}

inline MatR periodic_laplacian(int n, double h) {
  MatR L = MatR::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    L(i, i) -= 2.0;
    L(i, (i + 1) % n) += 1.0;
    L(i, (i + n - 1) % n) += 1.0;
  }
  return L / (h * h);
}

/// Neumann via reflection u_{-1} = u_1 on n nodes including both ends.
inline MatR neumann_laplacian(int n, double h) {
  MatR L = dirichlet_laplacian(n, h);
  L(0, 1) *= 2.0;
  L(n - 1, n - 2) *= 2.0;
  return L;
}

/// Central first derivative, periodic.
inline MatR periodic_gradient(int n, double h) {
  MatR D = MatR::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    D(i, (i + 1) % n) += 0.5 / h;
    D(i, (i + n - 1) % n) -= 0.5 / h;
  }
  return D;
}

template <class M>
M kron(const M& a, const M& b) {
  M k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

/// 2D Kronecker sum with x as the fast index.
inline MatR kron_sum(const MatR& lx, const MatR& ly) {
  return kron<MatR>(MatR::Identity(ly.rows(), ly.cols()), lx) + kron<MatR>(ly, MatR::Identity(lx.rows(), lx.cols()));
}

/// Scaling and squaring with a degree-20 Taylor kernel.
inline MatC expm(const MatC& A) {
  const double nrm = A.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  if (nrm > 0.25) s = static_cast<int>(std::ceil(std::log2(nrm / 0.25)));
  const MatC B = A / std::pow(2.0, s);
  MatC term = MatC::Identity(A.rows(), A.cols());
  MatC E = term;
  for (int k = 1; k <= 20; ++k) {
    term = term * B / static_cast<double>(k);
    E += term;
  }
  for (int i = 0; i < s; ++i) E = E * E;
  return E;
}

/// Dense alpha-circulant with shift s.
inline MatR circulant(int n, int s, double alpha) {
  MatR C = MatR::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int j = i - s;
    if (j >= 0) C(i, j) = 1.0;
    else C(i, j + n) = alpha;
  }
  return C;
}

inline const std::vector<std::vector<double>>& bdf_weights() {
  static const std::vector<std::vector<double>> w = {
      {1.0},
      {4.0 / 3, -1.0 / 3},
      {18.0 / 11, -9.0 / 11, 2.0 / 11},
      {48.0 / 25, -36.0 / 25, 16.0 / 25, -3.0 / 25},
      {300.0 / 137, -300.0 / 137, 200.0 / 137, -75.0 / 137, 12.0 / 137},
      {360.0 / 147, -450.0 / 147, 400.0 / 147, -225.0 / 147, 72.0 / 147, -10.0 / 147}};
  return w;
}

/// I - sum_p w_p C_{p-1}^alpha (x) A^p
inline MatC all_at_once(int s, const MatC& A, int n, double alpha) {
  const auto& w = bdf_weights()[static_cast<std::size_t>(s - 1)];
  const Eigen::Index nx = A.rows();
  MatC S = MatC::Identity(n * nx, n * nx);
  MatC Ap = MatC::Identity(nx, nx);
  for (int p = 1; p <= s; ++p) {
    Ap = Ap * A;
    S -= w[static_cast<std::size_t>(p - 1)] * kron<MatC>(circulant(n, p, alpha).cast<cplx>(), Ap);
  }
  return S;
}

inline std::vector<cplx> random_vector(std::size_t n, unsigned seed, bool complex_valued = true) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<cplx> v(n);
  for (auto& z : v) z = {U(gen), complex_valued ? U(gen) : 0.0};
  return v;
}

inline VecC to_eigen(const std::vector<cplx>& v) {
  return Eigen::Map<const VecC>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline double rel_err(const std::vector<cplx>& a, const VecC& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b(static_cast<Eigen::Index>(i)));
    den += std::norm(b(static_cast<Eigen::Index>(i)));
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

inline std::vector<double> sorted_real(const Eigen::VectorXcd& e) {
  std::vector<double> r;
  for (Eigen::Index i = 0; i < e.size(); ++i) r.push_back(e(i).real());
  std::sort(r.begin(), r.end());
  return r;
}

}  // namespace oracle
