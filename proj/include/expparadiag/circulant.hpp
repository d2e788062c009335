#pragma once

#include <Eigen/Dense>

#include "core.hpp"
#include "fft.hpp"

namespace expparadiag {

inline constexpr double min_alpha = 1e-12;

/// n x n matrix with ones on the subdiagonal at offset `shift` and alpha in the
/// wrapped corner positions (i, n-shift+i), i < shift. shift 1 is C_0.
struct AlphaCirculant {
  std::size_t n = 0;
  int shift = 1;
  double alpha = 0.0;

  /// (alpha^{1/n} w^k)^shift, w = exp(2 pi i / n), k = 0..n-1.
  Vec eigenvalues() const {
    if (n < 2) throw config_error("circulant: n must be >= 2");
    Vec e(n);
    const double r = std::pow(alpha, 1.0 / static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
      const cplx base = std::polar(r, 2.0 * pi * static_cast<double>(k) / static_cast<double>(n));
      e[k] = ipow(base, shift);
    }
    return e;
  }

  Eigen::MatrixXd assemble_dense() const {
    if (shift < 1 || static_cast<std::size_t>(shift) >= n) throw config_error("circulant: shift must lie in [1, n)");
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const auto s = static_cast<Eigen::Index>(shift);
    const auto N = static_cast<Eigen::Index>(n);
    for (Eigen::Index i = s; i < N; ++i) C(i, i - s) = 1.0;
    for (Eigen::Index i = 0; i < s; ++i) C(i, N - s + i) = alpha;
    return C;
  }
};

/// Step (a) / step (c) similarity: forward = (F Gamma) per spatial index,
/// inverse = Gamma^{-1} F*, with F the unitary DFT with entries w^{lm}/sqrt(n).
class TimeTransform {
 public:
  TimeTransform() = default;
  TimeTransform(std::size_t n, double alpha, std::size_t nx) : n_(n), nx_(nx), alpha_(alpha) {
    if (n < 1) throw config_error("time transform: n must be >= 1");
    if (!(alpha >= min_alpha && alpha <= 1.0)) throw config_error("time transform: alpha must lie in [1e-12, 1]");
    gamma_.resize(n);
    for (std::size_t t = 0; t < n; ++t)
      gamma_[t] = std::pow(alpha, static_cast<double>(t) / static_cast<double>(n));
    const int ni = static_cast<int>(n);
    const int nxi = static_cast<int>(nx);
    fwd_ = fft::make_dft({ni}, FFTW_BACKWARD, nxi, nxi, 1);
    bwd_ = fft::make_dft({ni}, FFTW_FORWARD, nxi, nxi, 1);
    scale_ = 1.0 / std::sqrt(static_cast<double>(n));
  }

  std::size_t n() const { return n_; }
  std::size_t nx() const { return nx_; }
  double alpha() const { return alpha_; }
  const std::vector<double>& gamma() const { return gamma_; }
  /// Conditioning of Gamma.
  double kappa() const { return 1.0 / gamma_.back(); }

  void forward(BlockVector& v) const {
    check(v);
    for (std::size_t t = 0; t < n_; ++t) {
      const double g = gamma_[t] * scale_;
      for (auto& z : v.block(t)) z *= g;
    }
    fft::execute(fwd_, v.data.data());
  }

  void inverse(BlockVector& v) const {
    check(v);
    fft::execute(bwd_, v.data.data());
    for (std::size_t t = 0; t < n_; ++t) {
      const double g = scale_ / gamma_[t];
      for (auto& z : v.block(t)) z *= g;
    }
  }

 private:
  void check(const BlockVector& v) const {
    if (v.nt != n_ || v.nx != nx_) throw config_error("time transform: size mismatch");
  }

  std::size_t n_ = 0;
  std::size_t nx_ = 0;
  double alpha_ = 1.0;
  std::vector<double> gamma_;
  double scale_ = 1.0;
  fft::Plan fwd_, bwd_;
};

}  // namespace expparadiag
