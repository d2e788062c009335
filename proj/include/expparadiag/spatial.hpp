#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <string>

#include "core.hpp"
#include "fft.hpp"

namespace expparadiag {

enum class BoundaryCondition { DirichletZero, NeumannZero, Periodic, BiharmonicClamped };

/// Diagonalizing transform of a SpectralOperator.
enum class Basis { SineTransform, CosineTransform, FourierTransform, KroneckerProductOfAxes, DenseEigen };

inline const char* to_string(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::DirichletZero: return "dirichlet";
    case BoundaryCondition::NeumannZero: return "neumann";
    case BoundaryCondition::Periodic: return "periodic";
    case BoundaryCondition::BiharmonicClamped: return "biharmonic";
  }
  return "?";
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  int n = 0;
  double length() const { return hi - lo; }
};

/// Uniform grid. `n` counts unknowns per axis: interior points for Dirichlet,
/// one period for Periodic, and all nodes including both ends for Neumann.
struct Grid {
  int dim = 1;
  double h = 0.0;
  std::array<Axis, 2> axes{};

  std::size_t size() const {
    return dim == 1 ? static_cast<std::size_t>(axes[0].n)
                    : static_cast<std::size_t>(axes[0].n) * static_cast<std::size_t>(axes[1].n);
  }
  int nx() const { return axes[0].n; }
  int ny() const { return dim == 2 ? axes[1].n : 1; }
  /// sqrt(h^dim), turns Euclidean norms into grid L2 norms.
  double l2_weight() const { return std::pow(h, 0.5 * dim); }

  static int points_for(double length, double h, BoundaryCondition bc) {
    if (!(h > 0.0)) throw config_error("grid: mesh size must be positive");
    if (!(length > 0.0)) throw config_error("grid: empty domain");
    const double cells = length / h;
    const double m = std::round(cells);
    if (std::abs(cells - m) > 1e-9 * std::max(1.0, cells))
      throw config_error("grid: domain length is not a multiple of h");
    const int mi = static_cast<int>(m);
    switch (bc) {
      case BoundaryCondition::DirichletZero:
      case BoundaryCondition::BiharmonicClamped: return mi - 1;
      case BoundaryCondition::Periodic: return mi;
      case BoundaryCondition::NeumannZero: return mi + 1;
    }
    return 0;
  }

  static Grid line(double lo, double hi, double h, BoundaryCondition bc) {
    Grid g;
    g.dim = 1;
    g.h = h;
    g.axes[0] = {lo, hi, points_for(hi - lo, h, bc)};
    g.axes[1] = {0.0, 0.0, 1};
    return g;
  }

  static Grid square(double lo, double hi, double h, BoundaryCondition bc) {
    Grid g;
    g.dim = 2;
    g.h = h;
    const int n = points_for(hi - lo, h, bc);
    g.axes[0] = {lo, hi, n};
    g.axes[1] = {lo, hi, n};
    return g;
  }

  /// Node coordinates along one axis.
  std::vector<double> nodes(int axis, BoundaryCondition bc) const {
    const Axis& ax = axes[static_cast<std::size_t>(axis)];
    std::vector<double> x(static_cast<std::size_t>(ax.n));
    const double off = (bc == BoundaryCondition::DirichletZero || bc == BoundaryCondition::BiharmonicClamped) ? 1.0 : 0.0;
    for (int i = 0; i < ax.n; ++i) x[static_cast<std::size_t>(i)] = ax.lo + (i + off) * h;
    return x;
  }
};

/// L = a*Lap - b*d/dx - beta*Lap^2 - c.
struct Coefficients {
  cplx a{1.0, 0.0};
  double b = 0.0;
  cplx c{0.0, 0.0};
  double beta = 0.0;
};

namespace detail {

inline void check_grid(const Grid& g, BoundaryCondition bc) {
  if (g.dim != 1 && g.dim != 2) throw config_error("grid: dim must be 1 or 2");
  if (!(g.h > 0.0)) throw config_error("grid: mesh size must be positive");
  for (int d = 0; d < g.dim; ++d) {
    const Axis& ax = g.axes[static_cast<std::size_t>(d)];
    if (ax.n < 1) throw config_error("grid: no unknowns");
    if (ax.n != Grid::points_for(ax.length(), g.h, bc))
      throw config_error("grid: point count inconsistent with h and boundary condition");
  }
}

/// 1D discrete Laplacian eigenvalues in transform order.
inline std::vector<double> laplacian_eigs_1d(int n, double h, BoundaryCondition bc) {
  std::vector<double> e(static_cast<std::size_t>(n));
  const double s = 4.0 / (h * h);
  for (int k = 0; k < n; ++k) {
    double arg = 0.0;
    switch (bc) {
      case BoundaryCondition::DirichletZero:
      case BoundaryCondition::BiharmonicClamped: arg = (k + 1) * pi / (2.0 * (n + 1)); break;
      case BoundaryCondition::Periodic: arg = pi * k / n; break;
      case BoundaryCondition::NeumannZero: arg = pi * k / (2.0 * (n - 1)); break;
    }
    const double sn = std::sin(arg);
    e[static_cast<std::size_t>(k)] = -s * sn * sn;
  }
  return e;
}

/// 1D second-difference matrix (Dirichlet, Neumann ghost-point, or periodic).
inline Eigen::MatrixXd laplacian_dense_1d(int n, double h, BoundaryCondition bc) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  const double s = 1.0 / (h * h);
  for (int i = 0; i < n; ++i) {
    L(i, i) = -2.0 * s;
    if (i > 0) L(i, i - 1) = s;
    if (i + 1 < n) L(i, i + 1) = s;
  }
  if (bc == BoundaryCondition::Periodic) {
    if (n == 1) {
      L(0, 0) = 0.0;
    } else if (n == 2) {
      L(0, 1) = L(1, 0) = 2.0 * s;
    } else {
      L(0, n - 1) += s;
      L(n - 1, 0) += s;
    }
  } else if (bc == BoundaryCondition::NeumannZero) {
    L(0, 1) = 2.0 * s;
    L(n - 1, n - 2) = 2.0 * s;
  }
  return L;
}

}  // namespace detail

/// Library-side dense assembly of the stencil, used by the DenseEigen basis.
inline Eigen::MatrixXcd assemble_stencil(const Grid& g, BoundaryCondition bc, const Coefficients& k) {
  const BoundaryCondition lbc = bc == BoundaryCondition::BiharmonicClamped ? BoundaryCondition::DirichletZero : bc;
  const int nx = g.nx();
  const int ny = g.ny();
  const int N = nx * ny;
  Eigen::MatrixXd lap = detail::laplacian_dense_1d(nx, g.h, lbc);
  if (g.dim == 2) {
    const Eigen::MatrixXd ly = detail::laplacian_dense_1d(ny, g.h, lbc);
    Eigen::MatrixXd l2 = Eigen::MatrixXd::Zero(N, N);
    for (int iy = 0; iy < ny; ++iy)
      for (int jy = 0; jy < ny; ++jy)
        for (int ix = 0; ix < nx; ++ix)
          for (int jx = 0; jx < nx; ++jx) {
            double v = 0.0;
            if (iy == jy) v += lap(ix, jx);
            if (ix == jx) v += ly(iy, jy);
            l2(iy * nx + ix, jy * nx + jx) = v;
          }
    lap = l2;
  }
  Eigen::MatrixXcd M = k.a * lap.cast<cplx>();
  if (k.beta != 0.0) M -= k.beta * (lap * lap).cast<cplx>();
  if (k.b != 0.0) {
    const double s = k.b / (2.0 * g.h);
    for (int i = 0; i < nx; ++i) {
      M(i, (i + 1) % nx) -= s;
      M(i, (i - 1 + nx) % nx) += s;
    }
  }
  M -= k.c * Eigen::MatrixXcd::Identity(N, N);
  return M;
}

/// Discrete spatial operator L_h = V D V^{-1} with a fast diagonalizing
/// transform. Immutable after construction.
class SpectralOperator {
 public:
  const Grid& grid() const { return grid_; }
  BoundaryCondition bc() const { return bc_; }
  const Coefficients& coefficients() const { return coeffs_; }
  Basis basis() const { return basis_; }
  std::size_t size() const { return eig_.size(); }
  const Vec& eigenvalues() const { return eig_; }

  double lambda_max() const {
    double m = -INFINITY;
    for (const auto& d : eig_) m = std::max(m, d.real());
    return m;
  }
  double lambda_min() const {
    double m = INFINITY;
    for (const auto& d : eig_) m = std::min(m, d.real());
    return m;
  }
  bool real_spectrum(double tol = 0.0) const {
    for (const auto& d : eig_)
      if (std::abs(d.imag()) > tol) return false;
    return true;
  }

  /// v <- V^{-1} v
  void forward(std::span<cplx> v) const {
    check(v.size());
    switch (kind_) {
      case Kind::Sine:
        fft::execute_r2r(r2r_, v.data());
        scale(v, sine_scale_);
        break;
      case Kind::Fourier:
        fft::execute(fwd_, v.data());
        scale(v, fourier_scale_);
        break;
      case Kind::Cosine:
        fft::execute_r2r(r2r_, v.data());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] *= cos_fwd_[i];
        break;
      case Kind::Dense: {
        Eigen::Map<Eigen::VectorXcd> m(v.data(), static_cast<Eigen::Index>(v.size()));
        Eigen::VectorXcd r = vinv_ * m;
        m = r;
        break;
      }
    }
  }

  /// c <- V c
  void inverse(std::span<cplx> v) const {
    check(v.size());
    switch (kind_) {
      case Kind::Sine:
        fft::execute_r2r(r2r_, v.data());
        scale(v, sine_scale_);
        break;
      case Kind::Fourier:
        fft::execute(bwd_, v.data());
        scale(v, fourier_scale_);
        break;
      case Kind::Cosine:
        for (std::size_t i = 0; i < v.size(); ++i) v[i] *= cos_inv_[i];
        fft::execute_r2r(r2r_, v.data());
        break;
      case Kind::Dense: {
        Eigen::Map<Eigen::VectorXcd> m(v.data(), static_cast<Eigen::Index>(v.size()));
        Eigen::VectorXcd r = v_ * m;
        m = r;
        break;
      }
    }
  }

  /// v <- V diag(mult) V^{-1} v
  void apply_diagonal(const Vec& mult, std::span<cplx> v) const {
    forward(v);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= mult[i];
    inverse(v);
  }

  Vec apply(std::span<const cplx> v) const {
    Vec out(v.begin(), v.end());
    apply_diagonal(eig_, out);
    return out;
  }

  Vec apply_function(const std::function<cplx(cplx)>& f, std::span<const cplx> v) const {
    Vec mult(eig_.size());
    for (std::size_t j = 0; j < eig_.size(); ++j) {
      mult[j] = f(eig_[j]);
      if (!std::isfinite(mult[j].real()) || !std::isfinite(mult[j].imag()))
        throw config_error("apply_function: f is not finite on the spectrum");
    }
    Vec out(v.begin(), v.end());
    apply_diagonal(mult, out);
    return out;
  }

  friend SpectralOperator build_operator(const Grid&, BoundaryCondition, const Coefficients&, bool);

 private:
  enum class Kind { Sine, Fourier, Cosine, Dense };

  void check(std::size_t n) const {
    if (n != eig_.size()) throw config_error("spatial: vector length does not match grid");
  }
  static void scale(std::span<cplx> v, double s) {
    for (auto& z : v) z *= s;
  }

  Grid grid_;
  BoundaryCondition bc_ = BoundaryCondition::DirichletZero;
  Coefficients coeffs_;
  Basis basis_ = Basis::SineTransform;
  Kind kind_ = Kind::Sine;
  Vec eig_;
  fft::Plan r2r_, fwd_, bwd_;
  double sine_scale_ = 1.0;
  double fourier_scale_ = 1.0;
  std::vector<double> cos_fwd_, cos_inv_;
  Eigen::MatrixXcd v_, vinv_;
};

inline constexpr std::size_t dense_basis_cap = 512;

/// Builds L_h. `dense` forces the DenseEigen basis (small grids only).
inline SpectralOperator build_operator(const Grid& g, BoundaryCondition bc, const Coefficients& k,
                                       bool dense = false) {
  detail::check_grid(g, bc);
  if (k.b != 0.0 && !(bc == BoundaryCondition::Periodic && g.dim == 1))
    throw config_error("spatial: advection requires a 1D periodic grid");
  if (k.beta != 0.0 && bc != BoundaryCondition::BiharmonicClamped)
    throw config_error("spatial: biharmonic term requires BiharmonicClamped");
  if (bc == BoundaryCondition::BiharmonicClamped && k.beta == 0.0)
    throw config_error("spatial: BiharmonicClamped requires a biharmonic coefficient");

  SpectralOperator op;
  op.grid_ = g;
  op.bc_ = bc;
  op.coeffs_ = k;
  const int nx = g.nx();
  const int ny = g.ny();
  const std::size_t N = g.size();

  if (dense) {
    if (N > dense_basis_cap) throw config_error("spatial: dense basis capped at 512 unknowns");
    const Eigen::MatrixXcd M = assemble_stencil(g, bc, k);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M);
    if (es.info() != Eigen::Success) throw breakdown_error("spatial: dense eigensolver failed");
    op.basis_ = Basis::DenseEigen;
    op.kind_ = SpectralOperator::Kind::Dense;
    op.v_ = es.eigenvectors();
    op.vinv_ = op.v_.partialPivLu().inverse();
    op.eig_.assign(es.eigenvalues().data(), es.eigenvalues().data() + N);
    return op;
  }

  const BoundaryCondition lbc = bc == BoundaryCondition::BiharmonicClamped ? BoundaryCondition::DirichletZero : bc;
  const auto ex = detail::laplacian_eigs_1d(nx, g.h, lbc);
  const auto ey = g.dim == 2 ? detail::laplacian_eigs_1d(ny, g.h, lbc) : std::vector<double>{0.0};
  op.eig_.resize(N);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const double lam = ex[static_cast<std::size_t>(ix)] + ey[static_cast<std::size_t>(iy)];
      cplx d = k.a * lam - k.beta * lam * lam - k.c;
      if (k.b != 0.0) d -= cplx(0.0, k.b / g.h * std::sin(2.0 * pi * ix / nx));
      op.eig_[static_cast<std::size_t>(iy * nx + ix)] = d;
    }

  std::vector<int> dims = g.dim == 2 ? std::vector<int>{ny, nx} : std::vector<int>{nx};
  op.basis_ = g.dim == 2 ? Basis::KroneckerProductOfAxes : Basis::SineTransform;
  switch (lbc) {
    case BoundaryCondition::DirichletZero:
    case BoundaryCondition::BiharmonicClamped:
      op.kind_ = SpectralOperator::Kind::Sine;
      op.r2r_ = fft::make_r2r_complex(dims, FFTW_RODFT00);
      op.sine_scale_ = 1.0 / std::sqrt(2.0 * (nx + 1));
      if (g.dim == 2) op.sine_scale_ /= std::sqrt(2.0 * (ny + 1));
      break;
    case BoundaryCondition::Periodic:
      op.kind_ = SpectralOperator::Kind::Fourier;
      if (g.dim == 1) op.basis_ = Basis::FourierTransform;
      op.fwd_ = fft::make_dft(dims, FFTW_FORWARD);
      op.bwd_ = fft::make_dft(dims, FFTW_BACKWARD);
      op.fourier_scale_ = 1.0 / std::sqrt(static_cast<double>(N));
      break;
    case BoundaryCondition::NeumannZero: {
      op.kind_ = SpectralOperator::Kind::Cosine;
      if (g.dim == 1) op.basis_ = Basis::CosineTransform;
      op.r2r_ = fft::make_r2r_complex(dims, FFTW_REDFT00);
      auto w = [](int i, int n) { return (i == 0 || i == n - 1) ? 1.0 : 2.0; };
      op.cos_fwd_.resize(N);
      op.cos_inv_.resize(N);
      for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
          double wt = w(ix, nx) / (2.0 * (nx - 1));
          if (g.dim == 2) wt *= w(iy, ny) / (2.0 * (ny - 1));
          const double winv = 1.0 / (w(ix, nx) * (g.dim == 2 ? w(iy, ny) : 1.0));
          op.cos_fwd_[static_cast<std::size_t>(iy * nx + ix)] = wt;
          op.cos_inv_[static_cast<std::size_t>(iy * nx + ix)] = winv;
        }
      break;
    }
  }
  return op;
}

}  // namespace expparadiag
