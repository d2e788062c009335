#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace expparadiag {

using cplx = std::complex<double>;
using Vec = std::vector<cplx>;

/// Raised when inputs violate an operation's preconditions.
struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised on numerical breakdown (vanishing divisors, singular blocks).
struct breakdown_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Worker-count knob shared by every parallel loop in the library.
struct Exec {
  unsigned jobs = 1;
};

/// Runs f(i) for i in [0, n) over at most `jobs` threads, contiguous chunks.
template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& f) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, jobs), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &f] {
      for (std::size_t i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

/// Space-time vector: `nt` time blocks of `nx` entries, time-major.
struct BlockVector {
  std::size_t nt = 0;
  std::size_t nx = 0;
  Vec data;

  BlockVector() = default;
  BlockVector(std::size_t nt_, std::size_t nx_) : nt(nt_), nx(nx_), data(nt_ * nx_) {}

  std::span<cplx> block(std::size_t t) { return {data.data() + t * nx, nx}; }
  std::span<const cplx> block(std::size_t t) const { return {data.data() + t * nx, nx}; }
  std::size_t size() const { return data.size(); }
  bool same_shape(const BlockVector& o) const { return nt == o.nt && nx == o.nx; }
};

inline double norm2(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

inline double norm_inf(std::span<const cplx> v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

inline cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

/// max over time blocks of weight * ||a_t - b_t||_2.
inline double max_block_error(const BlockVector& a, const BlockVector& b, double weight = 1.0) {
  if (!a.same_shape(b)) throw config_error("max_block_error: shape mismatch");
  double m = 0.0;
  for (std::size_t t = 0; t < a.nt; ++t) {
    double s = 0.0;
    auto x = a.block(t);
    auto y = b.block(t);
    for (std::size_t i = 0; i < a.nx; ++i) s += std::norm(x[i] - y[i]);
    m = std::max(m, std::sqrt(s));
  }
  return weight * m;
}

/// z^p by repeated squaring (exact for small p, unlike std::pow on complex).
inline cplx ipow(cplx z, int p) {
  cplx r{1.0, 0.0};
  while (p > 0) {
    if (p & 1) r *= z;
    z *= z;
    p >>= 1;
  }
  return r;
}

inline constexpr double pi = 3.14159265358979323846;

}  // namespace expparadiag
