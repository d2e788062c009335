#pragma once

#include <fftw3.h>

#include <memory>
#include <mutex>
#include <vector>

#include "core.hpp"

namespace expparadiag::fft {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// Shared, immutable FFTW plan. Execution uses the new-array interface, so
/// concurrent execute calls on distinct buffers are safe.
class Plan {
 public:
  Plan() = default;
  explicit Plan(fftw_plan p)
      : p_(p, [](fftw_plan q) {
          std::lock_guard lock(planner_mutex());
          fftw_destroy_plan(q);
        }) {
    if (!p) throw config_error("fftw: plan creation failed");
  }
  fftw_plan get() const { return p_.get(); }
  explicit operator bool() const { return static_cast<bool>(p_); }

 private:
  std::shared_ptr<fftw_plan_s> p_;
};

namespace detail {
struct Scratch {
  explicit Scratch(std::size_t bytes) : ptr(fftw_malloc(std::max<std::size_t>(bytes, 16))) {}
  ~Scratch() { fftw_free(ptr); }
  Scratch(const Scratch&) = delete;
  Scratch& operator=(const Scratch&) = delete;
  void* ptr;
};
constexpr unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
}  // namespace detail

/// In-place real-to-real transform of interleaved complex data
/// (real and imaginary parts transformed independently).
inline Plan make_r2r_complex(const std::vector<int>& dims, fftw_r2r_kind kind) {
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  detail::Scratch buf(total * sizeof(cplx));
  std::vector<fftw_r2r_kind> kinds(dims.size(), kind);
  auto* d = static_cast<double*>(buf.ptr);
  std::lock_guard lock(planner_mutex());
  return Plan(fftw_plan_many_r2r(static_cast<int>(dims.size()), dims.data(), 2, d, nullptr, 2, 1, d,
                                 nullptr, 2, 1, kinds.data(), detail::flags));
}

/// In-place complex DFT over `dims`, repeated `howmany` times with the given
/// element stride and batch distance.
inline Plan make_dft(const std::vector<int>& dims, int sign, int howmany = 1, int stride = 1,
                     int dist = 0) {
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  if (dist == 0) dist = static_cast<int>(total);
  const std::size_t span = static_cast<std::size_t>(stride) * total +
                           static_cast<std::size_t>(dist) * static_cast<std::size_t>(howmany);
  detail::Scratch buf(span * sizeof(cplx));
  auto* z = static_cast<fftw_complex*>(buf.ptr);
  std::lock_guard lock(planner_mutex());
  return Plan(fftw_plan_many_dft(static_cast<int>(dims.size()), dims.data(), howmany, z, nullptr,
                                 stride, dist, z, nullptr, stride, dist, sign, detail::flags));
}

inline void execute(const Plan& p, cplx* inout) {
  auto* z = reinterpret_cast<fftw_complex*>(inout);
  fftw_execute_dft(p.get(), z, z);
}

inline void execute_r2r(const Plan& p, cplx* inout) {
  auto* d = reinterpret_cast<double*>(inout);
  fftw_execute_r2r(p.get(), d, d);
}

}  // namespace expparadiag::fft
