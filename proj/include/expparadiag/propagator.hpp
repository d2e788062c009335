#pragma once

#include "spatial.hpp"

namespace expparadiag {

enum class PropagatorMode { ExactSpectral, Pade2, Pade3 };

inline const char* to_string(PropagatorMode m) {
  switch (m) {
    case PropagatorMode::ExactSpectral: return "exact";
    case PropagatorMode::Pade2: return "pade2";
    case PropagatorMode::Pade3: return "pade3";
  }
  return "?";
}

/// Scalar multiplier of A for one eigenvalue z = dt*d.
inline cplx propagator_multiplier(cplx z, PropagatorMode mode) {
  switch (mode) {
    case PropagatorMode::ExactSpectral: return std::exp(z);
    case PropagatorMode::Pade2: {
      const cplx den = 1.0 - 0.5 * z;
      if (std::abs(den) == 0.0) throw config_error("propagator: Pade2 denominator vanishes");
      return (1.0 + 0.5 * z) / den;
    }
    case PropagatorMode::Pade3: {
      const cplx den = 1.0 - z / 3.0;
      if (std::abs(den) == 0.0) throw config_error("propagator: Pade3 denominator vanishes");
      return (1.0 + 2.0 * z / 3.0 + z * z / 6.0) / den;
    }
  }
  return {};
}

/// A = exp(dt L_h) (or a Pade approximant), stored as eigenbasis multipliers.
class Propagator {
 public:
  static constexpr int cached_powers = 6;

  Propagator(SpectralOperator op, double dt, PropagatorMode mode = PropagatorMode::ExactSpectral)
      : op_(std::move(op)), dt_(dt), mode_(mode) {
    if (!(dt > 0.0)) throw config_error("propagator: dt must be positive");
    const auto& d = op_.eigenvalues();
    pow_.assign(cached_powers, Vec(d.size()));
    for (std::size_t j = 0; j < d.size(); ++j) {
      const cplx m = propagator_multiplier(dt * d[j], mode);
      cplx acc = m;
      for (int p = 0; p < cached_powers; ++p) {
        pow_[static_cast<std::size_t>(p)][j] = acc;
        acc *= m;
      }
    }
  }

  const SpectralOperator& op() const { return op_; }
  double dt() const { return dt_; }
  PropagatorMode mode() const { return mode_; }
  std::size_t size() const { return op_.size(); }
  const Vec& multipliers() const { return pow_[0]; }

  /// Multipliers m_j^p, 1 <= p <= cached_powers.
  const Vec& multipliers(int p) const {
    if (p < 1 || p > cached_powers) throw config_error("propagator: cached powers are 1..6");
    return pow_[static_cast<std::size_t>(p - 1)];
  }

  Vec apply(std::span<const cplx> v) const { return power_apply(1, v); }

  /// A^p v
  Vec power_apply(int p, std::span<const cplx> v) const {
    Vec out(v.begin(), v.end());
    power_apply_inplace(p, out);
    return out;
  }

  void power_apply_inplace(int p, std::span<cplx> v) const {
    if (p < 1) throw config_error("propagator: power must be >= 1");
    if (p <= cached_powers) {
      op_.apply_diagonal(pow_[static_cast<std::size_t>(p - 1)], v);
    } else {
      Vec m(pow_[0].size());
      for (std::size_t j = 0; j < m.size(); ++j) m[j] = ipow(pow_[0][j], p);
      op_.apply_diagonal(m, v);
    }
  }

  /// max_j |m_j| = exp(dt*lambda_max) for the exact propagator of a real spectrum.
  double norm_bound() const {
    if (mode_ != PropagatorMode::ExactSpectral) throw config_error("norm_bound: requires exact mode");
    if (!op_.real_spectrum()) throw config_error("norm_bound: requires a real spectrum");
    return std::exp(dt_ * op_.lambda_max());
  }

 private:
  SpectralOperator op_;
  double dt_;
  PropagatorMode mode_;
  std::vector<Vec> pow_;
};

}  // namespace expparadiag
