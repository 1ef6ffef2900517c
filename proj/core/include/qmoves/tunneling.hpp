#pragma once

#include <vector>

#include "qmoves/physics_config.hpp"

namespace qmoves {

struct TunnelSample {
  double d = 0.0;              // separation between the two wells
  double splitting = 0.0;      // E1 - E0
  double coupling = 0.0;       // splitting / 2
  double transfer_time = 0.0;  // pi hbar / splitting
  double barrier_height = 0.0; // V(midpoint) - min V
  double E0 = 0.0;
  double E1 = 0.0;
  bool tunneling_regime = false;
  bool parity_ok = false;      // ground state even, first excited odd about the midpoint
};

struct TunnelCurve {
  std::vector<TunnelSample> samples;
};

/// Resonant double well: two Gaussians of depth cfg.A at +-d/2 (cfg.B and cfg.x_B ignored).
PhysicsConfig resonant_double_well(const PhysicsConfig& cfg, double d);

TunnelSample tunnel_sample(const PhysicsConfig& cfg, double d);

/// d_list must be ascending.
TunnelCurve tunnel_curve(const PhysicsConfig& cfg, const std::vector<double>& d_list);

/// Largest d with transfer_time(d) <= T_budget, log-linear interpolation between samples.
/// Throws DomainError when even the smallest sampled separation is too slow.
double max_tunnel_distance(const TunnelCurve& curve, double T_budget);

struct BarrierReport {
  double E0 = 0.0;
  double barrier_height = 0.0;
  double barrier_top = 0.0;
  bool tunneling_regime = false; // E0 below the barrier top
};

BarrierReport barrier_report(const PhysicsConfig& cfg, double d);

struct DecayFit {
  double kappa = 0.0;          // fitted -d log(splitting) / d d
  double kappa_expected = 0.0; // sqrt(-2 m E0) / hbar for the single-well E0
  double single_well_E0 = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Least-squares line through log(splitting) on d in [d_lo, d_hi].
DecayFit fit_decay(const TunnelCurve& curve, const PhysicsConfig& cfg, double d_lo, double d_hi);

} // namespace qmoves
