#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qmoves/physics_config.hpp"
#include "qmoves/protocol.hpp"
#include "qmoves/schrodinger.hpp"

namespace qmoves {

inline constexpr std::size_t kDefaultProtocolSamples = 4001;

// ---------------------------------------------------------------------------
// Cubic ramp and speed limit
// ---------------------------------------------------------------------------

/// x0(t) = L (2u^3 - 3u^2 + 1/2) + center with u = t/T: starts at center + L/2,
/// ends at center - L/2, zero velocity at both ends.
struct CubicRamp {
  double L = 1.1;
  double T = 0.1;
  double center = 0.0;

  double position(double t) const;
  double velocity(double t) const;
  double acceleration(double t) const;
  /// 6 L / T^2, attained at t = 0 and t = T.
  double peak_acceleration() const;
};

Protocol cubic_ramp(double L, double T, double center, std::size_t samples = kDefaultProtocolSamples);

struct SpeedLimitReport {
  double t_csl = 0.0;          // sqrt(6 m L sigma sqrt(e) / A)
  double t_csl_harmonic = 0.0; // (pi / omega) sqrt(L / sigma)
  double a_max = 0.0;          // A / (m sigma sqrt(e)), the steepest Gaussian force per unit mass
  double omega = 0.0;
};

SpeedLimitReport classical_speed_limit(const PhysicsConfig& cfg, double L);

// ---------------------------------------------------------------------------
// Counter-diabatic corrections
// ---------------------------------------------------------------------------

/// x_CD = x0 + x0''/omega^2 with omega^2 = A/(m sigma^2).
/// Throws ContractError when the base protocol does not start and end at rest.
Protocol cd_correct_single(const Protocol& base, const PhysicsConfig& cfg);

class MetricTable;

/// x_CD = x0 + (1/omega^2) d/dt( sqrt(g(x0)) x0' ).
Protocol cd_correct_double(const Protocol& base, const MetricTable& table, const PhysicsConfig& cfg);

// ---------------------------------------------------------------------------
// Adiabatic metric
// ---------------------------------------------------------------------------

/// sqrt(g) = int (-d_{x0} n)(d_x n) dx / int (d_x n)^2 dx for the ground-state density n.
/// Signed; a negative value means the density moves against the tweezer.
double metric_sqrt(double x0, const PhysicsConfig& cfg);
double metric(double x0, const PhysicsConfig& cfg);

enum class Interpolation { linear, cubic };

/// Sampled map x0 -> g(x0) with linear or natural-cubic-spline interpolation.
class MetricTable {
public:
  MetricTable(std::vector<double> x0, std::vector<double> g, Interpolation interp = Interpolation::cubic);

  /// Constant metric on [lo, hi].
  static MetricTable flat(double lo, double hi, double g = 1.0, std::size_t samples = 33);

  double operator()(double x0) const { return g(x0); }
  double g(double x0) const;
  double sqrt_g(double x0) const;

  double x0_min() const { return x0_.front(); }
  double x0_max() const { return x0_.back(); }
  const std::vector<double>& x0() const { return x0_; }
  const std::vector<double>& values() const { return g_; }
  Interpolation interpolation() const { return interp_; }

private:
  std::vector<double> x0_;
  std::vector<double> g_;
  std::vector<double> second_; // spline second derivatives
  Interpolation interp_;
};

/// Samples metric() on n_samples evenly spaced points of [x0_min, x0_max].
/// Throws NumericError on a non-positive sqrt(g).
MetricTable build_metric_table(const PhysicsConfig& cfg, double x0_min, double x0_max, std::size_t n_samples,
                               Interpolation interp = Interpolation::cubic);

// ---------------------------------------------------------------------------
// Geodesic protocol
// ---------------------------------------------------------------------------

struct GeodesicOptions {
  double ramp_fraction = 0.15;
  std::size_t samples = kDefaultProtocolSamples;
  std::size_t quadrature_points = 8192; // arclength table resolution
};

/// Protocol from cfg.x0_start to cfg.x0_end with sqrt(g) x0' constant on the interior
/// and constant-acceleration entry/exit ramps of length ramp_fraction * T each.
Protocol geodesic_protocol(const MetricTable& table, double T, const PhysicsConfig& cfg,
                           const GeodesicOptions& opts = {});

// ---------------------------------------------------------------------------
// Exact velocity field
// ---------------------------------------------------------------------------

inline constexpr double kDensityFloor = 1e-8;

struct VelocityField {
  std::vector<double> x;
  std::vector<std::optional<double>> v; // empty where the density is below the floor
  std::vector<double> density;
  std::vector<double> density_rate; // d_t n = x0' d_{x0} n
  double x0 = 0.0;
  double x0_dot = 0.0;
};

struct VelocityFieldOptions {
  double dt_fraction = 1e-3;   // half-step for x0' as a fraction of T
  double x0_step_cells = 1.0;  // half-step for d_{x0} I, in grid spacings
  double density_floor = kDensityFloor;
};

/// v = -d_t I / d_x I for the instantaneous ground state along the protocol, with
/// d_t I = x0' d_{x0} I.
VelocityField exact_velocity_field(const Protocol& protocol, double t, const PhysicsConfig& cfg,
                                   const VelocityFieldOptions& opts = {});

/// Least-squares uniform velocity w minimizing int (d_t n + w d_x n)^2 dx, with d_t n
/// reconstructed from the field through the continuity equation.
double uniform_velocity_fit(const VelocityField& field, double dx);

/// L2 norms of the continuity residual d_t n + d_x(v n) and of d_t n over the unmasked region.
struct ContinuityResidual {
  double residual = 0.0;
  double rate = 0.0;
};
ContinuityResidual continuity_residual(const VelocityField& field, double dx);

} // namespace qmoves
