#include <cmath>
#include <numbers>

#include "qmoves/errors.hpp"
#include "qmoves/protocol_kit.hpp"

namespace qmoves {

double CubicRamp::position(double t) const
{
  const double u = t / T;
  return L * (2.0 * u * u * u - 3.0 * u * u + 0.5) + center;
}

double CubicRamp::velocity(double t) const
{
  const double u = t / T;
  return L * (6.0 * u * u - 6.0 * u) / T;
}

double CubicRamp::acceleration(double t) const
{
  const double u = t / T;
  return L * (12.0 * u - 6.0) / (T * T);
}

double CubicRamp::peak_acceleration() const { return 6.0 * std::abs(L) / (T * T); }

Protocol cubic_ramp(double L, double T, double center, std::size_t samples)
{
  if (!(T > 0.0)) {
    throw DomainError("cubic ramp duration must be > 0");
  }
  if (samples < 3) {
    throw DomainError("cubic ramp needs at least 3 samples");
  }
  const CubicRamp ramp{L, T, center};
  std::vector<double> x(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    x[j] = ramp.position(T * static_cast<double>(j) / static_cast<double>(samples - 1));
  }
  x.back() = ramp.position(T);
  return Protocol::uniform(T, std::move(x), ProtocolKind::cubic);
}

SpeedLimitReport classical_speed_limit(const PhysicsConfig& cfg, double L)
{
  if (L < 0.0) {
    throw DomainError("transport distance must be >= 0");
  }
  const double sqrt_e = std::sqrt(std::numbers::e);
  SpeedLimitReport r;
  r.omega = cfg.omega();
  r.a_max = cfg.A / (cfg.mass * cfg.sigma * sqrt_e);
  r.t_csl = std::sqrt(6.0 * cfg.mass * L * cfg.sigma * sqrt_e / cfg.A);
  r.t_csl_harmonic = std::numbers::pi / r.omega * std::sqrt(L / cfg.sigma);
  return r;
}

} // namespace qmoves
