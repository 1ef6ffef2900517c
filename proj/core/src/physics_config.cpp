#include "qmoves/physics_config.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmoves/errors.hpp"

namespace qmoves {

std::string_view to_string(InitialState s)
{
  switch (s) {
  case InitialState::joint_ground:
    return "joint_ground";
  case InitialState::static_well_ground:
    return "static_well_ground";
  }
  return "joint_ground";
}

InitialState initial_state_from_string(std::string_view s)
{
  if (s == "joint_ground" || s == "joint") {
    return InitialState::joint_ground;
  }
  if (s == "static_well_ground" || s == "static") {
    return InitialState::static_well_ground;
  }
  throw DomainError("unknown initial state '" + std::string(s) + "'");
}

void PhysicsConfig::validate() const
{
  auto fail = [](const std::string& what) { throw DomainError("invalid PhysicsConfig: " + what); };
  if (!(mass > 0.0)) {
    fail("mass must be > 0");
  }
  if (!(hbar > 0.0)) {
    fail("hbar must be > 0");
  }
  if (!(A > 0.0)) {
    fail("A must be > 0");
  }
  if (!(B >= 0.0)) {
    fail("B must be >= 0");
  }
  if (!(sigma > 0.0)) {
    fail("sigma must be > 0");
  }
  if (!(x_min < x_max)) {
    fail("grid bounds must satisfy x_min < x_max");
  }
  if (n_x < 64) {
    fail("n_x must be >= 64");
  }
  if (x0_start == x0_end) {
    fail("x0_start and x0_end must differ");
  }
  const double lo = std::min(x0_start, x0_end) - 4.0 * sigma;
  const double hi = std::max(x0_start, x0_end) + 4.0 * sigma;
  if (lo < x_min || hi > x_max) {
    fail("grid bounds must contain the transport range padded by 4 sigma");
  }
}

double PhysicsConfig::transport_distance() const { return std::abs(x0_start - x0_end); }

double PhysicsConfig::omega() const { return std::sqrt(A / mass) / sigma; }

double PhysicsConfig::omega_squared() const { return A / (mass * sigma * sigma); }

double PhysicsConfig::potential(double x, double x0) const
{
  const double two_s2 = 2.0 * sigma * sigma;
  const double dm = x - x0;
  const double ds = x - x_B;
  return -A * std::exp(-dm * dm / two_s2) - B * std::exp(-ds * ds / two_s2);
}

} // namespace qmoves
