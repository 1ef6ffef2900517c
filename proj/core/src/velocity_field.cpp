#include <algorithm>
#include <cmath>

#include "qmoves/errors.hpp"
#include "qmoves/protocol_kit.hpp"

namespace qmoves {
namespace {

// -d_t I, the probability current of the instantaneous ground-state density.
std::vector<double> current_of(const VelocityField& field)
{
  std::vector<double> j(field.x.size(), 0.0);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (field.v[i]) {
      j[i] = *field.v[i] * field.density[i];
    }
  }
  return j;
}

} // namespace

VelocityField exact_velocity_field(const Protocol& protocol, double t, const PhysicsConfig& cfg,
                                   const VelocityFieldOptions& opts)
{
  const double T = protocol.duration();
  if (!(t > 0.0 && t < T)) {
    throw DomainError("velocity field time must lie strictly inside (0, T)");
  }
  const auto grid = SpatialGrid::from_config(cfg);
  const double h = std::min({opts.dt_fraction * T, t, T - t});
  const double x0 = protocol.position(t);
  const double x0_dot = (protocol.position(t + h) - protocol.position(t - h)) / (2.0 * h);

  // The instantaneous ground state depends on t only through x0, so d_t I = x0' d_{x0} I,
  // with d_{x0} I by a symmetric difference of one grid step as in the metric.
  const double delta = opts.x0_step_cells * grid.dx;
  const auto here = density_and_cdf(ground_state(x0, cfg).psi);
  const auto minus = density_and_cdf(ground_state(x0 - delta, cfg).psi);
  const auto plus = density_and_cdf(ground_state(x0 + delta, cfg).psi);

  VelocityField field;
  field.x = grid.points();
  field.x0 = x0;
  field.x0_dot = x0_dot;
  field.density = here.density;
  field.v.resize(grid.n);
  field.density_rate.resize(grid.n);
  // d_x I of the same trapezoidal CDF, so a rigid shift gives exactly v = x0'.
  const auto cdf_slope = grid_derivative(here.cdf, grid.dx);
  for (std::size_t i = 0; i < grid.n; ++i) {
    field.density_rate[i] = x0_dot * (plus.density[i] - minus.density[i]) / (2.0 * delta);
    const double cdf_rate = x0_dot * (plus.cdf[i] - minus.cdf[i]) / (2.0 * delta);
    if (here.density[i] > opts.density_floor && cdf_slope[i] > 0.0) {
      field.v[i] = -cdf_rate / cdf_slope[i];
    }
  }
  return field;
}

double uniform_velocity_fit(const VelocityField& field, double dx)
{
  const auto rate = grid_derivative(current_of(field), dx); // = -d_t n by continuity
  const auto dn_dx = grid_derivative(field.density, dx);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < rate.size(); ++i) {
    num += rate[i] * dn_dx[i];
    den += dn_dx[i] * dn_dx[i];
  }
  if (!(den > 0.0)) {
    throw NumericError("flat density; uniform velocity undefined");
  }
  return num / den;
}

ContinuityResidual continuity_residual(const VelocityField& field, double dx)
{
  const auto div = grid_derivative(current_of(field), dx);
  ContinuityResidual r;
  for (std::size_t i = 0; i < div.size(); ++i) {
    if (!field.v[i]) {
      continue;
    }
    const double res = field.density_rate[i] + div[i];
    r.residual += res * res * dx;
    r.rate += field.density_rate[i] * field.density_rate[i] * dx;
  }
  r.residual = std::sqrt(r.residual);
  r.rate = std::sqrt(r.rate);
  return r;
}

} // namespace qmoves
