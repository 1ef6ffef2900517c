#include <algorithm>
#include <cmath>
#include <string>

#include "qmoves/errors.hpp"
#include "qmoves/protocol_kit.hpp"

namespace qmoves {
namespace {

void require_rest_at_ends(const Protocol& base, const std::vector<double>& v)
{
  const double L = base.max_position() - base.min_position();
  const double tol = 1e-6 * L / base.duration();
  if (std::max(std::abs(v.front()), std::abs(v.back())) > tol) {
    throw ContractError("counter-diabatic correction needs zero end velocities (|v| = " +
                        std::to_string(std::max(std::abs(v.front()), std::abs(v.back()))) + ", tolerance " +
                        std::to_string(tol) + ")");
  }
}

// x0 + (1/omega^2) d/dt(w * x0'), with w = 1 for the single-tweezer case.
Protocol corrected(const Protocol& base, const std::vector<double>& weights, const PhysicsConfig& cfg,
                   ProtocolKind kind)
{
  const auto v = base.velocities();
  require_rest_at_ends(base, v);
  std::vector<double> flux(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    flux[j] = weights[j] * v[j];
  }
  const auto rate = sample_derivative(base.times(), flux);
  const double inv_w2 = 1.0 / cfg.omega_squared();
  std::vector<double> x(base.positions());
  for (std::size_t j = 0; j < x.size(); ++j) {
    x[j] += inv_w2 * rate[j];
  }
  return Protocol(base.times(), std::move(x), kind);
}

} // namespace

Protocol cd_correct_single(const Protocol& base, const PhysicsConfig& cfg)
{
  return corrected(base, std::vector<double>(base.size(), 1.0), cfg, ProtocolKind::cd_single);
}

Protocol cd_correct_double(const Protocol& base, const MetricTable& table, const PhysicsConfig& cfg)
{
  if (base.min_position() < table.x0_min() || base.max_position() > table.x0_max()) {
    throw DomainError("protocol leaves the metric table range");
  }
  std::vector<double> w(base.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] = table.sqrt_g(base.positions()[j]);
  }
  return corrected(base, w, cfg, ProtocolKind::cd_double);
}

} // namespace qmoves
