#include "qmoves_app/lab.hpp"

#include "qmoves/errors.hpp"

namespace qmoves::app {

Lab::Lab(const PhysicsConfig& cfg, std::size_t budget_bytes)
    : cfg_(cfg), lattice_(PositionLattice::standard(cfg)),
      spectra_(std::make_shared<const SpectralBank>(cfg, lattice_, false, budget_bytes)),
      states_(transport_states(cfg))
{
}

double Lab::t_csl() const { return classical_speed_limit(cfg_, cfg_.transport_distance()).t_csl; }

const MetricTable& Lab::metric_table() const
{
  std::call_once(table_once_, [&] {
    table_.emplace(build_metric_table(cfg_, lattice_.lower(), lattice_.upper(), kMetricSamples));
  });
  return *table_;
}

Protocol Lab::reference(ProtocolKind kind, double T) const
{
  const double L = cfg_.x0_start - cfg_.x0_end;
  const double center = 0.5 * (cfg_.x0_start + cfg_.x0_end);
  switch (kind) {
  case ProtocolKind::cubic:
    return cubic_ramp(L, T, center);
  case ProtocolKind::cd_single:
    return cd_correct_single(cubic_ramp(L, T, center), cfg_);
  case ProtocolKind::geodesic:
    return geodesic_protocol(metric_table(), T, cfg_);
  case ProtocolKind::cd_double:
    return cd_correct_double(geodesic_protocol(metric_table(), T, cfg_), metric_table(), cfg_);
  default:
    throw DomainError("no analytic reference for kind '" + std::string(to_string(kind)) + "'");
  }
}

SimulationResult Lab::simulate(const Protocol& p, std::size_t N, std::size_t frame_stride) const
{
  const double T = p.duration();
  const UnitaryBank bank(spectra_, T, N == 0 ? default_step_rule(T) : N);
  return simulate(p, bank, frame_stride);
}

SimulationResult Lab::simulate(const Protocol& p, const UnitaryBank& bank, std::size_t frame_stride) const
{
  const auto dp = quantize_protocol(p, lattice_, bank.steps());
  return evolve(dp, bank, states_.initial, frame_stride, &states_.target);
}

} // namespace qmoves::app
