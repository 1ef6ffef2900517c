#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "qmoves/optimizer.hpp"
#include "qmoves/propagation.hpp"
#include "qmoves/protocol_kit.hpp"

namespace qmoves::app {

inline constexpr std::size_t kMetricSamples = 128;

/// Shared state for simulations on one physics config: lattice, spectral factorizations,
/// transport states and a lazily built metric table over the lattice range.
class Lab {
public:
  explicit Lab(const PhysicsConfig& cfg, std::size_t budget_bytes = kDefaultBankBudgetBytes);

  const PhysicsConfig& config() const { return cfg_; }
  const PositionLattice& lattice() const { return lattice_; }
  std::shared_ptr<const SpectralBank> spectra() const { return spectra_; }
  const TransportStates& states() const { return states_; }
  double t_csl() const;
  /// Replaces the initial/target pair, e.g. with states taken at a protocol's own endpoints.
  void set_states(TransportStates states) { states_ = std::move(states); }

  const MetricTable& metric_table() const;

  /// Reference protocol of the given kind (cubic, cd_single, geodesic, cd_double).
  Protocol reference(ProtocolKind kind, double T) const;

  /// Quantizes p on the lattice with N steps (default rule when N = 0) and evolves it
  /// from the initial state; fidelity against the target.
  SimulationResult simulate(const Protocol& p, std::size_t N = 0, std::size_t frame_stride = 0) const;
  SimulationResult simulate(const Protocol& p, const UnitaryBank& bank, std::size_t frame_stride = 0) const;

private:
  PhysicsConfig cfg_;
  PositionLattice lattice_;
  std::shared_ptr<const SpectralBank> spectra_;
  TransportStates states_;
  mutable std::once_flag table_once_;
  mutable std::optional<MetricTable> table_;
};

} // namespace qmoves::app
