#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qmoves/physics_config.hpp"
#include "qmoves/protocol.hpp"
#include "qmoves/schrodinger.hpp"

namespace qmoves {

/// M allowed tweezer positions x_k = first + k * spacing.
struct PositionLattice {
  double first = 0.0;
  double spacing = 1.0;
  std::size_t count = 0;

  /// sigma/8 spacing, 128 points centred on 0: x_k = -1 + (k + 1/2)/64 at the default sigma.
  static PositionLattice standard(const PhysicsConfig& cfg);
  static PositionLattice centered(double center, double spacing, std::size_t count);

  double position(std::size_t k) const { return first + static_cast<double>(k) * spacing; }
  /// Range covered by nearest-point rounding: [first - spacing/2, last + spacing/2].
  double lower() const { return first - 0.5 * spacing; }
  double upper() const { return position(count - 1) + 0.5 * spacing; }
  std::vector<double> positions() const;

  /// Nearest lattice index; exact ties go toward `previous` when given, else down.
  std::size_t nearest(double x, std::optional<std::size_t> previous = std::nullopt) const;

  bool operator==(const PositionLattice&) const = default;
};

/// Lattice indices k_1 .. k_N, one per time step of width T/N.
struct DiscreteProtocol {
  PositionLattice lattice;
  std::vector<std::size_t> indices;

  std::size_t steps() const { return indices.size(); }
  /// Throws ContractError on an empty protocol or an index outside [0, M).
  void validate() const;
  /// Step-midpoint samples as a continuous protocol of duration T.
  Protocol to_protocol(double T, ProtocolKind kind = ProtocolKind::optimized) const;
};

inline constexpr std::size_t kDefaultBankBudgetBytes = std::size_t{1} << 30;

/// Spectral factorizations H(x_k) = V_k diag(E_k) V_k^T for every lattice position,
/// stored contiguously as one n_x by (M n_x) matrix. Built eagerly or on first use.
class SpectralBank {
public:
  SpectralBank(const PhysicsConfig& cfg, const PositionLattice& lattice, bool eager,
               std::size_t budget_bytes = kDefaultBankBudgetBytes);
  ~SpectralBank();
  SpectralBank(const SpectralBank&) = delete;
  SpectralBank& operator=(const SpectralBank&) = delete;

  static std::size_t required_bytes(std::size_t positions, std::size_t n_x);

  const PhysicsConfig& config() const { return cfg_; }
  const PositionLattice& lattice() const { return lattice_; }
  const SpatialGrid& grid() const { return grid_; }
  std::size_t positions() const { return lattice_.count; }
  std::size_t grid_size() const { return grid_.n; }
  std::size_t memory_bytes() const { return required_bytes(lattice_.count, grid_.n); }

  /// Builds position k if needed (thread-safe).
  void ensure(std::size_t k) const;
  void ensure_all() const;
  bool is_built(std::size_t k) const;

  /// Columns k*n_x .. (k+1)*n_x - 1 hold V_k.
  const Eigen::MatrixXd& all_vectors() const;
  Eigen::Ref<const Eigen::MatrixXd> vectors(std::size_t k) const;
  Eigen::Ref<const Eigen::VectorXd> energies(std::size_t k) const;

private:
  struct Lazy;
  PhysicsConfig cfg_;
  PositionLattice lattice_;
  SpatialGrid grid_;
  mutable Eigen::MatrixXd vectors_;
  mutable Eigen::MatrixXd energies_;
  std::unique_ptr<Lazy> lazy_;
};

/// Step propagators U_k = exp(-i H_k dt) applied through a shared SpectralBank.
class UnitaryBank {
public:
  UnitaryBank(std::shared_ptr<const SpectralBank> spectra, double T, std::size_t steps);

  double T() const { return T_; }
  std::size_t steps() const { return steps_; }
  double dt() const { return dt_; }
  const SpectralBank& spectra() const { return *spectra_; }
  std::shared_ptr<const SpectralBank> shared_spectra() const { return spectra_; }
  const PositionLattice& lattice() const { return spectra_->lattice(); }
  const SpatialGrid& grid() const { return spectra_->grid(); }

  /// psi <- V (e^{-i E dt} . V^T psi); dt defaults to the bank's T/N.
  void apply(std::size_t k, Eigen::VectorXcd& psi) const { apply(k, psi, dt_); }
  void apply(std::size_t k, Eigen::VectorXcd& psi, double dt) const;
  /// chi <- U_k^dagger chi.
  void apply_adjoint(std::size_t k, Eigen::VectorXcd& chi) const { apply(k, chi, -dt_); }

private:
  std::shared_ptr<const SpectralBank> spectra_;
  double T_;
  std::size_t steps_;
  double dt_;
};

UnitaryBank build_bank(const PhysicsConfig& cfg, const PositionLattice& lattice, double T, std::size_t N,
                       bool eager, std::size_t budget_bytes = kDefaultBankBudgetBytes);

/// Samples p at step midpoints (i - 1/2) T/N and rounds to the nearest lattice point.
/// Throws DomainError when a sample falls outside the lattice range.
DiscreteProtocol quantize_protocol(const Protocol& p, const PositionLattice& lattice, std::size_t N);

inline constexpr std::size_t kFrameBins = 160;

struct DensityFrame {
  double t = 0.0;
  std::vector<double> density; // bin averages; sum * bin_width = 1
};

struct SimulationResult {
  std::optional<double> fidelity;
  std::vector<DensityFrame> frames;
  WaveFunction final_state;
};

/// |<phi|psi>|^2 with the dx-weighted inner product.
double fidelity(const WaveFunction& psi, const WaveFunction& phi);
std::complex<double> overlap(const WaveFunction& phi, const WaveFunction& psi);

/// Applies U_{k_N} ... U_{k_1} to psi0. Records a frame at t = 0 and after every
/// frame_stride-th step when frame_stride > 0 (plus the final step).
SimulationResult evolve(const DiscreteProtocol& dp, const UnitaryBank& bank, const WaveFunction& psi0,
                        std::size_t frame_stride = 0, const WaveFunction* target = nullptr);

/// Local averages of a grid density over `bins` equal-width bins spanning the n_x cells.
std::vector<double> downsample_density(const std::vector<double>& density, std::size_t bins);
double frame_bin_width(const SpatialGrid& grid, std::size_t bins);

struct TransportStates {
  WaveFunction initial;
  WaveFunction target;
};

/// Initial state per cfg.initial_state; target is the joint ground state at x0_end.
TransportStates transport_states(const PhysicsConfig& cfg);

struct FidelityPoint {
  double T = 0.0;
  double F = 0.0;
  std::string kind;
};

using ProtocolFamily = std::function<Protocol(double T)>;
using StepRule = std::function<std::size_t(double T)>;

/// N = max(100, ceil(T / 2.5e-4)).
std::size_t default_step_rule(double T);

/// Fidelity of family(T) for every T in T_list, sharing one set of spectral factorizations.
std::vector<FidelityPoint> fidelity_curve(const ProtocolFamily& family, const std::string& kind,
                                          std::shared_ptr<const SpectralBank> spectra, const StepRule& n_rule,
                                          const std::vector<double>& T_list, const TransportStates& states);

} // namespace qmoves
