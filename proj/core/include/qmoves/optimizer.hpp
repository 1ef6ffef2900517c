#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "qmoves/propagation.hpp"

namespace qmoves {

/// SplitMix64 (Steele, Lea & Flood 2014): a counter-based generator whose output is a
/// bijective mix of seed + i * golden_gamma, so streams are cheap to split by seed.
class SplitMix64 {
public:
  using result_type = std::uint64_t;
  static constexpr std::string_view algorithm = "splitmix64";

  explicit SplitMix64(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
  std::uint64_t bounded(std::uint64_t bound);

  std::uint64_t counter() const { return counter_; }

private:
  std::uint64_t state_;
  std::uint64_t counter_ = 0;
};

/// Fisher-Yates permutation of 0..n-1 driven by rng.bounded().
std::vector<std::size_t> random_permutation(std::size_t n, SplitMix64& rng);

struct OptimizerConfig {
  std::size_t N = 40;
  PositionLattice lattice;
  std::uint64_t seed = 0;
  std::size_t max_sweeps = 200;
  double tolerance = 0.0;  // stop when a sweep gains no more than this; 0 = fixed point only
  bool pin_ends = false;   // hold the first/last steps at the lattice points nearest x0_start/x0_end

  void validate() const;
};

enum class StopReason { fixed_point, tolerance, max_sweeps };
std::string_view to_string(StopReason r);

struct OptimizationTrace {
  std::uint64_t seed = 0;
  std::string rng = std::string(SplitMix64::algorithm);
  double T = 0.0;
  std::vector<double> fidelities;         // initial value, then one entry per visited step
  std::vector<std::size_t> sweep_bounds;  // index in `fidelities` of each sweep's last entry
  DiscreteProtocol final_protocol;
  double final_fidelity = 0.0;
  std::size_t updates = 0;      // accepted changes
  std::size_t evaluations = 0;  // candidate fidelities computed
  std::size_t sweeps = 0;
  bool converged = false;       // last sweep made zero changes
  StopReason stop_reason = StopReason::max_sweeps;
};

/// |<chi|U_k|psi>|^2 for every lattice index k, from the state `left` before the step and
/// the costate `right` after it. One GEMM over the whole bank.
std::vector<double> local_fidelities(const UnitaryBank& bank, const Eigen::VectorXcd& left,
                                     const Eigen::VectorXcd& right);

/// Same, computing the partial states for 0-based step w of dp from psi0 and phi.
std::vector<double> local_fidelities(const DiscreteProtocol& dp, std::size_t w, const UnitaryBank& bank,
                                     const WaveFunction& psi0, const WaveFunction& phi);

/// Candidate fidelities closer than this count as tied.
inline constexpr double kFidelityTieTolerance = 1e-12;

/// Index a visit settles on: the incumbent unless the best candidate beats it by more
/// than the tie tolerance, else the lowest index within half the tolerance of the best.
std::size_t preferred_index(const std::vector<double>& F, std::size_t current);

/// Stochastic local ascent over one discrete protocol. Keeps prefix states and suffix
/// costates cached; a change at step w invalidates only the states downstream of w
/// and the costates upstream of it.
class LocalAscent {
public:
  LocalAscent(const UnitaryBank& bank, const WaveFunction& psi0, const WaveFunction& phi, DiscreteProtocol start);

  struct SweepStats {
    std::size_t changes = 0;
    std::vector<std::size_t> visited;  // step order of this sweep
    std::vector<double> fidelities;    // protocol fidelity after each visit
  };

  /// Visits every free step once in a fresh random order, setting each to its best
  /// lattice index per preferred_index().
  SweepStats sweep(SplitMix64& rng);

  /// Local fidelities of step w from the cached partial products (what a visit compares).
  std::vector<double> candidates(std::size_t w);

  /// Pinned steps are never visited.
  void pin(std::size_t step);

  const DiscreteProtocol& protocol() const { return dp_; }
  double fidelity();
  std::size_t evaluations() const { return evaluations_; }
  std::size_t step_applications() const { return step_applications_; }

private:
  const Eigen::VectorXcd& state_before(std::size_t w);
  const Eigen::VectorXcd& costate_after(std::size_t w);

  const UnitaryBank& bank_;
  Eigen::VectorXcd phi_;
  DiscreteProtocol dp_;
  std::vector<bool> pinned_;
  std::vector<Eigen::VectorXcd> forward_;   // forward_[i]: state after i steps
  std::vector<Eigen::VectorXcd> backward_;  // backward_[i]: costate seen by steps < i
  std::size_t forward_valid_ = 0;           // forward_[0..forward_valid_] current
  std::size_t backward_valid_ = 0;          // backward_[backward_valid_..N] current
  std::size_t evaluations_ = 0;
  std::size_t step_applications_ = 0;
  double value_ = 0.0; // fidelity of dp_ as last recorded
};

/// Random i.i.d. uniform lattice indices, drawn from rng.
DiscreteProtocol random_protocol(const PositionLattice& lattice, std::size_t N, SplitMix64& rng);

/// Sweeps until a zero-change sweep, the tolerance, or max_sweeps.
OptimizationTrace optimize(const OptimizerConfig& cfg, const UnitaryBank& bank, const WaveFunction& psi0,
                           const WaveFunction& phi);

struct EnsembleSummary {
  std::size_t runs = 0;
  double min_fidelity = 0.0;
  double max_fidelity = 0.0;
  double median_fidelity = 0.0;
  double relative_spread = 0.0;  // (max - min) / max
  std::size_t converged = 0;
  std::size_t max_sweeps_used = 0;
  std::size_t distinct_protocols = 0;
};

struct EnsembleResult {
  std::vector<OptimizationTrace> traces;
  EnsembleSummary summary;
};

/// Runs seeds base.seed, base.seed + 1, ... in parallel over a shared bank.
EnsembleResult run_ensemble(std::size_t n_seeds, const OptimizerConfig& base, const UnitaryBank& bank,
                            const WaveFunction& psi0, const WaveFunction& phi, unsigned threads = 0);

EnsembleSummary summarize(const std::vector<OptimizationTrace>& traces);

} // namespace qmoves
