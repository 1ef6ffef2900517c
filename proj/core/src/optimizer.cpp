#include "qmoves/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "qmoves/errors.hpp"
#include "qmoves/parallel.hpp"

namespace qmoves {
namespace {
__extension__ using u128 = unsigned __int128;
} // namespace

// ---------------------------------------------------------------------------
// RNG
// ---------------------------------------------------------------------------

SplitMix64::SplitMix64(std::uint64_t seed, std::uint64_t stream) : state_(seed ^ (stream * 0xD1B54A32D192ED03ULL))
{
}

SplitMix64::result_type SplitMix64::operator()()
{
  ++counter_;
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::bounded(std::uint64_t bound)
{
  if (bound == 0) {
    throw DomainError("bounded() needs a positive bound");
  }
  u128 m = static_cast<u128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::vector<std::size_t> random_permutation(std::size_t n, SplitMix64& rng)
{
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = i;
  }
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.bounded(i));
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

void OptimizerConfig::validate() const
{
  if (N < 1) {
    throw DomainError("optimizer needs N >= 1");
  }
  if (max_sweeps < 1) {
    throw DomainError("optimizer needs max_sweeps >= 1");
  }
  if (lattice.count == 0) {
    throw DomainError("optimizer lattice is empty");
  }
  if (tolerance < 0.0) {
    throw DomainError("optimizer tolerance must be >= 0");
  }
}

std::string_view to_string(StopReason r)
{
  switch (r) {
  case StopReason::fixed_point:
    return "fixed_point";
  case StopReason::tolerance:
    return "tolerance";
  case StopReason::max_sweeps:
    return "max_sweeps";
  }
  return "max_sweeps";
}

// ---------------------------------------------------------------------------
// Local fidelities
// ---------------------------------------------------------------------------

std::vector<double> local_fidelities(const UnitaryBank& bank, const Eigen::VectorXcd& left,
                                     const Eigen::VectorXcd& right)
{
  const auto& spectra = bank.spectra();
  const auto n = static_cast<Eigen::Index>(spectra.grid_size());
  const std::size_t M = spectra.positions();
  if (left.size() != n || right.size() != n) {
    throw ContractError("partial state sizes do not match the bank grid");
  }

  Eigen::Matrix<double, 4, Eigen::Dynamic> X(4, n);
  X.row(0) = left.real().transpose();
  X.row(1) = left.imag().transpose();
  X.row(2) = right.real().transpose();
  X.row(3) = right.imag().transpose();
  // Row pair (0,1) = V_k^T psi, row pair (2,3) = V_k^T chi, for all k side by side.
  const Eigen::Matrix<double, 4, Eigen::Dynamic> Y = X * spectra.all_vectors();

  const double dx = bank.grid().dx;
  const double dt = bank.dt();
  std::vector<double> F(M);
  for (std::size_t k = 0; k < M; ++k) {
    const auto E = spectra.energies(k);
    const Eigen::Index off = static_cast<Eigen::Index>(k) * n;
    double re = 0.0;
    double im = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double ar = Y(0, off + j);
      const double ai = Y(1, off + j);
      const double br = Y(2, off + j);
      const double bi = Y(3, off + j);
      // conj(b) * a * exp(-i E dt)
      const double pr = br * ar + bi * ai;
      const double pi = br * ai - bi * ar;
      const double c = std::cos(E(j) * dt);
      const double s = std::sin(E(j) * dt);
      re += pr * c + pi * s;
      im += pi * c - pr * s;
    }
    F[k] = (re * re + im * im) * dx * dx;
  }
  return F;
}

std::vector<double> local_fidelities(const DiscreteProtocol& dp, std::size_t w, const UnitaryBank& bank,
                                     const WaveFunction& psi0, const WaveFunction& phi)
{
  dp.validate();
  if (w >= dp.steps()) {
    throw DomainError("step index outside the protocol");
  }
  Eigen::VectorXcd left = psi0.amplitudes();
  for (std::size_t i = 0; i < w; ++i) {
    bank.apply(dp.indices[i], left);
  }
  Eigen::VectorXcd right = phi.amplitudes();
  for (std::size_t i = dp.steps(); i-- > w + 1;) {
    bank.apply_adjoint(dp.indices[i], right);
  }
  return local_fidelities(bank, left, right);
}

std::size_t preferred_index(const std::vector<double>& F, std::size_t current)
{
  const double top = *std::max_element(F.begin(), F.end());
  if (top - F[current] <= kFidelityTieTolerance) {
    return current;
  }
  // Half the tolerance keeps every accepted change a strict gain over the incumbent.
  std::size_t k = 0;
  while (F[k] < top - 0.5 * kFidelityTieTolerance) {
    ++k;
  }
  return k;
}

// ---------------------------------------------------------------------------
// LocalAscent
// ---------------------------------------------------------------------------

LocalAscent::LocalAscent(const UnitaryBank& bank, const WaveFunction& psi0, const WaveFunction& phi,
                         DiscreteProtocol start)
    : bank_(bank), phi_(phi.amplitudes()), dp_(std::move(start))
{
  dp_.validate();
  if (!(dp_.lattice == bank.lattice())) {
    throw ContractError("starting protocol and bank use different lattices");
  }
  if (dp_.steps() != bank.steps()) {
    throw ContractError("starting protocol length differs from the bank's N");
  }
  const std::size_t N = dp_.steps();
  pinned_.assign(N, false);
  forward_.resize(N + 1);
  backward_.resize(N + 1);
  forward_[0] = psi0.amplitudes();
  backward_[N] = phi_;
  forward_valid_ = 0;
  backward_valid_ = N;
  value_ = fidelity();
}

void LocalAscent::pin(std::size_t step)
{
  if (step >= pinned_.size()) {
    throw DomainError("pinned step outside the protocol");
  }
  pinned_[step] = true;
}

const Eigen::VectorXcd& LocalAscent::state_before(std::size_t w)
{
  while (forward_valid_ < w) {
    forward_[forward_valid_ + 1] = forward_[forward_valid_];
    bank_.apply(dp_.indices[forward_valid_], forward_[forward_valid_ + 1]);
    ++forward_valid_;
    ++step_applications_;
  }
  return forward_[w];
}

const Eigen::VectorXcd& LocalAscent::costate_after(std::size_t w)
{
  // backward_[i] = (U_{k_{N-1}} ... U_{k_i})^dagger phi; the costate after step w is backward_[w + 1].
  while (backward_valid_ > w + 1) {
    backward_[backward_valid_ - 1] = backward_[backward_valid_];
    bank_.apply_adjoint(dp_.indices[backward_valid_ - 1], backward_[backward_valid_ - 1]);
    --backward_valid_;
    ++step_applications_;
  }
  return backward_[w + 1];
}

double LocalAscent::fidelity()
{
  const std::size_t N = dp_.steps();
  const auto& psi = state_before(N);
  return std::norm(phi_.dot(psi) * bank_.grid().dx);
}

std::vector<double> LocalAscent::candidates(std::size_t w)
{
  if (w >= dp_.steps()) {
    throw DomainError("step index outside the protocol");
  }
  auto F = local_fidelities(bank_, state_before(w), costate_after(w));
  evaluations_ += F.size();
  return F;
}

LocalAscent::SweepStats LocalAscent::sweep(SplitMix64& rng)
{
  SweepStats stats;
  const auto order = random_permutation(dp_.steps(), rng);
  for (std::size_t w : order) {
    if (pinned_[w]) {
      continue;
    }
    stats.visited.push_back(w);
    const auto F = candidates(w);

    const std::size_t current = dp_.indices[w];
    const std::size_t best = preferred_index(F, current);
    if (best != current) {
      dp_.indices[w] = best;
      ++stats.changes;
      forward_valid_ = std::min(forward_valid_, w);
      backward_valid_ = std::max(backward_valid_, w + 1);
      value_ = F[best];
    }
    // An unchanged protocol keeps its recorded value; recomputing F[current] from fresh
    // partial states would wobble at the rounding level.
    stats.fidelities.push_back(value_);
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Drivers
// ---------------------------------------------------------------------------

DiscreteProtocol random_protocol(const PositionLattice& lattice, std::size_t N, SplitMix64& rng)
{
  DiscreteProtocol dp;
  dp.lattice = lattice;
  dp.indices.resize(N);
  for (auto& k : dp.indices) {
    k = static_cast<std::size_t>(rng.bounded(lattice.count));
  }
  return dp;
}

OptimizationTrace optimize(const OptimizerConfig& cfg, const UnitaryBank& bank, const WaveFunction& psi0,
                           const WaveFunction& phi)
{
  cfg.validate();
  if (!(cfg.lattice == bank.lattice()) || cfg.N != bank.steps()) {
    throw ContractError("optimizer config does not match the bank (lattice or N)");
  }
  SplitMix64 rng(cfg.seed);
  auto start = random_protocol(cfg.lattice, cfg.N, rng);

  const auto& physics = bank.spectra().config();
  std::size_t first_pin = 0;
  std::size_t last_pin = 0;
  if (cfg.pin_ends) {
    first_pin = cfg.lattice.nearest(physics.x0_start);
    last_pin = cfg.lattice.nearest(physics.x0_end);
    start.indices.front() = first_pin;
    start.indices.back() = last_pin;
  }

  LocalAscent ascent(bank, psi0, phi, std::move(start));
  if (cfg.pin_ends) {
    ascent.pin(0);
    ascent.pin(cfg.N - 1);
  }

  OptimizationTrace trace;
  trace.seed = cfg.seed;
  trace.T = bank.T();
  trace.fidelities.push_back(ascent.fidelity());
  for (std::size_t s = 0; s < cfg.max_sweeps; ++s) {
    const double before = trace.fidelities.back();
    auto stats = ascent.sweep(rng);
    trace.fidelities.insert(trace.fidelities.end(), stats.fidelities.begin(), stats.fidelities.end());
    trace.sweep_bounds.push_back(trace.fidelities.size() - 1);
    trace.updates += stats.changes;
    ++trace.sweeps;
    if (stats.changes == 0) {
      trace.converged = true;
      trace.stop_reason = StopReason::fixed_point;
      break;
    }
    if (cfg.tolerance > 0.0 && trace.fidelities.back() - before <= cfg.tolerance) {
      trace.stop_reason = StopReason::tolerance;
      break;
    }
  }
  trace.final_protocol = ascent.protocol();
  trace.final_fidelity = ascent.fidelity();
  trace.evaluations = ascent.evaluations();
  return trace;
}

EnsembleSummary summarize(const std::vector<OptimizationTrace>& traces)
{
  EnsembleSummary s;
  s.runs = traces.size();
  if (traces.empty()) {
    return s;
  }
  std::vector<double> f;
  std::set<std::vector<std::size_t>> protocols;
  for (const auto& t : traces) {
    f.push_back(t.final_fidelity);
    s.converged += t.converged ? 1 : 0;
    s.max_sweeps_used = std::max(s.max_sweeps_used, t.sweeps);
    protocols.insert(t.final_protocol.indices);
  }
  std::sort(f.begin(), f.end());
  s.min_fidelity = f.front();
  s.max_fidelity = f.back();
  const std::size_t m = f.size() / 2;
  s.median_fidelity = f.size() % 2 == 1 ? f[m] : 0.5 * (f[m - 1] + f[m]);
  s.relative_spread = s.max_fidelity > 0.0 ? (s.max_fidelity - s.min_fidelity) / s.max_fidelity : 0.0;
  s.distinct_protocols = protocols.size();
  return s;
}

EnsembleResult run_ensemble(std::size_t n_seeds, const OptimizerConfig& base, const UnitaryBank& bank,
                            const WaveFunction& psi0, const WaveFunction& phi, unsigned threads)
{
  if (n_seeds < 1) {
    throw DomainError("ensemble needs at least one seed");
  }
  base.validate();
  bank.spectra().ensure_all();
  EnsembleResult out;
  out.traces.resize(n_seeds);
  parallel_for(
      n_seeds,
      [&](std::size_t i) {
        OptimizerConfig cfg = base;
        cfg.seed = base.seed + i;
        out.traces[i] = optimize(cfg, bank, psi0, phi);
      },
      threads);
  out.summary = summarize(out.traces);
  return out;
}

} // namespace qmoves
