#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "qmoves/optimizer.hpp"
#include "qmoves/propagation.hpp"
#include "qmoves/schrodinger.hpp"

using namespace qmoves;

namespace {

PhysicsConfig config_for(benchmark::State& state)
{
  PhysicsConfig cfg;
  cfg.n_x = static_cast<std::size_t>(state.range(0));
  return cfg;
}

// One built bank per grid size, shared across iterations.
std::shared_ptr<const SpectralBank> built_spectra(const PhysicsConfig& cfg)
{
  static std::map<std::size_t, std::shared_ptr<const SpectralBank>> cache;
  auto& s = cache[cfg.n_x];
  if (!s) {
    s = std::make_shared<const SpectralBank>(cfg, PositionLattice::standard(cfg), true);
  }
  return s;
}

void BM_GroundState(benchmark::State& state)
{
  const auto cfg = config_for(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ground_state(0.3, cfg).energy);
  }
}
BENCHMARK(BM_GroundState)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_FullDiagonalization(benchmark::State& state)
{
  const auto cfg = config_for(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectral_decomposition(0.3, cfg, cfg.n_x).energies(0));
  }
}
BENCHMARK(BM_FullDiagonalization)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

// Spectral factorizations for all 128 lattice positions.
void BM_BankBuild(benchmark::State& state)
{
  const auto cfg = config_for(state);
  const auto lattice = PositionLattice::standard(cfg);
  for (auto _ : state) {
    SpectralBank bank(cfg, lattice, true);
    benchmark::DoNotOptimize(bank.energies(0)(0));
  }
}
BENCHMARK(BM_BankBuild)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_StepApply(benchmark::State& state)
{
  const auto cfg = config_for(state);
  const UnitaryBank bank(built_spectra(cfg), 0.1, 400);
  Eigen::VectorXcd psi = transport_states(cfg).initial.amplitudes();
  std::size_t k = 0;
  for (auto _ : state) {
    bank.apply(k, psi);
    k = (k + 37) % bank.lattice().count;
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_StepApply)->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);

// Candidate fidelities for one optimizer visit: all 128 positions in one product.
void BM_LocalFidelities(benchmark::State& state)
{
  const auto cfg = config_for(state);
  const UnitaryBank bank(built_spectra(cfg), 0.1, 40);
  const auto states = transport_states(cfg);
  for (auto _ : state) {
    auto F = local_fidelities(bank, states.initial.amplitudes(), states.target.amplitudes());
    benchmark::DoNotOptimize(F.data());
  }
}
BENCHMARK(BM_LocalFidelities)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

// One full sweep at the ensemble settings (T = 0.1, N = 40, M = 128).
void BM_Sweep(benchmark::State& state)
{
  const auto cfg = config_for(state);
  const UnitaryBank bank(built_spectra(cfg), 0.1, 40);
  const auto states = transport_states(cfg);
  SplitMix64 rng(1);
  LocalAscent ascent(bank, states.initial, states.target, random_protocol(bank.lattice(), 40, rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ascent.sweep(rng).changes);
  }
}
BENCHMARK(BM_Sweep)->Arg(512)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
