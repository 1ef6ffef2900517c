#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

#include "oracles.hpp"
#include "qmoves/errors.hpp"
#include "qmoves/optimizer.hpp"

using namespace qmoves;

namespace {

PhysicsConfig tiny_config()
{
  PhysicsConfig c;
  c.n_x = 64;
  return c;
}

struct Instance {
  PhysicsConfig cfg;
  PositionLattice lattice;
  std::unique_ptr<UnitaryBank> bank;
  WaveFunction psi0;
  WaveFunction phi;
  DiscreteProtocol dp;
};

// N in [1, 6], M in [2, 8], random lattice spacing, duration and protocol.
Instance random_instance(SplitMix64& rng)
{
  Instance in;
  in.cfg = tiny_config();
  const std::size_t N = 1 + rng.bounded(6);
  const std::size_t M = 2 + rng.bounded(7);
  const double spacing = 0.02 + 0.1 * static_cast<double>(rng.bounded(1000)) / 1000.0;
  const double T = 0.01 + 0.2 * static_cast<double>(rng.bounded(1000)) / 1000.0;
  in.lattice = PositionLattice::centered(0.0, spacing, M);
  in.bank = std::make_unique<UnitaryBank>(build_bank(in.cfg, in.lattice, T, N, true));
  in.psi0 = ground_state(in.lattice.position(rng.bounded(M)), in.cfg).psi;
  in.phi = ground_state(in.lattice.position(rng.bounded(M)), in.cfg).psi;
  in.dp = random_protocol(in.lattice, N, rng);
  return in;
}

oracle::BruteForce brute_for(const Instance& in)
{
  return oracle::BruteForce(in.cfg, in.lattice.positions(), in.bank->dt());
}

} // namespace

TEST_CASE("splitmix64 reference outputs")
{
  SplitMix64 rng(0);
  CHECK(rng() == 0xE220A8397B1DCDAFULL);
  CHECK(rng() == 0x6E789E6AA1B965F4ULL);
  CHECK(rng() == 0x06C45D188009454FULL);
  CHECK(rng.counter() == 3);
  CHECK(SplitMix64::algorithm == "splitmix64");
}

TEST_CASE("bounded draws and permutations")
{
  SplitMix64 rng(42);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = rng.bounded(7);
    REQUIRE(v < 7);
    ++hist[v];
  }
  for (int h : hist) {
    CHECK(std::abs(h - 10000) < 500);
  }
  CHECK_THROWS_AS(rng.bounded(0), DomainError);
  for (std::size_t n : {1u, 2u, 40u}) {
    auto p = random_permutation(n, rng);
    std::sort(p.begin(), p.end());
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(p[i] == i);
    }
  }
}

TEST_CASE("local fidelities against brute-force re-evolution")
{
  SplitMix64 rng(2024);
  double worst = 0.0;
  for (int instance = 0; instance < 50; ++instance) {
    auto in = random_instance(rng);
    auto brute = brute_for(in);
    for (std::size_t w = 0; w < in.dp.steps(); ++w) {
      const auto F = local_fidelities(in.dp, w, *in.bank, in.psi0, in.phi);
      REQUIRE(F.size() == in.lattice.count);
      for (std::size_t k = 0; k < F.size(); ++k) {
        auto idx = in.dp.indices;
        idx[w] = k;
        worst = std::max(worst, std::abs(F[k] - brute.fidelity(idx, in.psi0.amplitudes(), in.phi.amplitudes())));
      }
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("single-step protocol")
{
  const auto cfg = tiny_config();
  const auto lat = PositionLattice::centered(0.0, 0.1, 8);
  const auto bank = build_bank(cfg, lat, 0.05, 1, true);
  const auto psi0 = ground_state(0.3, cfg).psi;
  const auto phi = ground_state(-0.3, cfg).psi;
  DiscreteProtocol dp{lat, {0}};
  const auto F = local_fidelities(dp, 0, bank, psi0, phi);
  for (std::size_t k = 0; k < lat.count; ++k) {
    dp.indices[0] = k;
    CHECK(std::abs(F[k] - *evolve(dp, bank, psi0, 0, &phi).fidelity) < 1e-12);
  }

  OptimizerConfig oc;
  oc.N = 1;
  oc.lattice = lat;
  oc.seed = 5;
  const auto trace = optimize(oc, bank, psi0, phi);
  CHECK(trace.final_fidelity == doctest::Approx(*std::max_element(F.begin(), F.end())).epsilon(1e-12));
  CHECK(trace.converged);
  CHECK(trace.sweeps <= 2);
}

TEST_CASE("entry at the incumbent equals the protocol fidelity")
{
  SplitMix64 rng(7);
  for (int i = 0; i < 10; ++i) {
    auto in = random_instance(rng);
    const double F = *evolve(in.dp, *in.bank, in.psi0, 0, &in.phi).fidelity;
    for (std::size_t w = 0; w < in.dp.steps(); ++w) {
      CHECK(std::abs(local_fidelities(in.dp, w, *in.bank, in.psi0, in.phi)[in.dp.indices[w]] - F) < 1e-10);
    }
  }
}

TEST_CASE("preferred index")
{
  CHECK(preferred_index({0.1, 0.5, 0.5, 0.2}, 0) == 1);
  CHECK(preferred_index({0.1, 0.5, 0.5, 0.2}, 2) == 2);
  CHECK(preferred_index({0.1, 0.5, 0.5 + 1e-14, 0.2}, 1) == 1);
  CHECK(preferred_index({0.3, 0.3, 0.3}, 1) == 1);
  CHECK(preferred_index({0.1, 0.2, 0.3}, 2) == 2);
}

TEST_CASE("sweeps replayed by a brute-force optimizer")
{
  SplitMix64 rng(99);
  for (int instance = 0; instance < 20; ++instance) {
    auto in = random_instance(rng);
    auto brute = brute_for(in);
    LocalAscent ascent(*in.bank, in.psi0, in.phi, in.dp);
    auto ref = in.dp.indices;
    SplitMix64 sweep_rng(static_cast<std::uint64_t>(instance));
    for (int s = 0; s < 4; ++s) {
      const auto stats = ascent.sweep(sweep_rng);
      // every step visited exactly once
      std::set<std::size_t> seen(stats.visited.begin(), stats.visited.end());
      CHECK(seen.size() == in.dp.steps());
      CHECK(stats.visited.size() == in.dp.steps());

      std::size_t changes = 0;
      for (std::size_t j = 0; j < stats.visited.size(); ++j) {
        const auto w = stats.visited[j];
        std::vector<double> F(in.lattice.count);
        for (std::size_t k = 0; k < F.size(); ++k) {
          auto idx = ref;
          idx[w] = k;
          F[k] = brute.fidelity(idx, in.psi0.amplitudes(), in.phi.amplitudes());
        }
        const double top = *std::max_element(F.begin(), F.end());
        if (top - F[ref[w]] > kFidelityTieTolerance) {
          std::size_t best = 0;
          while (F[best] < top - 0.5 * kFidelityTieTolerance) {
            ++best;
          }
          ref[w] = best;
          ++changes;
        }
        CHECK(std::abs(stats.fidelities[j] - F[ref[w]]) < 1e-10);
      }
      CHECK(stats.changes == changes);
      CHECK(ascent.protocol().indices == ref);
      CHECK(std::abs(ascent.fidelity() - brute.fidelity(ref, in.psi0.amplitudes(), in.phi.amplitudes())) < 1e-10);
    }
  }
}

TEST_CASE("converged protocols are fixed points")
{
  SplitMix64 rng(31337);
  int converged = 0;
  for (int instance = 0; instance < 20; ++instance) {
    auto in = random_instance(rng);
    OptimizerConfig oc;
    oc.N = in.dp.steps();
    oc.lattice = in.lattice;
    oc.seed = static_cast<std::uint64_t>(instance);
    const auto trace = optimize(oc, *in.bank, in.psi0, in.phi);
    for (std::size_t i = 1; i < trace.fidelities.size(); ++i) {
      CHECK(trace.fidelities[i] >= trace.fidelities[i - 1]);
    }
    if (!trace.converged) {
      continue;
    }
    ++converged;
    CHECK(trace.stop_reason == StopReason::fixed_point);
    auto brute = brute_for(in);
    const auto& best = trace.final_protocol.indices;
    const double F = brute.fidelity(best, in.psi0.amplitudes(), in.phi.amplitudes());
    CHECK(std::abs(F - trace.final_fidelity) < 1e-10);
    for (std::size_t w = 0; w < best.size(); ++w) {
      for (std::size_t k = 0; k < in.lattice.count; ++k) {
        auto idx = best;
        idx[w] = k;
        CHECK(brute.fidelity(idx, in.psi0.amplitudes(), in.phi.amplitudes()) <= F + kFidelityTieTolerance);
      }
    }
  }
  CHECK(converged >= 15);
}

TEST_CASE("sweep bookkeeping at N = 40, M = 128")
{
  const auto cfg = tiny_config();
  const auto lat = PositionLattice::standard(cfg);
  const auto bank = build_bank(cfg, lat, 0.1, 40, true);
  const auto states = transport_states(cfg);
  SplitMix64 rng(1);
  LocalAscent ascent(bank, states.initial, states.target, random_protocol(lat, 40, rng));
  const double before = ascent.fidelity();
  const auto stats = ascent.sweep(rng);
  CHECK(ascent.evaluations() == 5120);
  CHECK(ascent.fidelity() >= before);

  // a sweep that changes nothing leaves the protocol alone
  SplitMix64 again(2);
  LocalAscent settled(bank, states.initial, states.target, ascent.protocol());
  for (int s = 0; s < 50; ++s) {
    if (settled.sweep(again).changes == 0) {
      break;
    }
  }
  const auto fixed = settled.protocol();
  CHECK(settled.sweep(again).changes == 0);
  CHECK(settled.protocol().indices == fixed.indices);
}

TEST_CASE("optimize")
{
  const auto cfg = tiny_config();
  const auto lat = PositionLattice::standard(cfg);
  const std::size_t N = 12;
  const auto bank = build_bank(cfg, lat, 0.1, N, true);
  const auto states = transport_states(cfg);
  OptimizerConfig oc;
  oc.N = N;
  oc.lattice = lat;
  oc.seed = 11;

  SUBCASE("reproducible by seed")
  {
    const auto a = optimize(oc, bank, states.initial, states.target);
    const auto b = optimize(oc, bank, states.initial, states.target);
    CHECK(a.fidelities == b.fidelities);
    CHECK(a.final_protocol.indices == b.final_protocol.indices);
    CHECK(a.rng == "splitmix64");
    CHECK(a.sweep_bounds.size() == a.sweeps);
    CHECK(a.sweep_bounds.back() == a.fidelities.size() - 1);
    CHECK(a.fidelities.size() == 1 + a.sweeps * N);
    CHECK(a.final_fidelity == doctest::Approx(a.fidelities.back()).epsilon(1e-10));
  }
  SUBCASE("pinned ends stay put")
  {
    oc.pin_ends = true;
    const auto t = optimize(oc, bank, states.initial, states.target);
    CHECK(t.final_protocol.indices.front() == lat.nearest(cfg.x0_start));
    CHECK(t.final_protocol.indices.back() == lat.nearest(cfg.x0_end));
    CHECK(t.fidelities.size() == 1 + t.sweeps * (N - 2));
  }
  SUBCASE("max_sweeps and tolerance")
  {
    oc.max_sweeps = 1;
    const auto t = optimize(oc, bank, states.initial, states.target);
    CHECK(t.sweeps == 1);
    if (!t.converged) {
      CHECK(t.stop_reason == StopReason::max_sweeps);
    }
    oc.max_sweeps = 200;
    oc.tolerance = 1.0;
    const auto u = optimize(oc, bank, states.initial, states.target);
    CHECK(u.sweeps == 1);
  }
  SUBCASE("mismatched bank")
  {
    oc.N = N + 1;
    CHECK_THROWS_AS(optimize(oc, bank, states.initial, states.target), ContractError);
    oc.N = N;
    oc.max_sweeps = 0;
    CHECK_THROWS_AS(optimize(oc, bank, states.initial, states.target), DomainError);
  }
}

TEST_CASE("ensemble")
{
  const auto cfg = tiny_config();
  const auto lat = PositionLattice::standard(cfg);
  const std::size_t N = 10;
  const auto bank = build_bank(cfg, lat, 0.1, N, true);
  const auto states = transport_states(cfg);
  OptimizerConfig oc;
  oc.N = N;
  oc.lattice = lat;
  oc.seed = 100;
  const auto a = run_ensemble(6, oc, bank, states.initial, states.target);
  const auto b = run_ensemble(6, oc, bank, states.initial, states.target, 1);
  REQUIRE(a.traces.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(a.traces[i].seed == 100 + i);
    CHECK(a.traces[i].fidelities == b.traces[i].fidelities);
  }
  const auto& s = a.summary;
  CHECK(s.runs == 6);
  CHECK(s.min_fidelity <= s.median_fidelity);
  CHECK(s.median_fidelity <= s.max_fidelity);
  CHECK(s.relative_spread == doctest::Approx((s.max_fidelity - s.min_fidelity) / s.max_fidelity));
  CHECK_THROWS_AS(run_ensemble(0, oc, bank, states.initial, states.target), DomainError);
}
