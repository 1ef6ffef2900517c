#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "qmoves/errors.hpp"
#include "qmoves/schrodinger.hpp"

using namespace qmoves;

namespace {

PhysicsConfig single_well()
{
  PhysicsConfig c;
  c.B = 0.0;
  return c;
}

// A = 1e4, sigma = 1: harmonic length 0.1 against a Gaussian width of 1, so the
// quartic correction to E0 is about 1e-5 relative.
PhysicsConfig harmonic_well()
{
  PhysicsConfig c;
  c.A = 1e4;
  c.B = 0.0;
  c.sigma = 1.0;
  c.x_min = -5.0;
  c.x_max = 5.0;
  c.n_x = 2048;
  c.x0_start = 0.5;
  c.x0_end = -0.5;
  return c;
}

// Continuum limit of the single-well (A = 160, sigma = 1/8) ground energy:
// Richardson extrapolation of 2048- and 4096-point grids with scipy's eigh_tridiagonal.
constexpr double kSingleWellE0Continuum = -115.44490;
// Same for the joint ground state at x0 = 0.55 with the static well B = 130 at 0.
constexpr double kJointE0Continuum = -115.59999;

} // namespace

TEST_CASE("config validation names the violated invariant")
{
  PhysicsConfig c;
  CHECK_NOTHROW(c.validate());
  c.A = 0.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = PhysicsConfig{};
  c.n_x = 32;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = PhysicsConfig{};
  c.x0_end = c.x0_start;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = PhysicsConfig{};
  c.x_max = 0.8; // does not contain x0_start + 4 sigma
  CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("hamiltonian entries")
{
  const auto cfg = single_well();
  const auto grid = SpatialGrid::from_config(cfg);
  const double x0 = grid.x(256);
  const auto h = build_hamiltonian(x0, cfg);
  const double hop = 1.0 / (2.0 * grid.dx * grid.dx);

  REQUIRE(h.off_diagonal.size() == static_cast<Eigen::Index>(grid.n - 1));
  for (Eigen::Index i = 0; i < h.off_diagonal.size(); ++i) {
    CHECK(h.off_diagonal(i) == -hop);
  }
  CHECK(h.diagonal.minCoeff() == doctest::Approx(-160.0 + 2.0 * hop).epsilon(1e-14));
  const auto H = h.dense();
  CHECK(H == H.transpose());
  CHECK((H - oracle::dense_hamiltonian(x0, cfg)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("hamiltonian is mirror symmetric when both wells sit at the origin")
{
  PhysicsConfig cfg;
  const auto h = build_hamiltonian(0.0, cfg);
  // grid coordinates x_min + i dx mirror only up to rounding
  CHECK((h.diagonal - h.diagonal.reverse()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("two-gaussian potential at the static well")
{
  PhysicsConfig cfg;
  const double mover = -160.0 * std::exp(-0.55 * 0.55 / (2.0 * 0.125 * 0.125));
  CHECK(std::abs(mover) < 0.02);
  CHECK(cfg.potential(0.0, 0.55) == doctest::Approx(mover - 130.0).epsilon(1e-14));
  CHECK(cfg.potential(0.0, 0.55) == doctest::Approx(-130.0).epsilon(2e-4));
}

TEST_CASE("tweezer outside the grid is a domain error")
{
  PhysicsConfig cfg;
  CHECK_THROWS_AS(build_hamiltonian(2.5, cfg), DomainError);
  CHECK_THROWS_AS(ground_state(-2.01, cfg), DomainError);
}

TEST_CASE("single-well ground state against the continuum limit")
{
  const auto gs = ground_state(0.0, single_well());
  CHECK(std::abs(gs.energy - kSingleWellE0Continuum) / std::abs(kSingleWellE0Continuum) < 2e-4);
  CHECK(gs.psi.norm_squared() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("joint ground state against the continuum limit")
{
  const auto gs = ground_state(0.55, PhysicsConfig{});
  CHECK(std::abs(gs.energy - kJointE0Continuum) / std::abs(kJointE0Continuum) < 2e-4);
}

TEST_CASE("harmonic regime: E0 = -A + hbar omega / 2 and E1 - E0 = hbar omega")
{
  const auto cfg = harmonic_well();
  const double omega = cfg.omega();
  CHECK(omega == doctest::Approx(100.0));
  const auto spec = spectral_decomposition(0.0, cfg, 2);
  CHECK(spec.energies(0) == doctest::Approx(-cfg.A + 0.5 * omega).epsilon(1e-4));
  CHECK(spec.energies(1) - spec.energies(0) == doctest::Approx(omega).epsilon(1e-2));
}

TEST_CASE("ground state is nodeless, real and positive")
{
  const auto gs = ground_state(0.55, PhysicsConfig{});
  const auto& a = gs.psi.amplitudes();
  CHECK(a.imag().cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.real().minCoeff() >= 0.0);
}

TEST_CASE("spectral decomposition")
{
  PhysicsConfig cfg;
  cfg.n_x = 96;
  const auto spec = spectral_decomposition(0.3, cfg, cfg.n_x);
  const auto n = static_cast<Eigen::Index>(cfg.n_x);
  REQUIRE(spec.energies.size() == n);

  SUBCASE("ascending and orthonormal")
  {
    for (Eigen::Index i = 1; i < n; ++i) {
      CHECK(spec.energies(i) >= spec.energies(i - 1));
    }
    const Eigen::MatrixXd gram = spec.vectors.transpose() * spec.vectors;
    CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("eigenvalues match a dense solver")
  {
    const auto ref = oracle::dense_eigen(oracle::dense_hamiltonian(0.3, cfg));
    CHECK((spec.energies - ref.energies).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("reconstruction reproduces H")
  {
    const Eigen::MatrixXd H = spec.vectors * spec.energies.asDiagonal() * spec.vectors.transpose();
    CHECK((H - build_hamiltonian(0.3, cfg).dense()).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("lowest pair equals the ground state")
  {
    const auto gs = ground_state(0.3, cfg);
    CHECK(gs.energy == doctest::Approx(spec.energies(0)).epsilon(1e-12));
    Eigen::VectorXd v = spec.vectors.col(0) / std::sqrt(SpatialGrid::from_config(cfg).dx);
    if (v.sum() < 0.0) {
      v = -v;
    }
    CHECK((gs.psi.amplitudes().real() - v).cwiseAbs().maxCoeff() < 1e-9);
    const auto ref = oracle::dense_ground(0.3, cfg);
    CHECK((gs.psi.amplitudes() - ref).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("partial spectrum")
  {
    const auto low = spectral_decomposition(0.3, cfg, 5);
    REQUIRE(low.size() == 5);
    CHECK((low.energies - spec.energies.head(5)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("density and cumulative distribution")
{
  PhysicsConfig cfg;
  cfg.n_x = 513; // puts a grid point at x = 0
  const auto gs = ground_state(0.0, cfg);
  const auto d = density_and_cdf(gs.psi);
  CHECK(d.cdf.front() == 0.0);
  CHECK(d.cdf.back() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(d.cdf[256] == doctest::Approx(0.5).epsilon(1e-8));
  for (std::size_t i = 1; i < d.cdf.size(); ++i) {
    CHECK(d.cdf[i] >= d.cdf[i - 1]);
  }
}

TEST_CASE("E0 decreases as the moving tweezer deepens")
{
  PhysicsConfig cfg;
  double last = 0.0;
  for (double A : {120.0, 160.0, 200.0}) {
    cfg.A = A;
    const double e = ground_state(0.55, cfg).energy;
    if (A > 120.0) {
      CHECK(e < last);
    }
    last = e;
  }
}

TEST_CASE("doubling the grid moves E0 by less than 1e-4 relative")
{
  PhysicsConfig coarse;
  PhysicsConfig fine;
  fine.n_x = 2 * coarse.n_x;
  const double e1 = ground_state(coarse.x0_start, coarse).energy;
  const double e2 = ground_state(coarse.x0_start, fine).energy;
  CHECK(std::abs(e2 - e1) / std::abs(e1) < 1e-4);
}

TEST_CASE("single-tweezer density is translation covariant")
{
  const auto cfg = single_well();
  const auto grid = SpatialGrid::from_config(cfg);
  const std::size_t shift = 12;
  const auto n0 = ground_state(grid.x(255), cfg).psi.density();
  const auto n1 = ground_state(grid.x(255 + shift), cfg).psi.density();
  double worst = 0.0;
  for (std::size_t i = 0; i + shift < grid.n; ++i) {
    worst = std::max(worst, std::abs(n1[i + shift] - n0[i]));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("grid derivative")
{
  const std::vector<double> f{0.0, 1.0, 4.0, 9.0, 16.0};
  const auto d = grid_derivative(f, 1.0);
  CHECK(d[2] == doctest::Approx(4.0));
  CHECK(d[0] == doctest::Approx(1.0));
  CHECK(d[4] == doctest::Approx(7.0));
}

TEST_CASE("static well ground state sits on the static tweezer")
{
  PhysicsConfig cfg;
  const auto gs = static_well_ground_state(cfg);
  const auto n = gs.psi.density();
  const auto grid = SpatialGrid::from_config(cfg);
  const auto imax = static_cast<std::size_t>(std::max_element(n.begin(), n.end()) - n.begin());
  CHECK(std::abs(grid.x(imax) - cfg.x_B) <= grid.dx);
}
