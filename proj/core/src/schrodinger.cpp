#include "qmoves/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <lapacke.h>

#include "qmoves/errors.hpp"

namespace qmoves {

SpatialGrid SpatialGrid::from_config(const PhysicsConfig& cfg)
{
  SpatialGrid g;
  g.x_min = cfg.x_min;
  g.n = cfg.n_x;
  g.dx = (cfg.x_max - cfg.x_min) / static_cast<double>(cfg.n_x - 1);
  return g;
}

std::vector<double> SpatialGrid::points() const
{
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x(i);
  }
  return xs;
}

Eigen::MatrixXd HamiltonianMatrix::dense() const
{
  const auto n = diagonal.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  h.diagonal() = diagonal;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    h(i, i + 1) = off_diagonal(i);
    h(i + 1, i) = off_diagonal(i);
  }
  return h;
}

WaveFunction::WaveFunction(SpatialGrid grid, Eigen::VectorXcd amplitudes)
    : grid_(grid), amplitudes_(std::move(amplitudes))
{
  if (static_cast<std::size_t>(amplitudes_.size()) != grid_.n) {
    throw ContractError("wave function size does not match its grid");
  }
}

WaveFunction WaveFunction::normalized(SpatialGrid grid, Eigen::VectorXcd amplitudes)
{
  const double n2 = amplitudes.squaredNorm() * grid.dx;
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw NumericError("cannot normalize a zero or non-finite wave function");
  }
  amplitudes /= std::sqrt(n2);
  return WaveFunction(grid, std::move(amplitudes));
}

double WaveFunction::norm_squared() const { return amplitudes_.squaredNorm() * grid_.dx; }

std::vector<double> WaveFunction::density() const
{
  std::vector<double> n(size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    n[i] = std::norm(amplitudes_(static_cast<Eigen::Index>(i)));
  }
  return n;
}

HamiltonianMatrix hamiltonian_from_potential(const SpatialGrid& grid, std::span<const double> potential,
                                             double mass, double hbar)
{
  if (potential.size() != grid.n) {
    throw ContractError("potential size does not match grid");
  }
  const double hop = -hbar * hbar / (2.0 * mass * grid.dx * grid.dx);
  const auto n = static_cast<Eigen::Index>(grid.n);
  HamiltonianMatrix h;
  h.diagonal.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h.diagonal(i) = potential[static_cast<std::size_t>(i)] - 2.0 * hop;
  }
  h.off_diagonal = Eigen::VectorXd::Constant(n - 1, hop);
  return h;
}

HamiltonianMatrix build_hamiltonian(double x0, const PhysicsConfig& cfg)
{
  if (x0 < cfg.x_min || x0 > cfg.x_max) {
    throw DomainError("tweezer position " + std::to_string(x0) + " outside grid bounds");
  }
  const auto grid = SpatialGrid::from_config(cfg);
  std::vector<double> v(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    v[i] = cfg.potential(grid.x(i), x0);
  }
  auto h = hamiltonian_from_potential(grid, v, cfg.mass, cfg.hbar);
  h.x0 = x0;
  return h;
}

SpectralDecomposition diagonalize(const HamiltonianMatrix& h, std::size_t n_states)
{
  const auto n = static_cast<lapack_int>(h.diagonal.size());
  if (n_states > static_cast<std::size_t>(n)) {
    throw DomainError("requested more eigenstates than grid points");
  }
  const auto keep = static_cast<lapack_int>(n_states == 0 ? static_cast<std::size_t>(n) : n_states);

  // dstevr overwrites both bands; the off-diagonal buffer needs n entries.
  std::vector<double> d(h.diagonal.data(), h.diagonal.data() + n);
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  std::copy(h.off_diagonal.data(), h.off_diagonal.data() + (n - 1), e.begin());

  SpectralDecomposition out;
  out.energies.resize(n);
  out.vectors.resize(n, keep);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(keep));
  lapack_int found = 0;
  const char range = keep == n ? 'A' : 'I';
  const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', range, n, d.data(), e.data(), 0.0, 0.0, 1, keep,
                                         0.0, &found, out.energies.data(), out.vectors.data(), n, support.data());
  if (info != 0 || found != keep) {
    throw NumericError("tridiagonal eigensolver failed (dstevr info " + std::to_string(info) + ")");
  }
  out.energies.conservativeResize(keep);
  return out;
}

SpectralDecomposition spectral_decomposition(double x0, const PhysicsConfig& cfg, std::size_t n_states)
{
  if (n_states < 1 || n_states > cfg.n_x) {
    throw DomainError("n_states must lie in [1, n_x]");
  }
  return diagonalize(build_hamiltonian(x0, cfg), n_states);
}

GroundState ground_state(const HamiltonianMatrix& h, const SpatialGrid& grid)
{
  const auto spec = diagonalize(h, 1);
  Eigen::VectorXd v = spec.vectors.col(0);
  Eigen::Index peak = 0;
  v.cwiseAbs().maxCoeff(&peak);
  if (v(peak) < 0.0) {
    v = -v;
  }
  GroundState gs;
  gs.energy = spec.energies(0);
  gs.psi = WaveFunction::normalized(grid, v.cast<std::complex<double>>());
  return gs;
}

GroundState ground_state(double x0, const PhysicsConfig& cfg)
{
  return ground_state(build_hamiltonian(x0, cfg), SpatialGrid::from_config(cfg));
}

GroundState static_well_ground_state(const PhysicsConfig& cfg)
{
  const auto grid = SpatialGrid::from_config(cfg);
  PhysicsConfig only_static = cfg;
  only_static.A = 0.0;
  std::vector<double> v(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    v[i] = only_static.potential(grid.x(i), 0.0);
  }
  auto h = hamiltonian_from_potential(grid, v, cfg.mass, cfg.hbar);
  h.x0 = cfg.x_B;
  return ground_state(h, grid);
}

DensityProfile density_and_cdf(const WaveFunction& psi)
{
  DensityProfile out;
  out.density = psi.density();
  const double dx = psi.grid().dx;
  out.cdf.resize(out.density.size());
  double acc = 0.0;
  if (!out.cdf.empty()) {
    out.cdf[0] = 0.0;
  }
  for (std::size_t i = 1; i < out.cdf.size(); ++i) {
    acc += 0.5 * (out.density[i - 1] + out.density[i]) * dx;
    out.cdf[i] = acc;
  }
  return out;
}

std::vector<double> grid_derivative(std::span<const double> f, double dx)
{
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) {
    return d;
  }
  d[0] = (f[1] - f[0]) / dx;
  d[n - 1] = (f[n - 1] - f[n - 2]) / dx;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d[i] = (f[i + 1] - f[i - 1]) / (2.0 * dx);
  }
  return d;
}

} // namespace qmoves
