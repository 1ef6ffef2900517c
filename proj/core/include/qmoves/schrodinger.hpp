#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "qmoves/physics_config.hpp"

namespace qmoves {

/// Uniform grid x_i = x_min + i*dx, i = 0..n-1, with hard walls just outside both ends.
struct SpatialGrid {
  double x_min = 0.0;
  double dx = 1.0;
  std::size_t n = 0;

  static SpatialGrid from_config(const PhysicsConfig& cfg);

  double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }
  double x_max() const { return x(n - 1); }
  std::vector<double> points() const;

  bool operator==(const SpatialGrid&) const = default;
};

/// Real symmetric tridiagonal H = p^2/2m + V on the grid (second-order central differences).
struct HamiltonianMatrix {
  Eigen::VectorXd diagonal;
  Eigen::VectorXd off_diagonal; // size n-1, every entry -hbar^2/(2 m dx^2)
  double x0 = 0.0;

  Eigen::MatrixXd dense() const;
};

/// Eigenpairs in ascending order. Eigenvectors are orthonormal columns in the plain
/// Euclidean inner product (not scaled by dx).
struct SpectralDecomposition {
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;

  std::size_t size() const { return static_cast<std::size_t>(energies.size()); }
};

/// Complex amplitudes on a grid, normalized so that sum |psi_i|^2 dx = 1.
class WaveFunction {
public:
  WaveFunction() = default;
  WaveFunction(SpatialGrid grid, Eigen::VectorXcd amplitudes);

  /// Rescales to unit norm; throws NumericError on a zero vector.
  static WaveFunction normalized(SpatialGrid grid, Eigen::VectorXcd amplitudes);

  const SpatialGrid& grid() const { return grid_; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  Eigen::VectorXcd& amplitudes() { return amplitudes_; }
  std::size_t size() const { return static_cast<std::size_t>(amplitudes_.size()); }

  double norm_squared() const;
  std::vector<double> density() const;

private:
  SpatialGrid grid_;
  Eigen::VectorXcd amplitudes_;
};

struct GroundState {
  double energy = 0.0;
  WaveFunction psi;
};

struct DensityProfile {
  std::vector<double> density; // n_i = |psi_i|^2
  std::vector<double> cdf;     // trapezoidal cumulative integral of n
};

HamiltonianMatrix build_hamiltonian(double x0, const PhysicsConfig& cfg);

/// Tridiagonal Hamiltonian for an arbitrary potential sampled on `grid`.
HamiltonianMatrix hamiltonian_from_potential(const SpatialGrid& grid, std::span<const double> potential,
                                             double mass, double hbar);

/// Lowest `n_states` eigenpairs of `h` (all of them when n_states == 0).
SpectralDecomposition diagonalize(const HamiltonianMatrix& h, std::size_t n_states = 0);

SpectralDecomposition spectral_decomposition(double x0, const PhysicsConfig& cfg, std::size_t n_states);

/// Lowest eigenpair, normalized with dx and sign-fixed so the amplitude at the density
/// maximum is positive.
GroundState ground_state(double x0, const PhysicsConfig& cfg);
GroundState ground_state(const HamiltonianMatrix& h, const SpatialGrid& grid);

/// Ground state of the static tweezer alone (no moving tweezer).
GroundState static_well_ground_state(const PhysicsConfig& cfg);

DensityProfile density_and_cdf(const WaveFunction& psi);

/// Central differences in the interior, one-sided first-order at both ends.
std::vector<double> grid_derivative(std::span<const double> f, double dx);

} // namespace qmoves
