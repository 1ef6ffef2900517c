#pragma once

#include <cstddef>
#include <string_view>

namespace qmoves {

enum class InitialState {
  joint_ground,       // ground state of both tweezers with the mover at x0_start
  static_well_ground, // ground state of the static tweezer alone
};

std::string_view to_string(InitialState s);
InitialState initial_state_from_string(std::string_view s);

/// Physical parameters and grid settings, dimensionless with hbar = m = 1 by default.
///
/// The moving tweezer has depth `A` and sits at the controlled position x0; the static
/// tweezer has depth `B` and sits at `x_B`. Both are Gaussians of width `sigma`.
struct PhysicsConfig {
  double mass = 1.0;
  double hbar = 1.0;
  double A = 160.0;
  double B = 130.0;
  double sigma = 0.125;
  double x_B = 0.0;
  double x_min = -2.0;
  double x_max = 2.0;
  std::size_t n_x = 512;
  double x0_start = 0.55;
  double x0_end = -0.55;
  InitialState initial_state = InitialState::joint_ground;

  /// Throws DomainError naming the first violated invariant.
  void validate() const;

  double transport_distance() const;
  /// Harmonic frequency of the moving tweezer, sqrt(A/m)/sigma.
  double omega() const;
  double omega_squared() const;

  /// Two-Gaussian potential at position x for a mover at x0.
  double potential(double x, double x0) const;

  bool operator==(const PhysicsConfig&) const = default;
};

} // namespace qmoves
