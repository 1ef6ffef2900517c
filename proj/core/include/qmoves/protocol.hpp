#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qmoves {

enum class ProtocolKind { cubic, cd_single, geodesic, cd_double, optimized, human };

std::string_view to_string(ProtocolKind k);
ProtocolKind protocol_kind_from_string(std::string_view s);

/// Tweezer position x0(t) on [0, T], stored as samples with piecewise-linear interpolation.
class Protocol {
public:
  Protocol() = default;
  /// Throws DomainError unless times start at 0, end at T and strictly increase.
  Protocol(std::vector<double> times, std::vector<double> positions, ProtocolKind kind);

  /// Uniformly sampled protocol with `positions.size()` samples on [0, T].
  static Protocol uniform(double T, std::vector<double> positions, ProtocolKind kind);

  double duration() const { return times_.back(); }
  ProtocolKind kind() const { return kind_; }
  void set_kind(ProtocolKind k) { kind_ = k; }
  std::size_t size() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& positions() const { return positions_; }

  /// Piecewise-linear value; clamps t to [0, T].
  double position(double t) const;

  double min_position() const;
  double max_position() const;

  /// Derivatives on the samples: central differences inside, second-order one-sided at the ends.
  std::vector<double> velocities() const;
  std::vector<double> accelerations() const;

  /// Throws DomainError if any sample lies outside [lo, hi].
  void require_within(double lo, double hi) const;

private:
  std::vector<double> times_;
  std::vector<double> positions_;
  ProtocolKind kind_ = ProtocolKind::human;
};

/// d/dt of sampled values f(t_j) with the same stencil as Protocol::velocities.
std::vector<double> sample_derivative(const std::vector<double>& t, const std::vector<double>& f);

} // namespace qmoves
