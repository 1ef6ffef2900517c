#include "qmoves/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "qmoves/errors.hpp"

namespace qmoves {

std::string_view to_string(ProtocolKind k)
{
  switch (k) {
  case ProtocolKind::cubic:
    return "cubic";
  case ProtocolKind::cd_single:
    return "cd_single";
  case ProtocolKind::geodesic:
    return "geodesic";
  case ProtocolKind::cd_double:
    return "cd_double";
  case ProtocolKind::optimized:
    return "optimized";
  case ProtocolKind::human:
    return "human";
  }
  return "human";
}

ProtocolKind protocol_kind_from_string(std::string_view s)
{
  for (auto k : {ProtocolKind::cubic, ProtocolKind::cd_single, ProtocolKind::geodesic, ProtocolKind::cd_double,
                 ProtocolKind::optimized, ProtocolKind::human}) {
    if (to_string(k) == s) {
      return k;
    }
  }
  throw DomainError("unknown protocol kind '" + std::string(s) + "'");
}

Protocol::Protocol(std::vector<double> times, std::vector<double> positions, ProtocolKind kind)
    : times_(std::move(times)), positions_(std::move(positions)), kind_(kind)
{
  if (times_.size() != positions_.size()) {
    throw DomainError("protocol times and positions differ in length");
  }
  if (times_.size() < 2) {
    throw DomainError("protocol needs at least two samples");
  }
  if (times_.front() != 0.0) {
    throw DomainError("protocol must start at t = 0");
  }
  if (!(times_.back() > 0.0)) {
    throw DomainError("protocol duration must be > 0");
  }
  for (std::size_t j = 1; j < times_.size(); ++j) {
    if (!(times_[j] > times_[j - 1])) {
      throw DomainError("protocol times must be strictly increasing");
    }
  }
  for (double x : positions_) {
    if (!std::isfinite(x)) {
      throw DomainError("protocol positions must be finite");
    }
  }
}

Protocol Protocol::uniform(double T, std::vector<double> positions, ProtocolKind kind)
{
  if (!(T > 0.0)) {
    throw DomainError("protocol duration must be > 0");
  }
  const std::size_t n = positions.size();
  if (n < 2) {
    throw DomainError("protocol needs at least two samples");
  }
  std::vector<double> t(n);
  for (std::size_t j = 0; j < n; ++j) {
    t[j] = T * static_cast<double>(j) / static_cast<double>(n - 1);
  }
  t.back() = T;
  return Protocol(std::move(t), std::move(positions), kind);
}

double Protocol::position(double t) const
{
  if (t <= 0.0) {
    return positions_.front();
  }
  if (t >= times_.back()) {
    return positions_.back();
  }
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto j = static_cast<std::size_t>(it - times_.begin());
  const double w = (t - times_[j - 1]) / (times_[j] - times_[j - 1]);
  return positions_[j - 1] + w * (positions_[j] - positions_[j - 1]);
}

double Protocol::min_position() const { return *std::min_element(positions_.begin(), positions_.end()); }

double Protocol::max_position() const { return *std::max_element(positions_.begin(), positions_.end()); }

std::vector<double> Protocol::velocities() const { return sample_derivative(times_, positions_); }

std::vector<double> Protocol::accelerations() const { return sample_derivative(times_, velocities()); }

void Protocol::require_within(double lo, double hi) const
{
  if (min_position() < lo || max_position() > hi) {
    throw DomainError("protocol leaves the admissible range [" + std::to_string(lo) + ", " + std::to_string(hi) +
                      "]");
  }
}

std::vector<double> sample_derivative(const std::vector<double>& t, const std::vector<double>& f)
{
  const std::size_t n = t.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) {
    return d;
  }
  if (n == 2) {
    d[0] = d[1] = (f[1] - f[0]) / (t[1] - t[0]);
    return d;
  }
  // Three-point Lagrange derivative; exact for quadratics on non-uniform samples.
  auto three_point = [&](std::size_t a, std::size_t b, std::size_t c, double at) {
    const double ta = t[a];
    const double tb = t[b];
    const double tc = t[c];
    // difference form: the weights sum to zero, so constants give exactly 0
    return (f[a] - f[b]) * ((at - tb) + (at - tc)) / ((ta - tb) * (ta - tc)) +
           (f[c] - f[b]) * ((at - ta) + (at - tb)) / ((tc - ta) * (tc - tb));
  };
  d[0] = three_point(0, 1, 2, t[0]);
  d[n - 1] = three_point(n - 3, n - 2, n - 1, t[n - 1]);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    d[j] = three_point(j - 1, j, j + 1, t[j]);
  }
  return d;
}

} // namespace qmoves
