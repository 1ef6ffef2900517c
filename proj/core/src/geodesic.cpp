#include <algorithm>
#include <cmath>

#include "qmoves/errors.hpp"
#include "qmoves/protocol_kit.hpp"

namespace qmoves {
namespace {

// Cumulative arclength S(x) = int sqrt(g) dx on a uniform quadrature grid.
class Arclength {
public:
  Arclength(const MetricTable& table, std::size_t points)
      : table_(table), lo_(table.x0_min()), h_((table.x0_max() - table.x0_min()) / static_cast<double>(points - 1)), s_(points)
  {
    double prev = table.sqrt_g(lo_);
    s_[0] = 0.0;
    for (std::size_t i = 1; i < points; ++i) {
      // Simpson on each cell keeps the cubic-spline metric accurate at coarse resolution.
      const double x = lo_ + h_ * static_cast<double>(i);
      const double mid = table.sqrt_g(x - 0.5 * h_);
      const double here = table.sqrt_g(x);
      s_[i] = s_[i - 1] + h_ * (prev + 4.0 * mid + here) / 6.0;
      prev = here;
    }
  }

  double at(double x) const
  {
    x = std::clamp(x, lo_, lo_ + h_ * static_cast<double>(s_.size() - 1));
    const auto i = std::min(static_cast<std::size_t>((x - lo_) / h_), s_.size() - 2);
    const double xi = lo_ + h_ * static_cast<double>(i);
    const double w = x - xi;
    if (w <= 0.0) {
      return s_[i];
    }
    return s_[i] + w * (table_.sqrt_g(xi) + 4.0 * table_.sqrt_g(xi + 0.5 * w) + table_.sqrt_g(x)) / 6.0;
  }

  // Linear guess from the table, then Newton on S(x) = s with S' = sqrt(g).
  double inverse(double s) const
  {
    s = std::clamp(s, s_.front(), s_.back());
    const auto it = std::lower_bound(s_.begin(), s_.end(), s);
    if (it == s_.begin()) {
      return lo_;
    }
    const auto i = static_cast<std::size_t>(it - s_.begin());
    const double w = (s - s_[i - 1]) / (s_[i] - s_[i - 1]);
    const double a = lo_ + h_ * static_cast<double>(i - 1);
    double x = a + h_ * w;
    for (int k = 0; k < 3; ++k) {
      x = std::clamp(x - (at(x) - s) / table_.sqrt_g(x), a, a + h_);
    }
    return x;
  }

private:
  const MetricTable& table_;
  double lo_;
  double h_;
  std::vector<double> s_;
};

// Distance D covered by a constant-acceleration ramp of duration tau that ends at
// speed c / sqrt(g(x_from + dir*D)). Returns a negative value if no solution within L.
// Across a metric peak the equation can have several roots; the ramp stops at the first.
double ramp_distance(const MetricTable& table, double x_from, double dir, double c, double tau, double L)
{
  auto h = [&](double D) { return D - c * tau / (2.0 * table.sqrt_g(x_from + dir * D)); };
  constexpr int kScan = 1024;
  double lo = 0.0;
  double hi = -1.0;
  for (int i = 1; i <= kScan; ++i) {
    const double D = L * i / kScan;
    if (h(D) >= 0.0) {
      hi = D;
      break;
    }
    lo = D;
  }
  if (hi < 0.0) {
    return -1.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * L; ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

Protocol geodesic_protocol(const MetricTable& table, double T, const PhysicsConfig& cfg, const GeodesicOptions& opts)
{
  const double f = opts.ramp_fraction;
  if (!(f > 0.0 && f < 0.5)) {
    throw DomainError("ramp_fraction must lie in (0, 0.5)");
  }
  if (!(T > 0.0)) {
    throw DomainError("geodesic duration must be > 0");
  }
  if (opts.samples < 3 || opts.quadrature_points < 16) {
    throw DomainError("geodesic needs at least 3 samples and 16 quadrature points");
  }
  const double x_start = cfg.x0_start;
  const double x_end = cfg.x0_end;
  if (std::min(x_start, x_end) < table.x0_min() || std::max(x_start, x_end) > table.x0_max()) {
    throw DomainError("transport endpoints lie outside the metric table range");
  }

  const Arclength arc(table, opts.quadrature_points);
  const double dir = x_end > x_start ? 1.0 : -1.0;
  const double L = std::abs(x_end - x_start);
  const double tau = f * T;
  const double t_interior = T - 2.0 * tau;

  struct Joins {
    bool ok = false;
    double x1 = 0.0;
    double x2 = 0.0;
  };
  auto joins = [&](double c) {
    Joins j;
    const double d1 = ramp_distance(table, x_start, dir, c, tau, L);
    const double d2 = ramp_distance(table, x_end, -dir, c, tau, L);
    if (d1 < 0.0 || d2 < 0.0 || d1 + d2 > L) {
      return j;
    }
    j.ok = true;
    j.x1 = x_start + dir * d1;
    j.x2 = x_end - dir * d2;
    return j;
  };
  // Interior travel time minus the interior budget; decreasing in c, infeasible counts as "too fast".
  auto excess_time = [&](double c) {
    const auto j = joins(c);
    if (!j.ok) {
      return -1.0;
    }
    return std::abs(arc.at(j.x2) - arc.at(j.x1)) / c - t_interior;
  };

  const double total_arc = std::abs(arc.at(x_end) - arc.at(x_start));
  double lo = 0.0;
  double hi = 4.0 * total_arc / t_interior;
  while (excess_time(hi) > 0.0) {
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess_time(mid) > 0.0 ? lo : hi) = mid;
  }
  const double c = 0.5 * (lo + hi);
  const auto j = joins(c);
  // The bisection can also land on a jump of excess_time (the first ramp root jumping across
  // a metric peak); then there is no continuous match for this ramp fraction.
  if (!j.ok || std::abs(excess_time(c)) > 1e-9 * T) {
    throw NumericError("geodesic ramp matching failed; try a smaller ramp_fraction");
  }
  const double a1 = c / table.sqrt_g(j.x1) / tau;
  const double a2 = c / table.sqrt_g(j.x2) / tau;
  const double s1 = arc.at(j.x1);

  const std::size_t n = opts.samples;
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = T * static_cast<double>(k) / static_cast<double>(n - 1);
    if (t <= tau) {
      x[k] = x_start + dir * 0.5 * a1 * t * t;
    } else if (t >= T - tau) {
      const double r = T - t;
      x[k] = x_end - dir * 0.5 * a2 * r * r;
    } else {
      x[k] = arc.inverse(s1 + dir * c * (t - tau));
    }
  }
  x.front() = x_start;
  x.back() = x_end;
  return Protocol::uniform(T, std::move(x), ProtocolKind::geodesic);
}

} // namespace qmoves
