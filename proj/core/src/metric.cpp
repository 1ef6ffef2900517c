#include <algorithm>
#include <cmath>
#include <string>

#include "qmoves/errors.hpp"
#include "qmoves/parallel.hpp"
#include "qmoves/protocol_kit.hpp"

namespace qmoves {

double metric_sqrt(double x0, const PhysicsConfig& cfg)
{
  const auto grid = SpatialGrid::from_config(cfg);
  const double delta = grid.dx;
  const auto n_plus = ground_state(x0 + delta, cfg).psi.density();
  const auto n_minus = ground_state(x0 - delta, cfg).psi.density();
  const auto n_here = ground_state(x0, cfg).psi.density();
  const auto dn_dx = grid_derivative(n_here, grid.dx);

  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double dn_dx0 = (n_plus[i] - n_minus[i]) / (2.0 * delta);
    num += -dn_dx0 * dn_dx[i];
    den += dn_dx[i] * dn_dx[i];
  }
  if (!(den > 0.0)) {
    throw NumericError("flat ground-state density; metric undefined");
  }
  return num / den;
}

double metric(double x0, const PhysicsConfig& cfg)
{
  const double s = metric_sqrt(x0, cfg);
  return s * s;
}

MetricTable::MetricTable(std::vector<double> x0, std::vector<double> g, Interpolation interp)
    : x0_(std::move(x0)), g_(std::move(g)), interp_(interp)
{
  if (x0_.size() != g_.size() || x0_.size() < 2) {
    throw DomainError("metric table needs matching x0/g samples, at least two");
  }
  for (std::size_t k = 1; k < x0_.size(); ++k) {
    if (!(x0_[k] > x0_[k - 1])) {
      throw DomainError("metric table x0 samples must strictly increase");
    }
  }
  for (double v : g_) {
    if (!(v > 0.0)) {
      throw NumericError("metric table holds a non-positive g");
    }
  }

  // Natural cubic spline: tridiagonal solve for the second derivatives.
  const std::size_t n = x0_.size();
  second_.assign(n, 0.0);
  if (interp_ == Interpolation::cubic && n > 2) {
    std::vector<double> c(n, 0.0);
    std::vector<double> d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x0_[i] - x0_[i - 1];
      const double h1 = x0_[i + 1] - x0_[i];
      const double a = h0 / 6.0;
      const double b = (h0 + h1) / 3.0;
      const double cc = h1 / 6.0;
      const double rhs = (g_[i + 1] - g_[i]) / h1 - (g_[i] - g_[i - 1]) / h0;
      const double denom = b - a * c[i - 1];
      c[i] = cc / denom;
      d[i] = (rhs - a * d[i - 1]) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      second_[i] = d[i] - c[i] * second_[i + 1];
    }
  }
}

MetricTable MetricTable::flat(double lo, double hi, double g, std::size_t samples)
{
  std::vector<double> x(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    x[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(samples - 1);
  }
  return MetricTable(std::move(x), std::vector<double>(samples, g), Interpolation::linear);
}

double MetricTable::g(double x0) const
{
  if (x0 <= x0_.front()) {
    return g_.front();
  }
  if (x0 >= x0_.back()) {
    return g_.back();
  }
  const auto it = std::upper_bound(x0_.begin(), x0_.end(), x0);
  const auto k = static_cast<std::size_t>(it - x0_.begin());
  const double h = x0_[k] - x0_[k - 1];
  const double a = (x0_[k] - x0) / h;
  const double b = 1.0 - a;
  double value = a * g_[k - 1] + b * g_[k];
  if (interp_ == Interpolation::cubic) {
    value += ((a * a * a - a) * second_[k - 1] + (b * b * b - b) * second_[k]) * h * h / 6.0;
  }
  return value;
}

double MetricTable::sqrt_g(double x0) const { return std::sqrt(std::max(g(x0), 0.0)); }

MetricTable build_metric_table(const PhysicsConfig& cfg, double x0_min, double x0_max, std::size_t n_samples,
                               Interpolation interp)
{
  if (n_samples < 32) {
    throw DomainError("metric table needs at least 32 samples");
  }
  if (!(x0_min < x0_max)) {
    throw DomainError("metric table range must be increasing");
  }
  std::vector<double> x(n_samples);
  std::vector<double> g(n_samples);
  std::vector<double> sqrt_g(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    x[k] = x0_min + (x0_max - x0_min) * static_cast<double>(k) / static_cast<double>(n_samples - 1);
  }
  parallel_for(n_samples, [&](std::size_t k) { sqrt_g[k] = metric_sqrt(x[k], cfg); });
  for (std::size_t k = 0; k < n_samples; ++k) {
    if (!(sqrt_g[k] > 0.0)) {
      throw NumericError("non-positive sqrt(g) = " + std::to_string(sqrt_g[k]) + " at x0 = " + std::to_string(x[k]) +
                         "; density derivative under-resolved");
    }
    g[k] = sqrt_g[k] * sqrt_g[k];
  }
  return MetricTable(std::move(x), std::move(g), interp);
}

} // namespace qmoves
