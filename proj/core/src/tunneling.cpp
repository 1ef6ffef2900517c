#include "qmoves/tunneling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qmoves/errors.hpp"
#include "qmoves/parallel.hpp"
#include "qmoves/schrodinger.hpp"

namespace qmoves {

PhysicsConfig resonant_double_well(const PhysicsConfig& cfg, double d)
{
  if (d < 0.0) {
    throw DomainError("well separation must be >= 0");
  }
  PhysicsConfig w = cfg;
  w.B = cfg.A;
  w.x_B = -0.5 * d;
  return w;
}

BarrierReport barrier_report(const PhysicsConfig& cfg, double d)
{
  const auto w = resonant_double_well(cfg, d);
  const double x0 = 0.5 * d;
  const auto grid = SpatialGrid::from_config(w);
  double v_min = w.potential(0.0, x0);
  for (std::size_t i = 0; i < grid.n; ++i) {
    v_min = std::min(v_min, w.potential(grid.x(i), x0));
  }
  BarrierReport r;
  r.barrier_top = w.potential(0.0, x0);
  r.barrier_height = r.barrier_top - v_min;
  r.E0 = ground_state(x0, w).energy;
  r.tunneling_regime = r.E0 < r.barrier_top;
  return r;
}

TunnelSample tunnel_sample(const PhysicsConfig& cfg, double d)
{
  const auto w = resonant_double_well(cfg, d);
  const double x0 = 0.5 * d;
  const auto grid = SpatialGrid::from_config(w);
  const auto spec = spectral_decomposition(x0, w, 2);

  TunnelSample s;
  s.d = d;
  s.E0 = spec.energies(0);
  s.E1 = spec.energies(1);
  s.splitting = std::max(s.E1 - s.E0, 0.0);
  s.coupling = 0.5 * s.splitting;
  s.transfer_time = s.splitting > 0.0 ? std::numbers::pi * w.hbar / s.splitting
                                      : std::numeric_limits<double>::infinity();

  double v_min = w.potential(0.0, x0);
  for (std::size_t i = 0; i < grid.n; ++i) {
    v_min = std::min(v_min, w.potential(grid.x(i), x0));
  }
  const double top = w.potential(0.0, x0);
  s.barrier_height = top - v_min;
  s.tunneling_regime = s.E0 < top;

  // Parity about x = 0: the grid is symmetric when x_min = -x_max.
  if (std::abs(w.x_min + w.x_max) < 1e-12 * (w.x_max - w.x_min)) {
    const auto v0 = spec.vectors.col(0);
    const auto v1 = spec.vectors.col(1);
    const double even = (v0 - v0.reverse()).norm();
    const double odd = (v1 + v1.reverse()).norm();
    s.parity_ok = even < 1e-6 && odd < 1e-6;
  }
  return s;
}

TunnelCurve tunnel_curve(const PhysicsConfig& cfg, const std::vector<double>& d_list)
{
  for (std::size_t i = 1; i < d_list.size(); ++i) {
    if (d_list[i] < d_list[i - 1]) {
      throw DomainError("separations must be ascending");
    }
  }
  TunnelCurve curve;
  curve.samples.resize(d_list.size());
  parallel_for(d_list.size(), [&](std::size_t i) { curve.samples[i] = tunnel_sample(cfg, d_list[i]); });
  return curve;
}

double max_tunnel_distance(const TunnelCurve& curve, double T_budget)
{
  const auto& s = curve.samples;
  if (s.empty()) {
    throw DomainError("empty tunnel curve");
  }
  if (s.front().transfer_time > T_budget) {
    throw DomainError("no separation in the curve transfers within the time budget");
  }
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i].transfer_time <= T_budget && s[i + 1].transfer_time > T_budget) {
      const double a = std::log(s[i].transfer_time);
      const double b = std::log(s[i + 1].transfer_time);
      const double u = (std::log(T_budget) - a) / (b - a);
      return s[i].d + u * (s[i + 1].d - s[i].d);
    }
  }
  return s.back().d;
}

DecayFit fit_decay(const TunnelCurve& curve, const PhysicsConfig& cfg, double d_lo, double d_hi)
{
  double sx = 0.0;
  double sy = 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  std::size_t n = 0;
  for (const auto& p : curve.samples) {
    if (p.d < d_lo - 1e-12 || p.d > d_hi + 1e-12 || !(p.splitting > 0.0)) {
      continue;
    }
    const double y = std::log(p.splitting);
    sx += p.d;
    sy += y;
    sxx += p.d * p.d;
    sxy += p.d * y;
    syy += y * y;
    ++n;
  }
  if (n < 3) {
    throw DomainError("decay fit needs at least three samples in the window");
  }
  const double nn = static_cast<double>(n);
  const double cov = sxy - sx * sy / nn;
  const double var_x = sxx - sx * sx / nn;
  const double var_y = syy - sy * sy / nn;

  PhysicsConfig single = cfg;
  single.B = 0.0;
  DecayFit fit;
  fit.points = n;
  fit.kappa = -cov / var_x;
  fit.r_squared = var_y > 0.0 ? cov * cov / (var_x * var_y) : 1.0;
  fit.single_well_E0 = ground_state(0.0, single).energy;
  fit.kappa_expected = std::sqrt(-2.0 * cfg.mass * fit.single_well_E0) / cfg.hbar;
  return fit;
}

} // namespace qmoves
