#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qmoves/errors.hpp"
#include "qmoves/protocol_kit.hpp"

using namespace qmoves;

namespace {

PhysicsConfig single_well()
{
  PhysicsConfig c;
  c.B = 0.0;
  return c;
}

double sup_distance(const Protocol& a, const Protocol& b)
{
  double worst = 0.0;
  const double T = a.duration();
  for (int k = 0; k <= 2000; ++k) {
    const double t = T * k / 2000.0;
    worst = std::max(worst, std::abs(a.position(t) - b.position(t)));
  }
  return worst;
}

// Default-geometry metric table, shared by several cases (about 200 ground-state solves).
const MetricTable& default_table()
{
  static const MetricTable table = build_metric_table(PhysicsConfig{}, -1.0, 1.0, 128);
  return table;
}

} // namespace

TEST_CASE("protocol samples")
{
  CHECK_THROWS_AS(Protocol({0.0, 0.5, 0.4, 1.0}, {0, 0, 0, 0}, ProtocolKind::human), DomainError);
  CHECK_THROWS_AS(Protocol({0.1, 1.0}, {0, 0}, ProtocolKind::human), DomainError);
  const auto p = Protocol::uniform(2.0, {0.0, 1.0, 4.0}, ProtocolKind::human);
  CHECK(p.position(0.5) == doctest::Approx(0.5));
  CHECK(p.position(1.5) == doctest::Approx(2.5));
  CHECK(p.position(5.0) == doctest::Approx(4.0));
  CHECK(p.min_position() == 0.0);
  CHECK(p.max_position() == 4.0);
  CHECK_THROWS_AS(p.require_within(-1.0, 3.0), DomainError);
  for (auto k : {ProtocolKind::cubic, ProtocolKind::cd_single, ProtocolKind::geodesic, ProtocolKind::cd_double,
                 ProtocolKind::optimized, ProtocolKind::human}) {
    CHECK(protocol_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(protocol_kind_from_string("spline"), DomainError);
}

TEST_CASE("sampled derivatives are exact on quadratics")
{
  std::vector<double> t(21);
  std::vector<double> f(21);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = 0.05 * static_cast<double>(i);
    f[i] = 3.0 * t[i] * t[i] - t[i];
  }
  const auto d = sample_derivative(t, f);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(d[i] == doctest::Approx(6.0 * t[i] - 1.0).epsilon(1e-10));
  }
}

TEST_CASE("cubic ramp")
{
  const CubicRamp r{1.1, 0.1, 0.2};
  CHECK(r.position(0.0) == doctest::Approx(0.2 + 0.55));
  CHECK(r.position(0.1) == doctest::Approx(0.2 - 0.55));
  CHECK(r.position(0.05) == doctest::Approx(0.2));
  CHECK(r.velocity(0.0) == doctest::Approx(0.0));
  CHECK(r.velocity(0.1) == doctest::Approx(0.0));
  CHECK(std::abs(r.acceleration(0.0)) == doctest::Approx(660.0));
  CHECK(r.peak_acceleration() == doctest::Approx(660.0));

  // second difference of the closed form
  const double h = 1e-5;
  const double fd = (r.position(0.05 + h) - 2.0 * r.position(0.05) + r.position(0.05 - h)) / (h * h);
  CHECK(fd == doctest::Approx(r.acceleration(0.05)).epsilon(1e-4));

  const auto p = cubic_ramp(1.1, 0.1, 0.0);
  CHECK(p.size() == kDefaultProtocolSamples);
  CHECK(p.kind() == ProtocolKind::cubic);
  CHECK(p.positions().front() == doctest::Approx(0.55));
  CHECK(p.positions().back() == doctest::Approx(-0.55));
  const auto a = p.accelerations();
  CHECK(std::abs(a.front()) == doctest::Approx(660.0).epsilon(1e-3));
  CHECK_THROWS_AS(cubic_ramp(1.1, 0.0, 0.0), DomainError);
}

TEST_CASE("classical speed limit")
{
  PhysicsConfig cfg;
  cfg.A = 160.0;
  const auto r160 = classical_speed_limit(cfg, 1.1);
  CHECK(std::abs(r160.t_csl - 0.092) <= 0.001);
  cfg.A = 130.0;
  const auto r130 = classical_speed_limit(cfg, 1.1);
  CHECK(std::abs(r130.t_csl - 0.102) <= 0.001);
  CHECK(classical_speed_limit(cfg, 0.0).t_csl == 0.0);
  CHECK_THROWS_AS(classical_speed_limit(cfg, -1.0), DomainError);

  for (double A = 100.0; A <= 200.0; A += 5.0) {
    cfg.A = A;
    const auto r = classical_speed_limit(cfg, 1.1);
    CHECK(std::abs(r.t_csl_harmonic - r.t_csl) / r.t_csl < 0.02);
    CHECK(r.a_max == doctest::Approx(A / (cfg.sigma * std::sqrt(std::numbers::e))).epsilon(1e-12));
    CHECK(r.omega == doctest::Approx(std::sqrt(A) / cfg.sigma));
    // cubic at exactly T_CSL uses the whole admissible acceleration
    CHECK(CubicRamp{1.1, r.t_csl, 0.0}.peak_acceleration() == doctest::Approx(r.a_max).epsilon(1e-6));
  }
}

TEST_CASE("single-tweezer counter-diabatic correction")
{
  PhysicsConfig cfg;
  SUBCASE("cubic ramp endpoint")
  {
    const auto cd = cd_correct_single(cubic_ramp(1.1, 0.1, 0.0), cfg);
    CHECK(cfg.omega_squared() == doctest::Approx(10240.0));
    CHECK(std::abs(cd.positions().front() - (0.55 - 660.0 / 10240.0)) <= 0.001);
    CHECK(std::abs(cd.positions().front() - 0.4855) <= 0.001);
    CHECK(cd.kind() == ProtocolKind::cd_single);
  }
  SUBCASE("constant protocol is unchanged")
  {
    const auto base = Protocol::uniform(0.1, std::vector<double>(101, 0.3), ProtocolKind::human);
    const auto cd = cd_correct_single(base, cfg);
    CHECK(sup_distance(cd, base) == 0.0);
  }
  SUBCASE("correction vanishes for a stiff trap")
  {
    cfg.A = 1e12;
    const auto base = cubic_ramp(1.1, 0.1, 0.0);
    CHECK(sup_distance(cd_correct_single(base, cfg), base) < 1e-6);
  }
  SUBCASE("moving ends are a contract violation")
  {
    std::vector<double> x(101);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = 0.5 - 0.01 * static_cast<double>(i);
    }
    CHECK_THROWS_AS(cd_correct_single(Protocol::uniform(0.1, x, ProtocolKind::human), cfg), ContractError);
  }
}

TEST_CASE("metric of a single tweezer is flat")
{
  const auto cfg = single_well();
  for (double x0 : {-0.7, -0.2, 0.0, 0.35, 0.9}) {
    CHECK(std::abs(metric(x0, cfg) - 1.0) < 1e-4);
  }
  const auto table = build_metric_table(cfg, -1.0, 1.0, 32);
  for (double g : table.values()) {
    CHECK(std::abs(g - 1.0) < 1e-4);
  }
}

TEST_CASE("metric table arguments")
{
  CHECK_THROWS_AS(build_metric_table(PhysicsConfig{}, -1.0, 1.0, 16), DomainError);
  CHECK_THROWS_AS(build_metric_table(PhysicsConfig{}, 1.0, -1.0, 64), DomainError);
  CHECK_THROWS_AS(MetricTable({0.0, 1.0}, {1.0, -1.0}), NumericError);
  CHECK_THROWS_AS(MetricTable({0.0, 0.0}, {1.0, 1.0}), DomainError);
}

TEST_CASE("spline interpolation reproduces a cubic")
{
  std::vector<double> x(41);
  std::vector<double> g(41);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = -1.0 + 0.05 * static_cast<double>(i);
    g[i] = 2.0 + std::sin(x[i]);
  }
  const MetricTable table(x, g);
  // natural end conditions cost accuracy near the ends; probe the interior
  for (double q : {-0.61, -0.11, 0.42, 0.57}) {
    CHECK(table.g(q) == doctest::Approx(2.0 + std::sin(q)).epsilon(1e-5));
  }
  const MetricTable lin(x, g, Interpolation::linear);
  CHECK(lin.g(0.025) == doctest::Approx(0.5 * (g[20] + g[21])));
}

TEST_CASE("default metric shape")
{
  const auto& table = default_table();
  const auto& x = table.x0();
  const auto& g = table.values();

  double outer = 0.0;
  double peak = 0.0;
  double low = 10.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (std::abs(x[k]) > 0.9) {
      outer = std::max(outer, std::abs(g[k] - 1.0));
    }
    peak = std::max(peak, g[k]);
    low = std::min(low, g[k]);
  }
  CHECK(outer < 0.05);
  CHECK(low < 1.0);
  CHECK(peak > 1.5);
}

TEST_CASE("metric table self-convergence")
{
  const auto& fine = default_table();
  const auto coarse = build_metric_table(PhysicsConfig{}, -1.0, 1.0, 64);
  double worst = 0.0;
  for (int k = 0; k <= 400; ++k) {
    const double q = -1.0 + 2.0 * k / 400.0;
    worst = std::max(worst, std::abs(coarse.g(q) - fine.g(q)) / fine.g(q));
  }
  CHECK(worst < 0.01);
}

TEST_CASE("flat-metric geodesic is a straight line")
{
  PhysicsConfig cfg;
  const auto flat = MetricTable::flat(-1.0, 1.0);
  GeodesicOptions opts;
  opts.ramp_fraction = 1e-4;
  const auto p = geodesic_protocol(flat, 0.1, cfg, opts);
  double worst = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double line = 0.55 - 1.1 * p.times()[k] / 0.1;
    worst = std::max(worst, std::abs(p.positions()[k] - line));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("geodesic protocol at defaults")
{
  PhysicsConfig cfg;
  const auto& table = default_table();
  const double T = 0.1;
  const auto p = geodesic_protocol(table, T, cfg);
  const auto v = p.velocities();

  CHECK(p.positions().front() == cfg.x0_start);
  CHECK(p.positions().back() == cfg.x0_end);
  CHECK(std::abs(v.front()) < 1e-6 * 1.1 / T * 1e3);
  CHECK(std::abs(v.back()) < 1e-6 * 1.1 / T * 1e3);

  SUBCASE("first integral")
  {
    std::vector<double> c;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double t = p.times()[k];
      if (t > 0.16 * T && t < 0.84 * T) {
        c.push_back(table.sqrt_g(p.positions()[k]) * v[k]);
      }
    }
    const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
    CHECK((*hi - *lo) / std::abs(*hi) < 0.01);
  }
  SUBCASE("slows down where the metric peaks")
  {
    std::size_t kpeak = 0;
    double gpeak = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double t = p.times()[k];
      if (t > 0.16 * T && t < 0.84 * T && table.g(p.positions()[k]) > gpeak) {
        gpeak = table.g(p.positions()[k]);
        kpeak = k;
      }
    }
    double vmax = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double t = p.times()[k];
      if (t > 0.16 * T && t < 0.84 * T) {
        vmax = std::max(vmax, std::abs(v[k]));
      }
    }
    CHECK(std::abs(v[kpeak]) < 0.9 * vmax);
  }
  SUBCASE("quadrature self-convergence")
  {
    GeodesicOptions fine;
    fine.quadrature_points *= 2;
    fine.samples = 2 * fine.samples - 1;
    CHECK(sup_distance(geodesic_protocol(table, T, cfg, fine), p) < 1e-3 * 1.1);
  }
  SUBCASE("bad arguments")
  {
    GeodesicOptions bad;
    bad.ramp_fraction = 0.5;
    CHECK_THROWS_AS(geodesic_protocol(table, T, cfg, bad), DomainError);
    CHECK_THROWS_AS(geodesic_protocol(MetricTable::flat(-0.5, 0.5), T, cfg), DomainError);
  }
}

TEST_CASE("long ramps that end past the metric peak")
{
  // With long ramps the ramp equation has several roots across the peak; the ramp must stop
  // at the first one and the interior must still conserve sqrt(g) x0'.
  const auto& table = default_table();
  PhysicsConfig cfg;
  GeodesicOptions opts;
  opts.ramp_fraction = 0.4; // no continuous match exists: must throw, not return a jump
  CHECK_THROWS_AS(geodesic_protocol(table, 0.1, cfg, opts), NumericError);
  opts.ramp_fraction = 0.35;
  for (double T : {0.05, 0.1, 0.3}) {
    CAPTURE(T);
    const auto p = geodesic_protocol(table, T, cfg, opts);
    const auto v = p.velocities();
    CHECK(p.positions().front() == cfg.x0_start);
    CHECK(p.positions().back() == cfg.x0_end);
    std::vector<double> c;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double t = p.times()[k];
      if (t > 0.36 * T && t < 0.64 * T) {
        c.push_back(table.sqrt_g(p.positions()[k]) * std::abs(v[k]));
      }
    }
    REQUIRE(c.size() > 10);
    const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
    CHECK((*hi - *lo) / *hi < 0.01);
    for (std::size_t k = 1; k < p.size(); ++k) {
      CHECK(p.positions()[k] <= p.positions()[k - 1]);
    }
  }
}

TEST_CASE("double-tweezer counter-diabatic correction")
{
  PhysicsConfig cfg;
  SUBCASE("flat metric reduces to the single-tweezer form")
  {
    const auto base = cubic_ramp(1.1, 0.1, 0.0);
    const auto a = cd_correct_double(base, MetricTable::flat(-1.0, 1.0), cfg);
    const auto b = cd_correct_single(base, cfg);
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      worst = std::max(worst, std::abs(a.positions()[k] - b.positions()[k]));
    }
    CHECK(worst < 1e-8);
    CHECK(a.kind() == ProtocolKind::cd_double);
  }
  SUBCASE("constant protocol is unchanged")
  {
    const auto base = Protocol::uniform(0.1, std::vector<double>(101, -0.2), ProtocolKind::human);
    CHECK(sup_distance(cd_correct_double(base, default_table(), cfg), base) == 0.0);
  }
  SUBCASE("geodesic interior needs no correction")
  {
    const double T = 0.1;
    const auto geo = geodesic_protocol(default_table(), T, cfg);
    const auto cd = cd_correct_double(geo, default_table(), cfg);
    double worst = 0.0;
    for (std::size_t k = 0; k < geo.size(); ++k) {
      const double t = geo.times()[k];
      if (t > 0.2 * T && t < 0.8 * T) {
        worst = std::max(worst, std::abs(cd.positions()[k] - geo.positions()[k]));
      }
    }
    CHECK(worst < 1e-3 * 1.1);
  }
}

TEST_CASE("velocity field")
{
  const double T = 0.1;
  const auto base = cubic_ramp(1.1, T, 0.0);
  SUBCASE("single tweezer moves rigidly")
  {
    const auto cfg = single_well();
    const auto f = exact_velocity_field(base, 0.3 * T, cfg);
    double worst = 0.0;
    for (const auto& v : f.v) {
      if (v) {
        worst = std::max(worst, std::abs(*v - f.x0_dot));
      }
    }
    CHECK(worst < 1e-3 * std::abs(f.x0_dot));
  }
  SUBCASE("stationary protocol")
  {
    const auto still = Protocol::uniform(T, std::vector<double>(11, 0.4), ProtocolKind::human);
    const auto f = exact_velocity_field(still, 0.5 * T, PhysicsConfig{});
    for (const auto& v : f.v) {
      if (v) {
        CHECK(*v == 0.0);
      }
    }
  }
  SUBCASE("least-squares fit equals x0' sqrt(g)")
  {
    PhysicsConfig cfg;
    const auto grid = SpatialGrid::from_config(cfg);
    for (double frac : {0.3, 0.5, 0.62}) {
      const auto f = exact_velocity_field(base, frac * T, cfg);
      const double w = uniform_velocity_fit(f, grid.dx);
      const double expect = f.x0_dot * metric_sqrt(f.x0, cfg);
      CHECK(std::abs(w - expect) <= 0.01 * std::abs(expect));
    }
  }
  SUBCASE("continuity residual")
  {
    PhysicsConfig cfg;
    const auto grid = SpatialGrid::from_config(cfg);
    for (double frac : {0.25, 0.5, 0.7}) {
      const auto r = continuity_residual(exact_velocity_field(base, frac * T, cfg), grid.dx);
      CHECK(r.residual < 1e-2 * r.rate);
    }
  }
  SUBCASE("density floor masks the tails")
  {
    const auto f = exact_velocity_field(base, 0.5 * T, PhysicsConfig{});
    CHECK_FALSE(f.v.front().has_value());
    CHECK_FALSE(f.v.back().has_value());
  }
  CHECK_THROWS_AS(exact_velocity_field(base, 0.0, PhysicsConfig{}), DomainError);
}
