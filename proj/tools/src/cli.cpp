#include "qmoves_app/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "qmoves/errors.hpp"
#include "qmoves/optimizer.hpp"
#include "qmoves/tunneling.hpp"
#include "qmoves_app/json_io.hpp"
#include "qmoves_app/lab.hpp"
#include "qmoves_app/run_manifest.hpp"
#include "qmoves_app/service.hpp"

namespace fs = std::filesystem;

namespace qmoves::app {
namespace {

// Flags shared by every subcommand: physics overrides, a config file and an output directory.
struct Common {
  std::string config_path;
  std::string out_dir;
  std::map<std::string, std::optional<double>> physics;
  std::optional<std::size_t> n_x;
  std::optional<std::string> initial_state;
  json file = json::object();
};

const std::vector<std::pair<const char*, const char*>> kPhysicsFlags = {
    {"A", "--A"},           {"B", "--B"},           {"sigma", "--sigma"}, {"x_B", "--xB"},
    {"x0_start", "--x0-start"}, {"x0_end", "--x0-end"}, {"x_min", "--x-min"}, {"x_max", "--x-max"},
    {"mass", "--mass"},     {"hbar", "--hbar"}};

void add_common(CLI::App* sub, Common& c)
{
  sub->add_option("--config", c.config_path, "JSON file with a 'physics' object and command keys")
      ->check(CLI::ExistingFile);
  sub->add_option("--out", c.out_dir, "output directory (default: <state dir>/runs/<timestamp>-<hash>)");
  for (const auto& [key, flag] : kPhysicsFlags) {
    sub->add_option(flag, c.physics[key], std::string("physics: ") + key)->group("Physics");
  }
  sub->add_option("--n-x", c.n_x, "physics: grid points")->group("Physics");
  sub->add_option("--initial-state", c.initial_state, "joint_ground | static_well_ground")->group("Physics");
}

// flag > file > default
template <class T>
T pick(const std::optional<T>& flag, const json& file, const char* key, T fallback)
{
  if (flag) {
    return *flag;
  }
  if (file.contains(key)) {
    try {
      return file.at(key).get<T>();
    } catch (const json::exception&) {
      throw DomainError(fmt::format("config key '{}' has the wrong type", key));
    }
  }
  return fallback;
}

PhysicsConfig resolve_physics(Common& c)
{
  if (!c.config_path.empty()) {
    c.file = read_json_file(c.config_path);
    if (!c.file.is_object()) {
      throw DomainError("config file must hold a JSON object");
    }
  }
  PhysicsConfig cfg;
  if (c.file.contains("physics")) {
    cfg = physics_from_json(c.file.at("physics"), cfg);
  }
  json flags = json::object();
  for (const auto& [key, v] : c.physics) {
    if (v) {
      flags[key] = *v;
    }
  }
  if (c.n_x) {
    flags["n_x"] = *c.n_x;
  }
  if (c.initial_state) {
    flags["initial_state"] = *c.initial_state;
  }
  cfg = physics_from_json(flags, cfg);
  cfg.validate();
  return cfg;
}

fs::path open_run_dir(const Common& c, const json& config)
{
  if (!c.out_dir.empty()) {
    fs::create_directories(c.out_dir);
    return c.out_dir;
  }
  return make_run_dir(state_dir() / "runs", config);
}

std::vector<double> default_T_list(double t_csl)
{
  std::vector<double> out;
  for (double f : {0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0}) {
    out.push_back(f * t_csl);
  }
  return out;
}

struct Outcome {
  json config;
  fs::path dir;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> rng;
};

// ---------------------------------------------------------------------------

struct SpeedLimitCmd {
  Common c;
  std::optional<double> L;

  void attach(CLI::App* sub)
  {
    add_common(sub, c);
    sub->add_option("--L", L, "transport distance (default |x0_start - x0_end|)");
  }

  Outcome run(std::ostream& out)
  {
    const auto cfg = resolve_physics(c);
    const double dist = pick(L, c.file, "L", cfg.transport_distance());
    if (!(dist > 0.0)) {
      throw DomainError("--L must be positive");
    }
    Outcome o;
    o.config = {{"physics", to_json(cfg)}, {"L", dist}};
    const auto r = classical_speed_limit(cfg, dist);
    o.dir = open_run_dir(c, o.config);
    const auto file = o.dir / "speed_limit.json";
    write_json_file(file,
                    {{"L", dist}, {"t_csl", r.t_csl}, {"t_csl_harmonic", r.t_csl_harmonic}, {"a_max", r.a_max},
                     {"omega", r.omega}});
    o.outputs.push_back(file.string());
    fmt::print(out, "T_CSL = {:.3f} ({:.6g})\n", r.t_csl, r.t_csl);
    fmt::print(out, "T_CSL harmonic = {:.6g}\n", r.t_csl_harmonic);
    fmt::print(out, "a_max = {:.6g}, omega = {:.6g}\n", r.a_max, r.omega);
    return o;
  }
};

struct GroundStateCmd {
  Common c;
  std::optional<double> x0;

  void attach(CLI::App* sub)
  {
    add_common(sub, c);
    sub->add_option("--x0", x0, "moving tweezer position (default x0_start)");
  }

  Outcome run(std::ostream& out)
  {
    const auto cfg = resolve_physics(c);
    const double pos = pick(x0, c.file, "x0", cfg.x0_start);
    Outcome o;
    o.config = {{"physics", to_json(cfg)}, {"x0", pos}};
    const auto gs = ground_state(pos, cfg);
    o.dir = open_run_dir(c, o.config);
    const auto file = o.dir / "ground_state.csv";
    write_ground_state_csv(file, gs.psi);
    o.outputs.push_back(file.string());
    fmt::print(out, "E0 = {:.10g} at x0 = {}\n", gs.energy, pos);
    return o;
  }
};

struct MetricCmd {
  Common c;
  std::optional<std::size_t> samples;
  std::optional<double> lo;
  std::optional<double> hi;

  void attach(CLI::App* sub)
  {
    add_common(sub, c);
    sub->add_option("--samples", samples, "table samples (default 128)");
    sub->add_option("--x0-min", lo, "table start (default lattice lower edge)");
    sub->add_option("--x0-max", hi, "table end (default lattice upper edge)");
  }

  Outcome run(std::ostream& out)
  {
    const auto cfg = resolve_physics(c);
    const auto lattice = PositionLattice::standard(cfg);
    const auto n = pick(samples, c.file, "samples", kMetricSamples);
    const double a = pick(lo, c.file, "x0_min", lattice.lower());
    const double b = pick(hi, c.file, "x0_max", lattice.upper());
    Outcome o;
    o.config = {{"physics", to_json(cfg)}, {"samples", n}, {"x0_min", a}, {"x0_max", b}};
    const auto table = build_metric_table(cfg, a, b, n);
    o.dir = open_run_dir(c, o.config);
    const auto file = o.dir / "metric.csv";
    write_metric_csv(file, table);
    o.outputs.push_back(file.string());
    const auto [mn, mx] = std::minmax_element(table.values().begin(), table.values().end());
    fmt::print(out, "g in [{:.6g}, {:.6g}] over {} samples\n", *mn, *mx, n);
    return o;
  }
};

// geodesic and cd share everything but the protocol kind.
struct ReferenceCmd {
  Common c;
  std::optional<double> T;
  std::optional<std::string> kind_flag;
  bool evaluate = false;
  bool is_cd = false;

  void attach(CLI::App* sub, bool cd)
  {
    is_cd = cd;
    add_common(sub, c);
    sub->add_option("--T", T, "duration (default T_CSL)");
    if (cd) {
      sub->add_option("--kind", kind_flag, "single | double")->check(CLI::IsMember({"single", "double"}));
    }
    sub->add_flag("--evaluate", evaluate, "also simulate the protocol and print its fidelity");
  }

  Outcome run(std::ostream& out)
  {
    const auto cfg = resolve_physics(c);
    Lab lab(cfg);
    const double duration = pick(T, c.file, "T", lab.t_csl());
    ProtocolKind kind = ProtocolKind::geodesic;
    std::string which;
    if (is_cd) {
      which = pick(kind_flag, c.file, "kind", std::string("double"));
      if (which != "single" && which != "double") {
        throw DomainError("--kind must be single or double");
      }
      kind = which == "single" ? ProtocolKind::cd_single : ProtocolKind::cd_double;
    }
    Outcome o;
    o.config = {{"physics", to_json(cfg)}, {"T", duration}};
    if (is_cd) {
      o.config["kind"] = which;
    }
    const auto p = lab.reference(kind, duration);
    json doc = to_json(p);
    if (evaluate) {
      doc["fidelity"] = *lab.simulate(p).fidelity;
      fmt::print(out, "F = {:.6f}\n", doc["fidelity"].get<double>());
    }
    o.dir = open_run_dir(c, o.config);
    const auto file = o.dir / fmt::format("{}.json", to_string(kind));
    write_json_file(file, doc);
    o.outputs.push_back(file.string());
    fmt::print(out, "{} protocol, T = {:.6g}, {} samples -> {}\n", to_string(kind), duration, p.size(),
               file.string());
    return o;
  }
};

struct SimulateCmd {
  Common c;
  std::string protocol_path;
  std::optional<std::size_t> N;
  std::optional<std::size_t> frames;
  std::optional<std::string> endpoints;

  void attach(CLI::App* sub)
  {
    add_common(sub, c);
    sub->add_option("--protocol", protocol_path, "protocol JSON {T, samples}")->required()->check(CLI::ExistingFile);
    sub->add_option("--N", N, "time steps (default max(100, ceil(T/2.5e-4)))");
    sub->add_option("--frames", frames, "record a density frame every this many steps (0 = none)");
    sub->add_option("--endpoints", endpoints,
                    "config: states at x0_start/x0_end; protocol: at the lattice points of the first/last sample")
        ->check(CLI::IsMember({"config", "protocol"}));
  }

  Outcome run(std::ostream& out)
  {
    const auto cfg = resolve_physics(c);
    const auto p = protocol_from_json(read_json_file(protocol_path));
    const auto ends = pick(endpoints, c.file, "endpoints", std::string("config"));
    if (ends != "config" && ends != "protocol") {
      throw DomainError("endpoints must be config or protocol");
    }
    const std::size_t steps = pick(N, c.file, "N", std::size_t{0});
    const std::size_t stride = pick(frames, c.file, "frames", std::size_t{0});
    const std::size_t n_used = steps == 0 ? default_step_rule(p.duration()) : steps;

    Outcome o;
    o.inputs.push_back(protocol_path);
    o.config = {{"physics", to_json(cfg)}, {"N", n_used}, {"frames", stride}, {"endpoints", ends}};
    Lab lab(cfg);
    if (ends == "protocol") {
      // Eigenstates of the first/last Hamiltonians the evolution actually applies.
      const auto& lat = lab.lattice();
      const double first = lat.position(lat.nearest(p.positions().front()));
      const double last = lat.position(lat.nearest(p.positions().back()));
      auto initial = cfg.initial_state == InitialState::static_well_ground ? static_well_ground_state(cfg).psi
                                                                         : ground_state(first, cfg).psi;
      lab.set_states({std::move(initial), ground_state(last, cfg).psi});
    }
    const auto r = lab.simulate(p, n_used, stride);
    json doc{{"fidelity", *r.fidelity}, {"T", p.duration()}, {"N", n_used}};
    if (stride > 0) {
      doc["frames"] = to_json(r.frames);
    }
    o.dir = open_run_dir(c, o.config);
    const auto file = o.dir / "simulation.json";
    write_json_file(file, doc);
    o.outputs.push_back(file.string());
    fmt::print(out, "F = {:.6f} (T = {:.6g}, N = {})\n", *r.fidelity, p.duration(), n_used);
    return o;
  }
};

struct FidelityCurveCmd {
  Common c;
  std::optional<std::vector<std::string>> kinds;
  std::optional<std::vector<double>> Ts;

  void attach(CLI::App* sub)
  {
    add_common(sub, c);
    sub->add_option("--kinds", kinds, "protocol kinds (default cubic cd_single geodesic cd_double)");
    sub->add_option("--T", Ts, "durations (default 0.75 .. 3 x T_CSL)");
  }

  Outcome run(std::ostream& out)
  {
    const auto cfg = resolve_physics(c);
    Lab lab(cfg);
    const auto ks =
        pick(kinds, c.file, "kinds", std::vector<std::string>{"cubic", "cd_single", "geodesic", "cd_double"});
    const auto T_list = pick(Ts, c.file, "T", default_T_list(lab.t_csl()));
    if (!std::is_sorted(T_list.begin(), T_list.end())) {
      throw DomainError("--T values must be ascending");
    }
    Outcome o;
    o.config = {{"physics", to_json(cfg)}, {"kinds", ks}, {"T", T_list}};
    std::vector<FidelityPoint> rows;
    for (const auto& name : ks) {
      const auto kind = protocol_kind_from_string(name);
      const auto curve = fidelity_curve([&](double T) { return lab.reference(kind, T); }, name, lab.spectra(),
                                        default_step_rule, T_list, lab.states());
      rows.insert(rows.end(), curve.begin(), curve.end());
    }
    o.dir = open_run_dir(c, o.config);
    const auto file = o.dir / "fidelity_curve.csv";
    write_fidelity_csv(file, rows);
    o.outputs.push_back(file.string());
    fmt::print(out, "{:>10} {:>10} {}\n", "T/T_CSL", "F", "kind");
    for (const auto& r : rows) {
      fmt::print(out, "{:>10.4f} {:>10.6f} {}\n", r.T / lab.t_csl(), r.F, r.kind);
    }
    return o;
  }
};

struct OptimizeCmd {
  Common c;
  std::optional<double> T;
  std::optional<std::size_t> N;
  std::optional<std::size_t> seeds;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_sweeps;
  std::optional<double> tolerance;
  bool pin_ends = false;
  std::optional<unsigned> threads;

  void attach(CLI::App* sub)
  {
    add_common(sub, c);
    sub->add_option("--T", T, "duration (default 0.1)");
    sub->add_option("--N", N, "time steps (default 40)");
    sub->add_option("--seeds", seeds, "ensemble size (default 1)");
    sub->add_option("--seed", seed, "first seed (default 0)");
    sub->add_option("--max-sweeps", max_sweeps, "sweep cap per run (default 200)");
    sub->add_option("--tolerance", tolerance, "stop when a sweep gains no more than this (default 0)");
    sub->add_flag("--pin-ends", pin_ends, "hold the first and last steps at the transport endpoints");
    sub->add_option("--threads", threads, "worker threads (default: all cores)");
  }

  Outcome run(std::ostream& out)
  {
    const auto cfg = resolve_physics(c);
    Lab lab(cfg);
    OptimizerConfig oc;
    oc.lattice = lab.lattice();
    oc.N = pick(N, c.file, "N", oc.N);
    oc.seed = pick(seed, c.file, "seed", oc.seed);
    oc.max_sweeps = pick(max_sweeps, c.file, "max_sweeps", oc.max_sweeps);
    oc.tolerance = pick(tolerance, c.file, "tolerance", oc.tolerance);
    oc.pin_ends = pin_ends || c.file.value("pin_ends", false);
    const double duration = pick(T, c.file, "T", 0.1);
    const std::size_t n_seeds = pick(seeds, c.file, "seeds", std::size_t{1});
    const unsigned n_threads = pick(threads, c.file, "threads", 0u);
    oc.validate();

    Outcome o;
    o.config = {{"physics", to_json(cfg)}, {"T", duration},          {"N", oc.N},
                {"seeds", n_seeds},        {"seed", oc.seed},        {"max_sweeps", oc.max_sweeps},
                {"tolerance", oc.tolerance}, {"pin_ends", oc.pin_ends}};
    const UnitaryBank bank(lab.spectra(), duration, oc.N);
    const auto result = run_ensemble(n_seeds, oc, bank, lab.states().initial, lab.states().target, n_threads);

    o.dir = open_run_dir(c, o.config);
    for (const auto& t : result.traces) {
      const auto file = o.dir / fmt::format("trace-{}.json", t.seed);
      write_json_file(file, to_json(t));
      o.outputs.push_back(file.string());
      o.rng.push_back(fmt::format("{}:seed={}", t.rng, t.seed));
    }
    const auto csv = o.dir / "ensemble.csv";
    write_ensemble_csv(csv, result.traces);
    o.outputs.push_back(csv.string());
    const auto& s = result.summary;
    const auto summary = o.dir / "summary.json";
    write_json_file(summary, {{"runs", s.runs},
                              {"converged", s.converged},
                              {"min_fidelity", s.min_fidelity},
                              {"median_fidelity", s.median_fidelity},
                              {"max_fidelity", s.max_fidelity},
                              {"relative_spread", s.relative_spread},
                              {"distinct_protocols", s.distinct_protocols},
                              {"max_sweeps_used", s.max_sweeps_used}});
    o.outputs.push_back(summary.string());
    fmt::print(out, "{} runs, {} converged; F min/median/max = {:.6f} / {:.6f} / {:.6f}\n", s.runs, s.converged,
               s.min_fidelity, s.median_fidelity, s.max_fidelity);
    return o;
  }
};

struct TunnelCmd {
  Common c;
  std::optional<double> d_max;
  std::optional<std::size_t> d_count;
  std::optional<double> budget;

  void attach(CLI::App* sub)
  {
    add_common(sub, c);
    sub->add_option("--d-max", d_max, "largest well separation (default 10 sigma)");
    sub->add_option("--d-count", d_count, "separations from 0 to d-max (default 81)");
    sub->add_option("--budget", budget, "transfer time budget (default T_CSL)");
  }

  Outcome run(std::ostream& out)
  {
    const auto cfg = resolve_physics(c);
    const double hi = pick(d_max, c.file, "d_max", 10.0 * cfg.sigma);
    const std::size_t count = pick(d_count, c.file, "d_count", std::size_t{81});
    const double T_budget =
        pick(budget, c.file, "budget", classical_speed_limit(cfg, cfg.transport_distance()).t_csl);
    if (count < 2 || !(hi > 0.0)) {
      throw DomainError("tunnel needs d-max > 0 and at least two separations");
    }
    Outcome o;
    o.config = {{"physics", to_json(cfg)}, {"d_max", hi}, {"d_count", count}, {"budget", T_budget}};
    std::vector<double> d(count);
    for (std::size_t i = 0; i < count; ++i) {
      d[i] = hi * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    const auto curve = tunnel_curve(cfg, d);
    const double reach = max_tunnel_distance(curve, T_budget);
    json doc{{"budget", T_budget}, {"max_distance", reach}};
    try {
      const auto fit = fit_decay(curve, cfg, 4.0 * cfg.sigma, 8.0 * cfg.sigma);
      doc["kappa"] = fit.kappa;
      doc["kappa_expected"] = fit.kappa_expected;
      doc["r_squared"] = fit.r_squared;
      fmt::print(out, "kappa = {:.6g} (expected {:.6g}), R^2 = {:.6f}\n", fit.kappa, fit.kappa_expected,
                 fit.r_squared);
    } catch (const DomainError&) {
      fmt::print(out, "decay fit skipped: fewer than three separations in [4 sigma, 8 sigma]\n");
    }
    o.dir = open_run_dir(c, o.config);
    const auto csv = o.dir / "tunnel.csv";
    write_tunnel_csv(csv, curve);
    const auto js = o.dir / "tunnel.json";
    write_json_file(js, doc);
    o.outputs = {csv.string(), js.string()};
    fmt::print(out, "max tunnelling distance within T = {:.6g}: d = {:.6g} ({:.3g} sigma)\n", T_budget, reach,
               reach / cfg.sigma);
    return o;
  }
};

struct ServeCmd {
  Common c;
  ServiceOptions opts;
  std::string static_dir;
  std::string state;
  std::size_t budget_mib = kDefaultBankBudgetBytes >> 20;

  void attach(CLI::App* sub)
  {
    add_common(sub, c);
    sub->add_option("--host", opts.host, "bind address");
    sub->add_option("--port", opts.port, "port (0 = any free port)");
    sub->add_option("--static-dir", static_dir, "directory with the UI build");
    sub->add_option("--state-dir", state, "leaderboard and run directory (default QMOVES_STATE_DIR)");
    sub->add_option("--bank-budget-mib", budget_mib, "memory budget for step-propagator banks");
    sub->add_option("--max-inflight", opts.max_inflight, "concurrent simulations before HTTP 429");
    sub->add_option("--max-T", opts.max_T, "longest accepted protocol duration");
  }

  Outcome run(std::ostream& out)
  {
    const auto cfg = resolve_physics(c);
    opts.static_dir = static_dir;
    opts.state_dir = state.empty() ? state_dir() : fs::path(state);
    opts.bank_budget_bytes = budget_mib << 20;
    Outcome o;
    o.config = {{"physics", to_json(cfg)}, {"host", opts.host}, {"port", opts.port},
                {"bank_budget_mib", budget_mib}, {"max_inflight", opts.max_inflight}, {"max_T", opts.max_T}};
    Service service(cfg, opts);
    o.dir = c.out_dir.empty() ? make_run_dir(opts.state_dir / "runs", o.config) : fs::path(c.out_dir);
    fs::create_directories(o.dir);
    o.outputs.push_back((opts.state_dir / "scores.jsonl").string());
    RunManifest m;
    m.command = "serve";
    m.config = o.config;
    m.outputs = o.outputs;
    m.write(o.dir);
    std::thread announce([&] {
      if (service.wait_until_ready(10000)) {
        fmt::print(out, "listening on http://{}:{}\n", opts.host, service.bound_port());
        out.flush();
      }
    });
    try {
      service.listen();
    } catch (...) {
      announce.join();
      throw;
    }
    announce.join();
    return o;
  }
};

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Transport of atoms between optical tweezers: simulation, optimization and a game service", "qmoves"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kArtifactVersion);

  SpeedLimitCmd speed;
  GroundStateCmd ground;
  MetricCmd metric;
  ReferenceCmd geodesic;
  ReferenceCmd cd;
  SimulateCmd simulate;
  FidelityCurveCmd curve;
  OptimizeCmd opt;
  TunnelCmd tunnel;
  ServeCmd serve;

  speed.attach(app.add_subcommand("speed-limit", "classical speed limit of the moving tweezer"));
  ground.attach(app.add_subcommand("ground-state", "ground state of the two-tweezer potential"));
  metric.attach(app.add_subcommand("metric", "adiabatic metric table g(x0)"));
  geodesic.attach(app.add_subcommand("geodesic", "constant-speed geodesic protocol"), false);
  cd.attach(app.add_subcommand("cd", "counter-diabatic protocol"), true);
  simulate.attach(app.add_subcommand("simulate", "evolve a protocol and report the transport fidelity"));
  curve.attach(app.add_subcommand("fidelity-curve", "fidelity against duration for reference protocols"));
  opt.attach(app.add_subcommand("optimize", "local-ascent optimization ensemble"));
  tunnel.attach(app.add_subcommand("tunnel", "tunnelling splitting and transfer time against separation"));
  serve.attach(app.add_subcommand("serve", "HTTP API and static UI"));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  Stopwatch clock;
  try {
    Outcome o;
    if (name == "speed-limit") {
      o = speed.run(out);
    } else if (name == "ground-state") {
      o = ground.run(out);
    } else if (name == "metric") {
      o = metric.run(out);
    } else if (name == "geodesic") {
      o = geodesic.run(out);
    } else if (name == "cd") {
      o = cd.run(out);
    } else if (name == "simulate") {
      o = simulate.run(out);
    } else if (name == "fidelity-curve") {
      o = curve.run(out);
    } else if (name == "optimize") {
      o = opt.run(out);
    } else if (name == "tunnel") {
      o = tunnel.run(out);
    } else if (name == "serve") {
      serve.run(out);
      return 0;
    }
    RunManifest m;
    m.command = name;
    m.config = o.config;
    m.inputs = o.inputs;
    m.outputs = o.outputs;
    m.rng = o.rng;
    m.wall_seconds = clock.seconds();
    m.write(o.dir);
    fmt::print(out, "run directory: {}\n", o.dir.string());
    return 0;
  } catch (const DomainError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 2;
  } catch (const ContractError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 2;
  } catch (const json::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    fmt::print(err, "numeric error: {}\n", e.what());
    return 3;
  } catch (const ResourceError& e) {
    fmt::print(err, "resource error: {}\n", e.what());
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    fmt::print(err, "resource error: {}\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    fmt::print(err, "unexpected error: {}\n", e.what());
    return 1;
  }
}

} // namespace qmoves::app
