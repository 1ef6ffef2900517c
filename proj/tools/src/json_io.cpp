#include "qmoves_app/json_io.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <fmt/os.h>

#include "qmoves/errors.hpp"

namespace qmoves::app {

json to_json(const PhysicsConfig& cfg)
{
  return json{{"mass", cfg.mass},         {"hbar", cfg.hbar},   {"A", cfg.A},
              {"B", cfg.B},               {"sigma", cfg.sigma}, {"x_B", cfg.x_B},
              {"x_min", cfg.x_min},       {"x_max", cfg.x_max}, {"n_x", cfg.n_x},
              {"x0_start", cfg.x0_start}, {"x0_end", cfg.x0_end},
              {"initial_state", std::string(to_string(cfg.initial_state))}};
}

PhysicsConfig physics_from_json(const json& j, PhysicsConfig base)
{
  if (!j.is_object()) {
    throw DomainError("physics config must be a JSON object");
  }
  auto number = [&](const std::string& key, const json& v) {
    if (!v.is_number()) {
      throw DomainError("config key '" + key + "' must be a number");
    }
    return v.get<double>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "mass") {
      base.mass = number(key, v);
    } else if (key == "hbar") {
      base.hbar = number(key, v);
    } else if (key == "A") {
      base.A = number(key, v);
    } else if (key == "B") {
      base.B = number(key, v);
    } else if (key == "sigma") {
      base.sigma = number(key, v);
    } else if (key == "x_B") {
      base.x_B = number(key, v);
    } else if (key == "x_min") {
      base.x_min = number(key, v);
    } else if (key == "x_max") {
      base.x_max = number(key, v);
    } else if (key == "n_x") {
      if (!v.is_number_unsigned()) {
        throw DomainError("config key 'n_x' must be a positive integer");
      }
      base.n_x = v.get<std::size_t>();
    } else if (key == "x0_start") {
      base.x0_start = number(key, v);
    } else if (key == "x0_end") {
      base.x0_end = number(key, v);
    } else if (key == "initial_state") {
      if (!v.is_string()) {
        throw DomainError("config key 'initial_state' must be a string");
      }
      base.initial_state = initial_state_from_string(v.get<std::string>());
    } else {
      throw DomainError("unknown physics config key '" + key + "'");
    }
  }
  return base;
}

json to_json(const PositionLattice& lattice)
{
  return json{{"first", lattice.first},
              {"spacing", lattice.spacing},
              {"count", lattice.count},
              {"lower", lattice.lower()},
              {"upper", lattice.upper()}};
}

json to_json(const Protocol& p)
{
  json samples = json::array();
  for (std::size_t j = 0; j < p.size(); ++j) {
    samples.push_back({p.times()[j], p.positions()[j]});
  }
  return json{{"T", p.duration()}, {"samples", std::move(samples)}, {"kind", std::string(to_string(p.kind()))}};
}

Protocol protocol_from_json(const json& j)
{
  if (!j.is_object() || !j.contains("T") || !j.contains("samples")) {
    throw DomainError("protocol needs 'T' and 'samples'");
  }
  if (!j["T"].is_number()) {
    throw DomainError("protocol 'T' must be a number");
  }
  const double T = j["T"].get<double>();
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw DomainError("protocol 'T' must be positive");
  }
  const auto& s = j["samples"];
  if (!s.is_array() || s.size() < 2) {
    throw DomainError("protocol needs at least two samples");
  }
  std::vector<double> t;
  std::vector<double> x;
  t.reserve(s.size());
  x.reserve(s.size());
  for (const auto& row : s) {
    if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
      throw DomainError("protocol samples must be [t, x0] number pairs");
    }
    t.push_back(row[0].get<double>());
    x.push_back(row[1].get<double>());
    if (!std::isfinite(t.back()) || !std::isfinite(x.back())) {
      throw DomainError("protocol samples must be finite");
    }
  }
  // Float noise in client-side time mapping: snap ends lying within 1e-9 T.
  if (std::abs(t.front()) <= 1e-9 * T) {
    t.front() = 0.0;
  }
  if (std::abs(t.back() - T) <= 1e-9 * T) {
    t.back() = T;
  }
  if (t.back() != T) {
    throw DomainError(fmt::format("protocol samples end at t = {} but T = {}", t.back(), T));
  }
  ProtocolKind kind = ProtocolKind::human;
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) {
      throw DomainError("protocol 'kind' must be a string");
    }
    kind = protocol_kind_from_string(j["kind"].get<std::string>());
  }
  return Protocol(std::move(t), std::move(x), kind);
}

json to_json(const std::vector<DensityFrame>& frames)
{
  json out = json::array();
  for (const auto& f : frames) {
    out.push_back({{"t", f.t}, {"density", f.density}});
  }
  return out;
}

json to_json(const OptimizationTrace& trace)
{
  return json{{"seed", trace.seed},
              {"rng", trace.rng},
              {"N", trace.final_protocol.steps()},
              {"M", trace.final_protocol.lattice.count},
              {"T", trace.T},
              {"fidelities", trace.fidelities},
              {"sweep_bounds", trace.sweep_bounds},
              {"final_protocol", trace.final_protocol.indices},
              {"final_fidelity", trace.final_fidelity},
              {"updates", trace.updates},
              {"evaluations", trace.evaluations},
              {"sweeps", trace.sweeps},
              {"converged", trace.converged},
              {"stop_reason", std::string(to_string(trace.stop_reason))}};
}

json read_json_file(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw DomainError("cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DomainError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j)
{
  std::ofstream out(path);
  if (!out) {
    throw ResourceError("cannot write " + path.string());
  }
  out << j.dump(2) << '\n';
}

void write_metric_csv(const std::filesystem::path& path, const MetricTable& table)
{
  auto out = fmt::output_file(path.string());
  out.print("x0,g\n");
  for (std::size_t k = 0; k < table.x0().size(); ++k) {
    out.print("{:.12g},{:.12g}\n", table.x0()[k], table.values()[k]);
  }
}

void write_fidelity_csv(const std::filesystem::path& path, const std::vector<FidelityPoint>& rows)
{
  auto out = fmt::output_file(path.string());
  out.print("T,F,protocol_kind\n");
  for (const auto& r : rows) {
    out.print("{:.12g},{:.12g},{}\n", r.T, r.F, r.kind);
  }
}

void write_tunnel_csv(const std::filesystem::path& path, const TunnelCurve& curve)
{
  auto out = fmt::output_file(path.string());
  out.print("d,splitting,transfer_time,barrier_height,E0,tunneling_regime\n");
  for (const auto& s : curve.samples) {
    out.print("{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{}\n", s.d, s.splitting, s.transfer_time, s.barrier_height,
              s.E0, s.tunneling_regime ? 1 : 0);
  }
}

void write_ensemble_csv(const std::filesystem::path& path, const std::vector<OptimizationTrace>& traces)
{
  auto out = fmt::output_file(path.string());
  out.print("seed,final_fidelity,sweeps,updates\n");
  for (const auto& t : traces) {
    out.print("{},{:.12g},{},{}\n", t.seed, t.final_fidelity, t.sweeps, t.updates);
  }
}

void write_ground_state_csv(const std::filesystem::path& path, const WaveFunction& psi)
{
  const auto d = density_and_cdf(psi);
  auto out = fmt::output_file(path.string());
  out.print("x,psi,density,cdf\n");
  for (std::size_t i = 0; i < psi.size(); ++i) {
    out.print("{:.12g},{:.12g},{:.12g},{:.12g}\n", psi.grid().x(i), psi.amplitudes()(static_cast<Eigen::Index>(i)).real(),
              d.density[i], d.cdf[i]);
  }
}

} // namespace qmoves::app
