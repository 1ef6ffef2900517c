#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmoves/optimizer.hpp"
#include "qmoves/physics_config.hpp"
#include "qmoves/propagation.hpp"
#include "qmoves/protocol.hpp"
#include "qmoves/protocol_kit.hpp"
#include "qmoves/tunneling.hpp"

namespace qmoves::app {

using nlohmann::json;

json to_json(const PhysicsConfig& cfg);
/// Overlays the keys present in `j` onto `base`. Unknown keys and wrong types are DomainErrors.
PhysicsConfig physics_from_json(const json& j, PhysicsConfig base = {});

json to_json(const PositionLattice& lattice);

/// {"T": ..., "samples": [[t, x0], ...], "kind": ...}
json to_json(const Protocol& p);
Protocol protocol_from_json(const json& j);

json to_json(const std::vector<DensityFrame>& frames);

json to_json(const OptimizationTrace& trace);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

void write_metric_csv(const std::filesystem::path& path, const MetricTable& table);
void write_fidelity_csv(const std::filesystem::path& path, const std::vector<FidelityPoint>& rows);
void write_tunnel_csv(const std::filesystem::path& path, const TunnelCurve& curve);
void write_ensemble_csv(const std::filesystem::path& path, const std::vector<OptimizationTrace>& traces);
void write_ground_state_csv(const std::filesystem::path& path, const WaveFunction& psi);

} // namespace qmoves::app
