#pragma once

#include <string>

#include <json.hpp>

#include "algcon/graph_model.hpp"

namespace algcon {

/// {"n": N, "positions": [[x, y], ...], "edges": [[i, j, w], ...]}, 0-based.
/// "positions" is omitted for non-geometric graphs.
nlohmann::json topology_to_json(const Topology& topo);
Topology topology_from_json(const nlohmann::json& doc);

Topology load_topology(const std::string& path);
void save_topology(const Topology& topo, const std::string& path);

}  // namespace algcon
