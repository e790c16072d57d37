#include "algcon/topology_io.hpp"

#include <fstream>
#include <stdexcept>

namespace algcon {

nlohmann::json topology_to_json(const Topology& topo) {
  nlohmann::json doc;
  doc["n"] = topo.size();
  if (topo.has_positions()) {
    auto pos = nlohmann::json::array();
    for (const auto& p : topo.positions()) pos.push_back({p.x, p.y});
    doc["positions"] = std::move(pos);
  }
  auto edges = nlohmann::json::array();
  for (const auto& e : topo.edges()) edges.push_back({e.i, e.j, e.w});
  doc["edges"] = std::move(edges);
  return doc;
}

Topology topology_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("n")) throw std::invalid_argument("topology document needs an 'n' field");
  const auto n = doc.at("n").get<std::size_t>();
  std::vector<Point> positions;
  if (doc.contains("positions")) {
    for (const auto& p : doc.at("positions")) {
      if (!p.is_array() || p.size() != 2) throw std::invalid_argument("positions entries must be [x, y]");
      positions.push_back({p[0].get<double>(), p[1].get<double>()});
    }
  }
  std::vector<Edge> edges;
  if (doc.contains("edges")) {
    for (const auto& e : doc.at("edges")) {
      if (!e.is_array() || (e.size() != 2 && e.size() != 3)) {
        throw std::invalid_argument("edges entries must be [i, j] or [i, j, w]");
      }
      auto i = e[0].get<std::size_t>();
      auto j = e[1].get<std::size_t>();
      if (i > j) std::swap(i, j);
      edges.push_back({i, j, e.size() == 3 ? e[2].get<double>() : 1.0});
    }
  }
  return Topology::from_edges(n, edges, std::move(positions));
}

Topology load_topology(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open topology file " + path);
  return topology_from_json(nlohmann::json::parse(f));
}

void save_topology(const Topology& topo, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << topology_to_json(topo).dump(2) << '\n';
}

}  // namespace algcon
