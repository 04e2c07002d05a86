#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "imds/ast.hpp"
#include "imds/diagnostics.hpp"

namespace imds {

enum class NodeKind { Lot, Marker };

/// Topological map of acquirable places: lots and markers as nodes, adjacency
/// as undirected edges, plus lots usable as diversion parking for a marker.
struct ResourceGraph {
  struct Node {
    std::string name;
    NodeKind kind = NodeKind::Lot;
  };
  std::vector<Node> nodes;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::pair<int, int>> parking;  // (marker, lot)

  int find(std::string_view name) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].name == name) return static_cast<int>(i);
    return -1;
  }
  bool adjacent(int a, int b) const {
    for (auto [x, y] : edges)
      if ((x == a && y == b) || (x == b && y == a)) return true;
    return false;
  }
  int parking_of(int marker) const {
    for (auto [m, l] : parking)
      if (m == marker) return l;
    return -1;
  }
};

struct Itinerary {
  std::string agent;
  std::vector<int> path;  // node indices; consecutive nodes are adjacent
};

struct GenOptions {
  bool avoidance = false;
};

struct Scenario {
  ResourceGraph graph;
  std::vector<Itinerary> itineraries;
  GenOptions options;
};

struct ScenarioParseResult {
  std::optional<Scenario> scenario;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return scenario.has_value(); }
};

/// Parses the line-oriented scenario format:
///   node <name> lot|marker
///   edge <name> <name>
///   parking <marker> <lot>
///   itinerary <agent>: <name> -> <name> -> ...
///   option avoidance on|off
/// '#' starts a comment.
ScenarioParseResult parse_scenario(std::string_view text);

struct GenerateResult {
  std::optional<SystemDecl> decl;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return decl.has_value(); }
};

/// Translates a scenario into a model implementing the acquire-before-release
/// hop protocol: the holder tries the next node, a free node grants and
/// reserves, the holder releases itself and takes the granted node. With
/// avoidance on, a node refuses ('not') a head-on try from an agent standing
/// at a parking-equipped marker; the refused agent waits out the conflict in
/// the parking lot and then retries.
GenerateResult generate(const ResourceGraph& graph, const std::vector<Itinerary>& itineraries,
                        const GenOptions& options);

GenerateResult generate(const Scenario& scenario);

}  // namespace imds
