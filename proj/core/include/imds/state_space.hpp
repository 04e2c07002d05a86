#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "imds/elaborate.hpp"

namespace imds {

/// Reference to one ground action: owning server instance and its position in
/// that server's canonical action list.
struct ActionRef {
  int server = -1;
  int index = -1;
  bool operator==(const ActionRef&) const = default;
};

inline const GroundAction& action_of(const ElaboratedSystem& sys, ActionRef ref) {
  return sys.actions_by_server[ref.server][ref.index];
}

/// Label of an LTS edge: the moved agent, the executing server, and the
/// ground-rule identifier.
struct TransitionLabel {
  int agent = -1;
  int server = -1;
  std::string rule_id;
};

struct Edge {
  int source = -1;
  ActionRef action;
  int target = -1;
};

/// The reachable labeled transition system. Configuration 0 is the initial
/// configuration; configuration order is BFS discovery order under the
/// canonical action ordering, so indices double as shortest-path depths.
/// Edges are grouped by source in ascending order.
struct Lts {
  std::vector<Configuration> configs;
  std::vector<Edge> edges;
  std::vector<int> parent_edge;  // discovery edge per config; -1 for the initial
  bool complete = true;

  std::vector<std::pair<int, int>> out_range;  // per config: [first, last) into edges

  int depth_of(int config) const {
    int d = 0;
    while (parent_edge[config] >= 0) {
      config = edges[parent_edge[config]].source;
      ++d;
    }
    return d;
  }
};

struct ExplorationLimits {
  std::size_t max_configs = 1'000'000;
  std::size_t max_edges = std::numeric_limits<std::size_t>::max();
};

struct LtsStats {
  std::size_t configs = 0;
  std::size_t edges = 0;
  std::size_t terminal = 0;
  bool complete = true;
};

/// Ground actions enabled at `cfg`, in canonical order (server declaration
/// order, then rule order, then index-valuation/agent order).
std::vector<ActionRef> enabled_actions(const Configuration& cfg, const ElaboratedSystem& sys);

bool is_enabled(const Configuration& cfg, const ElaboratedSystem& sys, const GroundAction& a);

/// Fires one action: the owning server takes the output state and the consumed
/// agent's slot becomes the output message (or terminated). Everything else is
/// untouched. Precondition: the action is enabled at `cfg`.
Configuration step(const Configuration& cfg, const ElaboratedSystem& sys, const GroundAction& a);

/// Exhaustive BFS from the initial configuration with value-hashed
/// deduplication. `complete` is false iff a limit cut the search short.
/// `jobs` caps internal workers; the result is byte-identical for any value.
Lts explore(const ElaboratedSystem& sys, const ExplorationLimits& limits = {}, int jobs = 1);

LtsStats stats(const Lts& lts);

TransitionLabel label_of(const ElaboratedSystem& sys, const Edge& e);

}  // namespace imds
