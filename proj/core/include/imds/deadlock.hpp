#pragma once

#include <vector>

#include "imds/state_space.hpp"

namespace imds {

/// Per agent and per server: the configurations from which some future path
/// still contains a transition of that entity. Complement = "never progresses
/// again". Computed as a backward-reachability closure over the full LTS.
struct ProgressSets {
  std::vector<std::vector<bool>> agent_can_progress;   // [agent][config]
  std::vector<std::vector<bool>> server_can_progress;  // [server][config]
};

struct DeadSets {
  std::vector<int> agents;   // sorted ascending
  std::vector<int> servers;  // sorted ascending
  bool empty() const { return agents.empty() && servers.empty(); }
  bool operator==(const DeadSets&) const = default;
  bool subset_of(const DeadSets& other) const;
};

/// Why a dead agent is stuck: Resource = the target server could accept the
/// pending service in some state that never occurs again; Communication = no
/// rule accepts it at all.
enum class DeadlockKind { Resource, Communication };

enum class Scope { Partial, Total };

struct DeadlockReport {
  /// Communication when dead servers exist (the fault is visible in the
  /// server view); Resource otherwise.
  DeadlockKind kind = DeadlockKind::Resource;
  /// Over agents: Total iff every non-terminated agent at the witness
  /// configuration is dead and at least one exists.
  Scope scope_agents = Scope::Partial;
  /// Over servers: Total iff every server of the system is dead.
  Scope scope_servers = Scope::Partial;
  std::vector<int> dead_agents;
  std::vector<DeadlockKind> agent_causes;  // parallel to dead_agents
  std::vector<int> dead_servers;
  int config = -1;                 // earliest configuration exhibiting the dead sets
  std::vector<int> witness_edges;  // shortest path from configuration 0
};

/// Throws std::invalid_argument when the LTS is truncated; every verdict below
/// is only meaningful over the complete reachable space.
ProgressSets progress_sets(const Lts& lts, const ElaboratedSystem& sys);

DeadSets dead_sets(int config, const Lts& lts, const ElaboratedSystem& sys,
                   const ProgressSets& ps);

DeadlockKind classify_agent(const Configuration& cfg, const ElaboratedSystem& sys, int agent);

/// One report per maximal dead-set signature, at the BFS-earliest
/// configuration exhibiting it, ordered by witness length then by signature.
std::vector<DeadlockReport> find_deadlocks(const Lts& lts, const ElaboratedSystem& sys);

/// Configurations where every agent has terminated.
std::vector<int> detect_termination(const Lts& lts, const ElaboratedSystem& sys);

}  // namespace imds
