#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "imds/ast.hpp"
#include "imds/diagnostics.hpp"

namespace imds {

/// Flattened state or service namespace of one server type. A scalar
/// declaration occupies one slot; an array declaration `name[k]` occupies k
/// slots named `name[1]`..`name[k]`, in declaration order.
struct SymbolTable {
  struct Entry {
    Ident name;
    long arity = 0;  // 0 = scalar
    int base = 0;    // first flat slot
  };
  std::vector<Entry> entries;
  std::vector<std::string> flat_names;

  int size() const { return static_cast<int>(flat_names.size()); }
  const Entry* find(const Ident& name) const {
    for (const auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }
};

struct ServerInstance {
  std::string name;  // "markerE[1]", "lotM"
  int type_index = -1;
  std::vector<int> bound_agents;   // flattened formal agent slots
  std::vector<int> bound_servers;  // flattened formal server slots
  int init_state = -1;             // ground state id
};

struct AgentInstance {
  std::string name;          // "AMP[1]", "B"
  std::string display_name;  // "AMP", "AMP__1", "B"
};

/// One ground instance of an action rule, fully resolved against a server
/// instance and a replicator valuation.
struct GroundAction {
  int server = -1;        // owning instance
  int rule_ordinal = -1;  // rule position within the owning type
  std::vector<long> valuation;
  int in_agent = -1;
  int in_service = -1;  // ground service id of the owning type
  int in_state = -1;    // ground state id of the owning type
  bool has_output = false;
  int out_agent = -1;
  int out_server = -1;   // target instance
  int out_service = -1;  // ground service id of the target's type
  int out_state = -1;    // ground state id of the owning type
  std::string id;        // stable: "markerE[1]#4<i=1,j=2>"
};

/// Global snapshot: one ground state per server instance, and per agent either
/// a pending message or the terminated mark.
struct Configuration {
  struct Slot {
    int32_t server = -1;
    int32_t service = -1;
    bool terminated() const { return server < 0; }
    bool operator==(const Slot&) const = default;
  };
  std::vector<int32_t> server_states;
  std::vector<Slot> agent_slots;
  bool operator==(const Configuration&) const = default;
};

struct ConfigHash {
  std::size_t operator()(const Configuration& c) const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    for (auto s : c.server_states) mix(static_cast<std::uint64_t>(s) + 1);
    for (const auto& slot : c.agent_slots) {
      mix(static_cast<std::uint64_t>(slot.server) + 2);
      mix(static_cast<std::uint64_t>(slot.service) + 2);
    }
    return static_cast<std::size_t>(h);
  }
};

/// A ground, verifiable system: no unresolved names or index expressions
/// remain. Immutable after construction and safe to share across threads.
/// Ordering of servers, agents, and ground actions follows declaration order
/// and is the canonical tie-break everywhere downstream.
struct ElaboratedSystem {
  SystemDecl decl;
  std::vector<ServerInstance> servers;
  std::vector<AgentInstance> agents;
  std::vector<SymbolTable> state_symbols;    // per type
  std::vector<SymbolTable> service_symbols;  // per type
  std::vector<std::vector<GroundAction>> actions_by_server;
  Configuration initial;
  std::vector<Diagnostic> warnings;

  const std::string& server_name(int server) const { return servers[server].name; }
  const std::string& state_name(int server, int state) const {
    return state_symbols[servers[server].type_index].flat_names[state];
  }
  const std::string& service_name(int server, int service) const {
    return service_symbols[servers[server].type_index].flat_names[service];
  }
  int find_server(const std::string& name) const {
    for (std::size_t i = 0; i < servers.size(); ++i)
      if (servers[i].name == name) return static_cast<int>(i);
    return -1;
  }
  int find_agent(const std::string& name) const {
    for (std::size_t i = 0; i < agents.size(); ++i)
      if (agents[i].name == name) return static_cast<int>(i);
    return -1;
  }
  std::size_t total_ground_actions() const {
    std::size_t n = 0;
    for (const auto& v : actions_by_server) n += v.size();
    return n;
  }
  std::string describe(const Configuration& cfg) const;
  std::string describe_slot(const Configuration::Slot& slot) const;
};

struct ElaborationOptions {
  /// When set, rules whose input message cannot name the owning server are
  /// dropped with a warning instead of failing elaboration. Lets models with
  /// misaddressed rules be explored as written.
  bool lenient = false;
};

struct ElaborationResult {
  std::optional<ElaboratedSystem> system;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return system.has_value(); }
};

/// Structural and referential checks; empty result means the declaration
/// satisfies every model invariant and will elaborate.
std::vector<Diagnostic> validate(const SystemDecl& decl);

/// Expands constants, replicators, and formal bindings into a ground system.
ElaborationResult elaborate(const SystemDecl& decl, const ElaborationOptions& opts = {});

/// The configuration assembled from the init block.
Configuration initial_configuration(const ElaboratedSystem& sys);

}  // namespace imds
