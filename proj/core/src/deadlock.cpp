#include "imds/deadlock.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

namespace imds {

bool DeadSets::subset_of(const DeadSets& other) const {
  return std::includes(other.agents.begin(), other.agents.end(), agents.begin(),
                       agents.end()) &&
         std::includes(other.servers.begin(), other.servers.end(), servers.begin(),
                       servers.end());
}

namespace {

void require_complete(const Lts& lts) {
  if (!lts.complete)
    throw std::invalid_argument(
        "deadlock analysis requires a complete state space; raise the exploration limit");
}

// Backward closure over all edges of the given seed configurations.
std::vector<bool> backward_closure(const Lts& lts,
                                   const std::vector<std::vector<int>>& reverse,
                                   std::vector<bool> seeds) {
  std::deque<int> queue;
  for (std::size_t c = 0; c < seeds.size(); ++c)
    if (seeds[c]) queue.push_back(static_cast<int>(c));
  while (!queue.empty()) {
    int c = queue.front();
    queue.pop_front();
    for (int pred : reverse[c]) {
      if (!seeds[pred]) {
        seeds[pred] = true;
        queue.push_back(pred);
      }
    }
  }
  return seeds;
}

}  // namespace

ProgressSets progress_sets(const Lts& lts, const ElaboratedSystem& sys) {
  require_complete(lts);
  std::vector<std::vector<int>> reverse(lts.configs.size());
  for (const Edge& e : lts.edges) reverse[e.target].push_back(e.source);

  ProgressSets ps;
  ps.agent_can_progress.resize(sys.agents.size());
  ps.server_can_progress.resize(sys.servers.size());

  for (std::size_t a = 0; a < sys.agents.size(); ++a) {
    std::vector<bool> seeds(lts.configs.size(), false);
    for (const Edge& e : lts.edges)
      if (action_of(sys, e.action).in_agent == static_cast<int>(a)) seeds[e.source] = true;
    ps.agent_can_progress[a] = backward_closure(lts, reverse, std::move(seeds));
  }
  for (std::size_t s = 0; s < sys.servers.size(); ++s) {
    std::vector<bool> seeds(lts.configs.size(), false);
    for (const Edge& e : lts.edges)
      if (e.action.server == static_cast<int>(s)) seeds[e.source] = true;
    ps.server_can_progress[s] = backward_closure(lts, reverse, std::move(seeds));
  }
  return ps;
}

DeadSets dead_sets(int config, const Lts& lts, const ElaboratedSystem& sys,
                   const ProgressSets& ps) {
  DeadSets ds;
  const Configuration& cfg = lts.configs[config];
  for (std::size_t a = 0; a < sys.agents.size(); ++a) {
    if (cfg.agent_slots[a].terminated()) continue;
    if (!ps.agent_can_progress[a][config]) ds.agents.push_back(static_cast<int>(a));
  }
  for (std::size_t s = 0; s < sys.servers.size(); ++s) {
    if (ps.server_can_progress[s][config]) continue;
    bool pending_here = false;
    for (const auto& slot : cfg.agent_slots)
      if (!slot.terminated() && slot.server == static_cast<int>(s)) pending_here = true;
    if (pending_here) ds.servers.push_back(static_cast<int>(s));
  }
  return ds;
}

DeadlockKind classify_agent(const Configuration& cfg, const ElaboratedSystem& sys, int agent) {
  const Configuration::Slot& slot = cfg.agent_slots[agent];
  if (slot.terminated()) return DeadlockKind::Communication;
  for (const GroundAction& a : sys.actions_by_server[slot.server])
    if (a.in_agent == agent && a.in_service == slot.service) return DeadlockKind::Resource;
  return DeadlockKind::Communication;
}

std::vector<DeadlockReport> find_deadlocks(const Lts& lts, const ElaboratedSystem& sys) {
  require_complete(lts);
  ProgressSets ps = progress_sets(lts, sys);

  // First configuration per distinct signature, in BFS order.
  std::map<std::pair<std::vector<int>, std::vector<int>>, int> first_config;
  for (std::size_t c = 0; c < lts.configs.size(); ++c) {
    DeadSets ds = dead_sets(static_cast<int>(c), lts, sys, ps);
    if (ds.empty()) continue;
    first_config.emplace(std::make_pair(ds.agents, ds.servers), static_cast<int>(c));
  }

  std::vector<std::pair<DeadSets, int>> signatures;
  for (const auto& [key, cfg] : first_config)
    signatures.push_back({DeadSets{key.first, key.second}, cfg});

  std::vector<DeadlockReport> reports;
  for (const auto& [sig, cfg_index] : signatures) {
    bool maximal = true;
    for (const auto& [other, other_cfg] : signatures) {
      (void)other_cfg;
      if (&other == &sig) continue;
      if (!(other == sig) && sig.subset_of(other)) {
        maximal = false;
        break;
      }
    }
    if (!maximal) continue;

    DeadlockReport report;
    report.dead_agents = sig.agents;
    report.dead_servers = sig.servers;
    report.config = cfg_index;
    const Configuration& cfg = lts.configs[cfg_index];
    for (int a : sig.agents) report.agent_causes.push_back(classify_agent(cfg, sys, a));
    report.kind =
        sig.servers.empty() ? DeadlockKind::Resource : DeadlockKind::Communication;

    int live = 0;
    for (const auto& slot : cfg.agent_slots)
      if (!slot.terminated()) ++live;
    report.scope_agents = (live > 0 && static_cast<int>(sig.agents.size()) == live)
                              ? Scope::Total
                              : Scope::Partial;
    report.scope_servers = sig.servers.size() == sys.servers.size() ? Scope::Total
                                                                    : Scope::Partial;

    std::vector<int> path;
    for (int c = cfg_index; lts.parent_edge[c] >= 0; c = lts.edges[lts.parent_edge[c]].source)
      path.push_back(lts.parent_edge[c]);
    std::reverse(path.begin(), path.end());
    report.witness_edges = std::move(path);
    reports.push_back(std::move(report));
  }

  std::sort(reports.begin(), reports.end(), [](const DeadlockReport& a, const DeadlockReport& b) {
    if (a.witness_edges.size() != b.witness_edges.size())
      return a.witness_edges.size() < b.witness_edges.size();
    if (a.dead_agents != b.dead_agents) return a.dead_agents < b.dead_agents;
    return a.dead_servers < b.dead_servers;
  });
  return reports;
}

std::vector<int> detect_termination(const Lts& lts, const ElaboratedSystem& sys) {
  (void)sys;
  std::vector<int> out;
  for (std::size_t c = 0; c < lts.configs.size(); ++c) {
    const Configuration& cfg = lts.configs[c];
    bool all_done = true;
    for (const auto& slot : cfg.agent_slots)
      if (!slot.terminated()) all_done = false;
    if (all_done) out.push_back(static_cast<int>(c));
  }
  return out;
}

}  // namespace imds
