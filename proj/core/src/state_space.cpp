#include "imds/state_space.hpp"

#include <cassert>
#include <future>
#include <thread>
#include <unordered_map>

namespace imds {

bool is_enabled(const Configuration& cfg, const ElaboratedSystem& sys, const GroundAction& a) {
  (void)sys;
  if (cfg.server_states[a.server] != a.in_state) return false;
  const Configuration::Slot& slot = cfg.agent_slots[a.in_agent];
  return !slot.terminated() && slot.server == a.server && slot.service == a.in_service;
}

std::vector<ActionRef> enabled_actions(const Configuration& cfg, const ElaboratedSystem& sys) {
  std::vector<ActionRef> out;
  for (int s = 0; s < static_cast<int>(sys.actions_by_server.size()); ++s) {
    const auto& actions = sys.actions_by_server[s];
    for (int i = 0; i < static_cast<int>(actions.size()); ++i)
      if (is_enabled(cfg, sys, actions[i])) out.push_back({s, i});
  }
  return out;
}

Configuration step(const Configuration& cfg, const ElaboratedSystem& sys, const GroundAction& a) {
  assert(is_enabled(cfg, sys, a) && "stepping a disabled action");
  Configuration next = cfg;
  next.server_states[a.server] = a.out_state;
  if (a.has_output)
    next.agent_slots[a.in_agent] = {static_cast<int32_t>(a.out_server),
                                    static_cast<int32_t>(a.out_service)};
  else
    next.agent_slots[a.in_agent] = {};  // terminated
  return next;
}

namespace {

struct Successor {
  ActionRef action;
  Configuration config;
};

std::vector<Successor> successors_of(const Configuration& cfg, const ElaboratedSystem& sys) {
  std::vector<Successor> out;
  for (ActionRef ref : enabled_actions(cfg, sys))
    out.push_back({ref, step(cfg, sys, action_of(sys, ref))});
  return out;
}

}  // namespace

Lts explore(const ElaboratedSystem& sys, const ExplorationLimits& limits, int jobs) {
  Lts lts;
  std::unordered_map<Configuration, int, ConfigHash> index;

  lts.configs.push_back(sys.initial);
  lts.parent_edge.push_back(-1);
  index.emplace(sys.initial, 0);

  if (jobs < 1) jobs = 1;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw > 0 && static_cast<unsigned>(jobs) > hw) jobs = static_cast<int>(hw);

  std::size_t head = 0;
  while (head < lts.configs.size()) {
    // One BFS layer at a time: successor computation may fan out to workers,
    // but results are committed sequentially in source order so the published
    // LTS is identical to the single-threaded walk.
    std::size_t layer_end = lts.configs.size();
    std::vector<std::vector<Successor>> layer(layer_end - head);
    if (jobs == 1 || layer.size() < 2) {
      for (std::size_t i = head; i < layer_end; ++i)
        layer[i - head] = successors_of(lts.configs[i], sys);
    } else {
      std::size_t chunk = (layer.size() + jobs - 1) / jobs;
      std::vector<std::future<void>> work;
      for (int w = 0; w < jobs; ++w) {
        std::size_t lo = head + w * chunk;
        std::size_t hi = std::min(layer_end, lo + chunk);
        if (lo >= hi) break;
        work.push_back(std::async(std::launch::async, [&, lo, hi] {
          for (std::size_t i = lo; i < hi; ++i)
            layer[i - head] = successors_of(lts.configs[i], sys);
        }));
      }
      for (auto& f : work) f.get();
    }

    for (std::size_t i = head; i < layer_end; ++i) {
      for (Successor& succ : layer[i - head]) {
        auto it = index.find(succ.config);
        if (it != index.end()) {
          if (lts.edges.size() >= limits.max_edges) {
            lts.complete = false;
            continue;
          }
          lts.edges.push_back({static_cast<int>(i), succ.action, it->second});
          continue;
        }
        // A new configuration needs both a slot and its discovery edge.
        if (lts.configs.size() >= limits.max_configs ||
            lts.edges.size() >= limits.max_edges) {
          lts.complete = false;
          continue;
        }
        int target = static_cast<int>(lts.configs.size());
        index.emplace(succ.config, target);
        lts.configs.push_back(std::move(succ.config));
        lts.parent_edge.push_back(static_cast<int>(lts.edges.size()));
        lts.edges.push_back({static_cast<int>(i), succ.action, target});
      }
    }
    head = layer_end;
  }

  lts.out_range.assign(lts.configs.size(), {0, 0});
  std::size_t e = 0;
  for (std::size_t c = 0; c < lts.configs.size(); ++c) {
    std::size_t first = e;
    while (e < lts.edges.size() && lts.edges[e].source == static_cast<int>(c)) ++e;
    lts.out_range[c] = {static_cast<int>(first), static_cast<int>(e)};
  }
  return lts;
}

LtsStats stats(const Lts& lts) {
  LtsStats s;
  s.configs = lts.configs.size();
  s.edges = lts.edges.size();
  s.complete = lts.complete;
  for (const auto& [first, last] : lts.out_range)
    if (first == last) ++s.terminal;
  return s;
}

TransitionLabel label_of(const ElaboratedSystem& sys, const Edge& e) {
  const GroundAction& a = action_of(sys, e.action);
  return TransitionLabel{a.in_agent, a.server, a.id};
}

}  // namespace imds
