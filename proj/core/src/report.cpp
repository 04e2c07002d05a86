#include "imds/report.hpp"

#include <sstream>

#include <json.hpp>

#include "imds/version.hpp"

namespace imds {

VerifyRun run_verify(const ElaboratedSystem& sys, const ExplorationLimits& limits, int jobs) {
  VerifyRun run;
  run.lts = explore(sys, limits, jobs);
  if (run.lts.complete) {
    run.deadlocks = find_deadlocks(run.lts, sys);
    run.termination = detect_termination(run.lts, sys);
    run.analyzed = true;
  }
  return run;
}

namespace {

const char* kind_name(DeadlockKind k) {
  return k == DeadlockKind::Resource ? "resource" : "communication";
}
const char* scope_name(Scope s) { return s == Scope::Total ? "total" : "partial"; }

nlohmann::json witness_json(const DeadlockReport& report, const Lts& lts,
                            const ElaboratedSystem& sys) {
  nlohmann::json steps = nlohmann::json::array();
  for (std::size_t i = 0; i < report.witness_edges.size(); ++i) {
    const Edge& e = lts.edges[report.witness_edges[i]];
    const GroundAction& a = action_of(sys, e.action);
    nlohmann::json step;
    step["from"] = e.source;
    step["to"] = e.target;
    step["agent"] = sys.agents[a.in_agent].display_name;
    step["server"] = sys.server_name(a.server);
    step["rule"] = a.id;
    steps.push_back(std::move(step));
  }
  return steps;
}

nlohmann::json deadlock_json(const DeadlockReport& report, const VerifyRun& run,
                             const ElaboratedSystem& sys) {
  nlohmann::json d;
  d["kind"] = kind_name(report.kind);
  d["scope_agents"] = scope_name(report.scope_agents);
  d["scope_servers"] = scope_name(report.scope_servers);
  nlohmann::json agents = nlohmann::json::array();
  for (std::size_t i = 0; i < report.dead_agents.size(); ++i) {
    nlohmann::json a;
    a["name"] = sys.agents[report.dead_agents[i]].name;
    a["display"] = sys.agents[report.dead_agents[i]].display_name;
    a["cause"] = kind_name(report.agent_causes[i]);
    agents.push_back(std::move(a));
  }
  d["dead_agents"] = std::move(agents);
  nlohmann::json servers = nlohmann::json::array();
  for (int s : report.dead_servers) servers.push_back(sys.server_name(s));
  d["dead_servers"] = std::move(servers);
  d["configuration"] = report.config;
  d["witness"] = witness_json(report, run.lts, sys);
  CommGraph graph = server_view(report.witness_edges, run.lts, sys, report.dead_servers);
  d["server_view_dot"] = to_dot(graph, sys);
  SequenceDiagram diagram = agent_view(report.witness_edges, run.lts, sys);
  d["agent_view"] = render_sequence(diagram, sys);
  return d;
}

}  // namespace

std::string report_to_json(const VerifyRun& run, const ElaboratedSystem& sys) {
  nlohmann::json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["tool"]["name"] = kToolName;
  doc["tool"]["version"] = kToolVersion;

  nlohmann::json servers = nlohmann::json::array();
  for (const auto& s : sys.servers) servers.push_back(s.name);
  doc["model"]["servers"] = std::move(servers);
  nlohmann::json agents = nlohmann::json::array();
  for (const auto& a : sys.agents) {
    nlohmann::json e;
    e["name"] = a.name;
    e["display"] = a.display_name;
    agents.push_back(std::move(e));
  }
  doc["model"]["agents"] = std::move(agents);
  doc["model"]["ground_actions"] = sys.total_ground_actions();

  LtsStats st = stats(run.lts);
  doc["lts"]["configurations"] = st.configs;
  doc["lts"]["edges"] = st.edges;
  doc["lts"]["terminal"] = st.terminal;
  doc["lts"]["complete"] = st.complete;
  doc["complete"] = st.complete;

  if (run.analyzed) {
    nlohmann::json deadlocks = nlohmann::json::array();
    for (const auto& report : run.deadlocks)
      deadlocks.push_back(deadlock_json(report, run, sys));
    doc["deadlocks"] = std::move(deadlocks);
    doc["termination_configurations"] = run.termination.size();
  }
  return doc.dump(2) + "\n";
}

std::string report_to_text(const VerifyRun& run, const ElaboratedSystem& sys) {
  std::ostringstream os;
  LtsStats st = stats(run.lts);
  os << "model: " << sys.servers.size() << " server(s), " << sys.agents.size()
     << " agent(s), " << sys.total_ground_actions() << " ground action(s)\n";
  os << "state space: " << st.configs << " configuration(s), " << st.edges << " transition(s), "
     << st.terminal << " terminal" << (st.complete ? "" : " [truncated]") << "\n";
  if (!run.analyzed) {
    os << "exploration was truncated; analysis skipped (raise --max-states)\n";
    return os.str();
  }
  os << "termination configurations: " << run.termination.size() << "\n";
  if (run.deadlocks.empty()) {
    os << "no deadlock found\n";
    return os.str();
  }
  os << "deadlocks: " << run.deadlocks.size() << "\n";
  for (std::size_t i = 0; i < run.deadlocks.size(); ++i) {
    const DeadlockReport& r = run.deadlocks[i];
    os << "\n== deadlock " << (i + 1) << " ==\n";
    os << "kind: " << kind_name(r.kind) << "\n";
    os << "scope: " << scope_name(r.scope_agents) << " over agents, "
       << scope_name(r.scope_servers) << " over servers\n";
    os << "dead agents:";
    for (std::size_t k = 0; k < r.dead_agents.size(); ++k)
      os << ' ' << sys.agents[r.dead_agents[k]].display_name << '('
         << kind_name(r.agent_causes[k]) << ')';
    if (r.dead_agents.empty()) os << " none";
    os << "\n";
    os << "dead servers:";
    for (int s : r.dead_servers) os << ' ' << sys.server_name(s);
    if (r.dead_servers.empty()) os << " none";
    os << "\n";
    os << "witness (" << r.witness_edges.size() << " steps to configuration " << r.config
       << "):\n";
    for (int e : r.witness_edges) {
      const GroundAction& a = action_of(sys, run.lts.edges[e].action);
      os << "  " << sys.agents[a.in_agent].display_name << ": "
         << sys.service_name(a.server, a.in_service) << " at " << sys.server_name(a.server);
      if (a.has_output)
        os << " -> " << sys.service_name(a.out_server, a.out_service) << " to "
           << sys.server_name(a.out_server);
      else
        os << " -> terminates";
      os << "  [" << a.id << "]\n";
    }
    os << "stuck configuration: " << sys.describe(run.lts.configs[r.config]) << "\n";
    os << "server view (communication structure):\n";
    os << to_dot(server_view(r.witness_edges, run.lts, sys, r.dead_servers), sys);
    os << "agent view (message sequence):\n";
    os << render_sequence(agent_view(r.witness_edges, run.lts, sys), sys);
  }
  return os.str();
}

std::string lts_to_json(const Lts& lts, const ElaboratedSystem& sys) {
  nlohmann::json doc;
  doc["complete"] = lts.complete;
  nlohmann::json configs = nlohmann::json::array();
  for (const auto& cfg : lts.configs) configs.push_back(sys.describe(cfg));
  doc["configurations"] = std::move(configs);
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : lts.edges) {
    const GroundAction& a = action_of(sys, e.action);
    nlohmann::json j;
    j["from"] = e.source;
    j["to"] = e.target;
    j["agent"] = sys.agents[a.in_agent].name;
    j["server"] = sys.server_name(a.server);
    j["rule"] = a.id;
    edges.push_back(std::move(j));
  }
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

}  // namespace imds
