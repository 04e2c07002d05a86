#include "imds/views.hpp"

#include <algorithm>
#include <sstream>

namespace imds {

std::vector<std::pair<std::string, std::string>> rename_agents(const ElaboratedSystem& sys) {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(sys.agents.size());
  for (const auto& a : sys.agents) out.emplace_back(a.name, a.display_name);
  return out;
}

namespace {

// Servers holding pending messages at the start of the path, in declaration
// order; these are the graph's seed nodes even for an empty path.
std::vector<int> initial_holders(const Configuration& cfg) {
  std::vector<int> out;
  for (const auto& slot : cfg.agent_slots) {
    if (slot.terminated()) continue;
    if (std::find(out.begin(), out.end(), slot.server) == out.end())
      out.push_back(slot.server);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

CommGraph server_view(const std::vector<int>& witness_edges, const Lts& lts,
                      const ElaboratedSystem& sys, const std::vector<int>& dead_servers) {
  CommGraph graph;
  auto node_index = [&](int server) {
    for (std::size_t i = 0; i < graph.nodes.size(); ++i)
      if (graph.nodes[i].server == server) return static_cast<int>(i);
    bool dead = std::find(dead_servers.begin(), dead_servers.end(), server) !=
                dead_servers.end();
    graph.nodes.push_back({server, dead});
    return static_cast<int>(graph.nodes.size() - 1);
  };

  for (int server : initial_holders(lts.configs[0])) node_index(server);

  for (int e : witness_edges) {
    const GroundAction& a = action_of(sys, lts.edges[e].action);
    node_index(a.server);
    if (!a.has_output) continue;
    node_index(a.out_server);
    CommGraph::MessageEdge edge{a.server, a.out_server, a.in_agent, a.out_service};
    bool present = false;
    for (const auto& existing : graph.edges)
      if (existing.from == edge.from && existing.to == edge.to &&
          existing.agent == edge.agent && existing.service == edge.service)
        present = true;
    if (!present) graph.edges.push_back(edge);
  }
  return graph;
}

SequenceDiagram agent_view(const std::vector<int>& witness_edges, const Lts& lts,
                           const ElaboratedSystem& sys) {
  SequenceDiagram diagram;
  for (std::size_t s = 0; s < sys.servers.size(); ++s)
    diagram.lifelines.push_back(static_cast<int>(s));
  for (int e : witness_edges) {
    const GroundAction& a = action_of(sys, lts.edges[e].action);
    diagram.events.push_back(
        {SequenceDiagram::Event::Receive, a.server, -1, a.in_agent, a.in_service, -1});
    if (a.has_output)
      diagram.events.push_back({SequenceDiagram::Event::Send, a.server, a.out_server,
                                a.in_agent, a.out_service, -1});
    diagram.events.push_back(
        {SequenceDiagram::Event::StateChange, a.server, -1, -1, -1, a.out_state});
  }
  return diagram;
}

std::string to_dot(const CommGraph& graph, const ElaboratedSystem& sys) {
  std::ostringstream os;
  os << "digraph communication {\n";
  for (const auto& node : graph.nodes) {
    os << "  \"" << sys.server_name(node.server) << "\"";
    if (node.dead) os << " [color=red, peripheries=2, label=\""
                      << sys.server_name(node.server) << "\\n(deadlocked)\"]";
    os << ";\n";
  }
  for (const auto& edge : graph.edges) {
    os << "  \"" << sys.server_name(edge.from) << "\" -> \"" << sys.server_name(edge.to)
       << "\" [label=\"" << sys.agents[edge.agent].display_name << "."
       << sys.service_name(edge.to, edge.service) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

std::string render_sequence(const SequenceDiagram& diagram, const ElaboratedSystem& sys) {
  std::ostringstream os;
  // Header row of lifeline names in fixed-width columns.
  std::size_t width = 0;
  for (int s : diagram.lifelines) width = std::max(width, sys.server_name(s).size());
  width += 2;
  for (int s : diagram.lifelines) {
    std::string name = sys.server_name(s);
    os << name << std::string(width - name.size(), ' ');
  }
  os << "\n";
  for (const auto& ev : diagram.events) {
    switch (ev.kind) {
      case SequenceDiagram::Event::Receive:
        os << sys.server_name(ev.server) << " <- ("
           << sys.agents[ev.agent].display_name << "."
           << sys.service_name(ev.server, ev.service) << ")\n";
        break;
      case SequenceDiagram::Event::Send:
        os << sys.server_name(ev.server) << " ->("
           << sys.agents[ev.agent].display_name << "."
           << sys.service_name(ev.peer, ev.service) << ") " << sys.server_name(ev.peer)
           << "\n";
        break;
      case SequenceDiagram::Event::StateChange:
        os << sys.server_name(ev.server) << " := "
           << sys.state_name(ev.server, ev.state) << "\n";
        break;
    }
  }
  return os.str();
}

}  // namespace imds
