#pragma once

#include <string>
#include <vector>

#include "imds/deadlock.hpp"
#include "imds/state_space.hpp"

namespace imds {

/// Flat display names for agents: index 1 keeps the base name, index k >= 2
/// becomes base__(k-1), scalar agents keep their own name.
std::vector<std::pair<std::string, std::string>> rename_agents(const ElaboratedSystem& sys);

/// Communication structure of a trace: servers as nodes, one directed edge per
/// distinct (sender, receiver, agent, service) message occurrence, dead
/// servers highlighted.
struct CommGraph {
  struct Node {
    int server = -1;
    bool dead = false;
  };
  struct MessageEdge {
    int from = -1;
    int to = -1;
    int agent = -1;
    int service = -1;  // ground service id of the receiver's type
  };
  std::vector<Node> nodes;
  std::vector<MessageEdge> edges;
};

/// The same trace grouped by message flow: lifelines are the servers, message
/// arrows and state changes appear in path order.
struct SequenceDiagram {
  struct Event {
    enum Kind { Receive, Send, StateChange } kind = Receive;
    int server = -1;      // executing / changing server
    int peer = -1;        // Send: receiving server
    int agent = -1;       // Receive/Send
    int service = -1;     // Receive: of server's type; Send: of peer's type
    int state = -1;       // StateChange: new ground state
  };
  std::vector<int> lifelines;  // server indices in declaration order
  std::vector<Event> events;
};

CommGraph server_view(const std::vector<int>& witness_edges, const Lts& lts,
                      const ElaboratedSystem& sys, const std::vector<int>& dead_servers = {});

SequenceDiagram agent_view(const std::vector<int>& witness_edges, const Lts& lts,
                           const ElaboratedSystem& sys);

/// Graphviz rendering; dead servers carry color and peripheries attributes.
std::string to_dot(const CommGraph& graph, const ElaboratedSystem& sys);

/// Line-oriented rendering: a header row of lifeline names, then one event per
/// line ("A ->(agent.service) B" arrows, "S <- (agent.service)" receive marks,
/// "S := state" changes).
std::string render_sequence(const SequenceDiagram& diagram, const ElaboratedSystem& sys);

}  // namespace imds
