#include "imds/promela.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace imds {

namespace {

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
      out += c;
    else if (c == '[')
      out += '_';
    // ']' and any other punctuation drop out
  }
  return out;
}

}  // namespace

PromelaModel export_promela(const ElaboratedSystem& sys) {
  std::ostringstream os;
  nlohmann::json manifest;

  int cap = std::max<int>(1, static_cast<int>(sys.agents.size()));

  // Unique identifiers per server, agent, and message kind.
  std::vector<std::string> srv(sys.servers.size());
  std::map<std::string, int> used;
  for (std::size_t s = 0; s < sys.servers.size(); ++s) {
    std::string base = sanitize(sys.servers[s].name);
    if (int n = used[base]++; n > 0) base += "_" + std::to_string(n);
    srv[s] = base;
  }

  // Message constants: one per (agent, server, ground service) that can occur.
  std::map<std::pair<int, std::pair<int, int>>, int> msg_const;
  auto message_id = [&](int agent, int server, int service) {
    auto key = std::make_pair(agent, std::make_pair(server, service));
    auto it = msg_const.find(key);
    if (it != msg_const.end()) return it->second;
    int id = static_cast<int>(msg_const.size()) + 1;
    msg_const.emplace(key, id);
    return id;
  };
  auto message_name = [&](int agent, int server, int service) {
    return "M_" + sanitize(sys.agents[agent].name) + "__" + srv[server] + "__" +
           sanitize(sys.service_name(server, service));
  };

  // Collect every possible message: initial pendings plus rule outputs (and
  // inputs, which must already be covered but are added for safety).
  for (std::size_t a = 0; a < sys.agents.size(); ++a) {
    const auto& slot = sys.initial.agent_slots[a];
    if (!slot.terminated()) message_id(static_cast<int>(a), slot.server, slot.service);
  }
  for (const auto& actions : sys.actions_by_server)
    for (const GroundAction& g : actions) {
      message_id(g.in_agent, g.server, g.in_service);
      if (g.has_output) message_id(g.out_agent, g.out_server, g.out_service);
    }

  os << "/* generated client-server model; deadlocks appear as invalid end states */\n";
  os << "#define N_AGENTS " << sys.agents.size() << "\n\n";

  std::vector<std::pair<std::pair<int, std::pair<int, int>>, int>> ordered(
      msg_const.begin(), msg_const.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  for (const auto& [key, id] : ordered)
    os << "#define " << message_name(key.first, key.second.first, key.second.second) << ' '
       << id << "\n";
  os << "\n";

  for (std::size_t s = 0; s < sys.servers.size(); ++s) {
    const SymbolTable& states = sys.state_symbols[sys.servers[s].type_index];
    for (int k = 0; k < states.size(); ++k)
      os << "#define S_" << srv[s] << "__" << sanitize(states.flat_names[k]) << ' ' << k
         << "\n";
  }
  os << "\n";

  for (std::size_t s = 0; s < sys.servers.size(); ++s)
    os << "chan ch_" << srv[s] << " = [" << cap << "] of { int };\n";
  os << "\n";
  for (std::size_t s = 0; s < sys.servers.size(); ++s)
    os << "int st_" << srv[s] << ";\n";
  os << "byte term_count;\n\n";

  for (std::size_t s = 0; s < sys.servers.size(); ++s) {
    os << "proctype P_" << srv[s] << "()\n{\n  do\n";
    for (const GroundAction& g : sys.actions_by_server[s]) {
      std::string in_msg = message_name(g.in_agent, g.server, g.in_service);
      os << "  :: atomic { (st_" << srv[s] << " == S_" << srv[s] << "__"
         << sanitize(sys.state_name(static_cast<int>(s), g.in_state)) << " && ch_" << srv[s]
         << " ?? [" << in_msg << "]) -> ch_" << srv[s] << " ?? " << in_msg << "; st_"
         << srv[s] << " = S_" << srv[s] << "__"
         << sanitize(sys.state_name(static_cast<int>(s), g.out_state));
      if (g.has_output) {
        os << "; ch_" << srv[g.out_server] << " ! "
           << message_name(g.out_agent, g.out_server, g.out_service);
      } else {
        os << "; term_count++";
      }
      os << " }\n";
    }
    os << "  :: atomic { (term_count == N_AGENTS && empty(ch_" << srv[s]
       << ")) -> break }\n";
    os << "  od\n}\n\n";
  }

  os << "init\n{\n  atomic {\n";
  for (std::size_t s = 0; s < sys.servers.size(); ++s)
    os << "    st_" << srv[s] << " = S_" << srv[s] << "__"
       << sanitize(sys.state_name(static_cast<int>(s), sys.initial.server_states[s]))
       << ";\n";
  for (std::size_t a = 0; a < sys.agents.size(); ++a) {
    const auto& slot = sys.initial.agent_slots[a];
    if (slot.terminated()) continue;
    os << "    ch_" << srv[slot.server] << " ! "
       << message_name(static_cast<int>(a), slot.server, slot.service) << ";\n";
  }
  for (std::size_t s = 0; s < sys.servers.size(); ++s)
    os << "    run P_" << srv[s] << "();\n";
  os << "  }\n}\n";

  // Manifest: IMDS entities to generated identifiers.
  for (std::size_t s = 0; s < sys.servers.size(); ++s) {
    nlohmann::json entry;
    entry["process"] = "P_" + srv[s];
    entry["channel"] = "ch_" + srv[s];
    entry["state_variable"] = "st_" + srv[s];
    const SymbolTable& states = sys.state_symbols[sys.servers[s].type_index];
    for (int k = 0; k < states.size(); ++k)
      entry["states"][states.flat_names[k]] =
          "S_" + srv[s] + "__" + sanitize(states.flat_names[k]);
    manifest["servers"][sys.servers[s].name] = entry;
  }
  for (const auto& agent : sys.agents)
    manifest["agents"][agent.name] = sanitize(agent.name);
  for (const auto& [key, id] : ordered) {
    nlohmann::json entry;
    entry["agent"] = sys.agents[key.first].name;
    entry["server"] = sys.servers[key.second.first].name;
    entry["service"] = sys.service_name(key.second.first, key.second.second);
    entry["value"] = id;
    manifest["messages"][message_name(key.first, key.second.first, key.second.second)] =
        entry;
  }

  PromelaModel model;
  model.text = os.str();
  model.manifest_json = manifest.dump(2) + "\n";
  return model;
}

}  // namespace imds
