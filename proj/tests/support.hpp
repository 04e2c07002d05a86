#pragma once

// Shared helpers for the test suites.

#include <algorithm>
#include <optional>
#include <vector>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "imds/elaborate.hpp"
#include "imds/parse.hpp"
#include "imds/scenario.hpp"

#ifndef IMDS_FIXTURE_DIR
#error "IMDS_FIXTURE_DIR must be defined by the build"
#endif

namespace testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(IMDS_FIXTURE_DIR) + "/" + name;
}

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline imds::SystemDecl parse_fixture(const std::string& name) {
  imds::ParseResult r = imds::parse(read_fixture(name));
  if (!r.ok())
    throw std::runtime_error("fixture " + name + " failed to parse: " +
                             (r.diagnostics.empty() ? "?" : r.diagnostics[0].message));
  return std::move(*r.decl);
}

inline imds::ElaboratedSystem elaborate_fixture(const std::string& name, bool lenient = false) {
  imds::SystemDecl decl = parse_fixture(name);
  imds::ElaborationOptions opts;
  opts.lenient = lenient;
  imds::ElaborationResult r = imds::elaborate(decl, opts);
  if (!r.ok())
    throw std::runtime_error("fixture " + name + " failed to elaborate: " +
                             (r.diagnostics.empty() ? "?" : r.diagnostics[0].message));
  return std::move(*r.system);
}

// Name-based summary of a ground system: equal summaries mean isomorphic
// elaborations (same servers, agents, and ground actions up to rule ids).
inline std::string canonical_summary(const imds::ElaboratedSystem& sys) {
  std::ostringstream os;
  os << "servers:";
  for (std::size_t s = 0; s < sys.servers.size(); ++s)
    os << ' ' << sys.servers[s].name << ':'
       << sys.decl.server_types[sys.servers[s].type_index].name << ':'
       << sys.state_name(static_cast<int>(s), sys.servers[s].init_state);
  os << "\nagents:";
  for (const auto& a : sys.agents) os << ' ' << a.name << '/' << a.display_name;
  os << "\n";
  for (std::size_t s = 0; s < sys.servers.size(); ++s) {
    std::vector<std::string> actions;
    for (const auto& g : sys.actions_by_server[s]) {
      std::ostringstream act;
      act << '(' << sys.agents[g.in_agent].name << ',' << sys.service_name(g.server, g.in_service)
          << ")@" << sys.state_name(g.server, g.in_state) << "->";
      if (g.has_output)
        act << '(' << sys.agents[g.out_agent].name << ',' << sys.server_name(g.out_server)
            << ',' << sys.service_name(g.out_server, g.out_service) << ')';
      else
        act << "end";
      act << '@' << sys.state_name(g.server, g.out_state);
      actions.push_back(act.str());
    }
    std::sort(actions.begin(), actions.end());
    os << sys.servers[s].name << ":\n";
    for (const auto& a : actions) os << "  " << a << "\n";
  }
  os << "initial: " << sys.describe(sys.initial) << "\n";
  return os.str();
}

inline imds::ElaboratedSystem elaborate_scenario(const std::string& name,
                                               std::optional<bool> avoidance = {}) {
  imds::ScenarioParseResult sc = imds::parse_scenario(read_fixture(name));
  if (!sc.ok()) throw std::runtime_error("scenario " + name + " failed to parse");
  if (avoidance) sc.scenario->options.avoidance = *avoidance;
  imds::GenerateResult gen = imds::generate(*sc.scenario);
  if (!gen.ok()) throw std::runtime_error("scenario " + name + " failed to generate");
  imds::ElaborationResult r = imds::elaborate(*gen.decl);
  if (!r.ok()) throw std::runtime_error("generated model for " + name + " failed to elaborate");
  return std::move(*r.system);
}

}  // namespace testing
