#include "imds/scenario.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace imds {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string word;
  while (is >> word) out.push_back(word);
  return out;
}

SourceSpan line_span(int line) { return SourceSpan{0, line, 1, 0}; }

}  // namespace

ScenarioParseResult parse_scenario(std::string_view text) {
  ScenarioParseResult result;
  Scenario sc;
  auto error = [&](int line, std::string msg) {
    result.diagnostics.push_back({Severity::Error, std::move(msg), line_span(line)});
  };
  auto warn = [&](int line, std::string msg) {
    result.diagnostics.push_back({Severity::Warning, std::move(msg), line_span(line)});
  };

  std::istringstream stream{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(stream, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::vector<std::string> words = split_ws(raw);
    if (words.empty()) continue;
    const std::string& head = words[0];

    if (head == "node") {
      if (words.size() != 3 || (words[2] != "lot" && words[2] != "marker")) {
        error(lineno, "expected: node <name> lot|marker");
        continue;
      }
      if (sc.graph.find(words[1]) >= 0) {
        error(lineno, "duplicate node '" + words[1] + "'");
        continue;
      }
      sc.graph.nodes.push_back(
          {words[1], words[2] == "lot" ? NodeKind::Lot : NodeKind::Marker});
    } else if (head == "edge") {
      if (words.size() != 3) {
        error(lineno, "expected: edge <name> <name>");
        continue;
      }
      int a = sc.graph.find(words[1]);
      int b = sc.graph.find(words[2]);
      if (a < 0 || b < 0) {
        error(lineno, "edge references an unknown node");
        continue;
      }
      if (a == b) {
        error(lineno, "a node cannot be adjacent to itself");
        continue;
      }
      sc.graph.edges.emplace_back(a, b);
    } else if (head == "parking") {
      if (words.size() != 3) {
        error(lineno, "expected: parking <marker> <lot>");
        continue;
      }
      int m = sc.graph.find(words[1]);
      int l = sc.graph.find(words[2]);
      if (m < 0 || l < 0) {
        error(lineno, "parking references an unknown node");
        continue;
      }
      if (sc.graph.nodes[m].kind != NodeKind::Marker)
        error(lineno, "'" + words[1] + "' is not a marker");
      else if (sc.graph.nodes[l].kind != NodeKind::Lot)
        error(lineno, "'" + words[2] + "' is not a lot");
      else if (!sc.graph.adjacent(m, l))
        error(lineno, "parking lot '" + words[2] + "' is not adjacent to '" + words[1] + "'");
      else if (sc.graph.parking_of(m) >= 0)
        error(lineno, "marker '" + words[1] + "' already has a parking lot");
      else
        sc.graph.parking.emplace_back(m, l);
    } else if (head == "itinerary") {
      // itinerary <agent>: <name> -> <name> -> ...
      if (words.size() < 2) {
        error(lineno, "expected: itinerary <agent>: <node> -> <node> -> ...");
        continue;
      }
      Itinerary it;
      it.agent = words[1];
      if (!it.agent.empty() && it.agent.back() == ':') it.agent.pop_back();
      if (it.agent.empty()) {
        error(lineno, "itinerary needs an agent name");
        continue;
      }
      for (const auto& existing : sc.itineraries)
        if (existing.agent == it.agent) error(lineno, "duplicate itinerary agent '" + it.agent + "'");
      bool ok = true;
      std::size_t w = 2;
      if (w < words.size() && words[w] == ":") ++w;  // allow a detached colon
      bool expect_node = true;
      for (; w < words.size(); ++w) {
        if (words[w] == "->") {
          if (expect_node) {
            error(lineno, "misplaced '->' in itinerary");
            ok = false;
            break;
          }
          expect_node = true;
          continue;
        }
        if (!expect_node) {
          error(lineno, "expected '->' between itinerary nodes");
          ok = false;
          break;
        }
        int n = sc.graph.find(words[w]);
        if (n < 0) {
          error(lineno, "unknown node '" + words[w] + "' in itinerary");
          ok = false;
          break;
        }
        if (!it.path.empty() && !sc.graph.adjacent(it.path.back(), n)) {
          error(lineno, "itinerary step '" + sc.graph.nodes[it.path.back()].name + "' -> '" +
                            words[w] + "' has no edge");
          ok = false;
          break;
        }
        it.path.push_back(n);
        expect_node = false;
      }
      if (!ok) continue;
      if (it.path.size() < 2) {
        error(lineno, "an itinerary needs at least two nodes");
        continue;
      }
      if (sc.graph.nodes[it.path.front()].kind != NodeKind::Lot ||
          sc.graph.nodes[it.path.back()].kind != NodeKind::Lot)
        warn(lineno, "itinerary of '" + it.agent + "' does not start and end at lots");
      sc.itineraries.push_back(std::move(it));
    } else if (head == "option") {
      if (words.size() != 3 || words[1] != "avoidance" ||
          (words[2] != "on" && words[2] != "off")) {
        error(lineno, "expected: option avoidance on|off");
        continue;
      }
      sc.options.avoidance = words[2] == "on";
    } else {
      error(lineno, "unknown directive '" + head + "'");
    }
  }

  // An opposite-direction shared marker without any parking makes avoidance
  // ineffective; flag it.
  if (sc.options.avoidance) {
    bool opposite_unparked = false;
    for (std::size_t i = 0; i < sc.itineraries.size(); ++i) {
      for (std::size_t j = 0; j < sc.itineraries.size(); ++j) {
        if (i == j) continue;
        const auto& p = sc.itineraries[i].path;
        const auto& q = sc.itineraries[j].path;
        for (std::size_t a = 0; a + 1 < p.size(); ++a)
          for (std::size_t b = 0; b + 1 < q.size(); ++b)
            if (p[a] == q[b + 1] && p[a + 1] == q[b]) {
              int shared = sc.graph.nodes[p[a]].kind == NodeKind::Marker ? p[a] : p[a + 1];
              if (sc.graph.nodes[shared].kind == NodeKind::Marker &&
                  sc.graph.parking_of(shared) < 0)
                opposite_unparked = true;
            }
      }
    }
    if (opposite_unparked)
      warn(0, "avoidance is on but an opposite-direction shared marker has no parking lot");
  }

  if (!has_errors(result.diagnostics)) result.scenario = std::move(sc);
  return result;
}

namespace {

// Builders for the generated declaration. Every expression is a literal; no
// replicators are emitted.
Ref plain_ref(const std::string& name) {
  Ref r;
  r.name = name;
  return r;
}

Ref indexed_ref(const std::string& name, long idx) {
  Ref r;
  r.name = name;
  r.index = Expr::literal(idx);
  return r;
}

MessagePattern message(Ref agent, Ref server, Ref service) {
  MessagePattern m;
  m.agent = std::move(agent);
  m.server = std::move(server);
  m.service = std::move(service);
  return m;
}

StatePattern state(Ref server, Ref st) {
  StatePattern p;
  p.server = std::move(server);
  p.state = std::move(st);
  return p;
}

struct NodeBuild {
  std::set<std::string> services;
  std::vector<std::string> service_order;
  std::set<std::string> states;
  std::vector<std::string> state_order;
  std::vector<int> partners;  // nodes this node messages, first-use order
  std::vector<ActionRule> rules;
  std::string init_state = "free";

  void add_service(const std::string& s) {
    if (services.insert(s).second) service_order.push_back(s);
  }
  void add_state(const std::string& s) {
    if (states.insert(s).second) state_order.push_back(s);
  }
  void add_partner(int node) {
    if (std::find(partners.begin(), partners.end(), node) == partners.end())
      partners.push_back(node);
  }
};

constexpr const char* kAgentFormal = "veh";

}  // namespace

GenerateResult generate(const ResourceGraph& graph, const std::vector<Itinerary>& itineraries,
                        const GenOptions& options) {
  GenerateResult result;
  auto error = [&](std::string msg) {
    result.diagnostics.push_back({Severity::Error, std::move(msg), SourceSpan{}});
  };

  for (std::size_t i = 0; i < itineraries.size(); ++i) {
    if (itineraries[i].path.size() < 2) {
      error("itinerary of '" + itineraries[i].agent + "' is too short");
      return result;
    }
    for (std::size_t j = i + 1; j < itineraries.size(); ++j)
      if (itineraries[i].path.front() == itineraries[j].path.front()) {
        error("agents '" + itineraries[i].agent + "' and '" + itineraries[j].agent +
              "' start at the same lot");
        return result;
      }
  }

  int num_agents = static_cast<int>(itineraries.size());
  std::vector<NodeBuild> builds(graph.nodes.size());

  auto agent_ref = [&](int a) { return indexed_ref(kAgentFormal, a + 1); };
  auto node_name = [&](int n) { return graph.nodes[n].name; };

  // Step names. Step k of agent a covers the hop from path[k-1] to path[k].
  auto try_svc = [&](int a, int k) {
    return "try_" + itineraries[a].agent + "_" + std::to_string(k);
  };
  auto ok_svc = [&](int a, int k) {
    return "ok_" + itineraries[a].agent + "_" + std::to_string(k);
  };
  auto take_svc = [&](int a, int k) {
    return "take_" + itineraries[a].agent + "_" + std::to_string(k);
  };
  auto occ_state = [&](int a, int k) {
    return "o_" + itineraries[a].agent + "_" + std::to_string(k);
  };
  auto res_state = [&](int a, int k) {
    return "r_" + itineraries[a].agent + "_" + std::to_string(k);
  };

  // Basic hop protocol.
  for (int a = 0; a < num_agents; ++a) {
    const std::vector<int>& path = itineraries[a].path;
    int last = static_cast<int>(path.size()) - 1;

    builds[path[0]].add_service("start_" + itineraries[a].agent);
    builds[path[0]].add_state(occ_state(a, 0));
    builds[path[0]].init_state = occ_state(a, 0);

    // start: the standing agent posts its first try.
    {
      ActionRule rule;
      rule.input_message = message(agent_ref(a), plain_ref(node_name(path[0])),
                                   plain_ref("start_" + itineraries[a].agent));
      rule.input_state = state(plain_ref(node_name(path[0])), plain_ref(occ_state(a, 0)));
      rule.output_message = message(agent_ref(a), plain_ref(node_name(path[1])),
                                    plain_ref(try_svc(a, 1)));
      rule.output_state = state(plain_ref(node_name(path[0])), plain_ref(occ_state(a, 0)));
      builds[path[0]].rules.push_back(std::move(rule));
      builds[path[0]].add_partner(path[1]);
    }

    for (int k = 1; k <= last; ++k) {
      int here = path[k];
      int prev = path[k - 1];
      NodeBuild& nb = builds[here];
      nb.add_service(try_svc(a, k));
      nb.add_service(take_svc(a, k));
      nb.add_state(res_state(a, k));
      nb.add_state(occ_state(a, k));
      builds[prev].add_service(ok_svc(a, k));

      // try: grant and reserve when free.
      {
        ActionRule rule;
        rule.input_message =
            message(agent_ref(a), plain_ref(node_name(here)), plain_ref(try_svc(a, k)));
        rule.input_state = state(plain_ref(node_name(here)), plain_ref("free"));
        rule.output_message =
            message(agent_ref(a), plain_ref(node_name(prev)), plain_ref(ok_svc(a, k)));
        rule.output_state = state(plain_ref(node_name(here)), plain_ref(res_state(a, k)));
        nb.rules.push_back(std::move(rule));
        nb.add_partner(prev);
      }
      // ok at the holder: release and commit.
      {
        ActionRule rule;
        rule.input_message =
            message(agent_ref(a), plain_ref(node_name(prev)), plain_ref(ok_svc(a, k)));
        rule.input_state = state(plain_ref(node_name(prev)), plain_ref(occ_state(a, k - 1)));
        rule.output_message =
            message(agent_ref(a), plain_ref(node_name(here)), plain_ref(take_svc(a, k)));
        rule.output_state = state(plain_ref(node_name(prev)), plain_ref("free"));
        builds[prev].rules.push_back(std::move(rule));
        builds[prev].add_partner(here);
      }
      // take: occupy; post the next try, or terminate at the journey's end.
      {
        ActionRule rule;
        rule.input_message =
            message(agent_ref(a), plain_ref(node_name(here)), plain_ref(take_svc(a, k)));
        rule.input_state = state(plain_ref(node_name(here)), plain_ref(res_state(a, k)));
        if (k < last) {
          rule.output_message = message(agent_ref(a), plain_ref(node_name(path[k + 1])),
                                        plain_ref(try_svc(a, k + 1)));
          nb.add_partner(path[k + 1]);
        }
        rule.output_state = state(plain_ref(node_name(here)), plain_ref(occ_state(a, k)));
        nb.rules.push_back(std::move(rule));
      }
    }
  }

  // Avoidance: a contested node refuses a head-on try when the sender stands
  // at a parking-equipped marker; the refused agent waits in the parking lot,
  // then returns and retries the same hop.
  if (options.avoidance) {
    for (int a = 0; a < num_agents; ++a) {
      const std::vector<int>& path = itineraries[a].path;
      int last = static_cast<int>(path.size()) - 1;
      for (int k = 1; k <= last; ++k) {
        int here = path[k];      // contested node
        int stand = path[k - 1];  // where the agent waits
        if (graph.nodes[stand].kind != NodeKind::Marker) continue;
        int park = graph.parking_of(stand);
        if (park < 0) continue;

        std::string not_svc = "not_" + itineraries[a].agent + "_" + std::to_string(k);
        std::string ptry = "ptry_" + itineraries[a].agent + "_" + std::to_string(k);
        std::string pok = "pok_" + itineraries[a].agent + "_" + std::to_string(k);
        std::string ptake = "ptake_" + itineraries[a].agent + "_" + std::to_string(k);
        std::string rtry = "rtry_" + itineraries[a].agent + "_" + std::to_string(k);
        std::string rok = "rok_" + itineraries[a].agent + "_" + std::to_string(k);
        std::string rtake = "rtake_" + itineraries[a].agent + "_" + std::to_string(k);
        std::string pres = "pr_" + itineraries[a].agent + "_" + std::to_string(k);
        std::string pocc = "po_" + itineraries[a].agent + "_" + std::to_string(k);
        std::string back_res = "rr_" + itineraries[a].agent + "_" + std::to_string(k);

        // Refusal rules at the contested node, one per head-on occupancy.
        bool any_refusal = false;
        for (int b = 0; b < num_agents; ++b) {
          if (b == a) continue;
          const std::vector<int>& q = itineraries[b].path;
          for (int j = 0; j + 1 <= static_cast<int>(q.size()) - 1; ++j) {
            if (q[j] != here) continue;
            if (q[j + 1] != stand) continue;  // not heading for the sender's spot
            std::vector<std::string> headon_states{occ_state(b, j)};
            if (j > 0) headon_states.push_back(res_state(b, j));
            for (const std::string& st : headon_states) {
              ActionRule rule;
              rule.input_message = message(agent_ref(a), plain_ref(node_name(here)),
                                           plain_ref(try_svc(a, k)));
              rule.input_state = state(plain_ref(node_name(here)), plain_ref(st));
              rule.output_message = message(agent_ref(a), plain_ref(node_name(stand)),
                                            plain_ref(not_svc));
              rule.output_state = state(plain_ref(node_name(here)), plain_ref(st));
              builds[here].rules.push_back(std::move(rule));
              builds[here].add_partner(stand);
              any_refusal = true;
            }
          }
        }
        if (!any_refusal) continue;

        NodeBuild& yb = builds[stand];
        NodeBuild& pb = builds[park];
        yb.add_service(not_svc);
        yb.add_service(pok);
        yb.add_service(rtry);
        yb.add_service(rtake);
        yb.add_state(back_res);
        pb.add_service(ptry);
        pb.add_service(ptake);
        pb.add_service(rok);
        pb.add_state(pres);
        pb.add_state(pocc);

        auto push = [&](NodeBuild& nb, int owner, const std::string& in_svc,
                        const std::string& in_st, int target, const std::string& out_svc,
                        const std::string& out_st) {
          ActionRule rule;
          rule.input_message =
              message(agent_ref(a), plain_ref(node_name(owner)), plain_ref(in_svc));
          rule.input_state = state(plain_ref(node_name(owner)), plain_ref(in_st));
          rule.output_message =
              message(agent_ref(a), plain_ref(node_name(target)), plain_ref(out_svc));
          rule.output_state = state(plain_ref(node_name(owner)), plain_ref(out_st));
          nb.rules.push_back(std::move(rule));
          nb.add_partner(target);
        };

        // Refused: head for the parking lot.
        push(yb, stand, not_svc, occ_state(a, k - 1), park, ptry, occ_state(a, k - 1));
        // Parking grants, the marker is released, the lot is taken.
        push(pb, park, ptry, "free", stand, pok, pres);
        push(yb, stand, pok, occ_state(a, k - 1), park, ptake, "free");
        push(pb, park, ptake, pres, stand, rtry, pocc);
        // Return: re-acquire the marker, release the lot, retry the hop.
        push(yb, stand, rtry, "free", park, rok, back_res);
        push(pb, park, rok, pocc, stand, rtake, "free");
        push(yb, stand, rtake, back_res, here, try_svc(a, k), occ_state(a, k - 1));
      }
    }
  }

  // Assemble the declaration: one server type and one instance per node.
  SystemDecl decl;
  for (std::size_t n = 0; n < graph.nodes.size(); ++n) {
    NodeBuild& nb = builds[n];
    nb.add_state("free");  // ensure every node has its idle state
    ServerType st;
    st.name = graph.nodes[n].name;
    if (num_agents > 0) {
      Decl formal;
      formal.name = kAgentFormal;
      formal.size = Expr::literal(num_agents);
      st.formal_agents.push_back(std::move(formal));
    }
    for (int partner : nb.partners) {
      Decl f;
      f.name = graph.nodes[partner].name;
      st.formal_servers.push_back(std::move(f));
    }
    for (const auto& svc : nb.service_order) {
      Decl d;
      d.name = svc;
      st.services.push_back(std::move(d));
    }
    for (const auto& s : nb.state_order) {
      Decl d;
      d.name = s;
      st.states.push_back(std::move(d));
    }
    st.rules = std::move(nb.rules);
    decl.server_types.push_back(std::move(st));

    Decl inst;
    inst.name = graph.nodes[n].name;
    decl.server_instances.push_back(std::move(inst));
  }
  for (const auto& it : itineraries) {
    Decl d;
    d.name = it.agent;
    decl.agent_instances.push_back(std::move(d));
  }
  for (std::size_t n = 0; n < graph.nodes.size(); ++n) {
    InitBinding binding;
    binding.instance = plain_ref(graph.nodes[n].name);
    for (const auto& it : itineraries) {
      Actual a;
      a.name = it.agent;
      binding.actuals.push_back(std::move(a));
    }
    for (int partner : builds[n].partners) {
      Actual a;
      a.name = graph.nodes[partner].name;
      binding.actuals.push_back(std::move(a));
    }
    binding.state = plain_ref(builds[n].init_state);
    decl.init_items.push_back(std::move(binding));
  }
  for (const auto& it : itineraries) {
    InitMessage m;
    m.message = message(plain_ref(it.agent), plain_ref(graph.nodes[it.path[0]].name),
                        plain_ref("start_" + it.agent));
    decl.init_items.push_back(std::move(m));
  }

  // Keep only warnings gathered so far; a generated model must elaborate.
  result.decl = std::move(decl);
  return result;
}

GenerateResult generate(const Scenario& scenario) {
  return generate(scenario.graph, scenario.itineraries, scenario.options);
}

}  // namespace imds
