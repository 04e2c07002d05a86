#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "imds/elaborate.hpp"
#include "imds/parse.hpp"
#include "support.hpp"

using namespace imds;

namespace {

std::vector<Diagnostic> validate_text(const std::string& text) {
  ParseResult r = parse(text);
  REQUIRE(r.ok());
  return validate(*r.decl);
}

int errors_mentioning(const std::vector<Diagnostic>& diags, const std::string& word) {
  int n = 0;
  for (const auto& d : diags)
    if (d.severity == Severity::Error && d.message.find(word) != std::string::npos) ++n;
  return n;
}

}  // namespace

TEST_CASE("two-amp model elaborates to six servers and two agents") {
  ElaboratedSystem sys = testing::elaborate_fixture("amp2_corrected.imds");
  REQUIRE(sys.servers.size() == 6);
  CHECK(sys.servers[0].name == "markerE[1]");
  CHECK(sys.servers[1].name == "markerE[2]");
  CHECK(sys.servers[2].name == "markerM");
  CHECK(sys.servers[3].name == "lotE[1]");
  CHECK(sys.servers[4].name == "lotE[2]");
  CHECK(sys.servers[5].name == "lotM");
  REQUIRE(sys.agents.size() == 2);
  CHECK(sys.agents[0].name == "AMP[1]");
  CHECK(sys.agents[0].display_name == "AMP");
  CHECK(sys.agents[1].display_name == "AMP__1");
}

TEST_CASE("initial configuration of the two-amp model") {
  ElaboratedSystem sys = testing::elaborate_fixture("amp2_corrected.imds");
  Configuration init = initial_configuration(sys);
  CHECK(sys.state_name(0, init.server_states[0]) == "free");   // markerE[1]
  CHECK(sys.state_name(1, init.server_states[1]) == "free");   // markerE[2]
  CHECK(sys.state_name(2, init.server_states[2]) == "free");   // markerM
  CHECK(sys.state_name(3, init.server_states[3]) == "occ");    // lotE[1]
  CHECK(sys.state_name(4, init.server_states[4]) == "occ");    // lotE[2]
  CHECK(sys.state_name(5, init.server_states[5]) == "free");   // lotM
  REQUIRE(init.agent_slots.size() == 2);
  CHECK(sys.describe_slot(init.agent_slots[0]) == "start@lotE[1]");
  CHECK(sys.describe_slot(init.agent_slots[1]) == "start@lotE[2]");
}

TEST_CASE("replicated rules expand over the index cross-product") {
  ElaboratedSystem sys = testing::elaborate_fixture("amp2_corrected.imds");
  // markerE rule 3 (<i=1..N> <j=1..2> okM) gives 2x2 ground actions per instance.
  int count = 0;
  for (const auto& g : sys.actions_by_server[0])
    if (g.rule_ordinal == 2) ++count;
  CHECK(count == 4);
}

TEST_CASE("arithmetic index expressions resolve") {
  ElaboratedSystem sys = testing::elaborate_fixture("amp2_corrected.imds");
  // markerM's takeE[j] rule emits switch[3-j]: j=1 -> switch[2], j=2 -> switch[1].
  int seen = 0;
  for (const auto& g : sys.actions_by_server[2]) {
    if (g.rule_ordinal != 1) continue;
    long j = g.valuation[1];
    CHECK(sys.service_name(2, g.out_service) == "switch[" + std::to_string(3 - j) + "]");
    ++seen;
  }
  CHECK(seen == 4);
}

TEST_CASE("duplicate ground actions are collapsed with a warning") {
  ElaboratedSystem sys = testing::elaborate_fixture("amp2_corrected.imds");
  // markerM rules 4 and 9 are identical; only 4 okE actions survive.
  int okE = 0;
  for (const auto& g : sys.actions_by_server[2])
    if (sys.service_name(2, g.in_service).rfind("okE", 0) == 0) ++okE;
  CHECK(okE == 4);
  bool warned = false;
  for (const auto& w : sys.warnings)
    if (w.message.find("duplicates rule") != std::string::npos) warned = true;
  CHECK(warned);
}

TEST_CASE("the misaddressed rule fails strict validation and is dropped when lenient") {
  std::string text = testing::read_fixture("amp2_verbatim.imds");
  ParseResult parsed = parse(text);
  REQUIRE(parsed.ok());
  std::vector<Diagnostic> diags = validate(*parsed.decl);
  CHECK(errors_mentioning(diags, "marker2") == 1);

  ElaborationOptions lenient;
  lenient.lenient = true;
  ElaborationResult r = elaborate(*parsed.decl, lenient);
  REQUIRE(r.ok());
  // No ground action of markerM consumes okL after the drop.
  for (const auto& g : r.system->actions_by_server[2])
    CHECK(r.system->service_name(2, g.in_service).rfind("okL", 0) != 0);
  bool warned = false;
  for (const auto& w : r.system->warnings)
    if (w.message.find("marker2") != std::string::npos) warned = true;
  CHECK(warned);
}

TEST_CASE("undeclared service is a located error") {
  std::vector<Diagnostic> diags = validate_text(
      "server: s(agents A[1]; servers), services {go}, states {a}, "
      "actions { {A[1].s.foo, s.a} -> {s.a}, } "
      "servers s; agents A[1]; init -> { s(A[1]).a, A[1].s.go, }.");
  CHECK(errors_mentioning(diags, "foo") >= 1);
}

TEST_CASE("missing instance binding is an error") {
  std::vector<Diagnostic> diags = validate_text(
      "server: s(agents A[1]; servers), services {go}, states {a}, actions { } "
      "server: t(agents A[1]; servers), services {go}, states {a}, actions { } "
      "servers s, t; agents A[1]; init -> { s(A[1]).a, A[1].s.go, }.");
  CHECK(errors_mentioning(diags, "'t' is never bound") == 1);
}

TEST_CASE("agents need exactly one initial message") {
  std::string base =
      "server: s(agents A[2]; servers), services {go}, states {a}, "
      "actions { <i=1..2> {A[i].s.go, s.a} -> {s.a}, } "
      "servers s; agents A[2]; init -> { s(A[1..2]).a, %MSGS% }.";
  auto with = [&](const std::string& msgs) {
    std::string text = base;
    text.replace(text.find("%MSGS%"), 6, msgs);
    return validate_text(text);
  };
  CHECK(errors_mentioning(with("A[1].s.go,"), "no initial message") == 1);
  CHECK(errors_mentioning(with("A[1].s.go, A[1].s.go, A[2].s.go,"),
                          "more than one initial message") == 1);
  CHECK(!has_errors(with("A[1].s.go, A[2].s.go,")));
}

TEST_CASE("binding arity and duplicate bindings are checked") {
  std::vector<Diagnostic> wrong_arity = validate_text(
      "server: s(agents A[2]; servers), services {go}, states {a}, actions { } "
      "servers s; agents A[2]; init -> { s(A[1]).a, A[1].s.go, A[2].s.go, }.");
  CHECK(errors_mentioning(wrong_arity, "actuals") == 1);

  std::vector<Diagnostic> dup = validate_text(
      "server: s(agents A[1]; servers), services {go}, states {a}, actions { } "
      "servers s; agents A[1]; init -> { s(A[1]).a, s(A[1]).a, A[1].s.go, }.");
  CHECK(errors_mentioning(dup, "bound more than once") == 1);
}

TEST_CASE("index range violations are errors") {
  std::vector<Diagnostic> diags = validate_text(
      "server: s(agents A[1]; servers), services {go[2]}, states {a}, "
      "actions { {A[1].s.go[3], s.a} -> {s.a}, } "
      "servers s; agents A[1]; init -> { s(A[1]).a, A[1].s.go[1], }.");
  CHECK(errors_mentioning(diags, "outside [1, 2]") == 1);
}

TEST_CASE("unbound identifier in an index expression is an error") {
  std::vector<Diagnostic> diags = validate_text(
      "server: s(agents A[1]; servers), services {go[2]}, states {a}, "
      "actions { {A[1].s.go[k], s.a} -> {s.a}, } "
      "servers s; agents A[1]; init -> { s(A[1]).a, A[1].s.go[1], }.");
  CHECK(errors_mentioning(diags, "unbound identifier 'k'") >= 1);
}

TEST_CASE("an action must move the agent whose message it consumes") {
  std::vector<Diagnostic> diags = validate_text(
      "server: s(agents A[2]; servers), services {go,hop}, states {a}, "
      "actions { {A[1].s.go, s.a} -> {A[2].s.hop, s.a}, } "
      "servers s; agents A[2]; init -> { s(A[1..2]).a, A[1].s.go, A[2].s.hop, }.");
  CHECK(errors_mentioning(diags, "moves exactly the agent") == 1);
}

TEST_CASE("initial message senders must be bound to the target server") {
  std::vector<Diagnostic> diags = validate_text(
      "server: s(agents A[1]; servers), services {go}, states {a}, actions { } "
      "servers s; agents A[1], B; init -> { s(A[1]).a, A[1].s.go, B.s.go, }.");
  CHECK(errors_mentioning(diags, "not bound to server") == 1);
}

TEST_CASE("zero-agent model elaborates") {
  ElaboratedSystem sys = testing::elaborate_fixture("zero_agents.imds");
  CHECK(sys.agents.empty());
  CHECK(sys.servers.size() == 1);
  CHECK(sys.initial.agent_slots.empty());
  CHECK(sys.total_ground_actions() == 0);
}

TEST_CASE("validate accepts the corrected fixture") {
  ParseResult r = parse(testing::read_fixture("amp2_corrected.imds"));
  REQUIRE(r.ok());
  CHECK(!has_errors(validate(*r.decl)));
}

TEST_CASE("ground actions reference valid states and bound targets") {
  ElaboratedSystem sys = testing::elaborate_fixture("amp2_corrected.imds");
  for (std::size_t s = 0; s < sys.servers.size(); ++s) {
    const ServerInstance& server = sys.servers[s];
    int states = sys.state_symbols[server.type_index].size();
    int services = sys.service_symbols[server.type_index].size();
    for (const GroundAction& g : sys.actions_by_server[s]) {
      CHECK(g.server == static_cast<int>(s));
      CHECK(g.in_state >= 0);
      CHECK(g.in_state < states);
      CHECK(g.out_state >= 0);
      CHECK(g.out_state < states);
      CHECK(g.in_service < services);
      bool bound = std::find(server.bound_agents.begin(), server.bound_agents.end(),
                             g.in_agent) != server.bound_agents.end();
      CHECK(bound);
      if (g.has_output) {
        bool target_ok = g.out_server == static_cast<int>(s) ||
                         std::find(server.bound_servers.begin(), server.bound_servers.end(),
                                   g.out_server) != server.bound_servers.end();
        CHECK(target_ok);
      }
    }
  }
}

TEST_CASE("ground action ids are unique and stable") {
  ElaboratedSystem sys = testing::elaborate_fixture("amp2_corrected.imds");
  std::set<std::string> ids;
  for (const auto& per_server : sys.actions_by_server)
    for (const auto& g : per_server) CHECK(ids.insert(g.id).second);
  CHECK(ids.count("markerE[1]#1<i=1>") == 1);
  CHECK(ids.count("markerM#2<i=2,j=1>") == 1);
}
