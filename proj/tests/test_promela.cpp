#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "imds/promela.hpp"
#include "support.hpp"

using namespace imds;

namespace {

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++n;
  return n;
}

}  // namespace

TEST_CASE("the two-amp model exports six channels and six processes") {
  ElaboratedSystem sys = testing::elaborate_fixture("amp2_corrected.imds");
  PromelaModel model = export_promela(sys);
  CHECK(count_of(model.text, "proctype ") == 6);
  CHECK(count_of(model.text, "chan ch_") == 6);
  CHECK(count_of(model.text, "= [2] of { int }") == 6);  // capacity = agent count
  CHECK(model.text.find("init\n") != std::string::npos);
  CHECK(count_of(model.text, "run P_") == 6);
  // Two initial messages, one per vehicle.
  CHECK(count_of(model.text, "! M_AMP_1__lotE_1__start") == 1);
  CHECK(count_of(model.text, "! M_AMP_2__lotE_2__start") == 1);
}

TEST_CASE("export is deterministic") {
  ElaboratedSystem sys = testing::elaborate_fixture("amp2_corrected.imds");
  PromelaModel a = export_promela(sys);
  PromelaModel b = export_promela(sys);
  CHECK(a.text == b.text);
  CHECK(a.manifest_json == b.manifest_json);
}

TEST_CASE("export matches the golden file byte for byte") {
  ElaboratedSystem sys = testing::elaborate_fixture("amp2_corrected.imds");
  PromelaModel model = export_promela(sys);
  std::ifstream in(std::string(IMDS_GOLDEN_DIR) + "/amp2_corrected.pml", std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "golden file missing");
  std::ostringstream buf;
  buf << in.rdbuf();
  CHECK(model.text == buf.str());
}

TEST_CASE("minimal model: one channel, one process, one guarded action") {
  ElaboratedSystem sys = testing::elaborate_fixture("minimal.imds");
  PromelaModel model = export_promela(sys);
  CHECK(count_of(model.text, "chan ") == 1);
  CHECK(count_of(model.text, "proctype ") == 1);
  // One action alternative (a selective poll) plus the shutdown guard.
  CHECK(count_of(model.text, "?? [") == 1);
  CHECK(count_of(model.text, "term_count++") == 1);
}

TEST_CASE("a zero-agent system still yields a valid skeleton") {
  ElaboratedSystem sys = testing::elaborate_fixture("zero_agents.imds");
  PromelaModel model = export_promela(sys);
  CHECK(model.text.find("= [1] of { int }") != std::string::npos);
  CHECK(model.text.find("#define N_AGENTS 0") != std::string::npos);
  CHECK(count_of(model.text, "proctype ") == 1);
}

TEST_CASE("the name manifest is injective") {
  ElaboratedSystem sys = testing::elaborate_fixture("amp2_corrected.imds");
  PromelaModel model = export_promela(sys);
  nlohmann::json manifest = nlohmann::json::parse(model.manifest_json);
  std::set<std::string> seen;
  for (const auto& [server, entry] : manifest["servers"].items()) {
    CHECK(seen.insert(entry["process"].get<std::string>()).second);
    CHECK(seen.insert(entry["channel"].get<std::string>()).second);
    CHECK(seen.insert(entry["state_variable"].get<std::string>()).second);
    for (const auto& [state, ident] : entry["states"].items())
      CHECK(seen.insert(ident.get<std::string>()).second);
  }
  for (const auto& [msg, entry] : manifest["messages"].items())
    CHECK(seen.insert(msg).second);
  CHECK(manifest["messages"].size() > 0);
}

TEST_CASE("message constants cover every initial message and rule output") {
  ElaboratedSystem sys = testing::elaborate_fixture("amp2_corrected.imds");
  PromelaModel model = export_promela(sys);
  nlohmann::json manifest = nlohmann::json::parse(model.manifest_json);
  std::set<std::pair<std::string, std::string>> defined;
  for (const auto& [msg, entry] : manifest["messages"].items())
    defined.insert({entry["server"].get<std::string>(), entry["service"].get<std::string>()});
  for (const auto& per_server : sys.actions_by_server)
    for (const auto& g : per_server) {
      CHECK(defined.count({sys.server_name(g.server), sys.service_name(g.server, g.in_service)}));
      if (g.has_output)
        CHECK(defined.count(
            {sys.server_name(g.out_server), sys.service_name(g.out_server, g.out_service)}));
    }
}
