#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "imds/deadlock.hpp"
#include "imds/state_space.hpp"
#include "naive.hpp"
#include "support.hpp"

using namespace imds;

namespace {

struct Fixture {
  std::string name;
  bool lenient = false;
  // Sizes pinned from the reference explorer.
  std::size_t configs = 0;
  std::size_t edges = 0;
};

const Fixture kFixtures[] = {
    {"minimal.imds", false, 2, 1},
    {"zero_agents.imds", false, 1, 0},
    {"amp2_corrected.imds", false, 228, 376},
    {"amp2_verbatim.imds", true, 95, 154},
    {"crossing.amg", false, 210, 364},
    {"crossing_noavoid.amg", false, 67, 112},
    {"single_amp.amg", false, 14, 13},
    {"corridor.amg", false, 5, 4},
};

ElaboratedSystem load(const Fixture& f) {
  if (f.name.ends_with(".amg")) return testing::elaborate_scenario(f.name);
  return testing::elaborate_fixture(f.name, f.lenient);
}

}  // namespace

TEST_CASE("engine and reference explorer agree on every fixture") {
  for (const Fixture& f : kFixtures) {
    CAPTURE(f.name);
    ElaboratedSystem sys = load(f);
    oracle::NaiveLts expected = oracle::naive_explore(sys);
    Lts actual = explore(sys);

    REQUIRE(expected.complete);
    REQUIRE(actual.complete);
    CHECK(expected.configs.size() == f.configs);
    CHECK(expected.edges.size() == f.edges);
    REQUIRE(actual.configs.size() == expected.configs.size());
    for (std::size_t i = 0; i < expected.configs.size(); ++i)
      REQUIRE(actual.configs[i] == expected.configs[i]);
    REQUIRE(actual.edges.size() == expected.edges.size());
    for (std::size_t i = 0; i < expected.edges.size(); ++i) {
      CHECK(actual.edges[i].source == expected.edges[i].source);
      CHECK(actual.edges[i].action.server == expected.edges[i].server);
      CHECK(actual.edges[i].action.index == expected.edges[i].action);
      CHECK(actual.edges[i].target == expected.edges[i].target);
    }
  }
}

TEST_CASE("progress sets match per-pair forward searches") {
  std::mt19937 rng(424242);
  for (const Fixture& f : kFixtures) {
    CAPTURE(f.name);
    ElaboratedSystem sys = load(f);
    if (sys.agents.empty()) continue;
    oracle::NaiveLts naive = oracle::naive_explore(sys);
    Lts lts = explore(sys);
    ProgressSets ps = progress_sets(lts, sys);

    for (int sample = 0; sample < 100; ++sample) {
      int config = static_cast<int>(rng() % lts.configs.size());
      int agent = static_cast<int>(rng() % sys.agents.size());
      bool engine_can = ps.agent_can_progress[agent][config];
      bool direct_can = oracle::agent_can_ever_move(naive, sys, config, agent);
      CAPTURE(config);
      CAPTURE(agent);
      REQUIRE(engine_can == direct_can);
    }
    for (int sample = 0; sample < 50; ++sample) {
      int config = static_cast<int>(rng() % lts.configs.size());
      int server = static_cast<int>(rng() % sys.servers.size());
      bool engine_can = ps.server_can_progress[server][config];
      bool direct_can = oracle::server_can_ever_act(naive, sys, config, server);
      REQUIRE(engine_can == direct_can);
    }
  }
}

TEST_CASE("two-amp state-space size is pinned") {
  // Regression constants measured with the reference explorer.
  ElaboratedSystem sys = testing::elaborate_fixture("amp2_corrected.imds");
  Lts lts = explore(sys);
  LtsStats st = stats(lts);
  CHECK(st.configs == 228);
  CHECK(st.edges == 376);
  CHECK(st.terminal == 5);
  CHECK(st.complete);
  CHECK(detect_termination(lts, sys).size() == 1);
}

TEST_CASE("dead predicate agrees exhaustively on the small fixtures") {
  for (const char* name : {"minimal.imds", "crossing_noavoid.amg", "single_amp.amg"}) {
    ElaboratedSystem sys = std::string(name).ends_with(".amg")
                               ? testing::elaborate_scenario(name)
                               : testing::elaborate_fixture(name);
    oracle::NaiveLts naive = oracle::naive_explore(sys);
    Lts lts = explore(sys);
    ProgressSets ps = progress_sets(lts, sys);
    for (std::size_t c = 0; c < lts.configs.size(); ++c)
      for (std::size_t a = 0; a < sys.agents.size(); ++a)
        REQUIRE(ps.agent_can_progress[a][c] ==
                oracle::agent_can_ever_move(naive, sys, static_cast<int>(c),
                                            static_cast<int>(a)));
  }
}
