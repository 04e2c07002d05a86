// Acceptance suite: exercises the full pipeline end to end and prints one
// pass/fail line per criterion. Returns the number of failed criteria.

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "imds/deadlock.hpp"
#include "imds/parse.hpp"
#include "imds/print.hpp"
#include "imds/promela.hpp"
#include "imds/report.hpp"
#include "imds/scenario.hpp"
#include "imds/state_space.hpp"
#include "imds/views.hpp"
#include "naive.hpp"
#include "support.hpp"

using nlohmann::json;

namespace {

int failures = 0;

void verdict(bool ok, const std::string& line) {
  std::cout << (ok ? "PASS " : "FAIL ") << line << "\n";
  if (!ok) ++failures;
}

void note(const std::string& line) { std::cout << "     " << line << "\n"; }

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_tool(const std::string& args) {
  std::string cmd = std::string(IMDS_TOOL_PATH) + " " + args + " 2>/dev/null";
  RunResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return result;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.output.append(buf.data(), n);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

bool spin_available() {
  FILE* pipe = popen("spin -V 2>/dev/null", "r");
  if (!pipe) return false;
  std::array<char, 256> buf;
  std::string out;
  while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  return pclose(pipe) == 0 && out.find("Spin") != std::string::npos;
}

const std::vector<std::pair<std::string, bool>> kAllFixtures = {
    {"minimal.imds", false},        {"zero_agents.imds", false},
    {"amp2_corrected.imds", false}, {"amp2_verbatim.imds", true},
    {"crossing.amg", false},        {"crossing_noavoid.amg", false},
    {"single_amp.amg", false},      {"corridor.amg", false},
};

imds::ElaboratedSystem load_fixture(const std::string& name, bool lenient) {
  if (name.ends_with(".amg")) return testing::elaborate_scenario(name);
  return testing::elaborate_fixture(name, lenient);
}

// ---- criterion 1 -----------------------------------------------------------

void criterion_1() {
  auto start = std::chrono::steady_clock::now();
  RunResult run = run_tool("verify " + testing::fixture_path("amp2_corrected.imds") +
                           " --format json");
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  bool ok = run.exit_code == 1 && seconds < 10.0;
  json doc;
  std::string detail;
  try {
    doc = json::parse(run.output);
    const json& first = doc.at("deadlocks").at(0);
    ok = ok && doc["model"]["servers"].size() == 6;
    ok = ok && first["kind"] == "communication";
    ok = ok && first["scope_servers"] == "partial";
    ok = ok && first["dead_servers"].size() == 2;
    detail = "exit=" + std::to_string(run.exit_code) + ", dead servers=" +
             std::to_string(first["dead_servers"].size()) + "/6, " +
             first["kind"].get<std::string>() + ", " +
             first["scope_servers"].get<std::string>() + " over servers, " +
             std::to_string(seconds).substr(0, 5) + "s";
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("report unreadable: ") + e.what();
  }
  verdict(ok, "criterion 1 - two-amp fixture: partial communication deadlock with "
              "exactly 2 of 6 servers dead (" + detail + ")");
}

// ---- criterion 2 -----------------------------------------------------------

void criterion_2() {
  imds::ElaboratedSystem off = testing::elaborate_scenario("crossing_noavoid.amg");
  imds::Lts lts_off = imds::explore(off);
  std::vector<imds::DeadlockReport> off_reports = imds::find_deadlocks(lts_off, off);

  int off_totals = 0;
  std::set<int> off_configs;
  for (const auto& r : off_reports)
    if (r.scope_agents == imds::Scope::Total && r.dead_agents.size() == 2) {
      ++off_totals;
      off_configs.insert(r.config);
    }
  // Witness configurations pinned from the reference explorer.
  const std::set<int> expected_configs{63, 64, 65, 66};
  bool part_a = off_totals >= 1 && off_configs == expected_configs;
  verdict(part_a, "criterion 2a - no-avoidance crossing yields total deadlocks "
                  "(both agents dead) at the pinned witness configurations");

  imds::ElaboratedSystem on = testing::elaborate_scenario("crossing.amg");
  imds::Lts lts_on = imds::explore(on);
  std::vector<imds::DeadlockReport> on_reports = imds::find_deadlocks(lts_on, on);

  int mm = on.find_server("mM");
  bool shared_marker_clear = true;
  for (const auto& r : on_reports)
    for (int s : r.dead_servers)
      if (s == mm) shared_marker_clear = false;
  bool swap_completes = !imds::detect_termination(lts_on, on).empty();

  int on_totals = 0;
  for (const auto& r : on_reports)
    if (r.scope_agents == imds::Scope::Total) ++on_totals;

  verdict(on_totals == 0,
          "criterion 2b - avoidance removes every total deadlock (" +
              std::to_string(on_totals) + " report(s) still have every agent dead)");
  if (on_totals != 0) {
    note("the head-on conflicts at the parked marker are gone (" +
         std::string(shared_marker_clear ? "confirmed" : "NOT confirmed") +
         ") and the lot swap can complete (" +
         std::string(swap_completes ? "confirmed" : "NOT confirmed") + ");");
    note("what remains is the start-lot exchange conflict, the same two-server fault "
         "the two-amp fixture exhibits, and it stops both vehicles; no avoidance rule "
         "can fire for a vehicle standing in a lot. See the project notes for the full "
         "analysis.");
  }
}

// ---- criterion 3 -----------------------------------------------------------

void criterion_3() {
  bool lts_ok = true, dead_ok = true;
  std::mt19937 rng(987654);
  for (const auto& [name, lenient] : kAllFixtures) {
    imds::ElaboratedSystem sys = load_fixture(name, lenient);
    oracle::NaiveLts naive = oracle::naive_explore(sys);
    imds::Lts lts = imds::explore(sys);
    if (naive.configs.size() > 10'000) continue;

    if (lts.configs.size() != naive.configs.size() ||
        lts.edges.size() != naive.edges.size()) {
      lts_ok = false;
      continue;
    }
    for (std::size_t i = 0; i < naive.configs.size(); ++i)
      if (!(lts.configs[i] == naive.configs[i])) lts_ok = false;
    for (std::size_t i = 0; i < naive.edges.size(); ++i)
      if (lts.edges[i].source != naive.edges[i].source ||
          lts.edges[i].action.server != naive.edges[i].server ||
          lts.edges[i].action.index != naive.edges[i].action ||
          lts.edges[i].target != naive.edges[i].target)
        lts_ok = false;

    if (sys.agents.empty()) continue;
    imds::ProgressSets ps = imds::progress_sets(lts, sys);
    for (int sample = 0; sample < 100; ++sample) {
      int config = static_cast<int>(rng() % lts.configs.size());
      int agent = static_cast<int>(rng() % sys.agents.size());
      bool engine_dead = !lts.configs[config].agent_slots[agent].terminated() &&
                         !ps.agent_can_progress[agent][config];
      bool direct_dead = !lts.configs[config].agent_slots[agent].terminated() &&
                         !oracle::agent_can_ever_move(naive, sys, config, agent);
      if (engine_dead != direct_dead) dead_ok = false;
    }
  }
  verdict(lts_ok, "criterion 3a - engine transition systems are identical to the "
                  "brute-force explorer on every fixture");
  verdict(dead_ok, "criterion 3b - the dead predicate matches 100 sampled per-pair "
                   "forward searches per fixture");
}

// ---- criterion 4 -----------------------------------------------------------

void criterion_4() {
  imds::ElaboratedSystem sys = testing::elaborate_fixture("amp2_corrected.imds");
  bool ok = sys.agents.size() == 2 && sys.agents[0].display_name == "AMP" &&
            sys.agents[1].display_name == "AMP__1";
  imds::VerifyRun run = imds::run_verify(sys, {}, 1);
  ok = ok && !run.deadlocks.empty();
  if (ok) {
    imds::SequenceDiagram diagram =
        imds::agent_view(run.deadlocks[0].witness_edges, run.lts, sys);
    std::string text = imds::render_sequence(diagram, sys);
    ok = text.find("(AMP.") != std::string::npos &&
         text.find("(AMP__1.") != std::string::npos &&
         text.find("AMP[1]") == std::string::npos;
  }
  verdict(ok, "criterion 4 - agent view displays exactly 'AMP' and 'AMP__1'");
}

// ---- criterion 5 -----------------------------------------------------------

void criterion_5() {
  bool ok = true;
  for (const auto& [name, lenient] : kAllFixtures) {
    std::string text;
    if (name.ends_with(".amg")) {
      imds::ScenarioParseResult sc = imds::parse_scenario(testing::read_fixture(name));
      imds::GenerateResult gen = imds::generate(*sc.scenario);
      text = imds::pretty_print(*gen.decl);
    } else {
      text = testing::read_fixture(name);
    }
    imds::ParseResult first = imds::parse(text);
    if (!first.ok()) { ok = false; continue; }
    imds::ElaborationOptions opts;
    opts.lenient = lenient;
    imds::ElaborationResult direct = imds::elaborate(*first.decl, opts);
    imds::ParseResult second = imds::parse(imds::pretty_print(*first.decl));
    if (!second.ok() || !direct.ok()) { ok = false; continue; }
    imds::ElaborationResult via = imds::elaborate(*second.decl, opts);
    if (!via.ok() ||
        testing::canonical_summary(*direct.system) != testing::canonical_summary(*via.system))
      ok = false;
  }
  verdict(ok, "criterion 5 - parse/print/parse/elaborate is isomorphic to direct "
              "elaboration on every fixture, the one kept as written included");
}

// ---- criterion 6 -----------------------------------------------------------

void criterion_6() {
  bool ok = true;
  for (const auto& [name, lenient] : kAllFixtures) {
    std::string flags = lenient ? " --verbatim" : "";
    RunResult one =
        run_tool("verify " + testing::fixture_path(name) + " --format json --jobs 1" + flags);
    RunResult eight =
        run_tool("verify " + testing::fixture_path(name) + " --format json --jobs 8" + flags);
    if (one.exit_code != eight.exit_code || one.output != eight.output || one.output.empty())
      ok = false;
  }
  verdict(ok, "criterion 6 - verify --jobs 1 and --jobs 8 produce byte-identical "
              "reports on every fixture");
}

// ---- criterion 7 -----------------------------------------------------------

void criterion_7() {
  RunResult run =
      run_tool("verify " + testing::fixture_path("single_amp.amg") + " --format json");
  bool ok = run.exit_code == 0;
  try {
    json doc = json::parse(run.output);
    ok = ok && doc["deadlocks"].empty() &&
         doc["termination_configurations"].get<int>() >= 1;
  } catch (...) {
    ok = false;
  }
  verdict(ok, "criterion 7 - the single-vehicle model exits 0 with a termination "
              "configuration and no deadlock");
}

// ---- criterion 8 -----------------------------------------------------------

void criterion_8() {
  imds::ElaboratedSystem sys = testing::elaborate_fixture("amp2_corrected.imds");
  imds::PromelaModel model = imds::export_promela(sys);

  std::ifstream golden_in(std::string(IMDS_GOLDEN_DIR) + "/amp2_corrected.pml",
                          std::ios::binary);
  std::ostringstream golden;
  golden << golden_in.rdbuf();
  std::size_t proctypes = 0;
  for (std::size_t pos = model.text.find("proctype "); pos != std::string::npos;
       pos = model.text.find("proctype ", pos + 1))
    ++proctypes;
  bool ok = golden_in.good() && model.text == golden.str() && proctypes == 6;
  verdict(ok, "criterion 8 - export emits 6 processes and matches the golden file "
              "(" + std::to_string(proctypes) + " proctypes)");

  if (!spin_available()) {
    note("spin delegate skipped: no spin executable in this environment");
    return;
  }
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "imds_acceptance_spin";
  fs::create_directories(dir);
  auto run_spin = [&](const std::string& pml_text, const std::string& tag) {
    std::ofstream(dir / (tag + ".pml")) << pml_text;
    std::string cmd = "cd " + dir.string() + " && spin -a " + tag +
                      ".pml && cc -o pan_" + tag + " pan.c && ./pan_" + tag + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    std::array<char, 4096> buf;
    std::string out;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    pclose(pipe);
    return out;
  };
  std::string two_amp = run_spin(model.text, "two_amp");
  imds::ElaboratedSystem single = testing::elaborate_scenario("single_amp.amg");
  std::string single_out = run_spin(imds::export_promela(single).text, "single");
  bool spin_ok = two_amp.find("invalid end state") != std::string::npos &&
                 single_out.find("errors: 0") != std::string::npos;
  verdict(spin_ok, "criterion 8 (spin) - invalid end state for the two-amp export, "
                   "none for the single-vehicle export");
}

}  // namespace

int main() {
  std::cout << "acceptance suite (tool: " << IMDS_TOOL_PATH << ")\n";
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  std::cout << (failures == 0 ? "all criteria passed\n"
                              : std::to_string(failures) + " criterion check(s) failed\n");
  return failures;
}
