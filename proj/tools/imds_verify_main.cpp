// Command-line front end: verify, simulate, generate, export, stats.
//
// Exit codes: 0 success / no deadlock, 1 deadlock (or stuck simulation),
// 2 usage, parse, or validation error, 3 state-space limit exceeded.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "imds/deadlock.hpp"
#include "imds/elaborate.hpp"
#include "imds/parse.hpp"
#include "imds/print.hpp"
#include "imds/promela.hpp"
#include "imds/report.hpp"
#include "imds/scenario.hpp"
#include "imds/state_space.hpp"
#include "imds/version.hpp"
#include "imds/views.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDeadlock = 1;
constexpr int kExitError = 2;
constexpr int kExitLimit = 3;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return out.good();
}

void print_diagnostics(const std::vector<imds::Diagnostic>& diags, const std::string& path) {
  for (const auto& d : diags)
    std::cerr << path << ": " << imds::format_diagnostic(d) << "\n";
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::size_t default_max_states() {
  if (const char* env = std::getenv("IMDS_MAX_STATES")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    std::cerr << "ignoring malformed IMDS_MAX_STATES value '" << env << "'\n";
  }
  return 1'000'000;
}

// Loads a model from .imds text or an .amg scenario (generated on the fly).
std::optional<imds::ElaboratedSystem> load_model(const std::string& path, bool lenient,
                                                 std::optional<bool> avoidance_override) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << path << ": cannot read file\n";
    return std::nullopt;
  }
  imds::SystemDecl decl;
  if (ends_with(path, ".amg")) {
    imds::ScenarioParseResult sc = imds::parse_scenario(*text);
    print_diagnostics(sc.diagnostics, path);
    if (!sc.ok()) return std::nullopt;
    if (avoidance_override) sc.scenario->options.avoidance = *avoidance_override;
    imds::GenerateResult gen = imds::generate(*sc.scenario);
    print_diagnostics(gen.diagnostics, path);
    if (!gen.ok()) return std::nullopt;
    decl = std::move(*gen.decl);
  } else {
    imds::ParseResult parsed = imds::parse(*text);
    print_diagnostics(parsed.diagnostics, path);
    if (!parsed.ok()) return std::nullopt;
    decl = std::move(*parsed.decl);
  }
  imds::ElaborationOptions opts;
  opts.lenient = lenient;
  imds::ElaborationResult elab = imds::elaborate(decl, opts);
  print_diagnostics(elab.diagnostics, path);
  if (!elab.ok()) return std::nullopt;
  return std::move(*elab.system);
}

bool emit(const std::string& content, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << content;
    return true;
  }
  if (!write_file(output_path, content)) {
    std::cerr << output_path << ": cannot write file\n";
    return false;
  }
  return true;
}

int cmd_verify(const std::string& input, std::size_t max_states, const std::string& format,
               const std::string& output, int jobs, bool verbatim) {
  auto sys = load_model(input, verbatim, std::nullopt);
  if (!sys) return kExitError;
  imds::ExplorationLimits limits;
  limits.max_configs = max_states;
  imds::VerifyRun run = imds::run_verify(*sys, limits, jobs);
  std::string rendered =
      format == "json" ? imds::report_to_json(run, *sys) : imds::report_to_text(run, *sys);
  if (!emit(rendered, output)) return kExitError;
  if (!run.analyzed) {
    std::cerr << "state-space limit of " << max_states << " exceeded\n";
    return kExitLimit;
  }
  return run.deadlocks.empty() ? kExitOk : kExitDeadlock;
}

int cmd_stats(const std::string& input, std::size_t max_states, const std::string& format,
              const std::string& output, int jobs) {
  auto sys = load_model(input, false, std::nullopt);
  if (!sys) return kExitError;
  imds::ExplorationLimits limits;
  limits.max_configs = max_states;
  imds::Lts lts = imds::explore(*sys, limits, jobs);
  imds::LtsStats st = imds::stats(lts);
  std::ostringstream os;
  if (format == "json") {
    os << "{\"configurations\": " << st.configs << ", \"edges\": " << st.edges
       << ", \"terminal\": " << st.terminal << ", \"complete\": "
       << (st.complete ? "true" : "false") << "}\n";
  } else {
    os << "configurations: " << st.configs << "\n"
       << "edges: " << st.edges << "\n"
       << "terminal: " << st.terminal << "\n"
       << "complete: " << (st.complete ? "yes" : "no") << "\n";
  }
  if (!emit(os.str(), output)) return kExitError;
  return st.complete ? kExitOk : kExitLimit;
}

int cmd_generate(const std::string& input, const std::string& output,
                 std::optional<bool> avoidance) {
  auto text = read_file(input);
  if (!text) {
    std::cerr << input << ": cannot read file\n";
    return kExitError;
  }
  imds::ScenarioParseResult sc = imds::parse_scenario(*text);
  print_diagnostics(sc.diagnostics, input);
  if (!sc.ok()) return kExitError;
  if (avoidance) sc.scenario->options.avoidance = *avoidance;
  imds::GenerateResult gen = imds::generate(*sc.scenario);
  print_diagnostics(gen.diagnostics, input);
  if (!gen.ok()) return kExitError;
  std::string rendered = imds::pretty_print(*gen.decl);
  if (!emit(rendered, output)) return kExitError;
  imds::ElaborationResult elab = imds::elaborate(*gen.decl);
  if (!elab.ok()) {
    print_diagnostics(elab.diagnostics, output.empty() ? input : output);
    std::cerr << "internal error: generated model does not elaborate\n";
    return kExitError;
  }
  std::cerr << "generated " << elab.system->servers.size() << " server(s), "
            << elab.system->agents.size() << " agent(s)\n";
  return kExitOk;
}

int cmd_export(const std::string& input, const std::string& output) {
  auto sys = load_model(input, false, std::nullopt);
  if (!sys) return kExitError;
  imds::PromelaModel model = imds::export_promela(*sys);
  if (output.empty()) {
    std::cout << model.text;
    return kExitOk;
  }
  if (!write_file(output, model.text)) {
    std::cerr << output << ": cannot write file\n";
    return kExitError;
  }
  std::string manifest_path = output + ".manifest.json";
  if (!write_file(manifest_path, model.manifest_json)) {
    std::cerr << manifest_path << ": cannot write file\n";
    return kExitError;
  }
  return kExitOk;
}

int cmd_simulate(const std::string& input, unsigned long seed, long steps, bool interactive,
                 const std::string& script_path) {
  auto sys = load_model(input, false, std::nullopt);
  if (!sys) return kExitError;

  std::vector<long> script;
  if (!script_path.empty()) {
    auto text = read_file(script_path);
    if (!text) {
      std::cerr << script_path << ": cannot read file\n";
      return kExitError;
    }
    std::istringstream is(*text);
    std::string word;
    while (is >> word) {
      if (word[0] == '#') {
        std::getline(is, word);
        continue;
      }
      script.push_back(std::strtol(word.c_str(), nullptr, 10));
    }
  }

  std::mt19937_64 rng(seed);
  imds::Configuration cfg = sys->initial;
  std::size_t script_pos = 0;

  for (long step_no = 0; step_no < steps; ++step_no) {
    std::vector<imds::ActionRef> enabled = imds::enabled_actions(cfg, *sys);
    std::cout << "[" << step_no << "] " << sys->describe(cfg) << "\n";
    if (enabled.empty()) {
      bool all_terminated = true;
      for (const auto& slot : cfg.agent_slots)
        if (!slot.terminated()) all_terminated = false;
      if (all_terminated) {
        std::cout << "terminated: every agent completed its run\n";
        return kExitOk;
      }
      std::cout << "stuck — possible deadlock, run verify\n";
      return kExitDeadlock;
    }
    for (std::size_t i = 0; i < enabled.size(); ++i) {
      const imds::GroundAction& a = imds::action_of(*sys, enabled[i]);
      std::cout << "  (" << i << ") " << sys->agents[a.in_agent].name << ": "
                << sys->service_name(a.server, a.in_service) << " at "
                << sys->server_name(a.server) << "  [" << a.id << "]\n";
    }
    std::size_t choice = 0;
    if (!script.empty()) {
      if (script_pos >= script.size()) {
        std::cout << "script exhausted after " << step_no << " step(s)\n";
        return kExitOk;
      }
      long idx = script[script_pos++];
      if (idx < 0 || idx >= static_cast<long>(enabled.size())) {
        std::cerr << "script index " << idx << " is out of range\n";
        return kExitError;
      }
      choice = static_cast<std::size_t>(idx);
    } else if (interactive) {
      for (;;) {
        std::cout << "action [0.." << enabled.size() - 1 << "]> " << std::flush;
        std::string line;
        if (!std::getline(std::cin, line)) {
          std::cout << "\nend of input\n";
          return kExitOk;
        }
        char* end = nullptr;
        long idx = std::strtol(line.c_str(), &end, 10);
        if (end != line.c_str() && idx >= 0 && idx < static_cast<long>(enabled.size())) {
          choice = static_cast<std::size_t>(idx);
          break;
        }
        std::cout << "invalid choice, try again\n";
      }
    } else {
      choice = static_cast<std::size_t>(rng() % enabled.size());
    }
    const imds::GroundAction& a = imds::action_of(*sys, enabled[choice]);
    std::cout << "  -> firing (" << choice << ") " << a.id << "\n";
    cfg = imds::step(cfg, *sys, a);
  }
  std::cout << "step limit reached\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"explicit-state verifier for cooperating mobile platform models"};
  app.set_version_flag("--version", std::string(imds::kToolName) + " " + imds::kToolVersion);
  app.require_subcommand(1);

  std::string input, output, format = "text", script, avoidance_flag;
  std::size_t max_states = default_max_states();
  int jobs = 1;
  bool verbatim = false, interactive = false;
  unsigned long seed = 0;
  long steps = 1000;

  auto add_common = [&](CLI::App* cmd, bool with_limits) {
    cmd->add_option("input", input, "model (.imds) or scenario (.amg)")->required();
    if (with_limits) {
      cmd->add_option("--max-states", max_states, "exploration limit on configurations");
      cmd->add_option("--jobs", jobs, "internal worker cap (output is identical for any value)");
    }
  };

  CLI::App* verify = app.add_subcommand("verify", "build the state space and find deadlocks");
  add_common(verify, true);
  verify->add_option("--format", format, "text|json")->check(CLI::IsMember({"text", "json"}));
  verify->add_option("--output", output, "write the report to a file");
  verify->add_flag("--verbatim", verbatim,
                   "permit rules that can never fire (verify a model exactly as written)");

  CLI::App* simulate = app.add_subcommand("simulate", "walk the model step by step");
  simulate->add_option("input", input, "model (.imds) or scenario (.amg)")->required();
  simulate->add_option("--seed", seed, "random-walk seed");
  simulate->add_option("--steps", steps, "step limit");
  simulate->add_flag("--interactive", interactive, "choose each action on standard input");
  simulate->add_option("--script", script, "file of action indices to replay");

  CLI::App* generate = app.add_subcommand("generate", "compile a scenario into a model");
  generate->add_option("input", input, "scenario (.amg)")->required();
  generate->add_option("--output", output, "where to write the .imds model");
  generate->add_option("--avoidance", avoidance_flag, "override the scenario's avoidance option")
      ->check(CLI::IsMember({"on", "off"}));

  CLI::App* exporter = app.add_subcommand("export", "translate a model to Promela");
  exporter->add_option("input", input, "model (.imds) or scenario (.amg)")->required();
  exporter->add_option("--output", output, "where to write the .pml file");

  CLI::App* stats_cmd = app.add_subcommand("stats", "state-space size summary");
  add_common(stats_cmd, true);
  stats_cmd->add_option("--format", format, "text|json")->check(CLI::IsMember({"text", "json"}));
  stats_cmd->add_option("--output", output, "write the summary to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  std::optional<bool> avoidance;
  if (!avoidance_flag.empty()) avoidance = avoidance_flag == "on";

  try {
    if (verify->parsed())
      return cmd_verify(input, max_states, format, output, jobs, verbatim);
    if (simulate->parsed()) return cmd_simulate(input, seed, steps, interactive, script);
    if (generate->parsed()) return cmd_generate(input, output, avoidance);
    if (exporter->parsed()) return cmd_export(input, output);
    if (stats_cmd->parsed()) return cmd_stats(input, max_states, format, output, jobs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
