#include "imds/elaborate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace imds {

namespace {

using Env = std::unordered_map<std::string, long>;

struct ElabAbort {};

std::string indexed_name(const Ident& base, long idx) {
  return base + "[" + std::to_string(idx) + "]";
}

class Elaborator {
 public:
  Elaborator(const SystemDecl& decl, const ElaborationOptions& opts,
             std::vector<Diagnostic>& diags)
      : decl_(decl), opts_(opts), diags_(diags) {}

  ElaboratedSystem run() {
    collect_constants();
    collect_types();
    collect_instances();
    checkpoint();
    build_type_infos();
    checkpoint();
    process_init();
    checkpoint();
    ground_rules();
    checkpoint();
    assemble_initial();
    checkpoint();
    sys_.decl = decl_;
    return std::move(sys_);
  }

 private:
  void error(const SourceSpan& span, std::string msg) {
    diags_.push_back({Severity::Error, std::move(msg), span});
    failed_ = true;
  }
  void warn(const SourceSpan& span, std::string msg) {
    diags_.push_back({Severity::Warning, std::move(msg), span});
  }
  void checkpoint() {
    if (failed_) throw ElabAbort{};
  }

  std::optional<long> eval(const Expr& e, const Env& env) {
    long total = 0;
    for (const auto& term : e.terms) {
      long v;
      if (std::holds_alternative<long>(term.value)) {
        v = std::get<long>(term.value);
      } else {
        const Ident& name = std::get<Ident>(term.value);
        auto it = env.find(name);
        if (it == env.end()) {
          error(e.span, "unbound identifier '" + name + "' in index expression");
          return std::nullopt;
        }
        v = it->second;
      }
      total += term.sign * v;
    }
    return total;
  }

  void collect_constants() {
    for (const auto& c : decl_.constants) {
      if (consts_.count(c.name)) {
        error(c.span, "duplicate constant '" + c.name + "'");
        continue;
      }
      if (c.value < 0) error(c.span, "constant '" + c.name + "' must be non-negative");
      consts_[c.name] = c.value;
    }
  }

  void collect_types() {
    for (std::size_t i = 0; i < decl_.server_types.size(); ++i) {
      const auto& st = decl_.server_types[i];
      if (type_index_.count(st.name)) {
        error(st.span, "duplicate server type '" + st.name + "'");
        continue;
      }
      type_index_[st.name] = static_cast<int>(i);
    }
  }

  // Declared instance lists. A server instance takes its type from its name.
  void collect_instances() {
    for (const auto& d : decl_.server_instances) {
      auto ti = type_index_.find(d.name);
      if (ti == type_index_.end()) {
        error(d.span, "server instance '" + d.name + "' does not name a declared server type");
        continue;
      }
      long count = instance_count(d);
      if (count < 0) continue;
      int base = static_cast<int>(sys_.servers.size());
      server_group_[d.name] = {base, count, d.size.has_value()};
      for (long k = 1; k <= count; ++k) {
        ServerInstance inst;
        inst.name = d.size ? indexed_name(d.name, k) : d.name;
        inst.type_index = ti->second;
        sys_.servers.push_back(std::move(inst));
      }
    }
    for (const auto& d : decl_.agent_instances) {
      if (server_group_.count(d.name)) {
        error(d.span, "agent '" + d.name + "' collides with a server instance name");
        continue;
      }
      if (agent_group_.count(d.name)) {
        error(d.span, "duplicate agent '" + d.name + "'");
        continue;
      }
      long count = instance_count(d);
      if (count < 0) continue;
      int base = static_cast<int>(sys_.agents.size());
      agent_group_[d.name] = {base, count, d.size.has_value()};
      for (long k = 1; k <= count; ++k) {
        AgentInstance inst;
        inst.name = d.size ? indexed_name(d.name, k) : d.name;
        inst.display_name =
            !d.size ? d.name : (k == 1 ? d.name : d.name + "__" + std::to_string(k - 1));
        sys_.agents.push_back(std::move(inst));
      }
    }
    std::set<std::string> display;
    for (const auto& a : sys_.agents)
      if (!display.insert(a.display_name).second)
        error(SourceSpan{}, "agent display name '" + a.display_name + "' is not unique");
  }

  long instance_count(const Decl& d) {
    if (!d.size) return 1;
    auto v = eval(*d.size, const_env());
    if (!v) return -1;
    if (*v < 1) {
      error(d.span, "array size of '" + d.name + "' must be at least 1");
      return -1;
    }
    return *v;
  }

  Env const_env() const {
    Env env;
    for (const auto& [k, v] : consts_) env[k] = v;
    return env;
  }

  SymbolTable build_symbols(const std::vector<Decl>& decls, const char* what,
                            bool indexed_flat_names = true) {
    SymbolTable table;
    std::set<std::string> seen;
    for (const auto& d : decls) {
      if (!seen.insert(d.name).second) {
        error(d.span, std::string("duplicate ") + what + " '" + d.name + "'");
        continue;
      }
      SymbolTable::Entry entry;
      entry.name = d.name;
      entry.base = table.size();
      if (d.size) {
        auto v = eval(*d.size, const_env());
        if (!v) continue;
        if (*v < 1) {
          error(d.span, std::string("array size of ") + what + " '" + d.name +
                            "' must be at least 1");
          continue;
        }
        entry.arity = *v;
        for (long k = 1; k <= *v; ++k)
          table.flat_names.push_back(indexed_flat_names ? indexed_name(d.name, k) : d.name);
      } else {
        entry.arity = 0;
        table.flat_names.push_back(d.name);
      }
      table.entries.push_back(std::move(entry));
    }
    return table;
  }

  struct TypeInfo {
    SymbolTable formal_agents;
    SymbolTable formal_servers;
    std::vector<int> formal_server_types;  // per formal entry
  };

  void build_type_infos() {
    for (const auto& st : decl_.server_types) {
      sys_.state_symbols.push_back(build_symbols(st.states, "state"));
      sys_.service_symbols.push_back(build_symbols(st.services, "service"));
      TypeInfo info;
      info.formal_agents = build_symbols(st.formal_agents, "formal agent");
      info.formal_servers = build_symbols(st.formal_servers, "formal server");
      for (const auto& entry : info.formal_servers.entries) {
        if (entry.name == st.name)
          error(st.span, "formal server '" + entry.name +
                             "' shadows the declaring server type");
        auto ti = type_index_.find(entry.name);
        if (ti == type_index_.end()) {
          error(st.span, "formal server '" + entry.name +
                             "' does not name a declared server type");
          info.formal_server_types.push_back(-1);
        } else {
          info.formal_server_types.push_back(ti->second);
        }
      }
      type_infos_.push_back(std::move(info));
    }
  }

  // Resolves a flat slot in a formal or symbol table: scalar entries take no
  // index, array entries require one in [1, arity].
  std::optional<int> resolve_slot(const SymbolTable& table, const Ref& ref,
                                  const Env& env, const char* what) {
    const SymbolTable::Entry* entry = table.find(ref.name);
    if (!entry) {
      error(ref.span, std::string("unknown ") + what + " '" + ref.name + "'");
      return std::nullopt;
    }
    if (entry->arity == 0) {
      if (ref.index) {
        error(ref.span, std::string(what) + " '" + ref.name + "' is not an array");
        return std::nullopt;
      }
      return entry->base;
    }
    if (!ref.index) {
      error(ref.span, std::string(what) + " '" + ref.name + "' is an array; an index is required");
      return std::nullopt;
    }
    auto idx = eval(*ref.index, env);
    if (!idx) return std::nullopt;
    if (*idx < 1 || *idx > entry->arity) {
      error(ref.span, std::string(what) + " index " + std::to_string(*idx) + " of '" +
                          ref.name + "' is outside [1, " + std::to_string(entry->arity) + "]");
      return std::nullopt;
    }
    return entry->base + static_cast<int>(*idx) - 1;
  }

  struct Group {
    int base = 0;
    long count = 0;
    bool is_array = false;
  };

  std::optional<int> resolve_group_ref(const std::map<std::string, Group>& groups,
                                       const Ref& ref, const Env& env, const char* what) {
    auto it = groups.find(ref.name);
    if (it == groups.end()) {
      error(ref.span, std::string("unknown ") + what + " '" + ref.name + "'");
      return std::nullopt;
    }
    const Group& g = it->second;
    if (!g.is_array) {
      if (ref.index) {
        error(ref.span, std::string(what) + " '" + ref.name + "' is not an array");
        return std::nullopt;
      }
      return g.base;
    }
    if (!ref.index) {
      error(ref.span, std::string(what) + " '" + ref.name + "' is an array; an index is required");
      return std::nullopt;
    }
    auto idx = eval(*ref.index, env);
    if (!idx) return std::nullopt;
    if (*idx < 1 || *idx > g.count) {
      error(ref.span, std::string(what) + " index " + std::to_string(*idx) + " of '" +
                          ref.name + "' is outside [1, " + std::to_string(g.count) + "]");
      return std::nullopt;
    }
    return g.base + static_cast<int>(*idx) - 1;
  }

  // Expands replicator prefixes into a list of environments (constants plus
  // one value per replicated index), in lexicographic order.
  std::vector<Env> expand_replicators(const std::vector<Replicator>& reps) {
    std::vector<Env> envs{const_env()};
    for (const auto& rep : reps) {
      std::vector<Env> next;
      for (const auto& env : envs) {
        // Range bounds may use constants and literals only; an environment
        // restricted to constants enforces that for free.
        auto lo = eval(rep.lo, const_env());
        auto hi = eval(rep.hi, const_env());
        if (!lo || !hi) return {};
        if (*lo > *hi) {
          error(rep.span, "empty replicator range " + std::to_string(*lo) + ".." +
                              std::to_string(*hi));
          return {};
        }
        for (long v = *lo; v <= *hi; ++v) {
          Env e = env;
          if (e.count(rep.var)) {
            error(rep.span, "replicator index '" + rep.var + "' shadows another binding");
            return {};
          }
          e[rep.var] = v;
          next.push_back(std::move(e));
        }
      }
      envs = std::move(next);
    }
    return envs;
  }

  void process_init() {
    std::vector<bool> bound(sys_.servers.size(), false);
    std::vector<int> init_message_count(sys_.agents.size(), 0);
    std::vector<Configuration::Slot> slots(sys_.agents.size());

    for (const auto& item : decl_.init_items) {
      if (std::holds_alternative<InitBinding>(item))
        process_binding(std::get<InitBinding>(item), bound);
      else
        process_init_message(std::get<InitMessage>(item), init_message_count, slots);
    }
    for (std::size_t i = 0; i < sys_.servers.size(); ++i)
      if (!bound[i])
        error(SourceSpan{}, "server instance '" + sys_.servers[i].name +
                                "' is never bound in the init block");
    for (std::size_t i = 0; i < sys_.agents.size(); ++i) {
      if (init_message_count[i] == 0)
        error(SourceSpan{}, "agent '" + sys_.agents[i].name + "' has no initial message");
      else if (init_message_count[i] > 1)
        error(SourceSpan{}, "agent '" + sys_.agents[i].name +
                                "' has more than one initial message");
    }
    init_slots_ = std::move(slots);
  }

  void process_binding(const InitBinding& b, std::vector<bool>& bound) {
    for (const auto& env : expand_replicators(b.replicators)) {
      auto inst = resolve_group_ref(server_group_, b.instance, env, "server instance");
      if (!inst) continue;
      ServerInstance& server = sys_.servers[*inst];
      if (bound[*inst]) {
        error(b.span, "server instance '" + server.name + "' is bound more than once");
        continue;
      }
      bound[*inst] = true;

      // Flatten actual elements, then split them across the agent and server
      // formal slots in declaration order.
      struct Elem {
        bool is_agent;
        int index;
        SourceSpan span;
      };
      std::vector<Elem> elems;
      bool actuals_ok = true;
      for (const auto& actual : b.actuals) {
        std::vector<std::optional<long>> indices;  // nullopt: plain reference
        if (actual.indices.empty()) {
          indices.push_back(std::nullopt);
        } else {
          for (const auto& spec : actual.indices) {
            auto lo = eval(spec.lo, env);
            if (!lo) { actuals_ok = false; break; }
            if (spec.hi) {
              auto hi = eval(*spec.hi, env);
              if (!hi) { actuals_ok = false; break; }
              if (*lo > *hi) {
                error(actual.span, "empty actual range");
                actuals_ok = false;
                break;
              }
              for (long v = *lo; v <= *hi; ++v) indices.push_back(v);
            } else {
              indices.push_back(*lo);
            }
          }
        }
        if (!actuals_ok) break;
        for (const auto& idx : indices) {
          Ref ref;
          ref.name = actual.name;
          ref.span = actual.span;
          if (idx) ref.index = Expr::literal(*idx);
          if (agent_group_.count(actual.name)) {
            auto a = resolve_group_ref(agent_group_, ref, env, "agent");
            if (!a) { actuals_ok = false; break; }
            elems.push_back({true, *a, actual.span});
          } else {
            auto s = resolve_group_ref(server_group_, ref, env, "server instance");
            if (!s) { actuals_ok = false; break; }
            elems.push_back({false, *s, actual.span});
          }
        }
        if (!actuals_ok) break;
      }
      if (!actuals_ok) continue;

      const TypeInfo& info = type_infos_[server.type_index];
      std::size_t agent_slots = info.formal_agents.flat_names.size();
      std::size_t server_slots = info.formal_servers.flat_names.size();
      if (elems.size() != agent_slots + server_slots) {
        error(b.span, "binding of '" + server.name + "' passes " +
                          std::to_string(elems.size()) + " actuals; its type takes " +
                          std::to_string(agent_slots) + " agent(s) and " +
                          std::to_string(server_slots) + " server(s)");
        continue;
      }
      bool shape_ok = true;
      for (std::size_t k = 0; k < elems.size(); ++k) {
        bool want_agent = k < agent_slots;
        if (elems[k].is_agent != want_agent) {
          error(elems[k].span, want_agent
                                   ? "expected an agent actual in this position"
                                   : "expected a server actual in this position");
          shape_ok = false;
          break;
        }
      }
      if (!shape_ok) continue;
      server.bound_agents.clear();
      server.bound_servers.clear();
      for (std::size_t k = 0; k < agent_slots; ++k)
        server.bound_agents.push_back(elems[k].index);
      for (std::size_t k = 0; k < server_slots; ++k) {
        int target = elems[agent_slots + k].index;
        // Which formal entry does this flat slot belong to?
        int formal = 0;
        for (std::size_t e = 0; e < info.formal_servers.entries.size(); ++e) {
          const auto& entry = info.formal_servers.entries[e];
          int width = entry.arity == 0 ? 1 : static_cast<int>(entry.arity);
          if (static_cast<int>(k) < entry.base + width) {
            formal = static_cast<int>(e);
            break;
          }
        }
        int want_type = info.formal_server_types[formal];
        if (want_type >= 0 && sys_.servers[target].type_index != want_type) {
          error(b.span, "actual '" + sys_.servers[target].name + "' bound to formal '" +
                            info.formal_servers.entries[formal].name + "' of '" +
                            server.name + "' has the wrong server type");
        }
        server.bound_servers.push_back(target);
      }

      auto state = resolve_slot(sys_.state_symbols[server.type_index], b.state, env, "state");
      if (state) server.init_state = *state;
    }
  }

  void process_init_message(const InitMessage& m, std::vector<int>& counts,
                            std::vector<Configuration::Slot>& slots) {
    for (const auto& env : expand_replicators(m.replicators)) {
      auto agent = resolve_group_ref(agent_group_, m.message.agent, env, "agent");
      auto server = resolve_group_ref(server_group_, m.message.server, env, "server instance");
      if (!agent || !server) continue;
      const ServerInstance& inst = sys_.servers[*server];
      auto service = resolve_slot(sys_.service_symbols[inst.type_index], m.message.service,
                                  env, "service");
      if (!service) continue;
      if (std::find(inst.bound_agents.begin(), inst.bound_agents.end(), *agent) ==
          inst.bound_agents.end()) {
        error(m.span, "initial message sender '" + sys_.agents[*agent].name +
                          "' is not bound to server '" + inst.name + "'");
        continue;
      }
      ++counts[*agent];
      slots[*agent] = {static_cast<int32_t>(*server), static_cast<int32_t>(*service)};
    }
  }

  void ground_rules() {
    sys_.actions_by_server.resize(sys_.servers.size());
    for (std::size_t si = 0; si < sys_.servers.size(); ++si) {
      ServerInstance& server = sys_.servers[si];
      const ServerType& type = decl_.server_types[server.type_index];
      const TypeInfo& info = type_infos_[server.type_index];

      struct DupKey {
        int in_agent, in_service, in_state;
        bool has_output;
        int out_agent, out_server, out_service, out_state;
        auto operator<=>(const DupKey&) const = default;
      };
      std::map<DupKey, int> seen;                 // key -> rule ordinal of keeper
      std::map<std::pair<int, int>, int> dup_count;  // (dup ordinal, keeper ordinal)

      for (std::size_t ri = 0; ri < type.rules.size(); ++ri) {
        const ActionRule& rule = type.rules[ri];
        // Misaddressed input: the consumed message must be directed at the
        // server declaring the rule.
        if (rule.input_message.server.name != type.name ||
            rule.input_message.server.index.has_value()) {
          if (opts_.lenient) {
            if (si == first_instance_of_type(server.type_index))
              warn(rule.input_message.server.span,
                   "rule " + std::to_string(ri + 1) + " of server '" + type.name +
                       "' consumes a message addressed to '" +
                       rule.input_message.server.name + "'; the rule can never fire and was dropped");
            continue;
          }
          error(rule.input_message.server.span,
                "rule " + std::to_string(ri + 1) + " of server '" + type.name +
                    "' must consume a message addressed to '" + type.name + "', not '" +
                    rule.input_message.server.name + "'");
          continue;
        }
        if (rule.input_state.server.name != type.name || rule.input_state.server.index) {
          error(rule.input_state.span, "the input state of a rule must belong to '" +
                                           type.name + "'");
          continue;
        }
        if (rule.output_state.server.name != type.name || rule.output_state.server.index) {
          error(rule.output_state.span, "the output state of a rule must belong to '" +
                                            type.name + "'");
          continue;
        }

        for (const auto& env : expand_replicators(rule.replicators)) {
          GroundAction action;
          action.server = static_cast<int>(si);
          action.rule_ordinal = static_cast<int>(ri);
          for (const auto& rep : rule.replicators)
            action.valuation.push_back(env.at(rep.var));

          auto agent_slot =
              resolve_slot(info.formal_agents, rule.input_message.agent, env, "formal agent");
          if (!agent_slot) continue;
          action.in_agent = server.bound_agents[*agent_slot];
          auto service = resolve_slot(sys_.service_symbols[server.type_index],
                                      rule.input_message.service, env, "service");
          if (!service) continue;
          action.in_service = *service;
          auto state = resolve_slot(sys_.state_symbols[server.type_index],
                                    rule.input_state.state, env, "state");
          if (!state) continue;
          action.in_state = *state;

          if (rule.output_message) {
            action.has_output = true;
            auto out_agent_slot = resolve_slot(info.formal_agents,
                                               rule.output_message->agent, env, "formal agent");
            if (!out_agent_slot) continue;
            action.out_agent = server.bound_agents[*out_agent_slot];
            if (action.out_agent != action.in_agent) {
              error(rule.output_message->agent.span,
                    "an action moves exactly the agent whose message it consumes");
              continue;
            }
            const Ref& target = rule.output_message->server;
            int target_instance = -1;
            if (target.name == type.name && !target.index) {
              target_instance = static_cast<int>(si);
            } else {
              auto server_slot = resolve_slot(info.formal_servers, target, env, "formal server");
              if (!server_slot) continue;
              target_instance = server.bound_servers[*server_slot];
            }
            action.out_server = target_instance;
            auto out_service =
                resolve_slot(sys_.service_symbols[sys_.servers[target_instance].type_index],
                             rule.output_message->service, env, "service");
            if (!out_service) continue;
            action.out_service = *out_service;
          }
          auto out_state = resolve_slot(sys_.state_symbols[server.type_index],
                                        rule.output_state.state, env, "state");
          if (!out_state) continue;
          action.out_state = *out_state;

          DupKey key{action.in_agent, action.in_service, action.in_state, action.has_output,
                     action.out_agent, action.out_server, action.out_service, action.out_state};
          auto [it, inserted] = seen.emplace(key, static_cast<int>(ri));
          if (!inserted) {
            ++dup_count[{static_cast<int>(ri), it->second}];
            continue;
          }

          std::ostringstream id;
          id << server.name << '#' << (ri + 1);
          if (!rule.replicators.empty()) {
            id << '<';
            for (std::size_t k = 0; k < rule.replicators.size(); ++k) {
              if (k) id << ',';
              id << rule.replicators[k].var << '=' << action.valuation[k];
            }
            id << '>';
          }
          action.id = id.str();
          sys_.actions_by_server[si].push_back(std::move(action));
        }
      }
      for (const auto& [pair, count] : dup_count)
        warn(type.rules[pair.first].span,
             "rule " + std::to_string(pair.first + 1) + " of '" + server.name + "' duplicates rule " +
                 std::to_string(pair.second + 1) + " for " + std::to_string(count) +
                 " index valuation(s); duplicates collapsed");
    }
  }

  std::size_t first_instance_of_type(int type) const {
    for (std::size_t i = 0; i < sys_.servers.size(); ++i)
      if (sys_.servers[i].type_index == type) return i;
    return 0;
  }

  void assemble_initial() {
    Configuration init;
    for (const auto& server : sys_.servers) {
      if (server.init_state < 0) {
        error(SourceSpan{}, "server instance '" + server.name + "' has no initial state");
        init.server_states.push_back(0);
      } else {
        init.server_states.push_back(server.init_state);
      }
    }
    init.agent_slots = init_slots_;
    sys_.initial = std::move(init);
  }

  const SystemDecl& decl_;
  ElaborationOptions opts_;
  std::vector<Diagnostic>& diags_;
  ElaboratedSystem sys_;
  bool failed_ = false;

  std::map<std::string, long> consts_;
  std::unordered_map<std::string, int> type_index_;
  std::map<std::string, Group> server_group_;
  std::map<std::string, Group> agent_group_;
  std::vector<TypeInfo> type_infos_;
  std::vector<Configuration::Slot> init_slots_;
};

}  // namespace

ElaborationResult elaborate(const SystemDecl& decl, const ElaborationOptions& opts) {
  ElaborationResult result;
  Elaborator elab(decl, opts, result.diagnostics);
  try {
    ElaboratedSystem sys = elab.run();
    for (const auto& d : result.diagnostics)
      if (d.severity == Severity::Warning) sys.warnings.push_back(d);
    result.system = std::move(sys);
  } catch (const ElabAbort&) {
    result.system.reset();
  }
  return result;
}

Configuration initial_configuration(const ElaboratedSystem& sys) { return sys.initial; }

std::string ElaboratedSystem::describe_slot(const Configuration::Slot& slot) const {
  if (slot.terminated()) return "terminated";
  return service_name(slot.server, slot.service) + "@" + server_name(slot.server);
}

std::string ElaboratedSystem::describe(const Configuration& cfg) const {
  std::ostringstream os;
  for (std::size_t i = 0; i < servers.size(); ++i) {
    if (i) os << ' ';
    os << servers[i].name << '=' << state_name(static_cast<int>(i), cfg.server_states[i]);
  }
  for (std::size_t a = 0; a < agents.size(); ++a)
    os << " | " << agents[a].name << ": " << describe_slot(cfg.agent_slots[a]);
  return os.str();
}

}  // namespace imds
