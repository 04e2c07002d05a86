#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "imds/diagnostics.hpp"

namespace imds {

using Ident = std::string;

/// Linear integer expression over literals and named indices: t1 +/- t2 +/- ...
/// The index-expression language is deliberately tiny; anything richer is a
/// parse error.
struct Expr {
  struct Term {
    int sign = 1;  // +1 or -1
    std::variant<long, Ident> value;
  };
  std::vector<Term> terms;
  SourceSpan span;

  static Expr literal(long v) {
    Expr e;
    e.terms.push_back({1, v});
    return e;
  }
  static Expr ident(Ident name) {
    Expr e;
    e.terms.push_back({1, std::move(name)});
    return e;
  }
  bool is_literal(long v) const {
    return terms.size() == 1 && terms[0].sign == 1 &&
           std::holds_alternative<long>(terms[0].value) &&
           std::get<long>(terms[0].value) == v;
  }
};

/// A name with at most one index expression: `tryM[j]`, `markerE`, `switch[3-j]`.
struct Ref {
  Ident name;
  std::optional<Expr> index;
  SourceSpan span;
};

/// A message pattern (agent, server, service), each part indexable.
struct MessagePattern {
  Ref agent;
  Ref server;
  Ref service;
  SourceSpan span;
};

/// A server-state pattern (server, state).
struct StatePattern {
  Ref server;
  Ref state;
  SourceSpan span;
};

/// Replicated-index prefix `<i=lo..hi>`.
struct Replicator {
  Ident var;
  Expr lo;
  Expr hi;
  SourceSpan span;
};

/// One action: input (message, state) to output (optional message, state).
/// A missing output message terminates the consumed agent.
struct ActionRule {
  std::vector<Replicator> replicators;
  MessagePattern input_message;
  StatePattern input_state;
  std::optional<MessagePattern> output_message;
  StatePattern output_state;
  SourceSpan span;
};

/// Declared name with an optional array size: `resE[2]`, `free`, `AMP[N]`.
struct Decl {
  Ident name;
  std::optional<Expr> size;
  SourceSpan span;
};

struct ServerType {
  Ident name;
  std::vector<Decl> formal_agents;
  std::vector<Decl> formal_servers;
  std::vector<Decl> services;
  std::vector<Decl> states;
  std::vector<ActionRule> rules;
  SourceSpan span;
};

/// Actual parameter in an init binding. One name with a list of index specs,
/// each either a single expression or a range: `AMP[1..N]`, `markerE[1,2]`,
/// `lotE[j]`, `markerM`.
struct Actual {
  struct IndexSpec {
    Expr lo;
    std::optional<Expr> hi;  // set for ranges `lo..hi`
  };
  Ident name;
  std::vector<IndexSpec> indices;
  SourceSpan span;
};

/// `name[j](actuals).state`: binds one server instance and gives its initial state.
struct InitBinding {
  std::vector<Replicator> replicators;
  Ref instance;
  std::vector<Actual> actuals;
  Ref state;
  SourceSpan span;
};

/// `AMP[j].lotE[j].start`: an agent's initial pending message.
struct InitMessage {
  std::vector<Replicator> replicators;
  MessagePattern message;
  SourceSpan span;
};

using InitItem = std::variant<InitBinding, InitMessage>;

struct ConstBinding {
  Ident name;
  long value = 0;
  SourceSpan span;
};

/// A parsed model: constants, server types, instance lists, and the init block.
struct SystemDecl {
  std::vector<ConstBinding> constants;
  std::vector<ServerType> server_types;
  std::vector<Decl> server_instances;
  std::vector<Decl> agent_instances;
  std::vector<InitItem> init_items;
};

}  // namespace imds
