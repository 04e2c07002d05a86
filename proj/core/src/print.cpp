#include "imds/print.hpp"

#include <sstream>

namespace imds {

namespace {

void put_expr(std::ostream& os, const Expr& e) {
  bool first = true;
  for (const auto& term : e.terms) {
    if (term.sign < 0)
      os << '-';
    else if (!first)
      os << '+';
    if (std::holds_alternative<long>(term.value))
      os << std::get<long>(term.value);
    else
      os << std::get<Ident>(term.value);
    first = false;
  }
}

void put_ref(std::ostream& os, const Ref& r) {
  os << r.name;
  if (r.index) {
    os << '[';
    put_expr(os, *r.index);
    os << ']';
  }
}

void put_message(std::ostream& os, const MessagePattern& m) {
  put_ref(os, m.agent);
  os << '.';
  put_ref(os, m.server);
  os << '.';
  put_ref(os, m.service);
}

void put_state(std::ostream& os, const StatePattern& p) {
  put_ref(os, p.server);
  os << '.';
  put_ref(os, p.state);
}

void put_decl_list(std::ostream& os, const std::vector<Decl>& decls) {
  bool first = true;
  for (const auto& d : decls) {
    if (!first) os << ", ";
    os << d.name;
    if (d.size) {
      os << '[';
      put_expr(os, *d.size);
      os << ']';
    }
    first = false;
  }
}

void put_replicators(std::ostream& os, const std::vector<Replicator>& reps) {
  for (const auto& rep : reps) {
    os << '<' << rep.var << '=';
    put_expr(os, rep.lo);
    os << "..";
    put_expr(os, rep.hi);
    os << "> ";
  }
}

void put_actual(std::ostream& os, const Actual& a) {
  os << a.name;
  if (!a.indices.empty()) {
    os << '[';
    bool first = true;
    for (const auto& spec : a.indices) {
      if (!first) os << ',';
      put_expr(os, spec.lo);
      if (spec.hi) {
        os << "..";
        put_expr(os, *spec.hi);
      }
      first = false;
    }
    os << ']';
  }
}

}  // namespace

std::string print_expr(const Expr& e) {
  std::ostringstream os;
  put_expr(os, e);
  return os.str();
}

std::string print_ref(const Ref& r) {
  std::ostringstream os;
  put_ref(os, r);
  return os.str();
}

std::string pretty_print(const SystemDecl& decl) {
  std::ostringstream os;
  for (const auto& c : decl.constants)
    os << "#DEFINE " << c.name << ' ' << c.value << "\n";
  if (!decl.constants.empty()) os << "\n";

  for (const auto& st : decl.server_types) {
    os << "server: " << st.name << "(agents ";
    put_decl_list(os, st.formal_agents);
    os << "; servers ";
    put_decl_list(os, st.formal_servers);
    os << "),\n";
    os << "services {";
    put_decl_list(os, st.services);
    os << "},\n";
    os << "states {";
    put_decl_list(os, st.states);
    os << "},\n";
    os << "actions {\n";
    for (const auto& rule : st.rules) {
      os << "  ";
      put_replicators(os, rule.replicators);
      os << '{';
      put_message(os, rule.input_message);
      os << ", ";
      put_state(os, rule.input_state);
      os << "} -> {";
      if (rule.output_message) {
        put_message(os, *rule.output_message);
        os << ", ";
      }
      put_state(os, rule.output_state);
      os << "},\n";
    }
    os << "}\n\n";
  }

  os << "servers ";
  put_decl_list(os, decl.server_instances);
  os << ";\n";
  os << "agents ";
  put_decl_list(os, decl.agent_instances);
  os << ";\n\n";

  os << "init -> {\n";
  for (const auto& item : decl.init_items) {
    os << "  ";
    if (std::holds_alternative<InitBinding>(item)) {
      const auto& b = std::get<InitBinding>(item);
      put_replicators(os, b.replicators);
      put_ref(os, b.instance);
      os << '(';
      bool first = true;
      for (const auto& a : b.actuals) {
        if (!first) os << ", ";
        put_actual(os, a);
        first = false;
      }
      os << ").";
      put_ref(os, b.state);
    } else {
      const auto& m = std::get<InitMessage>(item);
      put_replicators(os, m.replicators);
      put_message(os, m.message);
    }
    os << ",\n";
  }
  os << "}.\n";
  return os.str();
}

}  // namespace imds
