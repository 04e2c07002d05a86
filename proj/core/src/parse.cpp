#include "imds/parse.hpp"

#include <initializer_list>

#include "imds/lexer.hpp"

namespace imds {

namespace {

bool is_keyword(const std::string& s) {
  return s == "server" || s == "servers" || s == "agents" || s == "services" ||
         s == "states" || s == "actions" || s == "init";
}

struct ParseAbort {};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags)
      : tokens_(std::move(tokens)), diags_(diags) {}

  SystemDecl parse_model() {
    SystemDecl decl;
    while (at(TokenKind::Define)) decl.constants.push_back(parse_define());
    while (at_keyword("server")) decl.server_types.push_back(parse_server_type());
    expect_keyword("servers");
    decl.server_instances = parse_decl_list_until(TokenKind::Semicolon);
    expect(TokenKind::Semicolon);
    expect_keyword("agents");
    decl.agent_instances = parse_decl_list_until(TokenKind::Semicolon);
    expect(TokenKind::Semicolon);
    parse_init_block(decl);
    if (!at(TokenKind::End))
      fail("expected end of input after the init block");
    return decl;
  }

 private:
  const Token& cur() const { return tokens_[pos_]; }
  bool at(TokenKind k) const { return cur().kind == k; }
  bool at_keyword(std::string_view kw) const {
    return cur().kind == TokenKind::Ident && cur().text == kw;
  }
  Token take() { return tokens_[pos_++]; }

  [[noreturn]] void fail(std::string message) {
    diags_.push_back({Severity::Error, std::move(message), cur().span});
    throw ParseAbort{};
  }

  [[noreturn]] void fail_expected(std::initializer_list<const char*> expected) {
    std::string msg = "expected ";
    bool first = true;
    for (const char* e : expected) {
      if (!first) msg += " or ";
      msg += e;
      first = false;
    }
    msg += ", found ";
    msg += cur().kind == TokenKind::Ident ? "'" + cur().text + "'"
                                          : token_kind_name(cur().kind);
    fail(std::move(msg));
  }

  Token expect(TokenKind k) {
    if (!at(k)) fail_expected({token_kind_name(k)});
    return take();
  }

  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) {
      std::string msg = "expected keyword '" + std::string(kw) + "', found ";
      msg += cur().kind == TokenKind::Ident ? "'" + cur().text + "'"
                                            : token_kind_name(cur().kind);
      fail(std::move(msg));
    }
    take();
  }

  Ident parse_name() {
    if (!at(TokenKind::Ident)) fail_expected({"identifier"});
    if (is_keyword(cur().text))
      fail("keyword '" + cur().text + "' cannot be used as a name");
    return take().text;
  }

  void skip_optional_comma() {
    if (at(TokenKind::Comma)) take();
  }

  ConstBinding parse_define() {
    SourceSpan span = cur().span;
    expect(TokenKind::Define);
    ConstBinding c;
    c.span = span;
    c.name = parse_name();
    Token v = expect(TokenKind::Int);
    c.value = v.int_value;
    return c;
  }

  Expr parse_expr() {
    Expr e;
    e.span = cur().span;
    int sign = 1;
    for (;;) {
      Expr::Term term;
      term.sign = sign;
      if (at(TokenKind::Int)) {
        term.value = take().int_value;
      } else if (at(TokenKind::Ident) && !is_keyword(cur().text)) {
        term.value = take().text;
      } else {
        fail_expected({"integer", "identifier"});
      }
      e.terms.push_back(std::move(term));
      if (at(TokenKind::Plus)) {
        take();
        sign = 1;
      } else if (at(TokenKind::Minus)) {
        take();
        sign = -1;
      } else {
        break;
      }
    }
    return e;
  }

  // IDENT ["[" expr "]"], a declaration with optional array size.
  Decl parse_decl() {
    Decl d;
    d.span = cur().span;
    d.name = parse_name();
    if (at(TokenKind::LBracket)) {
      take();
      d.size = parse_expr();
      expect(TokenKind::RBracket);
    }
    return d;
  }

  std::vector<Decl> parse_decl_list_until(TokenKind closer) {
    std::vector<Decl> decls;
    while (!at(closer)) {
      decls.push_back(parse_decl());
      if (at(TokenKind::Comma)) {
        take();
        continue;
      }
      break;
    }
    return decls;
  }

  // IDENT ["[" expr {"," expr} "]"], a reference; multiple indices are only
  // meaningful in actuals, so pattern positions reject them later.
  Ref parse_ref() {
    Ref r;
    r.span = cur().span;
    r.name = parse_name();
    if (at(TokenKind::LBracket)) {
      take();
      r.index = parse_expr();
      if (at(TokenKind::Comma))
        fail("an index list is only allowed in init actuals");
      expect(TokenKind::RBracket);
    }
    return r;
  }

  Replicator parse_replicator() {
    Replicator rep;
    rep.span = cur().span;
    expect(TokenKind::Less);
    rep.var = parse_name();
    expect(TokenKind::Equals);
    rep.lo = parse_expr();
    expect(TokenKind::DotDot);
    rep.hi = parse_expr();
    expect(TokenKind::Greater);
    return rep;
  }

  std::vector<Replicator> parse_replicators() {
    std::vector<Replicator> reps;
    while (at(TokenKind::Less)) reps.push_back(parse_replicator());
    return reps;
  }

  // A dotted chain of refs; message patterns have three parts, state patterns two.
  std::vector<Ref> parse_dotted_refs() {
    std::vector<Ref> parts;
    parts.push_back(parse_ref());
    while (at(TokenKind::Dot)) {
      take();
      parts.push_back(parse_ref());
    }
    return parts;
  }

  MessagePattern to_message(std::vector<Ref> parts, SourceSpan span) {
    if (parts.size() != 3)
      fail("a message is written agent.server.service");
    MessagePattern m;
    m.span = span;
    m.agent = std::move(parts[0]);
    m.server = std::move(parts[1]);
    m.service = std::move(parts[2]);
    return m;
  }

  StatePattern to_state(std::vector<Ref> parts, SourceSpan span) {
    if (parts.size() != 2)
      fail("a server state is written server.state");
    StatePattern p;
    p.span = span;
    p.server = std::move(parts[0]);
    p.state = std::move(parts[1]);
    return p;
  }

  ActionRule parse_rule() {
    ActionRule rule;
    rule.span = cur().span;
    rule.replicators = parse_replicators();
    expect(TokenKind::LBrace);
    {
      SourceSpan s = cur().span;
      rule.input_message = to_message(parse_dotted_refs(), s);
    }
    expect(TokenKind::Comma);
    {
      SourceSpan s = cur().span;
      rule.input_state = to_state(parse_dotted_refs(), s);
    }
    expect(TokenKind::RBrace);
    expect(TokenKind::Arrow);
    expect(TokenKind::LBrace);
    {
      SourceSpan s = cur().span;
      std::vector<Ref> first = parse_dotted_refs();
      if (at(TokenKind::Comma) && first.size() == 3) {
        rule.output_message = to_message(std::move(first), s);
        take();
        SourceSpan s2 = cur().span;
        rule.output_state = to_state(parse_dotted_refs(), s2);
      } else {
        rule.output_state = to_state(std::move(first), s);
      }
    }
    skip_optional_comma();
    expect(TokenKind::RBrace);
    return rule;
  }

  ServerType parse_server_type() {
    ServerType st;
    st.span = cur().span;
    expect_keyword("server");
    expect(TokenKind::Colon);
    st.name = parse_name();
    expect(TokenKind::LParen);
    expect_keyword("agents");
    st.formal_agents = parse_decl_list_until(TokenKind::Semicolon);
    expect(TokenKind::Semicolon);
    expect_keyword("servers");
    st.formal_servers = parse_decl_list_until(TokenKind::RParen);
    expect(TokenKind::RParen);
    skip_optional_comma();
    expect_keyword("services");
    expect(TokenKind::LBrace);
    st.services = parse_decl_list_until(TokenKind::RBrace);
    expect(TokenKind::RBrace);
    skip_optional_comma();
    expect_keyword("states");
    expect(TokenKind::LBrace);
    st.states = parse_decl_list_until(TokenKind::RBrace);
    expect(TokenKind::RBrace);
    skip_optional_comma();
    expect_keyword("actions");
    expect(TokenKind::LBrace);
    while (!at(TokenKind::RBrace)) {
      st.rules.push_back(parse_rule());
      if (at(TokenKind::Comma)) {
        take();
        continue;
      }
      break;
    }
    expect(TokenKind::RBrace);
    skip_optional_comma();
    return st;
  }

  Actual parse_actual() {
    Actual a;
    a.span = cur().span;
    a.name = parse_name();
    if (at(TokenKind::LBracket)) {
      take();
      for (;;) {
        Actual::IndexSpec spec;
        spec.lo = parse_expr();
        if (at(TokenKind::DotDot)) {
          take();
          spec.hi = parse_expr();
        }
        a.indices.push_back(std::move(spec));
        if (at(TokenKind::Comma)) {
          take();
          continue;
        }
        break;
      }
      expect(TokenKind::RBracket);
    }
    return a;
  }

  void parse_init_block(SystemDecl& decl) {
    expect_keyword("init");
    expect(TokenKind::Arrow);
    expect(TokenKind::LBrace);
    while (!at(TokenKind::RBrace)) {
      SourceSpan span = cur().span;
      std::vector<Replicator> reps = parse_replicators();
      Ref first = parse_ref();
      if (at(TokenKind::LParen)) {
        InitBinding b;
        b.span = span;
        b.replicators = std::move(reps);
        b.instance = std::move(first);
        take();
        while (!at(TokenKind::RParen)) {
          b.actuals.push_back(parse_actual());
          if (at(TokenKind::Comma)) {
            take();
            continue;
          }
          break;
        }
        expect(TokenKind::RParen);
        expect(TokenKind::Dot);
        b.state = parse_ref();
        decl.init_items.push_back(std::move(b));
      } else if (at(TokenKind::Dot)) {
        std::vector<Ref> parts;
        parts.push_back(std::move(first));
        while (at(TokenKind::Dot)) {
          take();
          parts.push_back(parse_ref());
        }
        InitMessage m;
        m.span = span;
        m.replicators = std::move(reps);
        m.message = to_message(std::move(parts), span);
        decl.init_items.push_back(std::move(m));
      } else {
        fail_expected({"'(' (instance binding)", "'.' (initial message)"});
      }
      if (at(TokenKind::Comma)) {
        take();
        continue;
      }
      break;
    }
    expect(TokenKind::RBrace);
    expect(TokenKind::Dot);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic>& diags_;
};

}  // namespace

ParseResult parse(std::string_view text) {
  ParseResult result;
  LexResult lexed = lex(text);
  if (has_errors(lexed.diagnostics)) {
    result.diagnostics = std::move(lexed.diagnostics);
    return result;
  }
  result.diagnostics = std::move(lexed.diagnostics);
  Parser parser(std::move(lexed.tokens), result.diagnostics);
  try {
    result.decl = parser.parse_model();
  } catch (const ParseAbort&) {
    result.decl.reset();
  }
  return result;
}

}  // namespace imds
