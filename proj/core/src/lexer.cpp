#include "imds/lexer.hpp"

#include <cctype>

namespace imds {

const char* token_kind_name(TokenKind k) {
  switch (k) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::Int: return "integer";
    case TokenKind::Define: return "#DEFINE";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::Less: return "'<'";
    case TokenKind::Greater: return "'>'";
    case TokenKind::Comma: return "','";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::Colon: return "':'";
    case TokenKind::Dot: return "'.'";
    case TokenKind::DotDot: return "'..'";
    case TokenKind::Arrow: return "'->'";
    case TokenKind::Equals: return "'='";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::End: return "end of input";
    case TokenKind::Invalid: return "invalid token";
  }
  return "?";
}

std::string format_diagnostic(const Diagnostic& d) {
  std::string out = d.severity == Severity::Error ? "error" : "warning";
  out += " at ";
  out += std::to_string(d.span.line);
  out += ":";
  out += std::to_string(d.span.column);
  out += ": ";
  out += d.message;
  return out;
}

namespace {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;
  int line = 1;
  int column = 1;

  bool done() const { return pos >= text.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos + ahead < text.size() ? text[pos + ahead] : '\0';
  }
  char take() {
    char c = text[pos++];
    if (c == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
    return c;
  }
  SourceSpan mark() const { return SourceSpan{pos, line, column, 0}; }
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

LexResult lex(std::string_view text) {
  LexResult result;
  Cursor cur{text};

  auto push = [&](TokenKind kind, SourceSpan start, std::string tok_text, long value = 0) {
    start.length = cur.pos - start.offset;
    result.tokens.push_back(Token{kind, std::move(tok_text), value, start});
  };

  while (!cur.done()) {
    char c = cur.peek();
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      cur.take();
      continue;
    }
    if (c == '/' && cur.peek(1) == '/') {
      while (!cur.done() && cur.peek() != '\n') cur.take();
      continue;
    }
    SourceSpan start = cur.mark();
    if (is_ident_start(c)) {
      std::string name;
      while (!cur.done() && is_ident_char(cur.peek())) name += cur.take();
      push(TokenKind::Ident, start, std::move(name));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (!cur.done() && std::isdigit(static_cast<unsigned char>(cur.peek())))
        digits += cur.take();
      long value = 0;
      bool overflow = false;
      for (char d : digits) {
        if (value > (1L << 40)) { overflow = true; break; }
        value = value * 10 + (d - '0');
      }
      if (overflow) {
        result.diagnostics.push_back(
            {Severity::Error, "integer literal out of range", start});
      }
      push(TokenKind::Int, start, std::move(digits), value);
      continue;
    }
    switch (c) {
      case '{': cur.take(); push(TokenKind::LBrace, start, "{"); continue;
      case '}': cur.take(); push(TokenKind::RBrace, start, "}"); continue;
      case '(': cur.take(); push(TokenKind::LParen, start, "("); continue;
      case ')': cur.take(); push(TokenKind::RParen, start, ")"); continue;
      case '[': cur.take(); push(TokenKind::LBracket, start, "["); continue;
      case ']': cur.take(); push(TokenKind::RBracket, start, "]"); continue;
      case '<': cur.take(); push(TokenKind::Less, start, "<"); continue;
      case '>': cur.take(); push(TokenKind::Greater, start, ">"); continue;
      case ',': cur.take(); push(TokenKind::Comma, start, ","); continue;
      case ';': cur.take(); push(TokenKind::Semicolon, start, ";"); continue;
      case ':': cur.take(); push(TokenKind::Colon, start, ":"); continue;
      case '=': cur.take(); push(TokenKind::Equals, start, "="); continue;
      case '+': cur.take(); push(TokenKind::Plus, start, "+"); continue;
      case '.':
        cur.take();
        if (cur.peek() == '.') {
          cur.take();
          push(TokenKind::DotDot, start, "..");
        } else {
          push(TokenKind::Dot, start, ".");
        }
        continue;
      case '-':
        cur.take();
        if (cur.peek() == '>') {
          cur.take();
          push(TokenKind::Arrow, start, "->");
        } else {
          push(TokenKind::Minus, start, "-");
        }
        continue;
      case '#': {
        cur.take();
        std::string word;
        while (!cur.done() && is_ident_char(cur.peek())) word += cur.take();
        if (word == "DEFINE") {
          push(TokenKind::Define, start, "#DEFINE");
        } else {
          result.diagnostics.push_back(
              {Severity::Error, "unknown directive '#" + word + "'", start});
          push(TokenKind::Invalid, start, "#" + word);
        }
        continue;
      }
      default: {
        cur.take();
        result.diagnostics.push_back(
            {Severity::Error,
             std::string("unexpected character '") + c + "'", start});
        push(TokenKind::Invalid, start, std::string(1, c));
        continue;
      }
    }
  }
  SourceSpan end = cur.mark();
  result.tokens.push_back(Token{TokenKind::End, "", 0, end});
  return result;
}

}  // namespace imds
