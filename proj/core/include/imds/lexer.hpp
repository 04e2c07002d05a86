#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "imds/diagnostics.hpp"

namespace imds {

enum class TokenKind {
  Ident,
  Int,
  Define,     // "#DEFINE"
  LBrace,     // {
  RBrace,     // }
  LParen,     // (
  RParen,     // )
  LBracket,   // [
  RBracket,   // ]
  Less,       // <
  Greater,    // >
  Comma,      // ,
  Semicolon,  // ;
  Colon,      // :
  Dot,        // .
  DotDot,     // ..
  Arrow,      // ->
  Equals,     // =
  Plus,       // +
  Minus,      // -
  End,        // end of input
  Invalid,
};

struct Token {
  TokenKind kind = TokenKind::Invalid;
  std::string text;
  long int_value = 0;
  SourceSpan span;
};

const char* token_kind_name(TokenKind k);

struct LexResult {
  std::vector<Token> tokens;  // always ends with an End token
  std::vector<Diagnostic> diagnostics;
};

/// Tokenizes 8-bit text. `//` comments run to end of line. Never throws; a bad
/// byte yields an error diagnostic and an Invalid token.
LexResult lex(std::string_view text);

}  // namespace imds
