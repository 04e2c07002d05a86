#pragma once

#include <optional>
#include <string_view>

#include "imds/ast.hpp"
#include "imds/diagnostics.hpp"

namespace imds {

struct ParseResult {
  std::optional<SystemDecl> decl;  // set on success
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return decl.has_value(); }
};

/// Parses model text. Total: any byte sequence yields either a SystemDecl or
/// an error diagnostic with a span inside the input. The first error aborts.
ParseResult parse(std::string_view text);

}  // namespace imds
