#pragma once

#include <string>
#include <vector>

namespace imds {

/// Half-open byte range in a source text, with 1-based line/column of its start.
struct SourceSpan {
  std::size_t offset = 0;
  int line = 1;
  int column = 1;
  std::size_t length = 0;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;
};

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags)
    if (d.severity == Severity::Error) return true;
  return false;
}

std::string format_diagnostic(const Diagnostic& d);

}  // namespace imds
