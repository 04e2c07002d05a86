#pragma once

#include <string>

#include "imds/ast.hpp"

namespace imds {

/// Deterministic canonical rendering of a model. Output reparses to a
/// declaration whose elaboration is isomorphic to the input's; printing the
/// reparse reproduces the same bytes.
std::string pretty_print(const SystemDecl& decl);

std::string print_expr(const Expr& e);
std::string print_ref(const Ref& r);

}  // namespace imds
