#include "imds/elaborate.hpp"

namespace imds {

// Validation runs the strict elaboration pipeline and reports what it finds;
// the two must agree on every invariant, so there is one implementation.
std::vector<Diagnostic> validate(const SystemDecl& decl) {
  ElaborationResult result = elaborate(decl, ElaborationOptions{});
  return std::move(result.diagnostics);
}

}  // namespace imds
