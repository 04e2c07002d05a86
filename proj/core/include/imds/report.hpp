#pragma once

#include <string>
#include <vector>

#include "imds/deadlock.hpp"
#include "imds/state_space.hpp"
#include "imds/views.hpp"

namespace imds {

/// Everything the verify pipeline produces for one model. When the
/// exploration hit a limit, `analyzed` is false and only the stats are
/// meaningful.
struct VerifyRun {
  Lts lts;
  bool analyzed = false;
  std::vector<DeadlockReport> deadlocks;
  std::vector<int> termination;
};

VerifyRun run_verify(const ElaboratedSystem& sys, const ExplorationLimits& limits, int jobs);

/// Machine-readable report document (stable, versioned schema). Both views of
/// every deadlock are embedded: the server view as DOT, the agent view as a
/// line-oriented sequence diagram.
std::string report_to_json(const VerifyRun& run, const ElaboratedSystem& sys);

std::string report_to_text(const VerifyRun& run, const ElaboratedSystem& sys);

/// Debugging dump of the raw transition system.
std::string lts_to_json(const Lts& lts, const ElaboratedSystem& sys);

}  // namespace imds
