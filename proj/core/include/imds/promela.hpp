#pragma once

#include <string>

#include "imds/elaborate.hpp"

namespace imds {

/// A Spin-ready rendering of the system plus the name mapping used to produce
/// it. One buffered channel per server instance (capacity = agent count), one
/// process per server looping over its ground actions as guarded atomic
/// alternatives. Healthy termination lets every process exit; a deadlock
/// leaves blocked processes behind, which Spin reports as an invalid end
/// state.
struct PromelaModel {
  std::string text;
  std::string manifest_json;  // entity -> generated identifier map
};

PromelaModel export_promela(const ElaboratedSystem& sys);

}  // namespace imds
