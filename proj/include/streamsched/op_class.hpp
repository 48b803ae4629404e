#pragma once

#include <string_view>

#include "streamsched/graph.hpp"

namespace streamsched {

struct Classification {
  OpClass op_class = OpClass::ComputeIntensive;
  bool known = false;  // false when the label fell through to the default
};

// Offline operator table. Matches the lowercased label, then its leading
// alphabetic token ("conv2d_3" -> "conv"). Unknown labels are compute-intensive.
Classification classify(std::string_view name);

}  // namespace streamsched
