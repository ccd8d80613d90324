#pragma once

#include <stdexcept>
#include <string>

namespace polarkey {

// Malformed call: wrong lengths, out-of-range indices, bad argument ranges.
struct StructuralError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Input that parses but is inconsistent (pmf not normalized, edge list not a
// tree, labeling constraint violated, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Request exceeds an enumeration or memory budget; the caller should switch
// to the Monte-Carlo / plug-in path.
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The chaining sets required by a model do not exist at this N/delta
// (e.g. |V \ H| < |H \ V| for the two-party chained schemes).
struct InfeasibleConfiguration : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace polarkey
