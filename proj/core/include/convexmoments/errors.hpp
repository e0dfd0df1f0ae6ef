#pragma once

#include <stdexcept>
#include <string>

namespace convexmoments {

/// An input falls outside the hypothesis of the statement being evaluated
/// (for example p >= r for a moment that diverges). The message names the
/// violated condition.
class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace convexmoments
