#pragma once

#include <algorithm>
#include <span>

#include "dmrl/rng.hpp"

namespace dmrl {

// Linear decay per agent action step: eps(n) = max(minimum, initial - decay*n).
struct EpsilonSchedule {
  double initial = 0.9;
  double minimum = 0.01;
  double decay = 0.001;

  double at(long step) const {
    return std::max(minimum, initial - decay * static_cast<double>(step));
  }
};

// Index of the largest value; ties go to the lowest index.
template <typename Range>
int argmax(const Range& values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace dmrl
