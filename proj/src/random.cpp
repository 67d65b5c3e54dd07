#include "grail/random.hpp"

namespace grail {

int argmax_random_tie(std::span<const double> values, Rng& rng) {
  double best = values[0];
  int count = 0;
  int chosen = 0;
  // Reservoir sampling over the tied maxima.
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > best) {
      best = values[i];
      count = 1;
      chosen = static_cast<int>(i);
    } else if (values[i] == best) {
      ++count;
      if (count == 1 || uniform_index(rng, count) == 0) {
        chosen = static_cast<int>(i);
      }
    }
  }
  return chosen;
}

int epsilon_greedy(std::span<const double> values, double epsilon, Rng& rng) {
  if (epsilon > 0.0 && uniform01(rng) < epsilon) {
    return uniform_index(rng, static_cast<int>(values.size()));
  }
  return argmax_random_tie(values, rng);
}

}  // namespace grail
