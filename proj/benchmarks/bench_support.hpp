#pragma once

#include <string>
#include <vector>

#include "nids/preprocess.hpp"
#include "nids/random.hpp"

namespace bench {

struct Problem {
  nids::FeatureMatrix x;
  nids::LabelVector y;
};

// Dense random features with a noisy linear label.
inline Problem make_problem(std::size_t rows, std::size_t cols, std::uint64_t seed = 1) {
  nids::SplitMix64 rng(seed);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < cols; ++j) names.push_back("f" + std::to_string(j));
  nids::FeatureMatrix x(rows, names);
  std::vector<std::uint8_t> y(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double z = 0;
    for (std::size_t j = 0; j < cols; ++j) {
      x(r, j) = rng.uniform() * 2 - 1;
      if (j < 3) z += x(r, j);
    }
    y[r] = z + 0.5 * (rng.uniform() - 0.5) > 0 ? 1 : 0;
  }
  return {std::move(x), nids::LabelVector(std::move(y))};
}

}  // namespace bench
