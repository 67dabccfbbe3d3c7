#pragma once

#include <cstddef>
#include <vector>

#include "sketchkit/model.hpp"

namespace testsupport {

struct TierRow {
  std::size_t files;
  std::size_t lines;
  sketchkit::DifficultyTier tier;
};

// File and line counts of the nineteen reference repositories of the
// benchmark, with their published tiers.
inline const std::vector<TierRow>& benchmark_tier_rows() {
  using sketchkit::DifficultyTier;
  static const std::vector<TierRow> rows = {
      {1, 319, DifficultyTier::Easy},     {3, 164, DifficultyTier::Easy},     {2, 315, DifficultyTier::Easy},
      {1, 277, DifficultyTier::Easy},     {1, 237, DifficultyTier::Easy},     {6, 873, DifficultyTier::Medium},
      {10, 274, DifficultyTier::Medium},  {7, 958, DifficultyTier::Medium},   {5, 1497, DifficultyTier::Medium},
      {8, 367, DifficultyTier::Medium},   {10, 1945, DifficultyTier::Medium}, {9, 570, DifficultyTier::Medium},
      {4, 1030, DifficultyTier::Medium},  {13, 1564, DifficultyTier::Hard},   {19, 2106, DifficultyTier::Hard},
      {43, 3639, DifficultyTier::Hard},   {12, 3882, DifficultyTier::Hard},   {22, 12220, DifficultyTier::Hard},
      {18, 4870, DifficultyTier::Hard},
  };
  return rows;
}

}  // namespace testsupport
