/// @file  rank_breaking.hpp
/// @brief Conversion of k-wise rankings into the full set of k-choose-2
///        pairwise outcomes.

#pragma once

#include <vector>

#include <mnl/observations.hpp>
#include <mnl/types.hpp>

namespace mnl {

/// One broken pair: the winner item preceded the loser item in the source
/// ranking. Duplicate offers can produce winner == loser.
struct BrokenPair {
  Index user = 0;
  Index winner = 0;
  Index loser = 0;
};

/// All position pairs of a ranking set, k-choose-2 per ranking.
struct BrokenPairSet {
  std::vector<BrokenPair> pairs;
  Index k = 0;              ///< length of the source rankings
  Index rankingCount = 0;   ///< number of source rankings
};

/// For every ranking and every unordered position pair, emit the pair with
/// the higher-ranked item as winner. Deterministic and lossless: the pair
/// multiset reconstructs each ranking's induced tournament exactly.
BrokenPairSet breakRankings(const std::vector<KWiseRanking>& rankings);

}  // namespace mnl
