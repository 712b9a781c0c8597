/// @file  sampler.hpp
/// @brief Synthetic observation samplers for the four data types, plus the
///        Gumbel random-utility sampler used to cross-check the sequential
///        one distributionally.

#pragma once

#include <cstdint>
#include <vector>

#include <mnl/graph.hpp>
#include <mnl/observations.hpp>
#include <mnl/types.hpp>

namespace mnl {

/// n i.i.d. comparisons: user uniform over rows, ordered pair drawn from the
/// graph's weight matrix, winner drawn from the two-item softmax of the
/// user's row.
std::vector<PairwiseComparison> samplePairwise(const MatrixRef& theta, const SamplingGraph& g,
                                               std::size_t n, std::uint64_t seed);

/// One ranking per user per round: k items drawn uniformly with replacement,
/// then a best-first sequential softmax over the remaining positions.
/// Duplicate items are distinct positions with equal weights.
std::vector<KWiseRanking> sampleKwiseSequential(const MatrixRef& theta, Index k,
                                                std::uint64_t seed, Index rounds = 1);

/// Same contract as sampleKwiseSequential, but the ranking is obtained by
/// sorting position utilities theta(user, item) + Gumbel noise, descending.
/// Ties (probability zero) break by position index.
std::vector<KWiseRanking> sampleKwiseGumbel(const MatrixRef& theta, Index k, std::uint64_t seed,
                                            Index rounds = 1);

/// n single choices: user uniform, k offered items uniform with replacement,
/// chosen position from the softmax of the user's row over the offer.
std::vector<ChoiceObservation> sampleChoices(const MatrixRef& theta, Index k, std::size_t n,
                                             std::uint64_t seed);

/// n bundled choices: k1 row items and k2 column items drawn uniformly with
/// replacement, the picked cell from the softmax over the offered grid.
std::vector<BundledChoice> sampleBundled(const MatrixRef& theta, Index k1, Index k2,
                                         std::size_t n, std::uint64_t seed);

}  // namespace mnl
