/// @file  jester.hpp
/// @brief Jester joke-rating ingestion, the biased top-k ordinal generation,
///        and the convex-relaxation versus Borda-count comparison.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <mnl/experiments.hpp>
#include <mnl/types.hpp>

namespace mnl {

/// Continuous joke ratings on [-10, 10]; completeRaters lists the users who
/// rated every joke (the only ones the experiment uses).
struct JesterTable {
  Matrix ratings;  ///< users x jokes
  std::vector<Index> completeRaters;
};

/// CSV rows: column 1 the count of rated jokes, columns 2..(jokes+1) the
/// ratings with 99 meaning unrated. Parse failures report line numbers;
/// ratings outside [-10, 10] are rejected.
JesterTable loadJester(std::istream& in, Index jokeCount = 100);
JesterTable loadJesterFile(const std::string& path, Index jokeCount = 100);

/// Synthetic stand-in with two opposed user clusters, so a population-level
/// aggregator is structurally wrong for half the users while a per-user
/// low-rank fit is not. Used when the real dataset is not on disk.
JesterTable syntheticJesterTable(Index users, Index jokes, std::uint64_t seed);

struct JesterSpec {
  std::vector<Index> kGrid = {20, 40, 60};
  Index maxUsers = 2000;
  double lambdaScale = 1.0;
  std::uint64_t seed = 1;
  Index maxIters = 5000;
  double tol = 1e-8;

  std::string canonical() const;
};

/// For each k: select k jokes per user with popularity-proportional bias,
/// rank them by the user's scores, fit the k-wise convex relaxation and the
/// Borda baseline, and report both held-out pairwise prediction errors over
/// the unselected jokes.
ResultTable runJesterExperiment(const JesterTable& table, const JesterSpec& spec);

}  // namespace mnl
