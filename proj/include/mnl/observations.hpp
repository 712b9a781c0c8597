/// @file  observations.hpp
/// @brief Ordinal observation records for the four data types, and their
///        line-per-record CSV serialization.

#pragma once

#include <iosfwd>
#include <variant>
#include <vector>

#include <mnl/types.hpp>

namespace mnl {

/// A single comparison: user saw items (itemA, itemB) and aWins records
/// whether itemA was preferred.
struct PairwiseComparison {
  Index user = 0;
  Index itemA = 0;
  Index itemB = 0;
  bool aWins = false;
};

/// A total order over a k-item multiset. items holds the drawn items in draw
/// order (duplicates allowed); ranking is a permutation of positions
/// 0..k-1, best first. Duplicated items are treated as distinct positions
/// with identical weights.
struct KWiseRanking {
  Index user = 0;
  std::vector<Index> items;
  std::vector<Index> ranking;
};

/// A single pick out of an offered multiset; chosen indexes into offered.
struct ChoiceObservation {
  Index user = 0;
  std::vector<Index> offered;
  Index chosen = 0;
};

/// A bundled pick of one (row item, column item) pair from the offered
/// rows x cols grid; pickRow/pickCol index into rows/cols.
struct BundledChoice {
  std::vector<Index> rows;
  std::vector<Index> cols;
  Index pickRow = 0;
  Index pickCol = 0;
};

enum class ObservationKind { Pairwise, Kwise, Choice, Bundled };

/// Tagged union of the four observation lists together with the parameter
/// matrix dimensions they index into.
struct ObservationSet {
  ObservationKind kind = ObservationKind::Pairwise;
  Index d1 = 0;
  Index d2 = 0;
  std::variant<std::vector<PairwiseComparison>, std::vector<KWiseRanking>,
               std::vector<ChoiceObservation>, std::vector<BundledChoice>>
      data;

  static ObservationSet pairwise(Index d1, Index d2, std::vector<PairwiseComparison> v);
  static ObservationSet kwise(Index d1, Index d2, std::vector<KWiseRanking> v);
  static ObservationSet choice(Index d1, Index d2, std::vector<ChoiceObservation> v);
  static ObservationSet bundled(Index d1, Index d2, std::vector<BundledChoice> v);

  const std::vector<PairwiseComparison>& pairwiseData() const;
  const std::vector<KWiseRanking>& kwiseData() const;
  const std::vector<ChoiceObservation>& choiceData() const;
  const std::vector<BundledChoice>& bundledData() const;

  std::size_t size() const;

  /// Throws std::out_of_range if any index exceeds (d1, d2) or a ranking is
  /// not a permutation of its positions.
  void validate() const;
};

/// One record per line, comma-separated, first field a type tag:
///   D,d1,d2                                (dimension record, first line)
///   P,u,a,b,y
///   K,u,k,items...,ranking...
///   C,u,k,offered...,chosen
///   B,k1,k2,rows...,cols...,pickRow,pickCol
void writeObservations(std::ostream& out, const ObservationSet& obs);
ObservationSet readObservations(std::istream& in);

}  // namespace mnl
