/// @file  graph.hpp
/// @brief Weighted item-sampling graphs: standard topologies, the graph
///        Laplacian, connected-component groups and the spectral gap.

#pragma once

#include <iosfwd>
#include <vector>

#include <mnl/types.hpp>

namespace mnl {

/// Connected components of the sampling graph as zero-one indicator vectors.
/// The indicators partition the items: they sum to the all-ones vector.
struct GroupStructure {
  std::vector<Vector> indicators;

  Index count() const { return static_cast<Index>(indicators.size()); }
  Index itemCount() const { return indicators.empty() ? 0 : indicators.front().size(); }

  /// Item indices belonging to group g, ascending.
  std::vector<Index> members(Index g) const;
};

/// Symmetric pair-sampling weights over d2 items. Entries are nonnegative,
/// the diagonal is zero, and the whole matrix sums to one, so P is a
/// categorical distribution over ordered item pairs.
class SamplingGraph {
 public:
  SamplingGraph(Index itemCount, Matrix weights);

  Index itemCount() const { return d2_; }
  const Matrix& weights() const { return p_; }

 private:
  Index d2_;
  Matrix p_;
};

/// Uniform weights over all ordered pairs: P = 1 / (d2 (d2 - 1)) off-diagonal.
SamplingGraph completeGraph(Index d2);

/// Item 0 is the hub; every other item is compared only against it.
SamplingGraph starGraph(Index d2);

/// Path 0 - 1 - ... - (d2 - 1).
SamplingGraph lineGraph(Index d2);

/// Two equal cliques joined by a single bridge edge. Requires d2 even, >= 4.
SamplingGraph barbellGraph(Index d2);

/// Graph Laplacian L = diag(P 1) - P. Symmetric PSD with zero row sums; the
/// null space is spanned by the group indicators.
Matrix laplacian(const SamplingGraph& g);

/// Connected components of the support of P, computed by union-find.
/// Groups are ordered by their smallest member index.
GroupStructure groups(const SamplingGraph& g);

/// Smallest Laplacian eigenvalue after discounting the groupCount zero ones,
/// i.e. the (groupCount + 1)-th smallest eigenvalue.
double spectralGap(const MatrixRef& laplacian, Index groupCount);

/// Edge-list text format: header line "d2 <n>", then one "j1 j2 weight" line
/// per unordered edge with 0-indexed items. Used by the CLI to accept custom
/// survey designs.
void writeEdgeList(std::ostream& out, const SamplingGraph& g);
SamplingGraph readEdgeList(std::istream& in);

}  // namespace mnl
