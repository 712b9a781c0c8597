/// @file  preference.hpp
/// @brief Ground-truth preference matrices: random low-rank generators with
///        topology-aligned bias patterns, and the centering projections that
///        pick a representative of each identifiability class.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <mnl/graph.hpp>
#include <mnl/types.hpp>

namespace mnl {

/// Identifiability convention a preference matrix is centered under.
/// PerGroup zeroes theta * g_i for every group, PerRow zeroes row sums,
/// Global zeroes the grand sum.
enum class Centering { PerGroup, PerRow, Global, None };

std::string toString(Centering c);
Centering centeringFromString(const std::string& s);

/// A d1 x d2 preference matrix together with its dynamic-range bound alpha
/// (max |entry|) and the centering convention it satisfies.
struct PreferenceMatrix {
  Matrix theta;
  double alpha = 0.0;
  Centering centering = Centering::None;
};

/// Exact affine projection onto the given centering convention. Idempotent;
/// PerGroup requires a GroupStructure.
Matrix centered(const MatrixRef& theta, Centering mode, const GroupStructure* groups = nullptr);

/// Rank-r product U V^T with factor entries i.i.d. uniform on [0,1].
/// Exposed for the biased generators and their distribution tests.
Matrix lowRankBase(Index d1, Index d2, Index r, std::uint64_t seed);

/// Column offsets of the barbell bias: -shift/2 on the left half of the
/// columns, +shift/2 on the right half.
Vector barbellColumnOffsets(Index d2, double shift);

/// Column offsets of the line bias: an arithmetic progression across columns
/// with total span `span`, centered at zero.
Vector lineColumnOffsets(Index d2, double span);

/// Pre-centering construction of the biased matrices, exposed so the bias
/// pattern can be checked directly. Barbell adds the block offsets to the
/// base; line replaces the base's column means with the arithmetic
/// progression (span alpha / 2), leaving the within-column spread intact.
Matrix barbellBiasedRaw(Index d1, Index d2, Index r, double shift, std::uint64_t seed);
Matrix lineBiasedRaw(Index d1, Index d2, Index r, double alpha, std::uint64_t seed);

/// Low-rank matrix, centered, then rescaled so max |entry| equals alpha.
/// Rescaling rather than clipping keeps the rank unchanged.
PreferenceMatrix randomLowRank(Index d1, Index d2, Index r, double alpha, Centering centering,
                               std::uint64_t seed, const GroupStructure* groups = nullptr);

/// Low-rank matrix whose two column blocks have means shift apart before
/// centering; the bias adds at most one to the rank. With shift = 0 this is
/// exactly randomLowRank on the same seed.
PreferenceMatrix barbellBiased(Index d1, Index d2, Index r, double alpha, double shift,
                               std::uint64_t seed, Centering centering = Centering::PerRow,
                               const GroupStructure* groups = nullptr);

/// Low-rank matrix whose column means follow an arithmetic progression before
/// centering. The progression spans alpha / 2 end to end.
PreferenceMatrix lineBiased(Index d1, Index d2, Index r, double alpha, std::uint64_t seed,
                            Centering centering = Centering::PerRow,
                            const GroupStructure* groups = nullptr);

/// CSV with the one-line header "d1 d2 alpha centering" followed by one
/// comma-separated row of entries per matrix row.
void writePreferenceCsv(std::ostream& out, const PreferenceMatrix& p);
PreferenceMatrix readPreferenceCsv(std::istream& in);

}  // namespace mnl
