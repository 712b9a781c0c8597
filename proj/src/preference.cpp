#include <mnl/preference.hpp>

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <mnl/random.hpp>

namespace mnl {

namespace {

/// Center, then rescale so max |entry| = alpha. Both steps are linear, so the
/// centering is preserved by the rescale.
PreferenceMatrix finalize(Matrix raw, double alpha, Centering centering,
                          const GroupStructure* groups) {
  Matrix theta = centered(raw, centering, groups);
  const double peak = theta.cwiseAbs().maxCoeff();
  if (peak > 0.0) theta *= alpha / peak;
  return PreferenceMatrix{std::move(theta), alpha, centering};
}

void checkShape(Index d1, Index d2, Index r, double alpha) {
  if (d1 < 1 || d2 < 1) throw std::invalid_argument("preference generator: dimensions must be >= 1");
  if (r < 1 || r > std::min(d1, d2)) {
    throw std::invalid_argument("preference generator: rank out of range");
  }
  if (!(alpha > 0.0)) throw std::invalid_argument("preference generator: alpha must be positive");
}

}  // namespace

std::string toString(Centering c) {
  switch (c) {
    case Centering::PerGroup: return "per-group";
    case Centering::PerRow: return "per-row";
    case Centering::Global: return "global";
    case Centering::None: return "none";
  }
  return "none";
}

Centering centeringFromString(const std::string& s) {
  if (s == "per-group") return Centering::PerGroup;
  if (s == "per-row") return Centering::PerRow;
  if (s == "global") return Centering::Global;
  if (s == "none") return Centering::None;
  throw std::invalid_argument("unknown centering mode: " + s);
}

Matrix centered(const MatrixRef& theta, Centering mode, const GroupStructure* groups) {
  switch (mode) {
    case Centering::None:
      return theta;
    case Centering::PerRow: {
      Matrix out = theta;
      out.colwise() -= out.rowwise().mean();
      return out;
    }
    case Centering::Global: {
      return theta.array() - theta.mean();
    }
    case Centering::PerGroup: {
      if (groups == nullptr || groups->count() == 0) {
        throw std::invalid_argument("centered: per-group mode requires groups");
      }
      if (groups->itemCount() != theta.cols()) {
        throw std::invalid_argument("centered: group indicators do not match column count");
      }
      Matrix out = theta;
      for (const Vector& g : groups->indicators) {
        const double size = g.sum();
        Vector rowMeans = (out * g) / size;
        out.noalias() -= rowMeans * g.transpose();
      }
      return out;
    }
  }
  throw std::invalid_argument("centered: unknown mode");
}

Matrix lowRankBase(Index d1, Index d2, Index r, std::uint64_t seed) {
  RandomStream rng(seed);
  Matrix u(d1, r), v(d2, r);
  for (Index i = 0; i < d1; ++i)
    for (Index j = 0; j < r; ++j) u(i, j) = rng.uniform();
  for (Index i = 0; i < d2; ++i)
    for (Index j = 0; j < r; ++j) v(i, j) = rng.uniform();
  return u * v.transpose();
}

Vector barbellColumnOffsets(Index d2, double shift) {
  Vector offsets(d2);
  const Index half = d2 / 2;
  for (Index j = 0; j < d2; ++j) offsets(j) = (j < half) ? -shift / 2.0 : shift / 2.0;
  return offsets;
}

Vector lineColumnOffsets(Index d2, double span) {
  Vector offsets(d2);
  if (d2 == 1) {
    offsets(0) = 0.0;
    return offsets;
  }
  for (Index j = 0; j < d2; ++j) {
    offsets(j) = span * (static_cast<double>(j) / static_cast<double>(d2 - 1) - 0.5);
  }
  return offsets;
}

Matrix barbellBiasedRaw(Index d1, Index d2, Index r, double shift, std::uint64_t seed) {
  Matrix raw = lowRankBase(d1, d2, r, seed);
  raw.rowwise() += barbellColumnOffsets(d2, shift).transpose();
  return raw;
}

Matrix lineBiasedRaw(Index d1, Index d2, Index r, double alpha, std::uint64_t seed) {
  Matrix raw = lowRankBase(d1, d2, r, seed);
  const Vector colMeans = raw.colwise().mean();
  raw.rowwise() -= colMeans.transpose();
  raw.rowwise() +=
      (lineColumnOffsets(d2, alpha / 2.0).array() + colMeans.mean()).matrix().transpose();
  return raw;
}

PreferenceMatrix randomLowRank(Index d1, Index d2, Index r, double alpha, Centering centering,
                               std::uint64_t seed, const GroupStructure* groups) {
  checkShape(d1, d2, r, alpha);
  return finalize(lowRankBase(d1, d2, r, seed), alpha, centering, groups);
}

PreferenceMatrix barbellBiased(Index d1, Index d2, Index r, double alpha, double shift,
                               std::uint64_t seed, Centering centering,
                               const GroupStructure* groups) {
  checkShape(d1, d2, r, alpha);
  if (d2 % 2 != 0) throw std::invalid_argument("barbellBiased: d2 must be even");
  return finalize(barbellBiasedRaw(d1, d2, r, shift, seed), alpha, centering, groups);
}

PreferenceMatrix lineBiased(Index d1, Index d2, Index r, double alpha, std::uint64_t seed,
                            Centering centering, const GroupStructure* groups) {
  checkShape(d1, d2, r, alpha);
  return finalize(lineBiasedRaw(d1, d2, r, alpha, seed), alpha, centering, groups);
}

void writePreferenceCsv(std::ostream& out, const PreferenceMatrix& p) {
  out.precision(17);
  out << p.theta.rows() << " " << p.theta.cols() << " " << p.alpha << " "
      << toString(p.centering) << "\n";
  for (Index i = 0; i < p.theta.rows(); ++i) {
    for (Index j = 0; j < p.theta.cols(); ++j) {
      if (j > 0) out << ",";
      out << p.theta(i, j);
    }
    out << "\n";
  }
}

PreferenceMatrix readPreferenceCsv(std::istream& in) {
  Index d1 = 0, d2 = 0;
  double alpha = 0.0;
  std::string centering;
  std::string header;
  if (!std::getline(in, header)) {
    throw std::invalid_argument("readPreferenceCsv: missing header");
  }
  {
    std::istringstream hs(header);
    if (!(hs >> d1 >> d2 >> alpha >> centering)) {
      throw std::invalid_argument("readPreferenceCsv: bad header, expected 'd1 d2 alpha centering'");
    }
  }
  if (d1 < 1 || d2 < 1) throw std::invalid_argument("readPreferenceCsv: bad dimensions");
  PreferenceMatrix p;
  p.alpha = alpha;
  p.centering = centeringFromString(centering);
  p.theta.resize(d1, d2);
  std::string line;
  for (Index i = 0; i < d1; ++i) {
    if (!std::getline(in, line)) {
      throw std::invalid_argument("readPreferenceCsv: truncated at row " + std::to_string(i));
    }
    std::istringstream ls(line);
    std::string cell;
    for (Index j = 0; j < d2; ++j) {
      if (!std::getline(ls, cell, ',')) {
        throw std::invalid_argument("readPreferenceCsv: short row " + std::to_string(i));
      }
      p.theta(i, j) = std::stod(cell);
    }
  }
  return p;
}

}  // namespace mnl
