#include <mnl/graph.hpp>

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include <mnl/linalg.hpp>

namespace mnl {

namespace {

/// Uniform unordered-pair probability over a fixed edge set, i.e. each ordered
/// entry gets 1 / (2 m) so that the matrix sums to one.
Matrix uniformOverEdges(Index d2, const std::vector<std::pair<Index, Index>>& edges) {
  Matrix p = Matrix::Zero(d2, d2);
  const double w = 1.0 / (2.0 * static_cast<double>(edges.size()));
  for (const auto& [a, b] : edges) {
    p(a, b) += w;
    p(b, a) += w;
  }
  return p;
}

struct UnionFind {
  explicit UnionFind(Index n) : parent(n) { std::iota(parent.begin(), parent.end(), Index{0}); }

  Index find(Index i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }

  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }

  std::vector<Index> parent;
};

}  // namespace

std::vector<Index> GroupStructure::members(Index g) const {
  std::vector<Index> out;
  const Vector& ind = indicators.at(static_cast<std::size_t>(g));
  for (Index j = 0; j < ind.size(); ++j) {
    if (ind(j) > 0.5) out.push_back(j);
  }
  return out;
}

SamplingGraph::SamplingGraph(Index itemCount, Matrix weights) : d2_(itemCount), p_(std::move(weights)) {
  if (d2_ < 2) {
    throw std::invalid_argument("SamplingGraph: need at least two items");
  }
  if (p_.rows() != d2_ || p_.cols() != d2_) {
    throw std::invalid_argument("SamplingGraph: weight matrix has wrong shape");
  }
  if (!p_.allFinite() || p_.minCoeff() < 0.0) {
    throw std::invalid_argument("SamplingGraph: weights must be finite and nonnegative");
  }
  if (p_.diagonal().cwiseAbs().maxCoeff() > 0.0) {
    throw std::invalid_argument("SamplingGraph: diagonal must be zero");
  }
  if ((p_ - p_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("SamplingGraph: weights must be symmetric");
  }
  if (std::abs(p_.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("SamplingGraph: weights must sum to one");
  }
}

SamplingGraph completeGraph(Index d2) {
  if (d2 < 2) throw std::invalid_argument("completeGraph: d2 must be >= 2");
  const double w = 1.0 / (static_cast<double>(d2) * static_cast<double>(d2 - 1));
  Matrix p = Matrix::Constant(d2, d2, w);
  p.diagonal().setZero();
  return SamplingGraph(d2, std::move(p));
}

SamplingGraph starGraph(Index d2) {
  if (d2 < 2) throw std::invalid_argument("starGraph: d2 must be >= 2");
  std::vector<std::pair<Index, Index>> edges;
  for (Index j = 1; j < d2; ++j) edges.emplace_back(0, j);
  return SamplingGraph(d2, uniformOverEdges(d2, edges));
}

SamplingGraph lineGraph(Index d2) {
  if (d2 < 2) throw std::invalid_argument("lineGraph: d2 must be >= 2");
  std::vector<std::pair<Index, Index>> edges;
  for (Index j = 0; j + 1 < d2; ++j) edges.emplace_back(j, j + 1);
  return SamplingGraph(d2, uniformOverEdges(d2, edges));
}

SamplingGraph barbellGraph(Index d2) {
  if (d2 < 4 || d2 % 2 != 0) {
    throw std::invalid_argument("barbellGraph: d2 must be even and >= 4");
  }
  const Index half = d2 / 2;
  std::vector<std::pair<Index, Index>> edges;
  for (Index a = 0; a < half; ++a)
    for (Index b = a + 1; b < half; ++b) edges.emplace_back(a, b);
  for (Index a = half; a < d2; ++a)
    for (Index b = a + 1; b < d2; ++b) edges.emplace_back(a, b);
  edges.emplace_back(half - 1, half);  // the bridge
  return SamplingGraph(d2, uniformOverEdges(d2, edges));
}

Matrix laplacian(const SamplingGraph& g) {
  const Matrix& p = g.weights();
  Matrix l = -p;
  l.diagonal() += p.rowwise().sum();
  return l;
}

GroupStructure groups(const SamplingGraph& g) {
  const Matrix& p = g.weights();
  const Index d2 = g.itemCount();
  UnionFind uf(d2);
  for (Index a = 0; a < d2; ++a)
    for (Index b = a + 1; b < d2; ++b)
      if (p(a, b) > 0.0) uf.unite(a, b);

  // Roots appear in ascending order of their smallest member.
  std::vector<Index> rootOf(d2);
  std::vector<Index> roots;
  for (Index j = 0; j < d2; ++j) {
    rootOf[j] = uf.find(j);
    if (rootOf[j] == j) roots.push_back(j);
  }
  GroupStructure out;
  out.indicators.reserve(roots.size());
  for (Index root : roots) {
    Vector ind = Vector::Zero(d2);
    for (Index j = 0; j < d2; ++j)
      if (rootOf[j] == root) ind(j) = 1.0;
    out.indicators.push_back(std::move(ind));
  }
  return out;
}

double spectralGap(const MatrixRef& laplacian, Index groupCount) {
  if (laplacian.rows() != laplacian.cols()) {
    throw std::invalid_argument("spectralGap: matrix must be square");
  }
  if (groupCount < 1 || groupCount >= laplacian.rows()) {
    throw std::invalid_argument("spectralGap: group count out of range");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(laplacian, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("spectralGap: eigendecomposition failed");
  }
  return eig.eigenvalues()(groupCount);
}

void writeEdgeList(std::ostream& out, const SamplingGraph& g) {
  out << "d2 " << g.itemCount() << "\n";
  const Matrix& p = g.weights();
  out.precision(17);
  for (Index a = 0; a < g.itemCount(); ++a)
    for (Index b = a + 1; b < g.itemCount(); ++b)
      if (p(a, b) > 0.0) out << a << " " << b << " " << p(a, b) << "\n";
}

SamplingGraph readEdgeList(std::istream& in) {
  std::string tag;
  Index d2 = 0;
  if (!(in >> tag >> d2) || tag != "d2") {
    throw std::invalid_argument("readEdgeList: expected header 'd2 <n>'");
  }
  if (d2 < 2) throw std::invalid_argument("readEdgeList: d2 must be >= 2");
  Matrix p = Matrix::Zero(d2, d2);
  Index a, b;
  double w;
  while (in >> a >> b >> w) {
    if (a < 0 || b < 0 || a >= d2 || b >= d2 || a == b) {
      throw std::invalid_argument("readEdgeList: edge endpoints out of range");
    }
    p(a, b) += w;
    p(b, a) += w;
  }
  if (!in.eof()) {
    throw std::invalid_argument("readEdgeList: malformed edge line");
  }
  return SamplingGraph(d2, std::move(p));
}

}  // namespace mnl
