#include <mnl/observations.hpp>

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mnl {

namespace {

void checkIndex(Index value, Index bound, const char* what) {
  if (value < 0 || value >= bound) {
    throw std::out_of_range(std::string("ObservationSet: ") + what + " index out of range");
  }
}

std::vector<std::string> splitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) fields.push_back(cell);
  return fields;
}

Index toIndex(const std::string& s) { return static_cast<Index>(std::stoll(s)); }

[[noreturn]] void parseError(std::size_t lineNo, const std::string& message) {
  throw std::invalid_argument("readObservations: line " + std::to_string(lineNo) + ": " + message);
}

}  // namespace

ObservationSet ObservationSet::pairwise(Index d1, Index d2, std::vector<PairwiseComparison> v) {
  ObservationSet s{ObservationKind::Pairwise, d1, d2, std::move(v)};
  s.validate();
  return s;
}

ObservationSet ObservationSet::kwise(Index d1, Index d2, std::vector<KWiseRanking> v) {
  ObservationSet s{ObservationKind::Kwise, d1, d2, std::move(v)};
  s.validate();
  return s;
}

ObservationSet ObservationSet::choice(Index d1, Index d2, std::vector<ChoiceObservation> v) {
  ObservationSet s{ObservationKind::Choice, d1, d2, std::move(v)};
  s.validate();
  return s;
}

ObservationSet ObservationSet::bundled(Index d1, Index d2, std::vector<BundledChoice> v) {
  ObservationSet s{ObservationKind::Bundled, d1, d2, std::move(v)};
  s.validate();
  return s;
}

const std::vector<PairwiseComparison>& ObservationSet::pairwiseData() const {
  return std::get<std::vector<PairwiseComparison>>(data);
}
const std::vector<KWiseRanking>& ObservationSet::kwiseData() const {
  return std::get<std::vector<KWiseRanking>>(data);
}
const std::vector<ChoiceObservation>& ObservationSet::choiceData() const {
  return std::get<std::vector<ChoiceObservation>>(data);
}
const std::vector<BundledChoice>& ObservationSet::bundledData() const {
  return std::get<std::vector<BundledChoice>>(data);
}

std::size_t ObservationSet::size() const {
  return std::visit([](const auto& v) { return v.size(); }, data);
}

void ObservationSet::validate() const {
  switch (kind) {
    case ObservationKind::Pairwise:
      for (const auto& c : pairwiseData()) {
        checkIndex(c.user, d1, "user");
        checkIndex(c.itemA, d2, "item");
        checkIndex(c.itemB, d2, "item");
        if (c.itemA == c.itemB) {
          throw std::out_of_range("ObservationSet: comparison of an item with itself");
        }
      }
      break;
    case ObservationKind::Kwise:
      for (const auto& r : kwiseData()) {
        checkIndex(r.user, d1, "user");
        for (Index item : r.items) checkIndex(item, d2, "item");
        if (r.ranking.size() != r.items.size()) {
          throw std::out_of_range("ObservationSet: ranking length mismatch");
        }
        std::vector<bool> seen(r.ranking.size(), false);
        for (Index pos : r.ranking) {
          if (pos < 0 || pos >= static_cast<Index>(r.ranking.size()) || seen[pos]) {
            throw std::out_of_range("ObservationSet: ranking is not a permutation of positions");
          }
          seen[pos] = true;
        }
      }
      break;
    case ObservationKind::Choice:
      for (const auto& c : choiceData()) {
        checkIndex(c.user, d1, "user");
        for (Index item : c.offered) checkIndex(item, d2, "item");
        checkIndex(c.chosen, static_cast<Index>(c.offered.size()), "chosen position");
      }
      break;
    case ObservationKind::Bundled:
      for (const auto& b : bundledData()) {
        for (Index item : b.rows) checkIndex(item, d1, "row item");
        for (Index item : b.cols) checkIndex(item, d2, "column item");
        checkIndex(b.pickRow, static_cast<Index>(b.rows.size()), "pick row");
        checkIndex(b.pickCol, static_cast<Index>(b.cols.size()), "pick column");
      }
      break;
  }
}

void writeObservations(std::ostream& out, const ObservationSet& obs) {
  out << "D," << obs.d1 << "," << obs.d2 << "\n";
  switch (obs.kind) {
    case ObservationKind::Pairwise:
      for (const auto& c : obs.pairwiseData()) {
        out << "P," << c.user << "," << c.itemA << "," << c.itemB << "," << (c.aWins ? 1 : 0)
            << "\n";
      }
      break;
    case ObservationKind::Kwise:
      for (const auto& r : obs.kwiseData()) {
        out << "K," << r.user << "," << r.items.size();
        for (Index item : r.items) out << "," << item;
        for (Index pos : r.ranking) out << "," << pos;
        out << "\n";
      }
      break;
    case ObservationKind::Choice:
      for (const auto& c : obs.choiceData()) {
        out << "C," << c.user << "," << c.offered.size();
        for (Index item : c.offered) out << "," << item;
        out << "," << c.chosen << "\n";
      }
      break;
    case ObservationKind::Bundled:
      for (const auto& b : obs.bundledData()) {
        out << "B," << b.rows.size() << "," << b.cols.size();
        for (Index item : b.rows) out << "," << item;
        for (Index item : b.cols) out << "," << item;
        out << "," << b.pickRow << "," << b.pickCol << "\n";
      }
      break;
  }
}

ObservationSet readObservations(std::istream& in) {
  std::string line;
  std::size_t lineNo = 0;

  Index d1 = 0, d2 = 0;
  bool haveDims = false;
  bool haveKind = false;
  ObservationKind kind = ObservationKind::Pairwise;

  std::vector<PairwiseComparison> pw;
  std::vector<KWiseRanking> kw;
  std::vector<ChoiceObservation> ch;
  std::vector<BundledChoice> bu;

  auto setKind = [&](ObservationKind k, std::size_t no) {
    if (haveKind && kind != k) parseError(no, "mixed observation kinds in one file");
    kind = k;
    haveKind = true;
  };

  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    const std::vector<std::string> f = splitCsv(line);
    try {
      if (f[0] == "D") {
        if (f.size() != 3) parseError(lineNo, "dimension record needs 'D,d1,d2'");
        d1 = toIndex(f[1]);
        d2 = toIndex(f[2]);
        haveDims = true;
      } else if (f[0] == "P") {
        if (f.size() != 5) parseError(lineNo, "pairwise record needs 'P,u,a,b,y'");
        setKind(ObservationKind::Pairwise, lineNo);
        pw.push_back({toIndex(f[1]), toIndex(f[2]), toIndex(f[3]), toIndex(f[4]) != 0});
      } else if (f[0] == "K") {
        setKind(ObservationKind::Kwise, lineNo);
        if (f.size() < 3) parseError(lineNo, "short k-wise record");
        const Index k = toIndex(f[2]);
        if (static_cast<Index>(f.size()) != 3 + 2 * k) {
          parseError(lineNo, "k-wise record needs k items and k ranking positions");
        }
        KWiseRanking r;
        r.user = toIndex(f[1]);
        for (Index j = 0; j < k; ++j) r.items.push_back(toIndex(f[3 + j]));
        for (Index j = 0; j < k; ++j) r.ranking.push_back(toIndex(f[3 + k + j]));
        kw.push_back(std::move(r));
      } else if (f[0] == "C") {
        setKind(ObservationKind::Choice, lineNo);
        if (f.size() < 3) parseError(lineNo, "short choice record");
        const Index k = toIndex(f[2]);
        if (static_cast<Index>(f.size()) != 4 + k) {
          parseError(lineNo, "choice record needs k offered items and a chosen position");
        }
        ChoiceObservation c;
        c.user = toIndex(f[1]);
        for (Index j = 0; j < k; ++j) c.offered.push_back(toIndex(f[3 + j]));
        c.chosen = toIndex(f[3 + k]);
        ch.push_back(std::move(c));
      } else if (f[0] == "B") {
        setKind(ObservationKind::Bundled, lineNo);
        if (f.size() < 3) parseError(lineNo, "short bundled record");
        const Index k1 = toIndex(f[1]);
        const Index k2 = toIndex(f[2]);
        if (static_cast<Index>(f.size()) != 5 + k1 + k2) {
          parseError(lineNo, "bundled record needs k1 + k2 items and a pick");
        }
        BundledChoice b;
        for (Index j = 0; j < k1; ++j) b.rows.push_back(toIndex(f[3 + j]));
        for (Index j = 0; j < k2; ++j) b.cols.push_back(toIndex(f[3 + k1 + j]));
        b.pickRow = toIndex(f[3 + k1 + k2]);
        b.pickCol = toIndex(f[4 + k1 + k2]);
        bu.push_back(std::move(b));
      } else {
        parseError(lineNo, "unknown record tag '" + f[0] + "'");
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      parseError(lineNo, e.what());
    }
  }

  if (!haveDims) throw std::invalid_argument("readObservations: missing 'D,d1,d2' record");
  if (!haveKind) throw std::invalid_argument("readObservations: no observation records");

  switch (kind) {
    case ObservationKind::Pairwise: return ObservationSet::pairwise(d1, d2, std::move(pw));
    case ObservationKind::Kwise: return ObservationSet::kwise(d1, d2, std::move(kw));
    case ObservationKind::Choice: return ObservationSet::choice(d1, d2, std::move(ch));
    case ObservationKind::Bundled: return ObservationSet::bundled(d1, d2, std::move(bu));
  }
  throw std::invalid_argument("readObservations: unreachable");
}

}  // namespace mnl
