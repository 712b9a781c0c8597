#include <mnl/rank_breaking.hpp>

#include <stdexcept>

namespace mnl {

BrokenPairSet breakRankings(const std::vector<KWiseRanking>& rankings) {
  BrokenPairSet out;
  if (rankings.empty()) return out;
  out.k = static_cast<Index>(rankings.front().items.size());
  out.rankingCount = static_cast<Index>(rankings.size());
  out.pairs.reserve(rankings.size() * static_cast<std::size_t>(out.k * (out.k - 1) / 2));

  for (const auto& r : rankings) {
    if (static_cast<Index>(r.items.size()) != out.k) {
      throw std::invalid_argument("breakRankings: rankings must share one k");
    }
    // ranking lists positions best first, so every earlier position beats
    // every later one.
    for (std::size_t a = 0; a < r.ranking.size(); ++a) {
      for (std::size_t b = a + 1; b < r.ranking.size(); ++b) {
        out.pairs.push_back({r.user, r.items[r.ranking[a]], r.items[r.ranking[b]]});
      }
    }
  }
  return out;
}

}  // namespace mnl
