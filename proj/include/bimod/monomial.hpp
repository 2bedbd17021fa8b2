#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

namespace bimod {

// One basis monomial: a polynomial part (exponent vector over the even
// generators x_i) and a wedge part (strictly increasing odd-generator list).
struct Monomial {
  std::vector<int> evens;  // size = ambient dimension d
  std::vector<int> odds;   // strictly increasing, entries in [0, d)

  int poly_degree() const { return std::accumulate(evens.begin(), evens.end(), 0); }
  int odd_count() const { return static_cast<int>(odds.size()); }

  bool operator==(const Monomial& o) const = default;

  // Graded-lex on the even exponents, then the odd list: the serialization
  // order and the map key order coincide.
  bool operator<(const Monomial& o) const {
    int da = poly_degree(), db = o.poly_degree();
    if (da != db) return da < db;
    if (evens != o.evens) return evens < o.evens;
    if (odds.size() != o.odds.size()) return odds.size() < o.odds.size();
    return odds < o.odds;
  }
};

// Merges two strictly increasing odd lists.  Returns the merged list and the
// parity of the shuffle (each transposition of two odd generators is a sign
// flip); nullopt when an index repeats.
inline std::optional<std::pair<std::vector<int>, int>> merge_odds(
    const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  long swaps = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return std::nullopt;
    if (a[i] < b[j]) {
      out.push_back(a[i++]);
    } else {
      swaps += static_cast<long>(a.size() - i);
      out.push_back(b[j++]);
    }
  }
  for (; i < a.size(); ++i) out.push_back(a[i]);
  for (; j < b.size(); ++j) out.push_back(b[j]);
  return std::make_pair(std::move(out), swaps % 2 == 0 ? +1 : -1);
}

// Sorts an arbitrary odd-index list into canonical order.  Returns the sign
// of the sorting permutation; nullopt when an index repeats.
inline std::optional<std::pair<std::vector<int>, int>> normalize_odds(std::vector<int> odds) {
  long swaps = 0;
  for (std::size_t i = 1; i < odds.size(); ++i) {
    int v = odds[i];
    std::size_t j = i;
    while (j > 0 && odds[j - 1] > v) {
      odds[j] = odds[j - 1];
      --j;
      ++swaps;
    }
    odds[j] = v;
  }
  for (std::size_t i = 1; i < odds.size(); ++i)
    if (odds[i] == odds[i - 1]) return std::nullopt;
  return std::make_pair(std::move(odds), swaps % 2 == 0 ? +1 : -1);
}

}  // namespace bimod
