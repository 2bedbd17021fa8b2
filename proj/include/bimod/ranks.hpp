#pragma once

#include "bimod/rational.hpp"

#include <map>
#include <utility>
#include <vector>

namespace bimod {

// Sparse matrix over the rationals; rank via exact Gaussian elimination.
struct SparseRatMatrix {
  int rows = 0;
  int cols = 0;
  std::map<std::pair<int, int>, Rat> entries;

  void set(int r, int c, const Rat& v) {
    if (r >= rows) rows = r + 1;
    if (c >= cols) cols = c + 1;
    if (v == 0)
      entries.erase({r, c});
    else
      entries[{r, c}] = v;
  }

  void add(int r, int c, const Rat& v) {
    auto it = entries.find({r, c});
    Rat nv = (it == entries.end() ? Rat(0) : it->second) + v;
    set(r, c, nv);
  }

  long rank() const {
    std::vector<std::map<int, Rat>> rowdata(static_cast<std::size_t>(rows));
    for (const auto& [rc, v] : entries) rowdata[static_cast<std::size_t>(rc.first)][rc.second] = v;
    long rk = 0;
    std::vector<bool> used(static_cast<std::size_t>(rows), false);
    for (int c = 0; c < cols; ++c) {
      int pivot = -1;
      for (int r = 0; r < rows; ++r) {
        if (used[static_cast<std::size_t>(r)]) continue;
        auto it = rowdata[static_cast<std::size_t>(r)].find(c);
        if (it != rowdata[static_cast<std::size_t>(r)].end() && it->second != 0) {
          pivot = r;
          break;
        }
      }
      if (pivot < 0) continue;
      used[static_cast<std::size_t>(pivot)] = true;
      ++rk;
      Rat pv = rowdata[static_cast<std::size_t>(pivot)][c];
      for (int r = 0; r < rows; ++r) {
        if (r == pivot || used[static_cast<std::size_t>(r)]) continue;
        auto it = rowdata[static_cast<std::size_t>(r)].find(c);
        if (it == rowdata[static_cast<std::size_t>(r)].end() || it->second == 0) continue;
        Rat f = it->second / pv;
        for (const auto& [cc, vv] : rowdata[static_cast<std::size_t>(pivot)]) {
          auto jt = rowdata[static_cast<std::size_t>(r)].find(cc);
          Rat nv = (jt == rowdata[static_cast<std::size_t>(r)].end() ? Rat(0) : jt->second) - f * vv;
          if (nv == 0)
            rowdata[static_cast<std::size_t>(r)].erase(cc);
          else
            rowdata[static_cast<std::size_t>(r)][cc] = nv;
        }
      }
    }
    return rk;
  }
};

// One graded piece of a truncated complex: its dimension, the matrix of the
// differential into the next degree, and whether that map leaks outside the
// truncation.
struct ComplexBlock {
  long dim = 0;
  SparseRatMatrix d_out;
  bool out_truncated = false;
};

struct RankEntry {
  int degree = 0;
  int internal = 0;
  long dim = 0;
  long rank_in = 0;
  long rank_out = 0;
  long betti = 0;
  bool reliable = true;
};

// Betti numbers per (degree, internal degree).  A degree is reliable when the
// differentials in and out of it stay inside the truncated basis.
inline std::vector<RankEntry> cohomology_ranks(
    const std::map<std::pair<int, int>, ComplexBlock>& blocks, int deg_lo, int deg_hi) {
  std::vector<RankEntry> out;
  for (const auto& [key, blk] : blocks) {
    auto [deg, internal] = key;
    if (deg < deg_lo || deg > deg_hi) continue;
    RankEntry e;
    e.degree = deg;
    e.internal = internal;
    e.dim = blk.dim;
    e.rank_out = blk.d_out.rank();
    auto prev = blocks.find({deg - 1, internal});
    bool prev_truncated = false;
    if (prev != blocks.end()) {
      e.rank_in = prev->second.d_out.rank();
      prev_truncated = prev->second.out_truncated;
    }
    e.betti = e.dim - e.rank_out - e.rank_in;
    e.reliable = !blk.out_truncated && !prev_truncated;
    out.push_back(e);
  }
  return out;
}

}  // namespace bimod
