#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace bimod {

// The four orthogonal blocks of the ambient space cut out by a pair of
// subspaces (U, V).  Coordinate indices are laid out block-contiguously:
//   [0, d_uv)                           both
//   [d_uv, d_uv+d_uvperp)               u_only
//   [d_uv+d_uvperp, d_uv+d_uvperp+d_upv) v_only
//   [..., d)                            neither
enum class Block { Both = 0, UOnly = 1, VOnly = 2, Neither = 3 };

enum class Ambient { A, B, K, Tpoly };

struct Splitting {
  int d_uv = 0;
  int d_uvperp = 0;
  int d_upv = 0;
  int d_perp = 0;

  int total() const { return d_uv + d_uvperp + d_upv + d_perp; }

  Block block_of(int i) const {
    if (i < 0 || i >= total()) throw std::out_of_range("coordinate index");
    if (i < d_uv) return Block::Both;
    if (i < d_uv + d_uvperp) return Block::UOnly;
    if (i < d_uv + d_uvperp + d_upv) return Block::VOnly;
    return Block::Neither;
  }

  std::vector<int> block_indices(Block b) const {
    std::array<int, 4> lo{0, d_uv, d_uv + d_uvperp, d_uv + d_uvperp + d_upv};
    std::array<int, 4> hi{d_uv, d_uv + d_uvperp, d_uv + d_uvperp + d_upv, total()};
    std::vector<int> out;
    for (int i = lo[static_cast<int>(b)]; i < hi[static_cast<int>(b)]; ++i) out.push_back(i);
    return out;
  }

  // Generator content of the three brane algebras inside polyvectors:
  // even generators are coordinates along the brane, odd generators are the
  // normal directions (realized as constant vector fields).
  bool even_allowed(Ambient a, int i) const {
    Block b = block_of(i);
    switch (a) {
      case Ambient::A: return b == Block::Both || b == Block::UOnly;
      case Ambient::B: return b == Block::Both || b == Block::VOnly;
      case Ambient::K: return b == Block::Both;
      case Ambient::Tpoly: return true;
    }
    return false;
  }

  bool odd_allowed(Ambient a, int i) const {
    Block b = block_of(i);
    switch (a) {
      case Ambient::A: return b == Block::VOnly || b == Block::Neither;
      case Ambient::B: return b == Block::UOnly || b == Block::Neither;
      case Ambient::K: return b == Block::Neither;
      case Ambient::Tpoly: return true;
    }
    return false;
  }

  bool operator==(const Splitting& o) const = default;

  std::string str() const {
    return std::to_string(d_uv) + "," + std::to_string(d_uvperp) + "," +
           std::to_string(d_upv) + "," + std::to_string(d_perp);
  }
};

inline const char* ambient_name(Ambient a) {
  switch (a) {
    case Ambient::A: return "A";
    case Ambient::B: return "B";
    case Ambient::K: return "K";
    case Ambient::Tpoly: return "T";
  }
  return "?";
}

}  // namespace bimod
