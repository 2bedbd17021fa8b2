#pragma once

// Admissible graphs and their compilation into multidifferential operators.
// Vertices are globally indexed: first the n labeled upper half-plane
// vertices, then the m ordered axis vertices.  An axis vertex may be marked
// as special; edges are directed, and a loop is stored as (v, v).  Each
// non-loop edge acts as a contraction at its source tensor factor and a
// derivative at its target factor, summed over the index classes admitted by
// the edge's propagator colors; loops act by a divergence.  The integral
// weight of a graph is handled elsewhere and never enters compilation.

#include "bimod/element.hpp"
#include "bimod/geometry.hpp"
#include "bimod/operator.hpp"
#include "bimod/splitting.hpp"
#include "bimod/tensorword.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bimod {

struct AdmissibleGraph {
  int n = 0;        // upper half-plane vertices, labels 0..n-1
  int m = 0;        // axis vertices, labels n..n+m-1
  int special = -1; // global index of the marked axis vertex, or -1
  std::vector<std::pair<int, int>> edges;  // directed; (v,v) is a loop

  int vertex_count() const { return n + m; }
  bool is_axis(int v) const { return v >= n && v < n + m; }

  bool valid_vertex(int v) const { return v >= 0 && v < n + m; }
};

enum class GraphTarget { A, B, K };

inline const char* target_name(GraphTarget t) {
  switch (t) {
    case GraphTarget::A: return "A";
    case GraphTarget::B: return "B";
    case GraphTarget::K: return "K";
  }
  return "?";
}

inline GraphTarget target_from_name(std::string_view s) {
  if (s == "A" || s == "a") return GraphTarget::A;
  if (s == "B" || s == "b") return GraphTarget::B;
  if (s == "K" || s == "k") return GraphTarget::K;
  throw std::domain_error("unknown target: " + std::string(s));
}

// ---------------------------------------------------------------------------
// Canonical encoding

namespace detail {

inline std::string encode_with_order(const AdmissibleGraph& g,
                                     const std::vector<int>& relabel) {
  std::vector<std::pair<int, int>> plain;
  std::vector<int> loops;
  for (auto [a, b] : g.edges) {
    int u = (a < g.n) ? relabel[static_cast<std::size_t>(a)] : a;
    int v = (b < g.n) ? relabel[static_cast<std::size_t>(b)] : b;
    if (a == b)
      loops.push_back(u);
    else
      plain.emplace_back(u, v);
  }
  std::sort(plain.begin(), plain.end());
  std::sort(loops.begin(), loops.end());
  std::ostringstream os;
  os << g.n << ' ' << g.m << ' ';
  if (g.special >= 0)
    os << g.special;
  else
    os << '-';
  os << " |";
  for (auto [u, v] : plain) os << ' ' << u << '>' << v;
  os << " | loops:";
  for (int v : loops) os << ' ' << v;
  return os.str();
}

}  // namespace detail

// Isomorphism-invariant key: lexicographic minimum over relabelings of the
// half-plane vertices; axis vertices keep their order.
inline std::string canonical_encode(const AdmissibleGraph& g) {
  std::vector<int> perm(static_cast<std::size_t>(g.n));
  std::iota(perm.begin(), perm.end(), 0);
  std::string best = detail::encode_with_order(g, perm);
  while (std::next_permutation(perm.begin(), perm.end())) {
    std::string cand = detail::encode_with_order(g, perm);
    if (cand < best) best = cand;
  }
  return best;
}

inline AdmissibleGraph parse_graph(const std::string& enc) {
  std::istringstream is(enc);
  AdmissibleGraph g;
  std::string special, bar, tok;
  if (!(is >> g.n >> g.m >> special >> bar) || bar != "|")
    throw std::invalid_argument("malformed graph encoding");
  g.special = (special == "-") ? -1 : std::stoi(special);
  while (is >> tok && tok != "|") {
    auto gt = tok.find('>');
    if (gt == std::string::npos) throw std::invalid_argument("malformed edge: " + tok);
    g.edges.emplace_back(std::stoi(tok.substr(0, gt)), std::stoi(tok.substr(gt + 1)));
  }
  if (tok != "|" || !(is >> tok) || tok != "loops:")
    throw std::invalid_argument("malformed graph encoding");
  while (is >> tok) {
    int v = std::stoi(tok);
    g.edges.emplace_back(v, v);
  }
  std::sort(g.edges.begin(), g.edges.end());
  for (auto [a, b] : g.edges)
    if (!g.valid_vertex(a) || !g.valid_vertex(b))
      throw std::invalid_argument("edge endpoint out of range");
  if (g.special >= 0 && !g.is_axis(g.special))
    throw std::invalid_argument("special vertex is not an axis vertex");
  return g;
}

inline bool graphs_equal(const AdmissibleGraph& a, const AdmissibleGraph& b) {
  return canonical_encode(a) == canonical_encode(b);
}

// ---------------------------------------------------------------------------
// Pruning

// Number of index classes a kind of edge can distribute over; with a
// splitting in hand the empty classes drop out and the bound tightens.
namespace detail {

inline std::vector<Block> edge_classes(GraphTarget t) {
  switch (t) {
    case GraphTarget::A:
    case GraphTarget::B:
    case GraphTarget::K:
      return {Block::Both, Block::UOnly, Block::VOnly, Block::Neither};
  }
  return {};
}

inline int class_dim(const Splitting& s, Block b) {
  return static_cast<int>(s.block_indices(b).size());
}

}  // namespace detail

// Applies the vanishing rules; nullopt means keep.
inline std::optional<std::string> prune(const AdmissibleGraph& g, GraphTarget target,
                                        const Splitting* split = nullptr) {
  const bool bimodule_type = (g.n == 0 && g.special >= 0);

  std::vector<int> loop_count(static_cast<std::size_t>(g.vertex_count()), 0);
  for (auto [a, b] : g.edges)
    if (a == b) {
      if (++loop_count[static_cast<std::size_t>(a)] > 1) return "square of rho";
      if (g.is_axis(a)) return "loop at an axis vertex";
    }

  if (bimodule_type) {
    for (auto [a, b] : g.edges) {
      if (a == b) continue;
      bool crosses = (a < g.special && b > g.special) || (a > g.special && b < g.special);
      if (!crosses) return "edge does not cross the special vertex";
    }
    std::vector<std::pair<int, int>> pairs;
    for (auto [a, b] : g.edges) pairs.emplace_back(std::min(a, b), std::max(a, b));
    std::sort(pairs.begin(), pairs.end());
    if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end())
      return "square of 1-form";
    return std::nullopt;
  }

  // formality-type: axis vertices emit edges only across the special vertex,
  // and only for the K target
  const bool axis_pairs_ok = (target == GraphTarget::K && g.special >= 0);
  std::vector<std::pair<int, int>> apairs;
  for (auto [a, b] : g.edges) {
    if (a == b || !g.is_axis(a)) continue;
    if (!axis_pairs_ok || !g.is_axis(b)) return "edge out of an axis vertex";
    bool crosses = (a < g.special && b > g.special) || (a > g.special && b < g.special);
    if (!crosses) return "edge does not cross the special vertex";
    apairs.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(apairs.begin(), apairs.end());
  if (std::adjacent_find(apairs.begin(), apairs.end()) != apairs.end())
    return "square of 1-form";

  // multiplicity bound per ordered pair of distinct vertices
  std::vector<std::pair<int, int>> plain;
  for (auto [a, b] : g.edges)
    if (a != b) plain.emplace_back(a, b);
  std::sort(plain.begin(), plain.end());
  int bound = 4;
  if (split) {
    bound = 0;
    for (Block b : detail::edge_classes(target))
      if (detail::class_dim(*split, b) > 0) ++bound;
  }
  for (std::size_t i = 0; i < plain.size();) {
    std::size_t j = i;
    while (j < plain.size() && plain[j] == plain[i]) ++j;
    int mult = static_cast<int>(j - i);
    if (mult > 4) return "multiplicity > 4";
    if (mult > bound) return "multiplicity exceeds nonzero index classes";
    i = j;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Enumeration

// Graphs on m axis vertices around a special one at position m_left, every
// edge crossing it in either direction, m_left + n_right - 1 edges, no two
// edges on the same unordered pair.
inline std::vector<AdmissibleGraph> enumerate_bimodule_graphs(int m, int n) {
  if (m < 0 || n < 0 || m + n < 1) {
    if (m == 0 && n == 0) return {};
    throw std::invalid_argument("negative slot counts");
  }
  const int edges_needed = m + n - 1;
  std::vector<AdmissibleGraph> out;
  if (edges_needed < 0) return out;

  // unordered crossing pairs (left index, right index), each orientable
  std::vector<std::pair<int, int>> pairs;
  for (int l = 0; l < m; ++l)
    for (int r = m + 1; r < m + 1 + n; ++r) pairs.emplace_back(l, r);
  const int p = static_cast<int>(pairs.size());
  if (edges_needed > p) return out;

  std::vector<int> choose(static_cast<std::size_t>(edges_needed));
  std::iota(choose.begin(), choose.end(), 0);
  auto emit = [&]() {
    for (int mask = 0; mask < (1 << edges_needed); ++mask) {
      AdmissibleGraph g;
      g.n = 0;
      g.m = m + 1 + n;
      g.special = m;
      for (int e = 0; e < edges_needed; ++e) {
        auto [l, r] = pairs[static_cast<std::size_t>(choose[static_cast<std::size_t>(e)])];
        if (mask & (1 << e))
          g.edges.emplace_back(r, l);
        else
          g.edges.emplace_back(l, r);
      }
      std::sort(g.edges.begin(), g.edges.end());
      out.push_back(std::move(g));
    }
  };
  if (edges_needed == 0) {
    emit();
    return out;
  }
  // iterate over edge subsets of the crossing pairs
  while (true) {
    emit();
    int i = edges_needed - 1;
    while (i >= 0 && choose[static_cast<std::size_t>(i)] == p - edges_needed + i) --i;
    if (i < 0) break;
    ++choose[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < edges_needed; ++j)
      choose[static_cast<std::size_t>(j)] = choose[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

// Graphs with n half-plane vertices each sending at most two non-loop edges
// (plus, for the K target, at most one loop), 2n+m-2 edges in total.  Axis
// vertices emit no edges except, for the K target, edges crossing the special
// vertex, at most one per unordered pair.  When n >= 1 every axis vertex must
// meet an edge.  Returned up to half-plane relabeling.
inline std::vector<AdmissibleGraph> enumerate_formality_graphs(int n, int m,
                                                               GraphTarget target,
                                                               int special = -1) {
  if (2 * n + m - 2 < 0) throw std::invalid_argument("dimension is negative");
  const int edges_needed = 2 * n + m - 2;
  const bool loops_ok = target == GraphTarget::K;

  AdmissibleGraph base;
  base.n = n;
  base.m = m;
  if (target == GraphTarget::K)
    base.special = n + ((special >= 0) ? special : (m - 1) / 2);

  std::vector<AdmissibleGraph> out;
  std::vector<std::string> seen;

  // per half-plane vertex: a multiset of up to two non-loop targets plus an
  // optional loop; recursion assigns vertices in order
  std::vector<std::pair<int, int>> acc;
  auto push_result = [&]() {
    AdmissibleGraph g = base;
    g.edges = acc;
    std::sort(g.edges.begin(), g.edges.end());
    if (static_cast<int>(g.edges.size()) != edges_needed) return;
    if (n >= 1 && m > 0) {
      std::vector<bool> hit(static_cast<std::size_t>(g.vertex_count()), false);
      for (auto [a, b] : g.edges) {
        hit[static_cast<std::size_t>(a)] = true;
        hit[static_cast<std::size_t>(b)] = true;
      }
      for (int v = n; v < n + m; ++v)
        if (!hit[static_cast<std::size_t>(v)]) return;  // 0-valent axis vertex
    }
    if (prune(g, target)) return;
    std::string enc = canonical_encode(g);
    if (std::find(seen.begin(), seen.end(), enc) != seen.end()) return;
    seen.push_back(enc);
    out.push_back(std::move(g));
  };

  // crossing axis pairs open to the K target
  std::vector<std::pair<int, int>> cross;
  if (target == GraphTarget::K) {
    for (int l = n; l < base.special; ++l)
      for (int r = base.special + 1; r < n + m; ++r) cross.emplace_back(l, r);
  }
  const int cross_cap = static_cast<int>(cross.size());

  // after the half-plane vertices, spend the remaining edge budget on
  // crossing pairs, each in either orientation
  auto finish = [&](int left) {
    if (left == 0) {
      push_result();
      return;
    }
    if (left > cross_cap) return;
    std::vector<int> pick;
    auto sel = [&](auto&& self, int from) -> void {
      if (static_cast<int>(pick.size()) == left) {
        for (int mask = 0; mask < (1 << left); ++mask) {
          std::size_t mark = acc.size();
          for (int e = 0; e < left; ++e) {
            auto [l, r] = cross[static_cast<std::size_t>(pick[static_cast<std::size_t>(e)])];
            if (mask & (1 << e))
              acc.emplace_back(r, l);
            else
              acc.emplace_back(l, r);
          }
          push_result();
          acc.resize(mark);
        }
        return;
      }
      for (int i = from; i < cross_cap; ++i) {
        pick.push_back(i);
        self(self, i + 1);
        pick.pop_back();
      }
    };
    sel(sel, 0);
  };

  auto rec = [&](auto&& self, int v, int left) -> void {
    if (v == n) {
      finish(left);
      return;
    }
    int others = n - v - 1;
    // non-loop out-degree 0..2 plus optional loop
    for (int deg = 0; deg <= 2; ++deg) {
      for (int loop = 0; loop <= (loops_ok ? 1 : 0); ++loop) {
        int used = deg + loop;
        if (used > left) continue;
        if (left - used > 3 * others + cross_cap) continue;
        // choose an ordered multiset of `deg` targets among all vertices != v
        std::vector<int> targets;
        auto pick = [&](auto&& pickself, int t0, int count) -> void {
          if (count == 0) {
            std::size_t mark = acc.size();
            for (int t : targets) acc.emplace_back(v, t);
            if (loop) acc.emplace_back(v, v);
            self(self, v + 1, left - used);
            acc.resize(mark);
            return;
          }
          for (int t = t0; t < n + m; ++t) {
            if (t == v) continue;
            targets.push_back(t);
            pickself(pickself, t, count - 1);
            targets.pop_back();
          }
        };
        pick(pick, 0, deg);
      }
    }
  };

  if (n == 0) {
    finish(edges_needed);
    return out;
  }
  rec(rec, 0, edges_needed);
  return out;
}

// ---------------------------------------------------------------------------
// Compilation

struct EdgeAssignment {
  std::pair<int, int> edge;
  std::vector<std::pair<Block, PropagatorKind>> colors;  // summed-over classes
};

struct CompiledOperator {
  MultilinearOperator op;
  std::vector<EdgeAssignment> assignments;
  Rat prefactor = Rat(1);
};

namespace detail {

// Divergence over an index class at one tensor factor: contraction followed
// by the matching derivative, odd of total degree -1.
inline TensorSum apply_loop(const TensorSum& in, const std::vector<int>& index_class,
                            int slot) {
  TensorSum out;
  for (const auto& term : in) {
    int crossing = 0;
    for (int l = 0; l < slot; ++l)
      crossing += term.slots[static_cast<std::size_t>(l)].wedge_degree();
    int sgn = parity_sign(crossing);
    for (int k : index_class) {
      auto g = term.slots[static_cast<std::size_t>(slot)].contract(k).derivative(k);
      if (g.is_zero()) continue;
      TensorTerm t;
      t.coeff = term.coeff * sgn;
      t.slots = term.slots;
      t.slots[static_cast<std::size_t>(slot)] = std::move(g);
      out.push_back(std::move(t));
    }
  }
  return out;
}

inline std::vector<std::pair<Block, PropagatorKind>> colors_for(
    const AdmissibleGraph& g, GraphTarget target, std::pair<int, int> e) {
  if (e.first == e.second)  // loop: divergence over the diagonal classes
    return {{Block::Both, PropagatorKind::Rho}, {Block::Neither, PropagatorKind::Rho}};
  switch (target) {
    case GraphTarget::A:
      return {{Block::Both, PropagatorKind::OmegaPlus},
              {Block::UOnly, PropagatorKind::OmegaPlus},
              {Block::VOnly, PropagatorKind::OmegaMinus},
              {Block::Neither, PropagatorKind::OmegaMinus}};
    case GraphTarget::B:
      return {{Block::Both, PropagatorKind::OmegaPlus},
              {Block::VOnly, PropagatorKind::OmegaPlus},
              {Block::UOnly, PropagatorKind::OmegaMinus},
              {Block::Neither, PropagatorKind::OmegaMinus}};
    case GraphTarget::K:
      // the special vertex is differentiated only along indices common to
      // both subspaces and contracted only along indices missing from both
      if (e.second == g.special) return {{Block::Both, PropagatorKind::OmegaPP}};
      if (e.first == g.special) return {{Block::Neither, PropagatorKind::OmegaMM}};
      if (g.is_axis(e.first)) {
        // crossing edge: one color per side, matching the boundary form
        if (e.first < g.special) return {{Block::VOnly, PropagatorKind::OmegaMP}};
        return {{Block::UOnly, PropagatorKind::OmegaPM}};
      }
      return {{Block::Both, PropagatorKind::OmegaPP},
              {Block::UOnly, PropagatorKind::OmegaPM},
              {Block::VOnly, PropagatorKind::OmegaMP},
              {Block::Neither, PropagatorKind::OmegaMM}};
  }
  return {};
}

inline int orbit_size(const AdmissibleGraph& g) {
  if (g.n <= 1) return 1;
  std::vector<int> perm(static_cast<std::size_t>(g.n));
  std::iota(perm.begin(), perm.end(), 0);
  const std::string id = encode_with_order(g, perm);
  int stab = 0;
  do {
    if (encode_with_order(g, perm) == id) ++stab;
  } while (std::next_permutation(perm.begin(), perm.end()));
  int fact = 1;
  for (int i = 2; i <= g.n; ++i) fact *= i;
  return fact / stab;
}

}  // namespace detail

// Slot layout of the compiled operator: half-plane vertices become
// polyvector slots in label order, axis vertices the following argument
// slots.  For the K target the axis row is read left args | K | right args.
inline Shape graph_shape(const AdmissibleGraph& g, GraphTarget target) {
  Shape sh;
  sh.out = (target == GraphTarget::A) ? Ambient::A
           : (target == GraphTarget::B) ? Ambient::B
                                        : Ambient::K;
  for (int v = 0; v < g.n; ++v) sh.slots.push_back(Ambient::Tpoly);
  for (int v = g.n; v < g.n + g.m; ++v) {
    if (target == GraphTarget::K) {
      if (g.special < 0) throw std::domain_error("K target needs a special vertex");
      if (v < g.special)
        sh.slots.push_back(Ambient::A);
      else if (v == g.special)
        sh.slots.push_back(Ambient::K);
      else
        sh.slots.push_back(Ambient::B);
    } else {
      sh.slots.push_back(sh.out);
    }
  }
  return sh;
}

inline CompiledOperator compile(const AdmissibleGraph& g, const Splitting& split,
                                GraphTarget target) {
  if (auto reason = prune(g, target, &split))
    throw std::domain_error("graph does not survive pruning: " + *reason);
  for (auto [a, b] : g.edges)
    if (!g.valid_vertex(a) || !g.valid_vertex(b))
      throw std::domain_error("edge endpoint out of range");

  CompiledOperator c;
  c.op.split = split;
  c.op.shape = graph_shape(g, target);
  c.op.degree = -static_cast<int>(g.edges.size());

  struct Step {
    std::vector<int> index_class;
    int src, tgt;
    bool loop;
  };
  std::vector<Step> steps;
  for (auto e : g.edges) {
    EdgeAssignment asg;
    asg.edge = e;
    asg.colors = detail::colors_for(g, target, e);
    std::vector<int> cls;
    for (auto [b, k] : asg.colors)
      for (int i : split.block_indices(b)) cls.push_back(i);
    std::sort(cls.begin(), cls.end());
    steps.push_back({std::move(cls), e.first, e.second, e.first == e.second});
    c.assignments.push_back(std::move(asg));
  }

  Rat fact = Rat(1);
  {
    // 1/k! per repeated ordered edge
    auto sorted = g.edges;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      for (std::size_t k = 2; k <= j - i; ++k) fact /= Rat(static_cast<long>(k));
      i = j;
    }
    // orbit size over n! for the labeled half-plane sum
    int orb = detail::orbit_size(g);
    int nf = 1;
    for (int i = 2; i <= g.n; ++i) nf *= i;
    fact *= Rat(orb) / Rat(nf);
  }
  c.prefactor = fact;

  Ambient out = c.op.shape.out;
  Splitting s = split;
  c.op.fn = [steps, s, out](const std::vector<GradedElement>& args) {
    TensorSum sum = expand_word(args);
    for (const auto& st : steps) {
      if (st.loop)
        sum = detail::apply_loop(sum, st.index_class, st.src);
      else
        sum = apply_edge(sum, st.index_class, st.src, st.tgt);
      if (sum.empty()) break;
    }
    return contract_sum(sum, s, out);
  };
  return c;
}

}  // namespace bimod
