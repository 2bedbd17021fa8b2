#pragma once

#include "bimod/derived.hpp"
#include "bimod/ranks.hpp"

#include <functional>
#include <map>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

namespace bimod {

// Cochain of the two-object category: operator families valued in the three
// legal Hom shapes.  degree is the shifted total degree, uniform across parts.
struct Cochain {
  Splitting split;
  int degree = 0;
  std::map<int, MultilinearOperator> a_part;
  std::map<std::pair<int, int>, MultilinearOperator> k_part;
  std::map<int, MultilinearOperator> b_part;

  bool parts_empty() const { return a_part.empty() && k_part.empty() && b_part.empty(); }

  static Cochain zero(const Splitting& s, int degree) { return Cochain{s, degree, {}, {}, {}}; }
};

namespace detail {
inline void part_accumulate(std::map<int, MultilinearOperator>& part, int key,
                            MultilinearOperator piece, int sign) {
  if (sign == -1) {
    MultilinearOperator base = piece;
    piece.fn = [base](const std::vector<GradedElement>& v) { return base.eval(v) * Rat(-1); };
  }
  auto it = part.find(key);
  if (it == part.end()) {
    part[key] = piece;
  } else {
    MultilinearOperator prev = it->second;
    MultilinearOperator sum = prev;
    sum.fn = [prev, piece](const std::vector<GradedElement>& v) {
      return prev.eval(v) + piece.eval(v);
    };
    it->second = sum;
  }
}

inline void part_accumulate(std::map<std::pair<int, int>, MultilinearOperator>& part,
                            std::pair<int, int> key, MultilinearOperator piece, int sign) {
  if (sign == -1) {
    MultilinearOperator base = piece;
    piece.fn = [base](const std::vector<GradedElement>& v) { return base.eval(v) * Rat(-1); };
  }
  auto it = part.find(key);
  if (it == part.end()) {
    part[key] = piece;
  } else {
    MultilinearOperator prev = it->second;
    MultilinearOperator sum = prev;
    sum.fn = [prev, piece](const std::vector<GradedElement>& v) {
      return prev.eval(v) + piece.eval(v);
    };
    it->second = sum;
  }
}
}  // namespace detail

inline Cochain cochain_add(const Cochain& a, const Cochain& b) {
  Cochain out = a;
  for (const auto& [k, op] : b.a_part) detail::part_accumulate(out.a_part, k, op, +1);
  for (const auto& [k, op] : b.k_part) detail::part_accumulate(out.k_part, k, op, +1);
  for (const auto& [k, op] : b.b_part) detail::part_accumulate(out.b_part, k, op, +1);
  return out;
}

inline Cochain cochain_scale(const Cochain& a, const Rat& c) {
  Cochain out = a;
  auto scale = [&c](MultilinearOperator& op) {
    MultilinearOperator base = op;
    op.fn = [base, c](const std::vector<GradedElement>& v) { return base.eval(v) * c; };
  };
  for (auto& [k, op] : out.a_part) scale(op);
  for (auto& [k, op] : out.k_part) scale(op);
  for (auto& [k, op] : out.b_part) scale(op);
  return out;
}

// Structure Maurer-Cartan cochain: the three differentials packed together.
inline Cochain structure_cochain(const TaylorStructure& dA, const TaylorStructure& dB,
                                 const TaylorStructure& dK) {
  Cochain g = Cochain::zero(dA.splitting(), 1);
  for (const auto& [sig, comp] : dA.components()) g.a_part[sig.first] = collapse_exact(dA, sig.first);
  for (const auto& [sig, comp] : dB.components()) g.b_part[sig.first] = collapse_exact(dB, sig.first);
  for (const auto& [sig, comp] : dK.components())
    g.k_part[sig] = collapse_exact(dK, sig.first, sig.second);
  return g;
}

struct CochainCaps {
  int max_a = 3;       // largest A-part arity compared
  int max_m = 2;       // largest A-valence of the K part
  int max_n = 2;       // largest B-valence of the K part
  int max_b = 3;       // largest B-part arity compared
  int truncation = 4;  // basis tuple degree bound
};

inline bool cochains_equal(const Cochain& f, const Cochain& g, const CochainCaps& caps) {
  const Splitting& s = f.split;
  auto op_of = [](const std::map<int, MultilinearOperator>& part, int k, const Splitting& sp,
                  Ambient a) {
    auto it = part.find(k);
    if (it != part.end()) return it->second;
    return MultilinearOperator::zero(sp, algebra_shape(a, k), 0);
  };
  auto kop_of = [](const std::map<std::pair<int, int>, MultilinearOperator>& part,
                   std::pair<int, int> k, const Splitting& sp) {
    auto it = part.find(k);
    if (it != part.end()) return it->second;
    return MultilinearOperator::zero(sp, bimodule_shape(k.first, k.second), 0);
  };
  for (int a = 0; a <= caps.max_a; ++a)
    if (!operators_equal(op_of(f.a_part, a, s, Ambient::A), op_of(g.a_part, a, s, Ambient::A),
                         caps.truncation))
      return false;
  for (int b = 0; b <= caps.max_b; ++b)
    if (!operators_equal(op_of(f.b_part, b, s, Ambient::B), op_of(g.b_part, b, s, Ambient::B),
                         caps.truncation))
      return false;
  for (int m = 0; m <= caps.max_m; ++m)
    for (int n = 0; n <= caps.max_n; ++n)
      if (!operators_equal(kop_of(f.k_part, {m, n}, s), kop_of(g.k_part, {m, n}, s),
                           caps.truncation))
        return false;
  return true;
}

inline bool cochain_is_zero(const Cochain& f, const CochainCaps& caps) {
  return cochains_equal(f, Cochain::zero(f.split, f.degree), caps);
}

// Single brace f{g}: every legal single insertion of a component of g into a
// component of f, with the composition signs of insert_operator.
inline Cochain brace1(const Cochain& f, const Cochain& g) {
  Cochain out = Cochain::zero(f.split, f.degree + g.degree);
  for (const auto& [n1, opf] : f.a_part)
    for (const auto& [n2, opg] : g.a_part)
      for (int pos = 0; pos < n1; ++pos)
        detail::part_accumulate(out.a_part, n1 + n2 - 1, insert_operator(opf, opg, pos), +1);
  for (const auto& [n1, opf] : f.b_part)
    for (const auto& [n2, opg] : g.b_part)
      for (int pos = 0; pos < n1; ++pos)
        detail::part_accumulate(out.b_part, n1 + n2 - 1, insert_operator(opf, opg, pos), +1);
  for (const auto& [mn, opf] : f.k_part) {
    auto [m, n] = mn;
    for (const auto& [n2, opg] : g.a_part)
      for (int pos = 0; pos < m; ++pos)
        detail::part_accumulate(out.k_part, {m + n2 - 1, n}, insert_operator(opf, opg, pos), +1);
    for (const auto& [n2, opg] : g.b_part)
      for (int pos = 0; pos < n; ++pos)
        detail::part_accumulate(out.k_part, {m, n + n2 - 1},
                                insert_operator(opf, opg, m + 1 + pos), +1);
    for (const auto& [mn2, opg] : g.k_part)
      detail::part_accumulate(out.k_part, {m + mn2.first, n + mn2.second},
                              insert_operator(opf, opg, m), +1);
  }
  return out;
}

// Multi-brace composite built through the suspension dictionary: the brace
// signs live at the suspended level over shifted degrees, and desuspending
// adds the order twists plus a global arity twist.  Cross-validated against
// insert_operator on single insertions.
inline MultilinearOperator brace_composite(const MultilinearOperator& outer,
                                           const std::vector<MultilinearOperator>& inners,
                                           const std::vector<int>& positions) {
  int p = outer.arity();
  int q = static_cast<int>(inners.size());
  for (int k = 0; k + 1 < q; ++k)
    if (positions[static_cast<std::size_t>(k)] >= positions[static_cast<std::size_t>(k + 1)])
      throw std::invalid_argument("brace positions must increase");
  MultilinearOperator op;
  op.split = outer.split;
  op.shape.out = outer.shape.out;
  op.degree = outer.degree;
  std::vector<int> starts;  // first composite slot of each inner block
  {
    int k = 0;
    for (int i = 0; i < p; ++i) {
      if (k < q && positions[static_cast<std::size_t>(k)] == i) {
        starts.push_back(static_cast<int>(op.shape.slots.size()));
        const auto& in = inners[static_cast<std::size_t>(k)];
        if (in.shape.out != outer.shape.slots[static_cast<std::size_t>(i)])
          throw std::invalid_argument("inner output does not fit the outer slot");
        for (auto a : in.shape.slots) op.shape.slots.push_back(a);
        op.degree += in.degree;
        ++k;
      } else {
        op.shape.slots.push_back(outer.shape.slots[static_cast<std::size_t>(i)]);
      }
    }
    if (k != q) throw std::invalid_argument("brace position out of range");
  }
  int N = static_cast<int>(op.shape.slots.size());

  op.fn = [outer, inners, positions, starts, p, q, N,
           s = outer.split](const std::vector<GradedElement>& args) {
    GradedElement acc = GradedElement::zero(s, outer.shape.out);
    TensorSum layers = expand_word(args);
    if (args.empty()) layers.push_back(TensorTerm{Rat(1), {}});
    for (const auto& layer : layers) {
      std::vector<int> w(static_cast<std::size_t>(N));
      for (int j = 0; j < N; ++j)
        w[static_cast<std::size_t>(j)] = layer.slots[static_cast<std::size_t>(j)].wedge_degree();
      long expo = static_cast<long>(N) * (N - 1) / 2;
      for (int j = 0; j < N; ++j) expo += static_cast<long>(N - 1 - j) * w[static_cast<std::size_t>(j)];
      // suspended brace signs and the inner desuspension twists
      std::vector<GradedElement> pargs;
      std::vector<int> pdeg;
      int k = 0;
      for (int i = 0, j = 0; i < p; ++i) {
        if (k < q && positions[static_cast<std::size_t>(k)] == i) {
          const auto& in = inners[static_cast<std::size_t>(k)];
          int qa = in.arity();
          int start = starts[static_cast<std::size_t>(k)];
          long norm = shifted_degree(in);
          for (int l = 0; l < start; ++l) expo += norm * (w[static_cast<std::size_t>(l)] - 1);
          int blockw = 0;
          std::vector<GradedElement> block;
          for (int t = 0; t < qa; ++t) {
            int wt = w[static_cast<std::size_t>(start + t)];
            expo += static_cast<long>(qa - 1 - t) * (wt - 1);
            blockw += wt;
            block.push_back(layer.slots[static_cast<std::size_t>(start + t)]);
          }
          pargs.push_back(in.eval(block));
          pdeg.push_back(in.degree + blockw);
          j += qa;
          ++k;
        } else {
          pargs.push_back(layer.slots[static_cast<std::size_t>(j)]);
          pdeg.push_back(w[static_cast<std::size_t>(j)]);
          j += 1;
        }
      }
      for (int u = 0; u < p; ++u)
        expo += static_cast<long>(p - 1 - u) * (pdeg[static_cast<std::size_t>(u)] - 1);
      acc += outer.eval(pargs) * (layer.coeff * Rat(parity_sign(expo)));
    }
    return acc;
  };
  return op;
}

// Brace of cochains f{g_1,...,g_r}: all legal placements of the list, in
// order, into one component of f.
inline Cochain brace(const Cochain& f, const std::vector<Cochain>& gs) {
  if (gs.empty()) return f;
  if (gs.size() == 1) return brace1(f, gs[0]);
  int deg = f.degree;
  for (const auto& g : gs) deg += g.degree;
  Cochain out = Cochain::zero(f.split, deg);
  int r = static_cast<int>(gs.size());

  // enumerate which component of each g lands where; only algebra parts can be
  // placed more than once, so walk placements recursively per f-component
  struct Placement {
    std::vector<MultilinearOperator> ops;
    std::vector<int> pos;
  };
  auto emit_a = [&](const MultilinearOperator& opf, int n1, bool bpart) {
    std::vector<Placement> done;
    std::vector<Placement> work{{{}, {}}};
    for (int k = 0; k < r; ++k) {
      std::vector<Placement> next;
      const auto& part = bpart ? gs[static_cast<std::size_t>(k)].b_part
                               : gs[static_cast<std::size_t>(k)].a_part;
      for (const auto& pl : work)
        for (const auto& [n2, opg] : part) {
          int lo = pl.pos.empty() ? 0 : pl.pos.back() + 1;
          for (int pos = lo; pos < n1; ++pos) {
            Placement np = pl;
            np.ops.push_back(opg);
            np.pos.push_back(pos);
            next.push_back(np);
          }
        }
      work = next;
    }
    for (const auto& pl : work) {
      auto piece = brace_composite(opf, pl.ops, pl.pos);
      int arity = piece.arity();
      if (bpart)
        detail::part_accumulate(out.b_part, arity, piece, +1);
      else
        detail::part_accumulate(out.a_part, arity, piece, +1);
    }
    (void)done;
  };
  for (const auto& [n1, opf] : f.a_part) emit_a(opf, n1, false);
  for (const auto& [n1, opf] : f.b_part) emit_a(opf, n1, true);
  // K-shaped outer: each g contributes an A, B, or K component to disjoint
  // ordered slots; at most one K insertion (the middle slot)
  for (const auto& [mn, opf] : f.k_part) {
    auto [m, n] = mn;
    int arity_f = m + n + 1;
    struct KPlacement {
      std::vector<MultilinearOperator> ops;
      std::vector<int> pos;
      std::vector<std::pair<int, int>> kshift;  // per-op (dm, dn) contribution
    };
    std::vector<KPlacement> work{{{}, {}, {}}};
    for (int k = 0; k < r; ++k) {
      std::vector<KPlacement> next;
      const Cochain& g = gs[static_cast<std::size_t>(k)];
      for (const auto& pl : work) {
        int lo = pl.pos.empty() ? 0 : pl.pos.back() + 1;
        for (const auto& [n2, opg] : g.a_part)
          for (int pos = std::max(lo, 0); pos < m; ++pos) {
            KPlacement np = pl;
            np.ops.push_back(opg);
            np.pos.push_back(pos);
            np.kshift.push_back({n2 - 1, 0});
            next.push_back(np);
          }
        for (const auto& [mn2, opg] : g.k_part)
          if (m >= lo) {
            KPlacement np = pl;
            np.ops.push_back(opg);
            np.pos.push_back(m);
            np.kshift.push_back({mn2.first, mn2.second});
            next.push_back(np);
          }
        for (const auto& [n2, opg] : g.b_part)
          for (int pos = std::max(lo, m + 1); pos < arity_f; ++pos) {
            KPlacement np = pl;
            np.ops.push_back(opg);
            np.pos.push_back(pos);
            np.kshift.push_back({0, n2 - 1});
            next.push_back(np);
          }
      }
      work = next;
    }
    for (const auto& pl : work) {
      auto piece = brace_composite(opf, pl.ops, pl.pos);
      int dm = 0, dn = 0;
      for (auto [a, b] : pl.kshift) {
        dm += a;
        dn += b;
      }
      detail::part_accumulate(out.k_part, {m + dm, n + dn}, piece, +1);
    }
  }
  return out;
}

inline Cochain gerstenhaber(const Cochain& f, const Cochain& g) {
  Cochain fg = brace1(f, g);
  Cochain gf = brace1(g, f);
  int sign = parity_sign(static_cast<long>(f.degree) * g.degree);
  return cochain_add(fg, cochain_scale(gf, Rat(-sign)));
}

struct MaurerCartan {
  Cochain gamma;
};

// Packs the structures into a degree-1 cochain and verifies the MC residual
// on the given window before handing it out.
inline MaurerCartan maurer_cartan(const TaylorStructure& dA, const TaylorStructure& dB,
                                  const TaylorStructure& dK, const CochainCaps& caps) {
  Cochain g = structure_cochain(dA, dB, dK);
  if (!cochain_is_zero(gerstenhaber(g, g), caps))
    throw std::domain_error("structures fail the Maurer-Cartan equation");
  return MaurerCartan{g};
}

inline Cochain differential(const MaurerCartan& mc, const Cochain& phi) {
  return gerstenhaber(mc.gamma, phi);
}

enum class DiffPart { AA, KA, KK, KB, BB };

// The five typed groups of the differential; their sum is [γ, φ].
inline Cochain differential_part(const MaurerCartan& mc, const Cochain& phi, DiffPart which) {
  const Cochain& g = mc.gamma;
  Cochain sel_g = Cochain::zero(g.split, g.degree);
  Cochain sel_phi = Cochain::zero(phi.split, phi.degree);
  switch (which) {
    case DiffPart::AA: {
      sel_g.a_part = g.a_part;
      sel_phi.a_part = phi.a_part;
      return gerstenhaber(sel_g, sel_phi);
    }
    case DiffPart::KA: {
      sel_g.k_part = g.k_part;
      sel_phi.a_part = phi.a_part;
      return brace1(sel_g, sel_phi);
    }
    case DiffPart::KK: {
      sel_phi.k_part = phi.k_part;
      return gerstenhaber(g, sel_phi);
    }
    case DiffPart::KB: {
      sel_g.k_part = g.k_part;
      sel_phi.b_part = phi.b_part;
      return brace1(sel_g, sel_phi);
    }
    case DiffPart::BB: {
      sel_g.b_part = g.b_part;
      sel_phi.b_part = phi.b_part;
      return gerstenhaber(sel_g, sel_phi);
    }
  }
  return Cochain::zero(g.split, 0);
}

// Projection onto one single-object complex: keeps that algebra part.
inline Cochain project(const Cochain& phi, Ambient target) {
  Cochain out = Cochain::zero(phi.split, phi.degree);
  if (target == Ambient::A)
    out.a_part = phi.a_part;
  else if (target == Ambient::B)
    out.b_part = phi.b_part;
  else
    throw std::invalid_argument("projection targets an algebra object");
  return out;
}

// ---- truncated complex of elementary cochains --------------------------------

// weight grading: even generators +1, odd generators -1; conserved by all
// structure components built from quadratic data
inline int weight_of(const Monomial& mo) { return mo.poly_degree() - mo.odd_count(); }

struct ElementaryCochain {
  char part = 'A';  // 'A', 'K', 'B'
  int m = 0, n = 0;  // K-part valences; for A/B parts m is the arity
  std::vector<Monomial> inputs;
  Monomial output;
};

struct ComplexOptions {
  bool with_a = true;
  bool with_k = true;
  bool with_b = true;
  int max_arity = 2;  // slot count cap per component
  int poly_cap = 2;   // per-slot polynomial degree cap
  int t_lo = -100, t_hi = 100;  // total degree window kept in the basis
  int w_lo = -100, w_hi = 100;  // weight window kept in the basis
  int probe_margin = 2;  // extra poly degrees probed to detect leakage
};

inline Cochain elementary_to_cochain(const Splitting& s, const ElementaryCochain& e) {
  Shape sh;
  Ambient out_amb;
  if (e.part == 'A') {
    sh = algebra_shape(Ambient::A, e.m);
    out_amb = Ambient::A;
  } else if (e.part == 'B') {
    sh = algebra_shape(Ambient::B, e.m);
    out_amb = Ambient::B;
  } else {
    sh = bimodule_shape(e.m, e.n);
    out_amb = Ambient::K;
  }
  MultilinearOperator op;
  op.split = s;
  op.shape = sh;
  int wout = e.output.odd_count();
  int win = 0;
  for (const auto& mo : e.inputs) win += mo.odd_count();
  op.degree = wout - win;
  op.fn = [s, e, out_amb](const std::vector<GradedElement>& args) {
    Rat c(1);
    for (std::size_t i = 0; i < args.size(); ++i) {
      const auto& terms = args[i].terms();
      auto it = terms.find(e.inputs[i]);
      if (it == terms.end()) return GradedElement::zero(s, out_amb);
      c *= it->second;
    }
    return GradedElement::from_monomial(s, out_amb, e.output, c);
  };
  Cochain out = Cochain::zero(s, op.degree + sh.arity() - 1);
  if (e.part == 'A')
    out.a_part[e.m] = op;
  else if (e.part == 'B')
    out.b_part[e.m] = op;
  else
    out.k_part[{e.m, e.n}] = op;
  return out;
}

inline int elementary_total_degree(const ElementaryCochain& e) {
  int wout = e.output.odd_count();
  int win = 0, arity = static_cast<int>(e.inputs.size());
  for (const auto& mo : e.inputs) win += mo.odd_count();
  return (wout - win) + arity - 1;
}

inline int elementary_weight(const ElementaryCochain& e) {
  int w = weight_of(e.output);
  for (const auto& mo : e.inputs) w -= weight_of(mo);
  return w;
}

inline std::vector<ElementaryCochain> elementary_basis(const Splitting& s,
                                                       const ComplexOptions& opt) {
  std::vector<ElementaryCochain> basis;
  auto tuples = [&](const std::vector<Ambient>& slots, auto&& visit) {
    std::vector<std::vector<Monomial>> per;
    for (Ambient a : slots) per.push_back(monomial_basis(s, a, opt.poly_cap));
    std::vector<Monomial> cur;
    std::function<void()> rec = [&]() {
      if (cur.size() == slots.size()) {
        visit(cur);
        return;
      }
      for (const auto& mo : per[cur.size()]) {
        cur.push_back(mo);
        rec();
        cur.pop_back();
      }
    };
    rec();
  };
  auto keep = [&](const ElementaryCochain& e) {
    int t = elementary_total_degree(e), w = elementary_weight(e);
    if (t < opt.t_lo || t > opt.t_hi || w < opt.w_lo || w > opt.w_hi) return;
    basis.push_back(e);
  };
  auto add_algebra = [&](char part, Ambient amb) {
    for (int arity = 0; arity <= opt.max_arity; ++arity) {
      std::vector<Ambient> slots(static_cast<std::size_t>(arity), amb);
      tuples(slots, [&](const std::vector<Monomial>& in) {
        for (const auto& out : monomial_basis(s, amb, opt.poly_cap)) {
          ElementaryCochain e;
          e.part = part;
          e.m = arity;
          e.inputs = in;
          e.output = out;
          keep(e);
        }
      });
    }
  };
  if (opt.with_a) add_algebra('A', Ambient::A);
  if (opt.with_b) add_algebra('B', Ambient::B);
  if (opt.with_k) {
    for (int m = 0; m <= opt.max_arity; ++m)
      for (int n = 0; m + n <= opt.max_arity; ++n) {
        Shape sh = bimodule_shape(m, n);
        tuples(sh.slots, [&](const std::vector<Monomial>& in) {
          for (const auto& out : monomial_basis(s, Ambient::K, opt.poly_cap)) {
            ElementaryCochain e;
            e.part = 'K';
            e.m = m;
            e.n = n;
            e.inputs = in;
            e.output = out;
            keep(e);
          }
        });
      }
  }
  return basis;
}

// Truncated two-object complex: elementary cochains bucketed by (total degree,
// weight), with the matrix of [γ,·] between buckets.  Image components that
// fall outside the basis mark the source block truncated.
inline std::map<std::pair<int, int>, ComplexBlock> two_object_complex(const MaurerCartan& mc,
                                                                      const ComplexOptions& opt) {
  const Splitting& s = mc.gamma.split;
  auto basis = elementary_basis(s, opt);
  std::map<std::pair<int, int>, std::vector<std::size_t>> buckets;
  using ElemKey = std::tuple<char, int, int, std::vector<Monomial>, Monomial>;
  std::map<ElemKey, std::pair<std::size_t, int>> index;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    auto key = std::make_pair(elementary_total_degree(basis[i]), elementary_weight(basis[i]));
    int local = static_cast<int>(buckets[key].size());
    buckets[key].push_back(i);
    index[{basis[i].part, basis[i].m, basis[i].n, basis[i].inputs, basis[i].output}] = {i, local};
  }
  std::map<std::pair<int, int>, ComplexBlock> blocks;
  for (const auto& [key, ids] : buckets) {
    ComplexBlock blk;
    blk.dim = static_cast<long>(ids.size());
    blocks[key] = blk;
  }

  auto locate = [&](char part, int m, int n, const std::vector<Monomial>& in,
                    const Monomial& out) -> std::pair<bool, std::pair<std::size_t, int>> {
    auto it = index.find({part, m, n, in, out});
    if (it == index.end()) return {false, {0, 0}};
    return {true, it->second};
  };

  for (const auto& [key, ids] : buckets) {
    auto& blk = blocks[key];
    for (int col = 0; col < static_cast<int>(ids.size()); ++col) {
      const auto& e = basis[ids[static_cast<std::size_t>(col)]];
      Cochain de = differential(mc, elementary_to_cochain(s, e));
      // Probe the component on tuples slightly past the poly cap: any nonzero
      // value at a tuple outside the kept basis is truncation leakage.
      auto scan_part = [&](char part, int m, int n, const MultilinearOperator& op) {
        std::vector<Ambient> slots = op.shape.slots;
        bool in_caps = (part == 'K') ? (m + n <= opt.max_arity)
                                     : (static_cast<int>(slots.size()) <= opt.max_arity);
        std::vector<std::vector<Monomial>> per;
        int probe_cap = in_caps ? opt.poly_cap + opt.probe_margin : opt.poly_cap;
        for (Ambient a : slots) per.push_back(monomial_basis(s, a, probe_cap));
        std::vector<Monomial> cur;
        std::function<void()> rec = [&]() {
          if (!in_caps && blk.out_truncated) return;
          if (cur.size() == slots.size()) {
            std::vector<GradedElement> args;
            for (std::size_t i = 0; i < cur.size(); ++i)
              args.push_back(GradedElement::from_monomial(s, slots[i], cur[i], Rat(1)));
            GradedElement val = op.eval(args);
            for (const auto& [mo, c] : val.terms()) {
              if (c == 0) continue;
              if (!in_caps) {
                blk.out_truncated = true;
                return;
              }
              auto [found, where] = locate(part, m, n, cur, mo);
              if (!found) {
                blk.out_truncated = true;
                continue;
              }
              if (elementary_total_degree(basis[where.first]) != key.first + 1 ||
                  elementary_weight(basis[where.first]) != key.second)
                throw std::logic_error("differential is not bihomogeneous");
              blk.d_out.add(where.second, col, c);
            }
            return;
          }
          for (const auto& mo : per[cur.size()]) {
            cur.push_back(mo);
            rec();
            cur.pop_back();
          }
        };
        rec();
      };
      for (const auto& [m2, op] : de.a_part) scan_part('A', m2, 0, op);
      for (const auto& [b2, op] : de.b_part) scan_part('B', b2, 0, op);
      for (const auto& [mn2, op] : de.k_part) scan_part('K', mn2.first, mn2.second, op);
    }
    auto nb = blocks.find({key.first + 1, key.second});
    blk.d_out.cols = static_cast<int>(ids.size());
    blk.d_out.rows = static_cast<int>(nb == blocks.end() ? 0 : nb->second.dim);
  }
  return blocks;
}

}  // namespace bimod
