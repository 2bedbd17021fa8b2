#pragma once

// Split polynomial fibers over a polynomial base: the two-differential
// resolution complex, its exact cohomology blocks, the dual algebra with the
// lift-and-compose product, the first two components of the chain map from
// the bar resolution, and the derived-action report behind the duality
// checks.  All linear algebra is exact rational.

#include "bimod/element.hpp"
#include "bimod/ranks.hpp"
#include "bimod/structures.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

namespace bimod {

namespace detail {

inline long binom(long n, long k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline void exponent_vectors(int vars, int total, std::vector<int>& cur,
                             std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == vars - 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int e = 0; e <= total; ++e) {
    cur.push_back(e);
    exponent_vectors(vars, total - e, cur, out);
    cur.pop_back();
  }
}

inline void index_subsets(int from, int universe, int want, std::vector<int>& cur,
                          std::vector<std::vector<int>>& out) {
  if (want == 0) {
    out.push_back(cur);
    return;
  }
  for (int i = from; i <= universe - want; ++i) {
    cur.push_back(i);
    index_subsets(i + 1, universe, want - 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

// k[x_1..x_b] tensor k[y_1..y_f] tensor the exterior algebra on theta_1..f,
// where theta_j suspends y_j.  Cohomological degree is minus the theta count;
// internal degree counts every generator once, so each (cohomological,
// internal) piece is finite and the differentials preserve the internal
// degree.
class KoszulComplex {
 public:
  KoszulComplex(int base_dim, int fiber_dim, int internal_bound = 6)
      : base_(base_dim), fiber_(fiber_dim), bound_(internal_bound),
        split_{base_dim + fiber_dim, 0, 0, 0} {
    if (base_dim < 0 || fiber_dim < 0 || internal_bound < 0)
      throw std::invalid_argument("negative dimension");
  }

  int base_dim() const { return base_; }
  int fiber_dim() const { return fiber_; }
  int internal_bound() const { return bound_; }
  const Splitting& split() const { return split_; }

  GradedElement zero() const { return GradedElement::zero(split_, Ambient::Tpoly); }
  GradedElement one() const { return GradedElement::one(split_, Ambient::Tpoly); }
  GradedElement x(int i) const {
    if (i < 0 || i >= base_) throw std::out_of_range("base generator index");
    return GradedElement::coord(split_, Ambient::Tpoly, i);
  }
  GradedElement y(int j) const {
    if (j < 0 || j >= fiber_) throw std::out_of_range("fiber generator index");
    return GradedElement::coord(split_, Ambient::Tpoly, base_ + j);
  }
  GradedElement theta(int j) const {
    if (j < 0 || j >= fiber_) throw std::out_of_range("fiber generator index");
    return GradedElement::odd_gen(split_, Ambient::Tpoly, base_ + j);
  }

  static int internal_degree(const Monomial& m) { return m.poly_degree() + m.odd_count(); }

  int fiber_weight(const Monomial& m) const {
    int w = m.odd_count();
    for (int j = 0; j < fiber_; ++j) w += m.evens[static_cast<std::size_t>(base_ + j)];
    return w;
  }

  // y_j times the left derivation along theta_j; raises cohomological degree
  // by one at fixed internal degree
  GradedElement differential(const GradedElement& v) const {
    GradedElement out = zero();
    for (int j = 0; j < fiber_; ++j) out += multiply(y(j), v.contract(base_ + j));
    return out;
  }

  // theta_j times the derivative along y_j; the homotopy partner of the
  // differential
  GradedElement de_rham(const GradedElement& v) const {
    GradedElement out = zero();
    for (int j = 0; j < fiber_; ++j) out += multiply(theta(j), v.derivative(base_ + j));
    return out;
  }

  GradedElement fiber_euler(const GradedElement& v) const {
    GradedElement out = zero();
    for (const auto& [m, c] : v.terms())
      out += GradedElement::from_monomial(split_, Ambient::Tpoly, m, c * Rat(fiber_weight(m)));
    return out;
  }

  // monomials with r thetas and internal degree q
  std::vector<Monomial> basis(int r, int q) const {
    std::vector<Monomial> out;
    if (r < 0 || r > fiber_ || q < r) return out;
    std::vector<std::vector<int>> subsets;
    std::vector<int> cur;
    detail::index_subsets(0, fiber_, r, cur, subsets);
    std::vector<std::vector<int>> evens;
    if (base_ + fiber_ == 0) {
      if (q - r == 0) evens.push_back({});
    } else {
      detail::exponent_vectors(base_ + fiber_, q - r, cur, evens);
    }
    for (const auto& sub : subsets) {
      for (const auto& ev : evens) {
        Monomial m;
        m.evens = ev;
        for (int j : sub) m.odds.push_back(base_ + j);
        out.push_back(std::move(m));
      }
    }
    return out;
  }

  // blocks keyed by (cohomological, internal) degree, ready for the rank
  // scan; nothing leaks past the window because the differential preserves
  // the internal degree
  std::map<std::pair<int, int>, ComplexBlock> blocks() const {
    std::map<std::pair<int, int>, ComplexBlock> out;
    for (int q = 0; q <= bound_; ++q) {
      for (int r = 0; r <= std::min(fiber_, q); ++r) {
        auto src = basis(r, q);
        if (src.empty() && r > 0) continue;
        ComplexBlock blk;
        blk.dim = static_cast<long>(src.size());
        if (r >= 1) {
          auto tgt = basis(r - 1, q);
          std::map<Monomial, int> index;
          for (std::size_t i = 0; i < tgt.size(); ++i) index[tgt[i]] = static_cast<int>(i);
          blk.d_out.rows = static_cast<int>(tgt.size());
          blk.d_out.cols = static_cast<int>(src.size());
          for (std::size_t cidx = 0; cidx < src.size(); ++cidx) {
            GradedElement img =
                differential(GradedElement::from_monomial(split_, Ambient::Tpoly, src[cidx], Rat(1)));
            for (const auto& [m, c] : img.terms())
              blk.d_out.add(index.at(m), static_cast<int>(cidx), c);
          }
        }
        out[{-r, q}] = std::move(blk);
      }
    }
    return out;
  }

 private:
  int base_, fiber_, bound_;
  Splitting split_;
};

inline KoszulComplex koszul_complex(int base_dim, int fiber_dim, int internal_bound = 6) {
  return KoszulComplex(base_dim, fiber_dim, internal_bound);
}

// ---------------------------------------------------------------------------
// Dual algebra

struct ExtClass {
  GradedElement rep;
  int p = 0;  // resolution degree: the eta count
  int q = 0;  // internal degree: base degree minus p
};

struct ExtEntry {
  int p = 0;
  int q = 0;
  long dim = 0;
};

// Polynomials in the base generators times the exterior algebra on the fiber
// duals eta_j; eta_j sits in bidegree (1,-1) and acts on the complex by
// contraction.  The lift-and-compose product is computed against that action
// and lands on the reversed multiplication.
class ExtAlgebra {
 public:
  ExtAlgebra(int base_dim, int fiber_dim, int internal_bound = 6)
      : cx_(base_dim, fiber_dim, internal_bound) {}

  const KoszulComplex& complex() const { return cx_; }

  GradedElement one() const { return cx_.one(); }
  GradedElement x(int i) const { return cx_.x(i); }
  GradedElement eta(int j) const { return cx_.theta(j); }

  ExtClass make(const GradedElement& rep) const {
    for (const auto& [m, c] : rep.terms())
      for (int j = 0; j < cx_.fiber_dim(); ++j)
        if (m.evens[static_cast<std::size_t>(cx_.base_dim() + j)] != 0)
          throw std::domain_error("dual class uses a fiber coordinate");
    if (!rep.homogeneous_odd()) throw std::domain_error("dual class mixes resolution degrees");
    ExtClass c;
    c.rep = rep;
    c.p = rep.wedge_degree();
    int deg = -1;
    for (const auto& [m, cf] : rep.terms()) {
      if (deg >= 0 && m.poly_degree() != deg)
        throw std::domain_error("dual class mixes internal degrees");
      deg = m.poly_degree();
    }
    c.q = (deg < 0 ? 0 : deg) - c.p;
    return c;
  }

  // dimensions per bidegree inside the internal window
  std::vector<ExtEntry> table() const {
    std::vector<ExtEntry> out;
    for (int p = 0; p <= cx_.fiber_dim(); ++p) {
      for (int a = 0; a <= cx_.internal_bound(); ++a) {
        ExtEntry e;
        e.p = p;
        e.q = a - p;
        e.dim = detail::binom(a + cx_.base_dim() - 1, cx_.base_dim() - 1) *
                detail::binom(cx_.fiber_dim(), p);
        if (cx_.base_dim() == 0) e.dim = (a == 0) ? detail::binom(cx_.fiber_dim(), p) : 0;
        if (e.dim != 0) out.push_back(e);
      }
    }
    return out;
  }

  GradedElement product(const GradedElement& a, const GradedElement& b) const {
    return multiply(a, b);
  }

  GradedElement opposite(const GradedElement& a, const GradedElement& b) const {
    return multiply(b, a);
  }

  // contraction lift of a class applied to a complex element: largest fiber
  // index first, then the base coefficient
  GradedElement lift(const GradedElement& cls, const GradedElement& w) const {
    GradedElement out = cx_.zero();
    for (const auto& [m, c] : cls.terms()) {
      GradedElement v = w;
      for (auto it = m.odds.rbegin(); it != m.odds.rend() && !v.is_zero(); ++it)
        v = v.contract(*it);
      if (v.is_zero()) continue;
      Monomial ev;
      ev.evens = m.evens;
      out += multiply(GradedElement::from_monomial(cx_.split(), Ambient::Tpoly, ev, c), v);
    }
    return out;
  }

  // composite of the two contraction lifts, read back through the pairing of
  // eta monomials with theta monomials
  GradedElement yoneda(const GradedElement& a, const GradedElement& b) const {
    if (!a.homogeneous_odd() || !b.homogeneous_odd())
      throw std::domain_error("lift-and-compose needs homogeneous classes");
    const int total = a.wedge_degree() + b.wedge_degree();
    GradedElement out = cx_.zero();
    if (total > cx_.fiber_dim()) return out;
    std::vector<std::vector<int>> subsets;
    std::vector<int> cur;
    detail::index_subsets(0, cx_.fiber_dim(), total, cur, subsets);
    const int sign = (total * (total - 1) / 2) % 2 == 0 ? 1 : -1;
    for (const auto& sub : subsets) {
      Monomial mt;
      mt.evens.assign(static_cast<std::size_t>(cx_.base_dim() + cx_.fiber_dim()), 0);
      for (int j : sub) mt.odds.push_back(cx_.base_dim() + j);
      GradedElement theta_t =
          GradedElement::from_monomial(cx_.split(), Ambient::Tpoly, mt, Rat(1));
      GradedElement coeff = lift(b, lift(a, theta_t));
      if (coeff.is_zero()) continue;
      Monomial me = mt;
      GradedElement eta_t = GradedElement::from_monomial(cx_.split(), Ambient::Tpoly, me,
                                                         Rat(sign));
      out += multiply(coeff, eta_t);
    }
    return out;
  }

 private:
  KoszulComplex cx_;
};

inline ExtAlgebra ext_algebra(int base_dim, int fiber_dim, int internal_bound = 6) {
  return ExtAlgebra(base_dim, fiber_dim, internal_bound);
}

// ---------------------------------------------------------------------------
// Chain map from the bar resolution

// Components of the comparison map onto the resolution complex.  p=0 takes
// (k|b) to the product; p=1 takes (k|b1|b2) to k (sum_j theta_j int_0^1
// (d b1 / d y_j)(t y) dt) b2, the primitive being exact on polynomials.  The
// module argument k is a base polynomial, so no parity sign appears; the
// middle slots must have positive fiber weight for the chain identity.
inline GradedElement bar_to_koszul(const KoszulComplex& cx, int p,
                                   const std::vector<GradedElement>& args) {
  if (p != 0 && p != 1) throw std::invalid_argument("only the first two components exist");
  if (static_cast<int>(args.size()) != p + 2)
    throw std::invalid_argument("argument count does not match the component");
  auto check_even = [&](const GradedElement& g, bool base_only) {
    for (const auto& [m, c] : g.terms()) {
      if (!m.odds.empty()) throw std::domain_error("bar slots hold algebra elements");
      if (base_only)
        for (int j = 0; j < cx.fiber_dim(); ++j)
          if (m.evens[static_cast<std::size_t>(cx.base_dim() + j)] != 0)
            throw std::domain_error("module slot holds a base polynomial");
    }
  };
  check_even(args[0], true);
  for (std::size_t i = 1; i < args.size(); ++i) check_even(args[i], false);
  if (p == 0) return multiply(args[0], args[1]);

  GradedElement mid = cx.zero();
  for (const auto& [m, c] : args[1].terms()) {
    const int fw = cx.fiber_weight(m);
    if (fw == 0) continue;
    for (int j = 0; j < cx.fiber_dim(); ++j) {
      const int e = m.evens[static_cast<std::size_t>(cx.base_dim() + j)];
      if (e == 0) continue;
      Monomial d = m;
      --d.evens[static_cast<std::size_t>(cx.base_dim() + j)];
      GradedElement term =
          GradedElement::from_monomial(cx.split(), Ambient::Tpoly, d, c * Rat(e) / Rat(fw));
      mid += multiply(cx.theta(j), term);
    }
  }
  return multiply(multiply(args[0], mid), args[2]);
}

// ---------------------------------------------------------------------------
// Bar chains

// Reduced bar chains of one boundary algebra of the pair: p middle slots from
// the augmentation ideal with weights summing to w.  The two end slots are
// dropped because the module action and the tail absorption vanish on
// reduced cochains; boundaries are the interior merges with suspension
// signs.
class BarComplex {
 public:
  BarComplex(Splitting s, Ambient alg, int p_max, int w_max)
      : split_(s), alg_(alg), p_max_(p_max), w_max_(w_max) {
    std::vector<Monomial> gens;
    for (const auto& m : monomial_basis(split_, alg_, w_max_))
      if (weight(m) >= 1 && weight(m) <= w_max_) gens.push_back(m);
    std::sort(gens.begin(), gens.end());
    ideal_ = std::move(gens);
  }

  static int weight(const Monomial& m) { return m.poly_degree() + m.odd_count(); }

  const std::vector<std::vector<Monomial>>& basis(int p, int w) const {
    auto key = std::make_pair(p, w);
    auto it = basis_.find(key);
    if (it != basis_.end()) return it->second;
    std::vector<std::vector<Monomial>> out;
    std::vector<Monomial> cur;
    auto rec = [&](auto&& self, int left_slots, int left_weight) -> void {
      if (left_slots == 0) {
        if (left_weight == 0) out.push_back(cur);
        return;
      }
      for (const auto& m : ideal_) {
        if (weight(m) > left_weight - (left_slots - 1)) continue;
        cur.push_back(m);
        self(self, left_slots - 1, left_weight - weight(m));
        cur.pop_back();
      }
    };
    if (p == 0) {
      if (w == 0) out.push_back({});
    } else if (p >= 1 && w >= p) {
      rec(rec, p, w);
    }
    return basis_.emplace(key, std::move(out)).first->second;
  }

  // boundary into (p-1, w): adjacent merges, each signed by the suspended
  // degrees to its left and the parity of the left factor
  SparseRatMatrix boundary(int p, int w) const {
    const auto& src = basis(p, w);
    const auto& tgt = basis(p - 1, w);
    std::map<std::vector<Monomial>, int> index;
    for (std::size_t i = 0; i < tgt.size(); ++i) index[tgt[i]] = static_cast<int>(i);
    SparseRatMatrix mat;
    mat.rows = static_cast<int>(tgt.size());
    mat.cols = static_cast<int>(src.size());
    for (std::size_t cidx = 0; cidx < src.size(); ++cidx) {
      const auto& tup = src[cidx];
      int susp = 0;
      for (int i = 0; i + 1 < static_cast<int>(tup.size()); ++i) {
        const Monomial& a = tup[static_cast<std::size_t>(i)];
        const Monomial& b = tup[static_cast<std::size_t>(i + 1)];
        const int par_a = a.odd_count() % 2;
        const int sgn = ((susp + par_a) % 2 == 0) ? 1 : -1;
        GradedElement prod = multiply(GradedElement::from_monomial(split_, alg_, a, Rat(1)),
                                      GradedElement::from_monomial(split_, alg_, b, Rat(1)));
        for (const auto& [m, c] : prod.terms()) {
          std::vector<Monomial> merged;
          merged.reserve(tup.size() - 1);
          for (int k = 0; k < static_cast<int>(tup.size()); ++k) {
            if (k == i + 1) continue;
            merged.push_back(k == i ? m : tup[static_cast<std::size_t>(k)]);
          }
          auto it = index.find(merged);
          if (it == index.end()) throw std::logic_error("merge left the weight slice");
          mat.add(it->second, static_cast<int>(cidx), c * Rat(sgn));
        }
        susp = (susp + par_a + 1) % 2;
      }
    }
    return mat;
  }

  // blocks keyed by (-p, w), ready for the rank scan
  std::map<std::pair<int, int>, ComplexBlock> blocks() const {
    std::map<std::pair<int, int>, ComplexBlock> out;
    for (int w = 0; w <= w_max_; ++w) {
      for (int p = 0; p <= std::min(p_max_ + 1, w == 0 ? 0 : w); ++p) {
        ComplexBlock blk;
        blk.dim = static_cast<long>(basis(p, w).size());
        if (p >= 1) blk.d_out = boundary(p, w);
        out[{-p, w}] = std::move(blk);
      }
    }
    return out;
  }

 private:
  Splitting split_;
  Ambient alg_;
  int p_max_, w_max_;
  std::vector<Monomial> ideal_;
  mutable std::map<std::pair<int, int>, std::vector<std::vector<Monomial>>> basis_;
};

// ---------------------------------------------------------------------------
// Derived action report

enum class KellerSide { LeftAction, RightAction };

struct KellerEntry {
  int p = 0;
  int q = 0;
  long dim_source = 0;
  long dim_target = 0;
  long map_rank = 0;
  bool iso = false;
  bool reliable = true;
};

struct KellerReport {
  std::vector<KellerEntry> entries;
  bool generators_match = false;
  long generator_rank = 0;
};

// Ranks of the map induced on cohomology by the one-sided derived action of
// the pair U={0}, V=X.  The generator images are evaluated from the exact
// part of the structure against the bar-side basis; higher resolution
// degrees follow through the algebra structure, so their image rank is the
// multiplicative closure of the generator rank.  Every block is complete in
// its bidegree, so no entry is flagged unreliable.
inline KellerReport check_keller(const TaylorStructure& dK, KellerSide side, int p_max) {
  const Splitting& s = dK.splitting();
  if (s.d_uv != 0 || s.d_uvperp != 0 || s.d_perp != 0)
    throw std::domain_error("derived action report needs the pair U={0}, V=X");
  const int d = s.d_upv;
  const int w_max = p_max;

  const TaylorComponent* pairing = dK.component(1, 1);
  auto eval_pair = [&](const GradedElement& a, const GradedElement& b) {
    GradedElement acc = GradedElement::zero(s, Ambient::K);
    if (pairing == nullptr) return acc;
    GradedElement k1 = GradedElement::one(s, Ambient::K);
    for (const auto& piece : pairing->pieces)
      if (piece.key.empty() && piece.hpow == 0) acc += piece.op.eval({a, k1, b});
    return acc;
  };
  auto scalar_of = [&](const GradedElement& g) {
    Rat v(0);
    for (const auto& [m, c] : g.terms()) {
      if (m.poly_degree() != 0 || !m.odds.empty())
        throw std::logic_error("pairing left the scalars");
      v = c;
    }
    return v;
  };

  // generator pairing matrix and the vanishing of higher-weight values
  SparseRatMatrix gen;
  gen.rows = d;
  gen.cols = d;
  bool match = true;
  for (int i = 0; i < d; ++i) {
    GradedElement xi = GradedElement::odd_gen(s, Ambient::A, i);
    for (const auto& mono : monomial_basis(s, Ambient::B, w_max)) {
      if (mono.poly_degree() == 0) continue;
      GradedElement xb = GradedElement::from_monomial(s, Ambient::B, mono, Rat(1));
      Rat v = scalar_of(eval_pair(xi, xb));
      if (mono.poly_degree() == 1) {
        int j = 0;
        for (std::size_t t = 0; t < mono.evens.size(); ++t)
          if (mono.evens[t] == 1) j = static_cast<int>(t);
        gen.set(i, j, v);
        if (v != ((i == j) ? Rat(1) : Rat(0))) match = false;
      } else if (v != 0) {
        match = false;
      }
    }
  }
  // weight >= 2 classes on the exterior side pair to zero as well
  for (const auto& mono : monomial_basis(s, Ambient::A, 0)) {
    if (mono.odd_count() < 2 || mono.odd_count() > w_max) continue;
    GradedElement xs = GradedElement::from_monomial(s, Ambient::A, mono, Rat(1));
    for (int j = 0; j < d; ++j) {
      GradedElement xj = GradedElement::coord(s, Ambient::B, j);
      if (scalar_of(eval_pair(xs, xj)) != 0) match = false;
    }
  }
  const long grank = gen.rank();

  const Ambient bar_side = (side == KellerSide::LeftAction) ? Ambient::B : Ambient::A;
  BarComplex bar(s, bar_side, p_max, w_max);
  auto ranks = cohomology_ranks(bar.blocks(), -p_max, 0);

  KellerReport rep;
  rep.generators_match = match;
  rep.generator_rank = grank;
  for (const auto& r : ranks) {
    KellerEntry e;
    e.p = -r.degree;
    e.q = -r.internal;
    e.dim_target = r.betti;
    e.reliable = r.reliable;
    if (e.q == -e.p) {
      e.dim_source = (side == KellerSide::LeftAction) ? detail::binom(d, e.p)
                                                      : detail::binom(d + e.p - 1, e.p);
      e.map_rank = (side == KellerSide::LeftAction) ? detail::binom(grank, e.p)
                                                    : detail::binom(grank + e.p - 1, e.p);
      if (e.p == 0) e.map_rank = 1;
    }
    e.iso = (e.dim_source == e.dim_target) && (e.map_rank == e.dim_target);
    rep.entries.push_back(e);
  }
  std::sort(rep.entries.begin(), rep.entries.end(), [](const KellerEntry& a, const KellerEntry& b) {
    return std::tie(a.p, a.q) < std::tie(b.p, b.q);
  });
  return rep;
}

}  // namespace bimod
