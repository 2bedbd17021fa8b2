#pragma once

// Deformation along a formal bivector series: exact Maurer-Cartan checks,
// weighted-graph corrections to the products and to the two-sided module
// differential, the curvature series of the deformed exterior algebra, and
// a perturbative report on the deformed duality.  Corrections enter as
// keyed pieces whose quadrature estimates live in the structure's weight
// table, so exact substitutes can replace sampling wholesale.

#include "bimod/element.hpp"
#include "bimod/graphs.hpp"
#include "bimod/koszul.hpp"
#include "bimod/mcweight.hpp"
#include "bimod/operator.hpp"
#include "bimod/schouten.hpp"
#include "bimod/structures.hpp"
#include "bimod/taylor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bimod {

// Polyvector coefficients of a series in the formal parameter, truncated at
// a stated order.  Index = parameter power; arithmetic downstream drops
// anything beyond the order.
struct FormalSeries {
  Splitting split;
  Ambient amb = Ambient::Tpoly;
  int order = 0;
  std::vector<GradedElement> coeff;

  static FormalSeries zero(const Splitting& s, Ambient a, int order) {
    if (order < 0) throw std::invalid_argument("series order must be nonnegative");
    FormalSeries f;
    f.split = s;
    f.amb = a;
    f.order = order;
    f.coeff.assign(static_cast<std::size_t>(order) + 1, GradedElement::zero(s, a));
    return f;
  }

  const GradedElement& at(int k) const {
    if (k < 0 || k > order) throw std::out_of_range("series coefficient index");
    return coeff[static_cast<std::size_t>(k)];
  }
};

// The series with the given bivector as its first-order coefficient.
inline FormalSeries bivector_series(const GradedElement& pi1, int order = 2) {
  FormalSeries f = FormalSeries::zero(pi1.splitting(), pi1.ambient(), order);
  if (order >= 1) f.coeff[1] = pi1;
  return f;
}

namespace detail {

inline void validate_bivectors(const FormalSeries& pi) {
  if (pi.amb != Ambient::Tpoly)
    throw std::domain_error("the deformation series holds polyvectors");
  if (!pi.at(0).is_zero())
    throw std::domain_error("the deformation series starts at first order");
  for (const auto& c : pi.coeff)
    for (const auto& [m, v] : c.terms())
      if (static_cast<int>(m.odds.size()) != 2)
        throw std::domain_error("the deformation series holds bivectors");
}

}  // namespace detail

// Order-by-order self-bracket of the series; every power must vanish
// exactly for the deformation machinery to apply.
inline RelationReport check_maurer_cartan(const FormalSeries& pi, int order) {
  detail::validate_bivectors(pi);
  RelationReport rep;
  for (int k = 0; k <= 2 * order; ++k) {
    GradedElement sum = GradedElement::zero(pi.split, Ambient::Tpoly);
    for (int i = 0; i <= std::min(k, pi.order); ++i) {
      const int j = k - i;
      if (j > pi.order) continue;
      sum += schouten_bracket(pi.at(i), pi.at(j));
    }
    RelationEntry e;
    e.relation = "maurer-cartan";
    e.m = 0;
    e.n = 0;
    e.hpow = k;
    e.mode = "exact";
    e.residual = sup_norm(to_numeric(sum));
    e.tolerance = 0;
    e.pass = sum.is_zero();
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

// Sampling and substitution policy for graph weights.  An injected table
// wins over everything; with sampling disabled, only stored or
// dimension-degenerate weights are available.
struct McOptions {
  long samples = 200000;
  std::uint64_t seed = 1;
  int workers = 1;
  WeightCache* cache = nullptr;
  const WeightTable* injected = nullptr;
  bool allow_mc = true;
};

// A Taylor structure whose corrections carry parameter powers; the
// zero-power pieces are exactly the undeformed structure, so evaluating
// at parameter zero recovers it without roundoff.
struct DeformedStructure {
  TaylorStructure structure;
  int order = 0;

  DeformedStructure()
      : structure(Splitting{0, 0, 0, 0}, TaylorStructure::Kind::Algebra, Ambient::A) {}
};

namespace detail {

// The single propagator color an edge keeps once empty index classes are
// dropped.  nullopt when every class of some edge is empty, which makes
// the whole operator zero.  Mixed survivors have no single weight and are
// rejected.
inline std::optional<std::vector<PropagatorKind>> homogeneous_kinds(
    const CompiledOperator& c, const Splitting& s) {
  std::vector<PropagatorKind> kinds;
  for (const auto& asg : c.assignments) {
    std::optional<PropagatorKind> pick;
    for (const auto& [block, kind] : asg.colors) {
      if (s.block_indices(block).empty()) continue;
      if (pick && *pick != kind)
        throw std::domain_error(
            "edge colors are inhomogeneous over this splitting; no single weight applies");
      pick = kind;
    }
    if (!pick) return std::nullopt;
    kinds.push_back(*pick);
  }
  return kinds;
}

inline std::string piece_key(const AdmissibleGraph& g,
                             const std::vector<PropagatorKind>& kinds) {
  return canonical_encode(g) + " | " + kinds_token(kinds);
}

inline TableWeight resolve_weight(const AdmissibleGraph& g, const Splitting& s,
                                  const std::vector<PropagatorKind>& kinds,
                                  const std::string& key, const McOptions& mc) {
  if (mc.injected) {
    auto it = mc.injected->find(key);
    if (it != mc.injected->end()) return it->second;
  }
  WeightOptions opt;
  opt.workers = mc.workers;
  opt.kinds = kinds;
  const int dim = 2 * g.n + g.m - 2;
  const bool degenerate = dim <= 0 || static_cast<int>(g.edges.size()) != dim;
  if (!mc.allow_mc && !degenerate) {
    if (mc.cache) {
      auto hit = mc.cache->find(canonical_encode(g), s, mc.samples, mc.seed,
                                kinds_token(kinds));
      if (hit) return {hit->value, hit->std_err};
    }
    throw std::runtime_error("no stored weight for " + key +
                             " and sampling is disabled");
  }
  WeightEstimate est = mc.cache
                           ? cached_weight(*mc.cache, g, s, mc.samples, mc.seed, opt)
                           : mc_weight(g, s, mc.samples, mc.seed, opt);
  return {est.value, est.std_err};
}

// Evaluation-complete zero test.  The operator differentiates each slot at
// most once per incoming edge and contracts at most the available odd
// directions, so vanishing on the bounded basis grid is vanishing.
inline bool operator_vanishes(const MultilinearOperator& op, int budget) {
  bool nonzero = false;
  for_each_basis_tuple(op.split, op.shape.slots, budget,
                       [&](const std::vector<GradedElement>& args) {
                         if (nonzero) return;
                         if (!op.eval(args).is_zero()) nonzero = true;
                       });
  return !nonzero;
}

// Graph operator with the aerial slots filled by bivector coefficients and
// the combinatorial prefactor folded in.
inline MultilinearOperator bind_bivectors(const CompiledOperator& c,
                                          std::vector<GradedElement> pis,
                                          const Shape& shape) {
  MultilinearOperator op;
  op.split = c.op.split;
  op.shape = shape;
  op.degree = c.op.degree + 2 * static_cast<int>(pis.size());
  op.fn = [inner = c.op, pref = c.prefactor,
           filled = std::move(pis)](const std::vector<GradedElement>& args) {
    std::vector<GradedElement> full = filled;
    full.insert(full.end(), args.begin(), args.end());
    return inner.eval(full) * pref;
  };
  return op;
}

// Ordered assignments of series coefficients to l aerial slots, one entry
// per total parameter power <= order.  Zero coefficients are skipped.
inline std::vector<std::pair<int, std::vector<GradedElement>>> power_tuples(
    const FormalSeries& pi, int l, int order) {
  std::vector<std::pair<int, std::vector<GradedElement>>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int used) -> void {
    if (static_cast<int>(cur.size()) == l) {
      std::vector<GradedElement> pis;
      pis.reserve(cur.size());
      for (int c : cur) pis.push_back(pi.at(c));
      out.emplace_back(used, std::move(pis));
      return;
    }
    for (int c = 1; used + c <= order && c <= pi.order; ++c) {
      if (pi.at(c).is_zero()) continue;
      cur.push_back(c);
      self(self, used + c);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

inline void require_order_cap(int order) {
  if (order < 0 || order > 2)
    throw std::invalid_argument("parameter order beyond the supported cap");
}

// Splitting-aware pruning happens inside compile; a pruned graph is a zero
// contribution, not an error.
inline std::optional<CompiledOperator> try_compile(const AdmissibleGraph& g,
                                                   const Splitting& s,
                                                   GraphTarget target) {
  try {
    return compile(g, s, target);
  } catch (const std::domain_error&) {
    return std::nullopt;
  }
}

}  // namespace detail

// Deformed product on the chosen side.  The undeformed multiplication is
// the exact piece; each admissible two-leg graph contributes one keyed
// piece per surviving power assignment.
inline DeformedStructure star_product(const FormalSeries& pi, GraphTarget target,
                                      int order, const McOptions& mc = {}) {
  if (target == GraphTarget::K)
    throw std::invalid_argument("the deformed product lives on the algebra sides");
  detail::require_order_cap(order);
  if (!check_maurer_cartan(pi, order).all_pass())
    throw std::domain_error("the bivector series fails the Maurer-Cartan equation");

  const Splitting& s = pi.split;
  const Ambient amb = target == GraphTarget::A ? Ambient::A : Ambient::B;
  DeformedStructure out;
  out.structure = undeformed_algebra(s, amb);
  out.order = order;

  for (int l = 1; l <= order; ++l) {
    auto tuples = detail::power_tuples(pi, l, order);
    if (tuples.empty()) continue;
    for (const auto& g : enumerate_formality_graphs(l, 2, target)) {
      auto compiled = detail::try_compile(g, s, target);
      if (!compiled) continue;
      const CompiledOperator& c = *compiled;
      auto kinds = detail::homogeneous_kinds(c, s);
      if (!kinds) continue;
      const int budget = static_cast<int>(g.edges.size()) + 2 * s.total();
      const std::string key = detail::piece_key(g, *kinds);
      bool used = false;
      for (const auto& [hpow, pis] : tuples) {
        MultilinearOperator op = detail::bind_bivectors(c, pis, algebra_shape(amb, 2));
        if (detail::operator_vanishes(op, budget)) continue;
        out.structure.add_piece(2, 0, PieceOp{key, hpow, std::move(op)});
        used = true;
      }
      if (used)
        out.structure.weights()[key] = detail::resolve_weight(g, s, *kinds, key, mc);
    }
  }
  return out;
}

// Deformed two-sided differential on the tower.  Components with m or n
// beyond the window are not computed.  The exact tower covers one right
// argument; undeformed components with more right arguments come from the
// crossing graphs and carry quadrature weights.  Components that vanish
// identically for degree reasons are still enumerated; a surviving piece
// there means a convention broke, so it throws rather than propagating
// bad structure.
inline DeformedStructure deformed_bimodule(const FormalSeries& pi, int order,
                                           const McOptions& mc = {}, int max_m = 2,
                                           int max_n = 2) {
  detail::require_order_cap(order);
  if (!check_maurer_cartan(pi, order).all_pass())
    throw std::domain_error("the bivector series fails the Maurer-Cartan equation");

  const Splitting& s = pi.split;
  DeformedStructure out;
  out.structure = brane_bimodule(s, std::max(max_m, 4));
  out.order = order;

  for (int m = 1; m <= max_m; ++m) {
    for (int n = 2; n <= max_n; ++n) {
      for (const auto& g : enumerate_bimodule_graphs(m, n)) {
        auto compiled = detail::try_compile(g, s, GraphTarget::K);
        if (!compiled) continue;
        const CompiledOperator& c = *compiled;
        auto kinds = detail::homogeneous_kinds(c, s);
        if (!kinds) continue;
        MultilinearOperator op = detail::bind_bivectors(c, {}, bimodule_shape(m, n));
        const int budget =
            static_cast<int>(g.edges.size()) + (s.d_upv + s.d_perp) * m;
        if (detail::operator_vanishes(op, budget)) continue;
        const std::string key = detail::piece_key(g, *kinds);
        out.structure.add_piece(m, n, PieceOp{key, 0, std::move(op)});
        out.structure.weights()[key] = detail::resolve_weight(g, s, *kinds, key, mc);
      }
    }
  }

  for (int l = 1; l <= order; ++l) {
    auto tuples = detail::power_tuples(pi, l, order);
    if (tuples.empty()) continue;
    for (int m = 0; m <= max_m; ++m) {
      for (int n = 0; n <= max_n; ++n) {
        const bool forbidden =
            (m == 0 && n == 0) || (m >= 2 && n == 0) || (m == 0 && n >= 2);
        for (const auto& g :
             enumerate_formality_graphs(l, m + 1 + n, GraphTarget::K, m)) {
          CompiledOperator c = compile(g, s, GraphTarget::K);
          auto kinds = detail::homogeneous_kinds(c, s);
          if (!kinds) continue;
          const int budget = static_cast<int>(g.edges.size()) +
                             (s.d_upv + s.d_perp) * m;
          const std::string key = detail::piece_key(g, *kinds);
          bool used = false;
          for (const auto& [hpow, pis] : tuples) {
            MultilinearOperator op =
                detail::bind_bivectors(c, pis, bimodule_shape(m, n));
            if (detail::operator_vanishes(op, budget)) continue;
            if (forbidden)
              throw std::logic_error("a vanishing tower component survived evaluation");
            out.structure.add_piece(m, n, PieceOp{key, hpow, std::move(op)});
            used = true;
          }
          if (used)
            out.structure.weights()[key] =
                detail::resolve_weight(g, s, *kinds, key, mc);
        }
      }
    }
  }
  return out;
}

// Numeric coefficient series: weights are quadrature estimates, so the
// coefficients are floating elements with a propagated spread per power.
struct CurvatureSeries {
  Splitting split;
  int order = 0;
  std::vector<NumElement> coeff;
  std::vector<double> err;

  double sup_at(int k) const { return sup_norm(coeff.at(static_cast<std::size_t>(k))); }
};

// Curvature of the deformed exterior side: the sum over no-leg graphs.
// Power assignments that die symbolically are dropped before any sampling,
// so an identically zero series comes back with zero spread.
inline CurvatureSeries curvature_series(const FormalSeries& pi, int order,
                                        const McOptions& mc = {}) {
  detail::require_order_cap(order);
  const Splitting& s = pi.split;
  if (s.d_uv != 0 || s.d_uvperp != 0 || s.d_perp != 0)
    throw std::domain_error("the curvature series needs the pair U={0}, V=X");
  detail::validate_bivectors(pi);

  CurvatureSeries out;
  out.split = s;
  out.order = order;
  out.coeff.assign(static_cast<std::size_t>(order) + 1, NumElement(s, Ambient::A));
  out.err.assign(static_cast<std::size_t>(order) + 1, 0.0);

  for (int l = 1; l <= order; ++l) {
    auto tuples = detail::power_tuples(pi, l, order);
    if (tuples.empty()) continue;
    for (const auto& g : enumerate_formality_graphs(l, 0, GraphTarget::A)) {
      CompiledOperator c = compile(g, s, GraphTarget::A);
      auto kinds = detail::homogeneous_kinds(c, s);
      if (!kinds) continue;
      std::vector<std::pair<int, GradedElement>> vals;
      for (const auto& [hpow, pis] : tuples) {
        GradedElement v = c.op.eval(pis) * c.prefactor;
        if (!v.is_zero()) vals.emplace_back(hpow, v);
      }
      if (vals.empty()) continue;
      const std::string key = detail::piece_key(g, *kinds);
      TableWeight w = detail::resolve_weight(g, s, *kinds, key, mc);
      for (auto& [hpow, v] : vals) {
        NumElement nv = to_numeric(v);
        NumElement scaled = nv;
        scaled *= w.value;
        out.coeff[static_cast<std::size_t>(hpow)] += scaled;
        nv *= w.err;
        out.err[static_cast<std::size_t>(hpow)] =
            std::hypot(out.err[static_cast<std::size_t>(hpow)], sup_norm(nv));
      }
    }
  }
  return out;
}

// Per-power numeric value of one component on fixed arguments.  The spread
// bumps each keyed piece by its weight's standard error independently.
struct ComponentValue {
  std::vector<NumElement> coeff;
  std::vector<double> err;
};

inline ComponentValue eval_component(const TaylorStructure& st, int m, int n,
                                     const std::vector<GradedElement>& args,
                                     int order) {
  const Shape sh = st.shape_of(m, n);
  ComponentValue out;
  out.coeff.assign(static_cast<std::size_t>(order) + 1,
                   NumElement(st.splitting(), sh.out));
  out.err.assign(static_cast<std::size_t>(order) + 1, 0.0);
  const TaylorComponent* comp = st.component(m, n);
  if (!comp) return out;
  for (const auto& p : comp->pieces) {
    if (p.hpow > order) continue;
    NumElement v = to_numeric(p.op.eval(args));
    if (p.key.empty()) {
      out.coeff[static_cast<std::size_t>(p.hpow)] += v;
      continue;
    }
    auto it = st.weights().find(p.key);
    const double wv = it == st.weights().end() ? 0.0 : it->second.value;
    const double we = it == st.weights().end() ? 0.0 : it->second.err;
    NumElement scaled = v;
    scaled *= wv;
    out.coeff[static_cast<std::size_t>(p.hpow)] += scaled;
    v *= we;
    out.err[static_cast<std::size_t>(p.hpow)] =
        std::hypot(out.err[static_cast<std::size_t>(p.hpow)], sup_norm(v));
  }
  return out;
}

namespace detail {

inline double constant_part(const NumElement& v) {
  double out = 0;
  for (const auto& [m, c] : v.terms()) {
    bool constant = m.odds.empty();
    for (int e : m.evens) constant = constant && e == 0;
    if (constant) out += c;
  }
  return out;
}

}  // namespace detail

// One probe of the deformed generator action: how far the corrected
// differential moves a normal generator against polynomial arguments.
struct ConcentrationEntry {
  int n = 0;
  int w = 0;
  double worst = 0;
  double tol = 0;
  bool pass = true;
};

struct DeformedKoszulReport {
  bool grading_exact = true;
  std::vector<ConcentrationEntry> concentration;
  KellerReport base_left;
  KellerReport base_right;
  std::vector<std::vector<double>> generator_correction;
  double generator_err = 0;
  bool iso = false;

  bool all_pass() const {
    if (!grading_exact || !iso) return false;
    for (const auto& e : concentration)
      if (!e.pass) return false;
    return true;
  }
};

// Perturbative duality report for a quadratic bivector on the absolute
// pair: per-piece grading preservation, concentration of the deformed
// generator action in symmetric degree one, the undeformed duality window
// on both sides, and the first-order correction to the generator pairing.
// The corrected pairing matrix is identity plus order-one times a finite
// matrix, hence invertible over the truncated parameter ring, so the
// window stays an isomorphism whenever the undeformed one is.
inline DeformedKoszulReport check_deformed_koszul(const FormalSeries& pi, int order,
                                                  int truncation,
                                                  const McOptions& mc = {}) {
  const Splitting& s = pi.split;
  if (s.d_uv != 0 || s.d_uvperp != 0 || s.d_perp != 0)
    throw std::domain_error("the deformed duality check needs the pair U={0}, V=X");
  detail::validate_bivectors(pi);
  for (const auto& c : pi.coeff)
    for (const auto& [m, v] : c.terms()) {
      int deg = 0;
      for (int e : m.evens) deg += e;
      if (deg != 2)
        throw std::domain_error("the deformed duality check needs a quadratic bivector");
    }

  const int d = s.d_upv;
  DeformedKoszulReport rep;

  DeformedStructure sb = star_product(pi, GraphTarget::B, order, mc);
  DeformedStructure sa = star_product(pi, GraphTarget::A, order, mc);
  DeformedStructure dk = deformed_bimodule(pi, order, mc);

  // (a) every correction piece preserves the natural grading of its side
  auto grading_ok = [&](const TaylorStructure& st, bool poly_side) {
    const TaylorComponent* comp = st.component(2, 0);
    if (!comp) return true;
    bool ok = true;
    for (const auto& p : comp->pieces) {
      if (p.hpow == 0) continue;
      for_each_basis_tuple(
          s, st.shape_of(2, 0).slots, truncation,
          [&](const std::vector<GradedElement>& args) {
            if (!ok) return;
            int din = 0;
            for (const auto& a : args)
              for (const auto& [mo, cf] : a.terms()) {
                if (poly_side)
                  for (int e : mo.evens) din += e;
                else
                  din += static_cast<int>(mo.odds.size());
              }
            GradedElement v = p.op.eval(args);
            for (const auto& [mo, cf] : v.terms()) {
              int dout = 0;
              if (poly_side)
                for (int e : mo.evens) dout += e;
              else
                dout = static_cast<int>(mo.odds.size());
              if (dout != din) ok = false;
            }
          });
    }
    return ok;
  };
  rep.grading_exact = grading_ok(sb.structure, true) && grading_ok(sa.structure, false);

  // (b) corrected action of a generator concentrates where the symmetric
  //     degree drops to zero: one right argument of degree one
  for (int n = 1; n <= 2; ++n) {
    std::vector<Ambient> bslots(static_cast<std::size_t>(n), Ambient::B);
    std::map<int, double> worst;
    std::map<int, double> spread;
    for_each_basis_tuple(
        s, bslots, truncation, [&](const std::vector<GradedElement>& bs) {
          int w = 0;
          for (const auto& b : bs)
            for (const auto& [mo, cf] : b.terms())
              for (int e : mo.evens) w += e;
          if (n == 1 && w == 1) return;
          for (int i = 0; i < d; ++i) {
            std::vector<GradedElement> args;
            args.push_back(GradedElement::odd_gen(s, Ambient::A, i));
            args.push_back(GradedElement::one(s, Ambient::K));
            for (const auto& b : bs) args.push_back(b);
            ComponentValue val = eval_component(dk.structure, 1, n, args, order);
            for (int h = 1; h <= order; ++h) {
              double& cur = worst[w];
              cur = std::max(cur, sup_norm(val.coeff[static_cast<std::size_t>(h)]));
              double& sp = spread[w];
              sp = std::max(sp, val.err[static_cast<std::size_t>(h)]);
            }
          }
        });
    for (const auto& [w, v] : worst) {
      ConcentrationEntry e;
      e.n = n;
      e.w = w;
      e.worst = v;
      e.tol = std::max(3 * spread[w], 1e-9);
      e.pass = v <= e.tol;
      rep.concentration.push_back(e);
    }
  }

  // (c) duality window at parameter zero, plus the first-order pairing shift
  rep.base_left = check_keller(dk.structure, KellerSide::LeftAction, 2);
  rep.base_right = check_keller(dk.structure, KellerSide::RightAction, 2);

  rep.generator_correction.assign(static_cast<std::size_t>(d),
                                  std::vector<double>(static_cast<std::size_t>(d), 0.0));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      std::vector<GradedElement> args = {GradedElement::odd_gen(s, Ambient::A, i),
                                         GradedElement::one(s, Ambient::K),
                                         GradedElement::coord(s, Ambient::B, j)};
      ComponentValue val = eval_component(dk.structure, 1, 1, args, order);
      if (order >= 1) {
        rep.generator_correction[static_cast<std::size_t>(i)]
                                [static_cast<std::size_t>(j)] =
            detail::constant_part(val.coeff[1]);
        rep.generator_err = std::max(rep.generator_err, val.err[1]);
      }
    }

  bool entries_ok = rep.base_left.generators_match && rep.base_right.generators_match;
  for (const auto& e : rep.base_left.entries) entries_ok = entries_ok && e.iso && e.reliable;
  for (const auto& e : rep.base_right.entries) entries_ok = entries_ok && e.iso && e.reliable;
  bool conc_ok = true;
  for (const auto& e : rep.concentration) conc_ok = conc_ok && e.pass;
  rep.iso = entries_ok && rep.grading_exact && conc_ok;
  return rep;
}

}  // namespace bimod
