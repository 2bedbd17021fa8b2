#pragma once

#include "bimod/operator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace bimod {

struct TableWeight {
  double value = 0;
  double err = 0;
};

using WeightTable = std::map<std::string, TableWeight>;

// One summand of a Taylor component.  Exact pieces have an empty key; keyed
// pieces are scaled by the weight-table entry at evaluation time so that a
// single quadrature estimate can be bumped everywhere it occurs at once.
struct PieceOp {
  std::string key;
  int hpow = 0;
  MultilinearOperator op;
};

struct TaylorComponent {
  int degree = 0;
  std::vector<PieceOp> pieces;
};

class TaylorStructure {
 public:
  enum class Kind { Algebra, Bimodule, Morphism };

  TaylorStructure() = default;
  TaylorStructure(Splitting s, Kind k, Ambient amb) : split_(s), kind_(k), amb_(amb) {}

  const Splitting& splitting() const { return split_; }
  Kind kind() const { return kind_; }
  Ambient ambient() const { return amb_; }

  Shape shape_of(int m, int n) const {
    return kind_ == Kind::Bimodule ? bimodule_shape(m, n) : algebra_shape(amb_, m);
  }

  bool has(int m, int n = 0) const { return comps_.count({m, n}) > 0; }

  const TaylorComponent* component(int m, int n = 0) const {
    auto it = comps_.find({m, n});
    return it == comps_.end() ? nullptr : &it->second;
  }

  void set_exact(int m, int n, MultilinearOperator op) {
    TaylorComponent c;
    c.degree = op.degree;
    c.pieces.push_back(PieceOp{"", 0, std::move(op)});
    comps_[{m, n}] = std::move(c);
  }

  void add_piece(int m, int n, PieceOp piece) {
    auto& c = comps_[{m, n}];
    c.degree = piece.op.degree;
    c.pieces.push_back(std::move(piece));
  }

  const std::map<std::pair<int, int>, TaylorComponent>& components() const { return comps_; }

  WeightTable& weights() { return weights_; }
  const WeightTable& weights() const { return weights_; }

  // d⁰ applied to 1: the curvature component, zero when absent.
  GradedElement curvature_element() const {
    auto it = comps_.find({0, 0});
    if (it == comps_.end()) return GradedElement::zero(split_, amb_);
    GradedElement acc = GradedElement::zero(split_, amb_);
    for (const auto& p : it->second.pieces)
      if (p.key.empty() && p.hpow == 0) acc += p.op.eval({});
    return acc;
  }

 private:
  Splitting split_;
  Kind kind_ = Kind::Algebra;
  Ambient amb_ = Ambient::A;
  std::map<std::pair<int, int>, TaylorComponent> comps_;
  WeightTable weights_;
};

// One composed summand of a quadratic relation: the partial composition of
// two pieces, remembering which weight keys scale it.
struct ComposedTerm {
  std::vector<std::string> keys;
  int hpow = 0;
  MultilinearOperator op;
};

inline void compose_pieces(std::vector<ComposedTerm>& out, const TaylorComponent& outer,
                           const TaylorComponent& inner, int pos) {
  for (const auto& po : outer.pieces) {
    for (const auto& pi : inner.pieces) {
      ComposedTerm t;
      if (!po.key.empty()) t.keys.push_back(po.key);
      if (!pi.key.empty()) t.keys.push_back(pi.key);
      std::sort(t.keys.begin(), t.keys.end());
      t.hpow = po.hpow + pi.hpow;
      t.op = insert_operator(po.op, pi.op, pos);
      out.push_back(std::move(t));
    }
  }
}

// All composed summands of the arity-k quadratic relation of an algebra
// structure: outer arity k-i+1, inner arity i, every insertion slot.
inline std::vector<ComposedTerm> algebra_relation_terms(const TaylorStructure& d, int k) {
  std::vector<ComposedTerm> out;
  for (int i = 0; i <= k + 1; ++i) {
    const TaylorComponent* inner = d.component(i);
    const TaylorComponent* outer = d.component(k - i + 1);
    if (!inner || !outer) continue;
    for (int pos = 0; pos <= k - i; ++pos) compose_pieces(out, *outer, *inner, pos);
  }
  return out;
}

// Composed summands of the (m,n) bimodule relation: algebra components act in
// their own slot ranges, bimodule components compose through the middle slot.
inline std::vector<ComposedTerm> bimodule_relation_terms(const TaylorStructure& dA,
                                                         const TaylorStructure& dB,
                                                         const TaylorStructure& dK, int m, int n) {
  std::vector<ComposedTerm> out;
  for (int i = 0; i <= m + 1; ++i) {
    const TaylorComponent* inner = dA.component(i);
    const TaylorComponent* outer = dK.component(m - i + 1, n);
    if (!inner || !outer) continue;
    for (int pos = 0; pos <= m - i; ++pos) compose_pieces(out, *outer, *inner, pos);
  }
  for (int i = 0; i <= n + 1; ++i) {
    const TaylorComponent* inner = dB.component(i);
    const TaylorComponent* outer = dK.component(m, n - i + 1);
    if (!inner || !outer) continue;
    for (int j = 0; j <= n - i; ++j) compose_pieces(out, *outer, *inner, m + 1 + j);
  }
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= n; ++j) {
      const TaylorComponent* inner = dK.component(i, j);
      const TaylorComponent* outer = dK.component(m - i, n - j);
      if (!inner || !outer) continue;
      compose_pieces(out, *outer, *inner, m - i);
    }
  }
  return out;
}

struct RelationEntry {
  std::string relation;
  int m = 0;
  int n = 0;
  int hpow = 0;
  std::string mode;  // "exact" | "numeric"
  double residual = 0;
  double tolerance = 0;
  bool pass = true;
};

struct RelationReport {
  std::vector<RelationEntry> entries;

  bool all_pass() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }

  double worst_residual() const {
    double w = 0;
    for (const auto& e : entries) w = std::max(w, e.residual);
    return w;
  }
};

// Evaluates a composed-term family on every monomial tuple within the
// truncation and reduces it to per-h-power entries.  Exact h-powers (all
// contributing pieces unkeyed) demand literal zero; keyed powers compare the
// central value against the spread obtained by bumping each weight by its
// standard error.
inline std::vector<RelationEntry> reduce_relation(
    const std::vector<ComposedTerm>& terms, const WeightTable& weights, const Splitting& split,
    const std::vector<Ambient>& slots, int truncation, const std::string& name, int m, int n,
    double nsigma, double floor_tol) {
  std::vector<RelationEntry> entries;
  if (terms.empty()) return entries;

  std::map<int, bool> hpow_exact;
  std::map<int, std::vector<const ComposedTerm*>> by_hpow;
  for (const auto& t : terms) {
    by_hpow[t.hpow].push_back(&t);
    auto it = hpow_exact.find(t.hpow);
    bool exact = t.keys.empty();
    if (it == hpow_exact.end())
      hpow_exact[t.hpow] = exact;
    else
      it->second = it->second && exact;
  }

  struct Acc {
    double worst = 0;
    double tol_at_worst = 0;
    bool pass = true;
  };
  std::map<int, Acc> acc;

  for_each_basis_tuple(split, slots, truncation, [&](const std::vector<GradedElement>& args) {
    for (const auto& [hp, group] : by_hpow) {
      bool exact = hpow_exact[hp];
      if (exact) {
        GradedElement sum = GradedElement::zero(split, group.front()->op.shape.out);
        for (const ComposedTerm* t : group) sum += t->op.eval(args);
        auto& a = acc[hp];
        if (!sum.is_zero()) {
          a.pass = false;
          double r = sup_norm(to_numeric(sum));
          if (r > a.worst) {
            a.worst = r;
            a.tol_at_worst = 0;
          }
        }
        continue;
      }

      // numeric path: central value and one re-evaluation per distinct key
      std::vector<std::pair<const ComposedTerm*, GradedElement>> vals;
      std::vector<std::string> keys;
      for (const ComposedTerm* t : group) {
        vals.emplace_back(t, t->op.eval(args));
        for (const auto& k : t->keys) keys.push_back(k);
      }
      std::sort(keys.begin(), keys.end());
      keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

      auto weigh = [&](const ComposedTerm* t, const std::string& bumped) {
        double w = 1;
        for (const auto& k : t->keys) {
          auto it = weights.find(k);
          double v = it == weights.end() ? 0.0 : it->second.value;
          if (k == bumped && it != weights.end()) v += it->second.err;
          w *= v;
        }
        return w;
      };

      NumElement central(split, group.front()->op.shape.out);
      for (auto& [t, g] : vals) {
        NumElement ng = to_numeric(g);
        ng *= weigh(t, "");
        central += ng;
      }
      std::map<Monomial, double> var;
      for (const auto& k : keys) {
        NumElement bumped(split, group.front()->op.shape.out);
        for (auto& [t, g] : vals) {
          NumElement ng = to_numeric(g);
          ng *= weigh(t, k);
          bumped += ng;
        }
        bumped -= central;
        for (const auto& [mon, c] : bumped.terms()) var[mon] += c * c;
      }

      auto& a = acc[hp];
      for (const auto& [mon, c] : central.terms()) {
        double sigma = std::sqrt(var.count(mon) ? var[mon] : 0.0);
        double tol = std::max(nsigma * sigma, floor_tol);
        double r = std::abs(c);
        if (r > a.worst) {
          a.worst = r;
          a.tol_at_worst = tol;
        }
        if (r > tol) a.pass = false;
      }
    }
  });

  for (const auto& [hp, a] : acc) {
    RelationEntry e;
    e.relation = name;
    e.m = m;
    e.n = n;
    e.hpow = hp;
    e.mode = hpow_exact[hp] ? "exact" : "numeric";
    e.residual = a.worst;
    e.tolerance = a.tol_at_worst;
    e.pass = a.pass;
    entries.push_back(e);
  }
  return entries;
}

inline RelationReport check_algebra_relations(const TaylorStructure& d, int max_arity,
                                              int truncation, double nsigma = 3,
                                              double floor_tol = 1e-9) {
  RelationReport report;
  for (int k = 0; k <= max_arity; ++k) {
    auto terms = algebra_relation_terms(d, k);
    Shape sh = d.shape_of(k, 0);
    auto entries = reduce_relation(terms, d.weights(), d.splitting(), sh.slots, truncation,
                                   "algebra", k, 0, nsigma, floor_tol);
    report.entries.insert(report.entries.end(), entries.begin(), entries.end());
  }
  return report;
}

inline RelationReport check_bimodule_relations(const TaylorStructure& dA, const TaylorStructure& dB,
                                               const TaylorStructure& dK, int max_m, int max_n,
                                               int truncation, double nsigma = 3,
                                               double floor_tol = 1e-9) {
  RelationReport report;
  WeightTable merged = dK.weights();
  merged.insert(dA.weights().begin(), dA.weights().end());
  merged.insert(dB.weights().begin(), dB.weights().end());
  for (int m = 0; m <= max_m; ++m) {
    for (int n = 0; n <= max_n; ++n) {
      auto terms = bimodule_relation_terms(dA, dB, dK, m, n);
      Shape sh = bimodule_shape(m, n);
      auto entries = reduce_relation(terms, merged, dK.splitting(), sh.slots, truncation,
                                     "bimodule", m, n, nsigma, floor_tol);
      report.entries.insert(report.entries.end(), entries.begin(), entries.end());
    }
  }
  return report;
}

inline GradedElement curvature(const TaylorStructure& d) { return d.curvature_element(); }

}  // namespace bimod
