#pragma once

#include "bimod/element.hpp"
#include "bimod/schouten.hpp"
#include "bimod/sign_util.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace bimod {

struct Shape {
  Ambient out = Ambient::Tpoly;
  std::vector<Ambient> slots;

  int arity() const { return static_cast<int>(slots.size()); }
  bool operator==(const Shape& o) const { return out == o.out && slots == o.slots; }
};

inline Shape algebra_shape(Ambient a, int k) {
  Shape s;
  s.out = a;
  s.slots.assign(static_cast<std::size_t>(k), a);
  return s;
}

// A^{⊗m} ⊗ K ⊗ B^{⊗n} → K, the bimodule component shape.
inline Shape bimodule_shape(int m, int n) {
  Shape s;
  s.out = Ambient::K;
  for (int i = 0; i < m; ++i) s.slots.push_back(Ambient::A);
  s.slots.push_back(Ambient::K);
  for (int i = 0; i < n; ++i) s.slots.push_back(Ambient::B);
  return s;
}

// Multilinear map between tensor words of graded elements, stored with its
// internal degree on unsuspended arguments.  Extensional data only: two
// operators are the same iff they agree on a spanning set of monomial tuples.
struct MultilinearOperator {
  Splitting split;
  Shape shape;
  int degree = 0;
  std::function<GradedElement(const std::vector<GradedElement>&)> fn;

  int arity() const { return shape.arity(); }

  GradedElement eval(const std::vector<GradedElement>& args) const {
    if (static_cast<int>(args.size()) != arity())
      throw std::domain_error("operator arity mismatch");
    for (std::size_t i = 0; i < args.size(); ++i)
      if (args[i].ambient() != shape.slots[i] || !(args[i].splitting() == split))
        throw std::domain_error("operator slot ambient mismatch");
    return fn(args);
  }

  static MultilinearOperator zero(Splitting s, Shape sh, int deg) {
    MultilinearOperator op;
    op.split = s;
    op.shape = sh;
    op.degree = deg;
    Ambient out = sh.out;
    op.fn = [s, out](const std::vector<GradedElement>&) { return GradedElement::zero(s, out); };
    return op;
  }

  static MultilinearOperator identity(Splitting s, Ambient a) {
    MultilinearOperator op;
    op.split = s;
    op.shape = Shape{a, {a}};
    op.degree = 0;
    op.fn = [](const std::vector<GradedElement>& v) { return v[0]; };
    return op;
  }
};

// Suspended (shifted) degree of an operator: internal degree + arity - 1.
inline int shifted_degree(const MultilinearOperator& op) { return op.degree + op.arity() - 1; }

// Partial composition outer ∘_pos inner with the shifted-convention sign:
// a combinatorial part from commuting the desuspension factors and a Koszul
// part from carrying inner past the arguments left of the insertion slot.
inline MultilinearOperator insert_operator(const MultilinearOperator& outer,
                                           const MultilinearOperator& inner, int pos) {
  if (!(outer.split == inner.split)) throw std::domain_error("splitting mismatch");
  if (pos < 0 || pos >= outer.arity()) throw std::domain_error("insertion slot out of range");
  if (outer.shape.slots[static_cast<std::size_t>(pos)] != inner.shape.out)
    throw std::domain_error("insertion ambient mismatch");

  MultilinearOperator op;
  op.split = outer.split;
  op.shape.out = outer.shape.out;
  op.shape.slots.assign(outer.shape.slots.begin(), outer.shape.slots.begin() + pos);
  op.shape.slots.insert(op.shape.slots.end(), inner.shape.slots.begin(), inner.shape.slots.end());
  op.shape.slots.insert(op.shape.slots.end(), outer.shape.slots.begin() + pos + 1,
                        outer.shape.slots.end());
  op.degree = outer.degree + inner.degree;

  int comb = shifted_degree(inner) * (outer.arity() - 1) + pos * (inner.arity() - 1);
  int comb_sign = parity_sign(comb);
  int inner_deg = inner.degree;
  int inner_ar = inner.arity();
  op.fn = [outer, inner, pos, comb_sign, inner_deg, inner_ar](
              const std::vector<GradedElement>& args) {
    GradedElement acc = GradedElement::zero(outer.split, outer.shape.out);
    std::vector<GradedElement> mid_args(args.begin() + pos, args.begin() + pos + inner_ar);
    GradedElement mid = inner.eval(mid_args);
    if (mid.is_zero()) return acc;

    std::vector<GradedElement> outer_args;
    outer_args.reserve(args.size() - static_cast<std::size_t>(inner_ar) + 1);

    if (inner_deg % 2 == 0) {
      for (int i = 0; i < pos; ++i) outer_args.push_back(args[static_cast<std::size_t>(i)]);
      outer_args.push_back(mid);
      for (std::size_t i = static_cast<std::size_t>(pos + inner_ar); i < args.size(); ++i)
        outer_args.push_back(args[i]);
      acc += outer.eval(outer_args) * Rat(comb_sign);
      return acc;
    }

    // Odd inner operator: pick up the parity of everything it moves past.
    // Split the prefix into wedge-homogeneous layers so the parity is defined.
    std::vector<std::vector<GradedElement>> prefix_parts;
    for (int i = 0; i < pos; ++i)
      prefix_parts.push_back(odd_components(args[static_cast<std::size_t>(i)]));
    std::vector<std::size_t> idx(static_cast<std::size_t>(pos), 0);
    bool done = false;
    if (pos == 0) {
      outer_args.push_back(mid);
      for (std::size_t i = static_cast<std::size_t>(inner_ar); i < args.size(); ++i)
        outer_args.push_back(args[i]);
      acc += outer.eval(outer_args) * Rat(comb_sign);
      return acc;
    }
    while (!done) {
      outer_args.clear();
      int parity = 0;
      bool skip = false;
      for (int i = 0; i < pos; ++i) {
        const auto& part = prefix_parts[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
        if (part.is_zero()) skip = true;
        parity += part.wedge_degree();
        outer_args.push_back(part);
      }
      if (!skip) {
        outer_args.push_back(mid);
        for (std::size_t i = static_cast<std::size_t>(pos + inner_ar); i < args.size(); ++i)
          outer_args.push_back(args[i]);
        acc += outer.eval(outer_args) * Rat(comb_sign * parity_sign(parity));
      }
      // advance the multi-index
      int c = pos - 1;
      while (c >= 0) {
        if (++idx[static_cast<std::size_t>(c)] < prefix_parts[static_cast<std::size_t>(c)].size())
          break;
        idx[static_cast<std::size_t>(c)] = 0;
        --c;
      }
      if (c < 0) done = true;
    }
    return acc;
  };
  return op;
}

// Monomial tuples spanning the operator domain, bounded by total degree
// (polynomial degree plus wedge count summed over the slots).
inline void for_each_basis_tuple(
    const Splitting& s, const std::vector<Ambient>& slots, int total_bound,
    const std::function<void(const std::vector<GradedElement>&)>& visit) {
  std::vector<std::vector<Monomial>> bases;
  for (Ambient a : slots) bases.push_back(monomial_basis(s, a, total_bound));

  std::vector<GradedElement> tuple;
  tuple.reserve(slots.size());
  auto rec = [&](auto&& self, std::size_t i, int left) -> void {
    if (i == slots.size()) {
      visit(tuple);
      return;
    }
    for (const auto& m : bases[i]) {
      int w = m.poly_degree() + m.odd_count();
      if (w > left) continue;
      tuple.push_back(GradedElement::from_monomial(s, slots[i], m, 1));
      self(self, i + 1, left - w);
      tuple.pop_back();
    }
  };
  rec(rec, 0, total_bound);
}

inline bool operators_equal(const MultilinearOperator& a, const MultilinearOperator& b,
                            int total_bound) {
  if (!(a.split == b.split) || !(a.shape == b.shape)) return false;
  bool same = true;
  for_each_basis_tuple(a.split, a.shape.slots, total_bound,
                       [&](const std::vector<GradedElement>& args) {
                         if (!same) return;
                         if (!(a.eval(args) == b.eval(args))) same = false;
                       });
  return same;
}

}  // namespace bimod
