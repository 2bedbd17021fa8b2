#pragma once

#include "bimod/taylor.hpp"
#include "bimod/tensorword.hpp"

#include <stdexcept>

namespace bimod {

inline MultilinearOperator graded_product(const Splitting& s, Ambient a) {
  MultilinearOperator op;
  op.split = s;
  op.shape = algebra_shape(a, 2);
  op.degree = 0;
  op.fn = [](const std::vector<GradedElement>& v) { return multiply(v[0], v[1]); };
  return op;
}

// (a|k) -> (a·k)|_K, the action of A on K by multiplication in T_poly.
inline MultilinearOperator module_product_left(const Splitting& s) {
  MultilinearOperator op;
  op.split = s;
  op.shape = bimodule_shape(1, 0);
  op.degree = 0;
  op.fn = [](const std::vector<GradedElement>& v) {
    return multiply(v[0].view_as(Ambient::Tpoly), v[1].view_as(Ambient::Tpoly))
        .restrict_to(Ambient::K);
  };
  return op;
}

inline MultilinearOperator module_product_right(const Splitting& s) {
  MultilinearOperator op;
  op.split = s;
  op.shape = bimodule_shape(0, 1);
  op.degree = 0;
  op.fn = [](const std::vector<GradedElement>& v) {
    return multiply(v[0].view_as(Ambient::Tpoly), v[1].view_as(Ambient::Tpoly))
        .restrict_to(Ambient::K);
  };
  return op;
}

inline TaylorStructure undeformed_algebra(const Splitting& s, Ambient a) {
  TaylorStructure d(s, TaylorStructure::Kind::Algebra, a);
  d.set_exact(2, 0, graded_product(s, a));
  return d;
}

// (m,1) component of the brane bimodule over the pair U={0}, V=X: one
// contraction edge from every left slot into the single right slot, scaled
// by the relation-forced coefficient.
inline MultilinearOperator brane_tower_component(const Splitting& s, int m, const Rat& w) {
  MultilinearOperator op;
  op.split = s;
  op.shape = bimodule_shape(m, 1);
  op.degree = -m;
  auto cls = s.block_indices(Block::VOnly);
  op.fn = [s, m, cls, w](const std::vector<GradedElement>& v) {
    TensorSum cur = expand_word(v);
    for (int i = 0; i < m && !cur.empty(); ++i) cur = apply_edge(cur, cls, i, m + 1);
    return contract_sum(cur, s, Ambient::K) * w;
  };
  return op;
}

// The A∞-bimodule of the brane pair U={0}, V=X: module products plus the
// contraction tower d^{m,1}.  All other components vanish by degree.
inline TaylorStructure brane_bimodule(const Splitting& s, int max_m = 4) {
  if (s.d_uv != 0 || s.d_uvperp != 0 || s.d_perp != 0)
    throw std::domain_error("brane bimodule needs the pair U={0}, V=X");
  TaylorStructure d(s, TaylorStructure::Kind::Bimodule, Ambient::K);
  d.set_exact(1, 0, module_product_left(s));
  d.set_exact(0, 1, module_product_right(s));
  for (int m = 1; m <= max_m; ++m)
    d.set_exact(m, 1, brane_tower_component(s, m, Rat(1) / factorial(m)));
  return d;
}

}  // namespace bimod
