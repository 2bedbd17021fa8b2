#pragma once

#include "bimod/element.hpp"
#include "bimod/schouten.hpp"
#include "bimod/sign_util.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace bimod {

// One summand of a tensor word; every slot is wedge-homogeneous so Koszul
// parities across slots are well defined.
struct TensorTerm {
  Rat coeff;
  std::vector<GradedElement> slots;
};

using TensorSum = std::vector<TensorTerm>;

inline TensorSum expand_word(const std::vector<GradedElement>& slots) {
  std::vector<std::vector<GradedElement>> parts;
  for (const auto& g : slots) parts.push_back(odd_components(g));
  TensorSum out;
  std::vector<std::size_t> idx(slots.size(), 0);
  if (slots.empty()) return out;
  bool done = false;
  while (!done) {
    TensorTerm t;
    t.coeff = 1;
    bool zero = false;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const auto& p = parts[i][idx[i]];
      if (p.is_zero()) zero = true;
      t.slots.push_back(p);
    }
    if (!zero) out.push_back(std::move(t));
    int c = static_cast<int>(slots.size()) - 1;
    while (c >= 0) {
      if (++idx[static_cast<std::size_t>(c)] < parts[static_cast<std::size_t>(c)].size()) break;
      idx[static_cast<std::size_t>(c)] = 0;
      --c;
    }
    if (c < 0) done = true;
  }
  return out;
}

// Contraction at the source slot, derivative at the target slot, summed over
// an index class.  The contraction is odd: it picks up the parity of every
// slot left of the source.
inline TensorSum apply_edge(const TensorSum& in, const std::vector<int>& index_class, int src,
                            int tgt) {
  TensorSum out;
  for (const auto& term : in) {
    int crossing = 0;
    for (int l = 0; l < src; ++l) crossing += term.slots[static_cast<std::size_t>(l)].wedge_degree();
    int sgn = parity_sign(crossing);
    for (int k : index_class) {
      auto at_src = term.slots[static_cast<std::size_t>(src)].contract(k);
      if (at_src.is_zero()) continue;
      auto at_tgt = term.slots[static_cast<std::size_t>(tgt)].derivative(k);
      if (at_tgt.is_zero()) continue;
      TensorTerm t;
      t.coeff = term.coeff * sgn;
      t.slots = term.slots;
      t.slots[static_cast<std::size_t>(src)] = std::move(at_src);
      t.slots[static_cast<std::size_t>(tgt)] = std::move(at_tgt);
      out.push_back(std::move(t));
    }
  }
  return out;
}

// Multiplies the word down to a single element of the target subalgebra.
inline GradedElement contract_word(const TensorTerm& term, Ambient out) {
  const Splitting& s = term.slots.front().splitting();
  GradedElement prod = GradedElement::one(s, Ambient::Tpoly);
  for (const auto& g : term.slots) prod = multiply(prod, g.view_as(Ambient::Tpoly));
  return prod.restrict_to(out) * term.coeff;
}

inline GradedElement contract_sum(const TensorSum& sum, const Splitting& s, Ambient out) {
  GradedElement acc = GradedElement::zero(s, out);
  for (const auto& t : sum) acc += contract_word(t, out);
  return acc;
}

struct TensorOperator {
  int arity = 0;
  std::function<TensorSum(const std::vector<GradedElement>&)> fn;

  TensorSum eval(const std::vector<GradedElement>& args) const {
    if (static_cast<int>(args.size()) != arity) throw std::domain_error("word arity mismatch");
    return fn(args);
  }
};

// τ for one directed edge: Σ_k ι at the source tensor factor composed with
// ∂ at the target factor, degree -1.
inline TensorOperator edge_operator(const std::vector<int>& index_class, int source_slot,
                                    int target_slot, int arity) {
  if (source_slot < 0 || source_slot >= arity || target_slot < 0 || target_slot >= arity)
    throw std::domain_error("edge slot out of range");
  if (source_slot == target_slot) throw std::domain_error("edge endpoints coincide");
  TensorOperator op;
  op.arity = arity;
  op.fn = [index_class, source_slot, target_slot](const std::vector<GradedElement>& args) {
    return apply_edge(expand_word(args), index_class, source_slot, target_slot);
  };
  return op;
}

}  // namespace bimod
