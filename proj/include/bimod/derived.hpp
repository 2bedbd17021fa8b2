#pragma once

#include "bimod/structures.hpp"

#include <map>
#include <optional>
#include <stdexcept>

namespace bimod {

// Sums the exact pieces of a component; keyed pieces have no exact collapse.
inline MultilinearOperator collapse_exact(const TaylorStructure& d, int m, int n = 0) {
  const TaylorComponent* c = d.component(m, n);
  Shape sh = d.shape_of(m, n);
  if (!c) return MultilinearOperator::zero(d.splitting(), sh, 0);
  for (const auto& p : c->pieces)
    if (!p.key.empty()) throw std::domain_error("component carries quadrature weights");
  if (c->pieces.size() == 1) return c->pieces[0].op;
  MultilinearOperator op;
  op.split = d.splitting();
  op.shape = sh;
  op.degree = c->degree;
  auto pieces = c->pieces;
  op.fn = [pieces, sh, s = d.splitting()](const std::vector<GradedElement>& v) {
    GradedElement acc = GradedElement::zero(s, sh.out);
    for (const auto& p : pieces) acc += p.op.eval(v);
    return acc;
  };
  return op;
}

enum class ModSide { Right, Left };

// Comodule endomorphism of the induced one-sided comodule, stored through its
// components K ⊗ B^{⊗q} → K (right side) or A^{⊗q} ⊗ K → K (left side).
// Every component has shifted degree equal to the total degree, which is the
// sign the commutator uses.
struct Endo {
  Splitting split;
  ModSide side = ModSide::Right;
  int degree = 0;
  std::map<int, MultilinearOperator> comp;

  Shape shape_of(int q) const {
    return side == ModSide::Right ? bimodule_shape(0, q) : bimodule_shape(q, 0);
  }
  // slot index of the distinguished K argument in a component of arity q+1
  int kpos(int q) const { return side == ModSide::Right ? 0 : q; }

  bool has(int q) const { return comp.count(q) > 0; }

  MultilinearOperator component(int q) const {
    auto it = comp.find(q);
    if (it != comp.end()) return it->second;
    return MultilinearOperator::zero(split, shape_of(q), degree - q);
  }

  static Endo zero(const Splitting& s, int degree, ModSide side = ModSide::Right) {
    return Endo{s, side, degree, {}};
  }

  static Endo identity(const Splitting& s, ModSide side = ModSide::Right) {
    Endo e{s, side, 0, {}};
    MultilinearOperator id;
    id.split = s;
    id.shape = bimodule_shape(0, 0);
    id.degree = 0;
    id.fn = [](const std::vector<GradedElement>& v) { return v[0]; };
    e.comp[0] = id;
    return e;
  }
};

namespace detail {
inline void endo_accumulate(Endo& out, int q, MultilinearOperator piece, int sign) {
  if (sign == -1) {
    MultilinearOperator base = piece;
    piece.fn = [base](const std::vector<GradedElement>& v) { return base.eval(v) * Rat(-1); };
  }
  auto it = out.comp.find(q);
  if (it == out.comp.end()) {
    out.comp[q] = piece;
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

inline Endo endo_add(const Endo& a, const Endo& b) {
  if (a.side != b.side) throw std::invalid_argument("endo side mismatch");
  Endo out = a;
  for (const auto& [q, op] : b.comp) detail::endo_accumulate(out, q, op, +1);
  return out;
}

inline Endo endo_scale(const Endo& a, const Rat& c) {
  Endo out = a;
  for (auto& [q, op] : out.comp) {
    MultilinearOperator base = op;
    op.fn = [base, c](const std::vector<GradedElement>& v) { return base.eval(v) * c; };
  }
  return out;
}

// Composition of comodule morphisms: the inner one lands in the K slot of the
// outer one, next to the tensor factor the comodule keeps.
inline Endo endo_compose(const Endo& f, const Endo& g) {
  if (f.side != g.side) throw std::invalid_argument("endo side mismatch");
  Endo out = Endo::zero(f.split, f.degree + g.degree, f.side);
  for (const auto& [qf, opf] : f.comp)
    for (const auto& [qg, opg] : g.comp)
      detail::endo_accumulate(out, qf + qg, insert_operator(opf, opg, f.kpos(qf)), +1);
  return out;
}

inline bool endos_equal(const Endo& a, const Endo& b, int truncation, int max_q) {
  if (a.side != b.side) return false;
  for (int q = 0; q <= max_q; ++q) {
    MultilinearOperator l = a.component(q), r = b.component(q);
    bool same = true;
    for_each_basis_tuple(a.split, a.shape_of(q).slots, truncation,
                         [&](const std::vector<GradedElement>& args) {
                           if (!same) return;
                           if (!(l.eval(args) == r.eval(args))) same = false;
                         });
    if (!same) return false;
  }
  return true;
}

inline bool endo_is_zero(const Endo& a, int truncation, int max_q) {
  return endos_equal(a, Endo::zero(a.split, a.degree, a.side), truncation, max_q);
}

// L_A^m applied to a tuple of algebra elements: the right-comodule
// endomorphism with components d_K^{m,n}(a_1..a_m | k | b_1..b_n).
inline Endo left_action_endo(const TaylorStructure& dK, const std::vector<GradedElement>& a_args,
                             int max_q) {
  int m = static_cast<int>(a_args.size());
  int wedge = 0;
  for (const auto& a : a_args) wedge += a.wedge_degree();
  Endo out = Endo::zero(dK.splitting(), 1 - m + wedge, ModSide::Right);
  for (int n = 0; n <= max_q; ++n) {
    if (!dK.has(m, n)) continue;
    MultilinearOperator full = collapse_exact(dK, m, n);
    MultilinearOperator partial;
    partial.split = dK.splitting();
    partial.shape = bimodule_shape(0, n);
    partial.degree = full.degree + wedge;
    partial.fn = [full, a_args](const std::vector<GradedElement>& kb) {
      std::vector<GradedElement> args = a_args;
      args.insert(args.end(), kb.begin(), kb.end());
      return full.eval(args);
    };
    out.comp[n] = partial;
  }
  return out;
}

// R_B^n applied to a tuple of module-algebra elements: the left-comodule
// endomorphism with components d_K^{m,n}(a_1..a_m | k | b_1..b_n).
inline Endo right_action_endo(const TaylorStructure& dK, const std::vector<GradedElement>& b_args,
                              int max_q) {
  int n = static_cast<int>(b_args.size());
  int wedge = 0;
  for (const auto& b : b_args) wedge += b.wedge_degree();
  Endo out = Endo::zero(dK.splitting(), 1 - n + wedge, ModSide::Left);
  for (int m = 0; m <= max_q; ++m) {
    if (!dK.has(m, n)) continue;
    MultilinearOperator full = collapse_exact(dK, m, n);
    MultilinearOperator partial;
    partial.split = dK.splitting();
    partial.shape = bimodule_shape(m, 0);
    partial.degree = full.degree + wedge;
    partial.fn = [full, b_args](const std::vector<GradedElement>& ak) {
      std::vector<GradedElement> args = ak;
      args.insert(args.end(), b_args.begin(), b_args.end());
      return full.eval(args);
    };
    out.comp[m] = partial;
  }
  return out;
}

// Brace of the one-sided coderivation with a comodule endomorphism:
// [d, φ] = d{φ} − (−1)^{‖φ‖} φ{d}, where d combines the matching edge of the
// module structure with the algebra structure on the kept tensor factor.
inline Endo coderivation_commutator(const TaylorStructure& dAlg, const TaylorStructure& dK,
                                    const Endo& phi, int max_q) {
  Endo out = Endo::zero(phi.split, phi.degree + 1, phi.side);
  int phi_sign = parity_sign(phi.degree);
  bool right = phi.side == ModSide::Right;
  auto dk_has = [&](int i) { return right ? dK.has(0, i) : dK.has(i, 0); };
  auto dk_op = [&](int i) { return right ? collapse_exact(dK, 0, i) : collapse_exact(dK, i, 0); };

  for (const auto& [qp, opp] : phi.comp) {
    // d{φ}: φ into the K slot of a module component
    for (int i = 0; i + qp <= max_q; ++i) {
      if (!dk_has(i)) continue;
      MultilinearOperator outer = dk_op(i);
      detail::endo_accumulate(out, i + qp, insert_operator(outer, opp, right ? 0 : i), +1);
    }
    // φ{d}: a module component into the K slot of φ
    for (int i = 0; qp + i <= max_q; ++i) {
      if (!dk_has(i)) continue;
      detail::endo_accumulate(out, qp + i, insert_operator(opp, dk_op(i), phi.kpos(qp)),
                              -phi_sign);
    }
    // φ{d}: algebra components into the tensor slots of φ
    if (qp >= 1) {
      for (const auto& [sig, comp] : dAlg.components()) {
        int i = sig.first;
        int out_q = qp - 1 + i;
        if (out_q > max_q) continue;
        MultilinearOperator inner = collapse_exact(dAlg, i, 0);
        for (int j = 0; j <= qp - 1; ++j) {
          int pos = right ? 1 + j : j;
          detail::endo_accumulate(out, out_q, insert_operator(opp, inner, pos), -phi_sign);
        }
      }
    }
  }
  return out;
}

struct EndDga {
  Endo q0;
  std::function<Endo(const Endo&)> q1;
  std::function<Endo(const Endo&, const Endo&)> q2;
};

// The curved DGA on one-sided comodule endomorphisms of K.  dAlg is the
// algebra acting on the kept tensor factor; dOther supplies the curvature.
inline EndDga end_dga(const TaylorStructure& dA, const TaylorStructure& dB,
                      const TaylorStructure& dK, ModSide side, int max_q) {
  EndDga dga;
  const TaylorStructure& dAlg = (side == ModSide::Right) ? dB : dA;
  const TaylorStructure& dOther = (side == ModSide::Right) ? dA : dB;
  GradedElement f = curvature(dOther);
  if (f.is_zero()) {
    dga.q0 = Endo::zero(dK.splitting(), 2, side);
  } else {
    dga.q0 = (side == ModSide::Right) ? left_action_endo(dK, {f}, max_q)
                                      : right_action_endo(dK, {f}, max_q);
  }
  dga.q1 = [dAlg, dK, max_q](const Endo& phi) {
    return endo_scale(coderivation_commutator(dAlg, dK, phi, max_q), -1);
  };
  dga.q2 = [](const Endo& f1, const Endo& f2) {
    return endo_scale(endo_compose(f1, f2), parity_sign(f1.degree));
  };
  return dga;
}

// Morphism identity for the derived left action at arity m: the relation
// terms at (m, n), partially applied to a tuple of algebra arguments, must
// still vanish as a comodule endomorphism for every n up to max_q.  This pins
// the sign bookkeeping of partial application against the structure relations.
inline bool left_action_identity_holds(const TaylorStructure& dA, const TaylorStructure& dB,
                                       const TaylorStructure& dK, int m, int truncation,
                                       int max_q) {
  bool ok = true;
  for_each_basis_tuple(
      dK.splitting(), algebra_shape(Ambient::A, m).slots, truncation,
      [&](const std::vector<GradedElement>& as) {
        if (!ok) return;
        Endo total = Endo::zero(dK.splitting(), 0, ModSide::Right);
        for (int n = 0; n <= max_q; ++n) {
          auto terms = bimodule_relation_terms(dA, dB, dK, m, n);
          for (const auto& t : terms) {
            if (!t.keys.empty())
              throw std::domain_error("identity check needs exact components");
            MultilinearOperator partial;
            partial.split = dK.splitting();
            partial.shape = bimodule_shape(0, n);
            partial.degree = t.op.degree;
            partial.fn = [op = t.op, as](const std::vector<GradedElement>& kb) {
              std::vector<GradedElement> args = as;
              args.insert(args.end(), kb.begin(), kb.end());
              return op.eval(args);
            };
            detail::endo_accumulate(total, n, partial, +1);
          }
        }
        if (!endo_is_zero(total, truncation, max_q)) ok = false;
      });
  return ok;
}

}  // namespace bimod
