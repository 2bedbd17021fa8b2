#pragma once

#include "bimod/element.hpp"
#include "bimod/sign_util.hpp"

namespace bimod {

// Splits an element into its wedge-homogeneous components, indexed by odd count.
inline std::vector<GradedElement> odd_components(const GradedElement& g, int& max_k) {
  max_k = g.max_odd();
  std::vector<GradedElement> comps(static_cast<std::size_t>(max_k) + 1,
                                   GradedElement::zero(g.splitting(), g.ambient()));
  for (const auto& [m, c] : g.terms()) comps[static_cast<std::size_t>(m.odd_count())].add_term(m, c);
  return comps;
}

inline std::vector<GradedElement> odd_components(const GradedElement& g) {
  int ignored = 0;
  return odd_components(g, ignored);
}

// The composition a . b: contract one wedge slot of a against a derivative of
// the coefficients of b, alternating signs over the removed slot.
inline GradedElement schouten_compose(const GradedElement& a, const GradedElement& b) {
  if (!(a.splitting() == b.splitting()) || a.ambient() != Ambient::Tpoly ||
      b.ambient() != Ambient::Tpoly)
    throw std::domain_error("schouten_compose wants polyvectors");
  GradedElement out = GradedElement::zero(a.splitting(), Ambient::Tpoly);
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      for (std::size_t l = 0; l < ma.odds.size(); ++l) {
        int dir = ma.odds[l];
        if (mb.evens[static_cast<std::size_t>(dir)] == 0) continue;
        Monomial left = ma;
        left.odds.erase(left.odds.begin() + static_cast<std::ptrdiff_t>(l));
        Monomial right = mb;
        int e = right.evens[static_cast<std::size_t>(dir)]--;
        auto merged = merge_odds(left.odds, right.odds);
        if (!merged) continue;
        Monomial m;
        m.evens.resize(ma.evens.size());
        for (std::size_t i = 0; i < m.evens.size(); ++i)
          m.evens[i] = left.evens[i] + right.evens[i];
        m.odds = std::move(merged->first);
        Rat coeff = ca * cb * e * merged->second;
        if (l % 2 == 1) coeff = -coeff;
        out.add_term(m, coeff);
      }
    }
  }
  return out;
}

// Schouten bracket on wedge-homogeneous polyvectors of wedge counts k1, k2:
//   [a,b] = -(-1)^{k1} a.b - (-1)^{(k2-1) k1} b.a
// extended bilinearly; restricts to the Lie bracket on vector fields and is
// graded-antisymmetric for the shifted degree k-1.
inline GradedElement schouten_bracket(const GradedElement& a, const GradedElement& b) {
  if (a.ambient() != Ambient::Tpoly || b.ambient() != Ambient::Tpoly)
    throw std::domain_error("schouten_bracket wants polyvectors");
  GradedElement out = GradedElement::zero(a.splitting(), Ambient::Tpoly);
  int ka_max = 0, kb_max = 0;
  auto ac = odd_components(a, ka_max);
  auto bc = odd_components(b, kb_max);
  for (int k1 = 0; k1 <= ka_max; ++k1) {
    for (int k2 = 0; k2 <= kb_max; ++k2) {
      if (ac[static_cast<std::size_t>(k1)].is_zero() || bc[static_cast<std::size_t>(k2)].is_zero())
        continue;
      GradedElement ab = schouten_compose(ac[static_cast<std::size_t>(k1)],
                                          bc[static_cast<std::size_t>(k2)]);
      GradedElement ba = schouten_compose(bc[static_cast<std::size_t>(k2)],
                                          ac[static_cast<std::size_t>(k1)]);
      out += ab * Rat(-parity_sign(k1)) + ba * Rat(-parity_sign((k2 - 1) * k1));
    }
  }
  return out;
}

// Second Taylor coefficient of the polyvector L-infinity structure:
//   Q2(a,b) = a.b + (-1)^{k1 k2} b.a = -(-1)^{(k1-1) k2} [b,a].
inline GradedElement schouten_q2(const GradedElement& a, const GradedElement& b) {
  GradedElement out = GradedElement::zero(a.splitting(), Ambient::Tpoly);
  int ka_max = 0, kb_max = 0;
  auto ac = odd_components(a, ka_max);
  auto bc = odd_components(b, kb_max);
  for (int k1 = 0; k1 <= ka_max; ++k1) {
    for (int k2 = 0; k2 <= kb_max; ++k2) {
      if (ac[static_cast<std::size_t>(k1)].is_zero() || bc[static_cast<std::size_t>(k2)].is_zero())
        continue;
      GradedElement ab = schouten_compose(ac[static_cast<std::size_t>(k1)],
                                          bc[static_cast<std::size_t>(k2)]);
      GradedElement ba = schouten_compose(bc[static_cast<std::size_t>(k2)],
                                          ac[static_cast<std::size_t>(k1)]);
      out += ab + ba * Rat(parity_sign(k1 * k2));
    }
  }
  return out;
}

}  // namespace bimod
