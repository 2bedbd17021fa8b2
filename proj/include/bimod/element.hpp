#pragma once

#include "bimod/monomial.hpp"
#include "bimod/rational.hpp"
#include "bimod/splitting.hpp"

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bimod {

inline std::string coeff_str(const Rat& c) { return rat_str(c); }

inline std::string coeff_str(double c) {
  std::ostringstream os;
  os.precision(17);
  os << c;
  return os.str();
}

// Linear combination of monomials inside one ambient algebra.  The odd lists
// of stored monomials are always strictly sorted; zero coefficients are never
// stored; every stored monomial uses only generators the ambient allows.
// Coefficients are exact rationals almost everywhere; the double instantiation
// exists for quadrature-weighted values.
template <class C>
class GradedElementT {
 public:
  GradedElementT() = default;
  GradedElementT(Splitting s, Ambient a) : split_(s), amb_(a) {}

  static GradedElementT zero(Splitting s, Ambient a) { return GradedElementT(s, a); }

  static GradedElementT one(Splitting s, Ambient a) {
    GradedElementT e(s, a);
    Monomial m;
    m.evens.assign(static_cast<std::size_t>(s.total()), 0);
    e.terms_[m] = C(1);
    return e;
  }

  static GradedElementT from_monomial(Splitting s, Ambient a, const Monomial& m, const C& c) {
    GradedElementT e(s, a);
    e.add_term(m, c);
    return e;
  }

  // x_i as an element (even generator).
  static GradedElementT coord(Splitting s, Ambient a, int i) {
    if (!s.even_allowed(a, i)) throw std::domain_error("even generator not in ambient");
    Monomial m;
    m.evens.assign(static_cast<std::size_t>(s.total()), 0);
    m.evens[static_cast<std::size_t>(i)] = 1;
    return from_monomial(s, a, m, C(1));
  }

  // The odd generator attached to direction i (the constant normal field).
  static GradedElementT odd_gen(Splitting s, Ambient a, int i) {
    if (!s.odd_allowed(a, i)) throw std::domain_error("odd generator not in ambient");
    Monomial m;
    m.evens.assign(static_cast<std::size_t>(s.total()), 0);
    m.odds = {i};
    return from_monomial(s, a, m, C(1));
  }

  const Splitting& splitting() const { return split_; }
  Ambient ambient() const { return amb_; }
  const std::map<Monomial, C>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Monomial& m, const C& c) {
    if (c == C(0)) return;
    check_monomial(m);
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, c);
    } else {
      it->second += c;
      if (it->second == C(0)) terms_.erase(it);
    }
  }

  GradedElementT& operator+=(const GradedElementT& o) {
    require_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }

  GradedElementT& operator-=(const GradedElementT& o) {
    require_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }

  GradedElementT& operator*=(const C& c) {
    if (c == C(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
  }

  friend GradedElementT operator+(GradedElementT a, const GradedElementT& b) { return a += b; }
  friend GradedElementT operator-(GradedElementT a, const GradedElementT& b) { return a -= b; }
  friend GradedElementT operator*(GradedElementT a, const C& c) { return a *= c; }
  friend GradedElementT operator*(const C& c, GradedElementT a) { return a *= c; }

  bool operator==(const GradedElementT& o) const {
    return split_ == o.split_ && amb_ == o.amb_ && terms_ == o.terms_;
  }

  // Graded-commutative product; signs come from merging the odd lists.
  friend GradedElementT multiply(const GradedElementT& a, const GradedElementT& b) {
    if (!(a.split_ == b.split_) || a.amb_ != b.amb_)
      throw std::domain_error("ambient mismatch in multiply");
    GradedElementT out(a.split_, a.amb_);
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        auto merged = merge_odds(ma.odds, mb.odds);
        if (!merged) continue;
        Monomial m;
        m.evens.resize(ma.evens.size());
        for (std::size_t i = 0; i < m.evens.size(); ++i) m.evens[i] = ma.evens[i] + mb.evens[i];
        m.odds = std::move(merged->first);
        out.add_term(m, ca * cb * C(merged->second));
      }
    }
    return out;
  }

  // Kills every monomial that uses a generator outside the target ambient.
  GradedElementT restrict_to(Ambient target) const {
    GradedElementT out(split_, target);
    for (const auto& [m, c] : terms_) {
      bool ok = true;
      for (std::size_t i = 0; i < m.evens.size() && ok; ++i)
        if (m.evens[i] > 0 && !split_.even_allowed(target, static_cast<int>(i))) ok = false;
      for (int o : m.odds)
        if (!split_.odd_allowed(target, o)) {
          ok = false;
          break;
        }
      if (ok) out.add_term(m, c);
    }
    return out;
  }

  // Reinterprets the element in a larger ambient (no term can be dropped).
  GradedElementT view_as(Ambient target) const {
    GradedElementT out(split_, target);
    for (const auto& [m, c] : terms_) out.add_term(m, c);
    return out;
  }

  // Coefficient derivative along x_k; wedge part untouched, degree 0.
  GradedElementT derivative(int k) const {
    GradedElementT out(split_, amb_);
    for (const auto& [m, c] : terms_) {
      if (m.evens[static_cast<std::size_t>(k)] == 0) continue;
      Monomial d = m;
      int e = d.evens[static_cast<std::size_t>(k)]--;
      out.add_term(d, c * C(e));
    }
    return out;
  }

  // Left contraction removing the odd generator k: odd operator of degree -1.
  GradedElementT contract(int k) const {
    GradedElementT out(split_, amb_);
    for (const auto& [m, c] : terms_) {
      for (std::size_t p = 0; p < m.odds.size(); ++p) {
        if (m.odds[p] != k) continue;
        Monomial d = m;
        d.odds.erase(d.odds.begin() + static_cast<std::ptrdiff_t>(p));
        out.add_term(d, (p % 2 == 0) ? c : -c);
        break;
      }
    }
    return out;
  }

  int min_odd() const {
    int v = 1 << 20;
    for (const auto& [m, c] : terms_) v = std::min(v, m.odd_count());
    return terms_.empty() ? 0 : v;
  }

  int max_odd() const {
    int v = 0;
    for (const auto& [m, c] : terms_) v = std::max(v, m.odd_count());
    return v;
  }

  bool homogeneous_odd() const { return terms_.empty() || min_odd() == max_odd(); }

  // Wedge count of a homogeneous element; the zero element reports 0.
  int wedge_degree() const {
    if (!homogeneous_odd()) throw std::domain_error("inhomogeneous wedge degree");
    return max_odd();
  }

  int max_poly_degree() const {
    int v = 0;
    for (const auto& [m, c] : terms_) v = std::max(v, m.poly_degree());
    return v;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << coeff_str(c);
      for (std::size_t i = 0; i < m.evens.size(); ++i) {
        if (m.evens[i] == 0) continue;
        os << " * x" << (i + 1);
        if (m.evens[i] > 1) os << "^" << m.evens[i];
      }
      if (!m.odds.empty()) {
        os << " * ";
        for (std::size_t p = 0; p < m.odds.size(); ++p) {
          if (p) os << "*";
          os << "t" << (m.odds[p] + 1);
        }
      }
    }
    return os.str();
  }

 private:
  void require_same(const GradedElementT& o) const {
    if (!(split_ == o.split_) || amb_ != o.amb_) throw std::domain_error("ambient mismatch");
  }

  void check_monomial(const Monomial& m) const {
    if (m.evens.size() != static_cast<std::size_t>(split_.total()))
      throw std::domain_error("monomial dimension mismatch");
    for (std::size_t i = 0; i < m.evens.size(); ++i) {
      if (m.evens[i] < 0) throw std::domain_error("negative exponent");
      if (m.evens[i] > 0 && !split_.even_allowed(amb_, static_cast<int>(i)))
        throw std::domain_error("even generator not in ambient");
    }
    for (std::size_t p = 0; p < m.odds.size(); ++p) {
      if (p > 0 && m.odds[p - 1] >= m.odds[p]) throw std::domain_error("odd list not sorted");
      if (!split_.odd_allowed(amb_, m.odds[p]))
        throw std::domain_error("odd generator not in ambient");
    }
  }

  Splitting split_;
  Ambient amb_ = Ambient::Tpoly;
  std::map<Monomial, C> terms_;
};

using GradedElement = GradedElementT<Rat>;
using NumElement = GradedElementT<double>;

inline NumElement to_numeric(const GradedElement& g) {
  NumElement out(g.splitting(), g.ambient());
  for (const auto& [m, c] : g.terms())
    out.add_term(m, c.template convert_to<double>());
  return out;
}

// Largest coefficient magnitude, the norm used for numeric residuals.
inline double sup_norm(const NumElement& g) {
  double v = 0;
  for (const auto& [m, c] : g.terms()) v = std::max(v, std::abs(c));
  return v;
}

// All ambient monomials with poly_degree <= max_poly (every odd subset).
inline std::vector<Monomial> monomial_basis(const Splitting& s, Ambient a, int max_poly) {
  int d = s.total();
  std::vector<int> ev, od;
  for (int i = 0; i < d; ++i) {
    if (s.even_allowed(a, i)) ev.push_back(i);
    if (s.odd_allowed(a, i)) od.push_back(i);
  }
  std::vector<std::vector<int>> exps;
  std::vector<int> cur(static_cast<std::size_t>(d), 0);
  // Enumerate exponent vectors supported on ev with total degree <= max_poly.
  auto rec = [&](auto&& self, std::size_t pos, int left) -> void {
    if (pos == ev.size()) {
      exps.push_back(cur);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      cur[static_cast<std::size_t>(ev[pos])] = e;
      self(self, pos + 1, left - e);
    }
    cur[static_cast<std::size_t>(ev[pos])] = 0;
  };
  rec(rec, 0, max_poly);

  std::vector<Monomial> out;
  unsigned subsets = 1u << od.size();
  for (const auto& e : exps) {
    for (unsigned mask = 0; mask < subsets; ++mask) {
      Monomial m;
      m.evens = e;
      for (std::size_t k = 0; k < od.size(); ++k)
        if (mask & (1u << k)) m.odds.push_back(od[k]);
      out.push_back(std::move(m));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace bimod
