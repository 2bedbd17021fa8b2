#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "bimod/koszul.hpp"

using namespace bimod;

namespace {

long betti_at(const std::vector<RankEntry>& rs, int deg, int internal) {
  for (const auto& r : rs)
    if (r.degree == deg && r.internal == internal) return r.betti;
  return 0;
}

long choose(long n, long k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// a*b for a: mid -> out, b: src -> mid
SparseRatMatrix compose(const SparseRatMatrix& a, const SparseRatMatrix& b) {
  SparseRatMatrix c;
  c.rows = a.rows;
  c.cols = b.cols;
  for (const auto& [rcb, vb] : b.entries)
    for (const auto& [rca, va] : a.entries)
      if (rca.second == rcb.first) c.add(rca.first, rcb.second, va * vb);
  return c;
}

}  // namespace

TEST_CASE("the two differentials square to zero and respect the bigrading") {
  KoszulComplex cx(2, 2, 6);
  for (int r = 0; r <= 2; ++r) {
    for (int q = r; q <= 6; ++q) {
      for (const auto& m : cx.basis(r, q)) {
        GradedElement v = GradedElement::from_monomial(cx.split(), Ambient::Tpoly, m, Rat(1));
        GradedElement dv = cx.differential(v);
        for (const auto& [mm, c] : dv.terms()) {
          REQUIRE(mm.odd_count() == r - 1);
          REQUIRE(KoszulComplex::internal_degree(mm) == q);
        }
        GradedElement rv = cx.de_rham(v);
        for (const auto& [mm, c] : rv.terms()) {
          REQUIRE(mm.odd_count() == r + 1);
          REQUIRE(KoszulComplex::internal_degree(mm) == q);
        }
        REQUIRE(cx.differential(dv).is_zero());
        REQUIRE(cx.de_rham(rv).is_zero());
      }
    }
  }
}

TEST_CASE("the anticommutator of the differentials is the fiber Euler operator") {
  KoszulComplex cx(1, 2, 5);
  for (int r = 0; r <= 2; ++r) {
    for (int q = r; q <= 5; ++q) {
      for (const auto& m : cx.basis(r, q)) {
        GradedElement v = GradedElement::from_monomial(cx.split(), Ambient::Tpoly, m, Rat(1));
        GradedElement lhs = cx.differential(cx.de_rham(v)) + cx.de_rham(cx.differential(v));
        REQUIRE(lhs == cx.fiber_euler(v));
      }
    }
  }
}

TEST_CASE("a pure fiber line resolves the constants") {
  KoszulComplex cx(0, 1, 6);
  auto rs = cohomology_ranks(cx.blocks(), -1, 0);
  REQUIRE(betti_at(rs, 0, 0) == 1);
  for (const auto& r : rs) {
    REQUIRE(r.reliable);
    if (r.degree == 0 && r.internal == 0) continue;
    REQUIRE(r.betti == 0);
  }
}

TEST_CASE("an empty fiber has zero differential and polynomial cohomology") {
  KoszulComplex cx(2, 0, 6);
  GradedElement v = multiply(cx.x(0), cx.x(1));
  REQUIRE(cx.differential(v).is_zero());
  REQUIRE(cx.de_rham(v).is_zero());
  auto rs = cohomology_ranks(cx.blocks(), -1, 0);
  for (int q = 0; q <= 6; ++q) REQUIRE(betti_at(rs, 0, q) == q + 1);
}

TEST_CASE("mixed base and fiber complexes are resolutions of the base") {
  struct Dims {
    int base, fiber;
  };
  for (Dims d : {Dims{1, 1}, Dims{2, 1}, Dims{1, 2}, Dims{2, 2}}) {
    KoszulComplex cx(d.base, d.fiber, 6);
    auto rs = cohomology_ranks(cx.blocks(), -d.fiber, 0);
    for (const auto& r : rs) {
      REQUIRE(r.reliable);
      if (r.degree < 0) REQUIRE(r.betti == 0);
    }
    for (int q = 0; q <= 6; ++q)
      REQUIRE(betti_at(rs, 0, q) == choose(q + d.base - 1, d.base - 1));
  }
}

TEST_CASE("the dual algebra of a pure fiber sits on the diagonal") {
  ExtAlgebra line = ext_algebra(0, 1, 6);
  auto t1 = line.table();
  REQUIRE(t1.size() == 2);
  for (const auto& e : t1) {
    REQUIRE(e.q == -e.p);
    REQUIRE(e.dim == 1);
  }
  REQUIRE(line.product(line.eta(0), line.eta(0)).is_zero());

  ExtAlgebra plane = ext_algebra(0, 2, 6);
  auto t2 = plane.table();
  REQUIRE(t2.size() == 3);
  for (const auto& e : t2) {
    REQUIRE(e.q == -e.p);
    REQUIRE(e.dim == choose(2, e.p));
  }

  ExtAlgebra mixed = ext_algebra(1, 1, 6);
  bool off = false;
  for (const auto& e : mixed.table())
    if (e.q != -e.p) off = true;
  REQUIRE(off);
}

TEST_CASE("lift-and-compose lands on the reversed product") {
  ExtAlgebra ax = ext_algebra(1, 3, 6);
  std::vector<GradedElement> classes;
  for (int mask = 0; mask < 8; ++mask) {
    GradedElement g = ax.one();
    for (int j = 0; j < 3; ++j)
      if (mask & (1 << j)) g = multiply(g, ax.eta(j));
    classes.push_back(g);
    classes.push_back(multiply(ax.x(0), g));
    classes.push_back(multiply(multiply(ax.x(0), ax.x(0)), g) * Rat(3));
  }
  for (const auto& a : classes)
    for (const auto& b : classes) REQUIRE(ax.yoneda(a, b) == ax.opposite(a, b));

  GradedElement s = ax.eta(0) + ax.eta(1) * Rat(2);
  GradedElement t = ax.eta(2) - ax.eta(0);
  REQUIRE(ax.yoneda(s, t) == ax.opposite(s, t));
  REQUIRE(ax.yoneda(s, t) + ax.yoneda(t, s) == ax.complex().zero());
}

TEST_CASE("dual classes carry a well defined bidegree") {
  ExtAlgebra ax = ext_algebra(1, 2, 6);
  ExtClass c = ax.make(multiply(ax.x(0), ax.eta(1)));
  REQUIRE(c.p == 1);
  REQUIRE(c.q == 0);
  ExtClass top = ax.make(multiply(ax.eta(0), ax.eta(1)));
  REQUIRE(top.p == 2);
  REQUIRE(top.q == -2);
  REQUIRE_THROWS_AS(ax.make(ax.complex().y(0)), std::domain_error);
  REQUIRE_THROWS_AS(ax.make(ax.one() + ax.eta(0)), std::domain_error);
  REQUIRE_THROWS_AS(ax.make(ax.x(0) + multiply(ax.x(0), ax.x(0))), std::domain_error);
}

TEST_CASE("the comparison map starts with multiplication and a primitive") {
  KoszulComplex cx(1, 1, 6);
  GradedElement one = cx.one(), x = cx.x(0), y = cx.y(0), th = cx.theta(0);

  REQUIRE(bar_to_koszul(cx, 0, {multiply(x, x), y}) == multiply(multiply(x, x), y));
  REQUIRE(bar_to_koszul(cx, 1, {one, y, one}) == th);
  REQUIRE(bar_to_koszul(cx, 1, {one, multiply(y, y), one}) == multiply(y, th));
  REQUIRE(bar_to_koszul(cx, 1, {x, multiply(x, y), one}) == multiply(multiply(x, x), th));

  REQUIRE_THROWS_AS(bar_to_koszul(cx, 2, {one, y, y, one}), std::invalid_argument);
  REQUIRE_THROWS_AS(bar_to_koszul(cx, 1, {one, y}), std::invalid_argument);
  REQUIRE_THROWS_AS(bar_to_koszul(cx, 0, {y, y}), std::domain_error);
  REQUIRE_THROWS_AS(bar_to_koszul(cx, 0, {th, y}), std::domain_error);
}

TEST_CASE("the comparison map intertwines the differentials on reduced slots") {
  for (int fib : {1, 2}) {
    KoszulComplex cx(fib, fib, 6);
    std::vector<GradedElement> mids;
    for (int q = 1; q <= 3; ++q)
      for (const auto& m : cx.basis(0, q))
        if (cx.fiber_weight(m) > 0)
          mids.push_back(GradedElement::from_monomial(cx.split(), Ambient::Tpoly, m, Rat(1)));
    std::vector<GradedElement> outers = {cx.one(), cx.x(0)};
    std::vector<GradedElement> rights = {cx.one(), cx.y(0), cx.x(0)};
    for (const auto& k : outers)
      for (const auto& b1 : mids)
        for (const auto& b2 : rights) {
          GradedElement lhs = cx.differential(bar_to_koszul(cx, 1, {k, b1, b2}));
          GradedElement rhs = bar_to_koszul(cx, 0, {k, multiply(b1, b2)});
          REQUIRE(lhs == rhs);
        }
  }
}

TEST_CASE("bar boundaries square to zero across parities") {
  Splitting s{0, 0, 3, 0};
  for (Ambient side : {Ambient::A, Ambient::B}) {
    BarComplex bar(s, side, 4, 4);
    for (int w = 2; w <= 4; ++w) {
      for (int p = 2; p <= std::min(4, w); ++p) {
        auto sq = compose(bar.boundary(p - 1, w), bar.boundary(p, w));
        REQUIRE(sq.entries.empty());
      }
    }
  }
}

TEST_CASE("the derived left action of the absolute pair is an isomorphism") {
  for (int d : {1, 2}) {
    Splitting s{0, 0, d, 0};
    TaylorStructure dK = brane_bimodule(s);
    KellerReport rep = check_keller(dK, KellerSide::LeftAction, 3);
    REQUIRE(rep.generators_match);
    REQUIRE(rep.generator_rank == d);
    for (const auto& e : rep.entries) {
      REQUIRE(e.reliable);
      REQUIRE(e.iso);
      if (e.q == -e.p) {
        REQUIRE(e.dim_source == choose(d, e.p));
        REQUIRE(e.dim_target == choose(d, e.p));
      } else {
        REQUIRE(e.dim_target == 0);
      }
    }
  }
}

TEST_CASE("the derived right action of the absolute pair is an isomorphism") {
  for (int d : {1, 2}) {
    Splitting s{0, 0, d, 0};
    TaylorStructure dK = brane_bimodule(s);
    KellerReport rep = check_keller(dK, KellerSide::RightAction, 3);
    REQUIRE(rep.generators_match);
    REQUIRE(rep.generator_rank == d);
    for (const auto& e : rep.entries) {
      REQUIRE(e.reliable);
      REQUIRE(e.iso);
      if (e.q == -e.p) {
        REQUIRE(e.dim_source == choose(d + e.p - 1, e.p));
        REQUIRE(e.dim_target == choose(d + e.p - 1, e.p));
      } else {
        REQUIRE(e.dim_target == 0);
      }
    }
  }
}

TEST_CASE("the derived action report rejects pairs with a transverse part") {
  Splitting s{1, 0, 1, 0};
  TaylorStructure dK(s, TaylorStructure::Kind::Bimodule, Ambient::K);
  REQUIRE_THROWS_AS(check_keller(dK, KellerSide::LeftAction, 2), std::domain_error);
}
