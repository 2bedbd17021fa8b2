#include <catch2/catch_amalgamated.hpp>

#include "bimod/operator.hpp"
#include "bimod/tensorword.hpp"

using namespace bimod;

namespace {

const Splitting kD1{1, 0, 0, 0};
const Splitting kD2{2, 0, 0, 0};
const Splitting kLine{0, 0, 1, 0};

MultilinearOperator product_op(const Splitting& s, Ambient a) {
  MultilinearOperator op;
  op.split = s;
  op.shape = algebra_shape(a, 2);
  op.degree = 0;
  op.fn = [](const std::vector<GradedElement>& v) { return multiply(v[0], v[1]); };
  return op;
}

// t1 ∧ ∂_{x1}: an odd square-zero derivation.
MultilinearOperator theta_d(const Splitting& s) {
  MultilinearOperator op;
  op.split = s;
  op.shape = algebra_shape(Ambient::Tpoly, 1);
  op.degree = 1;
  op.fn = [s](const std::vector<GradedElement>& v) {
    return multiply(GradedElement::odd_gen(s, Ambient::Tpoly, 0), v[0].derivative(0));
  };
  return op;
}

}  // namespace

TEST_CASE("edge operator on a word", "[operators]") {
  auto theta = GradedElement::odd_gen(kD1, Ambient::Tpoly, 0);
  auto x = GradedElement::coord(kD1, Ambient::Tpoly, 0);

  SECTION("empty index class gives zero") {
    auto tau = edge_operator({}, 0, 1, 2);
    CHECK(tau.eval({theta, x}).empty());
  }

  SECTION("pairing of a normal direction against a coordinate") {
    auto tau = edge_operator({0}, 0, 1, 2);
    auto word = tau.eval({theta, x});
    REQUIRE(word.size() == 1);
    CHECK(word[0].coeff == 1);
    CHECK(word[0].slots[0].str() == "1");
    CHECK(word[0].slots[1].str() == "1");
    CHECK(contract_sum(word, kD1, Ambient::Tpoly).str() == "1");
  }

  SECTION("repeated contraction along one pair vanishes") {
    auto first = apply_edge(expand_word({theta, multiply(x, x)}), {0}, 0, 1);
    REQUIRE_FALSE(first.empty());
    CHECK(apply_edge(first, {0}, 0, 1).empty());
  }

  SECTION("slot validation") {
    CHECK_THROWS_AS(edge_operator({0}, 0, 2, 2), std::domain_error);
    CHECK_THROWS_AS(edge_operator({0}, 1, 1, 2), std::domain_error);
  }
}

TEST_CASE("edge operator crossing sign", "[operators]") {
  // Contraction at slot 1 moves past the odd slot 0.
  auto t1 = GradedElement::odd_gen(kD2, Ambient::Tpoly, 0);
  auto t2 = GradedElement::odd_gen(kD2, Ambient::Tpoly, 1);
  auto x2 = GradedElement::coord(kD2, Ambient::Tpoly, 1);
  auto word = apply_edge(expand_word({t1, t2, x2}), {1}, 1, 2);
  REQUIRE(word.size() == 1);
  CHECK(word[0].coeff == -1);

  auto even_front = apply_edge(expand_word({x2, t2, x2}), {1}, 1, 2);
  REQUIRE(even_front.size() == 1);
  CHECK(even_front[0].coeff == 1);
}

TEST_CASE("insertion reproduces associativity", "[operators]") {
  auto mu = product_op(kD2, Ambient::Tpoly);
  auto left = insert_operator(mu, mu, 0);
  auto right = insert_operator(mu, mu, 1);
  int tuples = 0;
  for_each_basis_tuple(kD2, left.shape.slots, 3, [&](const std::vector<GradedElement>& args) {
    ++tuples;
    CHECK((left.eval(args) + right.eval(args)).is_zero());
  });
  CHECK(tuples > 100);
}

TEST_CASE("odd derivation satisfies the arity-2 relation", "[operators]") {
  auto mu = product_op(kD1, Ambient::Tpoly);
  auto d = theta_d(kD1);
  auto r0 = insert_operator(mu, d, 0);
  auto r1 = insert_operator(mu, d, 1);
  auto r2 = insert_operator(d, mu, 0);
  for_each_basis_tuple(kD1, mu.shape.slots, 4, [&](const std::vector<GradedElement>& args) {
    CHECK((r0.eval(args) + r1.eval(args) + r2.eval(args)).is_zero());
  });

  SECTION("square relation") {
    auto sq = insert_operator(d, d, 0);
    for_each_basis_tuple(kD1, {Ambient::Tpoly}, 4,
                         [&](const std::vector<GradedElement>& args) {
                           CHECK(sq.eval(args).is_zero());
                         });
  }

  SECTION("a non-derivation breaks the relation") {
    MultilinearOperator bad;
    bad.split = kD1;
    bad.shape = algebra_shape(Ambient::Tpoly, 1);
    bad.degree = 1;
    bad.fn = [](const std::vector<GradedElement>& v) {
      return multiply(GradedElement::odd_gen(kD1, Ambient::Tpoly, 0),
                      multiply(GradedElement::coord(kD1, Ambient::Tpoly, 0),
                               v[0].derivative(0).derivative(0)));
    };
    auto b0 = insert_operator(mu, bad, 0);
    auto b1 = insert_operator(mu, bad, 1);
    auto b2 = insert_operator(bad, mu, 0);
    bool violated = false;
    for_each_basis_tuple(kD1, mu.shape.slots, 4, [&](const std::vector<GradedElement>& args) {
      if (!(b0.eval(args) + b1.eval(args) + b2.eval(args)).is_zero()) violated = true;
    });
    CHECK(violated);
  }
}

TEST_CASE("insertion past an odd argument flips", "[operators]") {
  auto mu = product_op(kD2, Ambient::Tpoly);
  auto d = theta_d(kD2);
  auto ins = insert_operator(mu, d, 1);

  auto t2 = GradedElement::odd_gen(kD2, Ambient::Tpoly, 1);
  auto x1 = GradedElement::coord(kD2, Ambient::Tpoly, 0);
  auto x2 = GradedElement::coord(kD2, Ambient::Tpoly, 1);

  // comb sign -1; moving past an even slot costs nothing more.
  auto expect_even = multiply(x2, GradedElement::odd_gen(kD2, Ambient::Tpoly, 0)) * Rat(-1);
  CHECK(ins.eval({x2, x1}) == expect_even);

  // one odd slot in front flips once more
  auto expect_odd = multiply(t2, GradedElement::odd_gen(kD2, Ambient::Tpoly, 0));
  CHECK(ins.eval({t2, x1}) == expect_odd);
}

TEST_CASE("identity insertions are neutral", "[operators]") {
  auto mu = product_op(kD2, Ambient::Tpoly);
  auto id = MultilinearOperator::identity(kD2, Ambient::Tpoly);
  CHECK(operators_equal(insert_operator(mu, id, 0), mu, 3));
  CHECK(operators_equal(insert_operator(mu, id, 1), mu, 3));
  CHECK(operators_equal(insert_operator(id, mu, 0), mu, 3));
}

TEST_CASE("extensional comparison distinguishes operators", "[operators]") {
  MultilinearOperator l, r;
  l.split = r.split = kD1;
  l.shape = r.shape = algebra_shape(Ambient::Tpoly, 2);
  l.degree = r.degree = 0;
  l.fn = [](const std::vector<GradedElement>& v) { return multiply(v[0], v[1].derivative(0)); };
  r.fn = [](const std::vector<GradedElement>& v) { return multiply(v[0].derivative(0), v[1]); };
  CHECK_FALSE(operators_equal(l, r, 3));
  CHECK(operators_equal(l, l, 3));
}

TEST_CASE("bimodule pairing from one edge", "[operators]") {
  MultilinearOperator d11;
  d11.split = kLine;
  d11.shape = bimodule_shape(1, 1);
  d11.degree = -1;
  d11.fn = [](const std::vector<GradedElement>& v) {
    return contract_sum(apply_edge(expand_word(v), {0}, 0, 2), kLine, Ambient::K);
  };
  auto theta = GradedElement::odd_gen(kLine, Ambient::A, 0);
  auto one_k = GradedElement::one(kLine, Ambient::K);
  auto x = GradedElement::coord(kLine, Ambient::B, 0);
  CHECK(d11.eval({theta, one_k, x}) == one_k);
  CHECK(d11.eval({theta, one_k, multiply(x, x)}).is_zero());

  SECTION("slot ambient validation") {
    CHECK_THROWS_AS(d11.eval({theta, one_k, one_k}), std::domain_error);
  }
}
