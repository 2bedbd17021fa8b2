#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bimod/hochschild.hpp"
#include "bimod/structures.hpp"

using namespace bimod;

namespace {

const Splitting kLine{0, 0, 1, 0};

// Independent composition oracle: the printed desuspended prefactor
// (-1)^{(|g|+n2-1)(n1-1)+(j-1)(n2-1)} together with the evaluation Koszul
// sign from moving g past the prefix, computed over a full expansion.
MultilinearOperator oracle_insert(const MultilinearOperator& outer,
                                  const MultilinearOperator& inner, int pos) {
  MultilinearOperator op;
  op.split = outer.split;
  op.shape.out = outer.shape.out;
  for (int i = 0; i < pos; ++i) op.shape.slots.push_back(outer.shape.slots[i]);
  for (auto a : inner.shape.slots) op.shape.slots.push_back(a);
  for (std::size_t i = pos + 1; i < outer.shape.slots.size(); ++i)
    op.shape.slots.push_back(outer.shape.slots[i]);
  op.degree = outer.degree + inner.degree;
  int n1 = outer.arity(), n2 = inner.arity();
  long pref = static_cast<long>(inner.degree + n2 - 1) * (n1 - 1) +
              static_cast<long>(pos) * (n2 - 1);
  op.fn = [outer, inner, pos, pref, n2](const std::vector<GradedElement>& args) {
    GradedElement acc = GradedElement::zero(outer.split, outer.shape.out);
    TensorSum layers = expand_word(args);
    if (args.empty()) layers.push_back(TensorTerm{Rat(1), {}});
    for (const auto& layer : layers) {
      long koszul = 0;
      for (int l = 0; l < pos; ++l)
        koszul += static_cast<long>(inner.degree) *
                  layer.slots[static_cast<std::size_t>(l)].wedge_degree();
      std::vector<GradedElement> block(layer.slots.begin() + pos,
                                       layer.slots.begin() + pos + n2);
      std::vector<GradedElement> outer_args(layer.slots.begin(), layer.slots.begin() + pos);
      outer_args.push_back(inner.eval(block));
      for (std::size_t i = static_cast<std::size_t>(pos + n2); i < layer.slots.size(); ++i)
        outer_args.push_back(layer.slots[i]);
      acc += outer.eval(outer_args) * (layer.coeff * Rat(parity_sign(pref + koszul)));
    }
    return acc;
  };
  return op;
}

// Slot-by-slot enumeration of every legal single insertion.
Cochain oracle_brace1(const Cochain& f, const Cochain& g) {
  Cochain out = Cochain::zero(f.split, f.degree + g.degree);
  for (const auto& [n1, opf] : f.a_part)
    for (const auto& [n2, opg] : g.a_part)
      for (int pos = 0; pos < n1; ++pos)
        detail::part_accumulate(out.a_part, n1 + n2 - 1, oracle_insert(opf, opg, pos), +1);
  for (const auto& [n1, opf] : f.b_part)
    for (const auto& [n2, opg] : g.b_part)
      for (int pos = 0; pos < n1; ++pos)
        detail::part_accumulate(out.b_part, n1 + n2 - 1, oracle_insert(opf, opg, pos), +1);
  for (const auto& [mn, opf] : f.k_part) {
    auto [m, n] = mn;
    for (const auto& [n2, opg] : g.a_part)
      for (int pos = 0; pos < m; ++pos)
        detail::part_accumulate(out.k_part, {m + n2 - 1, n}, oracle_insert(opf, opg, pos), +1);
    for (const auto& [n2, opg] : g.b_part)
      for (int pos = 0; pos < n; ++pos)
        detail::part_accumulate(out.k_part, {m, n + n2 - 1},
                                oracle_insert(opf, opg, m + 1 + pos), +1);
    for (const auto& [mn2, opg] : g.k_part)
      detail::part_accumulate(out.k_part, {m + mn2.first, n + mn2.second},
                              oracle_insert(opf, opg, m), +1);
  }
  return out;
}

Cochain oracle_bracket(const Cochain& f, const Cochain& g) {
  Cochain fg = oracle_brace1(f, g);
  Cochain gf = oracle_brace1(g, f);
  int sign = parity_sign(static_cast<long>(f.degree) * g.degree);
  return cochain_add(fg, cochain_scale(gf, Rat(-sign)));
}

TaylorStructure line_bimodule() { return brane_bimodule(kLine, 4); }

MaurerCartan line_category() {
  static MaurerCartan mc = maurer_cartan(undeformed_algebra(kLine, Ambient::A),
                                         undeformed_algebra(kLine, Ambient::B), line_bimodule(),
                                         CochainCaps{3, 2, 2, 3, 4});
  return mc;
}

// Product cochains of the two algebras.
Cochain mu_cochain(Ambient a) {
  Cochain c = Cochain::zero(kLine, 1);
  if (a == Ambient::A)
    c.a_part[2] = graded_product(kLine, Ambient::A);
  else
    c.b_part[2] = graded_product(kLine, Ambient::B);
  return c;
}

Cochain constant_cochain(Ambient amb, const Monomial& mo) {
  ElementaryCochain e;
  e.part = amb == Ambient::A ? 'A' : 'B';
  e.m = 0;
  e.output = mo;
  return elementary_to_cochain(kLine, e);
}

Monomial monomial_theta() {
  return GradedElement::odd_gen(kLine, Ambient::A, 0).terms().begin()->first;
}

Monomial monomial_x() {
  return GradedElement::coord(kLine, Ambient::B, 0).terms().begin()->first;
}

// Random cochains: a few elementary pieces of one total degree.
Cochain random_cochain(std::mt19937_64& rng, int degree, int pieces, bool with_k = true,
                       bool with_b = true, bool with_a = true) {
  ComplexOptions opt;
  opt.max_arity = 2;
  opt.poly_cap = 2;
  opt.with_a = with_a;
  opt.with_k = with_k;
  opt.with_b = with_b;
  auto all = elementary_basis(kLine, opt);
  std::vector<ElementaryCochain> pool;
  for (const auto& e : all)
    if (elementary_total_degree(e) == degree) pool.push_back(e);
  REQUIRE(!pool.empty());
  Cochain out = Cochain::zero(kLine, degree);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::uniform_int_distribution<int> coeff(-3, 3);
  for (int i = 0; i < pieces; ++i) {
    int c = coeff(rng);
    if (c == 0) c = 1;
    out = cochain_add(out, cochain_scale(elementary_to_cochain(kLine, pool[pick(rng)]), Rat(c)));
  }
  return out;
}

}  // namespace

TEST_CASE("single insertions match the printed prefactor", "[hochschild]") {
  auto muA = graded_product(kLine, Ambient::A);
  auto muB = graded_product(kLine, Ambient::B);
  auto actL = module_product_left(kLine);
  auto actR = module_product_right(kLine);
  auto d11 = brane_tower_component(kLine, 1, Rat(1));

  MultilinearOperator psi;  // a -> theta * a, odd degree +1
  psi.split = kLine;
  psi.shape = algebra_shape(Ambient::A, 1);
  psi.degree = 1;
  psi.fn = [](const std::vector<GradedElement>& v) {
    return multiply(GradedElement::odd_gen(kLine, Ambient::A, 0), v[0]);
  };
  MultilinearOperator chi;  // a -> da/dtheta, odd degree -1
  chi.split = kLine;
  chi.shape = algebra_shape(Ambient::A, 1);
  chi.degree = -1;
  chi.fn = [](const std::vector<GradedElement>& v) {
    GradedElement acc = GradedElement::zero(kLine, Ambient::A);
    for (const auto& [mo, c] : v[0].terms())
      if (mo.odds == std::vector<int>{0}) {
        Monomial stripped = mo;
        stripped.odds.clear();
        acc += GradedElement::from_monomial(kLine, Ambient::A, stripped, c);
      }
    return acc;
  };

  struct Case {
    MultilinearOperator outer, inner;
    int pos;
  };
  std::vector<Case> cases = {
      {muA, muA, 0},  {muA, muA, 1},  {muA, psi, 0}, {muA, psi, 1}, {muA, chi, 1},
      {psi, muA, 0},  {psi, chi, 0},  {chi, psi, 0}, {muB, muB, 0}, {muB, muB, 1},
      {d11, muA, 0},  {d11, muB, 2},  {d11, actL, 1}, {d11, actR, 1}, {actL, muA, 0},
      {actR, muB, 1}, {actL, actL, 1}, {actR, actR, 0},
  };
  for (const auto& c : cases) {
    auto prod = insert_operator(c.outer, c.inner, c.pos);
    CHECK(operators_equal(prod, oracle_insert(c.outer, c.inner, c.pos), 4));
    CHECK(operators_equal(prod, brace_composite(c.outer, {c.inner}, {c.pos}), 4));
  }
}

TEST_CASE("brace with a constant is the multiplication commutator", "[hochschild]") {
  auto muA = graded_product(kLine, Ambient::A);
  Cochain theta = constant_cochain(Ambient::A, monomial_theta());
  auto theta_op = theta.a_part.at(0);

  auto left = insert_operator(muA, theta_op, 0);
  MultilinearOperator expect_left;  // +theta*b for odd theta
  expect_left.split = kLine;
  expect_left.shape = algebra_shape(Ambient::A, 1);
  expect_left.degree = 1;
  expect_left.fn = [](const std::vector<GradedElement>& v) {
    return multiply(GradedElement::odd_gen(kLine, Ambient::A, 0), v[0]);
  };
  CHECK(operators_equal(left, expect_left, 4));

  auto right = insert_operator(muA, theta_op, 1);
  MultilinearOperator expect_right;  // -(-1)^{|b|} b*theta
  expect_right.split = kLine;
  expect_right.shape = algebra_shape(Ambient::A, 1);
  expect_right.degree = 1;
  expect_right.fn = [](const std::vector<GradedElement>& v) {
    GradedElement acc = GradedElement::zero(kLine, Ambient::A);
    for (const auto& part : odd_components(v[0]))
      acc += multiply(part, GradedElement::odd_gen(kLine, Ambient::A, 0)) *
             Rat(-parity_sign(part.wedge_degree()));
    return acc;
  };
  CHECK(operators_equal(right, expect_right, 4));

  // graded-commutative product: the commutator collapses
  Cochain muc = mu_cochain(Ambient::A);
  Cochain braced = brace1(muc, theta);
  CHECK(cochain_is_zero(braced, CochainCaps{2, 0, 0, 0, 4}));
  Cochain xc = constant_cochain(Ambient::B, monomial_x());
  CHECK(cochain_is_zero(brace1(mu_cochain(Ambient::B), xc), CochainCaps{0, 0, 0, 2, 4}));
}

TEST_CASE("the product braced with itself is the associator", "[hochschild]") {
  auto muB = graded_product(kLine, Ambient::B);
  auto j1 = insert_operator(muB, muB, 0);
  std::vector<GradedElement> xs = {GradedElement::one(kLine, Ambient::B),
                                   GradedElement::coord(kLine, Ambient::B, 0),
                                   GradedElement::coord(kLine, Ambient::B, 0)};
  CHECK(j1.eval(xs).str() == "-1 * x1^2");  // one nesting alone is nonzero
  Cochain assoc = brace1(mu_cochain(Ambient::B), mu_cochain(Ambient::B));
  CHECK(cochain_is_zero(assoc, CochainCaps{0, 0, 0, 3, 4}));
  Cochain assocA = brace1(mu_cochain(Ambient::A), mu_cochain(Ambient::A));
  CHECK(cochain_is_zero(assocA, CochainCaps{3, 0, 0, 0, 4}));
}

TEST_CASE("structure cochain passes the Maurer-Cartan check", "[hochschild]") {
  MaurerCartan mc = line_category();
  Cochain res = gerstenhaber(mc.gamma, mc.gamma);
  CHECK(cochain_is_zero(res, CochainCaps{3, 2, 2, 3, 4}));

  // breaking one tower coefficient breaks the residual
  TaylorStructure bad(kLine, TaylorStructure::Kind::Bimodule, Ambient::K);
  bad.set_exact(1, 0, module_product_left(kLine));
  bad.set_exact(0, 1, module_product_right(kLine));
  bad.set_exact(1, 1, brane_tower_component(kLine, 1, Rat(1)));
  bad.set_exact(2, 1, brane_tower_component(kLine, 2, Rat(1)));  // should be 1/2
  CHECK_THROWS_AS(maurer_cartan(undeformed_algebra(kLine, Ambient::A),
                                undeformed_algebra(kLine, Ambient::B), bad,
                                CochainCaps{2, 2, 2, 2, 4}),
                  std::domain_error);
}

TEST_CASE("braces of random cochains match the insertion enumerator", "[hochschild]") {
  std::mt19937_64 rng(2024);
  CochainCaps caps{3, 2, 2, 3, 3};
  for (int trial = 0; trial < 8; ++trial) {
    int df = trial % 3, dg = (trial / 3) % 3 - 1;
    Cochain f = random_cochain(rng, df, 2);
    Cochain g = random_cochain(rng, dg, 2);
    CHECK(cochains_equal(brace1(f, g), oracle_brace1(f, g), caps));
    CHECK(cochains_equal(gerstenhaber(f, g), oracle_bracket(f, g), caps));
  }
}

TEST_CASE("bracket antisymmetry and graded jacobi", "[hochschild]") {
  std::mt19937_64 rng(7);
  CochainCaps caps{3, 1, 1, 3, 3};
  for (int trial = 0; trial < 6; ++trial) {
    Cochain f = random_cochain(rng, trial % 2, 2);
    Cochain g = random_cochain(rng, (trial + 1) % 3 - 1, 2);
    Cochain h = random_cochain(rng, 1, 1);
    int sfg = parity_sign(static_cast<long>(f.degree) * g.degree);
    Cochain anti = cochain_add(gerstenhaber(f, g), cochain_scale(gerstenhaber(g, f), Rat(sfg)));
    CHECK(cochain_is_zero(anti, caps));

    Cochain lhs = gerstenhaber(f, gerstenhaber(g, h));
    Cochain rhs = cochain_add(
        gerstenhaber(gerstenhaber(f, g), h),
        cochain_scale(gerstenhaber(g, gerstenhaber(f, h)), Rat(sfg)));
    CHECK(cochains_equal(lhs, rhs, caps));
  }
}

TEST_CASE("double braces satisfy the brace identity", "[hochschild]") {
  std::mt19937_64 rng(99);
  CochainCaps caps{3, 1, 1, 3, 3};
  for (int trial = 0; trial < 5; ++trial) {
    Cochain p = random_cochain(rng, 1, 2);
    Cochain q = random_cochain(rng, trial % 2, 1);
    Cochain r = random_cochain(rng, (trial % 3) - 1, 1);
    Cochain lhs = brace1(brace1(p, q), r);
    int s = parity_sign(static_cast<long>(q.degree) * r.degree);
    Cochain rhs = cochain_add(
        cochain_add(brace1(p, brace1(q, r)), brace(p, {q, r})),
        cochain_scale(brace(p, {r, q}), Rat(s)));
    CHECK(cochains_equal(lhs, rhs, caps));
  }
}

TEST_CASE("line category differential squares to zero", "[hochschild]") {
  MaurerCartan mc = line_category();
  CHECK(cochain_is_zero(differential(mc, mc.gamma), CochainCaps{3, 2, 1, 3, 4}));
  std::mt19937_64 rng(5);
  CochainCaps caps{3, 1, 1, 3, 3};
  for (int trial = 0; trial < 4; ++trial) {
    Cochain phi = random_cochain(rng, trial % 3 - 1, 2);
    CHECK(cochain_is_zero(differential(mc, differential(mc, phi)), caps));
  }
}

TEST_CASE("differential agrees with the independent bracket", "[hochschild]") {
  MaurerCartan mc = line_category();
  std::mt19937_64 rng(13);
  CochainCaps caps{3, 1, 1, 3, 3};
  for (int trial = 0; trial < 3; ++trial) {
    Cochain phi = random_cochain(rng, trial - 1, 2);
    CHECK(cochains_equal(differential(mc, phi), oracle_bracket(mc.gamma, phi), caps));
  }
}

TEST_CASE("differential splits into five typed parts", "[hochschild]") {
  MaurerCartan mc = line_category();
  std::mt19937_64 rng(17);
  CochainCaps caps{3, 1, 1, 3, 3};
  for (int trial = 0; trial < 3; ++trial) {
    Cochain phi = random_cochain(rng, trial % 2, 2);
    Cochain sum = Cochain::zero(kLine, phi.degree + 1);
    for (DiffPart part : {DiffPart::AA, DiffPart::KA, DiffPart::KK, DiffPart::KB, DiffPart::BB})
      sum = cochain_add(sum, differential_part(mc, phi, part));
    CHECK(cochains_equal(sum, differential(mc, phi), caps));
  }

  // phi concentrated in the A part: the K output is exactly d_K{phi_A}
  Cochain phiA = random_cochain(rng, 1, 2, false, false);
  REQUIRE(phiA.k_part.empty());
  REQUIRE(phiA.b_part.empty());
  Cochain dphi = differential(mc, phiA);
  Cochain ka = differential_part(mc, phiA, DiffPart::KA);
  Cochain dk_only = Cochain::zero(kLine, 1);
  dk_only.k_part = mc.gamma.k_part;
  Cochain expect = oracle_brace1(dk_only, phiA);
  Cochain dphi_k = Cochain::zero(kLine, dphi.degree);
  dphi_k.k_part = dphi.k_part;
  CHECK(cochains_equal(dphi_k, expect, caps));
  CHECK(cochains_equal(ka, expect, caps));

  // phi concentrated in the K part stays K shaped
  Cochain phiK = random_cochain(rng, 0, 2, true, false, false);
  REQUIRE(!phiK.k_part.empty());
  Cochain dphiK = differential(mc, phiK);
  CHECK(dphiK.a_part.empty());
  CHECK(dphiK.b_part.empty());
}

TEST_CASE("projections are chain maps", "[hochschild]") {
  MaurerCartan mc = line_category();
  std::mt19937_64 rng(23);
  CochainCaps caps{3, 1, 1, 3, 3};
  for (int trial = 0; trial < 3; ++trial) {
    Cochain phi = random_cochain(rng, trial % 3 - 1, 2);
    for (Ambient tgt : {Ambient::A, Ambient::B}) {
      Cochain lhs = project(differential(mc, phi), tgt);
      Cochain rhs = gerstenhaber(project(mc.gamma, tgt), project(phi, tgt));
      CHECK(cochains_equal(lhs, rhs, caps));
    }
  }

  // the projection of the structure cochain is the bare algebra structure
  Cochain pa = project(mc.gamma, Ambient::A);
  Cochain muc = mu_cochain(Ambient::A);
  CHECK(cochains_equal(pa, muc, CochainCaps{3, 0, 0, 0, 4}));
  CHECK(pa.k_part.empty());
  CHECK(pa.b_part.empty());

  Cochain phiK = random_cochain(rng, 1, 2, true, false, false);
  CHECK(cochain_is_zero(project(phiK, Ambient::A), caps));
  CHECK(cochain_is_zero(project(phiK, Ambient::B), caps));
  CHECK_THROWS_AS(project(phiK, Ambient::K), std::invalid_argument);
}

TEST_CASE("zero differential complex has betti equal to dimension", "[hochschild]") {
  TaylorStructure zA(kLine, TaylorStructure::Kind::Algebra, Ambient::A);
  TaylorStructure zB(kLine, TaylorStructure::Kind::Algebra, Ambient::B);
  TaylorStructure zK(kLine, TaylorStructure::Kind::Bimodule, Ambient::K);
  MaurerCartan mc0 = maurer_cartan(zA, zB, zK, CochainCaps{2, 1, 1, 2, 3});

  ComplexOptions opt;
  opt.max_arity = 1;
  opt.poly_cap = 1;
  auto blocks = two_object_complex(mc0, opt);
  long total = 0;
  auto table = cohomology_ranks(blocks, -3, 3);
  REQUIRE(!table.empty());
  for (const auto& e : table) {
    CHECK(e.betti == e.dim);
    CHECK(e.rank_out == 0);
    CHECK(e.reliable);
    total += e.dim;
  }
  CHECK(total == static_cast<long>(elementary_basis(kLine, opt).size()));
}

TEST_CASE("kernel of the B projection is acyclic in a reliable window", "[hochschild]") {
  MaurerCartan mc = line_category();
  ComplexOptions opt;
  opt.with_b = false;
  opt.max_arity = 3;
  opt.poly_cap = 3;
  opt.t_lo = -2;
  opt.t_hi = 3;
  opt.w_lo = -1;
  opt.w_hi = 1;
  auto blocks = two_object_complex(mc, opt);
  auto table = cohomology_ranks(blocks, -1, 2);
  int reliable_entries = 0;
  for (const auto& e : table) {
    if (!e.reliable) continue;
    ++reliable_entries;
    INFO("degree " << e.degree << " weight " << e.internal << " dim " << e.dim);
    CHECK(e.betti == 0);
  }
  CHECK(reliable_entries >= 3);
}
