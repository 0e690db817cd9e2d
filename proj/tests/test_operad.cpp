#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "fixtures.hpp"
#include "lqft/operad.hpp"

using namespace lqft;

namespace {

// Oracle: label every index, reorder whole blocks as the right action
// prescribes and read the labels back.
Perm block_oracle(const Perm& sigma, const std::vector<std::size_t>& k) {
  std::vector<std::vector<std::size_t>> blocks;
  std::size_t next = 0;
  for (std::size_t a : k) {
    blocks.emplace_back();
    for (std::size_t t = 0; t < a; ++t) blocks.back().push_back(next++);
  }
  Perm out;
  for (std::size_t i = 0; i < sigma.size(); ++i)
    for (std::size_t x : blocks[sigma[i]]) out.push_back(x);
  return out;
}

std::vector<std::vector<std::size_t>> arity_tuples(std::size_t n, std::size_t kmax) {
  std::vector<std::vector<std::size_t>> out{{}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& t : out)
      for (std::size_t k = 0; k <= kmax; ++k) {
        next.push_back(t);
        next.back().push_back(k);
      }
    out = next;
  }
  return out;
}

bool has_entry(const Report& r, const std::string& check, const std::string& status) {
  for (const auto& e : r.entries())
    if (e.check == check && e.status == status) return true;
  return false;
}

PrefactorizationOperad fragment(std::vector<std::pair<std::string, CausalSet>> sets,
                                std::size_t max_arity = 3) {
  std::vector<PrefactorizationOperad::Color> colors;
  for (auto& [name, set] : sets) colors.push_back({name, share(std::move(set))});
  return PrefactorizationOperad(std::move(colors), max_arity);
}

}  // namespace

TEST_CASE("block permutation examples") {
  CHECK(block_permutation({1, 0}, {2, 1}) == Perm{2, 0, 1});
  CHECK(perm_string(block_permutation({1, 0}, {2, 1})) == "(3 1 2)");
  CHECK(block_permutation({0, 1, 2}, {2, 0, 3}) == identity_perm(5));
  CHECK(block_permutation({1, 0}, {1, 1}) == Perm{1, 0});
  CHECK_THROWS_WITH_AS(block_permutation({1, 0}, {1}), doctest::Contains("LengthMismatch"),
                       Error);
}

TEST_CASE("sum permutation examples") {
  CHECK(sum_permutation({identity_perm(2), identity_perm(3)}) == identity_perm(5));
  CHECK(sum_permutation({Perm{2, 0, 1}}) == Perm{2, 0, 1});
  CHECK(sum_permutation({Perm{1, 0}, identity_perm(2)}) == Perm{1, 0, 2, 3});
}

TEST_CASE("block and sum permutations against index oracle") {
  for (std::size_t n = 0; n <= 3; ++n)
    for (const auto& k : arity_tuples(n, 3))
      for (const Perm& s : all_perms(n)) {
        CHECK(block_permutation(s, k) == block_oracle(s, k));
        // Reordering the concatenated labels by the block permutation is the
        // same as reordering the blocks.
        std::size_t total = std::accumulate(k.begin(), k.end(), std::size_t{0});
        CHECK(permute_tuple(identity_perm(total), block_permutation(s, k)) ==
              block_oracle(s, k));
        for (const Perm& t : all_perms(n)) {
          Perm lhs = block_permutation(compose_perm(s, t), k);
          Perm rhs = compose_perm(block_permutation(s, k),
                                  block_permutation(t, permute_tuple(k, s)));
          CHECK(lhs == rhs);
        }
      }
  for (std::size_t a = 0; a <= 3; ++a)
    for (std::size_t b = 0; b <= 3; ++b)
      for (const Perm& s : all_perms(a))
        for (const Perm& t : all_perms(b)) {
          Perm sum = sum_permutation({s, t});
          REQUIRE(sum.size() == a + b);
          for (std::size_t i = 0; i < a; ++i) CHECK(sum[i] == s[i]);
          for (std::size_t i = 0; i < b; ++i) CHECK(sum[a + i] == a + t[i]);
        }
}

TEST_CASE("permutation group laws") {
  for (std::size_t n = 0; n <= 4; ++n)
    for (const Perm& s : all_perms(n)) {
      CHECK(is_perm(s));
      CHECK(compose_perm(s, inverse_perm(s)) == identity_perm(n));
      for (const Perm& t : all_perms(n)) {
        std::vector<int> xs(n);
        std::iota(xs.begin(), xs.end(), 10);
        CHECK(permute_tuple(permute_tuple(xs, s), t) == permute_tuple(xs, compose_perm(s, t)));
      }
    }
}

TEST_CASE("trivial one-color operad with only units") {
  TableOperad o;
  auto c = o.add_color("c");
  auto u = o.add_op("1", {c}, c);
  o.set_unit(c, u);
  o.set_compose(u, {u}, u);
  Report r = check_operad_axioms(o, {.require_total = true});
  CHECK(r.ok());
}

TEST_CASE("endomorphism operad of a 2-element set passes") {
  FunctionOperad e = endomorphism_operad({2}, 2);
  CHECK(e.num_ops() == 2 + 4 + 16);
  Report r = check_operad_axioms(e);
  CHECK(r.ok());
  CHECK(has_entry(r, "associativity", "pass"));
  CHECK(has_entry(r, "equivariance-block", "pass"));
  CHECK(has_entry(r, "equivariance-sum", "pass"));
  // The materialized copy is the same operad.
  TableOperad t = materialize(e);
  CHECK(compare_operads(e, t, "endo").ok());
  CHECK(check_operad_axioms(t).ok());
}

TEST_CASE("two-color endomorphism operad passes") {
  FunctionOperad e = endomorphism_operad({1, 2}, 2);
  CHECK(check_operad_axioms(e).ok());
}

TEST_CASE("corrupted composition entry is caught with its witness") {
  FunctionOperad e = endomorphism_operad({2}, 2);
  TableOperad t = materialize(e);
  std::size_t c = 0;
  // not: X0->X0 swapping the two values.
  std::size_t neg = *e.find(OpSig{{c}, c}, {1, 0});
  std::size_t k0 = *e.find(OpSig{{}, c}, {0});
  std::size_t k1 = *e.find(OpSig{{}, c}, {1});
  REQUIRE(t.compose(neg, {k0}) == k1);
  t.set_compose(neg, {k0}, k0);
  Report r = check_operad_axioms(t);
  CHECK_FALSE(r.ok());
  bool witnessed = false;
  for (const auto& en : r.entries())
    if (en.status == "fail" && en.witness.find(e.op_name(neg)) != std::string::npos &&
        en.witness.find(e.op_name(k0)) != std::string::npos)
      witnessed = true;
  CHECK(witnessed);
  CHECK(compare_operads(e, t, "endo").failed("same-operad"));
}

TEST_CASE("corrupted permutation entry is caught") {
  FunctionOperad e = endomorphism_operad({2}, 2);
  TableOperad t = materialize(e);
  // First projection, swapped, should be the second projection.
  std::size_t c = 0;
  std::size_t p1 = *e.find(OpSig{{c, c}, c}, {0, 1, 0, 1});
  std::size_t p2 = *e.find(OpSig{{c, c}, c}, {0, 0, 1, 1});
  REQUIRE(t.permute(p1, {1, 0}) == p2);
  t.set_permute(p1, {1, 0}, p1);
  Report r = check_operad_axioms(t);
  CHECK(r.failed("permutation-action"));
}

TEST_CASE("random function operads are operads") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    FunctionOperad o = random_function_operad(seed);
    CAPTURE(seed);
    CHECK(o.num_colors() <= 3);
    CHECK(o.num_ops() <= 50);
    CHECK(check_operad_axioms(o).ok());
    // Same seed, same operad.
    FunctionOperad again = random_function_operad(seed);
    CHECK(compare_operads(o, again, "seed").ok());
  }
}

TEST_CASE("prefactorization operad of the empty set and a diamond") {
  auto o = fragment({{"empty", CausalSet({}, {})}, {"M", fx::diamond()}});
  std::size_t e = *o.find_color("empty");
  std::size_t m = *o.find_color("M");
  std::size_t nullary = 0;
  for (std::size_t op : o.ops_into(m))
    if (o.arity(op) == 0) ++nullary;
  CHECK(nullary == 1);
  // The empty set embeds once into each color, and the diamond has two
  // automorphisms.
  CHECK(o.ops_with(OpSig{{e}, m}).size() == 1);
  CHECK(o.ops_with(OpSig{{m}, m}).size() == 2);
  CHECK(o.ops_with(OpSig{{m}, e}).empty());
  CHECK(check_operad_axioms(o).ok());
}

TEST_CASE("prefactorization operad of a point and a 2-antichain") {
  auto o = fragment({{"pt", fx::point()}, {"A", fx::poset("u v")}});
  std::size_t pt = *o.find_color("pt");
  std::size_t a = *o.find_color("A");
  std::size_t uv = *o.find_op(a, {pt, pt}, {{0}, {1}});
  std::size_t vu = *o.find_op(a, {pt, pt}, {{1}, {0}});
  CHECK(o.permute(uv, {1, 0}) == vu);
  CHECK(o.permute(vu, {1, 0}) == uv);
  CHECK_FALSE(o.find_op(a, {pt, pt}, {{0}, {0}}));
  CHECK(o.ops_with(OpSig{{pt, pt}, a}).size() == 2);
  CHECK(check_operad_axioms(o).ok());
}

TEST_CASE("prefactorization operad of a point and a chain") {
  auto o = fragment({{"pt", fx::point()}, {"C", fx::poset("x<y")}});
  std::size_t pt = *o.find_color("pt");
  std::size_t c = *o.find_color("C");
  CHECK(o.ops_with(OpSig{{pt, pt}, c}).empty());
  CHECK(o.ops_with(OpSig{{pt}, c}).size() == 2);
  CHECK(check_operad_axioms(o).ok());
}

TEST_CASE("prefactorization composition is componentwise") {
  auto o = fragment({{"pt", fx::point()}, {"A", fx::poset("u v")}, {"D", fx::diamond()}});
  CHECK(check_operad_axioms(o).ok());
  std::size_t pt = *o.find_color("pt");
  std::size_t a = *o.find_color("A");
  std::size_t d = *o.find_color("D");
  // A into the middle of D, then both points into A.
  std::size_t f = *o.find_op(d, {a}, {{1, 2}});
  std::size_t g = *o.find_op(a, {pt, pt}, {{1}, {0}});
  auto fg = o.compose(f, {g});
  REQUIRE(fg);
  CHECK(*fg == *o.find_op(d, {pt, pt}, {{2}, {1}}));
  CHECK(o.is_cauchy(f));
  // The minimum of the diamond is a slab; a side point misses a chain.
  CHECK(o.is_cauchy(*o.find_op(d, {pt}, {{0}})));
  CHECK_FALSE(o.is_cauchy(*o.find_op(d, {pt}, {{1}})));
}

TEST_CASE("multifunctors on a 3-color example") {
  FunctionOperad e = endomorphism_operad({2, 2, 2}, 1);
  // Relabel colors by a permutation; operations keep their tables.
  auto relabel = [&](const Perm& p) {
    Multifunctor f{&e, &e, p, {}};
    for (std::size_t op = 0; op < e.num_ops(); ++op) {
      OpSig s = e.sig(op);
      for (auto& c : s.inputs) c = p[c];
      s.output = p[s.output];
      f.on_ops.push_back(*e.find(s, e.table(op)));
    }
    return f;
  };
  Multifunctor f = relabel({1, 2, 0});
  Multifunctor g = relabel({1, 0, 2});
  CHECK(check_multifunctor(f).ok());
  CHECK(check_multifunctor(g).ok());
  Multifunctor gf = compose_multifunctors(g, f);
  // Table oracle: apply f then g pointwise.
  for (std::size_t c = 0; c < 3; ++c) CHECK(gf.on_colors[c] == g.on_colors[f.on_colors[c]]);
  for (std::size_t op = 0; op < e.num_ops(); ++op) CHECK(gf.on_ops[op] == g.on_ops[f.on_ops[op]]);
  CHECK(check_multifunctor(gf).ok());
  Multifunctor id = identity_multifunctor(e);
  Multifunctor fid = compose_multifunctors(f, id);
  CHECK(fid.on_colors == f.on_colors);
  CHECK(fid.on_ops == f.on_ops);

  MultinaturalTransformation z = identity_transformation(f);
  CHECK(check_multinatural(z).ok());
  Multifunctor fid2 = compose_multifunctors(f, id);
  MultinaturalTransformation w = whisker_right(z, id, &fid2, &fid2);
  CHECK(w.components == identity_transformation(fid2).components);
  MultinaturalTransformation v = vertical_compose(z, z);
  CHECK(v.components == z.components);

  // Swapping values on one color is not natural for the constants.
  MultinaturalTransformation bad = z;
  bad.components[0] = *e.find(OpSig{{f.on_colors[0]}, f.on_colors[0]}, {1, 0});
  CHECK(check_multinatural(bad).failed("multinatural-square"));

  Multifunctor broken = f;
  broken.on_ops[e.unit(0)] = *e.find(OpSig{{1}, 1}, {0, 0});
  CHECK_FALSE(check_multifunctor(broken).ok());
  CHECK_THROWS_WITH_AS(compose_multifunctors(
                           f, Multifunctor{&e, nullptr, {}, {}}),
                       doctest::Contains("BoundaryMismatch"), Error);
}

TEST_CASE("finite groupoid checks") {
  FiniteGroupoid g;
  auto a = g.add_object();
  auto b = g.add_object();
  auto ia = g.add_morphism(a, a), ib = g.add_morphism(b, b);
  auto f = g.add_morphism(a, b), fi = g.add_morphism(b, a);
  g.set_identity(a, ia);
  g.set_identity(b, ib);
  g.set_inverse(ia, ia);
  g.set_inverse(ib, ib);
  g.set_inverse(f, fi);
  g.set_inverse(fi, f);
  for (auto [x, y, z] : std::vector<std::tuple<std::size_t, std::size_t, std::size_t>>{
           {ia, ia, ia}, {ib, ib, ib}, {f, ia, f}, {ib, f, f}, {fi, ib, fi}, {ia, fi, fi},
           {fi, f, ia}, {f, fi, ib}})
    g.set_compose(x, y, z);
  CHECK(g.check("G").ok());
  g.set_inverse(f, f);
  CHECK_FALSE(g.check("G").ok());
}
