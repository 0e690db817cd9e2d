#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "lqft/bordism.hpp"
#include "lqft/error.hpp"
#include "stacks.hpp"

using namespace lqft;

namespace {

std::string failures(const Report& r) {
  std::string s;
  for (const auto& e : r.entries())
    if (e.status == "fail") s += e.check + ": " + e.witness + "\n";
  return s;
}

PointedObject obj(const std::string& name, const CausalSet& m, const std::vector<std::string>& s) {
  return {name, share(CausalSet(m)), m.mask(s)};
}

// Collar from named events of the object to named events of n.
Collar collar(const PointedObject& o, const CausalSet& n,
              const std::vector<std::pair<std::string, std::string>> pairs) {
  Collar c{0, std::vector<std::size_t>(o.M->size(), kNone)};
  for (const auto& [a, b] : pairs) {
    std::size_t x = o.M->index(a);
    c.domain |= bit(x);
    c.map[x] = n.index(b);
  }
  return c;
}

// Independent convexity test on the order relation.
bool convex_by_definition(const CausalSet& m, Bits s) {
  for (std::size_t x = 0; x < m.size(); ++x)
    for (std::size_t y = 0; y < m.size(); ++y)
      for (std::size_t z = 0; z < m.size(); ++z)
        if (has(s, x) && has(s, z) && !has(s, y) && m.leq(x, y) && m.leq(y, z)) return false;
  return true;
}

// 1-ary bordism on the chain x<y<z from the point at `from` to the point at `to`.
Bordism chain_step(const PointedObject& pt, const CausalSetRef& chain, const std::string& from,
                   const std::string& to) {
  Bordism b;
  b.inputs = {pt};
  b.output = pt;
  b.N = chain;
  b.iota0 = {collar(pt, *chain, {{"p", from}})};
  b.iota1 = collar(pt, *chain, {{"p", to}});
  return b;
}

std::vector<PointedObject> objects_of(const stacks::Stack& s) {
  std::vector<PointedObject> out;
  auto add = [&](const PointedObject& o) {
    for (const auto& x : out)
      if (same_object(x, o)) return;
    out.push_back(o);
  };
  auto all = [&](const Bordism& b) {
    add(b.output);
    for (const auto& i : b.inputs) add(i);
  };
  all(s.psi);
  for (const auto* level : {&s.phis, &s.chis, &s.omegas})
    for (const auto& b : *level) all(b);
  return out;
}

}  // namespace

TEST_CASE("identity bordisms are valid") {
  CausalSet d = fx::diamond();
  for (const auto& s : {std::vector<std::string>{"a"}, {"b", "c"}, {"d"}}) {
    Report r = validate_bordism(identity_bordism(obj("D", d, s)));
    CHECK_MESSAGE(r.ok(), failures(r));
  }
}

TEST_CASE("a 1-ary Cauchy bordism may have equal surfaces") {
  PointedObject pt = obj("pt", fx::point(), {"p"});
  auto chain = share(fx::chain3());
  Bordism b = chain_step(pt, chain, "y", "y");
  CHECK(is_cauchy_bordism(b));
  CHECK(validate_bordism(b).ok());
  // Going backwards in time is not a bordism.
  CHECK(validate_bordism(chain_step(pt, chain, "z", "x")).failed("bordism-surfaces"));
}

TEST_CASE("a 2-ary bordism touching the output surface is invalid") {
  auto n = share(fx::poset("a<c b<d b<e"));
  PointedObject pt = obj("pt", fx::point(), {"p"});
  PointedObject out{"out", n, n->mask({"c", "d", "e"})};
  Bordism b;
  b.inputs = {pt, pt};
  b.output = out;
  b.N = n;
  b.iota1 = full_collar(*n);
  b.iota0 = {collar(pt, *n, {{"p", "a"}}), collar(pt, *n, {{"p", "d"}})};
  Report r = validate_bordism(b);
  CHECK(r.failed("bordism-surfaces"));
  // Moving the second input into the strict past repairs it.
  b.iota0[1] = collar(pt, *n, {{"p", "b"}});
  CHECK_MESSAGE(validate_bordism(b).ok(), failures(validate_bordism(b)));
  // Comparable inputs are rejected.
  b.iota0[1] = collar(pt, *n, {{"p", "c"}});
  CHECK(validate_bordism(b).failed("bordism-disjoint"));
}

TEST_CASE("collars must be slab neighbourhoods embedded in N") {
  CausalSet d = fx::diamond();
  PointedObject mid = obj("D", d, {"b", "c"});
  Bordism b = identity_bordism(mid);
  b.iota0[0] = collar(mid, d, {{"b", "b"}, {"c", "c"}, {"d", "d"}, {"a", "a"}});
  CHECK(validate_bordism(b).ok());
  // {b,c,d} minus d is still a slab, {b} alone misses c.
  b.iota0[0] = collar(mid, d, {{"b", "b"}});
  CHECK(validate_bordism(b).failed("bordism-collars"));
  // Swapping b and c is an automorphism, mapping b to d is not an embedding.
  b.iota0[0] = collar(mid, d, {{"b", "c"}, {"c", "b"}});
  CHECK(validate_bordism(b).ok());
  b.iota0[0] = collar(mid, d, {{"b", "d"}, {"c", "c"}});
  CHECK(validate_bordism(b).failed("bordism-collars"));
}

TEST_CASE("overhang of two 3-chains overlapping in the middle") {
  // M = x<y<z with surface y; both collars are the whole chain.
  auto m = share(fx::chain3());
  PointedObject c{"C", m, m->mask({"y"})};
  auto n1 = share(fx::poset("u<x x<y y<z"));
  auto n0 = share(fx::poset("x<y y<z z<w"));
  Bordism outer, inner;
  outer.inputs = {c};
  outer.output = c;
  outer.N = n1;
  outer.iota0 = {collar(c, *n1, {{"x", "x"}, {"y", "y"}, {"z", "z"}})};
  outer.iota1 = collar(c, *n1, {{"x", "x"}, {"y", "y"}, {"z", "z"}});
  inner.inputs = {c};
  inner.output = c;
  inner.N = n0;
  inner.iota0 = {collar(c, *n0, {{"x", "x"}, {"y", "y"}, {"z", "z"}})};
  inner.iota1 = collar(c, *n0, {{"x", "x"}, {"y", "y"}, {"z", "z"}});
  REQUIRE(validate_bordism(outer).ok());
  REQUIRE(validate_bordism(inner).ok());
  Overhang o = overhang_regions(outer, {inner});
  // The strict past u of the shared surface is dropped, the collar kept.
  CHECK(o.n1plus == n1->mask({"x", "y", "z"}));
  CHECK(o.overlaps[0] == m->all());
  CHECK(o.n0minus[0] == n0->mask({"x", "y", "z"}));
  Composite k = compose_bordisms(outer, {inner});
  CHECK(k.result.N->size() == 3);
  CHECK(validate_bordism(k.result).ok());
}

TEST_CASE("the Cauchy 1-ary overhang is the causal future of the glued collar") {
  PointedObject pt = obj("pt", fx::point(), {"p"});
  auto chain = share(fx::chain3());
  Bordism outer = chain_step(pt, chain, "y", "z");
  Bordism inner = chain_step(pt, chain, "x", "y");
  Overhang o = overhang_regions(outer, {inner});
  CHECK(o.n1plus == chain->future(chain->mask({"y"})));
}

TEST_CASE("stacked chain bordisms concatenate") {
  PointedObject pt = obj("pt", fx::point(), {"p"});
  auto chain = share(fx::chain3());
  Composite k = compose_bordisms(chain_step(pt, chain, "x", "z"), {chain_step(pt, chain, "x", "z")});
  const CausalSet& n = *k.result.N;
  CHECK(n.size() == 5);
  // A single maximal chain from the input point to the output point.
  CHECK(n.maximal() == output_surface(k.result));
  CHECK(n.minimal() == input_surfaces(k.result));
  CHECK(popcount(n.past(output_surface(k.result))) == 5);
  CHECK(validate_bordism(k.result).ok());
}

TEST_CASE("a 2-ary bordism composed with two point bordisms") {
  PointedObject pt = obj("pt", fx::point(), {"p"});
  auto wedge = share(fx::poset("l<t r<t"));
  PointedObject top{"T", share(fx::point("t")), 1};
  Bordism outer;
  outer.inputs = {pt, pt};
  outer.output = top;
  outer.N = wedge;
  outer.iota0 = {collar(pt, *wedge, {{"p", "l"}}), collar(pt, *wedge, {{"p", "r"}})};
  outer.iota1 = collar(top, *wedge, {{"t", "t"}});
  REQUIRE(validate_bordism(outer).ok());
  auto step = share(fx::poset("s<p"));
  Bordism inner;
  inner.inputs = {pt};
  inner.output = pt;
  inner.N = step;
  inner.iota0 = {collar(pt, *step, {{"p", "s"}})};
  inner.iota1 = collar(pt, *step, {{"p", "p"}});
  Composite k = compose_bordisms(outer, {inner, inner});
  CHECK(k.result.N->size() == 5);
  CHECK(k.result.arity() == 2);
  CHECK(same_object(k.result.inputs[0], pt));
  CHECK(same_object(k.result.inputs[1], pt));
  CHECK(validate_bordism(k.result).ok());
  // Names of inner-only events are anchored at the outer image.
  CHECK(k.result.N->find("s@l").has_value());
  CHECK(k.result.N->find("s@r").has_value());
}

TEST_CASE("permutations act on bordisms") {
  PointedObject pt = obj("pt", fx::point(), {"p"});
  auto n = share(fx::poset("a<t b<t c<t"));
  PointedObject top{"T", share(fx::point("t")), 1};
  Bordism b;
  b.inputs = {pt, pt, pt};
  b.output = top;
  b.N = n;
  b.iota0 = {collar(pt, *n, {{"p", "a"}}), collar(pt, *n, {{"p", "b"}}), collar(pt, *n, {{"p", "c"}})};
  b.iota1 = collar(top, *n, {{"t", "t"}});
  CHECK(bordism_key(permute_bordism(b, {0, 1, 2})) == bordism_key(b));
  Bordism s = permute_bordism(b, {1, 0, 2});
  CHECK(s.iota0[0].map[0] == n->index("b"));
  for (const Perm& p : all_perms(3)) {
    Bordism q = permute_bordism(permute_bordism(b, p), inverse_perm(p));
    CHECK(bordism_key(q) == bordism_key(b));
    CHECK(validate_bordism(permute_bordism(b, p)).ok());
  }
  CHECK_THROWS_AS(permute_bordism(b, {0, 1}), Error);
}

TEST_CASE("one object at depth 1 gives the unit-only fragment") {
  PointedObject pt = obj("pt", fx::point(), {"p"});
  BordismFragment f({pt}, {}, 1);
  CHECK(f.base_ops() == 1);
  CHECK(f.num_vmorphs() == 1);
  Report r = check_pseudo_operad(f);
  CHECK_MESSAGE(r.ok(), failures(r));
  Truncation t = tau(f);
  CHECK(t.operad.num_ops() == 1);
}

TEST_CASE("two chained Cauchy bordisms at depth 2") {
  PointedObject pt = obj("pt", fx::point(), {"p"});
  auto chain = share(fx::chain3());
  Bordism g1 = chain_step(pt, chain, "x", "y");
  Bordism g2 = chain_step(pt, chain, "y", "z");
  BordismFragment f({pt}, {g1, g2}, 2, FragmentOptions{.max_events = 8});
  auto i1 = f.intern_op(g1), i2 = f.intern_op(g2);
  REQUIRE(i1);
  REQUIRE(i2);
  auto c = f.cmp(*i2, {*i1});
  REQUIRE(c);
  CHECK(*c < f.base_ops());
  auto a = f.assoc(*i2, {*i1}, {*i1});
  REQUIRE(a);
  // Both bracketings give the same chain, related by the identity.
  CHECK(*a == f.cell_id(f.csig(*a).from));
  PseudoCheckOptions opt;
  opt.max_tuples = 3000;
  Report r = check_pseudo_operad(f, opt);
  CHECK_MESSAGE(r.ok(), failures(r));
}

TEST_CASE("collar-shrunk duplicates share a class, other surfaces do not") {
  CausalSet d = fx::diamond();
  PointedObject mid = obj("D", d, {"b", "c"});
  auto dd = share(CausalSet(d));
  Bordism full = identity_bordism(mid);
  Bordism shrunk = full;
  shrunk.iota0[0] = collar(mid, d, {{"b", "b"}, {"c", "c"}, {"a", "a"}});
  shrunk.iota1 = collar(mid, d, {{"b", "b"}, {"c", "c"}});
  REQUIRE(validate_bordism(shrunk).ok());
  CHECK(find_globular_cell(full, shrunk).has_value());
  PointedObject low = obj("L", d, {"a"});
  Bordism up;
  up.inputs = {low};
  up.output = mid;
  up.N = dd;
  up.iota0 = {full_collar(d)};
  up.iota1 = full_collar(d);
  Bordism up2 = up;
  up2.iota0 = {collar(low, d, {{"a", "a"}})};
  Bordism swapped = up;
  swapped.iota1 = collar(mid, d, {{"a", "a"}, {"b", "c"}, {"c", "b"}, {"d", "d"}});
  REQUIRE(validate_bordism(swapped).ok());
  CHECK(find_globular_cell(up, up2).has_value());
  // The swap of b and c extends to an automorphism of the diamond.
  CHECK(find_globular_cell(up, swapped).has_value());
  PointedObject pt = obj("pt", fx::point(), {"p"});
  auto chain = share(fx::chain3());
  Bordism near = chain_step(pt, chain, "x", "y");
  Bordism far = chain_step(pt, chain, "x", "z");
  CHECK_FALSE(find_globular_cell(near, far).has_value());
  BordismFragment f({low, mid, pt}, {up, up2, swapped, shrunk, near, far}, 0);
  Truncation t = tau(f);
  CHECK(t.report.ok());
  auto cu = f.intern_op(up), cu2 = f.intern_op(up2), cs = f.intern_op(swapped);
  auto cn = f.intern_op(near), cf = f.intern_op(far);
  CHECK(t.class_of[*cu] == t.class_of[*cu2]);
  CHECK(t.class_of[*cu] == t.class_of[*cs]);
  CHECK(t.class_of[*cn] != t.class_of[*cf]);
  // Identity bordisms are the operadic units.
  for (std::size_t c = 0; c < f.num_objects(); ++c)
    CHECK(t.operad.unit(c) == t.class_of[f.unit(c)]);
}

TEST_CASE("explicit companions satisfy both identities") {
  CausalSet d = fx::diamond();
  PointedObject mid = obj("D", d, {"b", "c"});
  PointedObject two = obj("A", fx::poset("u v"), {"u", "v"});
  BordismFragment f({mid, two}, {}, 0);
  CHECK(f.num_vmorphs() == 8);
  for (std::size_t g = 0; g < f.num_vmorphs(); ++g) {
    auto c = f.companion(g);
    REQUIRE(c);
    Report r = check_companion(f, g, *c);
    CHECK_MESSAGE(r.ok(), (f.vmorph_name(g) + "\n" + failures(r)));
  }
}

TEST_CASE("random composable stacks") {
  stacks::Generator gen(20261015);
  std::size_t pentagons = 0, triangles = 0;
  for (int trial = 0; trial < 40; ++trial) {
    CAPTURE(trial);
    stacks::Stack s = stacks::random_stack(gen);
    Composite k = compose_bordisms(s.psi, s.phis);
    CHECK(convex_by_definition(*s.psi.N, k.regions.n1plus));
    for (std::size_t i = 0; i < s.phis.size(); ++i)
      CHECK(convex_by_definition(*s.phis[i].N, k.regions.n0minus[i]));
    Report r = validate_bordism(k.result);
    CHECK_MESSAGE(r.ok(), failures(r));
    // Output surface survives the overhang removal.
    CHECK((output_surface(s.psi) & k.regions.n1plus) == output_surface(s.psi));

    FragmentOptions opt{.max_events = 40, .max_ops = 5000, .max_arity = 16,
                        .enumerate_cells = false};
    std::vector<Bordism> gens{s.psi};
    for (const auto* level : {&s.phis, &s.chis, &s.omegas})
      gens.insert(gens.end(), level->begin(), level->end());
    BordismFragment f(objects_of(s), gens, 0, opt);
    auto id = [&](const Bordism& b) {
      auto x = f.intern_op(b);
      REQUIRE(x);
      return *x;
    };
    auto ids = [&](const std::vector<Bordism>& v) {
      std::vector<std::size_t> out;
      for (const auto& b : v) out.push_back(id(b));
      return out;
    };
    std::size_t psi = id(s.psi);
    auto phis = ids(s.phis), chis = ids(s.chis), omegas = ids(s.omegas);
    auto p = pentagon_holds(f, psi, phis, chis, omegas);
    REQUIRE(p);
    CHECK(*p);
    ++pentagons;
    for (const auto& t : triangles_hold(f, psi, phis)) {
      REQUIRE(t);
      CHECK(*t);
      ++triangles;
    }
  }
  CHECK(pentagons == 40);
  CHECK(triangles == 120);
}

namespace {

std::vector<PointedObject> diamond_objects() {
  CausalSet d = fx::diamond();
  return {obj("pt", fx::point(), {"p"}), obj("D0", d, {"a"}), obj("D1", d, {"b", "c"}),
          obj("D2", d, {"d"})};
}

BordismFragment diamond_fragment() {
  FragmentOptions opt;
  opt.max_arity = 2;
  return BordismFragment::enumerate(diamond_objects(), {share(fx::point()), share(fx::diamond())},
                                    opt);
}

}  // namespace

TEST_CASE("the enumerated diamond fragment") {
  BordismFragment f = diamond_fragment();
  // Frozen counts: 11 germs between the four objects.
  CHECK(f.num_vmorphs() == 11);
  CHECK(f.base_ops() == 245);
  CHECK_FALSE(f.cells_truncated());
  PseudoCheckOptions opt;
  opt.max_tuples = 5'000;
  Report r = check_pseudo_operad(f, opt);
  CHECK_MESSAGE(r.ok(), failures(r));
  for (std::size_t g = 0; g < f.num_vmorphs(); ++g) {
    auto c = f.companion(g);
    REQUIRE(c);
    CHECK(check_companion(f, g, *c).ok());
  }
  Truncation t = tau(f);
  CHECK_MESSAGE(t.report.ok(), failures(t.report));
  CHECK(t.operad.num_ops() == 66);
  // Composites leaving the finite fragment are undefined, never wrong.
  Report a = check_operad_axioms(t.operad);
  CHECK_MESSAGE(a.ok(), failures(a));
}

TEST_CASE("the unit of the adjunction on a bordism fragment") {
  PointedObject pt = obj("pt", fx::point(), {"p"});
  PointedObject two = obj("A", fx::poset("u v"), {"u", "v"});
  auto wedge = share(fx::poset("l<u r<v"));
  Bordism b;
  b.inputs = {pt, pt};
  b.output = two;
  b.N = wedge;
  b.iota0 = {collar(pt, *wedge, {{"p", "l"}}), collar(pt, *wedge, {{"p", "r"}})};
  b.iota1 = collar(two, *wedge, {{"u", "u"}, {"v", "v"}});
  REQUIRE(validate_bordism(b).ok());
  BordismFragment f({pt, two}, {b}, 1);
  Report r = check_unit(f, "fragment");
  CHECK_MESSAGE(r.ok(), failures(r));
}
