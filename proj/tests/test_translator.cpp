#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lqft/error.hpp"
#include "lqft/examples.hpp"
#include "lqft/translator.hpp"

using namespace lqft;

namespace {

std::string failures(const Report& r) {
  std::string s;
  for (const auto& e : r.entries())
    if (e.status == "fail") s += e.check + ": " + e.witness + "\n";
  return s;
}

// The diamond fragment, its truncation and both windows, built once.
struct World {
  PrefactorizationOperad p = diamond_prefactorization();
  BordismFragment f = diamond_fragment();
  Truncation t = tau(f);
  TranslationContext ctx = make_context(p, f, t);
  Model a = twisted_cyclic_model(p);

  // Class of the 1-ary bordism from object `in` to object `out` with N the
  // output's M and the input's events sent to the named events.
  std::size_t cls(std::size_t in, std::size_t out,
                  const std::vector<std::pair<std::string, std::string>>& pairs) {
    Bordism b;
    b.inputs = {f.object(in)};
    b.output = f.object(out);
    b.N = b.output.M;
    b.iota1 = full_collar(*b.N);
    Collar c{0, std::vector<std::size_t>(b.inputs[0].M->size(), kNone)};
    for (const auto& [x, y] : pairs) {
      std::size_t i = b.inputs[0].M->index(x);
      c.domain |= bit(i);
      c.map[i] = b.N->index(y);
    }
    b.iota0 = {c};
    auto op = f.intern_op(b);
    REQUIRE(op);
    auto k = class_of_op(f, t, *op);
    REQUIRE(k);
    return *k;
  }
};

World& world() {
  static World w;
  return w;
}

}  // namespace

TEST_CASE("the diamond translation context") {
  World& w = world();
  CHECK(w.ctx.color_of == std::vector<std::size_t>{0, 1, 1, 1});
  CHECK(w.ctx.surfaces[0].size() == 1);
  CHECK(w.ctx.surfaces[1].size() == 3);
  CHECK(w.ctx.surface_object[1] == std::vector<std::size_t>{1, 2, 3});
}

TEST_CASE("F of the twisted cyclic model") {
  World& w = world();
  Model fa = aqft_to_fqft(w.a, w.ctx, true);
  for (const Report& r : {check_model(fa, "FA"), check_time_slice(fa, "FA"),
                          check_additivity_fqft(fa, w.f, w.t, "FA")})
    CHECK_MESSAGE(r.ok(), failures(r));
  for (std::size_t d = 0; d < 4; ++d) CHECK(*fa.ops[w.t.operad.unit(d)] == identity_table(3));
  // pt -> (D,{d}) through b: |D| - |pt| is odd, so negation.
  CHECK(*fa.ops[w.cls(0, 3, {{"p", "b"}})] == HomTable{0, 2, 1});
  // (D,{a}) -> (D,{d}) along the identity of D.
  CHECK(*fa.ops[w.cls(1, 3, {{"a", "a"}, {"b", "b"}, {"c", "c"}, {"d", "d"}})] == identity_table(3));
  Model triv = aqft_to_fqft(trivial_model(w.p), w.ctx);
  for (const auto& h : triv.ops) CHECK(*h == HomTable{0});
}

TEST_CASE("both round trips on the diamond") {
  World& w = world();
  Report ra = roundtrip_aqft(w.a, w.ctx, "A", true);
  CHECK_MESSAGE(ra.ok(), failures(ra));
  Model fa = aqft_to_fqft(w.a, w.ctx);
  Report rf = roundtrip_fqft(fa, w.ctx, "FA", true);
  CHECK_MESSAGE(rf.ok(), failures(rf));
  // A of F(A): the binary operation at (b, c) is (x, y) -> -x - y.
  AqftFromFqft af = fqft_to_aqft(fa, w.ctx, true);
  CausalSet d = diamond_set();
  auto bc = w.p.find_op(1, {0, 0}, {{d.index("b")}, {d.index("c")}});
  REQUIRE(bc);
  const HomTable& h = *af.model.ops[*bc];
  std::vector<const Monoid*> dom{&af.model.colors[0], &af.model.colors[0]};
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t y = 0; y < 3; ++y) CHECK(h[encode_tuple(dom, {x, y})] == (6 - x - y) % 3);
  Report rt = roundtrip_aqft(trivial_model(w.p), w.ctx, "1");
  CHECK(rt.ok());
}

TEST_CASE("round trip of transformations") {
  World& w = world();
  ModelTransformation neg{{HomTable{0, 2, 1}, HomTable{0, 2, 1}}};
  Report r = roundtrip_transformation(w.a, w.a, neg, w.ctx, "neg");
  CHECK_MESSAGE(r.ok(), failures(r));
  Model triv = trivial_model(w.p);
  ModelTransformation bang{{HomTable{0, 0, 0}, HomTable{0, 0, 0}}};
  Report s = roundtrip_transformation(w.a, triv, bang, w.ctx, "bang");
  CHECK_MESSAGE(s.ok(), failures(s));
  // Doubling the D component only is not natural.
  ModelTransformation bad{{identity_table(3), HomTable{0, 2, 1}}};
  CHECK(check_transformation(w.a, w.a, bad, "bad").failed("transformation"));
}

TEST_CASE("translation preconditions") {
  World& w = world();
  Model a = w.a;
  CausalSet d = diamond_set();
  auto at_a = w.p.find_op(1, {0}, {{d.index("a")}});
  REQUIRE(at_a);
  a.ops[*at_a] = HomTable{0, 0, 0};
  CHECK_THROWS_WITH_AS(aqft_to_fqft(a, w.ctx, true), doctest::Contains("TimeSliceRequired"), Error);
  // Negating pt -> (D,{d}) through a breaks additivity at (D,{d}).
  Model fa = aqft_to_fqft(w.a, w.ctx);
  std::size_t k = w.cls(0, 3, {{"p", "a"}});
  fa.ops[k] = compose_tables(HomTable{0, 2, 1}, *fa.ops[k]);
  CHECK(check_time_slice(fa, "F").ok());
  Report add = check_additivity_fqft(fa, w.f, w.t, "F");
  CHECK(add.failed("additivity"));
  CHECK_THROWS_WITH_AS(fqft_to_aqft(fa, w.ctx), doctest::Contains("AdditivityRequired"), Error);
}

TEST_CASE("a non-Cauchy operation into a maximal event has no later surface") {
  // pt -> {u, v} at u: the only Cauchy antichain of the target is {u, v},
  // which is not strictly above u.
  auto pt = share(point_set());
  auto two = share(CausalSet({"u", "v"}, {}));
  PrefactorizationOperad p({{"pt", pt}, {"A", two}}, 1);
  FragmentOptions opt;
  opt.max_arity = 1;
  BordismFragment f = BordismFragment::enumerate({{"pt", pt, bit(0)}, {"A", two, bit(0) | bit(1)}}, {pt, two}, opt);
  Truncation t = tau(f);
  TranslationContext ctx = make_context(p, f, t);
  Model triv = trivial_model(t.operad);
  CHECK_THROWS_WITH_AS(fqft_to_aqft(triv, ctx), doctest::Contains("NoLaterSurface"), Error);
}
