#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lqft/error.hpp"
#include "lqft/pseudo_operad.hpp"

using namespace lqft;

namespace {

std::string failures(const Report& r) {
  std::string s;
  for (const auto& e : r.entries())
    if (e.status == "fail") s += e.check + ": " + e.witness + "\n";
  return s;
}

TableOperad unit_only_operad() {
  TableOperad o;
  o.add_color("c");
  std::size_t u = o.add_op("u", {0}, 0);
  o.set_unit(0, u);
  o.set_compose(u, {u}, u);
  return o;
}

std::size_t nontrivial_vmorph(const IotaPseudoOperad& io) {
  for (std::size_t g = 0; g < io.num_vmorphs(); ++g)
    if (g != io.vid(io.vsig(g).first)) return g;
  FAIL("no nontrivial vertical morphism");
  return 0;
}

// One object, vertical Z/2 = {id, g}, the unit as only operation and the
// cells id_u and u(g). Passes the axioms, but g has no companion.
ExplicitPseudoOperad non_fibrant() {
  ExplicitPseudoOperad p;
  p.add_object("c");
  std::size_t id = p.add_vmorph("id", 0, 0), g = p.add_vmorph("g", 0, 0);
  p.set_vid(0, id);
  p.set_vcompose(id, id, id);
  p.set_vcompose(g, id, g);
  p.set_vcompose(id, g, g);
  p.set_vcompose(g, g, id);
  p.set_vinverse(g, g);
  std::size_t u = p.add_op("u", OpSig{{0}, 0});
  std::size_t iu = p.add_cell("id_u", CellSig{u, u, {id}, id});
  std::size_t ug = p.add_cell("u(g)", CellSig{u, u, {g}, g});
  p.set_unit(0, u);
  p.set_unit_cell(id, iu);
  p.set_unit_cell(g, ug);
  p.set_cell_id(u, iu);
  p.set_cell_inverse(iu, iu);
  p.set_cell_inverse(ug, ug);
  p.set_cell_vcompose(iu, iu, iu);
  p.set_cell_vcompose(ug, iu, ug);
  p.set_cell_vcompose(iu, ug, ug);
  p.set_cell_vcompose(ug, ug, iu);
  p.set_cmp(u, {u}, u);
  p.set_cmp_cells(iu, {iu}, iu);
  p.set_cmp_cells(ug, {ug}, ug);
  p.set_assoc(u, {u}, {u}, iu);
  p.set_lunit(u, iu);
  p.set_runit(u, iu);
  return p;
}

}  // namespace

TEST_CASE("iota of the unit-only operad") {
  TableOperad o = unit_only_operad();
  IotaPseudoOperad io(o);
  CHECK(io.num_vmorphs() == 1);
  CHECK(io.num_cells() == 1);
  Report r = check_pseudo_operad(io);
  CHECK_MESSAGE(r.ok(), failures(r));
  Truncation t = tau(io);
  CHECK(compare_operads(o, t.operad, "o").ok());
}

TEST_CASE("iota of the endomorphism operad of a 2-set") {
  FunctionOperad o = endomorphism_operad({2}, 2);
  IotaPseudoOperad io(o);
  // id and negation are the invertible 1-ary maps.
  CHECK(io.num_vmorphs() == 2);
  Report r = check_pseudo_operad(io);
  CHECK_MESSAGE(r.ok(), failures(r));
  for (const char* law : {"pentagon", "triangle", "coherence", "equivariance", "cell-composition"})
    CHECK_FALSE(r.failed(law));
}

TEST_CASE("companions in iota are the vertical morphisms themselves") {
  FunctionOperad o = endomorphism_operad({2}, 1);
  IotaPseudoOperad io(o);
  for (std::size_t g = 0; g < io.num_vmorphs(); ++g) {
    auto c = io.companion(g);
    REQUIRE(c);
    CHECK(c->op == io.op_of_vmorph(g));
    Report r = check_companion(io, g, *c);
    CHECK_MESSAGE(r.ok(), failures(r));
    // The generic search agrees.
    auto d = io.PseudoOperad::companion(g);
    REQUIRE(d);
    CHECK(d->op == c->op);
  }
}

TEST_CASE("a non-globular unitor is caught by the coherence check") {
  FunctionOperad o = endomorphism_operad({2}, 1);
  IotaPseudoOperad io(o);
  std::size_t g = nontrivial_vmorph(io);
  std::size_t neg = io.op_of_vmorph(g);
  ExplicitPseudoOperad e = materialize_pseudo(io);
  REQUIRE(check_pseudo_operad(e).ok());
  auto bad = io.cell(neg, {g}, g);
  REQUIRE(bad);
  REQUIRE(*bad < e.num_cells());
  CHECK(e.csig(*bad).to == neg);
  e.set_lunit(neg, *bad);
  Report r = check_pseudo_operad(e);
  CHECK(r.failed("coherence"));
  bool named = false;
  for (const auto& x : r.entries())
    if (x.check == "coherence" && x.status == "fail")
      named = named || x.witness.find("left unitor at " + io.op_name(neg)) != std::string::npos;
  CHECK(named);
}

TEST_CASE("a broken interchange is caught") {
  FunctionOperad o = endomorphism_operad({2}, 1);
  IotaPseudoOperad io(o);
  std::size_t g = nontrivial_vmorph(io);
  ExplicitPseudoOperad e = materialize_pseudo(io);
  std::size_t u = io.unit(0);
  std::size_t ug = io.unit_cell(g);
  // u(g) cmp u(g) := id_u keeps boundaries wrong, so the signature law fails.
  e.set_cmp_cells(ug, {ug}, io.cell_id(u));
  CHECK(check_pseudo_operad(e).failed("cell-composition"));
}

TEST_CASE("materialized iota truncates through the generic search") {
  FunctionOperad o = endomorphism_operad({2, 2}, 1);
  IotaPseudoOperad io(o);
  ExplicitPseudoOperad e = materialize_pseudo(io);
  Truncation t = tau(e);
  Report same = compare_operads(o, t.operad, "o");
  CHECK_MESSAGE(same.ok(), failures(same));
  CHECK(t.report.ok());
  for (std::size_t g = 0; g < e.num_vmorphs(); ++g)
    CHECK(check_companion(e, g, t.companions[g]).ok());
}

TEST_CASE("counit and unit on iota for random operads") {
  for (std::uint64_t seed = 1; seed <= 24; ++seed) {
    CAPTURE(seed);
    FunctionOperad o = random_function_operad(seed);
    Report r = check_counit_and_iota_unit(o, "random");
    CHECK_MESSAGE(r.ok(), failures(r));
    CHECK_FALSE(r.failed("counit"));
  }
}

TEST_CASE("iota of random operads satisfies the pseudo-operad laws") {
  PseudoCheckOptions opt;
  opt.max_tuples = 20'000;
  for (std::uint64_t seed = 100; seed < 106; ++seed) {
    CAPTURE(seed);
    FunctionOperad o = random_function_operad(seed);
    IotaPseudoOperad io(o);
    Report r = check_pseudo_operad(io, opt);
    CHECK_MESSAGE(r.ok(), failures(r));
  }
}

TEST_CASE("unit of the adjunction on a materialized pseudo-operad") {
  FunctionOperad o = endomorphism_operad({2}, 1);
  IotaPseudoOperad io(o);
  ExplicitPseudoOperad e = materialize_pseudo(io);
  Report r = check_unit(e, "e");
  CHECK_MESSAGE(r.ok(), failures(r));
  Report full = check_two_adjunction(o, e, "both");
  CHECK_MESSAGE(full.ok(), failures(full));
}

TEST_CASE("identity pseudo-multifunctor and multitransformation") {
  FunctionOperad o = endomorphism_operad({2}, 2);
  IotaPseudoOperad io(o);
  PseudoMultifunctor f = identity_pseudo_multifunctor(io);
  Report r = check_pseudo_multifunctor(f);
  CHECK_MESSAGE(r.ok(), failures(r));
  Multitransformation z = identity_multitransformation(f);
  Report rz = check_multitransformation(z);
  CHECK_MESSAGE(rz.ok(), failures(rz));
}

TEST_CASE("a pseudo-multifunctor with a wrong cell image is caught") {
  FunctionOperad o = endomorphism_operad({2}, 1);
  IotaPseudoOperad io(o);
  std::size_t g = nontrivial_vmorph(io);
  PseudoMultifunctor f = identity_pseudo_multifunctor(io);
  std::size_t ug = io.unit_cell(g);
  f.on_cells = [&](std::size_t a) -> std::optional<std::size_t> {
    return a == ug ? io.cell_id(io.unit(0)) : a;
  };
  CHECK(check_pseudo_multifunctor(f).failed("pmf-cells"));
}

TEST_CASE("a pseudo-operad without companions is not fibrant") {
  ExplicitPseudoOperad p = non_fibrant();
  Report r = check_pseudo_operad(p);
  CHECK_MESSAGE(r.ok(), failures(r));
  CHECK_FALSE(p.companion(1));
  try {
    (void)tau(p);
    FAIL("tau accepted a non-fibrant pseudo-operad");
  } catch (const Error& e) {
    CHECK(e.code() == "NotFibrant");
  }
}
