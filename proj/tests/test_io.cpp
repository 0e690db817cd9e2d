#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lqft/error.hpp"
#include "lqft/examples.hpp"
#include "lqft/io.hpp"

using namespace lqft;
using io::Json;

namespace {

const std::filesystem::path kData = LQFT_DATA_DIR;

io::LoadOptions data_opt() {
  io::LoadOptions o;
  o.base = kData;
  return o;
}

Json data(const std::string& name) { return io::read_file(kData / name); }

// The shipped window with its derived operads, built once.
io::World& world() {
  static io::World w(io::window_from_json(data("fragment.json"), data_opt()));
  return w;
}

bool same_model(const Model& a, const Model& b) { return a.colors == b.colors && a.ops == b.ops; }

}  // namespace

TEST_CASE("shipped causal sets and window match the builders") {
  CHECK(io::kind_of(data("diamond.json")) == "causal_set");
  CHECK(io::causal_set_from_json(data("diamond.json"), data_opt()) == diamond_set());
  CHECK(io::causal_set_from_json(data("point.json"), data_opt()) == point_set());
  const io::Window& w = world().window();
  auto objs = diamond_objects();
  REQUIRE(w.objects.size() == objs.size());
  for (std::size_t i = 0; i < objs.size(); ++i) {
    CHECK(w.objects[i].name == objs[i].name);
    CHECK(same_object(w.objects[i], objs[i]));
  }
  CHECK(w.max_arity == 2);
  CHECK(w.spaces[0].name == "pt");
  CHECK(w.spaces[1].name == "D");
}

TEST_CASE("shipped models match the builders") {
  io::World& w = world();
  Model a = io::aqft_model_from_json(data("aqft_diamond.json"), w);
  CHECK(same_model(a, twisted_cyclic_model(w.aqft())));
  Model c = io::aqft_model_from_json(data("aqft_causality_counterexample.json"), w);
  CHECK(same_model(c, causality_counterexample(w.aqft(), transformation_monoid_2())));
  Model f = io::fqft_model_from_json(data("fqft_diamond.json"), w);
  CHECK(same_model(f, aqft_to_fqft(twisted_cyclic_model(w.aqft()), w.context())));
}

TEST_CASE("models survive writing and reading") {
  io::World& w = world();
  Model a = twisted_cyclic_model(w.aqft());
  Json ja = io::aqft_model_to_json(a, w);
  CHECK(same_model(io::aqft_model_from_json(Json::parse(io::pretty(ja)), w), a));
  Model f = aqft_to_fqft(a, w.context());
  // Any member of a class names the class.
  Json jf = io::fqft_model_to_json(f, w);
  CHECK(same_model(io::fqft_model_from_json(jf, w), f));
  Model partial = f;
  for (std::size_t k = 0; k < partial.ops.size(); k += 2) partial.ops[k].reset();
  CHECK(same_model(io::fqft_model_from_json(io::fqft_model_to_json(partial, w), w), partial));
}

TEST_CASE("operads and pseudo-operads survive writing and reading") {
  for (std::uint64_t seed : {1u, 2u, 3u, 7u}) {
    FunctionOperad o = random_function_operad(seed);
    Json j = io::operad_to_json(o);
    TableOperad t = io::operad_from_json(j);
    CHECK(compare_operads(materialize(o), t, "seed").ok());
    CHECK(io::operad_to_json(t) == j);
  }
  Json p = data("pseudo_operad_iota_end2.json");
  ExplicitPseudoOperad e = io::pseudo_operad_from_json(p);
  CHECK(io::pseudo_operad_to_json(e) == p);
  CHECK(check_pseudo_operad(e).ok());
}

TEST_CASE("bordisms survive writing and reading") {
  Json j = data("bordism_a_to_d.json");
  CHECK(io::kind_of(j) == "bordism");
  Bordism b = io::bordism_from_json(j, data_opt());
  CHECK(validate_bordism(b).ok());
  CHECK(bordism_key(io::bordism_from_json(io::to_json(b), data_opt())) == bordism_key(b));
  // With a window, its objects are written by name.
  Json named = io::to_json(b, &world().window());
  CHECK(named["inputs"][0] == "D0");
  CHECK(named["output"] == "D2");
  CHECK(bordism_key(io::bordism_from_json(named, data_opt(), &world().window())) == bordism_key(b));
}

TEST_CASE("pretty printing keeps scalar arrays on one line") {
  Json j = Json::parse(R"({"a": [1, 2], "b": {"c": [[0, 1], []], "d": "x"}, "e": {}})");
  CHECK(io::pretty(j) ==
        "{\n  \"a\": [1, 2],\n  \"b\": {\n    \"c\": [\n      [0, 1],\n      []\n    ],\n"
        "    \"d\": \"x\"\n  },\n  \"e\": {}\n}\n");
  CHECK(Json::parse(io::pretty(j)) == j);
}

TEST_CASE("malformed input is rejected") {
  auto code = [](auto&& f) -> std::string {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return "none";
  };
  io::LoadOptions opt = data_opt();
  CHECK(code([&] { io::causal_set_from_json(Json::parse(R"({"covers": []})"), opt); }) == "Format");
  CHECK(code([&] {
          io::causal_set_from_json(Json::parse(R"({"events": ["x", "y"], "covers": [["x", "y"], ["y", "x"]]})"), opt);
        }) == "Cycle");
  CHECK(code([&] {
          io::causal_set_from_json(Json::parse(R"({"events": ["x"], "covers": [["x", "z"]]})"), opt);
        }) == "UnknownEvent");
  CHECK(code([&] { io::causal_set_from_json(Json::parse(R"({"events": ["x"], "covers": [["x"]]})"), opt); }) ==
        "Format");
  io::LoadOptions capped = opt;
  capped.max_events = 3;
  CHECK(code([&] { io::causal_set_from_json(Json("diamond.json"), capped); }) == "TooLarge");
  CHECK(code([&] { io::monoid_from_json(Json::parse(R"({"mul": [[0, 1], [1]]})")); }) == "Format");
  CHECK(code([&] { io::monoid_from_json(Json::parse(R"({"mul": [[0, 2], [1, 0]]})")); }) == "Format");
  CHECK(code([&] { io::kind_of(Json::parse("[]")); }) == "Format");
  CHECK(code([&] { io::read_file(kData / "missing.json"); }) == "Format");

  io::World& w = world();
  Json a = data("aqft_diamond.json");
  Json twice = a;
  twice["ops"].push_back(a["ops"][1]);
  CHECK(code([&] { io::aqft_model_from_json(twice, w); }) == "Format");
  Json short_table = a;
  short_table["ops"][1]["table"] = Json::array({0});
  CHECK(code([&] { io::aqft_model_from_json(short_table, w); }) == "Format");
  Json outside = a;
  // Not injective, so no operation of the window.
  outside["ops"][1]["maps"] = Json::parse(R"([{"a": "d", "b": "d", "c": "d", "d": "d"}])");
  outside["ops"][1]["inputs"] = Json::array({"D"});
  outside["ops"][1]["output"] = "D";
  CHECK(code([&] { io::aqft_model_from_json(outside, w); }) == "Format");
  Json missing_color = a;
  missing_color["colors"].erase("D");
  CHECK(code([&] { io::aqft_model_from_json(missing_color, w); }) == "Format");
}
