// Regenerates the shipped example files from the library builders:
//   make_examples <dir>
// test_io checks that the files in data/ still match.

#include <fstream>
#include <iostream>

#include "lqft/examples.hpp"
#include "lqft/io.hpp"

using namespace lqft;
using io::Json;

namespace {

void write(const std::filesystem::path& p, const Json& j) {
  std::ofstream(p) << io::pretty(j);
}

// Window reference by path instead of inline.
Json by_path(Json model) {
  model["window"] = "fragment.json";
  return model;
}

Json bordism_file(const Bordism& b) {
  Json j{{"kind", "bordism"}};
  j.update(io::to_json(b));
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_examples <dir>\n";
    return 2;
  }
  std::filesystem::path dir = argv[1];

  Json diamond = io::to_json(diamond_set());
  diamond = Json{{"kind", "causal_set"}, {"events", diamond["events"]}, {"covers", diamond["covers"]}};
  write(dir / "diamond.json", diamond);
  Json point = io::to_json(point_set());
  write(dir / "point.json", Json{{"kind", "causal_set"}, {"events", point["events"]}, {"covers", point["covers"]}});

  Json fragment{{"kind", "fragment"},
                {"spaces", {{"pt", "point.json"}, {"D", "diamond.json"}}},
                {"objects",
                 {{{"name", "pt"}, {"space", "pt"}, {"sigma", {"p"}}},
                  {{"name", "D0"}, {"space", "D"}, {"sigma", {"a"}}},
                  {{"name", "D1"}, {"space", "D"}, {"sigma", {"b", "c"}}},
                  {{"name", "D2"}, {"space", "D"}, {"sigma", {"d"}}}}},
                {"max_arity", 2},
                {"max_events", 10}};
  write(dir / "fragment.json", fragment);

  io::LoadOptions opt;
  opt.base = dir;
  io::World world(io::window_from_json(fragment, opt));
  Model a = twisted_cyclic_model(world.aqft());
  write(dir / "aqft_diamond.json", by_path(io::aqft_model_to_json(a, world)));
  Model f = aqft_to_fqft(a, world.context());
  write(dir / "fqft_diamond.json", by_path(io::fqft_model_to_json(f, world)));
  Model c = causality_counterexample(world.aqft(), transformation_monoid_2());
  write(dir / "aqft_causality_counterexample.json", by_path(io::aqft_model_to_json(c, world)));

  // pt -> (D,{a}) through a, then (D,{a}) -> (D,{d}) along the identity.
  const auto objs = diamond_objects();
  CausalSetRef d = objs[1].M;
  Bordism inner;
  inner.inputs = {objs[0]};
  inner.output = objs[1];
  inner.N = d;
  inner.iota0 = {Collar{1, {d->index("a")}}};
  inner.iota1 = full_collar(*d);
  Bordism outer;
  outer.inputs = {objs[1]};
  outer.output = objs[3];
  outer.N = d;
  outer.iota0 = {full_collar(*d)};
  outer.iota1 = full_collar(*d);
  write(dir / "bordism_point_to_a.json", bordism_file(inner));
  write(dir / "bordism_a_to_d.json", bordism_file(outer));
  Json object{{"kind", "object"}};
  object.update(io::to_json(objs[2]));
  write(dir / "object_d1.json", object);

  FunctionOperad small = random_function_operad(7);
  write(dir / "operad_small.json", io::operad_to_json(small));
  FunctionOperad end2 = endomorphism_operad({2}, 1);
  write(dir / "operad_end2.json", io::operad_to_json(end2));
  IotaPseudoOperad iota(end2);
  ExplicitPseudoOperad e = materialize_pseudo(iota);
  write(dir / "pseudo_operad_iota_end2.json", io::pseudo_operad_to_json(e));
  return 0;
}
