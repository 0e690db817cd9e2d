#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include "cli.hpp"
#include "lqft/io.hpp"

using lqft::io::Json;

namespace {

const std::filesystem::path& scratch() {
  static std::filesystem::path p = cli::scratch_dir("test-cli");
  return p;
}

std::string in_scratch(const std::string& name) { return "'" + (scratch() / name).string() + "'"; }

}  // namespace

TEST_CASE("validate accepts the diamond") {
  cli::Run r = cli::run("validate diamond.json", scratch());
  CHECK(r.code == 0);
  CHECK(r.out == "pass causal-set diamond.json: 4 events, 4 covers, 3 Cauchy antichains\n");
}

TEST_CASE("roundtrip lists both triangle checks") {
  cli::Run r = cli::run("roundtrip aqft_diamond.json --report " + in_scratch("rt.json"), scratch());
  CHECK(r.code == 0);
  CHECK(r.out == "pass triangle-aqft aqft_diamond.json\npass triangle-fqft F(aqft_diamond.json)\n");
  Json rep = Json::parse(cli::slurp(scratch() / "rt.json"));
  REQUIRE(rep.size() == 2);
  CHECK(rep[0] == Json::parse(R"({"check": "triangle-aqft", "target": "aqft_diamond.json", "status": "pass"})"));
  CHECK(rep[1]["check"] == "triangle-fqft");
}

TEST_CASE("check adjunction prints the eta table") {
  cli::Run r = cli::run("check adjunction fragment.json", scratch());
  CHECK(r.code == 0);
  CHECK(r.out.rfind("eta witness table: P -> iota(tau(P))\n", 0) == 0);
  CHECK(r.out.find("  vmorph D1->D1(2 1) -> ") != std::string::npos);
  CHECK(r.out.find("pass counit fragment.json") != std::string::npos);
  CHECK(r.out.find("pass tau-of-unit fragment.json") != std::string::npos);
  CHECK(r.out.find("fail ") == std::string::npos);
}

TEST_CASE("check failures exit 1 and input errors exit 2") {
  cli::Run c = cli::run("check causality aqft_diamond.json aqft_causality_counterexample.json", scratch());
  CHECK(c.code == 1);
  CHECK(c.out.rfind("pass causality aqft_diamond.json\nfail causality aqft_causality_counterexample.json: ", 0) == 0);

  std::ofstream(scratch() / "cycle.json") << R"({"events": ["x", "y"], "covers": [["x", "y"], ["y", "x"]]})";
  cli::Run cyc = cli::run("validate " + in_scratch("cycle.json"), scratch());
  CHECK(cyc.code == 2);
  CHECK(cyc.err.find("Cycle") != std::string::npos);
  std::ofstream(scratch() / "broken.json") << "{\"events\": [";
  CHECK(cli::run("validate " + in_scratch("broken.json"), scratch()).code == 2);
  CHECK(cli::run("validate missing.json", scratch()).code == 2);
  CHECK(cli::run("check causality fqft_diamond.json", scratch()).code == 2);
  CHECK(cli::run("translate f2a aqft_diamond.json", scratch()).code == 2);
  CHECK(cli::run("check nonsense diamond.json", scratch()).code == 2);
  CHECK(cli::run("--max-events 3 validate diamond.json", scratch()).code == 2);
}

TEST_CASE("translate a2f reproduces the shipped FQFT model") {
  cli::Run r = cli::run("translate a2f aqft_diamond.json --debug-universal-checks", scratch());
  CHECK(r.code == 0);
  Json got = Json::parse(r.out), want = lqft::io::read_file(std::filesystem::path(LQFT_DATA_DIR) / "fqft_diamond.json");
  CHECK(got["kind"] == "fqft_model");
  CHECK(got["colors"] == want["colors"]);
  CHECK(got["ops"] == want["ops"]);
  // f2a on the result gives the AQFT model back.
  std::ofstream(scratch() / "f.json") << r.out;
  cli::Run back = cli::run("translate f2a " + in_scratch("f.json"), scratch());
  CHECK(back.code == 0);
  Json a = Json::parse(back.out), orig = lqft::io::read_file(std::filesystem::path(LQFT_DATA_DIR) / "aqft_diamond.json");
  // The colimit carriers are labelled by class representatives.
  for (const char* c : {"pt", "D"}) {
    CHECK(a["colors"][c]["mul"] == orig["colors"][c]["mul"]);
    CHECK(a["colors"][c]["unit"] == orig["colors"][c]["unit"]);
  }
  CHECK(a["ops"] == orig["ops"]);
}

TEST_CASE("translate reports a missing precondition") {
  Json a = lqft::io::read_file(std::filesystem::path(LQFT_DATA_DIR) / "aqft_diamond.json");
  a["window"] = std::string(LQFT_DATA_DIR) + "/fragment.json";
  // Collapse pt -> D at a; time-slice fails there.
  for (Json& op : a["ops"])
    if (op["output"] == "D" && op["inputs"] == Json::array({"pt"}) && op["maps"][0]["p"] == "a")
      op["table"] = Json::array({0, 0, 0});
  std::ofstream(scratch() / "collapsed.json") << a.dump();
  cli::Run r = cli::run("translate a2f " + in_scratch("collapsed.json"), scratch());
  CHECK(r.code == 1);
  CHECK(r.out.empty());
  CHECK(r.err.find("fail translate-a2f collapsed.json: TimeSliceRequired") == 0);
  CHECK(cli::run("check timeslice " + in_scratch("collapsed.json"), scratch()).code == 1);
}

TEST_CASE("glue, truncate and export-dot") {
  cli::Run g = cli::run("glue bordism_a_to_d.json bordism_point_to_a.json --dot " + in_scratch("g.dot"), scratch());
  CHECK(g.code == 0);
  std::ofstream(scratch() / "g.json") << g.out;
  CHECK(cli::run("validate " + in_scratch("g.json"), scratch()).code == 0);
  CHECK(cli::slurp(scratch() / "g.dot").rfind("digraph", 0) == 0);
  // Inputs in the wrong order do not glue.
  cli::Run bad = cli::run("glue bordism_point_to_a.json bordism_a_to_d.json", scratch());
  CHECK(bad.code == 1);

  cli::Run t = cli::run("truncate fragment.json -o " + in_scratch("tau.json"), scratch());
  CHECK(t.code == 0);
  CHECK(t.out.rfind("class 0 (pt) -> pt, ", 0) == 0);
  CHECK(cli::run("check axioms " + in_scratch("tau.json"), scratch()).code == 0);

  cli::Run d = cli::run("export-dot bordism_a_to_d.json", scratch());
  CHECK(d.code == 0);
  CHECK(d.out.rfind("digraph", 0) == 0);
}
