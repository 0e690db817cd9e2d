#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lqft/error.hpp"
#include "lqft/io.hpp"
#include "lqft/translator.hpp"

using namespace lqft;
using io::Json;

namespace {

// Malformed input; exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Settings {
  std::optional<std::size_t> max_events;
  std::uint64_t seed = 1;
  std::string report_path;
  bool debug = false;
  std::string output_path;
  std::string dot_path;
};

// What a command produced: the report, and text for stdout.
struct Outcome {
  Report report;
  std::string out;
  bool artifact = false;  // stdout carries a file, so the report stays off it
};

// r with every entry moved to `target`.
Report retarget(const Report& r, const std::string& target) {
  Report out;
  for (const auto& e : r.entries()) {
    if (e.status == "fail") out.fail(e.check, target, e.witness);
    else if (e.status == "info") out.info(e.check, target, e.witness);
    else out.pass(e.check, target, e.checked, e.skipped, e.witness);
  }
  return out;
}

std::string target_of(const std::string& path) {
  return std::filesystem::path(path).filename().string();
}

// A parsed input file with everything built from it.
struct Input {
  std::string path;
  std::string target;
  std::string kind;
  Json json;
  io::LoadOptions opt;
};

Input open_input(const std::string& path, const Settings& s) {
  Input in;
  in.path = path;
  in.target = target_of(path);
  in.opt.base = std::filesystem::path(path).parent_path();
  in.opt.max_events = s.max_events;
  in.json = io::read_file(path);
  in.kind = io::kind_of(in.json);
  return in;
}

// Window of a model file, or the file itself for a fragment.
io::Window window_of(const Input& in) {
  if (in.kind == "fragment") return io::window_from_json(in.json, in.opt);
  return io::window_from_json(in.json.at("window"), in.opt);
}

// Runs f, mapping library errors raised while reading input to InputError.
template <class F>
auto loading(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw InputError(e.what());
  } catch (const Json::exception& e) {
    throw InputError(std::string("Format: ") + e.what());
  }
}

void require_kind(const Input& in, std::initializer_list<const char*> kinds) {
  for (const char* k : kinds)
    if (in.kind == k) return;
  std::string want;
  for (const char* k : kinds) want += (want.empty() ? "" : ", ") + std::string(k);
  throw InputError("Format: " + in.target + " is a " + in.kind + ", expected " + want);
}

Outcome run_validate(const std::string& path, const Settings& s) {
  Outcome o;
  Input in = loading([&] { return open_input(path, s); });
  const std::string& T = in.target;
  if (in.kind == "causal_set") {
    CausalSet m = loading([&] { return io::causal_set_from_json(in.json, in.opt); });
    o.report.pass("causal-set", T, 1, 0,
                  std::to_string(m.size()) + " events, " + std::to_string(m.cover_pairs().size()) +
                      " covers, " + std::to_string(m.cauchy_antichains().size()) +
                      " Cauchy antichains");
  } else if (in.kind == "object") {
    PointedObject ob = loading([&] { return io::object_from_json(in.json, in.opt); });
    o.report.merge(validate_object(ob));
  } else if (in.kind == "bordism") {
    Bordism b = loading([&] { return io::bordism_from_json(in.json, in.opt); });
    o.report.merge(validate_bordism(b, T));
  } else if (in.kind == "fragment") {
    io::World w(loading([&] { return window_of(in); }));
    for (const auto& ob : w.window().objects) o.report.merge(validate_object(ob));
    BordismFragment& f = w.fragment();
    o.report.pass("fragment", T, f.base_ops(), 0,
                  std::to_string(f.num_objects()) + " objects, " + std::to_string(f.base_ops()) +
                      " operations, " + std::to_string(f.base_cells()) + " cells");
  } else if (in.kind == "operad") {
    TableOperad op = loading([&] { return io::operad_from_json(in.json); });
    o.report.pass("operad", T, op.num_ops(), 0,
                  std::to_string(op.num_colors()) + " colors, " + std::to_string(op.num_ops()) +
                      " operations");
  } else if (in.kind == "pseudo_operad") {
    ExplicitPseudoOperad p = loading([&] { return io::pseudo_operad_from_json(in.json); });
    o.report.pass("pseudo-operad", T, p.num_ops(), 0,
                  std::to_string(p.num_objects()) + " objects, " + std::to_string(p.num_ops()) +
                      " operations, " + std::to_string(p.num_cells()) + " cells");
  } else if (in.kind == "aqft_model" || in.kind == "fqft_model") {
    io::World w(loading([&] { return window_of(in); }));
    Model m = loading([&] {
      return in.kind == "aqft_model" ? io::aqft_model_from_json(in.json, w)
                                     : io::fqft_model_from_json(in.json, w);
    });
    o.report.merge(check_model(m, T));
  } else {
    throw InputError("Format: unknown kind \"" + in.kind + "\"");
  }
  return o;
}

Bordism load_bordism(const std::string& path, const Settings& s) {
  Input in = loading([&] { return open_input(path, s); });
  require_kind(in, {"bordism"});
  return loading([&] { return io::bordism_from_json(in.json, in.opt); });
}

Outcome run_glue(const std::vector<std::string>& paths, const Settings& s) {
  if (paths.size() < 2) throw InputError("Format: glue needs an outer bordism and its inner bordisms");
  Bordism outer = load_bordism(paths[0], s);
  std::vector<Bordism> inners;
  for (std::size_t i = 1; i < paths.size(); ++i) inners.push_back(load_bordism(paths[i], s));
  Outcome o;
  o.artifact = true;
  std::string T = target_of(paths[0]);
  try {
    Composite c = compose_bordisms(outer, inners);
    o.report.pass("glue", T, 1, 0, std::to_string(c.result.N->size()) + " events");
    o.report.merge(validate_bordism(c.result, T + " composite"));
    Json j{{"kind", "bordism"}};
    j.update(io::to_json(c.result));
    o.out = io::pretty(j);
    if (!s.dot_path.empty()) std::ofstream(s.dot_path) << bordism_dot(c.result);
  } catch (const Error& e) {
    o.report.fail("glue", T, e.what());
  }
  return o;
}

Outcome run_truncate(const std::string& path, const Settings& s) {
  Input in = loading([&] { return open_input(path, s); });
  require_kind(in, {"fragment"});
  io::World w(loading([&] { return window_of(in); }));
  Outcome o;
  const Truncation& t = w.truncation();
  std::ostringstream out;
  for (std::size_t k = 0; k < t.operad.num_ops(); ++k) {
    const OpSig& sig = t.operad.sig(k);
    out << "class " << k << " (";
    for (std::size_t i = 0; i < sig.inputs.size(); ++i)
      out << (i ? ", " : "") << t.operad.color_name(sig.inputs[i]);
    out << ") -> " << t.operad.color_name(sig.output) << ", " << t.members[k].size() << " members"
        << (t.operad.is_cauchy(k) ? ", Cauchy" : "") << ": " << t.operad.op_name(k) << "\n";
  }
  o.out = out.str();
  o.report.merge(t.report);
  o.report.merge(retarget(check_operad_axioms(t.operad), "tau(" + in.target + ")"));
  if (!s.output_path.empty()) std::ofstream(s.output_path) << io::pretty(io::operad_to_json(t.operad));
  return o;
}

PseudoCheckOptions pseudo_options() { return PseudoCheckOptions{}; }

Outcome check_axioms(const std::string& path, const Settings& s) {
  Input in = loading([&] { return open_input(path, s); });
  require_kind(in, {"operad", "pseudo_operad", "fragment"});
  Outcome o;
  auto tag = [&](const Report& r, const std::string& target) { o.report.merge(retarget(r, target)); };
  if (in.kind == "operad") {
    TableOperad op = loading([&] { return io::operad_from_json(in.json); });
    tag(check_operad_axioms(op), in.target);
  } else if (in.kind == "pseudo_operad") {
    ExplicitPseudoOperad p = loading([&] { return io::pseudo_operad_from_json(in.json); });
    tag(check_pseudo_operad(p, pseudo_options()), in.target);
  } else {
    io::World w(loading([&] { return window_of(in); }));
    tag(check_pseudo_operad(w.fragment(), pseudo_options()), in.target);
    tag(check_operad_axioms(w.truncation().operad), "tau(" + in.target + ")");
  }
  return o;
}

// eta_P on vertical morphisms and operations, one line each.
std::string eta_table(PseudoOperad& p, const AdjunctionUnit& u) {
  const TableOperad& t = u.truncation->operad;
  std::ostringstream out;
  out << "eta witness table: P -> iota(tau(P))\n";
  for (std::size_t g = 0; g < u.on_vmorphs.size(); ++g)
    out << "  vmorph " << p.vmorph_name(g) << " -> " << u.iota_tau->vmorph_name(u.on_vmorphs[g])
        << " = class of companion " << t.op_name(u.truncation->companion_class[g]) << "\n";
  for (std::size_t k = 0; k < u.on_ops.size(); ++k)
    out << "  op " << p.op_name(k) << " -> class " << t.op_name(u.on_ops[k]) << "\n";
  return out.str();
}

Outcome check_adjunction(const std::string& path, const Settings& s) {
  Input in = loading([&] { return open_input(path, s); });
  require_kind(in, {"operad", "pseudo_operad", "fragment"});
  Outcome o;
  if (in.kind == "operad") {
    TableOperad op = loading([&] { return io::operad_from_json(in.json); });
    o.report.merge(check_counit_and_iota_unit(op, in.target));
    return o;
  }
  FunctionOperad rnd = random_function_operad(s.seed);
  auto run = [&](PseudoOperad& p) {
    try {
      o.report.merge(check_two_adjunction(rnd, p, in.target, pseudo_options()));
      AdjunctionUnit u = adjunction_unit(p);
      o.out = eta_table(p, u);
    } catch (const Error& e) {
      o.report.fail("adjunction", in.target, e.what());
    }
  };
  if (in.kind == "pseudo_operad") {
    ExplicitPseudoOperad p = loading([&] { return io::pseudo_operad_from_json(in.json); });
    run(p);
  } else {
    io::World w(loading([&] { return window_of(in); }));
    run(w.fragment());
  }
  return o;
}

Outcome check_model_property(const std::string& what, const std::string& path, const Settings& s) {
  Input in = loading([&] { return open_input(path, s); });
  require_kind(in, {"aqft_model", "fqft_model"});
  if (what == "causality" && in.kind != "aqft_model")
    throw InputError("Format: Einstein causality applies to AQFT models");
  io::World w(loading([&] { return window_of(in); }));
  bool aqft = in.kind == "aqft_model";
  Model m = loading([&] {
    return aqft ? io::aqft_model_from_json(in.json, w) : io::fqft_model_from_json(in.json, w);
  });
  Outcome o;
  if (what == "timeslice") {
    o.report.merge(check_time_slice(m, in.target));
  } else if (what == "causality") {
    o.report.merge(check_einstein_causality(m, in.target));
  } else if (aqft) {
    o.report.merge(check_additivity_aqft(m, w.aqft(), in.target));
  } else {
    o.report.merge(check_additivity_fqft(m, w.fragment(), w.truncation(), in.target));
  }
  return o;
}

Outcome run_check(const std::string& what, const std::vector<std::string>& paths, const Settings& s) {
  auto one = [&](const std::string& path) {
    if (what == "axioms") return check_axioms(path, s);
    if (what == "adjunction") return check_adjunction(path, s);
    return check_model_property(what, path, s);
  };
  // Independent inputs run concurrently; results are merged in input order.
  std::vector<std::future<Outcome>> jobs;
  for (const auto& p : paths) jobs.push_back(std::async(std::launch::async, one, p));
  Outcome o;
  for (auto& j : jobs) {
    Outcome r = j.get();
    o.report.merge(r.report);
    o.out += r.out;
  }
  return o;
}

Outcome run_translate(const std::string& dir, const std::string& path, const Settings& s) {
  Input in = loading([&] { return open_input(path, s); });
  require_kind(in, {dir == "a2f" ? "aqft_model" : "fqft_model"});
  io::World w(loading([&] { return window_of(in); }));
  Outcome o;
  o.artifact = true;
  Model m = loading([&] {
    return dir == "a2f" ? io::aqft_model_from_json(in.json, w) : io::fqft_model_from_json(in.json, w);
  });
  const TranslationContext& ctx = loading([&]() -> const TranslationContext& { return w.context(); });
  try {
    Json j;
    if (dir == "a2f") {
      Model f = aqft_to_fqft(m, ctx, s.debug);
      j = io::fqft_model_to_json(f, w);
    } else {
      AqftFromFqft a = fqft_to_aqft(m, ctx, s.debug);
      j = io::aqft_model_to_json(a.model, w);
    }
    o.report.pass("translate-" + dir, in.target, 1);
    o.out = io::pretty(j);
  } catch (const Error& e) {
    o.report.fail("translate-" + dir, in.target, e.what());
  }
  return o;
}

Outcome run_roundtrip(const std::string& path, const Settings& s) {
  Input in = loading([&] { return open_input(path, s); });
  require_kind(in, {"aqft_model", "fqft_model"});
  io::World w(loading([&] { return window_of(in); }));
  bool aqft = in.kind == "aqft_model";
  Model m = loading([&] {
    return aqft ? io::aqft_model_from_json(in.json, w) : io::fqft_model_from_json(in.json, w);
  });
  const TranslationContext& ctx = loading([&]() -> const TranslationContext& { return w.context(); });
  Outcome o;
  try {
    if (aqft) {
      o.report.merge(roundtrip_aqft(m, ctx, in.target, s.debug));
      Model f = aqft_to_fqft(m, ctx, s.debug);
      o.report.merge(roundtrip_fqft(f, ctx, "F(" + in.target + ")", s.debug));
    } else {
      o.report.merge(roundtrip_fqft(m, ctx, in.target, s.debug));
      AqftFromFqft a = fqft_to_aqft(m, ctx, s.debug);
      o.report.merge(roundtrip_aqft(a.model, ctx, "A(" + in.target + ")", s.debug));
    }
  } catch (const Error& e) {
    o.report.fail("roundtrip", in.target, e.what());
  }
  return o;
}

Outcome run_export_dot(const std::string& path, const Settings& s) {
  Input in = loading([&] { return open_input(path, s); });
  require_kind(in, {"causal_set", "object", "bordism"});
  Outcome o;
  o.artifact = true;
  if (in.kind == "causal_set") {
    o.out = to_dot(loading([&] { return io::causal_set_from_json(in.json, in.opt); }));
  } else if (in.kind == "object") {
    PointedObject ob = loading([&] { return io::object_from_json(in.json, in.opt); });
    o.out = to_dot(*ob.M, {{"sigma", ob.sigma}});
  } else {
    o.out = bordism_dot(load_bordism(path, s));
  }
  o.report.pass("export-dot", in.target, 1);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite causal-set models of AQFT and FQFT: checks, translation, round trips"};
  app.require_subcommand(1);
  app.fallthrough();
  Settings s;
  std::size_t max_events = 0;
  app.add_option("--max-events", max_events, "Cap on events per causal set and per bordism");
  app.add_option("--seed", s.seed, "Seed for generated test operads")->default_val(1);
  app.add_option("--report", s.report_path, "Write the JSON report to this path");
  app.add_flag("--debug-universal-checks", s.debug,
               "Re-verify colimit mediators and representative independence by brute force");

  std::string file, mode;
  std::vector<std::string> files;
  auto* validate = app.add_subcommand("validate", "Validate a causal set, object, bordism, fragment, operad or model");
  validate->add_option("file", file)->required();
  auto* glue = app.add_subcommand("glue", "Compose an outer bordism with its inner bordisms");
  glue->add_option("bordisms", files)->required();
  glue->add_option("-o,--output", s.output_path, "Write the composite here instead of stdout");
  glue->add_option("--dot", s.dot_path, "Write the composite as DOT");
  auto* truncate = app.add_subcommand("truncate", "Truncate a fragment and check the strict operad axioms");
  truncate->add_option("fragment", file)->required();
  truncate->add_option("-o,--output", s.output_path, "Write the truncated operad as JSON");
  auto* check = app.add_subcommand("check", "Run one family of checks over one or more inputs");
  check->add_option("what", mode)
      ->required()
      ->check(CLI::IsMember({"axioms", "adjunction", "timeslice", "additivity", "causality"}));
  check->add_option("inputs", files)->required();
  auto* translate = app.add_subcommand("translate", "Translate a model between AQFT and FQFT");
  translate->add_option("direction", mode)->required()->check(CLI::IsMember({"a2f", "f2a"}));
  translate->add_option("model", file)->required();
  translate->add_option("-o,--output", s.output_path, "Write the translated model here instead of stdout");
  auto* roundtrip = app.add_subcommand("roundtrip", "Check both round trips of the equivalence on a model");
  roundtrip->add_option("model", file)->required();
  auto* dot = app.add_subcommand("export-dot", "Write a causal set, object or bordism as DOT");
  dot->add_option("file", file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (app.count("--max-events")) s.max_events = max_events;

  Outcome o;
  try {
    if (*validate) o = run_validate(file, s);
    else if (*glue) o = run_glue(files, s);
    else if (*truncate) o = run_truncate(file, s);
    else if (*check) o = run_check(mode, files, s);
    else if (*translate) o = run_translate(mode, file, s);
    else if (*roundtrip) o = run_roundtrip(file, s);
    else o = run_export_dot(file, s);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    o = Outcome{};
    o.report.fail("error", app.get_subcommands().front()->get_name(), e.what());
  }

  if (o.artifact && !s.output_path.empty()) {
    std::ofstream(s.output_path) << o.out;
    o.out.clear();
  }
  std::cout << o.out;
  if (!o.artifact) std::cout << io::report_text(o.report);
  else std::cerr << io::report_text(o.report);
  if (!s.report_path.empty()) {
    std::ofstream out(s.report_path);
    out << io::pretty(io::to_json(o.report));
    if (!out) {
      std::cerr << "error: cannot write " << s.report_path << "\n";
      return 2;
    }
  }
  return o.report.ok() ? 0 : 1;
}
