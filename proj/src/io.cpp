#include "lqft/io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lqft/error.hpp"

namespace lqft::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error("Format", what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) bad(std::string("expected an object with field \"") + key + "\"");
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field \"") + key + "\"");
  return *it;
}

std::string text(const Json& j, const std::string& what) {
  if (!j.is_string()) bad(what + " must be a string");
  return j.get<std::string>();
}

std::size_t count(const Json& j, const std::string& what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    bad(what + " must be a non-negative integer");
  return j.get<std::size_t>();
}

const Json& list(const Json& j, const std::string& what) {
  if (!j.is_array()) bad(what + " must be an array");
  return j;
}

std::vector<std::string> strings(const Json& j, const std::string& what) {
  std::vector<std::string> out;
  for (const Json& x : list(j, what)) out.push_back(text(x, what + " entry"));
  return out;
}

std::vector<std::size_t> counts(const Json& j, const std::string& what) {
  std::vector<std::size_t> out;
  for (const Json& x : list(j, what)) out.push_back(count(x, what + " entry"));
  return out;
}

// A string stands for the file it names.
std::pair<Json, LoadOptions> resolve(const Json& j, const LoadOptions& opt) {
  if (!j.is_string()) return {j, opt};
  std::filesystem::path p = opt.base / j.get<std::string>();
  LoadOptions sub = opt;
  sub.base = p.parent_path();
  return {read_file(p), sub};
}

// Index lookup by name with a Format error naming the kind of thing.
class Names {
 public:
  Names(std::string what, const std::vector<std::string>& names) : what_(std::move(what)) {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (!index_.emplace(names[i], i).second) bad("duplicate " + what_ + " \"" + names[i] + "\"");
  }
  std::size_t at(const Json& j) const {
    std::string n = text(j, what_);
    auto it = index_.find(n);
    if (it == index_.end()) bad("unknown " + what_ + " \"" + n + "\"");
    return it->second;
  }
  std::vector<std::size_t> all(const Json& j) const {
    std::vector<std::size_t> out;
    for (const Json& x : list(j, what_ + " list")) out.push_back(at(x));
    return out;
  }

 private:
  std::string what_;
  std::map<std::string, std::size_t> index_;
};

// Names for dumping: repeated names get a "#k" suffix.
std::vector<std::string> unique_names(std::vector<std::string> names) {
  std::map<std::string, std::size_t> seen;
  for (const auto& n : names) ++seen[n];
  for (std::size_t i = 0; i < names.size(); ++i)
    if (seen[names[i]] > 1) names[i] += "#" + std::to_string(i);
  return names;
}

Json name_list(const std::vector<std::string>& names, const std::vector<std::size_t>& ids) {
  Json out = Json::array();
  for (std::size_t i : ids) out.push_back(names[i]);
  return out;
}

// {"x": "y", ...} as a map from events of `from` into events of `to`.
Collar collar_from_json(const Json& j, const CausalSet& from, const CausalSet& to) {
  if (!j.is_object()) bad("a collar must be an object from events to events");
  Collar c{0, std::vector<std::size_t>(from.size(), kNone)};
  for (const auto& [x, y] : j.items()) {
    auto i = from.find(x);
    if (!i) bad("unknown event \"" + x + "\" in collar");
    auto k = to.find(text(y, "collar image"));
    if (!k) bad("unknown event \"" + y.get<std::string>() + "\" in collar image");
    c.domain |= bit(*i);
    c.map[*i] = *k;
  }
  return c;
}

Json collar_to_json(const Collar& c, const CausalSet& from, const CausalSet& to) {
  Json out = Json::object();
  for_each_bit(c.domain, [&](std::size_t x) { out[from.name(x)] = to.name(c.map[x]); });
  return out;
}

std::size_t space_index(const Window& w, const std::string& name) {
  for (std::size_t i = 0; i < w.spaces.size(); ++i)
    if (w.spaces[i].name == name) return i;
  bad("unknown space \"" + name + "\"");
}

std::optional<std::size_t> window_object(const Window& w, const PointedObject& o) {
  for (std::size_t i = 0; i < w.objects.size(); ++i)
    if (same_object(w.objects[i], o)) return i;
  return std::nullopt;
}

std::vector<std::string> monoid_keys(const Json& j, std::size_t n, const std::string& what) {
  if (!j.is_object()) bad(what + " must map names to monoids");
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  if (keys.size() != n) bad(what + " must assign a monoid to each of " + std::to_string(n) + " names");
  return keys;
}

HomTable table_from_json(const Json& j, const Model& m, std::size_t op, const std::string& name) {
  HomTable h = counts(j, "table");
  if (h.size() != tuple_count(m.inputs(op)))
    bad("table of " + name + " has " + std::to_string(h.size()) + " entries, expected " +
        std::to_string(tuple_count(m.inputs(op))));
  return h;
}

bool flat(const Json& j) {
  if (!j.is_array()) return false;
  for (const Json& x : j)
    if (x.is_structured()) return false;
  return true;
}

void pretty_into(const Json& j, std::size_t depth, std::string& out) {
  const std::string pad(2 * depth + 2, ' '), close(2 * depth, ' ');
  if (j.is_object() && !j.empty()) {
    out += "{\n";
    std::size_t i = 0;
    for (const auto& [k, v] : j.items()) {
      out += pad + Json(k).dump() + ": ";
      pretty_into(v, depth + 1, out);
      out += ++i < j.size() ? ",\n" : "\n";
    }
    out += close + "}";
  } else if (j.is_array() && !j.empty() && !flat(j)) {
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      out += pad;
      pretty_into(j[i], depth + 1, out);
      out += i + 1 < j.size() ? ",\n" : "\n";
    }
    out += close + "]";
  } else if (j.is_array()) {
    out += "[";
    for (std::size_t i = 0; i < j.size(); ++i) out += (i ? ", " : "") + j[i].dump();
    out += "]";
  } else {
    out += j.dump();
  }
}

}  // namespace

std::string pretty(const Json& j) {
  std::string out;
  pretty_into(j, 0, out);
  return out + "\n";
}

Json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    bad(path.string() + ": " + e.what());
  }
}

std::string kind_of(const Json& j) {
  if (!j.is_object()) bad("top level must be an object");
  if (j.contains("kind")) return text(j["kind"], "kind");
  if (j.contains("events")) return "causal_set";
  bad("missing field \"kind\"");
}

CausalSet causal_set_from_json(const Json& in, const LoadOptions& o) {
  auto [j, opt] = resolve(in, o);
  std::vector<std::string> events = strings(field(j, "events"), "events");
  if (opt.max_events && events.size() > *opt.max_events)
    throw Error("TooLarge", std::to_string(events.size()) + " events exceed the cap of " +
                                std::to_string(*opt.max_events));
  std::vector<std::pair<std::string, std::string>> rel;
  if (j.contains("covers"))
    for (const Json& c : list(j["covers"], "covers")) {
      if (!c.is_array() || c.size() != 2) bad("a cover must be a pair of events");
      rel.emplace_back(text(c[0], "cover event"), text(c[1], "cover event"));
    }
  return CausalSet(std::move(events), rel);
}

Json to_json(const CausalSet& m) {
  Json covers = Json::array();
  for (auto [x, y] : m.cover_pairs()) covers.push_back({m.name(x), m.name(y)});
  return Json{{"events", m.events()}, {"covers", covers}};
}

Monoid monoid_from_json(const Json& j) {
  Monoid m;
  m.name = j.contains("name") ? text(j["name"], "monoid name") : std::string("M");
  const Json& rows = list(field(j, "mul"), "mul");
  m.size = rows.size();
  if (m.size == 0) bad("monoid " + m.name + " is empty");
  m.mul.clear();
  for (const Json& r : rows) {
    auto row = counts(r, "mul row");
    if (row.size() != m.size) bad("mul of " + m.name + " is not square");
    for (std::size_t v : row)
      if (v >= m.size) bad("mul of " + m.name + " leaves the carrier");
    m.mul.insert(m.mul.end(), row.begin(), row.end());
  }
  m.unit = j.contains("unit") ? count(j["unit"], "unit") : 0;
  if (m.unit >= m.size) bad("unit of " + m.name + " leaves the carrier");
  if (j.contains("labels")) {
    m.labels = strings(j["labels"], "labels");
    if (m.labels.size() != m.size) bad("labels of " + m.name + " do not match its size");
  }
  return m;
}

Json to_json(const Monoid& m) {
  Json rows = Json::array();
  for (std::size_t a = 0; a < m.size; ++a) {
    Json r = Json::array();
    for (std::size_t b = 0; b < m.size; ++b) r.push_back(m.op(a, b));
    rows.push_back(r);
  }
  Json out{{"name", m.name}, {"unit", m.unit}, {"mul", rows}};
  if (!m.labels.empty()) out["labels"] = m.labels;
  return out;
}

Json to_json(const Report& r) {
  Json out = Json::array();
  for (const auto& e : r.entries()) {
    Json x{{"check", e.check}, {"target", e.target}, {"status", e.status}};
    if (!e.witness.empty()) x["witness"] = e.witness;
    out.push_back(x);
  }
  return out;
}

std::string report_text(const Report& r) {
  std::ostringstream out;
  for (const auto& e : r.entries()) {
    out << e.status << ' ' << e.check << ' ' << e.target;
    if (!e.witness.empty()) out << ": " << e.witness;
    out << '\n';
  }
  return out.str();
}

TableOperad operad_from_json(const Json& j) {
  TableOperad o;
  std::vector<std::string> colors = strings(field(j, "colors"), "colors");
  Names cn("color", colors);
  for (const auto& c : colors) o.add_color(c);
  std::vector<std::string> op_names;
  for (const Json& op : list(field(j, "ops"), "ops")) {
    op_names.push_back(text(field(op, "name"), "operation name"));
    std::size_t k = o.add_op(op_names.back(), cn.all(field(op, "inputs")), cn.at(field(op, "output")));
    if (op.contains("cauchy")) o.set_cauchy(k, op["cauchy"].get<bool>());
  }
  Names on("operation", op_names);
  const Json& units = field(j, "units");
  for (std::size_t c = 0; c < colors.size(); ++c) o.set_unit(c, on.at(field(units, colors[c].c_str())));
  if (j.contains("compose"))
    for (const Json& e : list(j["compose"], "compose"))
      o.set_compose(on.at(field(e, "psi")), on.all(field(e, "phis")), on.at(field(e, "result")));
  if (j.contains("permute"))
    for (const Json& e : list(j["permute"], "permute")) {
      Perm s = counts(field(e, "perm"), "perm");
      if (!is_perm(s)) bad("not a permutation");
      o.set_permute(on.at(field(e, "op")), s, on.at(field(e, "result")));
    }
  return o;
}

Json operad_to_json(const Operad& src) {
  TableOperad o = materialize(src);
  std::vector<std::string> colors, names;
  for (std::size_t c = 0; c < o.num_colors(); ++c) colors.push_back(o.color_name(c));
  for (std::size_t k = 0; k < o.num_ops(); ++k) names.push_back(o.op_name(k));
  colors = unique_names(colors);
  names = unique_names(names);
  Json ops = Json::array();
  for (std::size_t k = 0; k < o.num_ops(); ++k) {
    Json e{{"name", names[k]}, {"inputs", name_list(colors, o.sig(k).inputs)},
           {"output", colors[o.sig(k).output]}};
    if (o.is_cauchy(k)) e["cauchy"] = true;
    ops.push_back(e);
  }
  Json units = Json::object();
  for (std::size_t c = 0; c < o.num_colors(); ++c) units[colors[c]] = names[o.unit(c)];
  Json comp = Json::array();
  for (const auto& [key, r] : o.compose_table())
    comp.push_back({{"psi", names[key[0]]},
                    {"phis", name_list(names, std::vector<std::size_t>(key.begin() + 1, key.end()))},
                    {"result", names[r]}});
  Json perm = Json::array();
  for (const auto& [key, r] : o.permute_table())
    perm.push_back({{"op", names[key.first]}, {"perm", key.second}, {"result", names[r]}});
  return Json{{"kind", "operad"}, {"colors", colors}, {"ops", ops},       {"units", units},
              {"compose", comp},  {"permute", perm}};
}

ExplicitPseudoOperad pseudo_operad_from_json(const Json& j) {
  ExplicitPseudoOperad p;
  std::vector<std::string> objects = strings(field(j, "objects"), "objects");
  Names obj("object", objects);
  for (const auto& o : objects) p.add_object(o);

  std::vector<std::string> vnames;
  for (const Json& g : list(field(j, "vmorphs"), "vmorphs")) {
    vnames.push_back(text(field(g, "name"), "vertical morphism name"));
    p.add_vmorph(vnames.back(), obj.at(field(g, "src")), obj.at(field(g, "tgt")));
  }
  Names vm("vertical morphism", vnames);
  for (std::size_t c = 0; c < objects.size(); ++c)
    p.set_vid(c, vm.at(field(field(j, "vid"), objects[c].c_str())));
  for (const Json& e : list(field(j, "vcompose"), "vcompose"))
    p.set_vcompose(vm.at(field(e, "g2")), vm.at(field(e, "g1")), vm.at(field(e, "result")));
  for (const auto& [g, inv] : field(j, "vinverse").items()) p.set_vinverse(vm.at(Json(g)), vm.at(inv));

  std::vector<std::string> onames;
  for (const Json& op : list(field(j, "ops"), "ops")) {
    onames.push_back(text(field(op, "name"), "operation name"));
    p.add_op(onames.back(), OpSig{obj.all(field(op, "inputs")), obj.at(field(op, "output"))});
  }
  Names on("operation", onames);
  for (std::size_t c = 0; c < objects.size(); ++c)
    p.set_unit(c, on.at(field(field(j, "units"), objects[c].c_str())));

  std::vector<std::string> cnames;
  for (const Json& a : list(field(j, "cells"), "cells")) {
    cnames.push_back(text(field(a, "name"), "cell name"));
    p.add_cell(cnames.back(), CellSig{on.at(field(a, "from")), on.at(field(a, "to")),
                                      vm.all(field(a, "s")), vm.at(field(a, "t"))});
  }
  Names cl("cell", cnames);
  for (const auto& [op, a] : field(j, "cell_id").items()) p.set_cell_id(on.at(Json(op)), cl.at(a));
  for (const Json& e : list(field(j, "cell_vcompose"), "cell_vcompose"))
    p.set_cell_vcompose(cl.at(field(e, "b")), cl.at(field(e, "a")), cl.at(field(e, "result")));
  for (const auto& [a, inv] : field(j, "cell_inverse").items())
    p.set_cell_inverse(cl.at(Json(a)), cl.at(inv));
  for (const Json& e : list(field(j, "cmp"), "cmp"))
    p.set_cmp(on.at(field(e, "psi")), on.all(field(e, "phis")), on.at(field(e, "result")));
  for (const Json& e : list(field(j, "cmp_cells"), "cmp_cells"))
    p.set_cmp_cells(cl.at(field(e, "alpha")), cl.all(field(e, "betas")), cl.at(field(e, "result")));
  for (const auto& [g, a] : field(j, "unit_cell").items()) p.set_unit_cell(vm.at(Json(g)), cl.at(a));
  for (const Json& e : list(field(j, "permute"), "permute"))
    p.set_permute(on.at(field(e, "op")), counts(field(e, "perm"), "perm"), on.at(field(e, "result")));
  for (const Json& e : list(field(j, "permute_cell"), "permute_cell"))
    p.set_permute_cell(cl.at(field(e, "cell")), counts(field(e, "perm"), "perm"),
                       cl.at(field(e, "result")));
  for (const Json& e : list(field(j, "assoc"), "assoc"))
    p.set_assoc(on.at(field(e, "psi")), on.all(field(e, "phis")), on.all(field(e, "chis")),
                cl.at(field(e, "result")));
  for (const auto& [op, a] : field(j, "lunit").items()) p.set_lunit(on.at(Json(op)), cl.at(a));
  for (const auto& [op, a] : field(j, "runit").items()) p.set_runit(on.at(Json(op)), cl.at(a));
  return p;
}

Json pseudo_operad_to_json(ExplicitPseudoOperad& p) {
  std::vector<std::string> obj, vm, on, cl;
  for (std::size_t c = 0; c < p.num_objects(); ++c) obj.push_back(p.object_name(c));
  for (std::size_t g = 0; g < p.num_vmorphs(); ++g) vm.push_back(p.vmorph_name(g));
  for (std::size_t k = 0; k < p.num_ops(); ++k) on.push_back(p.op_name(k));
  for (std::size_t a = 0; a < p.num_cells(); ++a) cl.push_back(p.cell_name(a));
  obj = unique_names(obj);
  vm = unique_names(vm);
  on = unique_names(on);
  cl = unique_names(cl);
  auto ids = [](const std::vector<std::size_t>& k, std::size_t from, std::size_t to) {
    return std::vector<std::size_t>(k.begin() + static_cast<std::ptrdiff_t>(from),
                                    k.begin() + static_cast<std::ptrdiff_t>(to));
  };

  Json j{{"kind", "pseudo_operad"}, {"objects", obj}};
  Json vms = Json::array(), vid = Json::object(), vinv = Json::object(), vcomp = Json::array();
  for (std::size_t g = 0; g < p.num_vmorphs(); ++g) {
    vms.push_back({{"name", vm[g]}, {"src", obj[p.vsig(g).first]}, {"tgt", obj[p.vsig(g).second]}});
    vinv[vm[g]] = vm[p.vinverse(g)];
  }
  for (std::size_t c = 0; c < p.num_objects(); ++c) vid[obj[c]] = vm[p.vid(c)];
  for (const auto& [k, r] : p.vcompose_table())
    vcomp.push_back({{"g2", vm[k.first]}, {"g1", vm[k.second]}, {"result", vm[r]}});
  j["vmorphs"] = vms;
  j["vid"] = vid;
  j["vcompose"] = vcomp;
  j["vinverse"] = vinv;

  Json ops = Json::array(), units = Json::object();
  for (std::size_t k = 0; k < p.num_ops(); ++k)
    ops.push_back({{"name", on[k]}, {"inputs", name_list(obj, p.sig(k).inputs)},
                   {"output", obj[p.sig(k).output]}});
  for (std::size_t c = 0; c < p.num_objects(); ++c) units[obj[c]] = on[p.unit(c)];
  j["ops"] = ops;
  j["units"] = units;

  Json cells = Json::array(), cid = Json::object(), cinv = Json::object(), ucell = Json::object();
  for (std::size_t a = 0; a < p.num_cells(); ++a) {
    const CellSig& s = p.csig(a);
    cells.push_back({{"name", cl[a]}, {"from", on[s.from]}, {"to", on[s.to]},
                     {"s", name_list(vm, s.s)}, {"t", vm[s.t]}});
    cinv[cl[a]] = cl[p.cell_inverse(a)];
  }
  for (std::size_t k = 0; k < p.num_ops(); ++k) cid[on[k]] = cl[p.cell_id(k)];
  for (std::size_t g = 0; g < p.num_vmorphs(); ++g) ucell[vm[g]] = cl[p.unit_cell(g)];
  j["cells"] = cells;
  j["cell_id"] = cid;
  Json cvc = Json::array();
  for (const auto& [k, r] : p.cell_vcompose_table())
    cvc.push_back({{"b", cl[k.first]}, {"a", cl[k.second]}, {"result", cl[r]}});
  j["cell_vcompose"] = cvc;
  j["cell_inverse"] = cinv;

  Json cmp = Json::array(), cmpc = Json::array();
  for (const auto& [k, r] : p.cmp_table())
    cmp.push_back({{"psi", on[k[0]]}, {"phis", name_list(on, ids(k, 1, k.size()))}, {"result", on[r]}});
  for (const auto& [k, r] : p.cmp_cells_table())
    cmpc.push_back(
        {{"alpha", cl[k[0]]}, {"betas", name_list(cl, ids(k, 1, k.size()))}, {"result", cl[r]}});
  j["cmp"] = cmp;
  j["cmp_cells"] = cmpc;
  j["unit_cell"] = ucell;

  Json perm = Json::array(), cperm = Json::array();
  for (const auto& [k, r] : p.permute_table())
    perm.push_back({{"op", on[k.first]}, {"perm", k.second}, {"result", on[r]}});
  for (const auto& [k, r] : p.permute_cell_table())
    cperm.push_back({{"cell", cl[k.first]}, {"perm", k.second}, {"result", cl[r]}});
  j["permute"] = perm;
  j["permute_cell"] = cperm;

  Json assoc = Json::array();
  for (const auto& [k, r] : p.assoc_table()) {
    std::size_t n = k[1];
    assoc.push_back({{"psi", on[k[0]]},
                     {"phis", name_list(on, ids(k, 2, 2 + n))},
                     {"chis", name_list(on, ids(k, 2 + n, k.size()))},
                     {"result", cl[r]}});
  }
  j["assoc"] = assoc;
  Json lu = Json::object(), ru = Json::object();
  for (std::size_t k = 0; k < p.num_ops(); ++k) {
    if (auto a = p.lunit(k)) lu[on[k]] = cl[*a];
    if (auto a = p.runit(k)) ru[on[k]] = cl[*a];
  }
  j["lunit"] = lu;
  j["runit"] = ru;
  return j;
}

Window window_from_json(const Json& in, const LoadOptions& o) {
  auto [j, opt] = resolve(in, o);
  Window w;
  w.source = j;
  w.max_arity = j.contains("max_arity") ? count(j["max_arity"], "max_arity") : 2;
  w.max_events = opt.max_events ? *opt.max_events
                                : j.contains("max_events") ? count(j["max_events"], "max_events") : 10;
  const Json& spaces = field(j, "spaces");
  if (!spaces.is_object()) bad("spaces must map names to causal sets");
  for (const auto& [name, s] : spaces.items())
    w.spaces.push_back({name, share(causal_set_from_json(s, opt))});
  std::set<std::string> names;
  for (const Json& x : list(field(j, "objects"), "objects")) {
    PointedObject ob;
    ob.name = text(field(x, "name"), "object name");
    if (!names.insert(ob.name).second) bad("duplicate object \"" + ob.name + "\"");
    ob.M = w.spaces[space_index(w, text(field(x, "space"), "space"))].set;
    ob.sigma = ob.M->mask(strings(field(x, "sigma"), "sigma"));
    w.objects.push_back(std::move(ob));
  }
  return w;
}

Json to_json(const Window& w) {
  Json spaces = Json::object();
  for (const auto& s : w.spaces) spaces[s.name] = to_json(*s.set);
  Json objects = Json::array();
  for (const auto& o : w.objects) {
    std::string space;
    for (const auto& s : w.spaces)
      if (*s.set == *o.M) space = s.name;
    objects.push_back({{"name", o.name}, {"space", space}, {"sigma", o.M->names_of(o.sigma)}});
  }
  return Json{{"kind", "fragment"},          {"spaces", spaces},
              {"objects", objects},          {"max_arity", w.max_arity},
              {"max_events", w.max_events}};
}

PointedObject object_from_json(const Json& j, const LoadOptions& opt, const Window* w) {
  if (j.is_string() && w) {
    std::string n = j.get<std::string>();
    for (const auto& o : w->objects)
      if (o.name == n) return o;
    bad("unknown object \"" + n + "\"");
  }
  PointedObject o;
  o.name = j.contains("name") ? text(j["name"], "object name") : std::string();
  o.M = share(causal_set_from_json(field(j, "M"), opt));
  o.sigma = o.M->mask(strings(field(j, "sigma"), "sigma"));
  return o;
}

Json to_json(const PointedObject& o) {
  return Json{{"name", o.name}, {"M", to_json(*o.M)}, {"sigma", o.M->names_of(o.sigma)}};
}

Bordism bordism_from_json(const Json& j, const LoadOptions& opt, const Window* w) {
  Bordism b;
  for (const Json& x : list(field(j, "inputs"), "inputs")) b.inputs.push_back(object_from_json(x, opt, w));
  b.output = object_from_json(field(j, "output"), opt, w);
  b.N = share(causal_set_from_json(field(j, "N"), opt));
  const Json& i0 = list(field(j, "iota0"), "iota0");
  if (i0.size() != b.inputs.size()) bad("iota0 needs one collar per input");
  for (std::size_t i = 0; i < i0.size(); ++i)
    b.iota0.push_back(collar_from_json(i0[i], *b.inputs[i].M, *b.N));
  b.iota1 = collar_from_json(field(j, "iota1"), *b.output.M, *b.N);
  return b;
}

Json to_json(const Bordism& b, const Window* w) {
  auto obj = [&](const PointedObject& o) -> Json {
    if (w)
      if (auto i = window_object(*w, o)) return w->objects[*i].name;
    return to_json(o);
  };
  Json inputs = Json::array(), iota0 = Json::array();
  for (std::size_t i = 0; i < b.inputs.size(); ++i) {
    inputs.push_back(obj(b.inputs[i]));
    iota0.push_back(collar_to_json(b.iota0[i], *b.inputs[i].M, *b.N));
  }
  return Json{{"inputs", inputs},
              {"output", obj(b.output)},
              {"N", to_json(*b.N)},
              {"iota0", iota0},
              {"iota1", collar_to_json(b.iota1, *b.output.M, *b.N)}};
}

BordismFragment build_fragment(const Window& w) {
  FragmentOptions opt;
  opt.max_arity = w.max_arity;
  opt.max_events = w.max_events;
  std::vector<CausalSetRef> spaces;
  for (const auto& s : w.spaces) spaces.push_back(s.set);
  return BordismFragment::enumerate(w.objects, spaces, opt);
}

World::World(Window w) : window_(std::move(w)) {}

const PrefactorizationOperad& World::aqft() {
  if (!aqft_) aqft_ = std::make_unique<PrefactorizationOperad>(window_.spaces, window_.max_arity);
  return *aqft_;
}

BordismFragment& World::fragment() {
  if (!fragment_) fragment_ = std::make_unique<BordismFragment>(build_fragment(window_));
  return *fragment_;
}

const Truncation& World::truncation() {
  if (!trunc_) trunc_ = std::make_unique<Truncation>(tau(fragment()));
  return *trunc_;
}

const TranslationContext& World::context() {
  if (!ctx_)
    ctx_ = std::make_unique<TranslationContext>(make_context(aqft(), fragment(), truncation()));
  return *ctx_;
}

Model aqft_model_from_json(const Json& j, World& world) {
  const PrefactorizationOperad& p = world.aqft();
  const Window& w = world.window();
  Model m;
  m.base = &p;
  const Json& colors = field(j, "colors");
  monoid_keys(colors, p.num_colors(), "colors");
  for (std::size_t c = 0; c < p.num_colors(); ++c)
    m.colors.push_back(monoid_from_json(field(colors, p.color_name(c).c_str())));
  m.ops.assign(p.num_ops(), std::nullopt);
  for (const Json& e : list(field(j, "ops"), "ops")) {
    std::size_t out = space_index(w, text(field(e, "output"), "output"));
    std::vector<std::size_t> ins;
    for (const Json& x : list(field(e, "inputs"), "inputs")) ins.push_back(space_index(w, text(x, "input")));
    const Json& mj = list(field(e, "maps"), "maps");
    if (mj.size() != ins.size()) bad("maps need one entry per input");
    std::vector<std::vector<std::size_t>> maps;
    for (std::size_t i = 0; i < ins.size(); ++i) {
      const CausalSet& src = *w.spaces[ins[i]].set;
      Collar c = collar_from_json(mj[i], src, *w.spaces[out].set);
      if (c.domain != src.all()) bad("a map must be defined on every event");
      maps.push_back(c.map);
    }
    auto op = p.find_op(out, ins, maps);
    if (!op) bad("operation into " + w.spaces[out].name + " is not in the window");
    if (m.ops[*op]) bad("operation " + p.op_name(*op) + " is assigned twice");
    m.ops[*op] = table_from_json(field(e, "table"), m, *op, p.op_name(*op));
  }
  return m;
}

Json aqft_model_to_json(const Model& m, World& world) {
  const PrefactorizationOperad& p = world.aqft();
  Json colors = Json::object();
  for (std::size_t c = 0; c < p.num_colors(); ++c) colors[p.color_name(c)] = to_json(m.colors[c]);
  Json ops = Json::array();
  for (std::size_t k = 0; k < p.num_ops(); ++k) {
    if (!m.ops[k]) continue;
    const auto& op = p.op(k);
    const CausalSet& dst = *p.color(op.sig.output).set;
    Json ins = Json::array(), maps = Json::array();
    for (std::size_t i = 0; i < op.maps.size(); ++i) {
      const CausalSet& src = *p.color(op.sig.inputs[i]).set;
      ins.push_back(p.color_name(op.sig.inputs[i]));
      maps.push_back(collar_to_json(Collar{src.all(), op.maps[i]}, src, dst));
    }
    ops.push_back({{"name", p.op_name(k)},
                   {"output", p.color_name(op.sig.output)},
                   {"inputs", ins},
                   {"maps", maps},
                   {"table", *m.ops[k]}});
  }
  return Json{{"kind", "aqft_model"}, {"window", to_json(world.window())}, {"colors", colors},
              {"ops", ops}};
}

Model fqft_model_from_json(const Json& j, World& world) {
  BordismFragment& f = world.fragment();
  const Truncation& t = world.truncation();
  const Window& w = world.window();
  Model m;
  m.base = &t.operad;
  const Json& colors = field(j, "colors");
  monoid_keys(colors, f.num_objects(), "colors");
  for (std::size_t d = 0; d < f.num_objects(); ++d)
    m.colors.push_back(monoid_from_json(field(colors, f.object_name(d).c_str())));
  m.ops.assign(t.operad.num_ops(), std::nullopt);
  LoadOptions opt;
  opt.max_events = w.max_events;
  for (const Json& e : list(field(j, "ops"), "ops")) {
    Bordism b = bordism_from_json(e, opt, &w);
    auto op = f.intern_op(b);
    if (!op) bad("a bordism of the model is not in the fragment");
    auto k = class_of_op(f, t, *op);
    if (!k) bad("a bordism of the model has no class");
    HomTable h = table_from_json(field(e, "table"), m, *k, t.operad.op_name(*k));
    if (m.ops[*k] && *m.ops[*k] != h) bad("class " + t.operad.op_name(*k) + " gets two tables");
    m.ops[*k] = std::move(h);
  }
  return m;
}

Json fqft_model_to_json(const Model& m, World& world) {
  BordismFragment& f = world.fragment();
  const Truncation& t = world.truncation();
  Json colors = Json::object();
  for (std::size_t d = 0; d < f.num_objects(); ++d) colors[f.object_name(d)] = to_json(m.colors[d]);
  Json ops = Json::array();
  for (std::size_t k = 0; k < t.operad.num_ops(); ++k) {
    if (!m.ops[k]) continue;
    Json e{{"class", t.operad.op_name(k)}};
    e.update(to_json(f.bordism(t.members[k][0]), &world.window()));
    e["table"] = *m.ops[k];
    ops.push_back(e);
  }
  return Json{{"kind", "fqft_model"}, {"window", to_json(world.window())}, {"colors", colors},
              {"ops", ops}};
}

}  // namespace lqft::io
