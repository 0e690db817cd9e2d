#include "lqft/bordism.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "lqft/error.hpp"

namespace lqft {

namespace {

Bits apply(const Collar& c, Bits x) {
  Bits out = 0;
  for_each_bit(x & c.domain, [&](std::size_t v) { out |= bit(c.map[v]); });
  return out;
}

std::string poset_key(const CausalSet& m) {
  std::string s;
  for (const auto& n : m.events()) s += n + ",";
  s += "|";
  for (const auto& [a, b] : m.cover_pairs()) s += std::to_string(a) + "<" + std::to_string(b) + ",";
  return s;
}

std::string collar_key(const Collar& c) {
  std::string s = std::to_string(c.domain) + ":";
  for_each_bit(c.domain, [&](std::size_t v) { s += std::to_string(c.map[v]) + ","; });
  return s;
}

// Ranks of the events of x, kNone elsewhere.
std::vector<std::size_t> ranks(Bits x, std::size_t n) {
  std::vector<std::size_t> r(n, kNone);
  std::size_t k = 0;
  for_each_bit(x, [&](std::size_t v) { r[v] = k++; });
  return r;
}

std::string collar_violation(const PointedObject& o, const Collar& c, const CausalSet& n) {
  const CausalSet& m = *o.M;
  if (c.map.size() != m.size()) return "collar map has the wrong length";
  if (c.domain & ~m.all()) return "collar domain outside M";
  if ((c.domain & o.sigma) != o.sigma) return "collar misses the Cauchy surface";
  if (!m.is_slab(c.domain)) return "collar is not a slab neighbourhood of the surface";
  std::vector<std::size_t> img;
  for (std::size_t v = 0; v < m.size(); ++v) {
    bool in = has(c.domain, v);
    if (in != (c.map[v] != kNone)) return "collar map is not defined exactly on its domain";
    if (in) {
      if (c.map[v] >= n.size()) return "collar map leaves N";
      img.push_back(c.map[v]);
    }
  }
  std::string why = embedding_violation(m.induced(c.domain), n, img);
  return why.empty() ? "" : "collar: " + why;
}

// Slabs of n containing h, smallest first.
std::vector<Bits> slabs_containing(const CausalSet& n, Bits h) {
  std::vector<Bits> out;
  for (Bits z : n.convex_subsets())
    if ((z & h) == h && n.is_slab(z)) out.push_back(z);
  std::stable_sort(out.begin(), out.end(),
                   [](Bits a, Bits b) { return popcount(a) < popcount(b); });
  return out;
}

}  // namespace

bool same_object(const PointedObject& a, const PointedObject& b) {
  return a.sigma == b.sigma && (a.M == b.M || *a.M == *b.M);
}

Report validate_object(const PointedObject& o) {
  Report r;
  std::string T = "object " + o.name;
  if (!o.M || o.M->empty())
    r.fail("object", T, "empty causal set");
  else if (!o.M->is_cauchy(o.sigma))
    r.fail("object", T, "surface {" + [&] {
      std::string s;
      for (const auto& n : o.M->names_of(o.sigma)) s += (s.empty() ? "" : ",") + n;
      return s;
    }() + "} is not a Cauchy antichain");
  else
    r.pass("object", T, 1);
  return r;
}

Bits Collar::image() const { return apply(*this, domain); }

Collar full_collar(const CausalSet& m) {
  Collar c;
  c.domain = m.all();
  for (std::size_t v = 0; v < m.size(); ++v) c.map.push_back(v);
  return c;
}

Bits input_surfaces(const Bordism& b) {
  Bits out = 0;
  for (std::size_t i = 0; i < b.arity(); ++i) out |= apply(b.iota0[i], b.inputs[i].sigma);
  return out;
}

Bits output_surface(const Bordism& b) { return apply(b.iota1, b.output.sigma); }

Bits surface_hull(const Bordism& b) {
  return b.N->hull(input_surfaces(b) | output_surface(b));
}

bool is_cauchy_bordism(const Bordism& b) {
  return b.arity() == 1 && b.N->is_slab(b.iota0[0].image());
}

Report validate_bordism(const Bordism& b, const std::string& target) {
  Report r;
  std::size_t mark = r.mark();
  if (!b.N || b.N->empty()) {
    r.fail("bordism-objects", target, "N is empty");
    return r;
  }
  if (b.iota0.size() != b.inputs.size()) {
    r.fail("bordism-objects", target, "one collar per input required");
    return r;
  }
  for (std::size_t i = 0; i <= b.arity(); ++i) {
    const PointedObject& o = i < b.arity() ? b.inputs[i] : b.output;
    Report ro = validate_object(o);
    if (!ro.ok()) r.fail("bordism-objects", target, ro.entries()[0].witness);
  }
  r.close(mark, "bordism-objects", target, b.arity() + 1);
  if (!r.ok()) return r;
  const CausalSet& n = *b.N;
  mark = r.mark();
  for (std::size_t i = 0; i < b.arity(); ++i) {
    std::string why = collar_violation(b.inputs[i], b.iota0[i], n);
    if (!why.empty()) r.fail("bordism-collars", target, "input " + std::to_string(i) + ": " + why);
  }
  std::string why = collar_violation(b.output, b.iota1, n);
  if (!why.empty())
    r.fail("bordism-collars", target, "output: " + why);
  else if (!n.is_slab(b.iota1.image()))
    r.fail("bordism-collars", target, "output collar is not a Cauchy embedding");
  r.close(mark, "bordism-collars", target, b.arity() + 1);
  if (!r.ok()) return r;
  mark = r.mark();
  for (std::size_t i = 0; i < b.arity(); ++i)
    for (std::size_t j = i + 1; j < b.arity(); ++j)
      if (!n.disjoint_causally(b.iota0[i].image(), b.iota0[j].image()))
        r.fail("bordism-disjoint", target,
               "inputs " + std::to_string(i) + " and " + std::to_string(j) +
                   " are not causally disjoint in N");
  r.close(mark, "bordism-disjoint", target, b.arity() * (b.arity() ? b.arity() - 1 : 0) / 2);
  Bits in = input_surfaces(b), out = output_surface(b);
  if (is_cauchy_bordism(b)) {
    if ((in & n.past(out)) != in)
      r.fail("bordism-surfaces", target, "input surface not in the causal past of the output");
    else
      r.pass("bordism-surfaces", target, 1, 0, "Cauchy case");
  } else {
    Bits bad = in & ~n.chrono_past(out);
    if (bad)
      r.fail("bordism-surfaces", target,
             "event " + n.name(static_cast<std::size_t>(std::countr_zero(bad))) +
                 " of an input surface is not in the chronological past of the output");
    else
      r.pass("bordism-surfaces", target, 1);
  }
  return r;
}

Bordism identity_bordism(const PointedObject& o) {
  Bordism b;
  b.inputs = {o};
  b.output = o;
  b.N = o.M;
  b.iota0 = {full_collar(*o.M)};
  b.iota1 = full_collar(*o.M);
  return b;
}

Bordism permute_bordism(const Bordism& b, const Perm& sigma) {
  if (sigma.size() != b.arity() || !is_perm(sigma))
    throw Error("ArityMismatch", "permutation does not match the arity");
  Bordism out = b;
  out.inputs = permute_tuple(b.inputs, sigma);
  out.iota0 = permute_tuple(b.iota0, sigma);
  return out;
}

std::string object_key(const PointedObject& o) {
  return poset_key(*o.M) + "#" + std::to_string(o.sigma);
}

std::string bordism_key(const Bordism& b) {
  std::string s = "N=" + poset_key(*b.N) + ";out=" + object_key(b.output) + ";" +
                  collar_key(b.iota1) + ";in=";
  for (std::size_t i = 0; i < b.arity(); ++i)
    s += "[" + object_key(b.inputs[i]) + ";" + collar_key(b.iota0[i]) + "]";
  return s;
}

Overhang overhang_regions(const Bordism& outer, const std::vector<Bordism>& inners) {
  if (inners.size() != outer.arity())
    throw Error("BoundaryMismatch", "need one inner bordism per outer input");
  for (std::size_t i = 0; i < inners.size(); ++i)
    if (!same_object(inners[i].output, outer.inputs[i]))
      throw Error("BoundaryMismatch", "inner " + std::to_string(i) + " ends at " +
                                          inners[i].output.name + ", outer input is " +
                                          outer.inputs[i].name);
  const CausalSet& n1 = *outer.N;
  Overhang o;
  Bits removed = 0, glued = 0;
  for (std::size_t i = 0; i < inners.size(); ++i) {
    Bits w = outer.iota0[i].domain & inners[i].iota1.domain;
    o.overlaps.push_back(w);
    removed |= n1.past(apply(outer.iota0[i], outer.inputs[i].sigma));
    glued |= apply(outer.iota0[i], w);
    const CausalSet& n0 = *inners[i].N;
    Bits minus = n0.past(apply(inners[i].iota1, w));
    o.n0minus.push_back(minus);
    Bits need = input_surfaces(inners[i]) | output_surface(inners[i]);
    if (!n0.is_convex(minus) || (minus & need) != need)
      throw Error("GluingRegion", "inner region " + std::to_string(i) +
                                      " is not convex or misses a surface");
  }
  o.n1plus = (n1.all() & ~removed) | glued;
  Bits need = input_surfaces(outer) | output_surface(outer);
  if (!n1.is_convex(o.n1plus) || (o.n1plus & need) != need)
    throw Error("GluingRegion", "outer region is not convex or misses a surface");
  return o;
}

Composite compose_bordisms(const Bordism& outer, const std::vector<Bordism>& inners) {
  Overhang reg = overhang_regions(outer, inners);
  const CausalSet& n1 = *outer.N;
  const std::size_t k = inners.size();
  CausalSet right = n1.induced(reg.n1plus);
  std::vector<std::size_t> right_rank = ranks(reg.n1plus, n1.size());
  std::set<std::string> taken(right.events().begin(), right.events().end());

  // Names of the left pieces: glued events get throwaway names that are
  // never shown, inner-only events get name@anchor.
  struct Pending {
    std::string cand, anchor, orig;
    std::size_t i, v;
  };
  std::vector<Pending> pending;
  std::vector<std::vector<std::string>> left_names(k);
  for (std::size_t i = 0; i < k; ++i) {
    const CausalSet& n0 = *inners[i].N;
    left_names[i].assign(n0.size(), "");
    Bits w = reg.overlaps[i];
    Bits glued0 = apply(inners[i].iota1, w);
    std::string anchor;
    for_each_bit(apply(outer.iota0[i], w), [&](std::size_t x) {
      if (anchor.empty() || n1.name(x) < anchor) anchor = n1.name(x);
    });
    for_each_bit(reg.n0minus[i], [&](std::size_t v) {
      if (has(glued0, v))
        left_names[i][v] = "\x1f" + std::to_string(v);
      else
        pending.push_back({n0.name(v) + "@" + anchor, anchor, n0.name(v), i, v});
    });
  }
  std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    return std::tie(a.cand, a.anchor, a.orig) < std::tie(b.cand, b.anchor, b.orig);
  });
  for (const Pending& p : pending) {
    std::string n = p.cand;
    while (taken.count(n)) n += "'";
    taken.insert(n);
    left_names[p.i][p.v] = n;
  }

  std::vector<CausalSet> lefts, mids;
  std::vector<std::vector<std::size_t>> into_left, into_right;
  for (std::size_t i = 0; i < k; ++i) {
    const CausalSet& n0 = *inners[i].N;
    std::vector<std::string> names;
    std::vector<std::pair<std::string, std::string>> rel;
    for_each_bit(reg.n0minus[i], [&](std::size_t v) { names.push_back(left_names[i][v]); });
    for (const auto& [a, b] : n0.cover_pairs())
      if (has(reg.n0minus[i], a) && has(reg.n0minus[i], b))
        rel.emplace_back(left_names[i][a], left_names[i][b]);
    lefts.emplace_back(names, rel);
    const CausalSet& m = *outer.inputs[i].M;
    mids.push_back(m.induced(reg.overlaps[i]));
    std::vector<std::size_t> ml, mr;
    for_each_bit(reg.overlaps[i], [&](std::size_t w) {
      ml.push_back(lefts.back().index(left_names[i][inners[i].iota1.map[w]]));
      mr.push_back(right_rank[outer.iota0[i].map[w]]);
    });
    into_left.push_back(ml);
    into_right.push_back(mr);
  }
  GlueResult g = glue_pushout(lefts, mids, right, into_left, into_right);

  Composite c;
  CausalSetRef n = share(std::move(g.result));
  c.from_outer.assign(n1.size(), kNone);
  for_each_bit(reg.n1plus, [&](std::size_t x) { c.from_outer[x] = g.from_right[right_rank[x]]; });
  for (std::size_t i = 0; i < k; ++i) {
    c.from_inner.emplace_back(inners[i].N->size(), kNone);
    for_each_bit(reg.n0minus[i], [&](std::size_t v) {
      c.from_inner[i][v] = g.from_left[i][lefts[i].index(left_names[i][v])];
    });
  }
  Bordism& b = c.result;
  b.N = n;
  b.output = outer.output;
  {
    const Collar& o = outer.iota1;
    const CausalSet& m = *outer.output.M;
    Bits d = 0;
    for_each_bit(o.domain, [&](std::size_t v) {
      if (has(reg.n1plus, o.map[v])) d |= bit(v);
    });
    if (!m.is_slab(d)) d = o.domain & m.future(outer.output.sigma);
    b.iota1.domain = d;
    b.iota1.map.assign(m.size(), kNone);
    for_each_bit(d, [&](std::size_t v) { b.iota1.map[v] = c.from_outer[o.map[v]]; });
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < inners[i].arity(); ++j) {
      const Collar& o = inners[i].iota0[j];
      const PointedObject& obj = inners[i].inputs[j];
      const CausalSet& m = *obj.M;
      Bits d = 0;
      for_each_bit(o.domain, [&](std::size_t v) {
        if (has(reg.n0minus[i], o.map[v])) d |= bit(v);
      });
      if (!m.is_slab(d)) d = o.domain & m.past(obj.sigma);
      Collar nc;
      nc.domain = d;
      nc.map.assign(m.size(), kNone);
      for_each_bit(d, [&](std::size_t v) { nc.map[v] = c.from_inner[i][o.map[v]]; });
      b.inputs.push_back(obj);
      b.iota0.push_back(nc);
    }
  Report r = validate_bordism(b, "composite");
  if (!r.ok())
    for (const auto& e : r.entries())
      if (e.status == "fail") throw Error("InvalidComposite", e.check + ": " + e.witness);
  c.regions = std::move(reg);
  return c;
}

std::optional<CellBoundary> cell_boundary(const Bordism& a, const Bordism& b, const CellRep& rep) {
  const CausalSet& na = *a.N;
  const CausalSet& nb = *b.N;
  if (a.arity() != b.arity() || rep.f.size() != na.size()) return std::nullopt;
  Bits h = surface_hull(a);
  if ((rep.Z & h) != h || (rep.Z & ~na.all()) || !na.is_slab(rep.Z)) return std::nullopt;
  std::vector<std::size_t> img;
  Bits image = 0;
  for (std::size_t x = 0; x < na.size(); ++x) {
    bool in = has(rep.Z, x);
    if (in != (rep.f[x] != kNone)) return std::nullopt;
    if (in) {
      if (rep.f[x] >= nb.size()) return std::nullopt;
      img.push_back(rep.f[x]);
      image |= bit(rep.f[x]);
    }
  }
  if (!embedding_violation(na.induced(rep.Z), nb, img).empty() || !nb.is_slab(image))
    return std::nullopt;
  auto germ = [&](const PointedObject& oa, const Collar& ca, const PointedObject& ob,
                  const Collar& cb) -> std::optional<Perm> {
    if (popcount(oa.sigma) != popcount(ob.sigma)) return std::nullopt;
    std::vector<std::size_t> rb = ranks(ob.sigma, ob.M->size());
    Perm p;
    bool ok = true;
    for_each_bit(oa.sigma, [&](std::size_t s) {
      std::size_t y = rep.f[ca.map[s]];
      std::size_t hit = kNone;
      for_each_bit(ob.sigma, [&](std::size_t t) {
        if (cb.map[t] == y) hit = t;
      });
      if (hit == kNone) ok = false;
      p.push_back(hit == kNone ? 0 : rb[hit]);
    });
    if (!ok) return std::nullopt;
    return p;
  };
  CellBoundary out;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    auto g = germ(a.inputs[i], a.iota0[i], b.inputs[i], b.iota0[i]);
    if (!g) return std::nullopt;
    out.s.push_back(*g);
  }
  auto t = germ(a.output, a.iota1, b.output, b.iota1);
  if (!t) return std::nullopt;
  out.t = *t;
  return out;
}

std::optional<CellRep> find_cell(const Bordism& a, const Bordism& b,
                                 const std::vector<std::size_t>& fixed) {
  const CausalSet& na = *a.N;
  const CausalSet& nb = *b.N;
  if (fixed.size() != na.size()) return std::nullopt;
  Bits h = surface_hull(a);
  Bits d = 0;
  for (std::size_t x = 0; x < na.size(); ++x)
    if (fixed[x] != kNone) d |= bit(x);
  if ((d & h) != h) return std::nullopt;
  auto restrict_to = [&](Bits z) {
    CellRep rep{z, std::vector<std::size_t>(na.size(), kNone)};
    for_each_bit(z, [&](std::size_t x) { rep.f[x] = fixed[x]; });
    return rep;
  };
  if (na.is_slab(h)) {
    CellRep rep = restrict_to(h);
    if (cell_boundary(a, b, rep)) return rep;
  }
  std::vector<Bits> slabs = slabs_containing(na, h);
  for (Bits z : slabs)
    if ((z & d) == z) {
      CellRep rep = restrict_to(z);
      if (cell_boundary(a, b, rep)) return rep;
    }
  for (Bits z : slabs) {
    if ((z & d) == z) continue;
    CausalSet zs = na.induced(z);
    std::vector<std::size_t> idx = bit_list(z);
    std::vector<Bits> allowed(idx.size(), 0);
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (has(h, idx[k])) allowed[k] = bit(fixed[idx[k]]);
    std::optional<CellRep> found;
    enumerate_embeddings(zs, nb, allowed, [&](const std::vector<std::size_t>& m) {
      CellRep rep{z, std::vector<std::size_t>(na.size(), kNone)};
      for (std::size_t k = 0; k < idx.size(); ++k) rep.f[idx[k]] = m[k];
      if (cell_boundary(a, b, rep)) {
        found = rep;
        return false;
      }
      return true;
    });
    if (found) return found;
  }
  return std::nullopt;
}

std::optional<CellRep> find_globular_cell(const Bordism& a, const Bordism& b) {
  if (a.arity() != b.arity() || !same_object(a.output, b.output)) return std::nullopt;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!same_object(a.inputs[i], b.inputs[i])) return std::nullopt;
  const CausalSet& na = *a.N;
  const CausalSet& nb = *b.N;
  Bits ha = surface_hull(a), hb = surface_hull(b);
  if (popcount(ha) != popcount(hb)) return std::nullopt;
  std::vector<std::size_t> pin(na.size(), kNone);
  auto fix = [&](const PointedObject& o, const Collar& ca, const Collar& cb) {
    bool ok = true;
    for_each_bit(o.sigma, [&](std::size_t s) {
      std::size_t x = ca.map[s], y = cb.map[s];
      if (pin[x] != kNone && pin[x] != y) ok = false;
      pin[x] = y;
    });
    return ok;
  };
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!fix(a.inputs[i], a.iota0[i], b.iota0[i])) return std::nullopt;
  if (!fix(a.output, a.iota1, b.iota1)) return std::nullopt;
  CausalSet hs = na.induced(ha);
  std::vector<std::size_t> idx = bit_list(ha);
  std::vector<Bits> allowed(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k)
    allowed[k] = pin[idx[k]] != kNone ? bit(pin[idx[k]]) : hb;
  std::optional<CellRep> found;
  enumerate_embeddings(hs, nb, allowed, [&](const std::vector<std::size_t>& m) {
    std::vector<std::size_t> fixed(na.size(), kNone);
    for (std::size_t k = 0; k < idx.size(); ++k) fixed[idx[k]] = m[k];
    found = find_cell(a, b, fixed);
    return !found;
  });
  return found;
}

std::string bordism_dot(const Bordism& b) {
  return to_dot(*b.N, {{"source", input_surfaces(b)}, {"target", output_surface(b)}});
}

// The fragment.

BordismFragment::BordismFragment(std::vector<PointedObject> objects, FragmentOptions opt)
    : opt_(opt), objects_(std::move(objects)) {
  for (const auto& o : objects_) {
    Report r = validate_object(o);
    if (!r.ok()) throw Error("InvalidObject", r.entries()[0].witness);
  }
  init_vertical();
}

BordismFragment::BordismFragment(std::vector<PointedObject> objects,
                                 const std::vector<Bordism>& generators, std::size_t depth,
                                 FragmentOptions opt)
    : BordismFragment(std::move(objects), opt) {
  add_units_and_companions();
  for (std::size_t i = 0; i < generators.size(); ++i) {
    Report r = validate_bordism(generators[i], "generator " + std::to_string(i));
    if (!r.ok()) throw Error("InvalidBordism", r.entries().back().witness);
    if (!intern_op(generators[i]))
      throw Error("InvalidBordism", "generator " + std::to_string(i) +
                                        " uses an unknown object or exceeds the caps");
  }
  close_permutations(0);
  for (std::size_t round = 0; round < depth; ++round) {
    std::size_t n = ops_.size();
    std::vector<std::vector<std::size_t>> into(objects_.size());
    for (std::size_t op = 0; op < n; ++op) into[ops_[op].sig.output].push_back(op);
    for (std::size_t psi = 0; psi < n && ops_.size() < opt_.max_ops; ++psi) {
      std::vector<std::size_t> pos(arity(psi), 0), phis(arity(psi));
      bool empty = false;
      for (std::size_t i = 0; i < arity(psi); ++i) empty |= into[sig(psi).inputs[i]].empty();
      if (empty) continue;
      for (;;) {
        for (std::size_t i = 0; i < phis.size(); ++i) phis[i] = into[sig(psi).inputs[i]][pos[i]];
        (void)cmp(psi, phis);
        if (ops_.size() >= opt_.max_ops) break;
        std::size_t i = 0;
        while (i < pos.size() && ++pos[i] == into[sig(psi).inputs[i]].size()) pos[i++] = 0;
        if (i == pos.size()) break;
      }
    }
    close_permutations(n);
  }
  base_ops_ = ops_.size();
  if (opt_.enumerate_cells) enumerate_base_cells();
  for (std::size_t op = 0; op < base_ops_; ++op) (void)cell_id(op);
  base_cells_ = cells_.size();
}

BordismFragment BordismFragment::enumerate(std::vector<PointedObject> objects,
                                           const std::vector<CausalSetRef>& spaces,
                                           FragmentOptions opt) {
  BordismFragment f(std::move(objects), opt);
  f.add_units_and_companions();
  auto color_like = [&](const CausalSet& x) {
    for (const auto& s : spaces)
      if (find_isomorphism(x, *s)) return true;
    return false;
  };
  // Collars of each object.
  std::vector<std::vector<Bits>> collars(f.objects_.size());
  for (std::size_t c = 0; c < f.objects_.size(); ++c) {
    const CausalSet& m = *f.objects_[c].M;
    for (Bits v : slabs_containing(m, f.objects_[c].sigma))
      if (color_like(m.induced(v))) collars[c].push_back(v);
  }
  auto embeddings = [](const CausalSet& m, Bits v, const CausalSet& n) {
    std::vector<Collar> out;
    CausalSet vs = m.induced(v);
    std::vector<std::size_t> idx = bit_list(v);
    enumerate_embeddings(vs, n, {}, [&](const std::vector<std::size_t>& e) {
      Collar c{v, std::vector<std::size_t>(m.size(), kNone)};
      for (std::size_t k = 0; k < idx.size(); ++k) c.map[idx[k]] = e[k];
      out.push_back(c);
      return true;
    });
    return out;
  };
  const std::size_t nobj = f.objects_.size();
  for (const auto& space : spaces) {
    const CausalSet& n = *space;
    // Candidate collars into N per object.
    std::vector<std::vector<Collar>> legs(nobj);
    for (std::size_t c = 0; c < nobj; ++c)
      for (Bits v : collars[c])
        for (Collar& e : embeddings(*f.objects_[c].M, v, n)) legs[c].push_back(std::move(e));
    for (std::size_t out = 0; out < nobj; ++out) {
      std::vector<Collar> outs;
      for (const Collar& e : legs[out])
        if (n.is_slab(e.image())) outs.push_back(e);
      if (outs.empty()) continue;
      for (std::size_t ar = 0; ar <= opt.max_arity; ++ar) {
        std::vector<std::size_t> ins(ar, 0);
        for (;;) {
          // Inputs: every choice of legs with disjoint images.
          std::vector<std::size_t> pick(ar, 0);
          bool any = true;
          for (std::size_t i = 0; i < ar; ++i) any &= !legs[ins[i]].empty();
          while (any) {
            bool disjoint = true;
            for (std::size_t i = 0; i < ar && disjoint; ++i)
              for (std::size_t j = i + 1; j < ar && disjoint; ++j)
                disjoint = n.disjoint_causally(legs[ins[i]][pick[i]].image(),
                                               legs[ins[j]][pick[j]].image());
            if (disjoint)
              for (const Collar& o : outs) {
                Bordism b;
                b.N = space;
                b.output = f.objects_[out];
                b.iota1 = o;
                for (std::size_t i = 0; i < ar; ++i) {
                  b.inputs.push_back(f.objects_[ins[i]]);
                  b.iota0.push_back(legs[ins[i]][pick[i]]);
                }
                if (validate_bordism(b).ok() && !f.intern_op(b))
                  throw Error("TooLarge", "enumerated fragment exceeds the operation cap");
              }
            std::size_t i = 0;
            while (i < ar && ++pick[i] == legs[ins[i]].size()) pick[i++] = 0;
            if (i == ar) break;
          }
          std::size_t i = 0;
          while (i < ar && ++ins[i] == nobj) ins[i++] = 0;
          if (i == ar) break;
        }
      }
    }
  }
  f.base_ops_ = f.ops_.size();
  if (opt.enumerate_cells) f.enumerate_base_cells();
  for (std::size_t op = 0; op < f.base_ops_; ++op) (void)f.cell_id(op);
  f.base_cells_ = f.cells_.size();
  return f;
}

void BordismFragment::init_vertical() {
  vid_.assign(objects_.size(), 0);
  for (std::size_t c = 0; c < objects_.size(); ++c)
    for (std::size_t d = 0; d < objects_.size(); ++d) {
      std::size_t k = static_cast<std::size_t>(popcount(objects_[c].sigma));
      if (k != static_cast<std::size_t>(popcount(objects_[d].sigma))) continue;
      for (const Perm& p : all_perms(k)) {
        if (c == d && is_identity(p)) vid_[c] = vmorphs_.size();
        vindex_[{c, d, p}] = vmorphs_.size();
        vmorphs_.push_back({c, d, p});
      }
    }
}

void BordismFragment::add_units_and_companions() {
  unit_.clear();
  for (const auto& o : objects_) {
    auto u = intern_op(identity_bordism(o));
    if (!u) throw Error("TooLarge", "unit of " + o.name + " exceeds the caps");
    unit_.push_back(*u);
  }
  for (std::size_t g = 0; g < vmorphs_.size(); ++g)
    if (!explicit_companion(g)) throw Error("TooLarge", "companion exceeds the caps");
}

void BordismFragment::close_permutations(std::size_t from) {
  for (std::size_t op = from; op < ops_.size(); ++op) {
    std::size_t n = arity(op);
    if (n < 2) continue;
    for (const Perm& s : all_perms(n))
      if (!is_identity(s)) (void)permute(op, s);
  }
}

void BordismFragment::enumerate_base_cells() {
  for (std::size_t a = 0; a < base_ops_; ++a)
    for (std::size_t b = 0; b < base_ops_; ++b) {
      const Bordism& ba = ops_[a].b;
      const Bordism& bb = ops_[b].b;
      if (ba.arity() != bb.arity()) continue;
      bool shape = popcount(ba.output.sigma) == popcount(bb.output.sigma);
      for (std::size_t i = 0; shape && i < ba.arity(); ++i)
        shape = popcount(ba.inputs[i].sigma) == popcount(bb.inputs[i].sigma);
      if (!shape) continue;
      Bits ha = surface_hull(ba), hb = surface_hull(bb);
      if (popcount(ha) != popcount(hb)) continue;
      const CausalSet& na = *ba.N;
      std::vector<Bits> allow_of(na.size(), ~Bits{0});
      for (std::size_t i = 0; i < ba.arity(); ++i) {
        Bits target = apply(bb.iota0[i], bb.inputs[i].sigma);
        for_each_bit(apply(ba.iota0[i], ba.inputs[i].sigma),
                     [&](std::size_t x) { allow_of[x] &= target; });
      }
      Bits tout = output_surface(bb), surf_b = input_surfaces(bb) | tout;
      for_each_bit(output_surface(ba), [&](std::size_t x) { allow_of[x] &= tout; });
      std::vector<std::size_t> idx = bit_list(ha);
      std::vector<Bits> allowed(idx.size());
      Bits surf_a = input_surfaces(ba) | output_surface(ba);
      for (std::size_t k = 0; k < idx.size(); ++k)
        allowed[k] = has(surf_a, idx[k]) ? allow_of[idx[k]] : (hb & ~surf_b);
      enumerate_embeddings(na.induced(ha), *bb.N, allowed, [&](const std::vector<std::size_t>& m) {
        std::vector<std::size_t> fixed(na.size(), kNone);
        for (std::size_t k = 0; k < idx.size(); ++k) fixed[idx[k]] = m[k];
        if (auto rep = find_cell(ba, bb, fixed)) (void)intern_cell(a, b, *rep);
        if (cells_.size() >= opt_.max_cells) {
          cells_truncated_ = true;
          return false;
        }
        return true;
      });
      if (cells_truncated_) return;
    }
}

std::optional<std::size_t> BordismFragment::find_object(const PointedObject& o) const {
  for (std::size_t c = 0; c < objects_.size(); ++c)
    if (same_object(objects_[c], o)) return c;
  return std::nullopt;
}

std::optional<std::size_t> BordismFragment::vmorph(std::size_t src, std::size_t tgt,
                                                   const Perm& g) const {
  auto it = vindex_.find({src, tgt, g});
  if (it == vindex_.end()) return std::nullopt;
  return it->second;
}

std::string BordismFragment::vmorph_name(std::size_t g) const {
  const Vmorph& v = vmorphs_[g];
  return objects_[v.src].name + "->" + objects_[v.tgt].name + perm_string(v.map);
}

std::optional<std::size_t> BordismFragment::vcompose(std::size_t g2, std::size_t g1) const {
  if (vmorphs_[g2].src != vmorphs_[g1].tgt) return std::nullopt;
  return vmorph(vmorphs_[g1].src, vmorphs_[g2].tgt, compose_perm(vmorphs_[g2].map, vmorphs_[g1].map));
}

std::size_t BordismFragment::vinverse(std::size_t g) const {
  return *vmorph(vmorphs_[g].tgt, vmorphs_[g].src, inverse_perm(vmorphs_[g].map));
}

std::optional<std::size_t> BordismFragment::intern_op(const Bordism& b) {
  if (b.N->size() > opt_.max_events || b.arity() > opt_.max_arity) return std::nullopt;
  std::string key = bordism_key(b);
  if (auto it = op_index_.find(key); it != op_index_.end()) return it->second;
  if (ops_.size() >= opt_.max_ops) return std::nullopt;
  OpSig s;
  for (const auto& o : b.inputs) {
    auto c = find_object(o);
    if (!c) return std::nullopt;
    s.inputs.push_back(*c);
  }
  auto c = find_object(b.output);
  if (!c) return std::nullopt;
  s.output = *c;
  if (!validate_bordism(b).ok()) return std::nullopt;
  Op op{b, s, is_cauchy_bordism(b)};
  // Share the fragment's object data.
  for (std::size_t i = 0; i < op.b.arity(); ++i) op.b.inputs[i] = objects_[s.inputs[i]];
  op.b.output = objects_[s.output];
  ops_.push_back(std::move(op));
  op_index_.emplace(key, ops_.size() - 1);
  return ops_.size() - 1;
}

std::string BordismFragment::op_name(std::size_t op) const {
  const Op& o = ops_[op];
  std::string s = "#" + std::to_string(op) + "(";
  for (std::size_t i = 0; i < o.sig.inputs.size(); ++i)
    s += (i ? "," : "") + objects_[o.sig.inputs[i]].name;
  s += ")->" + objects_[o.sig.output].name + "/N{";
  const auto& ev = o.b.N->events();
  for (std::size_t i = 0; i < ev.size(); ++i) s += (i ? "," : "") + ev[i];
  return s + "}";
}

std::string BordismFragment::cell_name(std::size_t a) const {
  const Cell& c = cells_[a];
  return "cell#" + std::to_string(a) + "[" + op_name(c.sig.from) + " => " + op_name(c.sig.to) + "]";
}

std::optional<std::size_t> BordismFragment::intern_cell(std::size_t from, std::size_t to,
                                                        const CellRep& rep) {
  const Bordism& a = ops_[from].b;
  auto bd = cell_boundary(a, ops_[to].b, rep);
  if (!bd) return std::nullopt;
  std::vector<std::size_t> key{from, to};
  for_each_bit(surface_hull(a), [&](std::size_t x) { key.push_back(rep.f[x]); });
  if (auto it = cell_index_.find(key); it != cell_index_.end()) return it->second;
  CellSig s{from, to, {}, 0};
  for (std::size_t i = 0; i < bd->s.size(); ++i) {
    auto g = vmorph(ops_[from].sig.inputs[i], ops_[to].sig.inputs[i], bd->s[i]);
    if (!g) return std::nullopt;
    s.s.push_back(*g);
  }
  auto t = vmorph(ops_[from].sig.output, ops_[to].sig.output, bd->t);
  if (!t) return std::nullopt;
  s.t = *t;
  cells_.push_back({s, rep});
  cell_index_.emplace(key, cells_.size() - 1);
  return cells_.size() - 1;
}

std::optional<std::size_t> BordismFragment::cell_from_map(std::size_t from, std::size_t to,
                                                          const std::vector<std::size_t>& h) {
  auto rep = find_cell(ops_[from].b, ops_[to].b, h);
  if (!rep) return std::nullopt;
  return intern_cell(from, to, *rep);
}

std::size_t BordismFragment::cell_id(std::size_t op) {
  const CausalSet& n = *ops_[op].b.N;
  CellRep rep{n.all(), full_collar(n).map};
  auto c = intern_cell(op, op, rep);
  if (!c) throw Error("InvalidBordism", "identity cell of " + op_name(op) + " is not a cell");
  return *c;
}

std::optional<std::size_t> BordismFragment::cell_vcompose(std::size_t b, std::size_t a) {
  if (cells_[a].sig.to != cells_[b].sig.from) return std::nullopt;
  const CellRep& ra = cells_[a].rep;
  const CellRep& rb = cells_[b].rep;
  std::vector<std::size_t> h(ra.f.size(), kNone);
  for_each_bit(ra.Z, [&](std::size_t x) {
    std::size_t y = ra.f[x];
    if (has(rb.Z, y)) h[x] = rb.f[y];
  });
  return cell_from_map(cells_[a].sig.from, cells_[b].sig.to, h);
}

std::size_t BordismFragment::cell_inverse(std::size_t a) {
  const Cell c = cells_[a];
  CellRep rep{0, std::vector<std::size_t>(ops_[c.sig.to].b.N->size(), kNone)};
  for_each_bit(c.rep.Z, [&](std::size_t x) {
    rep.Z |= bit(c.rep.f[x]);
    rep.f[c.rep.f[x]] = x;
  });
  auto r = intern_cell(c.sig.to, c.sig.from, rep);
  if (!r) throw Error("InvalidCell", "inverse of " + cell_name(a) + " is not a cell");
  return *r;
}

const BordismFragment::CompositeInfo* BordismFragment::composite(
    std::size_t psi, const std::vector<std::size_t>& phis) {
  std::vector<std::size_t> key{psi};
  key.insert(key.end(), phis.begin(), phis.end());
  if (auto it = composites_.find(key); it != composites_.end())
    return it->second ? &*it->second : nullptr;
  auto& slot = composites_[key];
  if (phis.size() != arity(psi)) return nullptr;
  std::size_t total = 0;
  std::vector<Bordism> inners;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    if (sig(phis[i]).output != sig(psi).inputs[i]) return nullptr;
    total += arity(phis[i]);
    inners.push_back(ops_[phis[i]].b);
  }
  if (total > opt_.max_arity) return nullptr;
  Composite c;
  try {
    c = compose_bordisms(ops_[psi].b, inners);
  } catch (const Error& e) {
    if (e.code() == "TooLarge") return nullptr;
    throw;
  }
  auto id = intern_op(c.result);
  if (!id) return nullptr;
  slot = CompositeInfo{*id, std::move(c.from_outer), std::move(c.from_inner)};
  return &*slot;
}

std::optional<std::size_t> BordismFragment::cmp(std::size_t psi,
                                                const std::vector<std::size_t>& phis) {
  const CompositeInfo* c = composite(psi, phis);
  if (!c) return std::nullopt;
  return c->result;
}

namespace {
// Records h[x] = y; a second, different value poisons x.
void assign(std::vector<std::size_t>& h, std::vector<bool>& bad, std::size_t x, std::size_t y) {
  if (x == kNone || y == kNone || bad[x]) return;
  if (h[x] != kNone && h[x] != y) {
    bad[x] = true;
    h[x] = kNone;
    return;
  }
  h[x] = y;
}
}  // namespace

std::optional<std::size_t> BordismFragment::cmp_cells(std::size_t alpha,
                                                      const std::vector<std::size_t>& betas) {
  const CellSig sa = cells_[alpha].sig;
  if (betas.size() != sa.s.size()) return std::nullopt;
  std::vector<std::size_t> froms, tos;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (cells_[betas[i]].sig.t != sa.s[i]) return std::nullopt;
    froms.push_back(cells_[betas[i]].sig.from);
    tos.push_back(cells_[betas[i]].sig.to);
  }
  const CompositeInfo* src = composite(sa.from, froms);
  if (!src) return std::nullopt;
  CompositeInfo s = *src;
  const CompositeInfo* tgt = composite(sa.to, tos);
  if (!tgt) return std::nullopt;
  const CompositeInfo& t = *tgt;
  std::size_t n = ops_[s.result].b.N->size();
  std::vector<std::size_t> h(n, kNone);
  std::vector<bool> bad(n, false);
  const CellRep& ra = cells_[alpha].rep;
  for_each_bit(ra.Z, [&](std::size_t y) { assign(h, bad, s.from_outer[y], t.from_outer[ra.f[y]]); });
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const CellRep& rb = cells_[betas[i]].rep;
    for_each_bit(rb.Z, [&](std::size_t y) {
      assign(h, bad, s.from_inner[i][y], t.from_inner[i][rb.f[y]]);
    });
  }
  return cell_from_map(s.result, t.result, h);
}

std::size_t BordismFragment::unit_cell(std::size_t g) {
  const Vmorph& v = vmorphs_[g];
  const PointedObject& a = objects_[v.src];
  const PointedObject& b = objects_[v.tgt];
  std::vector<std::size_t> sb = bit_list(b.sigma);
  CellRep rep{a.sigma, std::vector<std::size_t>(a.M->size(), kNone)};
  std::size_t k = 0;
  for_each_bit(a.sigma, [&](std::size_t x) { rep.f[x] = sb[v.map[k++]]; });
  auto c = intern_cell(unit_[v.src], unit_[v.tgt], rep);
  if (!c) throw Error("InvalidCell", "unit cell of " + vmorph_name(g) + " is not a cell");
  return *c;
}

std::optional<std::size_t> BordismFragment::permute(std::size_t op, const Perm& sigma) {
  if (sigma.size() != arity(op)) return std::nullopt;
  if (is_identity(sigma)) return op;
  auto [it, fresh] = permuted_.emplace(std::make_pair(op, sigma), std::nullopt);
  if (fresh) it->second = intern_op(permute_bordism(ops_[op].b, sigma));
  return it->second;
}

std::optional<std::size_t> BordismFragment::permute_cell(std::size_t a, const Perm& sigma) {
  const Cell c = cells_[a];
  auto from = permute(c.sig.from, sigma);
  auto to = permute(c.sig.to, sigma);
  if (!from || !to) return std::nullopt;
  return intern_cell(*from, *to, c.rep);
}

std::optional<std::size_t> BordismFragment::assoc(std::size_t psi,
                                                  const std::vector<std::size_t>& phis,
                                                  const std::vector<std::size_t>& chis) {
  const CompositeInfo* l1p = composite(psi, phis);
  if (!l1p) return std::nullopt;
  CompositeInfo l1 = *l1p;
  const CompositeInfo* lp = composite(l1.result, chis);
  if (!lp) return std::nullopt;
  CompositeInfo l = *lp;
  std::vector<CompositeInfo> rs;
  std::vector<std::size_t> mids;
  std::size_t at = 0;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    std::vector<std::size_t> blk(chis.begin() + at, chis.begin() + at + arity(phis[i]));
    at += blk.size();
    const CompositeInfo* ri = composite(phis[i], blk);
    if (!ri) return std::nullopt;
    rs.push_back(*ri);
    mids.push_back(ri->result);
  }
  const CompositeInfo* rp = composite(psi, mids);
  if (!rp) return std::nullopt;
  const CompositeInfo& r = *rp;
  auto via = [](const std::vector<std::size_t>& m, std::size_t x) {
    return x == kNone ? kNone : m[x];
  };
  std::size_t n = ops_[l.result].b.N->size();
  std::vector<std::size_t> h(n, kNone);
  std::vector<bool> bad(n, false);
  for (std::size_t e = 0; e < ops_[psi].b.N->size(); ++e)
    assign(h, bad, via(l.from_outer, l1.from_outer[e]), r.from_outer[e]);
  at = 0;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    for (std::size_t e = 0; e < ops_[phis[i]].b.N->size(); ++e)
      assign(h, bad, via(l.from_outer, l1.from_inner[i][e]),
             via(r.from_inner[i], rs[i].from_outer[e]));
    for (std::size_t j = 0; j < arity(phis[i]); ++j, ++at)
      for (std::size_t e = 0; e < ops_[chis[at]].b.N->size(); ++e)
        assign(h, bad, l.from_inner[at][e], via(r.from_inner[i], rs[i].from_inner[j][e]));
  }
  return cell_from_map(l.result, r.result, h);
}

std::optional<std::size_t> BordismFragment::lunit(std::size_t psi) {
  const CompositeInfo* sp = composite(unit_[sig(psi).output], {psi});
  if (!sp) return std::nullopt;
  const CompositeInfo s = *sp;
  const Bordism& b = ops_[psi].b;
  std::size_t n = ops_[s.result].b.N->size();
  std::vector<std::size_t> h(n, kNone);
  std::vector<bool> bad(n, false);
  for (std::size_t e = 0; e < b.N->size(); ++e) assign(h, bad, s.from_inner[0][e], e);
  for_each_bit(b.iota1.domain, [&](std::size_t m) { assign(h, bad, s.from_outer[m], b.iota1.map[m]); });
  return cell_from_map(s.result, psi, h);
}

std::optional<std::size_t> BordismFragment::runit(std::size_t psi) {
  std::vector<std::size_t> us;
  for (std::size_t c : sig(psi).inputs) us.push_back(unit_[c]);
  const CompositeInfo* sp = composite(psi, us);
  if (!sp) return std::nullopt;
  const CompositeInfo s = *sp;
  const Bordism& b = ops_[psi].b;
  std::size_t n = ops_[s.result].b.N->size();
  std::vector<std::size_t> h(n, kNone);
  std::vector<bool> bad(n, false);
  for (std::size_t e = 0; e < b.N->size(); ++e) assign(h, bad, s.from_outer[e], e);
  for (std::size_t i = 0; i < b.arity(); ++i)
    for_each_bit(b.iota0[i].domain,
                 [&](std::size_t m) { assign(h, bad, s.from_inner[i][m], b.iota0[i].map[m]); });
  return cell_from_map(s.result, psi, h);
}

bool BordismFragment::globular_equivalent(std::size_t a, std::size_t b) {
  if (a == b) return true;
  if (!(sig(a) == sig(b))) return false;
  auto [it, fresh] = globular_.emplace(std::make_pair(a, b), false);
  if (fresh) it->second = find_globular_cell(ops_[a].b, ops_[b].b).has_value();
  return it->second;
}

std::optional<Companion> BordismFragment::explicit_companion(std::size_t g) {
  if (auto it = companions_.find(g); it != companions_.end()) return it->second;
  auto c = build_companion(g);
  companions_.emplace(g, c);
  return c;
}

std::optional<Companion> BordismFragment::build_companion(std::size_t g) {
  const Vmorph v = vmorphs_[g];
  const PointedObject& a = objects_[v.src];
  const PointedObject& b = objects_[v.tgt];
  std::vector<std::size_t> sb = bit_list(b.sigma);
  Bordism hat;
  hat.inputs = {a};
  hat.output = b;
  hat.N = b.M;
  Collar c0{a.sigma, std::vector<std::size_t>(a.M->size(), kNone)};
  std::size_t k = 0;
  for_each_bit(a.sigma, [&](std::size_t x) { c0.map[x] = sb[v.map[k++]]; });
  hat.iota0 = {c0};
  hat.iota1 = full_collar(*b.M);
  auto op = intern_op(hat);
  if (!op) return std::nullopt;
  CellRep r1{b.sigma, std::vector<std::size_t>(b.M->size(), kNone)};
  for_each_bit(b.sigma, [&](std::size_t x) { r1.f[x] = x; });
  auto beta1 = intern_cell(*op, unit_[v.tgt], r1);
  auto beta2 = intern_cell(unit_[v.src], *op, CellRep{c0.domain, c0.map});
  if (!beta1 || !beta2) return std::nullopt;
  return Companion{*op, *beta1, *beta2};
}

}  // namespace lqft
