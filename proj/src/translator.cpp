#include "lqft/translator.hpp"

#include <algorithm>
#include <map>

#include "lqft/error.hpp"

namespace lqft {

namespace {

const HomTable& table(const Model& m, std::size_t op, const std::string& what) {
  if (op >= m.ops.size() || !m.ops[op])
    throw Error("MissingRestriction", "no table for " + what);
  return *m.ops[op];
}

// A color isomorphic to x and the iso as a map from the color into x.
std::pair<std::size_t, std::vector<std::size_t>> color_iso(const PrefactorizationOperad& p,
                                                           const CausalSet& x) {
  for (std::size_t c = 0; c < p.num_colors(); ++c) {
    if (*p.color(c).set == x) return {c, identity_table(x.size())};
    if (auto iso = find_isomorphism(*p.color(c).set, x)) return {c, *iso};
  }
  throw Error("MissingColor", "no color isomorphic to a set of " + std::to_string(x.size()) +
                                  " events");
}

// The slab v of m as a color, with the iso as a map from the color into m.
std::pair<std::size_t, std::vector<std::size_t>> region_iso(const PrefactorizationOperad& p,
                                                            const CausalSet& m, Bits v) {
  auto [c, iso] = color_iso(p, m.induced(v));
  std::vector<std::size_t> idx = ranks_to_indices(v);
  for (auto& x : iso) x = idx[x];
  return {c, iso};
}

std::vector<std::size_t> invert_map(const std::vector<std::size_t>& f, std::size_t size) {
  std::vector<std::size_t> inv(size, kNone);
  for (std::size_t x = 0; x < f.size(); ++x) inv[f[x]] = x;
  return inv;
}

std::size_t find_op(const PrefactorizationOperad& p, std::size_t out,
                    const std::vector<std::size_t>& ins,
                    const std::vector<std::vector<std::size_t>>& maps) {
  auto op = p.find_op(out, ins, maps);
  if (!op) throw Error("MissingRestriction", "operation into " + p.color_name(out) + " is outside the window");
  return *op;
}

// The bordism from chosen fragment objects whose collars are whole objects
// mapped into the output object's M through the color isos: input i maps
// by f_i from color(input i) into color(output).
Bordism straight_bordism(const TranslationContext& ctx, const std::vector<std::size_t>& in,
                         const std::vector<std::vector<std::size_t>>& f, std::size_t out) {
  BordismFragment& fr = *ctx.fragment;
  Bordism b;
  b.output = fr.object(out);
  b.N = b.output.M;
  b.iota1 = full_collar(*b.N);
  std::vector<std::size_t> back = invert_map(ctx.to_color[out], b.N->size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const PointedObject& o = fr.object(in[i]);
    b.inputs.push_back(o);
    Collar c = full_collar(*o.M);
    for (std::size_t x = 0; x < c.map.size(); ++x) c.map[x] = back[f[i][ctx.to_color[in[i]][x]]];
    b.iota0.push_back(c);
  }
  return b;
}

const HomTable& class_table(const Model& f, const TranslationContext& ctx, const Bordism& b) {
  auto op = ctx.fragment->intern_op(b);
  if (!op) throw Error("MissingRestriction", "bordism outside the fragment");
  auto cls = class_of_op(*ctx.fragment, *ctx.trunc, *op);
  if (!cls) throw Error("MissingRestriction", "bordism without a class");
  return table(f, *cls, ctx.trunc->operad.op_name(*cls));
}

// F_A on one bordism of the fragment.
HomTable zigzag(const Model& a, const TranslationContext& ctx, const Bordism& b,
                const std::vector<std::size_t>& in_objs, std::size_t out_obj) {
  const PrefactorizationOperad& p = *ctx.aqft;
  auto [cn, psi_n] = color_iso(p, *b.N);
  std::vector<std::size_t> n_back = invert_map(psi_n, b.N->size());
  std::vector<HomTable> back;  // A(M_0i) -> A(V_0i)
  std::vector<std::size_t> cv;
  std::vector<std::vector<std::size_t>> into_n;
  for (std::size_t i = 0; i < in_objs.size(); ++i) {
    std::size_t d = in_objs[i];
    const CausalSet& m = *ctx.fragment->object(d).M;
    auto [c, psi] = region_iso(p, m, b.iota0[i].domain);
    std::vector<std::size_t> leg, in_n;
    for (std::size_t x : psi) {
      leg.push_back(ctx.to_color[d][x]);
      in_n.push_back(n_back[b.iota0[i].map[x]]);
    }
    std::size_t op = find_op(p, ctx.color_of[d], {c}, {leg});
    const HomTable& h = table(a, op, p.op_name(op));
    auto inv = inverse_table(h, a.colors[ctx.color_of[d]].size);
    if (!inv) throw Error("TimeSliceRequired", "collar leg " + p.op_name(op) + " is not invertible");
    back.push_back(*inv);
    cv.push_back(c);
    into_n.push_back(in_n);
  }
  std::size_t glue = find_op(p, cn, cv, into_n);
  const HomTable& g = table(a, glue, p.op_name(glue));

  const CausalSet& m1 = *ctx.fragment->object(out_obj).M;
  auto [c1, psi1] = region_iso(p, m1, b.iota1.domain);
  std::vector<std::size_t> out_leg, out_n;
  for (std::size_t x : psi1) {
    out_leg.push_back(ctx.to_color[out_obj][x]);
    out_n.push_back(n_back[b.iota1.map[x]]);
  }
  std::size_t up = find_op(p, cn, {c1}, {out_n});
  auto up_inv = inverse_table(table(a, up, p.op_name(up)), a.colors[cn].size);
  if (!up_inv) throw Error("TimeSliceRequired", "output leg " + p.op_name(up) + " is not invertible");
  std::size_t down = find_op(p, ctx.color_of[out_obj], {c1}, {out_leg});
  const HomTable& dn = table(a, down, p.op_name(down));

  std::vector<const Monoid*> dom, mid;
  for (std::size_t d : in_objs) dom.push_back(&a.colors[ctx.color_of[d]]);
  for (std::size_t c : cv) mid.push_back(&a.colors[c]);
  HomTable out(tuple_count(dom));
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    auto x = decode_tuple(dom, idx);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = back[i][x[i]];
    out[idx] = dn[(*up_inv)[g[encode_tuple(mid, x)]]];
  }
  return out;
}

}  // namespace

TranslationContext make_context(const PrefactorizationOperad& p, BordismFragment& f,
                                const Truncation& t) {
  TranslationContext ctx;
  ctx.aqft = &p;
  ctx.fragment = &f;
  ctx.trunc = &t;
  for (std::size_t d = 0; d < f.num_objects(); ++d) {
    auto [c, iso] = color_iso(p, *f.object(d).M);
    // color_iso maps the color into M; keep the inverse.
    ctx.color_of.push_back(c);
    ctx.to_color.push_back(invert_map(iso, iso.size()));
  }
  for (std::size_t c = 0; c < p.num_colors(); ++c) {
    const CausalSet& m = *p.color(c).set;
    ctx.surfaces.push_back(sigma_category(m).surfaces);
    std::vector<std::size_t> chosen;
    for (Bits s : ctx.surfaces.back()) {
      std::size_t pick = kNone;
      for (std::size_t d = 0; d < f.num_objects() && pick == kNone; ++d) {
        if (ctx.color_of[d] != c) continue;
        Bits img = 0;
        for_each_bit(f.object(d).sigma, [&](std::size_t x) { img |= bit(ctx.to_color[d][x]); });
        if (img == s) pick = d;
      }
      if (pick == kNone)
        throw Error("MissingSurface", "no fragment object for a Cauchy antichain of " + p.color_name(c));
      chosen.push_back(pick);
    }
    ctx.surface_object.push_back(chosen);
  }
  return ctx;
}

Model aqft_to_fqft(const Model& a, const TranslationContext& ctx, bool debug) {
  const TableOperad& o = ctx.trunc->operad;
  Model f;
  f.base = &o;
  for (std::size_t d = 0; d < o.num_colors(); ++d) f.colors.push_back(a.colors[ctx.color_of[d]]);
  for (std::size_t k = 0; k < o.num_ops(); ++k) {
    // Members whose collars or N are not colors have no zig-zag in the
    // window; the least member that has one is used.
    const OpSig& s = o.sig(k);
    std::optional<HomTable> h;
    for (std::size_t member : ctx.trunc->members[k]) {
      std::optional<HomTable> v;
      try {
        v = zigzag(a, ctx, ctx.fragment->bordism(member), s.inputs, s.output);
      } catch (const Error& e) {
        if (e.code() != "MissingColor" && e.code() != "MissingRestriction") throw;
        continue;
      }
      if (!h) {
        h = std::move(v);
        if (!debug) break;
      } else if (*v != *h) {
        throw Error("NotWellDefined", "representatives of " + o.op_name(k) + " disagree");
      }
    }
    if (!h) throw Error("MissingRestriction", "no member of " + o.op_name(k) + " lies in the window");
    f.ops.push_back(std::move(*h));
  }
  return f;
}

AqftFromFqft fqft_to_aqft(const Model& f, const TranslationContext& ctx, bool debug) {
  Report add = check_additivity_fqft(f, *ctx.fragment, *ctx.trunc, "F");
  for (const auto& e : add.entries())
    if (e.status == "fail") throw Error("AdditivityRequired", e.witness);
  const PrefactorizationOperad& p = *ctx.aqft;
  AqftFromFqft out;
  out.model.base = &p;
  for (std::size_t c = 0; c < p.num_colors(); ++c) {
    SurfaceCategory sc = sigma_category(*p.color(c).set);
    const auto& objs = ctx.surface_object[c];
    std::vector<const Monoid*> values;
    for (std::size_t d : objs) values.push_back(&f.colors[d]);
    std::vector<std::size_t> id = identity_table(p.color(c).set->size());
    std::map<std::pair<std::size_t, std::size_t>, HomTable> arrows;
    for (std::size_t i = 0; i < objs.size(); ++i)
      for (std::size_t j = 0; j < objs.size(); ++j)
        if (i != j && sc.cat.arrow(i, j))
          arrows[{i, j}] = class_table(f, ctx, straight_bordism(ctx, {objs[i]}, {id}, objs[j]));
    out.colimits.push_back(filtered_colimit(
        sc.cat, values, [&](std::size_t i, std::size_t j) -> const HomTable& { return arrows.at({i, j}); },
        debug));
    out.model.colors.push_back(out.colimits.back().monoid);
  }

  for (std::size_t op = 0; op < p.num_ops(); ++op) {
    const auto& pop = p.op(op);
    std::size_t cout = pop.sig.output;
    const CausalSet& target = *p.color(cout).set;
    const auto& later = ctx.surfaces[cout];
    const auto& out_objs = ctx.surface_object[cout];
    bool cauchy = p.is_cauchy(op);
    auto ins = out.model.inputs(op);
    std::size_t n = ins.size();
    // Value at surfaces k_i and elements x_i through the output surface kp.
    auto value = [&](const std::vector<std::size_t>& ks, const std::vector<std::size_t>& xs,
                     std::size_t kp) {
      std::vector<std::size_t> in_objs;
      std::vector<const Monoid*> dom;
      for (std::size_t i = 0; i < n; ++i) {
        in_objs.push_back(ctx.surface_object[pop.sig.inputs[i]][ks[i]]);
        dom.push_back(&f.colors[in_objs.back()]);
      }
      const HomTable& h = class_table(f, ctx, straight_bordism(ctx, in_objs, pop.maps, out_objs[kp]));
      return out.colimits[cout].legs[kp][h[encode_tuple(dom, xs)]];
    };
    auto image = [&](const std::vector<std::size_t>& ks) {
      Bits img = 0;
      for (std::size_t i = 0; i < n; ++i)
        for_each_bit(ctx.surfaces[pop.sig.inputs[i]][ks[i]],
                     [&](std::size_t x) { img |= bit(pop.maps[i][x]); });
      return img;
    };
    // Output surfaces usable for input surfaces ks.
    auto targets = [&](const std::vector<std::size_t>& ks) {
      std::vector<std::size_t> r;
      Bits img = image(ks);
      for (std::size_t k = 0; k < later.size(); ++k)
        if ((img & ~target.chrono_past(later[k])) == 0) r.push_back(k);
      return r;
    };
    auto cauchy_target = [&](const std::vector<std::size_t>& ks) {
      return static_cast<std::size_t>(std::find(later.begin(), later.end(), image(ks)) - later.begin());
    };
    HomTable h(tuple_count(ins));
    for (std::size_t idx = 0; idx < h.size(); ++idx) {
      auto cls = decode_tuple(ins, idx);
      std::vector<std::size_t> ks(n), xs(n);
      for (std::size_t i = 0; i < n; ++i)
        std::tie(ks[i], xs[i]) = out.colimits[pop.sig.inputs[i]].reps[cls[i]];
      if (cauchy) {
        h[idx] = value(ks, xs, cauchy_target(ks));
      } else {
        auto t = targets(ks);
        if (t.empty())
          throw Error("NoLaterSurface", "no antichain strictly above the input surfaces of " + p.op_name(op));
        h[idx] = value(ks, xs, t.front());
      }
      if (!debug) continue;
      // Every representative of every input class and every admissible
      // output surface.
      std::vector<std::vector<std::pair<std::size_t, std::size_t>>> members(n);
      for (std::size_t i = 0; i < n; ++i) {
        const Colimit& col = out.colimits[pop.sig.inputs[i]];
        for (std::size_t k = 0; k < col.legs.size(); ++k)
          for (std::size_t x = 0; x < col.legs[k].size(); ++x)
            if (col.legs[k][x] == cls[i]) members[i].emplace_back(k, x);
      }
      std::vector<std::size_t> pick(n, 0);
      for (;;) {
        for (std::size_t i = 0; i < n; ++i) std::tie(ks[i], xs[i]) = members[i][pick[i]];
        std::vector<std::size_t> ts = targets(ks);
        if (cauchy) ts.push_back(cauchy_target(ks));
        for (std::size_t kp : ts)
          if (value(ks, xs, kp) != h[idx])
            throw Error("NotWellDefined", p.op_name(op) + " depends on the chosen surfaces");
        std::size_t i = 0;
        while (i < n && ++pick[i] == members[i].size()) pick[i++] = 0;
        if (i == n) break;
      }
    }
    out.model.ops.push_back(std::move(h));
  }
  return out;
}

Report roundtrip_aqft(const Model& a, const TranslationContext& ctx, const std::string& target,
                      bool debug) {
  Report r;
  std::size_t mark = r.mark();
  Model back = fqft_to_aqft(aqft_to_fqft(a, ctx, debug), ctx, debug).model;
  const Operad& o = *a.base;
  for (std::size_t c = 0; c < o.num_colors(); ++c)
    if (!(back.colors[c] == a.colors[c]))
      r.fail("triangle-aqft", target, "monoid of " + o.color_name(c) + " changed");
  for (std::size_t op = 0; op < o.num_ops(); ++op)
    if (back.ops[op] != a.ops[op]) r.fail("triangle-aqft", target, "table of " + o.op_name(op) + " changed");
  r.close(mark, "triangle-aqft", target, o.num_colors() + o.num_ops());
  return r;
}

Report roundtrip_fqft(const Model& f, const TranslationContext& ctx, const std::string& target,
                      bool debug) {
  Report r;
  std::size_t mark = r.mark();
  AqftFromFqft af = fqft_to_aqft(f, ctx, debug);
  Model g = aqft_to_fqft(af.model, ctx, debug);
  const TableOperad& o = ctx.trunc->operad;
  std::vector<HomTable> iota;
  for (std::size_t d = 0; d < o.num_colors(); ++d) {
    std::size_t c = ctx.color_of[d];
    Bits img = 0;
    for_each_bit(ctx.fragment->object(d).sigma, [&](std::size_t x) { img |= bit(ctx.to_color[d][x]); });
    std::size_t k = std::find(ctx.surfaces[c].begin(), ctx.surfaces[c].end(), img) - ctx.surfaces[c].begin();
    std::vector<std::size_t> id = identity_table(ctx.to_color[d].size());
    const HomTable& shift =
        class_table(f, ctx, straight_bordism(ctx, {d}, {id}, ctx.surface_object[c][k]));
    iota.push_back(compose_tables(af.colimits[c].legs[k], shift));
    std::string v = hom_violation({&f.colors[d]}, g.colors[d], iota.back());
    if (!v.empty()) r.fail("triangle-fqft", target, "iota at " + o.color_name(d) + ": " + v);
    else if (!is_bijective(iota.back(), g.colors[d].size))
      r.fail("triangle-fqft", target, "iota at " + o.color_name(d) + " is not bijective");
  }
  std::size_t squares = 0;
  for (std::size_t k = 0; k < o.num_ops(); ++k) {
    if (!f.ops[k]) continue;
    ++squares;
    auto dom = f.inputs(k);
    auto gdom = g.inputs(k);
    const HomTable& fk = *f.ops[k];
    const HomTable& gk = *g.ops[k];
    const auto& s = o.sig(k);
    for (std::size_t idx = 0; idx < fk.size(); ++idx) {
      auto x = decode_tuple(dom, idx);
      std::vector<std::size_t> y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = iota[s.inputs[i]][x[i]];
      if (iota[s.output][fk[idx]] != gk[encode_tuple(gdom, y)]) {
        r.fail("triangle-fqft", target, "naturality square of " + o.op_name(k) + " fails at tuple " +
                                            std::to_string(idx));
        break;
      }
    }
  }
  r.close(mark, "triangle-fqft", target, o.num_colors() + squares);
  return r;
}

Report check_transformation(const Model& from, const Model& to, const ModelTransformation& z,
                            const std::string& target) {
  Report r;
  std::size_t mark = r.mark(), checked = 0;
  const Operad& o = *from.base;
  for (std::size_t c = 0; c < o.num_colors(); ++c) {
    std::string v = hom_violation({&from.colors[c]}, to.colors[c], z.components[c]);
    if (!v.empty()) r.fail("transformation", target, "component at " + o.color_name(c) + ": " + v);
  }
  if (!r.ok()) return r;
  for (std::size_t op = 0; op < o.num_ops(); ++op) {
    if (!from.ops[op] || !to.ops[op]) continue;
    ++checked;
    auto dom = from.inputs(op);
    auto tdom = to.inputs(op);
    const auto& s = o.sig(op);
    for (std::size_t idx = 0; idx < from.ops[op]->size(); ++idx) {
      auto x = decode_tuple(dom, idx);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = z.components[s.inputs[i]][x[i]];
      if (z.components[s.output][(*from.ops[op])[idx]] != (*to.ops[op])[encode_tuple(tdom, x)]) {
        r.fail("transformation", target, "naturality fails on " + o.op_name(op));
        break;
      }
    }
  }
  r.close(mark, "transformation", target, checked);
  return r;
}

ModelTransformation aqft_to_fqft(const ModelTransformation& z, const TranslationContext& ctx) {
  ModelTransformation out;
  for (std::size_t c : ctx.color_of) out.components.push_back(z.components[c]);
  return out;
}

ModelTransformation fqft_to_aqft(const ModelTransformation& xi, const AqftFromFqft& from,
                                 const AqftFromFqft& to, const TranslationContext& ctx) {
  ModelTransformation out;
  for (std::size_t c = 0; c < from.colimits.size(); ++c) {
    HomTable h;
    for (auto [k, x] : from.colimits[c].reps)
      h.push_back(to.colimits[c].legs[k][xi.components[ctx.surface_object[c][k]][x]]);
    out.components.push_back(std::move(h));
  }
  return out;
}

Report roundtrip_transformation(const Model& a, const Model& b, const ModelTransformation& z,
                                const TranslationContext& ctx, const std::string& target) {
  Report r = check_transformation(a, b, z, target);
  Model fa = aqft_to_fqft(a, ctx), fb = aqft_to_fqft(b, ctx);
  ModelTransformation xi = aqft_to_fqft(z, ctx);
  r.merge(check_transformation(fa, fb, xi, target + "/F"));
  AqftFromFqft afa = fqft_to_aqft(fa, ctx), afb = fqft_to_aqft(fb, ctx);
  ModelTransformation back = fqft_to_aqft(xi, afa, afb, ctx);
  std::size_t mark = r.mark();
  for (std::size_t c = 0; c < z.components.size(); ++c)
    if (back.components[c] != z.components[c])
      r.fail("triangle-morphism", target, "component at " + a.base->color_name(c) + " changed");
  r.close(mark, "triangle-morphism", target, z.components.size());
  return r;
}

}  // namespace lqft
