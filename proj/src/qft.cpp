#include "lqft/qft.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "lqft/error.hpp"

namespace lqft {

// Monoids.

std::string Monoid::label(std::size_t x) const {
  if (x < labels.size()) return labels[x];
  return std::to_string(x);
}

bool operator==(const Monoid& a, const Monoid& b) {
  return a.size == b.size && a.mul == b.mul && a.unit == b.unit;
}

Monoid trivial_monoid() {
  Monoid m;
  m.name = "1";
  return m;
}

Monoid cyclic_group(std::size_t n) {
  Monoid m;
  m.name = "Z/" + std::to_string(n);
  m.size = n;
  m.mul.resize(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) m.mul[a * n + b] = (a + b) % n;
  return m;
}

Monoid transformation_monoid_2() {
  // Elements as value pairs (f(0), f(1)): id, swap, const0, const1.
  const std::vector<std::pair<int, int>> f{{0, 1}, {1, 0}, {0, 0}, {1, 1}};
  Monoid m;
  m.name = "End(2)";
  m.size = 4;
  m.labels = {"id", "swap", "c0", "c1"};
  m.mul.resize(16);
  auto at = [&](std::size_t g, int x) { return x == 0 ? f[g].first : f[g].second; };
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      // a * b = a after b.
      std::pair<int, int> v{at(a, at(b, 0)), at(a, at(b, 1))};
      m.mul[a * 4 + b] = static_cast<std::size_t>(std::find(f.begin(), f.end(), v) - f.begin());
    }
  return m;
}

Monoid left_zero_monoid() {
  Monoid m;
  m.name = "L2";
  m.size = 3;
  m.labels = {"1", "l0", "l1"};
  m.mul = {0, 1, 2, 1, 1, 1, 2, 2, 2};
  return m;
}

Report check_monoid(const Monoid& m, const std::string& target) {
  Report r;
  std::size_t mark = r.mark();
  std::size_t n = m.size;
  if (n == 0 || m.mul.size() != n * n || m.unit >= n) {
    r.fail("monoid", target, "malformed table");
    return r;
  }
  for (std::size_t v : m.mul)
    if (v >= n) {
      r.fail("monoid", target, "product out of range");
      return r;
    }
  for (std::size_t a = 0; a < n; ++a)
    if (m.op(m.unit, a) != a || m.op(a, m.unit) != a) {
      r.fail("monoid", target, "unit law fails at " + m.label(a));
      return r;
    }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        if (m.op(m.op(a, b), c) != m.op(a, m.op(b, c))) {
          r.fail("monoid", target,
                 "associativity fails at (" + m.label(a) + "," + m.label(b) + "," + m.label(c) + ")");
          return r;
        }
  r.close(mark, "monoid", target, n * n * n);
  return r;
}

// Homs out of products.

std::size_t tuple_count(const std::vector<const Monoid*>& factors) {
  std::size_t n = 1;
  for (const Monoid* f : factors) n *= f->size;
  return n;
}

std::size_t encode_tuple(const std::vector<const Monoid*>& factors,
                         const std::vector<std::size_t>& x) {
  std::size_t idx = 0, stride = 1;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    idx += x[i] * stride;
    stride *= factors[i]->size;
  }
  return idx;
}

std::vector<std::size_t> decode_tuple(const std::vector<const Monoid*>& factors,
                                      std::size_t index) {
  std::vector<std::size_t> x(factors.size());
  for (std::size_t i = 0; i < factors.size(); ++i) {
    x[i] = index % factors[i]->size;
    index /= factors[i]->size;
  }
  return x;
}

namespace {

std::string tuple_label(const std::vector<const Monoid*>& factors,
                        const std::vector<std::size_t>& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ",";
    s += factors[i]->label(x[i]);
  }
  return s + ")";
}

}  // namespace

std::string hom_violation(const std::vector<const Monoid*>& dom, const Monoid& cod,
                          const HomTable& h) {
  std::size_t n = tuple_count(dom);
  if (h.size() != n) return "table has " + std::to_string(h.size()) + " entries, expected " +
                            std::to_string(n);
  for (std::size_t v : h)
    if (v >= cod.size) return "value out of range";
  std::vector<std::size_t> one(dom.size());
  for (std::size_t i = 0; i < dom.size(); ++i) one[i] = dom[i]->unit;
  if (h[encode_tuple(dom, one)] != cod.unit) return "unit not preserved";
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      auto x = decode_tuple(dom, a), y = decode_tuple(dom, b);
      std::vector<std::size_t> xy(dom.size());
      for (std::size_t i = 0; i < dom.size(); ++i) xy[i] = dom[i]->op(x[i], y[i]);
      if (h[encode_tuple(dom, xy)] != cod.op(h[a], h[b]))
        return "product not preserved at " + tuple_label(dom, x) + "*" + tuple_label(dom, y);
    }
  return {};
}

bool is_bijective(const HomTable& h, std::size_t cod_size) {
  return h.size() == cod_size && inverse_table(h, cod_size).has_value();
}

std::optional<HomTable> inverse_table(const HomTable& h, std::size_t cod_size) {
  if (h.size() != cod_size) return std::nullopt;
  HomTable inv(cod_size, kNone);
  for (std::size_t x = 0; x < h.size(); ++x) {
    if (h[x] >= cod_size || inv[h[x]] != kNone) return std::nullopt;
    inv[h[x]] = x;
  }
  return inv;
}

HomTable compose_tables(const HomTable& g, const HomTable& f) {
  HomTable out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) out[x] = g[f[x]];
  return out;
}

HomTable identity_table(std::size_t n) {
  HomTable h(n);
  std::iota(h.begin(), h.end(), std::size_t{0});
  return h;
}

// Thin categories.

namespace {

using Row = std::vector<std::uint64_t>;

void set_bit(Row& r, std::size_t i) {
  if (r.size() <= i / 64) r.resize(i / 64 + 1, 0);
  r[i / 64] |= std::uint64_t{1} << (i % 64);
}

bool get_bit(const Row& r, std::size_t i) {
  return i / 64 < r.size() && ((r[i / 64] >> (i % 64)) & 1u);
}

// Least i set in both, or kNone.
std::size_t first_common(const Row& a, const Row& b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t w = 0; w < n; ++w)
    if (std::uint64_t x = a[w] & b[w]) return w * 64 + static_cast<std::size_t>(std::countr_zero(x));
  return kNone;
}

}  // namespace

std::size_t ThinCategory::add_object(std::string label) {
  labels_.push_back(std::move(label));
  out_.emplace_back();
  in_.emplace_back();
  std::size_t i = labels_.size() - 1;
  add_arrow(i, i);
  return i;
}

void ThinCategory::add_arrow(std::size_t a, std::size_t b) {
  set_bit(out_[a], b);
  set_bit(in_[b], a);
}

bool ThinCategory::arrow(std::size_t a, std::size_t b) const { return get_bit(out_[a], b); }

std::vector<std::size_t> ThinCategory::out(std::size_t a) const {
  std::vector<std::size_t> r;
  for (std::size_t w = 0; w < out_[a].size(); ++w)
    for_each_bit(out_[a][w], [&](std::size_t i) { r.push_back(w * 64 + i); });
  return r;
}

bool is_filtered(const ThinCategory& c, std::string* why) {
  if (c.size() == 0) {
    if (why) *why = "empty category";
    return false;
  }
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j)
      if (first_common(c.row(i), c.row(j)) == kNone) {
        if (why) *why = "no common target of " + c.label(i) + " and " + c.label(j);
        return false;
      }
  return true;
}

bool is_final(const ThinCategory& c, const ThinCategory& d, const std::vector<std::size_t>& f,
              std::string* why) {
  std::size_t words = (c.size() + 63) / 64;
  for (std::size_t y = 0; y < d.size(); ++y) {
    Row in(words, 0);
    std::size_t start = kNone, count = 0;
    for (std::size_t x = 0; x < c.size(); ++x)
      if (d.arrow(y, f[x])) {
        set_bit(in, x);
        if (start == kNone) start = x;
        ++count;
      }
    if (start == kNone) {
      if (why) *why = "empty comma category under " + d.label(y);
      return false;
    }
    // Breadth-first search inside the comma category along arrows of c.
    Row seen(words, 0);
    set_bit(seen, start);
    std::vector<std::size_t> queue{start};
    std::size_t reached = 1;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const Row& o = c.row(queue[q]);
      const Row& i = c.col(queue[q]);
      for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t nb = ((w < o.size() ? o[w] : 0) | (w < i.size() ? i[w] : 0)) & in[w] & ~seen[w];
        seen[w] |= nb;
        for_each_bit(nb, [&](std::size_t b) {
          queue.push_back(w * 64 + b);
          ++reached;
        });
      }
    }
    if (reached != count) {
      if (why) *why = "disconnected comma category under " + d.label(y);
      return false;
    }
  }
  return true;
}

// Region categories.

namespace {

std::string region_label(const CausalSet& m, Bits u) {
  std::string s = "{";
  bool first = true;
  for (const auto& n : m.names_of(u)) {
    if (!first) s += ",";
    s += n;
    first = false;
  }
  return s + "}";
}

std::string pointed_label(const CausalSet& m, const PointedRegion& r) {
  return "(" + region_label(m, r.U) + "," + region_label(m, r.S) + ")";
}

// Whether u is a slab of the induced causal set on w (u inside w).
bool is_slab_in(const CausalSet& m, Bits u, Bits w) {
  if (w == m.all()) return m.is_slab(u);
  Bits rel = 0;
  std::size_t k = 0;
  for_each_bit(w, [&](std::size_t x) {
    if (has(u, x)) rel |= bit(k);
    ++k;
  });
  return m.induced(w).is_slab(rel);
}

// Cauchy antichains of the induced set on u, as masks of m.
std::vector<Bits> cauchy_in(const CausalSet& m, Bits u) {
  std::vector<std::size_t> idx = ranks_to_indices(u);
  std::vector<Bits> out;
  for (Bits s : m.induced(u).cauchy_antichains()) {
    Bits t = 0;
    for_each_bit(s, [&](std::size_t k) { t |= bit(idx[k]); });
    out.push_back(t);
  }
  return out;
}

}  // namespace

RegionCategory rc_category(const CausalSet& m) {
  RegionCategory r;
  r.regions = m.convex_subsets();
  for (Bits u : r.regions) r.cat.add_object(region_label(m, u));
  for (std::size_t i = 0; i < r.regions.size(); ++i)
    for (std::size_t j = 0; j < r.regions.size(); ++j)
      if (i != j && (r.regions[i] & ~r.regions[j]) == 0) r.cat.add_arrow(i, j);
  return r;
}

bool pointed_arrow(const CausalSet& m, const PointedRegion& a, const PointedRegion& b) {
  if (a.U & ~b.U) return false;
  if (a == b) return true;
  // Pasts inside the convex region b.U agree with pasts in m.
  if ((a.S & ~m.chrono_past(b.S)) == 0) return true;
  return (a.S & ~m.past(b.S)) == 0 && is_slab_in(m, a.U, b.U);
}

namespace {

void add_pointed_arrows(const CausalSet& m, ThinCategory& cat,
                        const std::vector<PointedRegion>& regions) {
  for (std::size_t i = 0; i < regions.size(); ++i)
    for (std::size_t j = 0; j < regions.size(); ++j)
      if (i != j && pointed_arrow(m, regions[i], regions[j])) cat.add_arrow(i, j);
}

std::vector<PointedRegion> rc_objects(const CausalSet& m, Bits sigma, RcVariant v) {
  Bits bound = v == RcVariant::adapted ? m.past(sigma) : m.chrono_past(sigma);
  Bits strict = m.chrono_past(sigma);
  std::vector<PointedRegion> out;
  for (Bits u : m.convex_subsets()) {
    if (u & ~bound) continue;
    bool slab = v == RcVariant::adapted && m.is_slab(u);
    for (Bits s : cauchy_in(m, u))
      if (v == RcVariant::literal || slab || (s & ~strict) == 0) out.push_back({u, s});
  }
  return out;
}

}  // namespace

PointedRegionCategory rc_pointed_category(const CausalSet& m, Bits sigma, RcVariant v) {
  PointedRegionCategory r;
  r.regions = rc_objects(m, sigma, v);
  for (const auto& p : r.regions) r.cat.add_object(pointed_label(m, p));
  add_pointed_arrows(m, r.cat, r.regions);
  return r;
}

SurfaceCategory sigma_category(const CausalSet& m) {
  SurfaceCategory s;
  s.surfaces = m.cauchy_antichains();
  for (Bits x : s.surfaces) s.cat.add_object(region_label(m, x));
  for (std::size_t i = 0; i < s.surfaces.size(); ++i)
    for (std::size_t j = 0; j < s.surfaces.size(); ++j)
      if (i != j && (s.surfaces[i] & ~m.past(s.surfaces[j])) == 0) s.cat.add_arrow(i, j);
  return s;
}

GrothendieckData grothendieck(const CausalSet& m) {
  GrothendieckData g;
  SurfaceCategory sc = sigma_category(m);
  std::map<std::pair<Bits, Bits>, std::size_t> qindex;
  for (std::size_t s = 0; s < sc.surfaces.size(); ++s)
    for (const auto& r : rc_objects(m, sc.surfaces[s], RcVariant::adapted)) {
      auto [it, fresh] = qindex.try_emplace({r.U, r.S}, g.q_objects.size());
      if (fresh) {
        g.q_objects.push_back(r);
        g.q.add_object(pointed_label(m, r));
      }
      g.objects.emplace_back(s, r);
      g.total.add_object(sc.cat.label(s) + ":" + pointed_label(m, r));
      g.forget.push_back(it->second);
    }
  add_pointed_arrows(m, g.q, g.q_objects);
  for (std::size_t i = 0; i < g.objects.size(); ++i)
    for (std::size_t j = 0; j < g.objects.size(); ++j)
      if (i != j && sc.cat.arrow(g.objects[i].first, g.objects[j].first) &&
          g.q.arrow(g.forget[i], g.forget[j]))
        g.total.add_arrow(i, j);
  return g;
}

// Filtered colimits.

Colimit filtered_colimit(const ThinCategory& c, const std::vector<const Monoid*>& objects,
                         const std::function<const HomTable&(std::size_t, std::size_t)>& arrow,
                         bool debug) {
  std::string why;
  if (!is_filtered(c, &why)) throw Error("NotFiltered", why);
  std::size_t n = c.size();
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offset[i + 1] = offset[i] + objects[i]->size;
  std::vector<std::size_t> parent(offset[n]);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  // The least flat index of a class is its root.
  auto unite = [&](std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : c.out(i)) {
      if (i == j) continue;
      const HomTable& h = arrow(i, j);
      for (std::size_t x = 0; x < objects[i]->size; ++x) unite(offset[i] + x, offset[j] + h[x]);
    }
  Colimit out;
  std::map<std::size_t, std::size_t> cls;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t x = 0; x < objects[i]->size; ++x)
      if (find(offset[i] + x) == offset[i] + x) {
        cls[offset[i] + x] = out.reps.size();
        out.reps.emplace_back(i, x);
      }
  out.legs.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t x = 0; x < objects[i]->size; ++x)
      out.legs[i].push_back(cls[find(offset[i] + x)]);

  std::size_t k = out.reps.size();
  Monoid& m = out.monoid;
  m.name = "colim";
  m.size = k;
  m.mul.assign(k * k, 0);
  for (auto [i, x] : out.reps) m.labels.push_back(objects[i]->label(x));
  auto image = [&](std::size_t from, std::size_t to, std::size_t x) {
    return from == to ? x : arrow(from, to)[x];
  };
  auto product = [&](std::size_t a, std::size_t b, std::size_t t) {
    auto [i, x] = out.reps[a];
    auto [j, y] = out.reps[b];
    return out.legs[t][objects[t]->op(image(i, t, x), image(j, t, y))];
  };
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      std::size_t t = first_common(c.row(out.reps[a].first), c.row(out.reps[b].first));
      m.mul[a * k + b] = product(a, b, t);
      if (debug)
        for (std::size_t t2 = 0; t2 < n; ++t2)
          if (c.arrow(out.reps[a].first, t2) && c.arrow(out.reps[b].first, t2) &&
              product(a, b, t2) != m.mul[a * k + b])
            throw Error("NotWellDefined", "product depends on the upper bound " + c.label(t2));
    }
  m.unit = out.legs[0][objects[0]->unit];
  if (debug)
    for (std::size_t i = 0; i < n; ++i)
      if (out.legs[i][objects[i]->unit] != m.unit)
        throw Error("NotWellDefined", "units of " + c.label(i) + " and " + c.label(0) + " differ");
  return out;
}

// Models.

std::vector<const Monoid*> Model::inputs(std::size_t op) const {
  std::vector<const Monoid*> out;
  for (std::size_t c : base->sig(op).inputs) out.push_back(&colors[c]);
  return out;
}

namespace {

const HomTable* table_of(const Model& m, std::size_t op) {
  return op < m.ops.size() && m.ops[op] ? &*m.ops[op] : nullptr;
}

// Table of psi o (phi_1, ..., phi_n) from the tables of its parts.
HomTable composite_table(const Model& m, std::size_t psi, const std::vector<std::size_t>& phis) {
  std::vector<const Monoid*> dom;
  for (std::size_t f : phis)
    for (const Monoid* x : m.inputs(f)) dom.push_back(x);
  std::vector<const Monoid*> mid = m.inputs(psi);
  std::size_t count = tuple_count(dom);
  HomTable out(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    auto x = decode_tuple(dom, idx);
    std::vector<std::size_t> y;
    std::size_t pos = 0;
    for (std::size_t f : phis) {
      auto fin = m.inputs(f);
      std::vector<std::size_t> part(x.begin() + pos, x.begin() + pos + fin.size());
      pos += fin.size();
      y.push_back((*table_of(m, f))[encode_tuple(fin, part)]);
    }
    out[idx] = (*table_of(m, psi))[encode_tuple(mid, y)];
  }
  return out;
}

std::string first_difference(const HomTable& a, const HomTable& b) {
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    if (a[i] != b[i])
      return "at tuple " + std::to_string(i) + ": " + std::to_string(a[i]) + " vs " +
             std::to_string(b[i]);
  return "sizes " + std::to_string(a.size()) + " vs " + std::to_string(b.size());
}

}  // namespace

Report check_model(const Model& m, const std::string& target) {
  Report r;
  const Operad& o = *m.base;
  if (m.colors.size() != o.num_colors() || m.ops.size() != o.num_ops()) {
    r.fail("model-shape", target, "assignment does not match the base operad");
    return r;
  }
  std::size_t mark = r.mark();
  for (std::size_t c = 0; c < m.colors.size(); ++c) {
    Report mr = check_monoid(m.colors[c], o.color_name(c));
    for (const auto& e : mr.entries())
      if (e.status == "fail") r.fail("model-monoids", target, o.color_name(c) + ": " + e.witness);
  }
  r.close(mark, "model-monoids", target, m.colors.size());
  if (!r.ok()) return r;

  mark = r.mark();
  std::size_t checked = 0, skipped = 0;
  for (std::size_t op = 0; op < o.num_ops(); ++op) {
    const HomTable* h = table_of(m, op);
    if (!h) {
      ++skipped;
      continue;
    }
    ++checked;
    std::string v = hom_violation(m.inputs(op), m.colors[o.sig(op).output], *h);
    if (!v.empty()) r.fail("model-homs", target, o.op_name(op) + ": " + v);
  }
  r.close(mark, "model-homs", target, checked, skipped);
  if (!r.ok()) return r;

  mark = r.mark();
  checked = skipped = 0;
  for (std::size_t c = 0; c < o.num_colors(); ++c) {
    const HomTable* h = table_of(m, o.unit(c));
    if (!h) {
      ++skipped;
      continue;
    }
    ++checked;
    if (*h != identity_table(m.colors[c].size))
      r.fail("model-units", target, "unit of " + o.color_name(c) + " is not the identity");
  }
  r.close(mark, "model-units", target, checked, skipped);

  mark = r.mark();
  checked = skipped = 0;
  for (std::size_t psi = 0; psi < o.num_ops(); ++psi) {
    if (!table_of(m, psi)) continue;
    for_each_tuple(o, o.sig(psi).inputs, [&](const std::vector<std::size_t>& phis) {
      auto res = o.compose(psi, phis);
      bool known = res && table_of(m, *res);
      for (std::size_t f : phis) known = known && table_of(m, f);
      if (!known) {
        ++skipped;
        return true;
      }
      ++checked;
      HomTable want = composite_table(m, psi, phis);
      if (want != *table_of(m, *res)) {
        std::string args;
        for (std::size_t f : phis) args += (args.empty() ? "" : ", ") + o.op_name(f);
        r.fail("model-composition", target,
               o.op_name(psi) + " o (" + args + ") " + first_difference(want, *table_of(m, *res)));
      }
      return true;
    });
  }
  r.close(mark, "model-composition", target, checked, skipped);

  mark = r.mark();
  checked = skipped = 0;
  for (std::size_t op = 0; op < o.num_ops(); ++op) {
    std::size_t n = o.arity(op);
    const HomTable* h = table_of(m, op);
    if (n < 2 || !h) continue;
    for (const Perm& s : all_perms(n)) {
      auto res = o.permute(op, s);
      if (!res || !table_of(m, *res)) {
        ++skipped;
        continue;
      }
      ++checked;
      // (psi.s)(x_0..x_{n-1}) = psi(y) with y[s(i)] = x_i.
      auto din = m.inputs(*res);
      auto pin = m.inputs(op);
      HomTable want(tuple_count(din));
      for (std::size_t idx = 0; idx < want.size(); ++idx) {
        auto x = decode_tuple(din, idx);
        std::vector<std::size_t> y(n);
        for (std::size_t i = 0; i < n; ++i) y[s[i]] = x[i];
        want[idx] = (*h)[encode_tuple(pin, y)];
      }
      if (want != *table_of(m, *res))
        r.fail("model-permutations", target,
               o.op_name(op) + "." + perm_string(s) + " " + first_difference(want, *table_of(m, *res)));
    }
  }
  r.close(mark, "model-permutations", target, checked, skipped);
  return r;
}

Report check_time_slice(const Model& m, const std::string& target) {
  Report r;
  const Operad& o = *m.base;
  std::size_t mark = r.mark(), checked = 0, skipped = 0;
  for (std::size_t op = 0; op < o.num_ops(); ++op) {
    if (o.arity(op) != 1 || !o.is_cauchy(op)) continue;
    const HomTable* h = table_of(m, op);
    if (!h) {
      ++skipped;
      continue;
    }
    ++checked;
    const Monoid& cod = m.colors[o.sig(op).output];
    const Monoid& dom = m.colors[o.sig(op).inputs[0]];
    if (is_bijective(*h, cod.size)) continue;
    std::string w = o.op_name(op) + " is Cauchy but its image is not invertible: ";
    std::vector<std::size_t> pre(cod.size, kNone);
    bool found = false;
    for (std::size_t x = 0; x < h->size() && !found; ++x) {
      if (pre[(*h)[x]] != kNone) {
        w += dom.label(pre[(*h)[x]]) + " and " + dom.label(x) + " both map to " + cod.label((*h)[x]);
        found = true;
      }
      pre[(*h)[x]] = x;
    }
    for (std::size_t y = 0; y < cod.size && !found; ++y)
      if (pre[y] == kNone) {
        w += cod.label(y) + " is not in the image";
        found = true;
      }
    r.fail("time-slice", target, w);
  }
  r.close(mark, "time-slice", target, checked, skipped);
  return r;
}

Report check_einstein_causality(const Model& m, const std::string& target) {
  Report r;
  const Operad& o = *m.base;
  std::size_t mark = r.mark(), checked = 0, skipped = 0;
  auto nullary = [&](std::size_t c) -> std::optional<std::size_t> {
    for (std::size_t op : o.ops_into(c))
      if (o.arity(op) == 0) return op;
    return std::nullopt;
  };
  for (std::size_t psi = 0; psi < o.num_ops(); ++psi) {
    if (o.arity(psi) != 2) continue;
    const auto& in = o.sig(psi).inputs;
    const Monoid& cod = m.colors[o.sig(psi).output];
    // The restriction to input i and its table, read off the binary table
    // when the restriction itself carries none.
    auto restriction = [&](std::size_t i) -> std::optional<std::pair<std::string, HomTable>> {
      std::size_t other = 1 - i;
      std::optional<std::size_t> f;
      if (auto e = nullary(in[other])) {
        std::vector<std::size_t> args(2);
        args[i] = o.unit(in[i]);
        args[other] = *e;
        f = o.compose(psi, args);
      }
      if (f && table_of(m, *f)) return std::make_pair(o.op_name(*f), *table_of(m, *f));
      const HomTable* h = table_of(m, psi);
      if (!h) return std::nullopt;
      auto ins = m.inputs(psi);
      HomTable t(ins[i]->size);
      for (std::size_t x = 0; x < t.size(); ++x) {
        std::vector<std::size_t> y{ins[0]->unit, ins[1]->unit};
        y[i] = x;
        t[x] = (*h)[encode_tuple(ins, y)];
      }
      return std::make_pair(o.op_name(psi) + "|" + std::to_string(i), t);
    };
    auto f1 = restriction(0), f2 = restriction(1);
    if (!f1 || !f2) {
      ++skipped;
      continue;
    }
    ++checked;
    bool bad = false;
    for (std::size_t x = 0; x < f1->second.size() && !bad; ++x)
      for (std::size_t y = 0; y < f2->second.size() && !bad; ++y) {
        std::size_t a = f1->second[x], b = f2->second[y];
        if (cod.op(a, b) != cod.op(b, a)) {
          bad = true;
          r.fail("causality", target,
                 "disjoint restrictions of " + o.op_name(psi) + ": " + f1->first + "(" +
                     m.colors[in[0]].label(x) + ") = " + cod.label(a) + " and " + f2->first + "(" +
                     m.colors[in[1]].label(y) + ") = " + cod.label(b) + " do not commute: " +
                     cod.label(cod.op(a, b)) + " != " + cod.label(cod.op(b, a)));
        }
      }
  }
  r.close(mark, "causality", target, checked, skipped);
  return r;
}

std::optional<std::vector<std::size_t>> find_pointed_iso(const PointedObject& a, const CausalSet& m,
                                                         Bits U, Bits S) {
  if (static_cast<std::size_t>(popcount(U)) != a.M->size() ||
      popcount(S) != popcount(a.sigma))
    return std::nullopt;
  std::vector<Bits> allowed(a.M->size());
  for (std::size_t x = 0; x < allowed.size(); ++x) allowed[x] = has(a.sigma, x) ? S : U & ~S;
  std::optional<std::vector<std::size_t>> out;
  enumerate_embeddings(*a.M, m, allowed, [&](const std::vector<std::size_t>& f) {
    out = f;
    return false;
  });
  return out;
}

namespace {

// Shared tail of both additivity checks: colimit of the diagram over the
// selected regions and its comparison map into the value at the top.
void compare_with_colimit(Report& r, const std::string& target, const std::string& where,
                          const ThinCategory& cat, const std::vector<const Monoid*>& values,
                          const std::map<std::pair<std::size_t, std::size_t>, HomTable>& arrows,
                          const std::vector<HomTable>& to_top, const Monoid& top) {
  if (cat.size() == 0) {
    // Empty colimit: the initial monoid is trivial.
    r.info("additivity-degenerate", target, where + ": no regions in the strict past");
    if (top.size != 1) r.fail("additivity", target, where + ": no regions, but the value is nontrivial");
    return;
  }
  Colimit col;
  try {
    col = filtered_colimit(cat, values, [&](std::size_t i, std::size_t j) -> const HomTable& {
      return arrows.at({i, j});
    });
  } catch (const Error& e) {
    r.fail("additivity", target, where + ": " + e.what());
    return;
  }
  HomTable kappa(col.monoid.size, kNone);
  for (std::size_t i = 0; i < cat.size(); ++i)
    for (std::size_t x = 0; x < values[i]->size; ++x) {
      std::size_t cls = col.legs[i][x], y = to_top[i][x];
      if (kappa[cls] == kNone) {
        kappa[cls] = y;
      } else if (kappa[cls] != y) {
        auto [ri, rx] = col.reps[cls];
        r.fail("additivity", target,
               where + ": comparison is not well defined, " + values[ri]->label(rx) + " at " +
                   cat.label(ri) + " and " + values[i]->label(x) + " at " + cat.label(i) +
                   " are identified but map to " + top.label(kappa[cls]) + " and " + top.label(y));
        return;
      }
    }
  std::string v = hom_violation({&col.monoid}, top, kappa);
  if (!v.empty()) {
    r.fail("additivity", target, where + ": comparison is not a hom, " + v);
    return;
  }
  if (!is_bijective(kappa, top.size))
    r.fail("additivity", target,
           where + ": comparison from a colimit of size " + std::to_string(col.monoid.size) +
               " onto a value of size " + std::to_string(top.size) + " is not bijective");
}

// Full subcategory of `src` on the objects listed in keep.
ThinCategory restrict_category(const ThinCategory& src, const std::vector<std::size_t>& keep) {
  ThinCategory c;
  for (std::size_t i : keep) c.add_object(src.label(i));
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b)
      if (a != b && src.arrow(keep[a], keep[b])) c.add_arrow(a, b);
  return c;
}

}  // namespace

Report check_additivity_aqft(const Model& m, const PrefactorizationOperad& p,
                             const std::string& target) {
  Report r;
  std::size_t mark = r.mark();
  for (std::size_t c = 0; c < p.num_colors(); ++c) {
    const CausalSet& M = *p.color(c).set;
    RegionCategory rc = rc_category(M);
    // Regions isomorphic to a color, with that color and the iso as a map
    // from the color into M.
    std::vector<std::size_t> keep, color_of;
    std::vector<std::vector<std::size_t>> into;
    for (std::size_t i = 0; i < rc.regions.size(); ++i) {
      Bits u = rc.regions[i];
      if (u == M.all()) {
        keep.push_back(i);
        color_of.push_back(c);
        into.push_back(identity_table(M.size()));
        continue;
      }
      std::vector<std::size_t> idx = ranks_to_indices(u);
      CausalSet sub = M.induced(u);
      for (std::size_t d = 0; d < p.num_colors(); ++d)
        if (auto iso = find_isomorphism(*p.color(d).set, sub)) {
          std::vector<std::size_t> f;
          for (std::size_t k : *iso) f.push_back(idx[k]);
          keep.push_back(i);
          color_of.push_back(d);
          into.push_back(f);
          break;
        }
    }
    ThinCategory cat = restrict_category(rc.cat, keep);
    std::vector<const Monoid*> values;
    for (std::size_t d : color_of) values.push_back(&m.colors[d]);
    // The inclusion between kept regions a <= b as an operation.
    auto restriction = [&](std::size_t a, std::size_t b) -> std::optional<HomTable> {
      std::vector<std::size_t> pos(M.size(), kNone);
      for (std::size_t k = 0; k < into[b].size(); ++k) pos[into[b][k]] = k;
      std::vector<std::size_t> f;
      for (std::size_t x : into[a]) f.push_back(pos[x]);
      auto op = p.find_op(color_of[b], {color_of[a]}, {f});
      if (!op || !table_of(m, *op)) return std::nullopt;
      return *table_of(m, *op);
    };
    std::map<std::pair<std::size_t, std::size_t>, HomTable> arrows;
    std::vector<HomTable> to_top(keep.size());
    std::size_t top = kNone;
    for (std::size_t a = 0; a < keep.size(); ++a)
      if (rc.regions[keep[a]] == M.all()) top = a;
    bool missing = false;
    for (std::size_t a = 0; a < keep.size() && !missing; ++a)
      for (std::size_t b = 0; b < keep.size() && !missing; ++b) {
        if (!cat.arrow(a, b)) continue;
        auto h = restriction(a, b);
        if (!h) {
          r.fail("additivity", target,
                 p.color_name(c) + ": missing restriction " + cat.label(a) + " -> " + cat.label(b));
          missing = true;
          break;
        }
        if (a != b) arrows[{a, b}] = *h;
        if (b == top) to_top[a] = *h;
      }
    if (!missing)
      compare_with_colimit(r, target, p.color_name(c), cat, values, arrows, to_top, m.colors[c]);
  }
  r.close(mark, "additivity", target, p.num_colors());
  return r;
}

Report check_additivity_fqft(const Model& m, BordismFragment& f, const Truncation& t,
                             const std::string& target) {
  Report r;
  std::size_t mark = r.mark();
  for (std::size_t c = 0; c < f.num_objects(); ++c) {
    const PointedObject& top = f.object(c);
    const CausalSet& M = *top.M;
    PointedRegionCategory rc = rc_pointed_category(M, top.sigma);
    std::vector<std::size_t> keep, obj_of;
    std::vector<std::vector<std::size_t>> into;
    for (std::size_t i = 0; i < rc.regions.size(); ++i)
      for (std::size_t d = 0; d < f.num_objects(); ++d)
        if (auto iso = find_pointed_iso(f.object(d), M, rc.regions[i].U, rc.regions[i].S)) {
          keep.push_back(i);
          obj_of.push_back(d);
          into.push_back(*iso);
          break;
        }
    ThinCategory cat = restrict_category(rc.cat, keep);
    std::vector<const Monoid*> values;
    for (std::size_t d : obj_of) values.push_back(&m.colors[d]);
    // Class of the inclusion bordism from kept region a into region b, or
    // into the top object when b is kNone.
    auto restriction = [&](std::size_t a, std::size_t b) -> std::optional<HomTable> {
      Bordism bd;
      const PointedObject& src = f.object(obj_of[a]);
      bd.inputs = {src};
      if (b == kNone) {
        bd.output = top;
      } else {
        bd.output = f.object(obj_of[b]);
      }
      bd.N = bd.output.M;
      bd.iota1 = full_collar(*bd.N);
      std::vector<std::size_t> pos(M.size(), kNone);
      if (b == kNone) {
        pos = identity_table(M.size());
      } else {
        for (std::size_t k = 0; k < into[b].size(); ++k) pos[into[b][k]] = k;
      }
      Collar col = full_collar(*src.M);
      for (std::size_t x = 0; x < col.map.size(); ++x) col.map[x] = pos[into[a][x]];
      bd.iota0 = {col};
      auto op = f.intern_op(bd);
      if (!op) return std::nullopt;
      auto cls = class_of_op(f, t, *op);
      if (!cls || !table_of(m, *cls)) return std::nullopt;
      return *table_of(m, *cls);
    };
    std::map<std::pair<std::size_t, std::size_t>, HomTable> arrows;
    std::vector<HomTable> to_top(keep.size());
    bool missing = false;
    for (std::size_t a = 0; a < keep.size() && !missing; ++a) {
      for (std::size_t b = 0; b < keep.size() && !missing; ++b) {
        if (a == b || !cat.arrow(a, b)) continue;
        auto h = restriction(a, b);
        if (!h) {
          r.fail("additivity", target,
                 top.name + ": missing restriction " + cat.label(a) + " -> " + cat.label(b));
          missing = true;
        } else {
          arrows[{a, b}] = *h;
        }
      }
      if (missing) break;
      auto h = restriction(a, kNone);
      if (!h) {
        r.fail("additivity", target, top.name + ": missing restriction " + cat.label(a) + " -> top");
        missing = true;
      } else {
        to_top[a] = *h;
      }
    }
    if (!missing)
      compare_with_colimit(r, target, top.name, cat, values, arrows, to_top, m.colors[c]);
  }
  r.close(mark, "additivity", target, f.num_objects());
  return r;
}

}  // namespace lqft
