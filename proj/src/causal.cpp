#include "lqft/causal.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace lqft {

CausalSet::CausalSet(std::vector<std::string> events,
                     const std::vector<std::pair<std::string, std::string>>& relations) {
  std::sort(events.begin(), events.end());
  if (std::adjacent_find(events.begin(), events.end()) != events.end())
    throw Error("DuplicateEvent", "event names must be unique");
  if (events.size() > kMaxEvents)
    throw Error("TooLarge", "at most 64 events per causal set");
  names_ = std::move(events);
  future_.assign(names_.size(), 0);
  for (const auto& [a, b] : relations) {
    std::size_t i = index(a), j = index(b);
    if (i == j) throw Error("Cycle", "relation " + a + " < " + a);
    future_[i] |= bit(j);
  }
  // Warshall closure on bit rows.
  for (std::size_t k = 0; k < size(); ++k)
    for (std::size_t i = 0; i < size(); ++i)
      if (has(future_[i], k)) future_[i] |= future_[k];
  for (std::size_t i = 0; i < size(); ++i)
    if (has(future_[i], i)) throw Error("Cycle", "relation cycle through " + names_[i]);
  finish_from_future();
}

void CausalSet::finish_from_future() {
  std::size_t n = names_.size();
  past_.assign(n, 0);
  up_.assign(n, 0);
  down_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for_each_bit(future_[i], [&](std::size_t j) { past_[j] |= bit(i); });
  for (std::size_t i = 0; i < n; ++i) {
    Bits indirect = 0;
    for_each_bit(future_[i], [&](std::size_t k) { indirect |= future_[k]; });
    up_[i] = future_[i] & ~indirect;
    for_each_bit(up_[i], [&](std::size_t j) { down_[j] |= bit(i); });
  }
}

std::optional<std::size_t> CausalSet::find(std::string_view name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::size_t CausalSet::index(std::string_view name) const {
  auto i = find(name);
  if (!i) throw Error("UnknownEvent", "no event named " + std::string(name));
  return *i;
}

Bits CausalSet::mask(const std::vector<std::string>& names) const {
  Bits b = 0;
  for (const auto& n : names) b |= bit(index(n));
  return b;
}

std::vector<std::string> CausalSet::names_of(Bits b) const {
  std::vector<std::string> out;
  for_each_bit(b, [&](std::size_t i) { out.push_back(names_[i]); });
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> CausalSet::cover_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < size(); ++i)
    for_each_bit(up_[i], [&](std::size_t j) { out.emplace_back(i, j); });
  return out;
}

Bits CausalSet::chrono_past(Bits a) const {
  Bits r = 0;
  for_each_bit(a, [&](std::size_t i) { r |= past_[i]; });
  return r;
}

Bits CausalSet::chrono_future(Bits a) const {
  Bits r = 0;
  for_each_bit(a, [&](std::size_t i) { r |= future_[i]; });
  return r;
}

bool CausalSet::is_antichain(Bits a) const { return (chrono_future(a) & a) == 0; }

bool CausalSet::disjoint_causally(Bits a, Bits b) const {
  return (past(a) & b) == 0 && (future(a) & b) == 0;
}

Bits CausalSet::minimal() const {
  Bits r = 0;
  for (std::size_t i = 0; i < size(); ++i)
    if (!past_[i]) r |= bit(i);
  return r;
}

Bits CausalSet::maximal() const {
  Bits r = 0;
  for (std::size_t i = 0; i < size(); ++i)
    if (!future_[i]) r |= bit(i);
  return r;
}

bool CausalSet::meets_every_maximal_chain(Bits x) const {
  Bits sinks = maximal();
  Bits frontier = minimal() & ~x;
  Bits seen = frontier;
  while (frontier) {
    std::size_t i = static_cast<std::size_t>(std::countr_zero(frontier));
    frontier &= frontier - 1;
    if (has(sinks, i)) return false;
    Bits next = up_[i] & ~x & ~seen;
    seen |= next;
    frontier |= next;
  }
  return true;
}

bool CausalSet::is_cauchy(Bits s) const {
  return is_antichain(s) && meets_every_maximal_chain(s);
}

bool CausalSet::is_slab(Bits x) const {
  if (!is_convex(x) || !meets_every_maximal_chain(x)) return false;
  // A chain may only enter x at a minimal element of x and leave it at a
  // maximal one.
  for (std::size_t p = 0; p < size(); ++p) {
    for (std::size_t q : bit_list(up_[p])) {
      if (!has(x, p) && has(x, q) && (past_[q] & x)) return false;
      if (has(x, p) && !has(x, q) && (future_[p] & x)) return false;
    }
  }
  return true;
}

namespace {

// Enumerates maximal antichains inside x: repeatedly pick the least event
// not yet comparable to a chosen one and branch on its comparable
// candidates. Every Cauchy antichain is a maximal antichain.
template <class Visit>
bool search_antichains(const CausalSet& m, Bits x, Bits chosen, Bits covered,
                       Visit& visit) {
  Bits open = m.all() & ~covered;
  if (!open) return visit(chosen);
  std::size_t first = static_cast<std::size_t>(std::countr_zero(open));
  Bits cands = x & m.comparable_set(first) & ~covered;
  bool go = true;
  for_each_bit(cands, [&](std::size_t c) {
    if (go)
      go = search_antichains(m, x, chosen | bit(c), covered | m.comparable_set(c), visit);
  });
  return go;
}

}  // namespace

std::optional<Bits> CausalSet::find_cauchy_antichain_in(Bits x) const {
  if (empty()) return Bits{0};
  if (!meets_every_maximal_chain(x)) return std::nullopt;
  // Fast paths: the extremal layers of x.
  for (Bits cand : {maximal() & x, minimal() & x}) {
    if (cand && is_cauchy(cand)) return cand;
  }
  std::optional<Bits> found;
  auto visit = [&](Bits s) {
    if (is_cauchy(s)) {
      found = s;
      return false;
    }
    return true;
  };
  search_antichains(*this, x, 0, 0, visit);
  return found;
}

std::vector<Bits> CausalSet::cauchy_antichains() const {
  if (empty()) return {0};
  std::set<Bits> found;
  auto visit = [&](Bits s) {
    if (is_cauchy(s)) found.insert(s);
    return true;
  };
  search_antichains(*this, all(), 0, 0, visit);
  return {found.begin(), found.end()};
}

std::vector<Bits> CausalSet::convex_subsets(bool include_empty) const {
  if (size() > 24) throw Error("TooLarge", "convex subset enumeration capped at 24 events");
  std::vector<Bits> out;
  for (Bits b = include_empty ? 0 : 1; b <= all(); ++b) {
    if (is_convex(b)) out.push_back(b);
    if (b == all()) break;
  }
  return out;
}

std::vector<std::size_t> ranks_to_indices(Bits x) { return bit_list(x); }

CausalSet CausalSet::induced(Bits x) const {
  CausalSet r;
  std::vector<std::size_t> idx = ranks_to_indices(x);
  std::vector<std::size_t> rank(size(), 0);
  for (std::size_t k = 0; k < idx.size(); ++k) rank[idx[k]] = k;
  for (std::size_t i : idx) r.names_.push_back(names_[i]);
  r.future_.assign(idx.size(), 0);
  for (std::size_t k = 0; k < idx.size(); ++k)
    for_each_bit(future_[idx[k]] & x, [&](std::size_t j) { r.future_[k] |= bit(rank[j]); });
  r.finish_from_future();
  return r;
}

std::uint64_t CausalSet::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  for (const auto& n : names_) {
    for (char c : n) mix(static_cast<unsigned char>(c));
    mix(0xff);
  }
  for (Bits f : future_) mix(f);
  return h;
}

namespace {

void check_parent(const CausalSet& m, const Subset& a) {
  if (a.parent != m.fingerprint() || (a.members & ~m.all()))
    throw Error("ForeignSubset", "subset does not belong to this causal set");
}

Subset tagged(const CausalSet& m, Bits b) { return Subset{m.fingerprint(), b}; }

}  // namespace

Subset make_subset(const CausalSet& m, const std::vector<std::string>& names) {
  return tagged(m, m.mask(names));
}

Subset causal_past(const CausalSet& m, const Subset& a) {
  check_parent(m, a);
  return tagged(m, m.past(a.members));
}

Subset causal_future(const CausalSet& m, const Subset& a) {
  check_parent(m, a);
  return tagged(m, m.future(a.members));
}

Subset chronological_past(const CausalSet& m, const Subset& a) {
  check_parent(m, a);
  return tagged(m, m.chrono_past(a.members));
}

Subset chronological_future(const CausalSet& m, const Subset& a) {
  check_parent(m, a);
  return tagged(m, m.chrono_future(a.members));
}

bool is_causally_convex(const CausalSet& m, const Subset& a) {
  check_parent(m, a);
  return m.is_convex(a.members);
}

Subset convex_hull(const CausalSet& m, const Subset& a) {
  check_parent(m, a);
  return tagged(m, m.hull(a.members));
}

bool is_cauchy_antichain(const CausalSet& m, const Subset& s) {
  check_parent(m, s);
  if (!m.is_antichain(s.members)) throw Error("NotAntichain", "subset is not an antichain");
  return m.is_cauchy(s.members);
}

Bits CausalEmbedding::image() const {
  Bits b = 0;
  for (std::size_t y : map) b |= bit(y);
  return b;
}

std::string embedding_violation(const CausalSet& dom, const CausalSet& cod,
                                const std::vector<std::size_t>& map) {
  if (map.size() != dom.size()) return "map size differs from domain size";
  Bits img = 0;
  for (std::size_t y : map) {
    if (y >= cod.size()) return "image index out of range";
    if (has(img, y)) return "map is not injective";
    img |= bit(y);
  }
  for (std::size_t x = 0; x < dom.size(); ++x)
    for (std::size_t y = 0; y < dom.size(); ++y)
      if (dom.precedes(x, y) != cod.precedes(map[x], map[y]))
        return "order not preserved or reflected at " + dom.name(x) + "," + dom.name(y);
  if (!cod.is_convex(img)) return "image is not causally convex";
  return {};
}

CausalEmbedding make_embedding(CausalSetRef dom, CausalSetRef cod,
                               std::vector<std::size_t> map) {
  std::string why = embedding_violation(*dom, *cod, map);
  if (!why.empty()) throw Error("InvalidEmbedding", why);
  return CausalEmbedding{std::move(dom), std::move(cod), std::move(map)};
}

CausalEmbedding identity_embedding(CausalSetRef m) {
  std::vector<std::size_t> map(m->size());
  std::iota(map.begin(), map.end(), std::size_t{0});
  return CausalEmbedding{m, m, std::move(map)};
}

CausalEmbedding inclusion(CausalSetRef m, Bits x) {
  auto dom = share(m->induced(x));
  return make_embedding(dom, m, ranks_to_indices(x));
}

CausalEmbedding compose(const CausalEmbedding& g, const CausalEmbedding& f) {
  if (*f.cod != *g.dom) throw Error("CodomainMismatch", "embeddings are not composable");
  std::vector<std::size_t> map(f.map.size());
  for (std::size_t i = 0; i < map.size(); ++i) map[i] = g.map[f.map[i]];
  return CausalEmbedding{f.dom, g.cod, std::move(map)};
}

bool is_cauchy_embedding(const CausalEmbedding& f) {
  std::string why = embedding_violation(*f.dom, *f.cod, f.map);
  if (!why.empty()) throw Error("InvalidEmbedding", why);
  return f.cod->is_slab(f.image());
}

bool are_causally_disjoint(const CausalEmbedding& f1, const CausalEmbedding& f2) {
  if (*f1.cod != *f2.cod) throw Error("CodomainMismatch", "embeddings have different codomains");
  return f1.cod->disjoint_causally(f1.image(), f2.image());
}

void enumerate_embeddings(
    const CausalSet& dom, const CausalSet& cod, const std::vector<Bits>& allowed,
    const std::function<bool(const std::vector<std::size_t>&)>& visit) {
  std::size_t n = dom.size();
  if (n > cod.size()) return;
  // Process events so that each one is adjacent to an earlier one when
  // possible, which makes the order constraints prune early.
  std::vector<std::size_t> order;
  Bits placed = 0;
  while (order.size() < n) {
    Bits frontier = 0;
    for (std::size_t x : order) frontier |= dom.covers_above(x) | dom.covers_below(x);
    frontier &= dom.all() & ~placed;
    std::size_t next = frontier ? static_cast<std::size_t>(std::countr_zero(frontier))
                                : static_cast<std::size_t>(std::countr_zero(dom.all() & ~placed));
    order.push_back(next);
    placed |= bit(next);
  }
  std::vector<Bits> cand(n);
  for (std::size_t x = 0; x < n; ++x) {
    Bits c = x < allowed.size() && allowed[x] ? allowed[x] : cod.all();
    Bits ok = 0;
    int pin = popcount(dom.strict_past(x)), pout = popcount(dom.strict_future(x));
    for_each_bit(c, [&](std::size_t y) {
      if (popcount(cod.strict_past(y)) >= pin && popcount(cod.strict_future(y)) >= pout)
        ok |= bit(y);
    });
    cand[x] = ok;
  }
  std::vector<std::size_t> map(n, 0);
  Bits used = 0;
  bool go = true;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (!go) return;
    if (k == n) {
      if (cod.is_convex(used)) go = visit(map);
      return;
    }
    std::size_t x = order[k];
    for_each_bit(cand[x] & ~used, [&](std::size_t y) {
      if (!go) return;
      for (std::size_t j = 0; j < k; ++j) {
        std::size_t z = order[j];
        if (dom.precedes(x, z) != cod.precedes(y, map[z])) return;
        if (dom.precedes(z, x) != cod.precedes(map[z], y)) return;
      }
      map[x] = y;
      used |= bit(y);
      rec(k + 1);
      used &= ~bit(y);
    });
  };
  rec(0);
}

std::optional<std::vector<std::size_t>> find_isomorphism(const CausalSet& a,
                                                         const CausalSet& b) {
  if (a.size() != b.size()) return std::nullopt;
  std::optional<std::vector<std::size_t>> out;
  enumerate_embeddings(a, b, {}, [&](const std::vector<std::size_t>& m) {
    out = m;
    return false;
  });
  return out;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

GlueResult glue_pushout(const std::vector<CausalSet>& left,
                        const std::vector<CausalSet>& mid, const CausalSet& right,
                        const std::vector<std::vector<std::size_t>>& into_left,
                        const std::vector<std::vector<std::size_t>>& into_right) {
  std::size_t k = left.size();
  if (mid.size() != k || into_left.size() != k || into_right.size() != k)
    throw Error("InvalidGluingData", "left, mid and maps must have equal length");
  // Vertices: right first, then each left[i].
  std::vector<std::size_t> offset(k + 1);
  offset[0] = right.size();
  for (std::size_t i = 0; i < k; ++i) offset[i + 1] = offset[i] + left[i].size();
  std::size_t total = offset[k];
  UnionFind uf(total);
  Bits right_glued = 0;
  for (std::size_t i = 0; i < k; ++i) {
    // Only injectivity is required here. Order defects in the gluing maps
    // surface as GluingCycle or as cocone failures below.
    auto injective = [](const std::vector<std::size_t>& m, std::size_t dn, std::size_t cn) {
      Bits seen = 0;
      for (std::size_t y : m) {
        if (y >= cn || has(seen, y)) return false;
        seen |= bit(y);
      }
      return m.size() == dn;
    };
    if (!injective(into_left[i], mid[i].size(), left[i].size()) ||
        !injective(into_right[i], mid[i].size(), right.size()))
      throw Error("InvalidGluingData", "gluing map " + std::to_string(i) + " is not injective");
    Bits img = 0;
    for (std::size_t v = 0; v < mid[i].size(); ++v) {
      img |= bit(into_right[i][v]);
      uf.unite(offset[i] + into_left[i][v], into_right[i][v]);
    }
    if (img & right_glued)
      throw Error("InvalidGluingData", "gluing regions overlap in the right object");
    right_glued |= img;
  }
  // Classes in order of first vertex, so right vertices come first.
  std::vector<std::size_t> cls(total), reps;
  std::map<std::size_t, std::size_t> root_to_class;
  for (std::size_t v = 0; v < total; ++v) {
    std::size_t r = uf.find(v);
    auto [it, fresh] = root_to_class.emplace(r, reps.size());
    if (fresh) reps.push_back(v);
    cls[v] = it->second;
  }
  std::size_t nc = reps.size();
  if (nc > kMaxEvents) throw Error("TooLarge", "pushout exceeds 64 events");
  std::vector<Bits> fut(nc, 0);
  for (const auto& [a, b] : right.cover_pairs()) fut[cls[a]] |= bit(cls[b]);
  for (std::size_t i = 0; i < k; ++i)
    for (const auto& [a, b] : left[i].cover_pairs())
      fut[cls[offset[i] + a]] |= bit(cls[offset[i] + b]);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t i = 0; i < nc; ++i)
      if (has(fut[i], c)) fut[i] |= fut[c];
  for (std::size_t c = 0; c < nc; ++c)
    if (has(fut[c], c)) throw Error("GluingCycle", "glued order has a cycle");
  // Names: the right name when the class has a right vertex, otherwise the
  // left name, primed until unique.
  auto vertex_name = [&](std::size_t v) -> const std::string& {
    if (v < offset[0]) return right.name(v);
    std::size_t i = static_cast<std::size_t>(
        std::upper_bound(offset.begin(), offset.end(), v) - offset.begin() - 1);
    return left[i].name(v - offset[i]);
  };
  std::vector<std::string> names(nc);
  std::set<std::string> taken;
  for (std::size_t c = 0; c < nc; ++c)
    if (reps[c] < offset[0]) taken.insert(names[c] = right.name(reps[c]));
  for (std::size_t c = 0; c < nc; ++c) {
    if (reps[c] < offset[0]) continue;
    std::string n = vertex_name(reps[c]);
    while (taken.count(n)) n += "'";
    taken.insert(n);
    names[c] = n;
  }
  std::vector<std::pair<std::string, std::string>> rel;
  for (std::size_t c = 0; c < nc; ++c)
    for_each_bit(fut[c], [&](std::size_t d) { rel.emplace_back(names[c], names[d]); });
  GlueResult out;
  out.result = CausalSet(names, rel);
  std::vector<std::size_t> pos(nc);
  for (std::size_t c = 0; c < nc; ++c) pos[c] = out.result.index(names[c]);
  auto cocone = [&](const CausalSet& src, std::size_t off, const std::string& what) {
    std::vector<std::size_t> m(src.size());
    for (std::size_t v = 0; v < src.size(); ++v) m[v] = pos[cls[off + v]];
    std::string why = embedding_violation(src, out.result, m);
    if (why == "image is not causally convex")
      throw Error("NonConvexCocone", what + " image is not causally convex");
    if (!why.empty()) throw Error("CoconeNotEmbedding", what + ": " + why);
    return m;
  };
  out.from_right = cocone(right, 0, "right");
  for (std::size_t i = 0; i < k; ++i)
    out.from_left.push_back(cocone(left[i], offset[i], "left " + std::to_string(i)));
  return out;
}

GlueEmbeddings glue_pushout(const std::vector<CausalEmbedding>& into_left,
                            const std::vector<CausalEmbedding>& into_right) {
  if (into_left.size() != into_right.size() || into_right.empty())
    throw Error("InvalidGluingData", "need matching nonempty embedding lists");
  std::vector<CausalSet> left, mid;
  std::vector<std::vector<std::size_t>> ml, mr;
  const CausalSetRef& right = into_right[0].cod;
  for (std::size_t i = 0; i < into_left.size(); ++i) {
    if (*into_left[i].dom != *into_right[i].dom || *into_right[i].cod != *right)
      throw Error("InvalidGluingData", "span " + std::to_string(i) + " is malformed");
    left.push_back(*into_left[i].cod);
    mid.push_back(*into_left[i].dom);
    ml.push_back(into_left[i].map);
    mr.push_back(into_right[i].map);
  }
  GlueResult g = glue_pushout(left, mid, *right, ml, mr);
  GlueEmbeddings out;
  out.result = share(std::move(g.result));
  for (std::size_t i = 0; i < left.size(); ++i)
    out.from_left.push_back(CausalEmbedding{into_left[i].cod, out.result, g.from_left[i]});
  out.from_right = CausalEmbedding{right, out.result, g.from_right};
  return out;
}

std::string to_dot(const CausalSet& m, const std::vector<std::pair<std::string, Bits>>& layers) {
  static const char* colors[] = {"lightblue", "salmon", "palegreen", "khaki", "plum"};
  std::ostringstream os;
  os << "digraph causal_set {\n  rankdir=BT;\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    os << "  \"" << m.name(i) << "\"";
    std::string tag;
    for (std::size_t l = 0; l < layers.size(); ++l)
      if (has(layers[l].second, i)) {
        os << " [style=filled, fillcolor=" << colors[l % 5] << "]";
        tag = layers[l].first;
        break;
      }
    if (!tag.empty()) os << " // " << tag;
    os << ";\n";
  }
  for (const auto& [a, b] : m.cover_pairs())
    os << "  \"" << m.name(a) << "\" -> \"" << m.name(b) << "\";\n";
  os << "}\n";
  return os.str();
}

}  // namespace lqft
