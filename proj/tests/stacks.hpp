#pragma once

// Random composable stacks of bordisms for property tests.

#include <random>
#include <string>
#include <vector>

#include "lqft/bordism.hpp"
#include "oracles.hpp"

namespace stacks {

using lqft::Bits;

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

inline std::vector<Bits> slabs_around(const lqft::CausalSet& m, Bits s) {
  std::vector<Bits> out;
  for (Bits z : m.convex_subsets())
    if ((z & s) == s && m.is_slab(z)) out.push_back(z);
  return out;
}

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }

  // (M, Sigma) with M a random poset on 1..max_events events.
  lqft::PointedObject object(int max_events = 4) {
    int n = std::uniform_int_distribution<int>(1, max_events)(rng_);
    lqft::CausalSet m = oracle::to_causal(oracle::random_poset(rng_, n));
    Bits s = pick(rng_, m.cauchy_antichains());
    return {"o" + std::to_string(next_++), lqft::share(std::move(m)), s};
  }

  // A valid bordism ending at `out`: N is a random past P glued below a
  // slab collar of out, with inputs carved out of P.
  lqft::Bordism into(const lqft::PointedObject& out, int max_past = 3, int max_arity = 2) {
    for (;;) {
      lqft::Bordism b = attempt(out, max_past, max_arity);
      if (lqft::validate_bordism(b).ok()) return b;
    }
  }

 private:
  lqft::Bordism attempt(const lqft::PointedObject& out, int max_past, int max_arity) {
    const lqft::CausalSet& m = *out.M;
    Bits top = pick(rng_, slabs_around(m, out.sigma));
    int np = std::uniform_int_distribution<int>(1, max_past)(rng_);
    oracle::Poset pp = oracle::random_poset(rng_, np);
    std::vector<std::string> pnames;
    for (int i = 0; i < np; ++i) pnames.push_back("q" + std::to_string(next_++));
    std::vector<std::pair<std::string, std::string>> prel;
    for (int a = 0; a < np; ++a)
      for (int c = 0; c < np; ++c)
        if (pp.lt[a][c]) prel.emplace_back(pnames[a], pnames[c]);
    lqft::CausalSet p(pnames, prel);
    std::vector<std::string> names = pnames;
    std::vector<std::pair<std::string, std::string>> rel = prel;
    for (const auto& t : m.names_of(top)) {
      names.push_back(t);
      for (const auto& q : pnames) rel.emplace_back(q, t);
    }
    for (const auto& [x, y] : m.cover_pairs())
      if (lqft::has(top, x) && lqft::has(top, y)) rel.emplace_back(m.name(x), m.name(y));
    lqft::CausalSet n(names, rel);

    lqft::Bordism b;
    b.output = out;
    b.iota1.domain = top;
    b.iota1.map.assign(m.size(), lqft::kNone);
    lqft::for_each_bit(top, [&](std::size_t v) { b.iota1.map[v] = n.index(m.name(v)); });

    int k = std::uniform_int_distribution<int>(0, max_arity)(rng_);
    std::vector<Bits> antichains;
    for (Bits a = 1; a <= p.all(); ++a)
      if (p.is_antichain(a)) antichains.push_back(a);
    std::vector<Bits> used;
    for (int i = 0; i < k; ++i) {
      Bits a = pick(rng_, antichains);
      Bits v = a;
      Bits below = p.past(a) & ~a;
      if (below && std::bernoulli_distribution(0.5)(rng_)) {
        std::vector<std::size_t> bl = lqft::bit_list(below);
        Bits w = p.hull(a | lqft::bit(pick(rng_, bl)));
        if (p.induced(w).is_cauchy(rank_mask(w, a))) v = w;
      }
      bool ok = true;
      for (Bits u : used) ok = ok && p.disjoint_causally(u, v);
      if (!ok) continue;
      used.push_back(v);
      lqft::CausalSet mi = p.induced(v);
      lqft::PointedObject obj{"o" + std::to_string(next_++), lqft::share(mi), rank_mask(v, a)};
      Bits dom = pick(rng_, slabs_around(*obj.M, obj.sigma));
      lqft::Collar c{dom, std::vector<std::size_t>(obj.M->size(), lqft::kNone)};
      lqft::for_each_bit(dom, [&](std::size_t x) { c.map[x] = n.index(obj.M->name(x)); });
      b.inputs.push_back(obj);
      b.iota0.push_back(c);
    }
    b.N = lqft::share(std::move(n));
    return b;
  }

  // Positions of the events of a inside v, as a mask of the induced set.
  static Bits rank_mask(Bits v, Bits a) {
    Bits out = 0;
    std::size_t k = 0;
    lqft::for_each_bit(v, [&](std::size_t x) {
      if (lqft::has(a, x)) out |= lqft::bit(k);
      ++k;
    });
    return out;
  }

  std::mt19937_64 rng_;
  std::size_t next_ = 0;
};

// A three-level stack psi; phis; chis; omegas.
struct Stack {
  lqft::Bordism psi;
  std::vector<lqft::Bordism> phis, chis, omegas;
};

inline std::vector<lqft::Bordism> below(Generator& g, const std::vector<lqft::Bordism>& level,
                                        int max_arity) {
  std::vector<lqft::Bordism> out;
  for (const auto& b : level)
    for (const auto& o : b.inputs) out.push_back(g.into(o, 2, max_arity));
  return out;
}

inline Stack random_stack(Generator& g) {
  Stack s;
  s.psi = g.into(g.object(), 3, 2);
  s.phis = below(g, {s.psi}, 2);
  s.chis = below(g, s.phis, 1);
  s.omegas = below(g, s.chis, 1);
  return s;
}

}  // namespace stacks
