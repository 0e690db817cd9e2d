#pragma once

// Brute-force reference implementations. They work on an explicit boolean
// relation matrix and never call into the bitset algorithms under test.

#include <algorithm>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lqft/causal.hpp"

namespace oracle {

struct Poset {
  int n = 0;
  std::vector<std::vector<bool>> lt;  // lt[x][y]: x strictly precedes y

  bool le(int x, int y) const { return x == y || lt[x][y]; }
};

// Closure by repeated relaxation until nothing changes.
inline Poset from_pairs(int n, const std::vector<std::pair<int, int>>& pairs) {
  Poset p{n, std::vector<std::vector<bool>>(n, std::vector<bool>(n, false))};
  for (auto [a, b] : pairs) p.lt[a][b] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          if (p.lt[a][b] && p.lt[b][c] && !p.lt[a][c]) p.lt[a][c] = changed = true;
  }
  return p;
}

inline std::string event_name(int i) {
  return std::string("e") + static_cast<char>('a' + i / 26) + static_cast<char>('a' + i % 26);
}

inline lqft::CausalSet to_causal(const Poset& p) {
  std::vector<std::string> names;
  std::vector<std::pair<std::string, std::string>> rel;
  for (int i = 0; i < p.n; ++i) names.push_back(event_name(i));
  for (int a = 0; a < p.n; ++a)
    for (int b = 0; b < p.n; ++b)
      if (p.lt[a][b]) rel.emplace_back(names[a], names[b]);
  return lqft::CausalSet(names, rel);
}

inline bool in(lqft::Bits s, int i) { return (s >> i) & 1u; }

inline lqft::Bits past(const Poset& p, lqft::Bits a, bool strict) {
  lqft::Bits r = 0;
  for (int x = 0; x < p.n; ++x)
    for (int y = 0; y < p.n; ++y)
      if (in(a, y) && (strict ? p.lt[x][y] : p.le(x, y))) r |= lqft::bit(x);
  return r;
}

inline lqft::Bits future(const Poset& p, lqft::Bits a, bool strict) {
  lqft::Bits r = 0;
  for (int x = 0; x < p.n; ++x)
    for (int y = 0; y < p.n; ++y)
      if (in(a, y) && (strict ? p.lt[y][x] : p.le(y, x))) r |= lqft::bit(x);
  return r;
}

inline bool convex(const Poset& p, lqft::Bits a) {
  for (int x = 0; x < p.n; ++x)
    for (int y = 0; y < p.n; ++y)
      for (int z = 0; z < p.n; ++z)
        if (in(a, x) && in(a, z) && p.le(x, y) && p.le(y, z) && !in(a, y)) return false;
  return true;
}

inline lqft::Bits hull(const Poset& p, lqft::Bits a) {
  lqft::Bits cur = a;
  for (;;) {
    lqft::Bits next = cur;
    for (int x = 0; x < p.n; ++x)
      for (int y = 0; y < p.n; ++y)
        for (int z = 0; z < p.n; ++z)
          if (in(cur, x) && in(cur, z) && p.le(x, y) && p.le(y, z)) next |= lqft::bit(y);
    if (next == cur) return cur;
    cur = next;
  }
}

inline bool antichain(const Poset& p, lqft::Bits a) {
  for (int x = 0; x < p.n; ++x)
    for (int y = 0; y < p.n; ++y)
      if (in(a, x) && in(a, y) && p.lt[x][y]) return false;
  return true;
}

// Maximal chains of the sub-poset on `within`, as event sets.
inline std::vector<lqft::Bits> maximal_chains(const Poset& p, lqft::Bits within) {
  auto covers = [&](int x, int y) {
    if (!in(within, x) || !in(within, y) || !p.lt[x][y]) return false;
    for (int z = 0; z < p.n; ++z)
      if (in(within, z) && p.lt[x][z] && p.lt[z][y]) return false;
    return true;
  };
  auto is_min = [&](int x) {
    for (int z = 0; z < p.n; ++z)
      if (in(within, z) && p.lt[z][x]) return false;
    return true;
  };
  auto is_max = [&](int x) {
    for (int z = 0; z < p.n; ++z)
      if (in(within, z) && p.lt[x][z]) return false;
    return true;
  };
  std::vector<lqft::Bits> out;
  std::vector<int> stack;
  auto dfs = [&](auto&& self, int x, lqft::Bits acc) -> void {
    acc |= lqft::bit(x);
    if (is_max(x)) {
      out.push_back(acc);
      return;
    }
    for (int y = 0; y < p.n; ++y)
      if (covers(x, y)) self(self, y, acc);
  };
  for (int x = 0; x < p.n; ++x)
    if (in(within, x) && is_min(x)) dfs(dfs, x, 0);
  return out;
}

inline lqft::Bits everything(const Poset& p) { return lqft::low_mask(p.n); }

inline bool cauchy(const Poset& p, lqft::Bits s) {
  if (!antichain(p, s)) return false;
  if (p.n == 0) return s == 0;
  for (lqft::Bits c : maximal_chains(p, everything(p)))
    if (!(c & s)) return false;
  return true;
}

// Every maximal chain of p meets x in a maximal chain of x.
inline bool slab(const Poset& p, lqft::Bits x) {
  if (!convex(p, x)) return false;
  std::vector<lqft::Bits> inner = maximal_chains(p, x);
  for (lqft::Bits c : maximal_chains(p, everything(p))) {
    lqft::Bits meet = c & x;
    if (!meet) return false;
    if (std::find(inner.begin(), inner.end(), meet) == inner.end()) return false;
  }
  return true;
}

inline std::vector<lqft::Bits> cauchy_antichains(const Poset& p) {
  std::vector<lqft::Bits> out;
  for (lqft::Bits s = 0; s <= everything(p); ++s) {
    if (cauchy(p, s)) out.push_back(s);
    if (s == everything(p)) break;
  }
  return out;
}

// All naturally labelled posets on n events (relations only from lower to
// higher index); every isomorphism class occurs.
inline std::vector<Poset> all_posets(int n) {
  std::vector<std::pair<int, int>> slots;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) slots.emplace_back(a, b);
  std::vector<Poset> out;
  for (unsigned long m = 0; m < (1ul << slots.size()); ++m) {
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t k = 0; k < slots.size(); ++k)
      if ((m >> k) & 1u) pairs.push_back(slots[k]);
    Poset p = from_pairs(n, pairs);
    bool closed = true;
    for (std::size_t k = 0; k < slots.size() && closed; ++k)
      if (p.lt[slots[k].first][slots[k].second] != (((m >> k) & 1u) != 0)) closed = false;
    if (closed) out.push_back(p);
  }
  return out;
}

inline Poset random_poset(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> density(0.15, 0.6);
  std::bernoulli_distribution edge(density(rng));
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (edge(rng)) pairs.emplace_back(perm[a], perm[b]);
  return from_pairs(n, pairs);
}

inline Poset relabel_random(const Poset& p, std::mt19937_64& rng) {
  std::vector<int> perm(p.n);
  for (int i = 0; i < p.n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < p.n; ++a)
    for (int b = 0; b < p.n; ++b)
      if (p.lt[a][b]) pairs.emplace_back(perm[a], perm[b]);
  return from_pairs(p.n, pairs);
}

// Cauchy antichain of the sub-poset on w.
inline bool cauchy_within(const Poset& p, lqft::Bits s, lqft::Bits w) {
  if ((s & ~w) || !antichain(p, s)) return false;
  for (lqft::Bits c : maximal_chains(p, w))
    if (!(c & s)) return false;
  return true;
}

// x is a slab of the sub-poset on w.
inline bool slab_within(const Poset& p, lqft::Bits x, lqft::Bits w) {
  if ((x & ~w) || !convex(p, x)) return false;
  std::vector<lqft::Bits> inner = maximal_chains(p, x);
  for (lqft::Bits c : maximal_chains(p, w)) {
    lqft::Bits meet = c & x;
    if (!meet || std::find(inner.begin(), inner.end(), meet) == inner.end()) return false;
  }
  return true;
}

}  // namespace oracle
