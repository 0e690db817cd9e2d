#include "lqft/permutation.hpp"

#include <algorithm>
#include <numeric>

#include "lqft/error.hpp"

namespace lqft {

Perm identity_perm(std::size_t n) {
  Perm p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

bool is_perm(const Perm& p) {
  std::vector<bool> seen(p.size(), false);
  for (std::size_t i : p) {
    if (i >= p.size() || seen[i]) return false;
    seen[i] = true;
  }
  return true;
}

bool is_identity(const Perm& p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] != i) return false;
  return true;
}

Perm compose_perm(const Perm& sigma, const Perm& tau) {
  if (sigma.size() != tau.size()) throw Error("LengthMismatch", "permutations of different size");
  Perm r(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i) r[i] = sigma[tau[i]];
  return r;
}

Perm inverse_perm(const Perm& p) {
  Perm r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[p[i]] = i;
  return r;
}

std::vector<Perm> all_perms(std::size_t n) {
  std::vector<Perm> out;
  Perm p = identity_perm(n);
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

Perm block_permutation(const Perm& sigma, const std::vector<std::size_t>& arities) {
  if (sigma.size() != arities.size())
    throw Error("LengthMismatch", "block permutation needs one arity per block");
  std::vector<std::size_t> start(arities.size() + 1, 0);
  for (std::size_t i = 0; i < arities.size(); ++i) start[i + 1] = start[i] + arities[i];
  Perm r;
  r.reserve(start.back());
  for (std::size_t b = 0; b < sigma.size(); ++b)
    for (std::size_t t = 0; t < arities[sigma[b]]; ++t) r.push_back(start[sigma[b]] + t);
  return r;
}

Perm sum_permutation(const std::vector<Perm>& sigmas) {
  Perm r;
  std::size_t base = 0;
  for (const auto& s : sigmas) {
    for (std::size_t i : s) r.push_back(base + i);
    base += s.size();
  }
  return r;
}

std::string perm_string(const Perm& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? " " : "") + std::to_string(p[i] + 1);
  return s + ")";
}

}  // namespace lqft
