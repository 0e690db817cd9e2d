#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace lqft {

// One-line notation, 0-based: p[i] is the image of i. Permutations act on
// operations from the right, so the inputs of psi.sigma are
// (c[sigma(0)], ..., c[sigma(n-1)]).
using Perm = std::vector<std::size_t>;

Perm identity_perm(std::size_t n);
bool is_perm(const Perm& p);
bool is_identity(const Perm& p);
// (sigma * tau)(i) = sigma(tau(i)); with the right action,
// (psi.sigma).tau = psi.(sigma * tau).
Perm compose_perm(const Perm& sigma, const Perm& tau);
Perm inverse_perm(const Perm& p);
std::vector<Perm> all_perms(std::size_t n);

// sigma<k_1..k_n>: moves whole blocks as sigma moves indices, keeping the
// order inside each block. Throws Error{"LengthMismatch"}.
Perm block_permutation(const Perm& sigma, const std::vector<std::size_t>& arities);
// sigma_1 + ... + sigma_n: acts by sigma_i inside block i.
Perm sum_permutation(const std::vector<Perm>& sigmas);

// Reorders a tuple by the right action: out[i] = in[sigma(i)].
template <class T>
std::vector<T> permute_tuple(const std::vector<T>& in, const Perm& sigma) {
  std::vector<T> out;
  out.reserve(in.size());
  for (std::size_t i : sigma) out.push_back(in[i]);
  return out;
}

std::string perm_string(const Perm& p);

}  // namespace lqft
