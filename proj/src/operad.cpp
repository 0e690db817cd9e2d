#include "lqft/operad.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "lqft/error.hpp"

namespace lqft {

const std::vector<std::size_t>& Operad::ops_into(std::size_t color) const {
  std::lock_guard<std::mutex> lock(index_mu_);
  if (!indexed_) {
    into_.assign(num_colors(), {});
    for (std::size_t op = 0; op < num_ops(); ++op) into_[sig(op).output].push_back(op);
    indexed_ = true;
  }
  return into_[color];
}

std::vector<std::size_t> Operad::ops_with(const OpSig& s) const {
  std::vector<std::size_t> out;
  for (std::size_t op : ops_into(s.output))
    if (sig(op).inputs == s.inputs) out.push_back(op);
  return out;
}

std::size_t Operad::max_arity() const {
  std::size_t m = 0;
  for (std::size_t op = 0; op < num_ops(); ++op) m = std::max(m, arity(op));
  return m;
}

bool for_each_tuple(const Operad& o, const std::vector<std::size_t>& colors,
                    const std::function<bool(const std::vector<std::size_t>&)>& f) {
  std::size_t n = colors.size();
  std::vector<const std::vector<std::size_t>*> choices(n);
  for (std::size_t i = 0; i < n; ++i) {
    choices[i] = &o.ops_into(colors[i]);
    if (choices[i]->empty()) return true;
  }
  std::vector<std::size_t> pos(n, 0), tuple(n);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) tuple[i] = (*choices[i])[pos[i]];
    if (!f(tuple)) return false;
    std::size_t i = 0;
    while (i < n && ++pos[i] == choices[i]->size()) pos[i++] = 0;
    if (i == n) return true;
  }
}

namespace {

std::vector<std::size_t> concat_inputs(const Operad& o, const std::vector<std::size_t>& phis) {
  std::vector<std::size_t> flat;
  for (std::size_t p : phis)
    flat.insert(flat.end(), o.sig(p).inputs.begin(), o.sig(p).inputs.end());
  return flat;
}

std::string tuple_string(const Operad& o, const std::vector<std::size_t>& ops) {
  std::string s = "(";
  for (std::size_t i = 0; i < ops.size(); ++i) s += (i ? ", " : "") + o.op_name(ops[i]);
  return s + ")";
}

}  // namespace

std::size_t TableOperad::add_color(std::string name) {
  colors_.push_back(std::move(name));
  units_.push_back(0);
  invalidate_index();
  return colors_.size() - 1;
}

std::size_t TableOperad::add_op(std::string name, std::vector<std::size_t> inputs,
                                std::size_t output) {
  ops_.push_back(OpSig{std::move(inputs), output});
  names_.push_back(std::move(name));
  cauchy_.push_back(false);
  invalidate_index();
  return ops_.size() - 1;
}

void TableOperad::set_unit(std::size_t color, std::size_t op) { units_[color] = op; }

void TableOperad::set_compose(std::size_t psi, const std::vector<std::size_t>& phis,
                              std::size_t result) {
  std::vector<std::size_t> key{psi};
  key.insert(key.end(), phis.begin(), phis.end());
  compose_[key] = result;
}

void TableOperad::set_permute(std::size_t op, const Perm& sigma, std::size_t result) {
  permute_[{op, sigma}] = result;
}

void TableOperad::set_cauchy(std::size_t op, bool cauchy) { cauchy_[op] = cauchy; }

std::optional<std::size_t> TableOperad::find_color(const std::string& name) const {
  for (std::size_t c = 0; c < colors_.size(); ++c)
    if (colors_[c] == name) return c;
  return std::nullopt;
}

std::optional<std::size_t> TableOperad::find_op(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

std::optional<std::size_t> TableOperad::compose(std::size_t psi,
                                                const std::vector<std::size_t>& phis) const {
  std::vector<std::size_t> key{psi};
  key.insert(key.end(), phis.begin(), phis.end());
  auto it = compose_.find(key);
  if (it == compose_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> TableOperad::permute(std::size_t op, const Perm& sigma) const {
  auto it = permute_.find({op, sigma});
  if (it != permute_.end()) return it->second;
  if (is_identity(sigma) && sigma.size() == arity(op)) return op;
  return std::nullopt;
}

TableOperad materialize(const Operad& o) {
  TableOperad t;
  for (std::size_t c = 0; c < o.num_colors(); ++c) t.add_color(o.color_name(c));
  for (std::size_t op = 0; op < o.num_ops(); ++op) {
    t.add_op(o.op_name(op), o.sig(op).inputs, o.sig(op).output);
    t.set_cauchy(op, o.is_cauchy(op));
  }
  for (std::size_t c = 0; c < o.num_colors(); ++c) t.set_unit(c, o.unit(c));
  for (std::size_t psi = 0; psi < o.num_ops(); ++psi) {
    for_each_tuple(o, o.sig(psi).inputs, [&](const std::vector<std::size_t>& phis) {
      if (auto r = o.compose(psi, phis)) t.set_compose(psi, phis, *r);
      return true;
    });
    if (o.arity(psi) >= 2)
      for (const Perm& s : all_perms(o.arity(psi)))
        if (auto r = o.permute(psi, s)) t.set_permute(psi, s, *r);
  }
  return t;
}

Report check_operad_axioms(const Operad& o, const AxiomOptions& opt) {
  Report r;
  const std::string T = "operad";
  std::size_t mark, checked, skipped;

  auto undefined = [&](const std::string& check, const std::string& what) {
    if (opt.require_total) r.fail(check, T, "undefined composite " + what);
    else ++skipped;
  };

  mark = r.mark();
  checked = 0;
  for (std::size_t c = 0; c < o.num_colors(); ++c) {
    std::size_t u = o.unit(c);
    ++checked;
    if (!(o.sig(u) == OpSig{{c}, c}))
      r.fail("unit-signature", T, "unit of " + o.color_name(c) + " is " + o.op_name(u));
  }
  r.close(mark, "unit-signature", T, checked);

  mark = r.mark();
  checked = skipped = 0;
  for (std::size_t psi = 0; psi < o.num_ops(); ++psi) {
    const OpSig& s = o.sig(psi);
    ++checked;
    auto left = o.compose(o.unit(s.output), {psi});
    std::vector<std::size_t> units;
    for (std::size_t c : s.inputs) units.push_back(o.unit(c));
    auto right = o.compose(psi, units);
    if (!left || !right) {
      undefined("unitality", "at " + o.op_name(psi));
      continue;
    }
    if (*left != psi) r.fail("unitality", T, "1 o " + o.op_name(psi) + " = " + o.op_name(*left));
    if (*right != psi)
      r.fail("unitality", T, o.op_name(psi) + " o units = " + o.op_name(*right));
  }
  r.close(mark, "unitality", T, checked, skipped);

  mark = r.mark();
  checked = skipped = 0;
  for (std::size_t psi = 0; psi < o.num_ops(); ++psi) {
    std::size_t n = o.arity(psi);
    if (n < 2 || n > 5) continue;
    auto perms = all_perms(n);
    for (const Perm& s : perms) {
      ++checked;
      auto ps = o.permute(psi, s);
      if (!ps) {
        undefined("permutation-action", o.op_name(psi) + perm_string(s));
        continue;
      }
      OpSig want{permute_tuple(o.sig(psi).inputs, s), o.sig(psi).output};
      if (!(o.sig(*ps) == want))
        r.fail("permutation-action", T,
               o.op_name(psi) + perm_string(s) + " has signature of " + o.op_name(*ps));
      if (is_identity(s) && *ps != psi)
        r.fail("permutation-action", T, o.op_name(psi) + " moved by the identity");
      for (const Perm& t : perms) {
        auto lhs = o.permute(*ps, t);
        auto rhs = o.permute(psi, compose_perm(s, t));
        if (!lhs || !rhs) continue;
        if (*lhs != *rhs)
          r.fail("permutation-action", T,
                 "(" + o.op_name(psi) + perm_string(s) + ")" + perm_string(t) + " != " +
                     o.op_name(psi) + perm_string(compose_perm(s, t)));
      }
    }
  }
  r.close(mark, "permutation-action", T, checked, skipped);

  // Signature of composites, associativity and equivariance share the
  // enumeration of (psi; phis).
  std::size_t mk_sig = r.mark(), n_sig = 0;
  std::size_t n_assoc = 0, s_assoc = 0, n_eq1 = 0, s_eq1 = 0, n_eq2 = 0, s_eq2 = 0;
  for (std::size_t psi = 0; psi < o.num_ops(); ++psi) {
    const OpSig& ps = o.sig(psi);
    std::size_t n = ps.inputs.size();
    for_each_tuple(o, ps.inputs, [&](const std::vector<std::size_t>& phis) {
      auto comp = o.compose(psi, phis);
      std::vector<std::size_t> ks;
      for (std::size_t p : phis) ks.push_back(o.arity(p));
      std::vector<std::size_t> flat = concat_inputs(o, phis);
      std::string what = o.op_name(psi) + " o " + tuple_string(o, phis);
      ++n_sig;
      if (comp && !(o.sig(*comp) == OpSig{flat, ps.output}))
        r.fail("composition-signature", T, what + " has signature of " + o.op_name(*comp));

      // Associativity over every chi tuple.
      if (n_assoc + s_assoc < opt.max_tuples) {
        for_each_tuple(o, flat, [&](const std::vector<std::size_t>& chis) {
          if (n_assoc + s_assoc >= opt.max_tuples) {
            ++s_assoc;
            return false;
          }
          std::optional<std::size_t> lhs = comp ? o.compose(*comp, chis) : std::nullopt;
          std::vector<std::size_t> inner;
          std::size_t at = 0;
          bool ok = true;
          for (std::size_t i = 0; i < n && ok; ++i) {
            std::vector<std::size_t> block(chis.begin() + at, chis.begin() + at + ks[i]);
            at += ks[i];
            auto c = o.compose(phis[i], block);
            if (!c) ok = false;
            else inner.push_back(*c);
          }
          std::optional<std::size_t> rhs = ok ? o.compose(psi, inner) : std::nullopt;
          if (!lhs || !rhs) {
            if (opt.require_total && (lhs.has_value() != rhs.has_value()))
              r.fail("associativity", T, "one side undefined at " + what + " o " +
                                             tuple_string(o, chis));
            ++s_assoc;
            return true;
          }
          ++n_assoc;
          if (*lhs != *rhs)
            r.fail("associativity", T,
                   "(" + what + ") o " + tuple_string(o, chis) + ": " + o.op_name(*lhs) +
                       " != " + o.op_name(*rhs));
          return true;
        });
      } else {
        ++s_assoc;
      }

      if (n >= 2 && n <= 4) {
        for (const Perm& s : all_perms(n)) {
          if (is_identity(s)) continue;
          auto psis = o.permute(psi, s);
          std::optional<std::size_t> lhs =
              psis ? o.compose(*psis, permute_tuple(phis, s)) : std::nullopt;
          std::optional<std::size_t> rhs =
              comp ? o.permute(*comp, block_permutation(s, ks)) : std::nullopt;
          if (!lhs || !rhs) {
            ++s_eq1;
            continue;
          }
          ++n_eq1;
          if (*lhs != *rhs)
            r.fail("equivariance-block", T,
                   what + " under " + perm_string(s) + ": " + o.op_name(*lhs) + " != " +
                       o.op_name(*rhs));
        }
      }

      // Sum permutations: every choice of sigma_i on the inner operations.
      std::size_t total = 1;
      for (std::size_t k : ks) {
        std::size_t f = 1;
        for (std::size_t j = 2; j <= k; ++j) f *= j;
        total *= f;
      }
      if (total > 1 && total <= 576 && comp) {
        std::vector<std::vector<Perm>> choices;
        for (std::size_t k : ks) choices.push_back(all_perms(k));
        std::vector<std::size_t> pos(n, 0);
        for (;;) {
          std::vector<Perm> sig;
          std::vector<std::size_t> permuted;
          bool ok = true;
          for (std::size_t i = 0; i < n; ++i) {
            sig.push_back(choices[i][pos[i]]);
            auto p = o.permute(phis[i], sig.back());
            if (!p) ok = false;
            else permuted.push_back(*p);
          }
          std::optional<std::size_t> lhs = ok ? o.compose(psi, permuted) : std::nullopt;
          std::optional<std::size_t> rhs = o.permute(*comp, sum_permutation(sig));
          if (!lhs || !rhs) {
            ++s_eq2;
          } else {
            ++n_eq2;
            if (*lhs != *rhs) {
              std::string ss;
              for (const auto& p : sig) ss += perm_string(p);
              r.fail("equivariance-sum", T,
                     what + " under " + ss + ": " + o.op_name(*lhs) + " != " + o.op_name(*rhs));
            }
          }
          std::size_t i = 0;
          while (i < n && ++pos[i] == choices[i].size()) pos[i++] = 0;
          if (i == n) break;
        }
      }
      return true;
    });
  }
  r.close(mk_sig, "composition-signature", T, n_sig);
  r.close(mk_sig, "associativity", T, n_assoc, s_assoc);
  r.close(mk_sig, "equivariance-block", T, n_eq1, s_eq1);
  r.close(mk_sig, "equivariance-sum", T, n_eq2, s_eq2);
  return r;
}

Report compare_operads(const Operad& a, const Operad& b, const std::string& target) {
  Report r;
  if (a.num_colors() != b.num_colors() || a.num_ops() != b.num_ops()) {
    r.fail("same-operad", target,
           "sizes differ: " + std::to_string(a.num_colors()) + "/" + std::to_string(a.num_ops()) +
               " vs " + std::to_string(b.num_colors()) + "/" + std::to_string(b.num_ops()));
    return r;
  }
  std::size_t checked = 0;
  std::size_t mark = r.mark();
  for (std::size_t c = 0; c < a.num_colors(); ++c) {
    ++checked;
    if (a.unit(c) != b.unit(c)) r.fail("same-operad", target, "unit of color " + a.color_name(c));
  }
  for (std::size_t op = 0; op < a.num_ops(); ++op) {
    ++checked;
    if (!(a.sig(op) == b.sig(op))) r.fail("same-operad", target, "signature of " + a.op_name(op));
  }
  if (!r.ok()) return r;
  for (std::size_t psi = 0; psi < a.num_ops(); ++psi) {
    for_each_tuple(a, a.sig(psi).inputs, [&](const std::vector<std::size_t>& phis) {
      ++checked;
      if (a.compose(psi, phis) != b.compose(psi, phis)) {
        r.fail("same-operad", target, "composite " + a.op_name(psi) + " o " + tuple_string(a, phis));
        return false;
      }
      return true;
    });
    if (a.arity(psi) >= 2 && a.arity(psi) <= 5)
      for (const Perm& s : all_perms(a.arity(psi))) {
        ++checked;
        if (a.permute(psi, s) != b.permute(psi, s))
          r.fail("same-operad", target, "permutation " + a.op_name(psi) + perm_string(s));
      }
  }
  r.close(mark, "same-operad", target, checked);
  return r;
}

// Function operads.

FunctionOperad::FunctionOperad(std::vector<std::size_t> carrier_sizes, std::size_t max_arity)
    : sizes_(std::move(carrier_sizes)), max_arity_(max_arity) {
  for (std::size_t c = 0; c < sizes_.size(); ++c) {
    std::vector<std::uint8_t> t(sizes_[c]);
    for (std::size_t x = 0; x < sizes_[c]; ++x) t[x] = static_cast<std::uint8_t>(x);
    units_.push_back(intern(OpSig{{c}, c}, t));
  }
}

std::size_t FunctionOperad::intern(const OpSig& s, std::vector<std::uint8_t> table) {
  std::vector<std::size_t> key = s.inputs;
  key.push_back(s.output);
  auto [it, fresh] = index_.emplace(std::make_pair(key, table), sigs_.size());
  if (fresh) {
    sigs_.push_back(s);
    tables_.push_back(std::move(table));
    invalidate_index();
  }
  return it->second;
}

std::optional<std::size_t> FunctionOperad::find(const OpSig& s,
                                                const std::vector<std::uint8_t>& table) const {
  std::vector<std::size_t> key = s.inputs;
  key.push_back(s.output);
  auto it = index_.find(std::make_pair(key, table));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string FunctionOperad::color_name(std::size_t c) const { return "X" + std::to_string(c); }

std::string FunctionOperad::op_name(std::size_t op) const {
  std::string s;
  for (std::size_t c : sigs_[op].inputs) s += color_name(c) + ",";
  if (!s.empty()) s.pop_back();
  s += "->" + color_name(sigs_[op].output) + ":";
  for (std::uint8_t v : tables_[op]) s += static_cast<char>('0' + v);
  return s;
}

std::vector<std::uint8_t> FunctionOperad::composite_table(
    std::size_t psi, const std::vector<std::size_t>& phis) const {
  std::vector<std::size_t> flat;
  for (std::size_t p : phis)
    flat.insert(flat.end(), sigs_[p].inputs.begin(), sigs_[p].inputs.end());
  std::size_t total = 1;
  for (std::size_t c : flat) total *= sizes_[c];
  std::vector<std::uint8_t> out(total);
  std::vector<std::size_t> digits(flat.size());
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (std::size_t j = 0; j < flat.size(); ++j) {
      digits[j] = rest % sizes_[flat[j]];
      rest /= sizes_[flat[j]];
    }
    std::size_t at = 0, outer = 0, stride = 1;
    for (std::size_t i = 0; i < phis.size(); ++i) {
      const OpSig& s = sigs_[phis[i]];
      std::size_t inner = 0, st = 1;
      for (std::size_t j = 0; j < s.inputs.size(); ++j) {
        inner += digits[at + j] * st;
        st *= sizes_[s.inputs[j]];
      }
      at += s.inputs.size();
      outer += tables_[phis[i]][inner] * stride;
      stride *= sizes_[s.output];
    }
    out[idx] = tables_[psi][outer];
  }
  return out;
}

std::vector<std::uint8_t> FunctionOperad::permuted_table(std::size_t op, const Perm& sigma) const {
  const OpSig& s = sigs_[op];
  std::vector<std::size_t> in = permute_tuple(s.inputs, sigma);
  std::size_t total = tables_[op].size();
  std::vector<std::uint8_t> out(total);
  std::vector<std::size_t> y(in.size());
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (std::size_t j = 0; j < in.size(); ++j) {
      y[j] = rest % sizes_[in[j]];
      rest /= sizes_[in[j]];
    }
    // Input sigma(i) of the original operation receives y_i.
    std::size_t orig = 0;
    std::vector<std::size_t> x(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) x[sigma[i]] = y[i];
    std::size_t st = 1;
    for (std::size_t j = 0; j < in.size(); ++j) {
      orig += x[j] * st;
      st *= sizes_[s.inputs[j]];
    }
    out[idx] = tables_[op][orig];
  }
  return out;
}

std::optional<std::size_t> FunctionOperad::compose(std::size_t psi,
                                                   const std::vector<std::size_t>& phis) const {
  if (phis.size() != sigs_[psi].inputs.size()) return std::nullopt;
  std::vector<std::size_t> flat;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    if (sigs_[phis[i]].output != sigs_[psi].inputs[i]) return std::nullopt;
    flat.insert(flat.end(), sigs_[phis[i]].inputs.begin(), sigs_[phis[i]].inputs.end());
  }
  if (flat.size() > max_arity_) return std::nullopt;
  return find(OpSig{flat, sigs_[psi].output}, composite_table(psi, phis));
}

std::optional<std::size_t> FunctionOperad::permute(std::size_t op, const Perm& sigma) const {
  if (sigma.size() != sigs_[op].inputs.size() || !is_perm(sigma)) return std::nullopt;
  return find(OpSig{permute_tuple(sigs_[op].inputs, sigma), sigs_[op].output},
              permuted_table(op, sigma));
}

FunctionOperad endomorphism_operad(const std::vector<std::size_t>& sizes, std::size_t max_arity) {
  FunctionOperad o(sizes, max_arity);
  std::size_t k = sizes.size();
  for (std::size_t n = 0; n <= max_arity; ++n) {
    std::size_t tuples = 1;
    for (std::size_t i = 0; i < n; ++i) tuples *= k;
    for (std::size_t t = 0; t < tuples; ++t) {
      std::vector<std::size_t> in(n);
      std::size_t rest = t, total = 1;
      for (std::size_t i = 0; i < n; ++i) {
        in[i] = rest % k;
        rest /= k;
        total *= sizes[in[i]];
      }
      for (std::size_t out = 0; out < k; ++out) {
        std::size_t count = 1;
        for (std::size_t i = 0; i < total; ++i) count *= sizes[out];
        for (std::size_t f = 0; f < count; ++f) {
          std::vector<std::uint8_t> table(total);
          std::size_t r = f;
          for (std::size_t i = 0; i < total; ++i) {
            table[i] = static_cast<std::uint8_t>(r % sizes[out]);
            r /= sizes[out];
          }
          o.intern(OpSig{in, out}, table);
        }
      }
    }
  }
  return o;
}

FunctionOperad random_function_operad(std::uint64_t seed, const RandomOperadOptions& opt) {
  std::mt19937_64 rng(seed);
  for (int attempt = 0;; ++attempt) {
    std::uniform_int_distribution<std::size_t> ncol(1, opt.max_colors), car(1, opt.max_carrier);
    std::size_t k = ncol(rng);
    std::vector<std::size_t> sizes(k), level(k);
    for (std::size_t c = 0; c < k; ++c) {
      sizes[c] = car(rng);
      level[c] = c;
    }
    FunctionOperad o(sizes, 8);
    auto rand_table = [&](const OpSig& s) {
      std::size_t total = 1;
      for (std::size_t c : s.inputs) total *= sizes[c];
      std::vector<std::uint8_t> t(total);
      std::uniform_int_distribution<std::size_t> v(0, sizes[s.output] - 1);
      for (auto& x : t) x = static_cast<std::uint8_t>(v(rng));
      return t;
    };
    std::uniform_int_distribution<std::size_t> pickc(0, k - 1), kind(0, 3);
    for (std::size_t g = 0; g < opt.generators; ++g) {
      std::size_t out = pickc(rng);
      OpSig s{{}, out};
      std::size_t kd = kind(rng);
      if (kd == 0) {
        // constant
      } else if (kd <= 2 || level[out] == 0) {
        // 1-ary, level non-decreasing; a bijection when possible
        std::size_t in = pickc(rng) % (level[out] + 1);
        s.inputs = {in};
        if (sizes[in] == sizes[out] && kd == 1) {
          std::vector<std::uint8_t> t(sizes[in]);
          for (std::size_t x = 0; x < t.size(); ++x) t[x] = static_cast<std::uint8_t>(x);
          std::shuffle(t.begin(), t.end(), rng);
          o.intern(s, t);
          continue;
        }
      } else {
        std::uniform_int_distribution<std::size_t> low(0, level[out] - 1);
        s.inputs = {low(rng), low(rng)};
      }
      o.intern(s, rand_table(s));
    }
    // Closure under partial composition and transpositions.
    bool grew = true, overflow = false;
    while (grew && !overflow) {
      grew = false;
      std::size_t n = o.num_ops();
      for (std::size_t a = 0; a < n && !overflow; ++a) {
        for (std::size_t b = 0; b < n && !overflow; ++b) {
          const OpSig sa = o.sig(a);
          for (std::size_t i = 0; i < sa.inputs.size(); ++i) {
            if (o.sig(b).output != sa.inputs[i]) continue;
            std::vector<std::size_t> phis;
            for (std::size_t j = 0; j < sa.inputs.size(); ++j)
              phis.push_back(j == i ? b : o.unit(sa.inputs[j]));
            std::vector<std::size_t> flat;
            for (std::size_t p : phis)
              flat.insert(flat.end(), o.sig(p).inputs.begin(), o.sig(p).inputs.end());
            if (flat.size() > 4) {
              overflow = true;
              break;
            }
            std::size_t before = o.num_ops();
            o.intern(OpSig{flat, sa.output}, o.composite_table(a, phis));
            grew = grew || o.num_ops() != before;
          }
        }
        std::size_t ar = o.sig(a).inputs.size();
        for (std::size_t i = 0; i + 1 < ar; ++i) {
          Perm t = identity_perm(ar);
          std::swap(t[i], t[i + 1]);
          std::size_t before = o.num_ops();
          o.intern(OpSig{permute_tuple(o.sig(a).inputs, t), o.sig(a).output},
                   o.permuted_table(a, t));
          grew = grew || o.num_ops() != before;
        }
        if (o.num_ops() > opt.max_ops) overflow = true;
      }
    }
    if (!overflow) return o;
  }
}

// Prefactorization operads.

PrefactorizationOperad::Key PrefactorizationOperad::key_of(const Op& op) {
  Key k{op.sig.output, op.sig.inputs.size()};
  for (std::size_t i = 0; i < op.maps.size(); ++i) {
    k.push_back(op.sig.inputs[i]);
    k.insert(k.end(), op.maps[i].begin(), op.maps[i].end());
  }
  return k;
}

PrefactorizationOperad::PrefactorizationOperad(std::vector<Color> colors, std::size_t max_arity,
                                               std::size_t max_ops)
    : colors_(std::move(colors)) {
  std::size_t k = colors_.size();
  if (k > 8) throw Error("TooLarge", "fragment capped at 8 causal sets");
  // emb[c][d]: all embeddings of color c into color d.
  std::vector<std::vector<std::vector<std::vector<std::size_t>>>> emb(
      k, std::vector<std::vector<std::vector<std::size_t>>>(k));
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t d = 0; d < k; ++d)
      enumerate_embeddings(*colors_[c].set, *colors_[d].set, {},
                           [&](const std::vector<std::size_t>& m) {
                             emb[c][d].push_back(m);
                             if (emb[c][d].size() > max_ops)
                               throw Error("TooLarge", "embedding enumeration overflow");
                             return true;
                           });
  std::vector<Op> all;
  for (std::size_t d = 0; d < k; ++d) {
    const CausalSet& target = *colors_[d].set;
    Op cur;
    cur.sig.output = d;
    std::function<void(Bits)> rec = [&](Bits used) {
      all.push_back(cur);
      if (all.size() > max_ops) throw Error("TooLarge", "prefactorization operad too large");
      if (cur.maps.size() == max_arity) return;
      Bits blocked = target.past(used) | target.future(used);
      for (std::size_t c = 0; c < k; ++c)
        for (const auto& m : emb[c][d]) {
          Bits img = 0;
          for (std::size_t y : m) img |= bit(y);
          if (img & blocked) continue;
          cur.sig.inputs.push_back(c);
          cur.maps.push_back(m);
          rec(used | img);
          cur.sig.inputs.pop_back();
          cur.maps.pop_back();
        }
    };
    rec(0);
  }
  std::sort(all.begin(), all.end(), [](const Op& a, const Op& b) { return key_of(a) < key_of(b); });
  ops_ = std::move(all);
  for (std::size_t i = 0; i < ops_.size(); ++i) index_[key_of(ops_[i])] = i;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::size_t> id(colors_[c].set->size());
    for (std::size_t x = 0; x < id.size(); ++x) id[x] = x;
    units_.push_back(*find_op(c, {c}, {id}));
  }
}

std::optional<std::size_t> PrefactorizationOperad::find_color(const std::string& name) const {
  for (std::size_t c = 0; c < colors_.size(); ++c)
    if (colors_[c].name == name) return c;
  return std::nullopt;
}

std::optional<std::size_t> PrefactorizationOperad::find_op(
    std::size_t output, const std::vector<std::size_t>& inputs,
    const std::vector<std::vector<std::size_t>>& maps) const {
  Op probe{OpSig{inputs, output}, maps};
  auto it = index_.find(key_of(probe));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<CausalEmbedding> PrefactorizationOperad::embeddings(std::size_t op) const {
  std::vector<CausalEmbedding> out;
  const Op& o = ops_[op];
  for (std::size_t i = 0; i < o.maps.size(); ++i)
    out.push_back(CausalEmbedding{colors_[o.sig.inputs[i]].set, colors_[o.sig.output].set,
                                  o.maps[i]});
  return out;
}

std::string PrefactorizationOperad::op_name(std::size_t op) const {
  const Op& o = ops_[op];
  std::string s = colors_[o.sig.output].name + "<-(";
  for (std::size_t i = 0; i < o.maps.size(); ++i) {
    const CausalSet& src = *colors_[o.sig.inputs[i]].set;
    const CausalSet& dst = *colors_[o.sig.output].set;
    s += (i ? "," : "") + colors_[o.sig.inputs[i]].name + "{";
    for (std::size_t x = 0; x < o.maps[i].size(); ++x)
      s += (x ? " " : "") + src.name(x) + ":" + dst.name(o.maps[i][x]);
    s += "}";
  }
  return s + ")";
}

std::optional<std::size_t> PrefactorizationOperad::compose(
    std::size_t psi, const std::vector<std::size_t>& phis) const {
  const Op& outer = ops_[psi];
  if (phis.size() != outer.maps.size()) return std::nullopt;
  Op r;
  r.sig.output = outer.sig.output;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    const Op& inner = ops_[phis[i]];
    if (inner.sig.output != outer.sig.inputs[i]) return std::nullopt;
    for (std::size_t j = 0; j < inner.maps.size(); ++j) {
      std::vector<std::size_t> m(inner.maps[j].size());
      for (std::size_t x = 0; x < m.size(); ++x) m[x] = outer.maps[i][inner.maps[j][x]];
      r.sig.inputs.push_back(inner.sig.inputs[j]);
      r.maps.push_back(std::move(m));
    }
  }
  auto it = index_.find(key_of(r));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> PrefactorizationOperad::permute(std::size_t op,
                                                          const Perm& sigma) const {
  const Op& o = ops_[op];
  if (sigma.size() != o.maps.size() || !is_perm(sigma)) return std::nullopt;
  Op r{OpSig{permute_tuple(o.sig.inputs, sigma), o.sig.output}, permute_tuple(o.maps, sigma)};
  auto it = index_.find(key_of(r));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool PrefactorizationOperad::is_cauchy(std::size_t op) const {
  const Op& o = ops_[op];
  if (o.maps.size() != 1) return false;
  Bits img = 0;
  for (std::size_t y : o.maps[0]) img |= bit(y);
  return colors_[o.sig.output].set->is_slab(img);
}

// Multifunctors.

Multifunctor identity_multifunctor(const Operad& o) {
  Multifunctor f{&o, &o, {}, {}};
  for (std::size_t c = 0; c < o.num_colors(); ++c) f.on_colors.push_back(c);
  for (std::size_t op = 0; op < o.num_ops(); ++op) f.on_ops.push_back(op);
  return f;
}

Report check_multifunctor(const Multifunctor& f) {
  Report r;
  const std::string T = "multifunctor";
  const Operad& s = *f.src;
  const Operad& t = *f.tgt;
  if (f.on_colors.size() != s.num_colors() || f.on_ops.size() != s.num_ops()) {
    r.fail("multifunctor-shape", T, "tables do not cover the source operad");
    return r;
  }
  std::size_t mark = r.mark(), checked = 0, skipped = 0;
  for (std::size_t op = 0; op < s.num_ops(); ++op) {
    ++checked;
    OpSig want;
    for (std::size_t c : s.sig(op).inputs) want.inputs.push_back(f.on_colors[c]);
    want.output = f.on_colors[s.sig(op).output];
    if (!(t.sig(f.on_ops[op]) == want))
      r.fail("multifunctor-signature", T, s.op_name(op) + " maps to " + t.op_name(f.on_ops[op]));
  }
  r.close(mark, "multifunctor-signature", T, checked);
  mark = r.mark();
  checked = 0;
  for (std::size_t c = 0; c < s.num_colors(); ++c) {
    ++checked;
    if (f.on_ops[s.unit(c)] != t.unit(f.on_colors[c]))
      r.fail("multifunctor-units", T, "unit of " + s.color_name(c));
  }
  r.close(mark, "multifunctor-units", T, checked);
  mark = r.mark();
  checked = 0;
  for (std::size_t psi = 0; psi < s.num_ops(); ++psi) {
    for_each_tuple(s, s.sig(psi).inputs, [&](const std::vector<std::size_t>& phis) {
      auto c = s.compose(psi, phis);
      if (!c) {
        ++skipped;
        return true;
      }
      std::vector<std::size_t> fphis;
      for (std::size_t p : phis) fphis.push_back(f.on_ops[p]);
      auto tc = t.compose(f.on_ops[psi], fphis);
      ++checked;
      if (!tc || *tc != f.on_ops[*c])
        r.fail("multifunctor-composition", T, s.op_name(psi) + " o " + tuple_string(s, phis));
      return true;
    });
    if (s.arity(psi) >= 2 && s.arity(psi) <= 5)
      for (const Perm& p : all_perms(s.arity(psi))) {
        auto sp = s.permute(psi, p);
        if (!sp) continue;
        auto tp = t.permute(f.on_ops[psi], p);
        ++checked;
        if (!tp || *tp != f.on_ops[*sp])
          r.fail("multifunctor-permutation", T, s.op_name(psi) + perm_string(p));
      }
  }
  r.close(mark, "multifunctor-composition", T, checked, skipped);
  r.close(mark, "multifunctor-permutation", T, checked);
  return r;
}

Multifunctor compose_multifunctors(const Multifunctor& g, const Multifunctor& f) {
  if (f.tgt != g.src) throw Error("BoundaryMismatch", "multifunctors are not composable");
  Multifunctor h{f.src, g.tgt, {}, {}};
  for (std::size_t c : f.on_colors) h.on_colors.push_back(g.on_colors[c]);
  for (std::size_t op : f.on_ops) h.on_ops.push_back(g.on_ops[op]);
  return h;
}

MultinaturalTransformation identity_transformation(const Multifunctor& f) {
  MultinaturalTransformation z{&f, &f, {}};
  for (std::size_t c = 0; c < f.src->num_colors(); ++c)
    z.components.push_back(f.tgt->unit(f.on_colors[c]));
  return z;
}

Report check_multinatural(const MultinaturalTransformation& z) {
  Report r;
  const std::string T = "multinatural";
  const Multifunctor& F = *z.from;
  const Multifunctor& G = *z.to;
  if (F.src != G.src || F.tgt != G.tgt) {
    r.fail("multinatural-boundary", T, "functors have different boundaries");
    return r;
  }
  const Operad& s = *F.src;
  const Operad& t = *F.tgt;
  std::size_t mark = r.mark(), checked = 0;
  for (std::size_t c = 0; c < s.num_colors(); ++c)
    if (!(t.sig(z.components[c]) == OpSig{{F.on_colors[c]}, G.on_colors[c]}))
      r.fail("multinatural-components", T, "component at " + s.color_name(c));
  for (std::size_t psi = 0; psi < s.num_ops(); ++psi) {
    std::vector<std::size_t> ins;
    for (std::size_t c : s.sig(psi).inputs) ins.push_back(z.components[c]);
    auto lhs = t.compose(G.on_ops[psi], ins);
    auto rhs = t.compose(z.components[s.sig(psi).output], {F.on_ops[psi]});
    ++checked;
    if (!lhs || !rhs || *lhs != *rhs) r.fail("multinatural-square", T, "at " + s.op_name(psi));
  }
  r.close(mark, "multinatural-square", T, checked);
  return r;
}

MultinaturalTransformation vertical_compose(const MultinaturalTransformation& outer,
                                            const MultinaturalTransformation& inner) {
  if (inner.to != outer.from) throw Error("BoundaryMismatch", "transformations not composable");
  MultinaturalTransformation z{inner.from, outer.to, {}};
  const Operad& t = *inner.from->tgt;
  for (std::size_t c = 0; c < inner.components.size(); ++c) {
    auto k = t.compose(outer.components[c], {inner.components[c]});
    if (!k) throw Error("UndefinedComposite", "component composite outside the operad");
    z.components.push_back(*k);
  }
  return z;
}

MultinaturalTransformation whisker_left(const Multifunctor& h, const MultinaturalTransformation& z,
                                        const Multifunctor* hf, const Multifunctor* hg) {
  if (z.from->tgt != h.src) throw Error("BoundaryMismatch", "cannot whisker");
  MultinaturalTransformation w{hf, hg, {}};
  for (std::size_t comp : z.components) w.components.push_back(h.on_ops[comp]);
  return w;
}

MultinaturalTransformation whisker_right(const MultinaturalTransformation& z, const Multifunctor& k,
                                         const Multifunctor* fk, const Multifunctor* gk) {
  if (k.tgt != z.from->src) throw Error("BoundaryMismatch", "cannot whisker");
  MultinaturalTransformation w{fk, gk, {}};
  for (std::size_t c : k.on_colors) w.components.push_back(z.components[c]);
  return w;
}

// Groupoids.

std::size_t FiniteGroupoid::add_object() {
  id_.push_back(0);
  return objects_++;
}

std::size_t FiniteGroupoid::add_morphism(std::size_t src, std::size_t tgt) {
  src_.push_back(src);
  tgt_.push_back(tgt);
  inv_.push_back(0);
  return src_.size() - 1;
}

void FiniteGroupoid::set_identity(std::size_t obj, std::size_t mor) { id_[obj] = mor; }
void FiniteGroupoid::set_compose(std::size_t g, std::size_t f, std::size_t gf) {
  comp_[{g, f}] = gf;
}
void FiniteGroupoid::set_inverse(std::size_t f, std::size_t inv) { inv_[f] = inv; }

std::optional<std::size_t> FiniteGroupoid::compose(std::size_t g, std::size_t f) const {
  auto it = comp_.find({g, f});
  if (it == comp_.end()) return std::nullopt;
  return it->second;
}

Report FiniteGroupoid::check(const std::string& target) const {
  Report r;
  std::size_t mark = r.mark(), checked = 0;
  auto fail = [&](const std::string& w) { r.fail("groupoid", target, w); };
  for (std::size_t o = 0; o < objects_; ++o)
    if (src_[id_[o]] != o || tgt_[id_[o]] != o) fail("identity of object " + std::to_string(o));
  std::size_t n = src_.size();
  for (std::size_t f = 0; f < n; ++f) {
    ++checked;
    if (compose(id_[tgt_[f]], f) != f || compose(f, id_[src_[f]]) != f)
      fail("unit law at morphism " + std::to_string(f));
    std::size_t i = inv_[f];
    if (compose(i, f) != id_[src_[f]] || compose(f, i) != id_[tgt_[f]])
      fail("inverse of morphism " + std::to_string(f));
    for (std::size_t g = 0; g < n; ++g) {
      if (src_[g] != tgt_[f]) continue;
      auto gf = compose(g, f);
      if (!gf || src_[*gf] != src_[f] || tgt_[*gf] != tgt_[g]) {
        fail("composite " + std::to_string(g) + "." + std::to_string(f));
        continue;
      }
      for (std::size_t h = 0; h < n; ++h) {
        if (src_[h] != tgt_[g]) continue;
        ++checked;
        auto hg = compose(h, g);
        if (!hg || compose(h, *gf) != compose(*hg, f))
          fail("associativity " + std::to_string(h) + "." + std::to_string(g) + "." +
               std::to_string(f));
      }
    }
  }
  r.close(mark, "groupoid", target, checked);
  return r;
}

}  // namespace lqft
