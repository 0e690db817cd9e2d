#include "lqft/pseudo_operad.hpp"

#include <algorithm>
#include <numeric>

#include "lqft/error.hpp"

namespace lqft {

namespace {

using Ids = std::vector<std::size_t>;

// Cartesian product over choice lists; f returns false to stop.
bool for_each_product(const std::vector<const Ids*>& choices,
                      const std::function<bool(const Ids&)>& f) {
  std::size_t n = choices.size();
  for (const Ids* c : choices)
    if (c->empty()) return true;
  Ids pos(n, 0), cur(n);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) cur[i] = (*choices[i])[pos[i]];
    if (!f(cur)) return false;
    std::size_t i = 0;
    while (i < n && ++pos[i] == choices[i]->size()) pos[i++] = 0;
    if (i == n) return true;
  }
}

// Splits a flat tuple into consecutive blocks of the given sizes.
std::vector<Ids> blocks_of(const Ids& flat, const Ids& sizes) {
  std::vector<Ids> out;
  std::size_t at = 0;
  for (std::size_t k : sizes) {
    out.emplace_back(flat.begin() + at, flat.begin() + at + k);
    at += k;
  }
  return out;
}

Ids concat(const std::vector<Ids>& parts) {
  Ids out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// Counts visits against a cap shared by one law.
struct Budget {
  std::size_t cap;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  // Tuples handed to a law, including those it found not applicable.
  std::size_t visited = 0;
  bool spent() const { return checked + skipped >= cap || visited >= 8 * cap; }
};

std::string ids_string(const Ids& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

std::size_t lookup(const std::map<std::size_t, std::size_t>& m, std::size_t k, const char* what) {
  auto it = m.find(k);
  if (it == m.end()) throw Error("IncompleteData", std::string("missing ") + what);
  return it->second;
}

}  // namespace

// Defaults.

bool PseudoOperad::is_globular(std::size_t a) const {
  const CellSig& c = csig(a);
  const OpSig& src = sig(c.from);
  if (c.s.size() != src.inputs.size()) return false;
  for (std::size_t i = 0; i < c.s.size(); ++i)
    if (c.s[i] != vid(src.inputs[i])) return false;
  return c.t == vid(src.output);
}

std::vector<std::size_t> PseudoOperad::input_ids(std::size_t op) const {
  Ids out;
  for (std::size_t c : sig(op).inputs) out.push_back(vid(c));
  return out;
}

bool PseudoOperad::globular_equivalent(std::size_t a, std::size_t b) {
  if (a == b) return true;
  for (std::size_t c = 0; c < num_cells(); ++c) {
    const CellSig& s = csig(c);
    if (s.from == a && s.to == b && is_globular(c)) return true;
  }
  return false;
}

std::optional<Companion> PseudoOperad::companion(std::size_t g) {
  auto [c, c2] = vsig(g);
  std::size_t uc = unit(c), uc2 = unit(c2);
  std::size_t nops = num_ops(), ncells = num_cells();
  for (std::size_t op = 0; op < nops; ++op) {
    if (!(sig(op) == OpSig{{c}, c2})) continue;
    for (std::size_t b1 = 0; b1 < ncells; ++b1) {
      if (!(csig(b1) == CellSig{op, uc2, {g}, vid(c2)})) continue;
      for (std::size_t b2 = 0; b2 < ncells; ++b2) {
        if (!(csig(b2) == CellSig{uc, op, {vid(c)}, g})) continue;
        Companion cand{op, b1, b2};
        if (check_companion(*this, g, cand).ok()) return cand;
      }
    }
  }
  return std::nullopt;
}

Report check_companion(PseudoOperad& p, std::size_t g, const Companion& c) {
  Report r;
  std::string T = "vertical " + p.vmorph_name(g);
  auto [a, b] = p.vsig(g);
  std::size_t ua = p.unit(a), ub = p.unit(b);
  if (!(p.sig(c.op) == OpSig{{a}, b})) {
    r.fail("companion-shape", T, "operation " + p.op_name(c.op) + " has the wrong signature");
    return r;
  }
  if (!(p.csig(c.beta1) == CellSig{c.op, ub, {g}, p.vid(b)}) ||
      !(p.csig(c.beta2) == CellSig{ua, c.op, {p.vid(a)}, g})) {
    r.fail("companion-shape", T, "binding cells have the wrong boundary");
    return r;
  }
  auto v = p.cell_vcompose(c.beta1, c.beta2);
  if (!v || *v != p.unit_cell(g))
    r.fail("companion-identity-1", T, "beta1 . beta2 != u(g)");
  else
    r.pass("companion-identity-1", T, 1);
  auto rr = p.runit(c.op);
  auto ll = p.lunit(c.op);
  auto mid = p.cmp_cells(c.beta1, {c.beta2});
  std::optional<std::size_t> total;
  if (rr && ll && mid) {
    auto step = p.cell_vcompose(*mid, p.cell_inverse(*rr));
    if (step) total = p.cell_vcompose(*ll, *step);
  }
  if (!total)
    r.fail("companion-identity-2", T, "pasting l . (beta1 cmp beta2) . r^-1 undefined");
  else if (*total != p.cell_id(c.op))
    r.fail("companion-identity-2", T,
           "l . (beta1 cmp beta2) . r^-1 = " + p.cell_name(*total) + " != id");
  else
    r.pass("companion-identity-2", T, 1);
  return r;
}

// The checker.

namespace {

struct Indexes {
  std::vector<Ids> ops_into;              // color -> base ops
  std::map<std::size_t, Ids> cells_by_t;  // vertical morphism -> base cells with that t
  std::map<std::size_t, Ids> cells_from;  // op -> base cells out of it
};

Indexes build_indexes(PseudoOperad& p) {
  Indexes ix;
  ix.ops_into.assign(p.num_objects(), {});
  for (std::size_t op = 0; op < p.base_ops(); ++op) ix.ops_into[p.sig(op).output].push_back(op);
  for (std::size_t a = 0; a < p.base_cells(); ++a) {
    ix.cells_by_t[p.csig(a).t].push_back(a);
    ix.cells_from[p.csig(a).from].push_back(a);
  }
  return ix;
}

const Ids kEmpty;

const Ids& at_or_empty(const std::map<std::size_t, Ids>& m, std::size_t k) {
  auto it = m.find(k);
  return it == m.end() ? kEmpty : it->second;
}

// Visits (psi; phis) over base ops with the budget.
void for_each_composable(PseudoOperad& p, const Indexes& ix, Budget& b,
                         const std::function<void(std::size_t, const Ids&)>& f) {
  for (std::size_t psi = 0; psi < p.base_ops() && !b.spent(); ++psi) {
    std::vector<const Ids*> ch;
    for (std::size_t c : p.sig(psi).inputs) ch.push_back(&ix.ops_into[c]);
    for_each_product(ch, [&](const Ids& phis) {
      if (b.spent()) return false;
      ++b.visited;
      f(psi, phis);
      return true;
    });
  }
}

// (alpha; betas) with t(beta_i) = s(alpha)_i over base cells.
void for_each_cell_composable(PseudoOperad& p, const Indexes& ix, Budget& b,
                              const std::function<void(std::size_t, const Ids&)>& f) {
  for (std::size_t a = 0; a < p.base_cells() && !b.spent(); ++a) {
    std::vector<const Ids*> ch;
    for (std::size_t g : p.csig(a).s) ch.push_back(&at_or_empty(ix.cells_by_t, g));
    for_each_product(ch, [&](const Ids& betas) {
      if (b.spent()) return false;
      ++b.visited;
      f(a, betas);
      return true;
    });
  }
}

Ids outs_of(PseudoOperad& p, const Ids& ops) {
  Ids out;
  for (std::size_t op : ops) out.push_back(p.sig(op).output);
  return out;
}

Ids arities_of(PseudoOperad& p, const Ids& ops) {
  Ids out;
  for (std::size_t op : ops) out.push_back(p.arity(op));
  return out;
}

Ids flat_inputs(PseudoOperad& p, const Ids& ops) {
  Ids out;
  for (std::size_t op : ops) out.insert(out.end(), p.sig(op).inputs.begin(), p.sig(op).inputs.end());
  return out;
}

std::optional<Ids> cmp_blocks(PseudoOperad& p, const Ids& phis, const std::vector<Ids>& blocks) {
  Ids out;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    auto c = p.cmp(phis[i], blocks[i]);
    if (!c) return std::nullopt;
    out.push_back(*c);
  }
  return out;
}

std::optional<std::size_t> vc(PseudoOperad& p, std::optional<std::size_t> b,
                              std::optional<std::size_t> a) {
  if (!a || !b) return std::nullopt;
  return p.cell_vcompose(*b, *a);
}

}  // namespace

Report check_pseudo_operad(PseudoOperad& p, const PseudoCheckOptions& opt) {
  Report r;
  const std::string T = "pseudo-operad";
  Indexes ix = build_indexes(p);
  const std::size_t nv = p.num_vmorphs(), nc = p.base_cells();

  // Vertical groupoid.
  {
    std::size_t mark = r.mark();
    Budget b{opt.max_tuples};
    auto fail = [&](const std::string& w) { r.fail("vertical-groupoid", T, w); };
    for (std::size_t c = 0; c < p.num_objects(); ++c)
      if (p.vsig(p.vid(c)) != std::make_pair(c, c)) fail("identity of " + p.object_name(c));
    for (std::size_t g = 0; g < nv; ++g) {
      auto [s, t] = p.vsig(g);
      ++b.checked;
      if (p.vcompose(p.vid(t), g) != g || p.vcompose(g, p.vid(s)) != g)
        fail("unit law at " + p.vmorph_name(g));
      std::size_t inv = p.vinverse(g);
      if (p.vcompose(inv, g) != p.vid(s) || p.vcompose(g, inv) != p.vid(t))
        fail("inverse of " + p.vmorph_name(g));
      for (std::size_t h = 0; h < nv && !b.spent(); ++h) {
        if (p.vsig(h).first != t) continue;
        auto hg = p.vcompose(h, g);
        if (!hg || p.vsig(*hg) != std::make_pair(s, p.vsig(h).second)) {
          fail("composite " + p.vmorph_name(h) + " o " + p.vmorph_name(g));
          continue;
        }
        for (std::size_t k = 0; k < nv && !b.spent(); ++k) {
          if (p.vsig(k).first != p.vsig(h).second) continue;
          ++b.checked;
          auto kh = p.vcompose(k, h);
          if (!kh || p.vcompose(k, *hg) != p.vcompose(*kh, g))
            fail("associativity at " + p.vmorph_name(k) + " o " + p.vmorph_name(h) + " o " +
                 p.vmorph_name(g));
        }
      }
    }
    r.close(mark, "vertical-groupoid", T, b.checked, b.skipped);
  }

  // Cells: boundaries, identities, inverses, vertical composition.
  {
    std::size_t mark = r.mark();
    Budget b{opt.max_tuples};
    auto fail = [&](const std::string& w) { r.fail("cell-groupoid", T, w); };
    for (std::size_t op = 0; op < p.base_ops(); ++op) {
      std::size_t id = p.cell_id(op);
      if (!(p.csig(id) == CellSig{op, op, p.input_ids(op), p.vid(p.sig(op).output)}))
        fail("identity cell of " + p.op_name(op));
    }
    for (std::size_t a = 0; a < nc && !b.spent(); ++a) {
      const CellSig sa = p.csig(a);
      ++b.checked;
      const OpSig& f = p.sig(sa.from);
      const OpSig& t = p.sig(sa.to);
      bool shape = sa.s.size() == f.inputs.size() && f.inputs.size() == t.inputs.size() &&
                   p.vsig(sa.t) == std::make_pair(f.output, t.output);
      for (std::size_t i = 0; shape && i < sa.s.size(); ++i)
        shape = p.vsig(sa.s[i]) == std::make_pair(f.inputs[i], t.inputs[i]);
      if (!shape) {
        fail("boundary of " + p.cell_name(a) + " does not match its operations");
        continue;
      }
      if (p.cell_vcompose(p.cell_id(sa.to), a) != a || p.cell_vcompose(a, p.cell_id(sa.from)) != a)
        fail("unit law at " + p.cell_name(a));
      std::size_t inv = p.cell_inverse(a);
      if (p.cell_vcompose(inv, a) != p.cell_id(sa.from) ||
          p.cell_vcompose(a, inv) != p.cell_id(sa.to))
        fail("inverse of " + p.cell_name(a));
      for (std::size_t bb : at_or_empty(ix.cells_from, sa.to)) {
        if (b.spent()) break;
        ++b.checked;
        const CellSig sb = p.csig(bb);
        auto ba = p.cell_vcompose(bb, a);
        if (!ba) {
          fail("vertical composite " + p.cell_name(bb) + " . " + p.cell_name(a) + " undefined");
          continue;
        }
        CellSig want{sa.from, sb.to, {}, 0};
        bool ok = true;
        for (std::size_t i = 0; i < sa.s.size(); ++i) {
          auto gi = p.vcompose(sb.s[i], sa.s[i]);
          ok = ok && gi;
          want.s.push_back(gi.value_or(0));
        }
        auto gt = p.vcompose(sb.t, sa.t);
        want.t = gt.value_or(0);
        if (!ok || !gt || !(p.csig(*ba) == want))
          fail("boundary of " + p.cell_name(bb) + " . " + p.cell_name(a));
        for (std::size_t cc : at_or_empty(ix.cells_from, sb.to)) {
          if (b.spent()) break;
          ++b.checked;
          auto cb = p.cell_vcompose(cc, bb);
          if (!cb || p.cell_vcompose(cc, *ba) != p.cell_vcompose(*cb, a))
            fail("associativity of vertical composition at " + p.cell_name(a));
        }
      }
    }
    r.close(mark, "cell-groupoid", T, b.checked, b.skipped);
  }

  // Operadic composition of operations.
  {
    std::size_t mark = r.mark();
    Budget b{opt.max_tuples};
    for_each_composable(p, ix, b, [&](std::size_t psi, const Ids& phis) {
      auto c = p.cmp(psi, phis);
      if (!c) {
        ++b.skipped;
        return;
      }
      ++b.checked;
      if (!(p.sig(*c) == OpSig{flat_inputs(p, phis), p.sig(psi).output}))
        r.fail("composition", T, "signature of " + p.op_name(psi) + " o " + ids_string(phis));
    });
    r.close(mark, "composition", T, b.checked, b.skipped);
  }

  // Composition of cells: boundaries, identities, interchange.
  {
    std::size_t mark = r.mark();
    Budget b{opt.max_tuples};
    auto fail = [&](const std::string& w) { r.fail("cell-composition", T, w); };
    for_each_composable(p, ix, b, [&](std::size_t psi, const Ids& phis) {
      auto c = p.cmp(psi, phis);
      if (!c) return;
      Ids ids;
      for (std::size_t f : phis) ids.push_back(p.cell_id(f));
      ++b.checked;
      if (p.cmp_cells(p.cell_id(psi), ids) != p.cell_id(*c))
        fail("id cmp id != id at " + p.op_name(psi) + " o " + ids_string(phis));
    });
    Budget b2{opt.max_tuples};
    for_each_cell_composable(p, ix, b2, [&](std::size_t a, const Ids& betas) {
      auto c = p.cmp_cells(a, betas);
      const CellSig sa = p.csig(a);
      Ids froms, tos;
      std::vector<Ids> ss;
      for (std::size_t x : betas) {
        froms.push_back(p.csig(x).from);
        tos.push_back(p.csig(x).to);
        ss.push_back(p.csig(x).s);
      }
      auto from = p.cmp(sa.from, froms);
      auto to = p.cmp(sa.to, tos);
      if (!c || !from || !to) {
        ++b2.skipped;
        return;
      }
      ++b2.checked;
      if (!(p.csig(*c) == CellSig{*from, *to, concat(ss), sa.t}))
        fail("boundary of " + p.cell_name(a) + " cmp " + ids_string(betas));
      // Interchange with every vertically composable follow-up.
      for (std::size_t a2 : at_or_empty(ix.cells_from, sa.to)) {
        std::vector<const Ids*> ch;
        Ids need = p.csig(a2).s;
        std::vector<Ids> cand(betas.size());
        for (std::size_t i = 0; i < betas.size(); ++i) {
          for (std::size_t x : at_or_empty(ix.cells_from, p.csig(betas[i]).to))
            if (p.csig(x).t == need[i]) cand[i].push_back(x);
          ch.push_back(&cand[i]);
        }
        for_each_product(ch, [&](const Ids& betas2) {
          if (b2.spent()) return false;
          Ids vb;
          for (std::size_t i = 0; i < betas.size(); ++i) {
            auto v = p.cell_vcompose(betas2[i], betas[i]);
            if (!v) {
              ++b2.skipped;
              return true;
            }
            vb.push_back(*v);
          }
          auto va = p.cell_vcompose(a2, a);
          if (!va) {
            ++b2.skipped;
            return true;
          }
          auto lhs = p.cmp_cells(*va, vb);
          auto rhs = vc(p, p.cmp_cells(a2, betas2), c);
          if (!lhs || !rhs) {
            ++b2.skipped;
            return true;
          }
          ++b2.checked;
          if (*lhs != *rhs)
            fail("interchange at " + p.cell_name(a2) + " . " + p.cell_name(a) + " over " +
                 ids_string(betas));
          return true;
        });
      }
    });
    r.close(mark, "cell-composition", T, b.checked + b2.checked, b.skipped + b2.skipped);
  }

  // Units.
  {
    std::size_t mark = r.mark();
    std::size_t checked = 0;
    auto fail = [&](const std::string& w) { r.fail("units", T, w); };
    for (std::size_t c = 0; c < p.num_objects(); ++c) {
      ++checked;
      if (!(p.sig(p.unit(c)) == OpSig{{c}, c})) fail("signature of u(" + p.object_name(c) + ")");
      if (p.unit_cell(p.vid(c)) != p.cell_id(p.unit(c)))
        fail("u(id) != id at " + p.object_name(c));
    }
    for (std::size_t g = 0; g < nv; ++g) {
      ++checked;
      auto [s, t] = p.vsig(g);
      std::size_t ug = p.unit_cell(g);
      if (!(p.csig(ug) == CellSig{p.unit(s), p.unit(t), {g}, g}))
        fail("boundary of u(" + p.vmorph_name(g) + ")");
      for (std::size_t h = 0; h < nv; ++h) {
        if (p.vsig(h).first != t) continue;
        auto hg = p.vcompose(h, g);
        if (!hg) continue;
        ++checked;
        if (p.cell_vcompose(p.unit_cell(h), ug) != p.unit_cell(*hg))
          fail("u(h o g) != u(h) . u(g) at " + p.vmorph_name(h) + ", " + p.vmorph_name(g));
      }
    }
    r.close(mark, "units", T, checked);
  }

  // Permutation actions on operations and cells.
  {
    std::size_t mark = r.mark();
    Budget b{opt.max_tuples};
    auto fail = [&](const std::string& w) { r.fail("permutation", T, w); };
    for (std::size_t op = 0; op < p.base_ops() && !b.spent(); ++op) {
      std::size_t n = p.arity(op);
      if (n < 2 || n > opt.max_perm_arity) continue;
      auto perms = all_perms(n);
      for (const Perm& s : perms) {
        auto ps = p.permute(op, s);
        if (!ps) {
          ++b.skipped;
          continue;
        }
        ++b.checked;
        if (!(p.sig(*ps) == OpSig{permute_tuple(p.sig(op).inputs, s), p.sig(op).output}))
          fail("signature of " + p.op_name(op) + perm_string(s));
        if (is_identity(s) && *ps != op) fail(p.op_name(op) + " moved by the identity");
        for (const Perm& t : perms) {
          auto lhs = p.permute(*ps, t);
          auto rhs = p.permute(op, compose_perm(s, t));
          if (lhs && rhs && *lhs != *rhs)
            fail("action law at " + p.op_name(op) + perm_string(s) + perm_string(t));
        }
        if (p.permute_cell(p.cell_id(op), s) != p.cell_id(*ps))
          fail("id" + perm_string(s) + " != id at " + p.op_name(op));
      }
    }
    for (std::size_t a = 0; a < nc && !b.spent(); ++a) {
      const CellSig sa = p.csig(a);
      std::size_t n = sa.s.size();
      if (n < 2 || n > opt.max_perm_arity) continue;
      for (const Perm& s : all_perms(n)) {
        auto pa = p.permute_cell(a, s);
        auto pf = p.permute(sa.from, s);
        auto pt = p.permute(sa.to, s);
        if (!pa || !pf || !pt) {
          ++b.skipped;
          continue;
        }
        ++b.checked;
        if (!(p.csig(*pa) == CellSig{*pf, *pt, permute_tuple(sa.s, s), sa.t}))
          fail("boundary of " + p.cell_name(a) + perm_string(s));
        for (std::size_t a2 : at_or_empty(ix.cells_from, sa.to)) {
          auto v = p.cell_vcompose(a2, a);
          if (!v) continue;
          auto lhs = p.permute_cell(*v, s);
          auto rhs = vc(p, p.permute_cell(a2, s), pa);
          if (lhs && rhs && *lhs != *rhs)
            fail("action not functorial at " + p.cell_name(a2) + " . " + p.cell_name(a));
        }
      }
    }
    r.close(mark, "permutation", T, b.checked, b.skipped);
  }

  // Strict equivariance of cmp.
  {
    std::size_t mark = r.mark();
    Budget b{opt.max_tuples};
    auto fail = [&](const std::string& w) { r.fail("equivariance", T, w); };
    for_each_composable(p, ix, b, [&](std::size_t psi, const Ids& phis) {
      std::size_t n = phis.size();
      auto c = p.cmp(psi, phis);
      if (!c) return;
      Ids ks = arities_of(p, phis);
      if (n >= 2 && n <= opt.max_perm_arity)
        for (const Perm& s : all_perms(n)) {
          auto ps = p.permute(psi, s);
          std::optional<std::size_t> lhs;
          if (ps) lhs = p.cmp(*ps, permute_tuple(phis, s));
          auto rhs = p.permute(*c, block_permutation(s, ks));
          if (!lhs || !rhs) {
            ++b.skipped;
            continue;
          }
          ++b.checked;
          if (*lhs != *rhs)
            fail("block: " + p.op_name(psi) + perm_string(s) + " o " + ids_string(phis));
        }
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t k = ks[i];
        if (k < 2 || k > opt.max_perm_arity) continue;
        for (const Perm& s : all_perms(k)) {
          auto pi = p.permute(phis[i], s);
          if (!pi) continue;
          Ids q = phis;
          q[i] = *pi;
          std::vector<Perm> sums;
          for (std::size_t j = 0; j < n; ++j) sums.push_back(j == i ? s : identity_perm(ks[j]));
          auto lhs = p.cmp(psi, q);
          auto rhs = p.permute(*c, sum_permutation(sums));
          if (!lhs || !rhs) {
            ++b.skipped;
            continue;
          }
          ++b.checked;
          if (*lhs != *rhs)
            fail("sum: " + p.op_name(psi) + " o " + ids_string(phis) + " at input " +
                 std::to_string(i) + perm_string(s));
        }
      }
    });
    Budget b2{opt.max_tuples};
    for_each_cell_composable(p, ix, b2, [&](std::size_t a, const Ids& betas) {
      std::size_t n = betas.size();
      if (n < 2 || n > opt.max_perm_arity) return;
      auto c = p.cmp_cells(a, betas);
      if (!c) return;
      Ids ks;
      for (std::size_t x : betas) ks.push_back(p.csig(x).s.size());
      for (const Perm& s : all_perms(n)) {
        auto pa = p.permute_cell(a, s);
        std::optional<std::size_t> lhs;
        if (pa) lhs = p.cmp_cells(*pa, permute_tuple(betas, s));
        auto rhs = p.permute_cell(*c, block_permutation(s, ks));
        if (!lhs || !rhs) {
          ++b2.skipped;
          continue;
        }
        ++b2.checked;
        if (*lhs != *rhs)
          fail("cells: " + p.cell_name(a) + perm_string(s) + " cmp " + ids_string(betas));
      }
    });
    r.close(mark, "equivariance", T, b.checked + b2.checked, b.skipped + b2.skipped);
  }

  // Coherence cells: globular, correct ends, natural.
  {
    std::size_t mark = r.mark();
    Budget b{opt.max_tuples};
    auto fail = [&](const std::string& w) { r.fail("coherence", T, w); };
    for (std::size_t psi = 0; psi < p.base_ops(); ++psi) {
      const OpSig s = p.sig(psi);
      Ids us;
      for (std::size_t c : s.inputs) us.push_back(p.unit(c));
      auto l = p.lunit(psi);
      auto rr = p.runit(psi);
      auto lf = p.cmp(p.unit(s.output), {psi});
      auto rf = p.cmp(psi, us);
      // Composites outside the fragment leave nothing to check.
      if (lf) {
        ++b.checked;
        if (!l || !(p.csig(*l).from == *lf && p.csig(*l).to == psi) || !p.is_globular(*l))
          fail("left unitor at " + p.op_name(psi));
      } else {
        ++b.skipped;
      }
      if (rf) {
        ++b.checked;
        if (!rr || !(p.csig(*rr).from == *rf && p.csig(*rr).to == psi) || !p.is_globular(*rr))
          fail("right unitor at " + p.op_name(psi));
      } else {
        ++b.skipped;
      }
    }
    for (std::size_t a = 0; a < nc && !b.spent(); ++a) {
      const CellSig sa = p.csig(a);
      ++b.checked;
      // l(psi') . (u(t) cmp alpha) = alpha . l(psi)
      auto lhs = vc(p, p.lunit(sa.to), p.cmp_cells(p.unit_cell(sa.t), {a}));
      auto rhs = vc(p, a, p.lunit(sa.from));
      if (lhs && rhs && *lhs != *rhs) fail("left unitor not natural at " + p.cell_name(a));
      Ids us;
      for (std::size_t g : sa.s) us.push_back(p.unit_cell(g));
      lhs = vc(p, p.runit(sa.to), p.cmp_cells(a, us));
      rhs = vc(p, a, p.runit(sa.from));
      if (lhs && rhs && *lhs != *rhs) fail("right unitor not natural at " + p.cell_name(a));
    }
    Budget b2{opt.max_tuples};
    for_each_composable(p, ix, b2, [&](std::size_t psi, const Ids& phis) {
      auto pp = p.cmp(psi, phis);
      if (!pp) return;
      std::vector<const Ids*> ch;
      Ids flat = flat_inputs(p, phis);
      for (std::size_t c : flat) ch.push_back(&ix.ops_into[c]);
      for_each_product(ch, [&](const Ids& chis) {
        if (b2.spent()) return false;
        auto a = p.assoc(psi, phis, chis);
        auto from = p.cmp(*pp, chis);
        auto inner = cmp_blocks(p, phis, blocks_of(chis, arities_of(p, phis)));
        std::optional<std::size_t> to;
        if (inner) to = p.cmp(psi, *inner);
        if (!a || !from || !to) {
          ++b2.skipped;
          return true;
        }
        ++b2.checked;
        if (p.csig(*a).from != *from || p.csig(*a).to != *to || !p.is_globular(*a))
          fail("associator at " + p.op_name(psi) + ", " + ids_string(phis) + ", " +
               ids_string(chis));
        return true;
      });
    });
    // Naturality of a in all three arguments, through identity-padded cells.
    Budget b3{opt.max_tuples};
    for_each_cell_composable(p, ix, b3, [&](std::size_t alpha, const Ids& betas) {
      const CellSig sa = p.csig(alpha);
      Ids phis, phis2;
      for (std::size_t x : betas) {
        phis.push_back(p.csig(x).from);
        phis2.push_back(p.csig(x).to);
      }
      Ids flat_s;
      for (std::size_t x : betas) flat_s.insert(flat_s.end(), p.csig(x).s.begin(), p.csig(x).s.end());
      std::vector<const Ids*> ch;
      std::vector<Ids> cand(flat_s.size());
      for (std::size_t j = 0; j < flat_s.size(); ++j) {
        cand[j] = at_or_empty(ix.cells_by_t, flat_s[j]);
        ch.push_back(&cand[j]);
      }
      for_each_product(ch, [&](const Ids& gammas) {
        if (b3.spent()) return false;
        Ids chis, chis2;
        for (std::size_t x : gammas) {
          chis.push_back(p.csig(x).from);
          chis2.push_back(p.csig(x).to);
        }
        auto a1 = p.assoc(sa.from, phis, chis);
        auto a2 = p.assoc(sa.to, phis2, chis2);
        auto ab = p.cmp_cells(alpha, betas);
        std::optional<std::size_t> left;
        if (ab) left = p.cmp_cells(*ab, gammas);
        std::optional<Ids> inner = Ids{};
        std::size_t at = 0;
        for (std::size_t x : betas) {
          std::size_t k = p.csig(x).s.size();
          Ids blk(gammas.begin() + at, gammas.begin() + at + k);
          at += k;
          auto bc = p.cmp_cells(x, blk);
          if (!bc) {
            inner.reset();
            break;
          }
          inner->push_back(*bc);
        }
        std::optional<std::size_t> right;
        if (inner) right = p.cmp_cells(alpha, *inner);
        auto lhs = vc(p, a2, left);
        auto rhs = vc(p, right, a1);
        if (!lhs || !rhs) {
          ++b3.skipped;
          return true;
        }
        ++b3.checked;
        if (*lhs != *rhs) fail("associator not natural at " + p.cell_name(alpha));
        return true;
      });
    });
    r.close(mark, "coherence", T, b.checked + b2.checked + b3.checked,
            b.skipped + b2.skipped + b3.skipped);
  }

  // Pentagon.
  {
    std::size_t mark = r.mark();
    Budget b{opt.max_tuples};
    for_each_composable(p, ix, b, [&](std::size_t psi, const Ids& phis) {
      if (!p.cmp(psi, phis)) return;
      Ids f1 = flat_inputs(p, phis);
      std::vector<const Ids*> ch1;
      for (std::size_t c : f1) ch1.push_back(&ix.ops_into[c]);
      for_each_product(ch1, [&](const Ids& chis) {
        if (b.spent()) return false;
        Ids f2 = flat_inputs(p, chis);
        std::vector<const Ids*> ch2;
        for (std::size_t c : f2) ch2.push_back(&ix.ops_into[c]);
        return for_each_product(ch2, [&](const Ids& omegas) {
          if (b.spent()) return false;
          auto holds = pentagon_holds(p, psi, phis, chis, omegas);
          if (!holds) {
            ++b.skipped;
            return true;
          }
          ++b.checked;
          if (!*holds)
            r.fail("pentagon", T,
                   "at " + p.op_name(psi) + ", " + ids_string(phis) + ", " + ids_string(chis) +
                       ", " + ids_string(omegas));
          return true;
        });
      });
    });
    r.close(mark, "pentagon", T, b.checked, b.skipped);
  }

  // Triangles.
  {
    std::size_t mark = r.mark();
    Budget b{opt.max_tuples};
    static const char* const kWhich[3] = {"right/left", "left", "right"};
    for_each_composable(p, ix, b, [&](std::size_t psi, const Ids& phis) {
      if (!p.cmp(psi, phis)) return;
      auto t = triangles_hold(p, psi, phis);
      for (std::size_t k = 0; k < 3; ++k) {
        if (!t[k]) {
          ++b.skipped;
          continue;
        }
        ++b.checked;
        if (!*t[k])
          r.fail("triangle", T,
                 std::string(kWhich[k]) + " at " + p.op_name(psi) + " o " + ids_string(phis));
      }
    });
    r.close(mark, "triangle", T, b.checked, b.skipped);
  }
  return r;
}

std::optional<bool> pentagon_holds(PseudoOperad& p, std::size_t psi, const Ids& phis,
                                   const Ids& chis, const Ids& omegas) {
  auto psiphi = p.cmp(psi, phis);
  if (!psiphi) return std::nullopt;
  Ids kphi = arities_of(p, phis), kchi = arities_of(p, chis);
  std::vector<Ids> chi_blocks = blocks_of(chis, kphi);
  std::vector<Ids> om_by_chi = blocks_of(omegas, kchi);
  auto chiom = cmp_blocks(p, chis, om_by_chi);
  auto phichi = cmp_blocks(p, phis, chi_blocks);
  if (!chiom || !phichi) return std::nullopt;
  // Omegas grouped by phi block.
  std::vector<Ids> om_by_phi;
  std::size_t at = 0;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    std::size_t cnt = 0;
    for (std::size_t x : chi_blocks[i]) cnt += p.arity(x);
    om_by_phi.emplace_back(omegas.begin() + at, omegas.begin() + at + cnt);
    at += cnt;
  }
  auto l1 = p.assoc(*psiphi, chis, omegas);
  auto l2 = p.assoc(psi, phis, *chiom);
  auto lhs = vc(p, l2, l1);
  auto apc = p.assoc(psi, phis, chis);
  Ids idw;
  for (std::size_t w : omegas) idw.push_back(p.cell_id(w));
  std::optional<std::size_t> r1;
  if (apc) r1 = p.cmp_cells(*apc, idw);
  auto r2 = p.assoc(psi, *phichi, omegas);
  Ids inner;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    auto ai = p.assoc(phis[i], chi_blocks[i], om_by_phi[i]);
    if (!ai) return std::nullopt;
    inner.push_back(*ai);
  }
  auto r3 = p.cmp_cells(p.cell_id(psi), inner);
  auto rhs = vc(p, r3, vc(p, r2, r1));
  if (!lhs || !rhs) return std::nullopt;
  return *lhs == *rhs;
}

std::array<std::optional<bool>, 3> triangles_hold(PseudoOperad& p, std::size_t psi,
                                                  const Ids& phis) {
  std::array<std::optional<bool>, 3> out;
  auto pp = p.cmp(psi, phis);
  if (!pp) return out;
  Ids us, idphi, lphi, rphi, uflat;
  for (std::size_t c : p.sig(psi).inputs) us.push_back(p.unit(c));
  for (std::size_t f : phis) {
    idphi.push_back(p.cell_id(f));
    auto l = p.lunit(f);
    auto rr = p.runit(f);
    if (!l || !rr) return out;
    lphi.push_back(*l);
    rphi.push_back(*rr);
  }
  for (std::size_t c : flat_inputs(p, phis)) uflat.push_back(p.unit(c));
  // r_psi cmp id = (id_psi cmp l_phi) . a_{psi,u,phi}
  auto rp = p.runit(psi);
  std::optional<std::size_t> lhs;
  if (rp) lhs = p.cmp_cells(*rp, idphi);
  auto rhs = vc(p, p.cmp_cells(p.cell_id(psi), lphi), p.assoc(psi, us, phis));
  if (lhs && rhs) out[0] = *lhs == *rhs;
  // l_{psi phi} . a_{u,psi,phi} = l_psi cmp id
  auto lp = p.lunit(psi);
  lhs = vc(p, p.lunit(*pp), p.assoc(p.unit(p.sig(psi).output), {psi}, phis));
  rhs.reset();
  if (lp) rhs = p.cmp_cells(*lp, idphi);
  if (lhs && rhs) out[1] = *lhs == *rhs;
  // (id_psi cmp r_phi) . a_{psi,phi,u} = r_{psi phi}
  lhs = vc(p, p.cmp_cells(p.cell_id(psi), rphi), p.assoc(psi, phis, uflat));
  rhs = p.runit(*pp);
  if (lhs && rhs) out[2] = *lhs == *rhs;
  return out;
}

// Explicit tables.

std::size_t ExplicitPseudoOperad::add_object(std::string name) {
  objects_.push_back(std::move(name));
  vid_.push_back(0);
  return objects_.size() - 1;
}

std::size_t ExplicitPseudoOperad::add_vmorph(std::string name, std::size_t src, std::size_t tgt) {
  vmorphs_.push_back(std::move(name));
  vsig_.emplace_back(src, tgt);
  vinv_.push_back(vmorphs_.size() - 1);
  return vmorphs_.size() - 1;
}

std::size_t ExplicitPseudoOperad::add_op(std::string name, OpSig s) {
  op_names_.push_back(std::move(name));
  ops_.push_back(std::move(s));
  return ops_.size() - 1;
}

std::size_t ExplicitPseudoOperad::add_cell(std::string name, CellSig s) {
  cell_names_.push_back(std::move(name));
  cells_.push_back(std::move(s));
  return cells_.size() - 1;
}

void ExplicitPseudoOperad::set_cmp(std::size_t psi, const std::vector<std::size_t>& phis,
                                   std::size_t r) {
  Ids k{psi};
  k.insert(k.end(), phis.begin(), phis.end());
  cmp_[k] = r;
}

void ExplicitPseudoOperad::set_cmp_cells(std::size_t alpha, const std::vector<std::size_t>& betas,
                                         std::size_t r) {
  Ids k{alpha};
  k.insert(k.end(), betas.begin(), betas.end());
  cmp_cells_[k] = r;
}

void ExplicitPseudoOperad::set_assoc(std::size_t psi, const std::vector<std::size_t>& phis,
                                     const std::vector<std::size_t>& chis, std::size_t r) {
  Ids k{psi, phis.size()};
  k.insert(k.end(), phis.begin(), phis.end());
  k.insert(k.end(), chis.begin(), chis.end());
  assoc_[k] = r;
}

namespace {
template <class V>
std::optional<std::size_t> find_name(const V& names, const std::string& n) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == n) return i;
  return std::nullopt;
}
template <class M, class K>
std::optional<std::size_t> get(const M& m, const K& k) {
  auto it = m.find(k);
  if (it == m.end()) return std::nullopt;
  return it->second;
}
}  // namespace

std::optional<std::size_t> ExplicitPseudoOperad::find_object(const std::string& n) const {
  return find_name(objects_, n);
}
std::optional<std::size_t> ExplicitPseudoOperad::find_vmorph(const std::string& n) const {
  return find_name(vmorphs_, n);
}
std::optional<std::size_t> ExplicitPseudoOperad::find_op(const std::string& n) const {
  return find_name(op_names_, n);
}
std::optional<std::size_t> ExplicitPseudoOperad::find_cell(const std::string& n) const {
  return find_name(cell_names_, n);
}

std::optional<std::size_t> ExplicitPseudoOperad::vcompose(std::size_t g2, std::size_t g1) const {
  return get(vcomp_, std::make_pair(g2, g1));
}
std::optional<std::size_t> ExplicitPseudoOperad::cell_vcompose(std::size_t b, std::size_t a) {
  return get(cvcomp_, std::make_pair(b, a));
}
std::optional<std::size_t> ExplicitPseudoOperad::cmp(std::size_t psi,
                                                     const std::vector<std::size_t>& phis) {
  Ids k{psi};
  k.insert(k.end(), phis.begin(), phis.end());
  return get(cmp_, k);
}
std::optional<std::size_t> ExplicitPseudoOperad::cmp_cells(std::size_t alpha,
                                                           const std::vector<std::size_t>& betas) {
  Ids k{alpha};
  k.insert(k.end(), betas.begin(), betas.end());
  return get(cmp_cells_, k);
}
std::optional<std::size_t> ExplicitPseudoOperad::permute(std::size_t op, const Perm& s) {
  if (is_identity(s) && s.size() == arity(op)) return op;
  return get(perm_, std::make_pair(op, s));
}
std::optional<std::size_t> ExplicitPseudoOperad::permute_cell(std::size_t a, const Perm& s) {
  if (is_identity(s) && s.size() == cells_[a].s.size()) return a;
  return get(cperm_, std::make_pair(a, s));
}
std::optional<std::size_t> ExplicitPseudoOperad::assoc(std::size_t psi,
                                                       const std::vector<std::size_t>& phis,
                                                       const std::vector<std::size_t>& chis) {
  Ids k{psi, phis.size()};
  k.insert(k.end(), phis.begin(), phis.end());
  k.insert(k.end(), chis.begin(), chis.end());
  return get(assoc_, k);
}
std::optional<std::size_t> ExplicitPseudoOperad::lunit(std::size_t psi) { return get(lunit_, psi); }
std::optional<std::size_t> ExplicitPseudoOperad::runit(std::size_t psi) { return get(runit_, psi); }

ExplicitPseudoOperad materialize_pseudo(PseudoOperad& p, const PseudoCheckOptions& opt) {
  ExplicitPseudoOperad e;
  const std::size_t nb = p.base_ops(), nc = p.base_cells();
  auto in_ops = [&](std::optional<std::size_t> x) { return x && *x < nb; };
  auto in_cells = [&](std::optional<std::size_t> x) { return x && *x < nc; };
  for (std::size_t c = 0; c < p.num_objects(); ++c) e.add_object(p.object_name(c));
  for (std::size_t g = 0; g < p.num_vmorphs(); ++g)
    e.add_vmorph(p.vmorph_name(g), p.vsig(g).first, p.vsig(g).second);
  for (std::size_t c = 0; c < p.num_objects(); ++c) e.set_vid(c, p.vid(c));
  for (std::size_t g = 0; g < p.num_vmorphs(); ++g) {
    e.set_vinverse(g, p.vinverse(g));
    for (std::size_t h = 0; h < p.num_vmorphs(); ++h)
      if (p.vsig(h).first == p.vsig(g).second)
        if (auto x = p.vcompose(h, g)) e.set_vcompose(h, g, *x);
  }
  for (std::size_t op = 0; op < nb; ++op) e.add_op(p.op_name(op), p.sig(op));
  for (std::size_t a = 0; a < nc; ++a) e.add_cell(p.cell_name(a), p.csig(a));
  for (std::size_t c = 0; c < p.num_objects(); ++c) {
    std::size_t u = p.unit(c);
    if (u >= nb) throw Error("IncompleteData", "unit outside the base fragment");
    e.set_unit(c, u);
  }
  for (std::size_t g = 0; g < p.num_vmorphs(); ++g) {
    std::size_t u = p.unit_cell(g);
    if (u >= nc) throw Error("IncompleteData", "unit cell outside the base fragment");
    e.set_unit_cell(g, u);
  }
  for (std::size_t op = 0; op < nb; ++op) {
    std::size_t id = p.cell_id(op);
    if (id >= nc) throw Error("IncompleteData", "identity cell outside the base fragment");
    e.set_cell_id(op, id);
    if (auto l = p.lunit(op); in_cells(l)) e.set_lunit(op, *l);
    if (auto r = p.runit(op); in_cells(r)) e.set_runit(op, *r);
    std::size_t n = p.arity(op);
    if (n >= 2 && n <= opt.max_perm_arity)
      for (const Perm& s : all_perms(n))
        if (auto x = p.permute(op, s); in_ops(x)) e.set_permute(op, s, *x);
  }
  Indexes ix = build_indexes(p);
  for (std::size_t a = 0; a < nc; ++a) {
    std::size_t inv = p.cell_inverse(a);
    if (inv >= nc) throw Error("IncompleteData", "inverse cell outside the base fragment");
    e.set_cell_inverse(a, inv);
    for (std::size_t b : at_or_empty(ix.cells_from, p.csig(a).to))
      if (auto x = p.cell_vcompose(b, a); in_cells(x)) e.set_cell_vcompose(b, a, *x);
    std::size_t n = p.csig(a).s.size();
    if (n >= 2 && n <= opt.max_perm_arity)
      for (const Perm& s : all_perms(n))
        if (auto x = p.permute_cell(a, s); in_cells(x)) e.set_permute_cell(a, s, *x);
  }
  Budget b{opt.max_tuples};
  for_each_composable(p, ix, b, [&](std::size_t psi, const Ids& phis) {
    auto c = p.cmp(psi, phis);
    if (!in_ops(c)) return;
    e.set_cmp(psi, phis, *c);
    std::vector<const Ids*> ch;
    for (std::size_t col : flat_inputs(p, phis)) ch.push_back(&ix.ops_into[col]);
    for_each_product(ch, [&](const Ids& chis) {
      if (b.spent()) return false;
      ++b.checked;
      if (auto a = p.assoc(psi, phis, chis); in_cells(a)) e.set_assoc(psi, phis, chis, *a);
      return true;
    });
  });
  Budget b2{opt.max_tuples};
  for_each_cell_composable(p, ix, b2, [&](std::size_t a, const Ids& betas) {
    ++b2.checked;
    if (auto c = p.cmp_cells(a, betas); in_cells(c)) e.set_cmp_cells(a, betas, *c);
  });
  return e;
}

// iota(O).

IotaPseudoOperad::IotaPseudoOperad(const Operad& o, bool validate) : o_(o) {
  if (validate && !check_operad_axioms(o).ok())
    throw Error("InvalidOperad", "iota needs an operad that passes its axioms");
  for (std::size_t u = 0; u < o.num_ops(); ++u) {
    if (o.arity(u) != 1) continue;
    std::size_t c = o.sig(u).inputs[0], c2 = o.sig(u).output;
    for (std::size_t v : o.ops_with(OpSig{{c2}, c}))
      if (o.compose(u, {v}) == o.unit(c2) && o.compose(v, {u}) == o.unit(c)) {
        vmorph_of_[u] = vops_.size();
        vops_.push_back(u);
        break;
      }
  }
  for (std::size_t g = 0; g < vops_.size(); ++g) {
    std::size_t u = vops_[g];
    std::size_t c = o.sig(u).inputs[0], c2 = o.sig(u).output;
    for (std::size_t v : o.ops_with(OpSig{{c2}, c}))
      if (o.compose(u, {v}) == o.unit(c2)) {
        vinv_.push_back(vmorph_of_.at(v));
        break;
      }
  }
  for (std::size_t c = 0; c < o.num_colors(); ++c)
    if (!vmorph_of(o.unit(c))) throw Error("InvalidOperad", "unit is not invertible");
  // Every cell with every boundary, in (psi, boundary) order.
  std::vector<Ids> from_color(o.num_colors());
  for (std::size_t g = 0; g < vops_.size(); ++g) from_color[vsig(g).first].push_back(g);
  for (std::size_t psi = 0; psi < o.num_ops(); ++psi) {
    std::vector<const Ids*> ch;
    for (std::size_t c : o.sig(psi).inputs) ch.push_back(&from_color[c]);
    ch.push_back(&from_color[o.sig(psi).output]);
    for_each_product(ch, [&](const Ids& gh) {
      Ids g(gh.begin(), gh.end() - 1);
      if (!cell(psi, g, gh.back()))
        throw Error("InvalidOperad", "conjugate of " + o.op_name(psi) + " leaves the operad");
      return true;
    });
  }
  base_cells_ = cells_.size();
}

std::optional<std::size_t> IotaPseudoOperad::vmorph_of(std::size_t op) const {
  auto it = vmorph_of_.find(op);
  if (it == vmorph_of_.end()) return std::nullopt;
  return it->second;
}

std::pair<std::size_t, std::size_t> IotaPseudoOperad::vsig(std::size_t g) const {
  const OpSig& s = o_.sig(vops_[g]);
  return {s.inputs[0], s.output};
}

std::optional<std::size_t> IotaPseudoOperad::vcompose(std::size_t g2, std::size_t g1) const {
  if (vsig(g2).first != vsig(g1).second) return std::nullopt;
  auto c = o_.compose(vops_[g2], {vops_[g1]});
  if (!c) return std::nullopt;
  return vmorph_of(*c);
}

std::size_t IotaPseudoOperad::intern(std::size_t psi, const std::vector<std::size_t>& g,
                                     std::size_t h, std::size_t to) {
  Ids key{psi, h};
  key.insert(key.end(), g.begin(), g.end());
  auto [it, fresh] = cell_index_.emplace(key, cells_.size());
  if (fresh) cells_.push_back(CellSig{psi, to, g, h});
  return it->second;
}

std::optional<std::size_t> IotaPseudoOperad::cell(std::size_t psi,
                                                  const std::vector<std::size_t>& g,
                                                  std::size_t h) {
  Ids key{psi, h};
  key.insert(key.end(), g.begin(), g.end());
  if (auto it = cell_index_.find(key); it != cell_index_.end()) return it->second;
  const OpSig& s = o_.sig(psi);
  if (g.size() != s.inputs.size() || vsig(h).first != s.output) return std::nullopt;
  Ids inv;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (vsig(g[i]).first != s.inputs[i]) return std::nullopt;
    inv.push_back(vops_[vinv_[g[i]]]);
  }
  auto hp = o_.compose(vops_[h], {psi});
  if (!hp) return std::nullopt;
  auto to = o_.compose(*hp, inv);
  if (!to) return std::nullopt;
  return intern(psi, g, h, *to);
}

std::string IotaPseudoOperad::cell_name(std::size_t a) const {
  const CellSig& c = cells_[a];
  std::string s = "[" + o_.op_name(c.from) + "; ";
  for (std::size_t i = 0; i < c.s.size(); ++i) s += (i ? "," : "") + vmorph_name(c.s[i]);
  return s + "; " + vmorph_name(c.t) + "]";
}

std::size_t IotaPseudoOperad::cell_id(std::size_t op) {
  return *cell(op, input_ids(op), vid(o_.sig(op).output));
}

std::optional<std::size_t> IotaPseudoOperad::cell_vcompose(std::size_t b, std::size_t a) {
  const CellSig sa = cells_[a], sb = cells_[b];
  if (sa.to != sb.from) return std::nullopt;
  Ids g;
  for (std::size_t i = 0; i < sa.s.size(); ++i) {
    auto x = vcompose(sb.s[i], sa.s[i]);
    if (!x) return std::nullopt;
    g.push_back(*x);
  }
  auto h = vcompose(sb.t, sa.t);
  if (!h) return std::nullopt;
  return cell(sa.from, g, *h);
}

std::size_t IotaPseudoOperad::cell_inverse(std::size_t a) {
  const CellSig sa = cells_[a];
  Ids g;
  for (std::size_t x : sa.s) g.push_back(vinv_[x]);
  return *cell(sa.to, g, vinv_[sa.t]);
}

std::optional<std::size_t> IotaPseudoOperad::cmp_cells(std::size_t alpha,
                                                       const std::vector<std::size_t>& betas) {
  const CellSig sa = cells_[alpha];
  if (betas.size() != sa.s.size()) return std::nullopt;
  Ids froms, s;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const CellSig& sb = cells_[betas[i]];
    if (sb.t != sa.s[i]) return std::nullopt;
    froms.push_back(sb.from);
    s.insert(s.end(), sb.s.begin(), sb.s.end());
  }
  auto from = o_.compose(sa.from, froms);
  if (!from) return std::nullopt;
  return cell(*from, s, sa.t);
}

std::size_t IotaPseudoOperad::unit_cell(std::size_t g) {
  return *cell(o_.unit(vsig(g).first), {g}, g);
}

std::optional<std::size_t> IotaPseudoOperad::permute_cell(std::size_t a, const Perm& sigma) {
  const CellSig sa = cells_[a];
  auto f = o_.permute(sa.from, sigma);
  if (!f) return std::nullopt;
  return cell(*f, permute_tuple(sa.s, sigma), sa.t);
}

std::optional<std::size_t> IotaPseudoOperad::assoc(std::size_t psi,
                                                   const std::vector<std::size_t>& phis,
                                                   const std::vector<std::size_t>& chis) {
  auto pp = o_.compose(psi, phis);
  if (!pp) return std::nullopt;
  auto from = o_.compose(*pp, chis);
  if (!from) return std::nullopt;
  return cell_id(*from);
}

std::optional<std::size_t> IotaPseudoOperad::lunit(std::size_t psi) {
  auto from = o_.compose(o_.unit(o_.sig(psi).output), {psi});
  if (!from) return std::nullopt;
  return cell_id(*from);
}

std::optional<std::size_t> IotaPseudoOperad::runit(std::size_t psi) {
  Ids us;
  for (std::size_t c : o_.sig(psi).inputs) us.push_back(o_.unit(c));
  auto from = o_.compose(psi, us);
  if (!from) return std::nullopt;
  return cell_id(*from);
}

std::optional<Companion> IotaPseudoOperad::companion(std::size_t g) {
  auto [c, c2] = vsig(g);
  auto b1 = cell(vops_[g], {g}, vid(c2));
  auto b2 = cell(o_.unit(c), {vid(c)}, g);
  if (!b1 || !b2) return std::nullopt;
  return Companion{vops_[g], *b1, *b2};
}

// Truncation.

std::optional<std::size_t> class_of_op(PseudoOperad& p, const Truncation& t, std::size_t op) {
  if (op < t.class_of.size()) return t.class_of[op];
  for (std::size_t k = 0; k < t.members.size(); ++k) {
    std::size_t rep = t.members[k][0];
    if (p.sig(rep) == p.sig(op) && p.globular_equivalent(op, rep)) return k;
  }
  return std::nullopt;
}

Truncation tau(PseudoOperad& p) {
  Truncation t;
  const std::size_t nb = p.base_ops();
  t.class_of.assign(nb, 0);
  for (std::size_t op = 0; op < nb; ++op) {
    std::optional<std::size_t> k;
    for (std::size_t j = 0; j < t.members.size() && !k; ++j) {
      std::size_t rep = t.members[j][0];
      if (p.sig(rep) == p.sig(op) && p.globular_equivalent(op, rep)) k = j;
    }
    if (!k) {
      k = t.members.size();
      t.members.emplace_back();
    }
    t.members[*k].push_back(op);
    t.class_of[op] = *k;
  }
  TableOperad& o = t.operad;
  for (std::size_t c = 0; c < p.num_objects(); ++c) o.add_color(p.object_name(c));
  for (const auto& m : t.members) {
    std::size_t rep = m[0];
    std::size_t k = o.add_op("[" + p.op_name(rep) + "]", p.sig(rep).inputs, p.sig(rep).output);
    o.set_cauchy(k, p.is_cauchy(rep));
  }
  for (std::size_t c = 0; c < p.num_objects(); ++c) {
    auto k = class_of_op(p, t, p.unit(c));
    if (!k) throw Error("IncompleteData", "unit of " + p.object_name(c) + " has no class");
    o.set_unit(c, *k);
  }
  std::size_t undefined = 0, checked = 0;
  std::size_t mark = t.report.mark();
  for (std::size_t k = 0; k < t.members.size(); ++k) {
    std::size_t rep = t.members[k][0];
    for_each_tuple(o, o.sig(k).inputs, [&](const std::vector<std::size_t>& ks) {
      // Representatives first, then other members until a composite lands
      // in the fragment.
      Ids reps;
      for (std::size_t j : ks) reps.push_back(t.members[j][0]);
      std::optional<std::size_t> cls;
      auto c = p.cmp(rep, reps);
      if (c) cls = class_of_op(p, t, *c);
      if (!cls) {
        std::vector<const Ids*> ch{&t.members[k]};
        for (std::size_t j : ks) ch.push_back(&t.members[j]);
        std::size_t tries = 0;
        for_each_product(ch, [&](const Ids& pick) {
          if (++tries > 64) return false;
          auto c2 = p.cmp(pick[0], Ids(pick.begin() + 1, pick.end()));
          if (c2) cls = class_of_op(p, t, *c2);
          return !cls;
        });
      }
      if (cls) {
        o.set_compose(k, ks, *cls);
        // Well-definedness on a bounded sample of other members.
        std::vector<const Ids*> ch{&t.members[k]};
        for (std::size_t j : ks) ch.push_back(&t.members[j]);
        std::size_t tries = 0;
        for_each_product(ch, [&](const Ids& pick) {
          if (++tries > 8) return false;
          auto c2 = p.cmp(pick[0], Ids(pick.begin() + 1, pick.end()));
          if (!c2) return true;
          ++checked;
          auto k2 = class_of_op(p, t, *c2);
          if (k2 && *k2 != *cls)
            t.report.fail("tau-well-defined", "truncation",
                          "members of " + o.op_name(k) + " compose into different classes");
          return true;
        });
      } else {
        ++undefined;
      }
      return true;
    });
    std::size_t n = o.arity(k);
    if (n >= 2)
      for (const Perm& s : all_perms(n)) {
        if (is_identity(s)) continue;
        auto ps = p.permute(rep, s);
        if (!ps) continue;
        auto cls = class_of_op(p, t, *ps);
        if (cls) o.set_permute(k, s, *cls);
        for (std::size_t mem : t.members[k]) {
          auto pm = p.permute(mem, s);
          if (!pm || !cls) continue;
          ++checked;
          if (class_of_op(p, t, *pm) != cls)
            t.report.fail("tau-well-defined", "truncation",
                          "members of " + o.op_name(k) + " permute into different classes");
        }
      }
  }
  t.report.close(mark, "tau-well-defined", "truncation", checked, undefined);
  for (std::size_t g = 0; g < p.num_vmorphs(); ++g) {
    auto c = p.companion(g);
    if (!c) throw Error("NotFibrant", "no companion for " + p.vmorph_name(g));
    auto k = class_of_op(p, t, c->op);
    if (!k) throw Error("NotFibrant", "companion of " + p.vmorph_name(g) + " has no class");
    t.companions.push_back(*c);
    t.companion_class.push_back(*k);
  }
  return t;
}

// Pseudo-multifunctors and multitransformations.

Report check_pseudo_multifunctor(PseudoMultifunctor& f, const PseudoCheckOptions& opt) {
  Report r;
  const std::string T = "pseudo-multifunctor";
  PseudoOperad& P = *f.src;
  PseudoOperad& Q = *f.tgt;
  Indexes ix = build_indexes(P);
  auto F = [&](const Ids& gs) {
    Ids out;
    for (std::size_t g : gs) out.push_back(f.on_vmorphs(g));
    return out;
  };
  auto Fo = [&](const Ids& ops) {
    Ids out;
    for (std::size_t x : ops) out.push_back(f.on_ops(x));
    return out;
  };

  std::size_t mark = r.mark(), checked = 0;
  for (std::size_t c = 0; c < P.num_objects(); ++c) {
    ++checked;
    if (f.on_vmorphs(P.vid(c)) != Q.vid(f.on_objects(c)))
      r.fail("pmf-vertical", T, "identity of " + P.object_name(c));
  }
  for (std::size_t g = 0; g < P.num_vmorphs(); ++g) {
    ++checked;
    auto [s, t] = P.vsig(g);
    if (Q.vsig(f.on_vmorphs(g)) != std::make_pair(f.on_objects(s), f.on_objects(t)))
      r.fail("pmf-vertical", T, "boundary of F(" + P.vmorph_name(g) + ")");
    for (std::size_t h = 0; h < P.num_vmorphs(); ++h) {
      if (P.vsig(h).first != t) continue;
      auto hg = P.vcompose(h, g);
      if (!hg) continue;
      ++checked;
      if (Q.vcompose(f.on_vmorphs(h), f.on_vmorphs(g)) != f.on_vmorphs(*hg))
        r.fail("pmf-vertical", T, "F(h o g) at " + P.vmorph_name(h) + ", " + P.vmorph_name(g));
    }
  }
  r.close(mark, "pmf-vertical", T, checked);

  mark = r.mark();
  checked = 0;
  std::size_t skipped = 0;
  for (std::size_t op = 0; op < P.base_ops(); ++op) {
    ++checked;
    OpSig want;
    for (std::size_t c : P.sig(op).inputs) want.inputs.push_back(f.on_objects(c));
    want.output = f.on_objects(P.sig(op).output);
    if (!(Q.sig(f.on_ops(op)) == want)) r.fail("pmf-operations", T, "signature of F(" + P.op_name(op) + ")");
    std::size_t n = P.arity(op);
    if (n >= 2 && n <= opt.max_perm_arity)
      for (const Perm& s : all_perms(n)) {
        auto ps = P.permute(op, s);
        auto qs = Q.permute(f.on_ops(op), s);
        if (!ps || !qs) {
          ++skipped;
          continue;
        }
        ++checked;
        if (f.on_ops(*ps) != *qs)
          r.fail("pmf-operations", T, "F(psi sigma) != F(psi) sigma at " + P.op_name(op));
      }
  }
  r.close(mark, "pmf-operations", T, checked, skipped);

  mark = r.mark();
  checked = skipped = 0;
  for (std::size_t a = 0; a < P.base_cells(); ++a) {
    const CellSig sa = P.csig(a);
    auto fa = f.on_cells(a);
    ++checked;
    if (!fa) {
      r.fail("pmf-cells", T, "no image for " + P.cell_name(a));
      continue;
    }
    if (!(Q.csig(*fa) == CellSig{f.on_ops(sa.from), f.on_ops(sa.to), F(sa.s), f.on_vmorphs(sa.t)}))
      r.fail("pmf-cells", T, "boundary of F(" + P.cell_name(a) + ")");
    for (std::size_t b : at_or_empty(ix.cells_from, sa.to)) {
      auto ba = P.cell_vcompose(b, a);
      if (!ba) continue;
      auto fba = f.on_cells(*ba);
      auto fb = f.on_cells(b);
      ++checked;
      if (!fba || !fb || Q.cell_vcompose(*fb, *fa) != fba)
        r.fail("pmf-cells", T, "F(b . a) at " + P.cell_name(b) + " . " + P.cell_name(a));
    }
  }
  for (std::size_t op = 0; op < P.base_ops(); ++op) {
    ++checked;
    if (f.on_cells(P.cell_id(op)) != Q.cell_id(f.on_ops(op)))
      r.fail("pmf-cells", T, "F(id) != id at " + P.op_name(op));
  }
  r.close(mark, "pmf-cells", T, checked, skipped);

  mark = r.mark();
  Budget b{opt.max_tuples};
  for (std::size_t c = 0; c < P.num_objects(); ++c) {
    auto u = f.funit(c);
    ++b.checked;
    if (!u || !Q.is_globular(*u) || Q.csig(*u).from != Q.unit(f.on_objects(c)) ||
        Q.csig(*u).to != f.on_ops(P.unit(c)))
      r.fail("pmf-coherence", T, "unit coherence at " + P.object_name(c));
  }
  for_each_composable(P, ix, b, [&](std::size_t psi, const Ids& phis) {
    auto pc = P.cmp(psi, phis);
    auto qc = Q.cmp(f.on_ops(psi), Fo(phis));
    if (!pc || !qc) {
      ++b.skipped;
      return;
    }
    ++b.checked;
    auto fc = f.fcmp(psi, phis);
    if (!fc || !Q.is_globular(*fc) || Q.csig(*fc).from != *qc ||
        Q.csig(*fc).to != f.on_ops(*pc)) {
      r.fail("pmf-coherence", T, "composition coherence at " + P.op_name(psi) + " o " + ids_string(phis));
      return;
    }
    // Left and right unit coherence.
    auto lp = P.lunit(psi);
    auto up = P.cmp(P.unit(P.sig(psi).output), {psi});
    if (lp && up) {
      auto fu = f.funit(P.sig(psi).output);
      auto fcu = f.fcmp(P.unit(P.sig(psi).output), {psi});
      auto flp = f.on_cells(*lp);
      std::optional<std::size_t> whisk;
      if (fu) whisk = Q.cmp_cells(*fu, {Q.cell_id(f.on_ops(psi))});
      auto lhs = vc(Q, flp, vc(Q, fcu, whisk));
      auto rhs = Q.lunit(f.on_ops(psi));
      if (lhs && rhs && *lhs != *rhs)
        r.fail("pmf-coherence", T, "left unit coherence at " + P.op_name(psi));
    }
  });
  r.close(mark, "pmf-coherence", T, b.checked, b.skipped);
  return r;
}

Report check_multitransformation(Multitransformation& z, const PseudoCheckOptions& opt) {
  Report r;
  const std::string T = "multitransformation";
  PseudoMultifunctor& F = *z.from;
  PseudoMultifunctor& G = *z.to;
  PseudoOperad& P = *F.src;
  PseudoOperad& Q = *F.tgt;
  std::size_t mark = r.mark(), checked = 0;
  for (std::size_t c = 0; c < P.num_objects(); ++c) {
    ++checked;
    if (Q.vsig(z.on_objects(c)) != std::make_pair(F.on_objects(c), G.on_objects(c)))
      r.fail("mt-boundary", T, "component at " + P.object_name(c));
  }
  for (std::size_t op = 0; op < P.base_ops(); ++op) {
    auto zc = z.on_ops(op);
    ++checked;
    Ids s;
    for (std::size_t c : P.sig(op).inputs) s.push_back(z.on_objects(c));
    if (!zc || !(Q.csig(*zc) == CellSig{F.on_ops(op), G.on_ops(op), s,
                                        z.on_objects(P.sig(op).output)}))
      r.fail("mt-boundary", T, "cell component at " + P.op_name(op));
  }
  r.close(mark, "mt-boundary", T, checked);
  mark = r.mark();
  checked = 0;
  for (std::size_t a = 0; a < P.base_cells() && checked < opt.max_tuples; ++a) {
    const CellSig sa = P.csig(a);
    auto lhs = vc(Q, z.on_ops(sa.to), F.on_cells(a));
    auto rhs = vc(Q, G.on_cells(a), z.on_ops(sa.from));
    ++checked;
    if (!lhs || !rhs || *lhs != *rhs) r.fail("mt-naturality", T, "at " + P.cell_name(a));
  }
  r.close(mark, "mt-naturality", T, checked);
  mark = r.mark();
  Budget b{opt.max_tuples};
  Indexes ix = build_indexes(P);
  for (std::size_t c = 0; c < P.num_objects(); ++c) {
    auto lhs = vc(Q, z.on_ops(P.unit(c)), F.funit(c));
    auto rhs = vc(Q, G.funit(c), Q.unit_cell(z.on_objects(c)));
    ++b.checked;
    if (!lhs || !rhs || *lhs != *rhs) r.fail("mt-pasting", T, "unit pasting at " + P.object_name(c));
  }
  for_each_composable(P, ix, b, [&](std::size_t psi, const Ids& phis) {
    auto pc = P.cmp(psi, phis);
    if (!pc) return;
    Ids zs;
    for (std::size_t x : phis) {
      auto zx = z.on_ops(x);
      if (!zx) return;
      zs.push_back(*zx);
    }
    auto zpsi = z.on_ops(psi);
    std::optional<std::size_t> hor;
    if (zpsi) hor = Q.cmp_cells(*zpsi, zs);
    auto lhs = vc(Q, z.on_ops(*pc), F.fcmp(psi, phis));
    auto rhs = vc(Q, G.fcmp(psi, phis), hor);
    if (!lhs || !rhs) {
      ++b.skipped;
      return;
    }
    ++b.checked;
    if (*lhs != *rhs) r.fail("mt-pasting", T, "composition pasting at " + P.op_name(psi));
  });
  r.close(mark, "mt-pasting", T, b.checked, b.skipped);
  return r;
}

PseudoMultifunctor identity_pseudo_multifunctor(PseudoOperad& p) {
  PseudoMultifunctor f;
  f.src = f.tgt = &p;
  auto id = [](std::size_t x) { return x; };
  f.on_objects = id;
  f.on_vmorphs = id;
  f.on_ops = id;
  f.on_cells = [](std::size_t x) -> std::optional<std::size_t> { return x; };
  f.fcmp = [&p](std::size_t psi, const Ids& phis) -> std::optional<std::size_t> {
    auto c = p.cmp(psi, phis);
    if (!c) return std::nullopt;
    return p.cell_id(*c);
  };
  f.funit = [&p](std::size_t c) -> std::optional<std::size_t> { return p.cell_id(p.unit(c)); };
  return f;
}

Multitransformation identity_multitransformation(PseudoMultifunctor& f) {
  Multitransformation z;
  z.from = z.to = &f;
  PseudoOperad* q = f.tgt;
  z.on_objects = [&f, q](std::size_t c) { return q->vid(f.on_objects(c)); };
  z.on_ops = [&f, q](std::size_t op) -> std::optional<std::size_t> {
    return q->cell_id(f.on_ops(op));
  };
  return z;
}

// The 2-adjunction.

AdjunctionUnit adjunction_unit(PseudoOperad& p) {
  AdjunctionUnit u;
  u.truncation = std::make_unique<Truncation>(tau(p));
  u.iota_tau = std::make_unique<IotaPseudoOperad>(u.truncation->operad, false);
  for (std::size_t g = 0; g < p.num_vmorphs(); ++g) {
    auto v = u.iota_tau->vmorph_of(u.truncation->companion_class[g]);
    if (!v) throw Error("NotFibrant", "companion class of " + p.vmorph_name(g) + " is not invertible");
    u.on_vmorphs.push_back(*v);
  }
  u.on_ops = u.truncation->class_of;
  return u;
}

Report check_counit_and_iota_unit(const Operad& o, const std::string& target) {
  Report r;
  IotaPseudoOperad io(o);
  Truncation t = tau(io);
  Report same = compare_operads(o, t.operad, target);
  if (same.ok())
    r.pass("counit", target, o.num_ops());
  else
    for (const auto& e : same.entries())
      if (e.status == "fail") r.fail("counit", target, "tau(iota(O)) != O: " + e.witness);
  r.merge(t.report);
  if (!same.ok()) return r;
  // eta_{iota(O)}: vertical g -> [ghat] = g, psi -> [psi] = psi, and the
  // cell (psi, g, h) -> the cell with the same boundary.
  AdjunctionUnit u = adjunction_unit(io);
  std::size_t mark = r.mark(), checked = 0;
  for (std::size_t g = 0; g < io.num_vmorphs(); ++g) {
    ++checked;
    if (u.on_vmorphs[g] != g)
      r.fail("unit-on-iota", target, "eta moves vertical " + io.vmorph_name(g));
  }
  for (std::size_t op = 0; op < io.num_ops(); ++op) {
    ++checked;
    if (u.on_ops[op] != op) r.fail("unit-on-iota", target, "eta moves " + io.op_name(op));
  }
  for (std::size_t a = 0; a < io.base_cells(); ++a) {
    const CellSig s = io.csig(a);
    Ids g;
    for (std::size_t x : s.s) g.push_back(u.on_vmorphs[x]);
    auto b = u.iota_tau->cell(u.on_ops[s.from], g, u.on_vmorphs[s.t]);
    ++checked;
    if (!b || *b != a || !(u.iota_tau->csig(*b) == s))
      r.fail("unit-on-iota", target, "eta moves " + io.cell_name(a));
  }
  r.close(mark, "unit-on-iota", target, checked);
  return r;
}

Report check_unit(PseudoOperad& p, const std::string& target, const PseudoCheckOptions& opt) {
  Report r;
  AdjunctionUnit u = adjunction_unit(p);
  Truncation& t = *u.truncation;
  IotaPseudoOperad& it = *u.iota_tau;
  r.merge(t.report);
  PseudoMultifunctor eta;
  eta.src = &p;
  eta.tgt = &it;
  eta.on_objects = [](std::size_t c) { return c; };
  eta.on_vmorphs = [&u](std::size_t g) { return u.on_vmorphs[g]; };
  eta.on_ops = [&p, &t](std::size_t op) {
    auto k = class_of_op(p, t, op);
    if (!k) throw Error("OutsideFragment", "operation " + p.op_name(op) + " has no class");
    return *k;
  };
  eta.on_cells = [&](std::size_t a) -> std::optional<std::size_t> {
    const CellSig s = p.csig(a);
    Ids g;
    for (std::size_t x : s.s) g.push_back(u.on_vmorphs[x]);
    auto from = class_of_op(p, t, s.from);
    auto to = class_of_op(p, t, s.to);
    if (!from || !to) return std::nullopt;
    auto c = it.cell(*from, g, u.on_vmorphs[s.t]);
    if (!c || it.csig(*c).to != *to) return std::nullopt;
    return c;
  };
  eta.fcmp = [&](std::size_t psi, const Ids& phis) -> std::optional<std::size_t> {
    auto pc = p.cmp(psi, phis);
    if (!pc) return std::nullopt;
    auto k = class_of_op(p, t, *pc);
    Ids ks;
    for (std::size_t x : phis) ks.push_back(eta.on_ops(x));
    auto q = it.cmp(eta.on_ops(psi), ks);
    if (!k || !q || *k != *q) return std::nullopt;
    return it.cell_id(*k);
  };
  eta.funit = [&](std::size_t c) -> std::optional<std::size_t> {
    if (it.unit(c) != eta.on_ops(p.unit(c))) return std::nullopt;
    return it.cell_id(it.unit(c));
  };
  Report fr = check_pseudo_multifunctor(eta, opt);
  bool ok = fr.ok();
  for (const auto& e : fr.entries())
    if (e.status == "fail") r.fail("unit-multifunctor", target, e.check + ": " + e.witness);
  if (ok) r.pass("unit-multifunctor", target, p.base_ops() + p.base_cells());

  // tau(eta_P): classes of iota(tau P) are singletons, so tau(eta_P) sends
  // [psi] to the class of eta(psi) for every member psi.
  Truncation tt = tau(it);
  std::size_t mark = r.mark(), checked = 0;
  Report same = compare_operads(t.operad, tt.operad, target);
  if (!same.ok()) r.fail("tau-of-unit", target, "tau(iota(tau P)) differs from tau P");
  for (std::size_t k = 0; k < t.members.size(); ++k)
    for (std::size_t m : t.members[k]) {
      ++checked;
      if (tt.class_of[eta.on_ops(m)] != k)
        r.fail("tau-of-unit", target, "tau(eta) moves the class of " + p.op_name(m));
    }
  r.close(mark, "tau-of-unit", target, checked);
  return r;
}

Report check_two_adjunction(const Operad& o, PseudoOperad& p, const std::string& target,
                            const PseudoCheckOptions& opt) {
  Report r = check_counit_and_iota_unit(o, target);
  r.merge(check_unit(p, target, opt));
  return r;
}

}  // namespace lqft
