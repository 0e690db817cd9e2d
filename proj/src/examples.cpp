#include "lqft/examples.hpp"

namespace lqft {

CausalSet diamond_set() {
  return CausalSet({"a", "b", "c", "d"}, {{"a", "b"}, {"a", "c"}, {"b", "d"}, {"c", "d"}});
}

CausalSet point_set() { return CausalSet({"p"}, {}); }

PrefactorizationOperad diamond_prefactorization() {
  return PrefactorizationOperad({{"pt", share(point_set())}, {"D", share(diamond_set())}}, 2);
}

std::vector<PointedObject> diamond_objects() {
  auto pt = share(point_set());
  auto d = share(diamond_set());
  return {{"pt", pt, pt->mask({"p"})},
          {"D0", d, d->mask({"a"})},
          {"D1", d, d->mask({"b", "c"})},
          {"D2", d, d->mask({"d"})}};
}

BordismFragment diamond_fragment(std::size_t max_events) {
  FragmentOptions opt;
  opt.max_arity = 2;
  opt.max_events = max_events;
  return BordismFragment::enumerate(diamond_objects(), {share(point_set()), share(diamond_set())},
                                    opt);
}

Model twisted_cyclic_model(const PrefactorizationOperad& p, std::size_t n) {
  Model m;
  m.base = &p;
  for (std::size_t c = 0; c < p.num_colors(); ++c) m.colors.push_back(cyclic_group(n));
  for (std::size_t op = 0; op < p.num_ops(); ++op) {
    const auto& s = p.sig(op);
    std::size_t out_size = p.color(s.output).set->size();
    auto ins = m.inputs(op);
    HomTable h(tuple_count(ins));
    for (std::size_t idx = 0; idx < h.size(); ++idx) {
      auto x = decode_tuple(ins, idx);
      std::size_t v = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        bool odd = (out_size - p.color(s.inputs[i]).set->size()) % 2 == 1;
        v = (v + (odd ? (n - x[i]) % n : x[i])) % n;
      }
      h[idx] = v;
    }
    m.ops.push_back(h);
  }
  return m;
}

Model trivial_model(const Operad& o) {
  Model m;
  m.base = &o;
  m.colors.assign(o.num_colors(), trivial_monoid());
  for (std::size_t op = 0; op < o.num_ops(); ++op) m.ops.push_back(HomTable{0});
  return m;
}

Model causality_counterexample(const PrefactorizationOperad& p, const Monoid& mon) {
  Model m;
  m.base = &p;
  m.colors.assign(p.num_colors(), mon);
  for (std::size_t op = 0; op < p.num_ops(); ++op) {
    std::size_t n = p.arity(op);
    if (n == 0) {
      m.ops.push_back(HomTable{mon.unit});
    } else if (n == 1) {
      m.ops.push_back(identity_table(mon.size));
    } else {
      m.ops.push_back(std::nullopt);
    }
  }
  return m;
}

}  // namespace lqft
