#pragma once

#include <memory>
#include <vector>

#include "lqft/bordism.hpp"
#include "lqft/operad.hpp"
#include "lqft/qft.hpp"

namespace lqft {

// The diamond a<b, a<c, b<d, c<d and the one-point set p.
CausalSet diamond_set();
CausalSet point_set();

// Prefactorization window on the colors pt and D, arity at most 2.
PrefactorizationOperad diamond_prefactorization();

// (pt,{p}), (D,{a}), (D,{b,c}), (D,{d}).
std::vector<PointedObject> diamond_objects();
// All bordisms between the diamond objects built from pt and D, arity at
// most 2.
BordismFragment diamond_fragment(std::size_t max_events = 10);

// Every color goes to Z/n and an operation (f_i : M_i -> N) to
// (x_i) -> sum_i (-1)^(|N| - |M_i|) x_i. A commutative, time-slice,
// additive model.
Model twisted_cyclic_model(const PrefactorizationOperad& p, std::size_t n = 3);
// Every color to the trivial monoid.
Model trivial_model(const Operad& o);
// Partial assignment into a nonabelian monoid: identities on 1-ary
// operations between equal colors and on restrictions into D, nothing on
// binary operations. Its disjoint restrictions do not commute.
Model causality_counterexample(const PrefactorizationOperad& p, const Monoid& m);

}  // namespace lqft
