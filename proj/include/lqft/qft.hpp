#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lqft/bits.hpp"
#include "lqft/bordism.hpp"
#include "lqft/causal.hpp"
#include "lqft/operad.hpp"
#include "lqft/pseudo_operad.hpp"
#include "lqft/report.hpp"

namespace lqft {

// Finite monoid on {0, ..., size-1}; mul is row-major.
struct Monoid {
  std::string name;
  std::size_t size = 1;
  std::vector<std::size_t> mul{0};
  std::size_t unit = 0;
  std::vector<std::string> labels;  // optional element names

  std::size_t op(std::size_t a, std::size_t b) const { return mul[a * size + b]; }
  std::string label(std::size_t x) const;
};

bool operator==(const Monoid& a, const Monoid& b);

Monoid trivial_monoid();
Monoid cyclic_group(std::size_t n);
// Self-maps of {0,1}: id, swap, const0, const1 under composition.
Monoid transformation_monoid_2();
// {1, l0, l1} with l * x = l for l != 1.
Monoid left_zero_monoid();
Report check_monoid(const Monoid& m, const std::string& target);

// A hom out of a product of monoids is a table indexed by tuples, the
// first factor being the least significant digit.
using HomTable = std::vector<std::size_t>;

std::size_t tuple_count(const std::vector<const Monoid*>& factors);
std::size_t encode_tuple(const std::vector<const Monoid*>& factors, const std::vector<std::size_t>& x);
std::vector<std::size_t> decode_tuple(const std::vector<const Monoid*>& factors, std::size_t index);
// First violation of the hom laws, empty if none.
std::string hom_violation(const std::vector<const Monoid*>& dom, const Monoid& cod, const HomTable& h);
bool is_bijective(const HomTable& h, std::size_t cod_size);
std::optional<HomTable> inverse_table(const HomTable& h, std::size_t cod_size);
// g after f for 1-ary tables.
HomTable compose_tables(const HomTable& g, const HomTable& f);
HomTable identity_table(std::size_t n);

// Thin category: at most one arrow between two objects, reflexive and
// transitive by construction of the callers.
class ThinCategory {
 public:
  std::size_t add_object(std::string label);
  void add_arrow(std::size_t a, std::size_t b);
  bool arrow(std::size_t a, std::size_t b) const;
  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  // Objects b with an arrow a -> b.
  std::vector<std::size_t> out(std::size_t a) const;
  // Internal bit rows, 64 objects per word.
  const std::vector<std::uint64_t>& row(std::size_t a) const { return out_[a]; }
  const std::vector<std::uint64_t>& col(std::size_t b) const { return in_[b]; }

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<std::uint64_t>> out_, in_;
};

// Nonempty and every pair of objects has a common target; why names a
// failing pair.
bool is_filtered(const ThinCategory& c, std::string* why = nullptr);
// F : C -> D on objects; every comma category d / F is nonempty and
// connected.
bool is_final(const ThinCategory& c, const ThinCategory& d, const std::vector<std::size_t>& f,
              std::string* why = nullptr);

// All nonempty causally convex subsets under inclusion; relative
// compactness holds for every finite subset.
struct RegionCategory {
  ThinCategory cat;
  std::vector<Bits> regions;
};
RegionCategory rc_category(const CausalSet& m);

// (U, S): U causally convex and S a Cauchy antichain of U.
struct PointedRegion {
  Bits U = 0;
  Bits S = 0;
  bool operator==(const PointedRegion&) const = default;
};

// The arrow (U,S) -> (U',S'): U in U', and S in J^-_{U'}(S') when U is a
// slab of U', otherwise S in I^-_{U'}(S').
bool pointed_arrow(const CausalSet& m, const PointedRegion& a, const PointedRegion& b);

enum class RcVariant {
  // U in J^-(Sigma), and U a slab of M or S in I^-(Sigma).
  adapted,
  // U in I^-(Sigma) as written for open sets; not filtered in general.
  literal,
};

struct PointedRegionCategory {
  ThinCategory cat;
  std::vector<PointedRegion> regions;
};
PointedRegionCategory rc_pointed_category(const CausalSet& m, Bits sigma,
                                          RcVariant v = RcVariant::adapted);

// Cauchy antichains with Sigma -> Sigma' iff Sigma in J^-(Sigma').
struct SurfaceCategory {
  ThinCategory cat;
  std::vector<Bits> surfaces;
};
SurfaceCategory sigma_category(const CausalSet& m);

// The Grothendieck construction of Sigma -> RC_(M,Sigma), the category Q_M
// of all pointed regions occurring in it, and the forgetful functor.
struct GrothendieckData {
  ThinCategory total;
  std::vector<std::pair<std::size_t, PointedRegion>> objects;  // (surface index, region)
  ThinCategory q;
  std::vector<PointedRegion> q_objects;
  std::vector<std::size_t> forget;  // total object -> q object
};
GrothendieckData grothendieck(const CausalSet& m);

struct Colimit {
  Monoid monoid;
  std::vector<HomTable> legs;  // object -> carrier
  // Canonical representative (object, element) of each class.
  std::vector<std::pair<std::size_t, std::size_t>> reps;
};

// Colimit of a diagram of monoids over a filtered thin category. arrow(i, j)
// returns the hom for i -> j (never asked for i == j). Classes are
// represented by their least (object, element). With debug set, the
// multiplication is checked to be independent of the upper bound used.
// Throws Error{"NotFiltered"|"NotWellDefined"}.
Colimit filtered_colimit(const ThinCategory& c, const std::vector<const Monoid*>& objects,
                         const std::function<const HomTable&(std::size_t, std::size_t)>& arrow,
                         bool debug = false);

// Monoid-valued assignment on a base operad. Missing op tables make the
// model partial; checks skip what they cannot see.
struct Model {
  const Operad* base = nullptr;
  std::vector<Monoid> colors;
  std::vector<std::optional<HomTable>> ops;

  std::vector<const Monoid*> inputs(std::size_t op) const;
};

// Monoids, homs, units, composition and permutations. Check names:
// model-monoids, model-homs, model-units, model-composition,
// model-permutations.
Report check_model(const Model& m, const std::string& target);
// Every Cauchy 1-ary operation goes to a bijection. Check name: time-slice.
Report check_time_slice(const Model& m, const std::string& target);
// For every binary operation, the images of its two 1-ary restrictions
// commute. Check name: causality.
Report check_einstein_causality(const Model& m, const std::string& target);
// Comparison from the colimit over the regions of each color isomorphic to
// a color. Check name: additivity.
Report check_additivity_aqft(const Model& m, const PrefactorizationOperad& p,
                             const std::string& target);
// Same over the adapted pointed regions isomorphic to fragment objects;
// restrictions are classes of the inclusion bordisms.
Report check_additivity_fqft(const Model& m, BordismFragment& f, const Truncation& t,
                             const std::string& target);

// Isomorphism from a pointed object onto (U, S) in m, as a map on a.M.
std::optional<std::vector<std::size_t>> find_pointed_iso(const PointedObject& a, const CausalSet& m,
                                                         Bits U, Bits S);

}  // namespace lqft
