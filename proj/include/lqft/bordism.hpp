#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "lqft/causal.hpp"
#include "lqft/permutation.hpp"
#include "lqft/pseudo_operad.hpp"
#include "lqft/report.hpp"

namespace lqft {

inline constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// (M, Sigma) with Sigma a Cauchy antichain of M. The name is a label only.
struct PointedObject {
  std::string name;
  CausalSetRef M;
  Bits sigma = 0;
};

bool same_object(const PointedObject& a, const PointedObject& b);
Report validate_object(const PointedObject& o);

// Partial map out of a source causal set, defined exactly on `domain`;
// map[x] == kNone off the domain.
struct Collar {
  Bits domain = 0;
  std::vector<std::size_t> map;

  Bits image() const;
};

Collar full_collar(const CausalSet& m);

// (N, iota0, iota1) : (M_0i, Sigma_0i)_i -> (M_1, Sigma_1). Collars are
// slab neighbourhoods of the surfaces, so the legs M <- V are Cauchy.
struct Bordism {
  std::vector<PointedObject> inputs;
  PointedObject output;
  CausalSetRef N;
  std::vector<Collar> iota0;
  Collar iota1;

  std::size_t arity() const { return inputs.size(); }
};

Bits input_surfaces(const Bordism& b);
Bits output_surface(const Bordism& b);
// Convex hull in N of all surface images.
Bits surface_hull(const Bordism& b);
// n = 1 with a slab image of the input collar.
bool is_cauchy_bordism(const Bordism& b);
// Objects, collars, disjointness and the surface conditions. Check names:
// bordism-objects, bordism-collars, bordism-disjoint, bordism-surfaces.
Report validate_bordism(const Bordism& b, const std::string& target = "bordism");

Bordism identity_bordism(const PointedObject& o);
// Throws Error{"ArityMismatch"}.
Bordism permute_bordism(const Bordism& b, const Perm& sigma);
// Canonical serialization; equal keys iff equal bordisms (names ignored).
std::string bordism_key(const Bordism& b);
std::string object_key(const PointedObject& o);

struct Overhang {
  Bits n1plus = 0;
  std::vector<Bits> n0minus;
  // V_01i cap V_10i as subsets of M_1i.
  std::vector<Bits> overlaps;
};

// Throws Error{"BoundaryMismatch"} if the inner outputs differ from the
// outer inputs and Error{"GluingRegion"} if a region is not convex or
// misses a surface.
Overhang overhang_regions(const Bordism& outer, const std::vector<Bordism>& inners);

struct Composite {
  Bordism result;
  // Event of the outer N (resp. inner N_i) to its event in the result, or
  // kNone for removed overhang.
  std::vector<std::size_t> from_outer;
  std::vector<std::vector<std::size_t>> from_inner;
  Overhang regions;
};

// Gluing of N_0i^- and N_1^+ along the collar overlaps. Events that only
// come from inner i are renamed "name@anchor" with anchor the least name of
// the outer image of the overlap, so names do not depend on input order.
// Throws Error{"BoundaryMismatch"|"GluingRegion"|"GluingCycle"|
// "InvalidComposite"|"TooLarge"}.
Composite compose_bordisms(const Bordism& outer, const std::vector<Bordism>& inners);

// A representative [Z, f] of a 2-cell: Z a slab of N containing the
// surface hull and f an order embedding of Z with slab image; f[x] ==
// kNone off Z.
struct CellRep {
  Bits Z = 0;
  std::vector<std::size_t> f;
};

// Boundary germs of a candidate cell as rank bijections of the surfaces:
// s[i][k] is the rank in Sigma_0i' of the image of the k-th event of
// Sigma_0i.
struct CellBoundary {
  std::vector<Perm> s;
  Perm t;
};

// nullopt unless rep is a 2-cell from a to b.
std::optional<CellBoundary> cell_boundary(const Bordism& a, const Bordism& b, const CellRep& rep);

// Search for a 2-cell a => b whose map agrees with `fixed` wherever fixed
// is not kNone; events of the surface hull must all be fixed. Tries
// restrictions of `fixed` first, then extends through embedding search
// over slabs Z containing the hull, smallest first.
std::optional<CellRep> find_cell(const Bordism& a, const Bordism& b,
                                 const std::vector<std::size_t>& fixed);

// Globular cell a => b, if any: an order isomorphism of surface hulls
// fixing every surface event, then a slab extension.
std::optional<CellRep> find_globular_cell(const Bordism& a, const Bordism& b);

// Hasse diagram of N with input surfaces and the output surface coloured.
std::string bordism_dot(const Bordism& b);

struct FragmentOptions {
  std::size_t max_events = 10;
  std::size_t max_ops = 20000;
  std::size_t max_cells = 50000;
  std::size_t max_arity = 3;
  // Enumerate every cell between base operations into the base fragment.
  bool enumerate_cells = true;
};

// A finite fragment of the bordism pseudo-operad on a fixed set of objects.
// Vertical morphisms are all germs, i.e. bijections between surfaces of
// equal size. Operations and cells are interned on demand; the base
// fragment is fixed by the constructor.
class BordismFragment : public PseudoOperad {
 public:
  // Base operations: generators, units and companions, closed under
  // permutations and `depth` rounds of composition within the caps.
  BordismFragment(std::vector<PointedObject> objects, const std::vector<Bordism>& generators,
                  std::size_t depth, FragmentOptions opt = {});

  // All bordisms with N isomorphic to one of `spaces`, arity at most
  // opt.max_arity, and collars isomorphic to one of `spaces`.
  static BordismFragment enumerate(std::vector<PointedObject> objects,
                                   const std::vector<CausalSetRef>& spaces, FragmentOptions opt);

  const PointedObject& object(std::size_t c) const { return objects_[c]; }
  std::optional<std::size_t> find_object(const PointedObject& o) const;
  const Bordism& bordism(std::size_t op) const { return ops_[op].b; }
  const CellRep& cell_rep(std::size_t a) const { return cells_[a].rep; }
  // Interns a valid bordism between fragment objects; nullopt if it is
  // invalid, too large or over the operation cap.
  std::optional<std::size_t> intern_op(const Bordism& b);
  std::optional<std::size_t> intern_cell(std::size_t from, std::size_t to, const CellRep& rep);
  std::optional<std::size_t> vmorph(std::size_t src, std::size_t tgt, const Perm& g) const;
  const Perm& vmap(std::size_t g) const { return vmorphs_[g].map; }
  // The explicit companion (M', g, id) with its binding cells.
  std::optional<Companion> explicit_companion(std::size_t g);
  const FragmentOptions& options() const { return opt_; }
  bool cells_truncated() const { return cells_truncated_; }

  std::size_t num_objects() const override { return objects_.size(); }
  std::string object_name(std::size_t c) const override { return objects_[c].name; }
  std::size_t num_vmorphs() const override { return vmorphs_.size(); }
  std::pair<std::size_t, std::size_t> vsig(std::size_t g) const override {
    return {vmorphs_[g].src, vmorphs_[g].tgt};
  }
  std::string vmorph_name(std::size_t g) const override;
  std::size_t vid(std::size_t c) const override { return vid_[c]; }
  std::optional<std::size_t> vcompose(std::size_t g2, std::size_t g1) const override;
  std::size_t vinverse(std::size_t g) const override;
  std::size_t num_ops() const override { return ops_.size(); }
  const OpSig& sig(std::size_t op) const override { return ops_[op].sig; }
  std::string op_name(std::size_t op) const override;
  std::size_t num_cells() const override { return cells_.size(); }
  const CellSig& csig(std::size_t a) const override { return cells_[a].sig; }
  std::string cell_name(std::size_t a) const override;
  std::size_t cell_id(std::size_t op) override;
  std::optional<std::size_t> cell_vcompose(std::size_t b, std::size_t a) override;
  std::size_t cell_inverse(std::size_t a) override;
  std::optional<std::size_t> cmp(std::size_t psi, const std::vector<std::size_t>& phis) override;
  std::optional<std::size_t> cmp_cells(std::size_t alpha,
                                       const std::vector<std::size_t>& betas) override;
  std::size_t unit(std::size_t c) override { return unit_[c]; }
  std::size_t unit_cell(std::size_t g) override;
  std::optional<std::size_t> permute(std::size_t op, const Perm& sigma) override;
  std::optional<std::size_t> permute_cell(std::size_t a, const Perm& sigma) override;
  std::optional<std::size_t> assoc(std::size_t psi, const std::vector<std::size_t>& phis,
                                   const std::vector<std::size_t>& chis) override;
  std::optional<std::size_t> lunit(std::size_t psi) override;
  std::optional<std::size_t> runit(std::size_t psi) override;
  bool is_cauchy(std::size_t op) const override { return ops_[op].cauchy; }
  std::size_t base_ops() const override { return base_ops_; }
  std::size_t base_cells() const override { return base_cells_; }
  bool globular_equivalent(std::size_t a, std::size_t b) override;
  std::optional<Companion> companion(std::size_t g) override { return explicit_companion(g); }

 private:
  struct Op {
    Bordism b;
    OpSig sig;
    bool cauchy = false;
  };
  struct Cell {
    CellSig sig;
    CellRep rep;
  };
  struct Vmorph {
    std::size_t src = 0, tgt = 0;
    Perm map;
  };
  struct CompositeInfo {
    std::size_t result = 0;
    std::vector<std::size_t> from_outer;
    std::vector<std::vector<std::size_t>> from_inner;
  };

  explicit BordismFragment(std::vector<PointedObject> objects, FragmentOptions opt);
  void init_vertical();
  void add_units_and_companions();
  void close_permutations(std::size_t from);
  void enumerate_base_cells();
  std::optional<Companion> build_companion(std::size_t g);
  const CompositeInfo* composite(std::size_t psi, const std::vector<std::size_t>& phis);
  // Cell from -> to realizing the partial map h on events of N_from.
  std::optional<std::size_t> cell_from_map(std::size_t from, std::size_t to,
                                           const std::vector<std::size_t>& h);

  FragmentOptions opt_;
  std::vector<PointedObject> objects_;
  std::vector<Vmorph> vmorphs_;
  std::vector<std::size_t> vid_;
  std::map<std::tuple<std::size_t, std::size_t, Perm>, std::size_t> vindex_;
  std::vector<Op> ops_;
  std::map<std::string, std::size_t> op_index_;
  std::vector<Cell> cells_;
  std::map<std::vector<std::size_t>, std::size_t> cell_index_;
  std::vector<std::size_t> unit_;
  std::map<std::vector<std::size_t>, std::optional<CompositeInfo>> composites_;
  std::map<std::pair<std::size_t, std::size_t>, bool> globular_;
  std::map<std::pair<std::size_t, Perm>, std::optional<std::size_t>> permuted_;
  std::map<std::size_t, std::optional<Companion>> companions_;
  std::size_t base_ops_ = 0;
  std::size_t base_cells_ = 0;
  bool cells_truncated_ = false;
};

}  // namespace lqft
