#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lqft/operad.hpp"
#include "lqft/report.hpp"

namespace lqft {

// A 2-cell alpha : from => to with source boundary s (one vertical morphism
// per input) and target boundary t.
struct CellSig {
  std::size_t from = 0;
  std::size_t to = 0;
  std::vector<std::size_t> s;
  std::size_t t = 0;

  bool operator==(const CellSig& o) const {
    return from == o.from && to == o.to && s == o.s && t == o.t;
  }
};

// ghat : c -> c' with beta1 : ghat => u(c') (s = g, t = id) and
// beta2 : u(c) => ghat (s = id, t = g).
struct Companion {
  std::size_t op = 0;
  std::size_t beta1 = 0;
  std::size_t beta2 = 0;
};

// Pseudo-operad in finite groupoids, addressed by integer ids.
//
// Objects and vertical morphisms form a fixed finite groupoid. Operations
// and 2-cells are interned: structure maps may create new ids, so the
// non-const members are not thread-safe. nullopt from a structure map means
// the result lies outside a finite fragment. Ids below base_ops() and
// base_cells() form the generated fragment that the checkers enumerate.
class PseudoOperad {
 public:
  virtual ~PseudoOperad() = default;

  virtual std::size_t num_objects() const = 0;
  virtual std::string object_name(std::size_t c) const = 0;
  virtual std::size_t num_vmorphs() const = 0;
  virtual std::pair<std::size_t, std::size_t> vsig(std::size_t g) const = 0;
  virtual std::string vmorph_name(std::size_t g) const = 0;
  virtual std::size_t vid(std::size_t c) const = 0;
  // g2 after g1.
  virtual std::optional<std::size_t> vcompose(std::size_t g2, std::size_t g1) const = 0;
  virtual std::size_t vinverse(std::size_t g) const = 0;

  virtual std::size_t num_ops() const = 0;
  virtual const OpSig& sig(std::size_t op) const = 0;
  virtual std::string op_name(std::size_t op) const = 0;
  virtual std::size_t num_cells() const = 0;
  virtual const CellSig& csig(std::size_t a) const = 0;
  virtual std::string cell_name(std::size_t a) const { return "cell" + std::to_string(a); }

  virtual std::size_t cell_id(std::size_t op) = 0;
  // b after a, defined when a.to == b.from.
  virtual std::optional<std::size_t> cell_vcompose(std::size_t b, std::size_t a) = 0;
  virtual std::size_t cell_inverse(std::size_t a) = 0;
  virtual std::optional<std::size_t> cmp(std::size_t psi, const std::vector<std::size_t>& phis) = 0;
  virtual std::optional<std::size_t> cmp_cells(std::size_t alpha,
                                               const std::vector<std::size_t>& betas) = 0;
  virtual std::size_t unit(std::size_t c) = 0;
  virtual std::size_t unit_cell(std::size_t g) = 0;
  virtual std::optional<std::size_t> permute(std::size_t op, const Perm& sigma) = 0;
  virtual std::optional<std::size_t> permute_cell(std::size_t a, const Perm& sigma) = 0;
  // (psi o phis) o chis => psi o (phi_i o chis_i).
  virtual std::optional<std::size_t> assoc(std::size_t psi, const std::vector<std::size_t>& phis,
                                           const std::vector<std::size_t>& chis) = 0;
  // u(t psi) o psi => psi.
  virtual std::optional<std::size_t> lunit(std::size_t psi) = 0;
  // psi o (u(c_1), ..., u(c_n)) => psi.
  virtual std::optional<std::size_t> runit(std::size_t psi) = 0;

  // Operations the time-slice axiom concerns; tau keeps the flag.
  virtual bool is_cauchy(std::size_t) const { return false; }

  virtual std::size_t base_ops() const { return num_ops(); }
  virtual std::size_t base_cells() const { return num_cells(); }

  // Whether a globular 2-cell a => b exists. The default scans the cells.
  virtual bool globular_equivalent(std::size_t a, std::size_t b);
  // A companion of g, or nullopt. The default searches 1-ary operations and
  // cells for data satisfying both companion identities.
  virtual std::optional<Companion> companion(std::size_t g);

  std::size_t arity(std::size_t op) const { return sig(op).inputs.size(); }
  bool is_globular(std::size_t a) const;
  // The identity vertical morphisms on the inputs of op.
  std::vector<std::size_t> input_ids(std::size_t op) const;
};

// Both companion identities for the candidate c of g.
Report check_companion(PseudoOperad& p, std::size_t g, const Companion& c);

struct PseudoCheckOptions {
  // Cap on tuples visited for each law; the rest is counted as skipped.
  std::size_t max_tuples = 200'000;
  // Largest arity whose permutations are enumerated.
  std::size_t max_perm_arity = 3;
};

// Groupoid laws, boundary functors, functoriality of cmp, u and the
// permutation actions, strict equivariance, globularity and naturality of
// a, l, r, pentagon and triangles over the base fragment.
Report check_pseudo_operad(PseudoOperad& p, const PseudoCheckOptions& opt = {});

// One pentagon instance; nullopt if some composite or coherence cell is
// undefined in p.
std::optional<bool> pentagon_holds(PseudoOperad& p, std::size_t psi,
                                   const std::vector<std::size_t>& phis,
                                   const std::vector<std::size_t>& chis,
                                   const std::vector<std::size_t>& omegas);
// The three triangle instances at (psi; phis), in the order r/l, l, r.
std::array<std::optional<bool>, 3> triangles_hold(PseudoOperad& p, std::size_t psi,
                                                  const std::vector<std::size_t>& phis);

// Fully tabulated pseudo-operad. Missing table entries read as "outside".
class ExplicitPseudoOperad : public PseudoOperad {
 public:
  std::size_t add_object(std::string name);
  std::size_t add_vmorph(std::string name, std::size_t src, std::size_t tgt);
  void set_vid(std::size_t c, std::size_t g) { vid_[c] = g; }
  void set_vcompose(std::size_t g2, std::size_t g1, std::size_t r) { vcomp_[{g2, g1}] = r; }
  void set_vinverse(std::size_t g, std::size_t inv) { vinv_[g] = inv; }
  std::size_t add_op(std::string name, OpSig s);
  std::size_t add_cell(std::string name, CellSig s);
  void set_cell_id(std::size_t op, std::size_t a) { cell_id_[op] = a; }
  void set_cell_vcompose(std::size_t b, std::size_t a, std::size_t r) { cvcomp_[{b, a}] = r; }
  void set_cell_inverse(std::size_t a, std::size_t inv) { cinv_[a] = inv; }
  void set_cmp(std::size_t psi, const std::vector<std::size_t>& phis, std::size_t r);
  void set_cmp_cells(std::size_t alpha, const std::vector<std::size_t>& betas, std::size_t r);
  void set_unit(std::size_t c, std::size_t op) { unit_[c] = op; }
  void set_unit_cell(std::size_t g, std::size_t a) { unit_cell_[g] = a; }
  void set_permute(std::size_t op, const Perm& s, std::size_t r) { perm_[{op, s}] = r; }
  void set_permute_cell(std::size_t a, const Perm& s, std::size_t r) { cperm_[{a, s}] = r; }
  void set_assoc(std::size_t psi, const std::vector<std::size_t>& phis,
                 const std::vector<std::size_t>& chis, std::size_t r);
  void set_lunit(std::size_t psi, std::size_t a) { lunit_[psi] = a; }
  void set_runit(std::size_t psi, std::size_t a) { runit_[psi] = a; }
  std::optional<std::size_t> find_object(const std::string& name) const;
  std::optional<std::size_t> find_vmorph(const std::string& name) const;
  std::optional<std::size_t> find_op(const std::string& name) const;
  std::optional<std::size_t> find_cell(const std::string& name) const;
  CellSig& cell_sig_mut(std::size_t a) { return cells_[a]; }

  std::size_t num_objects() const override { return objects_.size(); }
  std::string object_name(std::size_t c) const override { return objects_[c]; }
  std::size_t num_vmorphs() const override { return vmorphs_.size(); }
  std::pair<std::size_t, std::size_t> vsig(std::size_t g) const override { return vsig_[g]; }
  std::string vmorph_name(std::size_t g) const override { return vmorphs_[g]; }
  std::size_t vid(std::size_t c) const override { return vid_[c]; }
  std::optional<std::size_t> vcompose(std::size_t g2, std::size_t g1) const override;
  std::size_t vinverse(std::size_t g) const override { return vinv_[g]; }
  std::size_t num_ops() const override { return ops_.size(); }
  const OpSig& sig(std::size_t op) const override { return ops_[op]; }
  std::string op_name(std::size_t op) const override { return op_names_[op]; }
  std::size_t num_cells() const override { return cells_.size(); }
  const CellSig& csig(std::size_t a) const override { return cells_[a]; }
  std::string cell_name(std::size_t a) const override { return cell_names_[a]; }
  std::size_t cell_id(std::size_t op) override { return cell_id_[op]; }
  std::optional<std::size_t> cell_vcompose(std::size_t b, std::size_t a) override;
  std::size_t cell_inverse(std::size_t a) override { return cinv_[a]; }
  std::optional<std::size_t> cmp(std::size_t psi, const std::vector<std::size_t>& phis) override;
  std::optional<std::size_t> cmp_cells(std::size_t alpha,
                                       const std::vector<std::size_t>& betas) override;
  std::size_t unit(std::size_t c) override { return unit_[c]; }
  std::size_t unit_cell(std::size_t g) override { return unit_cell_[g]; }
  std::optional<std::size_t> permute(std::size_t op, const Perm& sigma) override;
  std::optional<std::size_t> permute_cell(std::size_t a, const Perm& sigma) override;
  std::optional<std::size_t> assoc(std::size_t psi, const std::vector<std::size_t>& phis,
                                   const std::vector<std::size_t>& chis) override;
  std::optional<std::size_t> lunit(std::size_t psi) override;
  std::optional<std::size_t> runit(std::size_t psi) override;

  const std::map<std::vector<std::size_t>, std::size_t>& cmp_table() const { return cmp_; }
  const std::map<std::vector<std::size_t>, std::size_t>& cmp_cells_table() const {
    return cmp_cells_;
  }
  const std::map<std::pair<std::size_t, std::size_t>, std::size_t>& vcompose_table() const {
    return vcomp_;
  }
  const std::map<std::pair<std::size_t, std::size_t>, std::size_t>& cell_vcompose_table() const {
    return cvcomp_;
  }
  const std::map<std::pair<std::size_t, Perm>, std::size_t>& permute_table() const {
    return perm_;
  }
  const std::map<std::pair<std::size_t, Perm>, std::size_t>& permute_cell_table() const {
    return cperm_;
  }
  const std::map<std::vector<std::size_t>, std::size_t>& assoc_table() const { return assoc_; }

 private:
  std::vector<std::string> objects_, vmorphs_, op_names_, cell_names_;
  std::vector<std::pair<std::size_t, std::size_t>> vsig_;
  std::vector<std::size_t> vid_, vinv_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> vcomp_;
  std::vector<OpSig> ops_;
  std::vector<CellSig> cells_;
  std::map<std::size_t, std::size_t> cell_id_, cinv_, unit_, unit_cell_, lunit_, runit_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> cvcomp_;
  std::map<std::vector<std::size_t>, std::size_t> cmp_, cmp_cells_, assoc_;
  std::map<std::pair<std::size_t, Perm>, std::size_t> perm_, cperm_;
};

// Tabulates the base fragment of p together with every structure value
// among base ids that stays inside the base fragment.
ExplicitPseudoOperad materialize_pseudo(PseudoOperad& p, const PseudoCheckOptions& opt = {});

// iota(O): objects are the colors, vertical morphisms the invertible
// 1-ary operations, operations those of O, and a unique 2-cell
// (psi, g, h) : psi => h o psi o g^-1 for every boundary. Coherence cells
// are identities.
class IotaPseudoOperad : public PseudoOperad {
 public:
  // Throws Error{"InvalidOperad"} if O fails its axioms or 1-ary
  // composition of invertibles leaves O.
  explicit IotaPseudoOperad(const Operad& o, bool validate = true);

  const Operad& base() const { return o_; }
  // Vertical morphism id of an invertible 1-ary operation, if any.
  std::optional<std::size_t> vmorph_of(std::size_t op) const;
  std::size_t op_of_vmorph(std::size_t g) const { return vops_[g]; }
  // The cell (psi, g, h), or nullopt if h o psi o g^-1 leaves O.
  std::optional<std::size_t> cell(std::size_t psi, const std::vector<std::size_t>& g,
                                  std::size_t h);

  std::size_t num_objects() const override { return o_.num_colors(); }
  std::string object_name(std::size_t c) const override { return o_.color_name(c); }
  std::size_t num_vmorphs() const override { return vops_.size(); }
  std::pair<std::size_t, std::size_t> vsig(std::size_t g) const override;
  std::string vmorph_name(std::size_t g) const override { return o_.op_name(vops_[g]); }
  std::size_t vid(std::size_t c) const override { return *vmorph_of(o_.unit(c)); }
  std::optional<std::size_t> vcompose(std::size_t g2, std::size_t g1) const override;
  std::size_t vinverse(std::size_t g) const override { return vinv_[g]; }
  std::size_t num_ops() const override { return o_.num_ops(); }
  const OpSig& sig(std::size_t op) const override { return o_.sig(op); }
  std::string op_name(std::size_t op) const override { return o_.op_name(op); }
  std::size_t num_cells() const override { return cells_.size(); }
  const CellSig& csig(std::size_t a) const override { return cells_[a]; }
  std::string cell_name(std::size_t a) const override;
  std::size_t cell_id(std::size_t op) override;
  std::optional<std::size_t> cell_vcompose(std::size_t b, std::size_t a) override;
  std::size_t cell_inverse(std::size_t a) override;
  std::optional<std::size_t> cmp(std::size_t psi, const std::vector<std::size_t>& phis) override {
    return o_.compose(psi, phis);
  }
  std::optional<std::size_t> cmp_cells(std::size_t alpha,
                                       const std::vector<std::size_t>& betas) override;
  std::size_t unit(std::size_t c) override { return o_.unit(c); }
  std::size_t unit_cell(std::size_t g) override;
  std::optional<std::size_t> permute(std::size_t op, const Perm& sigma) override {
    return o_.permute(op, sigma);
  }
  std::optional<std::size_t> permute_cell(std::size_t a, const Perm& sigma) override;
  std::optional<std::size_t> assoc(std::size_t psi, const std::vector<std::size_t>& phis,
                                   const std::vector<std::size_t>& chis) override;
  std::optional<std::size_t> lunit(std::size_t psi) override;
  std::optional<std::size_t> runit(std::size_t psi) override;
  std::size_t base_cells() const override { return base_cells_; }
  bool globular_equivalent(std::size_t a, std::size_t b) override { return a == b; }
  std::optional<Companion> companion(std::size_t g) override;

 private:
  std::size_t intern(std::size_t psi, const std::vector<std::size_t>& g, std::size_t h,
                     std::size_t to);

  const Operad& o_;
  std::vector<std::size_t> vops_;
  std::vector<std::size_t> vinv_;
  std::map<std::size_t, std::size_t> vmorph_of_;
  std::vector<CellSig> cells_;
  std::map<std::vector<std::size_t>, std::size_t> cell_index_;
  std::size_t base_cells_ = 0;
};

// tau(P) with its class data. Classes of operations are connected
// components of globular equivalence; the representative of a class is its
// least member.
struct Truncation {
  TableOperad operad;
  std::vector<std::size_t> class_of;        // base op -> class
  std::vector<std::vector<std::size_t>> members;  // class -> base ops
  std::vector<std::size_t> companion_class;  // vertical morphism -> class of its companion
  std::vector<Companion> companions;
  Report report;  // well-definedness notes and skipped composites
};

// Throws Error{"NotFibrant"} if some vertical morphism has no companion.
Truncation tau(PseudoOperad& p);
// Class of an arbitrary op id of p among the base classes, by globular
// equivalence with the members of same signature.
std::optional<std::size_t> class_of_op(PseudoOperad& p, const Truncation& t, std::size_t op);

// Pseudo-multifunctor F : P -> Q given by id maps on the base fragment.
struct PseudoMultifunctor {
  PseudoOperad* src = nullptr;
  PseudoOperad* tgt = nullptr;
  std::function<std::size_t(std::size_t)> on_objects;
  std::function<std::size_t(std::size_t)> on_vmorphs;
  std::function<std::size_t(std::size_t)> on_ops;
  std::function<std::optional<std::size_t>(std::size_t)> on_cells;
  // Globular F(psi) o F(phis) => F(psi o phis).
  std::function<std::optional<std::size_t>(std::size_t, const std::vector<std::size_t>&)> fcmp;
  // Globular u(F c) => F(u c).
  std::function<std::optional<std::size_t>(std::size_t)> funit;
};

Report check_pseudo_multifunctor(PseudoMultifunctor& f, const PseudoCheckOptions& opt = {});

// zeta : F => G with a vertical morphism per object and a 2-cell per
// operation.
struct Multitransformation {
  PseudoMultifunctor* from = nullptr;
  PseudoMultifunctor* to = nullptr;
  std::function<std::size_t(std::size_t)> on_objects;
  std::function<std::optional<std::size_t>(std::size_t)> on_ops;
};

Report check_multitransformation(Multitransformation& z, const PseudoCheckOptions& opt = {});

PseudoMultifunctor identity_pseudo_multifunctor(PseudoOperad& p);
Multitransformation identity_multitransformation(PseudoMultifunctor& f);

// The unit eta_P : P -> iota(tau(P)): objects fixed, g -> [ghat],
// psi -> [psi], cells to the unique cell of iota with matching boundary.
struct AdjunctionUnit {
  std::unique_ptr<Truncation> truncation;
  std::unique_ptr<IotaPseudoOperad> iota_tau;
  std::vector<std::size_t> on_vmorphs;  // P vertical morphism -> iota(tau P) vertical morphism
  std::vector<std::size_t> on_ops;      // base op -> class
};

AdjunctionUnit adjunction_unit(PseudoOperad& p);

// eps: tau(iota(O)) = O; eta_{iota(O)} = id; eta_P is a pseudo-multifunctor;
// tau(eta_P) = id. Entries are tagged with `target`.
Report check_two_adjunction(const Operad& o, PseudoOperad& p, const std::string& target,
                            const PseudoCheckOptions& opt = {});
// The operad part only: tau(iota(O)) = O and eta_{iota(O)} = id.
Report check_counit_and_iota_unit(const Operad& o, const std::string& target);
// The pseudo-operad part only: eta_P valid and tau(eta_P) = id.
Report check_unit(PseudoOperad& p, const std::string& target, const PseudoCheckOptions& opt = {});

}  // namespace lqft
