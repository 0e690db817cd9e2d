#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lqft/causal.hpp"
#include "lqft/permutation.hpp"
#include "lqft/report.hpp"

namespace lqft {

struct OpSig {
  std::vector<std::size_t> inputs;
  std::size_t output = 0;

  bool operator==(const OpSig& o) const { return inputs == o.inputs && output == o.output; }
};

// Finite colored symmetric operad with operations referenced by index.
// Composition and permutation may be partial when the operad is a finite
// window onto an infinite one; nullopt then means "outside the window".
class Operad {
 public:
  virtual ~Operad() = default;

  virtual std::size_t num_colors() const = 0;
  virtual std::string color_name(std::size_t c) const = 0;
  virtual std::size_t num_ops() const = 0;
  virtual const OpSig& sig(std::size_t op) const = 0;
  virtual std::string op_name(std::size_t op) const = 0;
  virtual std::size_t unit(std::size_t c) const = 0;
  virtual std::optional<std::size_t> compose(std::size_t psi,
                                             const std::vector<std::size_t>& phis) const = 0;
  virtual std::optional<std::size_t> permute(std::size_t op, const Perm& sigma) const = 0;
  // Cauchy 1-ary operations, the ones the time-slice axiom inverts.
  virtual bool is_cauchy(std::size_t) const { return false; }

  std::size_t arity(std::size_t op) const { return sig(op).inputs.size(); }
  // Operations with the given output color, in index order.
  const std::vector<std::size_t>& ops_into(std::size_t color) const;
  // Operations with exactly this signature.
  std::vector<std::size_t> ops_with(const OpSig& s) const;
  std::size_t max_arity() const;

 protected:
  Operad() = default;
  Operad(const Operad&) {}
  Operad& operator=(const Operad&) {
    invalidate_index();
    return *this;
  }
  void invalidate_index() const {
    std::lock_guard<std::mutex> lock(index_mu_);
    indexed_ = false;
  }

 private:
  mutable std::mutex index_mu_;
  mutable bool indexed_ = false;
  mutable std::vector<std::vector<std::size_t>> into_;
};

// Calls f on every tuple (phi_1..phi_n) with output(phi_i) = colors[i].
// f returns false to stop. Returns false if stopped.
bool for_each_tuple(const Operad& o, const std::vector<std::size_t>& colors,
                    const std::function<bool(const std::vector<std::size_t>&)>& f);

// Explicit tables. Missing compose or permute entries read as "outside the
// window"; identity permutations and permutations of arity <= 1 are implicit.
class TableOperad : public Operad {
 public:
  std::size_t add_color(std::string name);
  std::size_t add_op(std::string name, std::vector<std::size_t> inputs, std::size_t output);
  void set_unit(std::size_t color, std::size_t op);
  void set_compose(std::size_t psi, const std::vector<std::size_t>& phis, std::size_t result);
  void set_permute(std::size_t op, const Perm& sigma, std::size_t result);
  void set_cauchy(std::size_t op, bool cauchy);
  std::optional<std::size_t> find_color(const std::string& name) const;
  std::optional<std::size_t> find_op(const std::string& name) const;
  const std::map<std::vector<std::size_t>, std::size_t>& compose_table() const { return compose_; }
  const std::map<std::pair<std::size_t, Perm>, std::size_t>& permute_table() const {
    return permute_;
  }

  std::size_t num_colors() const override { return colors_.size(); }
  std::string color_name(std::size_t c) const override { return colors_[c]; }
  std::size_t num_ops() const override { return ops_.size(); }
  const OpSig& sig(std::size_t op) const override { return ops_[op]; }
  std::string op_name(std::size_t op) const override { return names_[op]; }
  std::size_t unit(std::size_t c) const override { return units_[c]; }
  std::optional<std::size_t> compose(std::size_t psi,
                                     const std::vector<std::size_t>& phis) const override;
  std::optional<std::size_t> permute(std::size_t op, const Perm& sigma) const override;
  bool is_cauchy(std::size_t op) const override { return cauchy_[op]; }

 private:
  std::vector<std::string> colors_;
  std::vector<OpSig> ops_;
  std::vector<std::string> names_;
  std::vector<std::size_t> units_;
  std::vector<bool> cauchy_;
  std::map<std::vector<std::size_t>, std::size_t> compose_;
  std::map<std::pair<std::size_t, Perm>, std::size_t> permute_;
};

// Full tables of every defined composite and permutation of o.
TableOperad materialize(const Operad& o);

struct AxiomOptions {
  // Upper bound on tuples visited per axiom; beyond it the rest is counted
  // as skipped.
  std::size_t max_tuples = 4'000'000;
  // Treat an undefined composite as a failure rather than a skip.
  bool require_total = false;
};

// Units, signatures, the action property, associativity and both
// equivariance laws over all composable tuples.
Report check_operad_axioms(const Operad& o, const AxiomOptions& opt = {});

// Same data (colors, signatures, units, composition and permutation
// tables) under the identity identification of indices.
Report compare_operads(const Operad& a, const Operad& b, const std::string& target);

// Operations are functions between products of finite sets, stored as
// value tables; input 0 is the least significant digit of a table index.
// Composites of arity above max_arity, or not interned, lie outside.
class FunctionOperad : public Operad {
 public:
  FunctionOperad(std::vector<std::size_t> carrier_sizes, std::size_t max_arity);

  std::size_t intern(const OpSig& s, std::vector<std::uint8_t> table);
  std::optional<std::size_t> find(const OpSig& s, const std::vector<std::uint8_t>& table) const;
  const std::vector<std::uint8_t>& table(std::size_t op) const { return tables_[op]; }
  std::size_t carrier(std::size_t c) const { return sizes_[c]; }
  std::vector<std::uint8_t> composite_table(std::size_t psi,
                                            const std::vector<std::size_t>& phis) const;
  std::vector<std::uint8_t> permuted_table(std::size_t op, const Perm& sigma) const;

  std::size_t num_colors() const override { return sizes_.size(); }
  std::string color_name(std::size_t c) const override;
  std::size_t num_ops() const override { return sigs_.size(); }
  const OpSig& sig(std::size_t op) const override { return sigs_[op]; }
  std::string op_name(std::size_t op) const override;
  std::size_t unit(std::size_t c) const override { return units_[c]; }
  std::optional<std::size_t> compose(std::size_t psi,
                                     const std::vector<std::size_t>& phis) const override;
  std::optional<std::size_t> permute(std::size_t op, const Perm& sigma) const override;

 private:
  std::vector<std::size_t> sizes_;
  std::size_t max_arity_;
  std::vector<OpSig> sigs_;
  std::vector<std::vector<std::uint8_t>> tables_;
  std::vector<std::size_t> units_;
  std::map<std::pair<std::vector<std::size_t>, std::vector<std::uint8_t>>, std::size_t> index_;
};

// Every function of arity <= max_arity between sets of the given sizes.
FunctionOperad endomorphism_operad(const std::vector<std::size_t>& sizes, std::size_t max_arity);

struct RandomOperadOptions {
  std::size_t max_colors = 3;
  std::size_t max_carrier = 2;
  std::size_t max_ops = 50;
  std::size_t generators = 3;
};

// Random finite sub-operad of an endomorphism operad. Colors carry levels;
// operations of arity >= 2 raise the level, which keeps the closure finite.
FunctionOperad random_function_operad(std::uint64_t seed, const RandomOperadOptions& opt = {});

// Operations are tuples of embeddings with pairwise causally disjoint
// images. Operations above max_arity lie outside the window.
class PrefactorizationOperad : public Operad {
 public:
  struct Color {
    std::string name;
    CausalSetRef set;
  };
  struct Op {
    OpSig sig;
    std::vector<std::vector<std::size_t>> maps;
  };

  PrefactorizationOperad(std::vector<Color> colors, std::size_t max_arity = 3,
                         std::size_t max_ops = 20000);

  const Color& color(std::size_t c) const { return colors_[c]; }
  const Op& op(std::size_t i) const { return ops_[i]; }
  std::optional<std::size_t> find_color(const std::string& name) const;
  std::optional<std::size_t> find_op(std::size_t output, const std::vector<std::size_t>& inputs,
                                     const std::vector<std::vector<std::size_t>>& maps) const;
  std::vector<CausalEmbedding> embeddings(std::size_t op) const;

  std::size_t num_colors() const override { return colors_.size(); }
  std::string color_name(std::size_t c) const override { return colors_[c].name; }
  std::size_t num_ops() const override { return ops_.size(); }
  const OpSig& sig(std::size_t op) const override { return ops_[op].sig; }
  std::string op_name(std::size_t op) const override;
  std::size_t unit(std::size_t c) const override { return units_[c]; }
  std::optional<std::size_t> compose(std::size_t psi,
                                     const std::vector<std::size_t>& phis) const override;
  std::optional<std::size_t> permute(std::size_t op, const Perm& sigma) const override;
  bool is_cauchy(std::size_t op) const override;

 private:
  using Key = std::vector<std::size_t>;
  static Key key_of(const Op& op);

  std::vector<Color> colors_;
  std::vector<Op> ops_;
  std::vector<std::size_t> units_;
  std::map<Key, std::size_t> index_;
};

struct Multifunctor {
  const Operad* src = nullptr;
  const Operad* tgt = nullptr;
  std::vector<std::size_t> on_colors;
  std::vector<std::size_t> on_ops;
};

Multifunctor identity_multifunctor(const Operad& o);
// Preserves signatures, units, composition and permutations wherever the
// source data is defined.
Report check_multifunctor(const Multifunctor& f);
// g after f. Throws Error{"BoundaryMismatch"}.
Multifunctor compose_multifunctors(const Multifunctor& g, const Multifunctor& f);

struct MultinaturalTransformation {
  const Multifunctor* from = nullptr;
  const Multifunctor* to = nullptr;
  std::vector<std::size_t> components;  // 1-ary ops F(c) -> G(c) of the target
};

MultinaturalTransformation identity_transformation(const Multifunctor& f);
Report check_multinatural(const MultinaturalTransformation& z);
// Components zeta'_c after zeta_c. The caller keeps the boundary functors
// alive. Throws Error{"BoundaryMismatch"} or Error{"UndefinedComposite"}.
MultinaturalTransformation vertical_compose(const MultinaturalTransformation& outer,
                                            const MultinaturalTransformation& inner);
// H zeta, with components H(zeta_c); hf and hg are H F and H G.
MultinaturalTransformation whisker_left(const Multifunctor& h, const MultinaturalTransformation& z,
                                        const Multifunctor* hf, const Multifunctor* hg);
// zeta K, with components zeta_{K(c)}; fk and gk are F K and G K.
MultinaturalTransformation whisker_right(const MultinaturalTransformation& z, const Multifunctor& k,
                                         const Multifunctor* fk, const Multifunctor* gk);

// Finite groupoid with explicit composition table.
class FiniteGroupoid {
 public:
  std::size_t add_object();
  std::size_t add_morphism(std::size_t src, std::size_t tgt);
  void set_identity(std::size_t obj, std::size_t mor);
  void set_compose(std::size_t g, std::size_t f, std::size_t gf);
  void set_inverse(std::size_t f, std::size_t inv);

  std::size_t num_objects() const { return objects_; }
  std::size_t num_morphisms() const { return src_.size(); }
  std::size_t src(std::size_t f) const { return src_[f]; }
  std::size_t tgt(std::size_t f) const { return tgt_[f]; }
  std::size_t identity(std::size_t obj) const { return id_[obj]; }
  std::optional<std::size_t> compose(std::size_t g, std::size_t f) const;
  std::size_t inverse(std::size_t f) const { return inv_[f]; }

  Report check(const std::string& target) const;

 private:
  std::size_t objects_ = 0;
  std::vector<std::size_t> src_, tgt_, id_, inv_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> comp_;
};

}  // namespace lqft
