#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lqft/bits.hpp"
#include "lqft/error.hpp"

namespace lqft {

// Finite strict poset of named events. Events are kept in lexicographic
// order, so the index of an event is its canonical position. Both the
// transitive closure and the Hasse covers are stored as bit rows.
class CausalSet {
 public:
  CausalSet() = default;

  // Relations may be any generating pairs (a, b) meaning a precedes b.
  // Throws Error{"DuplicateEvent"|"UnknownEvent"|"Cycle"|"TooLarge"}.
  CausalSet(std::vector<std::string> events,
            const std::vector<std::pair<std::string, std::string>>& relations);

  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  Bits all() const { return low_mask(names_.size()); }
  const std::vector<std::string>& events() const { return names_; }
  const std::string& name(std::size_t i) const { return names_[i]; }
  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t index(std::string_view name) const;
  Bits mask(const std::vector<std::string>& names) const;
  std::vector<std::string> names_of(Bits b) const;

  bool precedes(std::size_t x, std::size_t y) const { return has(future_[x], y); }
  bool leq(std::size_t x, std::size_t y) const { return x == y || precedes(x, y); }
  bool comparable(std::size_t x, std::size_t y) const { return leq(x, y) || leq(y, x); }
  Bits strict_future(std::size_t x) const { return future_[x]; }
  Bits strict_past(std::size_t x) const { return past_[x]; }
  Bits covers_above(std::size_t x) const { return up_[x]; }
  Bits covers_below(std::size_t x) const { return down_[x]; }
  Bits comparable_set(std::size_t x) const { return future_[x] | past_[x] | bit(x); }
  std::vector<std::pair<std::size_t, std::size_t>> cover_pairs() const;

  // I-, I+, J-, J+ of a set of events.
  Bits chrono_past(Bits a) const;
  Bits chrono_future(Bits a) const;
  Bits past(Bits a) const { return a | chrono_past(a); }
  Bits future(Bits a) const { return a | chrono_future(a); }
  Bits hull(Bits a) const { return past(a) & future(a); }
  bool is_convex(Bits a) const { return hull(a) == a; }
  bool is_antichain(Bits a) const;
  bool disjoint_causally(Bits a, Bits b) const;

  Bits minimal() const;
  Bits maximal() const;

  // True iff every maximal chain meets x. Decided by a search for a
  // source-to-sink cover path avoiding x.
  bool meets_every_maximal_chain(Bits x) const;
  // Antichain met by every maximal chain (s must be an antichain).
  bool is_cauchy(Bits s) const;
  // Convex x such that every maximal chain meets x in a maximal chain of x.
  // This is the image condition for a Cauchy embedding.
  bool is_slab(Bits x) const;
  // Some Cauchy antichain of this set lying inside x, least in search order.
  std::optional<Bits> find_cauchy_antichain_in(Bits x) const;
  // All Cauchy antichains, sorted by mask value.
  std::vector<Bits> cauchy_antichains() const;
  // All causally convex subsets, sorted by mask value.
  std::vector<Bits> convex_subsets(bool include_empty = false) const;

  // Induced sub-causal set on x. Event k of the result is the k-th
  // element of x.
  CausalSet induced(Bits x) const;

  std::uint64_t fingerprint() const;
  bool operator==(const CausalSet& other) const {
    return names_ == other.names_ && future_ == other.future_;
  }
  bool operator!=(const CausalSet& other) const { return !(*this == other); }

 private:
  void finish_from_future();

  std::vector<std::string> names_;
  std::vector<Bits> future_, past_, up_, down_;
};

using CausalSetRef = std::shared_ptr<const CausalSet>;

inline CausalSetRef share(CausalSet c) {
  return std::make_shared<const CausalSet>(std::move(c));
}

// Position of the k-th set bit of x, used to move between a subset and
// its induced causal set.
std::vector<std::size_t> ranks_to_indices(Bits x);

// A subset tagged with the fingerprint of its parent so that mixing
// subsets of different causal sets is detected.
struct Subset {
  std::uint64_t parent = 0;
  Bits members = 0;
};

Subset make_subset(const CausalSet& m, const std::vector<std::string>& names);
Subset causal_past(const CausalSet& m, const Subset& a);
Subset causal_future(const CausalSet& m, const Subset& a);
Subset chronological_past(const CausalSet& m, const Subset& a);
Subset chronological_future(const CausalSet& m, const Subset& a);
bool is_causally_convex(const CausalSet& m, const Subset& a);
Subset convex_hull(const CausalSet& m, const Subset& a);
bool is_cauchy_antichain(const CausalSet& m, const Subset& s);

// Order embedding with causally convex image.
struct CausalEmbedding {
  CausalSetRef dom;
  CausalSetRef cod;
  std::vector<std::size_t> map;

  Bits image() const;
};

// Empty string when valid, otherwise the first violated condition.
std::string embedding_violation(const CausalSet& dom, const CausalSet& cod,
                                const std::vector<std::size_t>& map);
CausalEmbedding make_embedding(CausalSetRef dom, CausalSetRef cod,
                               std::vector<std::size_t> map);
CausalEmbedding identity_embedding(CausalSetRef m);
// Inclusion of the induced causal set on x.
CausalEmbedding inclusion(CausalSetRef m, Bits x);
CausalEmbedding compose(const CausalEmbedding& g, const CausalEmbedding& f);
bool is_cauchy_embedding(const CausalEmbedding& f);
bool are_causally_disjoint(const CausalEmbedding& f1, const CausalEmbedding& f2);

// Backtracking enumeration of order embeddings dom -> cod with convex
// image. allowed[x] restricts the candidates for x (empty = no restriction).
// The visitor returns false to stop the search.
void enumerate_embeddings(
    const CausalSet& dom, const CausalSet& cod, const std::vector<Bits>& allowed,
    const std::function<bool(const std::vector<std::size_t>&)>& visit);
std::optional<std::vector<std::size_t>> find_isomorphism(const CausalSet& a,
                                                         const CausalSet& b);

struct GlueResult {
  CausalSet result;
  std::vector<std::vector<std::size_t>> from_left;
  std::vector<std::size_t> from_right;
};

// Pushout of the spans left[i] <- mid[i] -> right, given by raw index
// maps. Throws Error{"GluingCycle"|"NonConvexCocone"|"CoconeNotEmbedding"|
// "InvalidGluingData"|"TooLarge"}.
GlueResult glue_pushout(const std::vector<CausalSet>& left,
                        const std::vector<CausalSet>& mid, const CausalSet& right,
                        const std::vector<std::vector<std::size_t>>& into_left,
                        const std::vector<std::vector<std::size_t>>& into_right);

struct GlueEmbeddings {
  CausalSetRef result;
  std::vector<CausalEmbedding> from_left;
  CausalEmbedding from_right;
};

GlueEmbeddings glue_pushout(const std::vector<CausalEmbedding>& into_left,
                            const std::vector<CausalEmbedding>& into_right);

// Hasse diagram with optional highlighted layers (name, events).
std::string to_dot(const CausalSet& m,
                   const std::vector<std::pair<std::string, Bits>>& layers = {});

}  // namespace lqft
