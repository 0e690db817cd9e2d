#pragma once

#include <string>
#include <vector>

#include "lqft/bordism.hpp"
#include "lqft/operad.hpp"
#include "lqft/pseudo_operad.hpp"
#include "lqft/qft.hpp"
#include "lqft/report.hpp"

namespace lqft {

// Bridge between a prefactorization window and a truncated bordism
// fragment. Every fragment object (M, Sigma) is identified with a color
// by an isomorphism of M, and every Cauchy antichain of every color is
// carried by exactly one chosen fragment object.
struct TranslationContext {
  const PrefactorizationOperad* aqft = nullptr;
  BordismFragment* fragment = nullptr;
  const Truncation* trunc = nullptr;
  // Fragment object -> color, and the iso as a map from the object's M
  // into the color's set.
  std::vector<std::size_t> color_of;
  std::vector<std::vector<std::size_t>> to_color;
  // Color -> its Cauchy antichains in sigma_category order, and the
  // fragment object chosen for each.
  std::vector<std::vector<Bits>> surfaces;
  std::vector<std::vector<std::size_t>> surface_object;
};

// Throws Error{"MissingColor"|"MissingSurface"}.
TranslationContext make_context(const PrefactorizationOperad& p, BordismFragment& f,
                                const Truncation& t);

// F_A: (M, Sigma) -> A(M) and each class to the zig-zag through its least
// representative, time-slice legs inverted. With debug set, every member of
// every class is checked to give the same hom. Throws
// Error{"TimeSliceRequired"|"MissingRestriction"|"NotWellDefined"}.
Model aqft_to_fqft(const Model& a, const TranslationContext& ctx, bool debug = false);

struct AqftFromFqft {
  Model model;
  std::vector<Colimit> colimits;  // per color, over sigma_category
};

// A_F: M -> colim over Sigma_M of F(M, Sigma). Cauchy 1-ary operations use
// the bordism [N, f, id]; the others the first later antichain Sigma'
// strictly above the images of the input surfaces. With debug set, the
// result is checked to be independent of Sigma' and of the class
// representatives. Throws Error{"AdditivityRequired"|"NoLaterSurface"|
// "MissingRestriction"|"NotWellDefined"}.
AqftFromFqft fqft_to_aqft(const Model& f, const TranslationContext& ctx, bool debug = false);

// A(F(A)) = A on the nose. Check name: triangle-aqft.
Report roundtrip_aqft(const Model& a, const TranslationContext& ctx, const std::string& target,
                      bool debug = false);
// The legs iota_Sigma : F(M, Sigma) -> F(A(F))(M, Sigma) are monoid isos and
// every naturality square commutes. Check name: triangle-fqft.
Report roundtrip_fqft(const Model& f, const TranslationContext& ctx, const std::string& target,
                      bool debug = false);

// Components of a multinatural transformation between two models on the
// same base, one hom per color.
struct ModelTransformation {
  std::vector<HomTable> components;
};

// Homs and naturality on every assigned operation. Check name:
// transformation.
Report check_transformation(const Model& from, const Model& to, const ModelTransformation& z,
                            const std::string& target);
// F(zeta)_(M,Sigma) = zeta_M.
ModelTransformation aqft_to_fqft(const ModelTransformation& z, const TranslationContext& ctx);
// A(xi)_M induced on the colimits.
ModelTransformation fqft_to_aqft(const ModelTransformation& xi, const AqftFromFqft& from,
                                 const AqftFromFqft& to, const TranslationContext& ctx);
// A(F(zeta)) = zeta. Check name: triangle-morphism.
Report roundtrip_transformation(const Model& a, const Model& b, const ModelTransformation& z,
                                const TranslationContext& ctx, const std::string& target);

}  // namespace lqft
