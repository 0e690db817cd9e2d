#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lqft/bordism.hpp"
#include "lqft/operad.hpp"
#include "lqft/pseudo_operad.hpp"
#include "lqft/qft.hpp"
#include "lqft/report.hpp"
#include "lqft/translator.hpp"

// JSON file formats. Everything is referenced by name: events inside a
// causal set, spaces and objects inside a window, colors, operations and
// cells inside an operad. Wherever a causal set or a window is expected, a
// string is read as a path relative to the referencing file. Loaders throw
// Error{"Format"} on malformed input; library errors (cycles, unknown
// events) pass through unchanged.
namespace lqft::io {

using Json = nlohmann::ordered_json;

struct LoadOptions {
  std::filesystem::path base;  // directory for relative paths
  // When set, caps every causal set read and overrides the caps of windows.
  std::optional<std::size_t> max_events;
};

Json read_file(const std::filesystem::path& path);
// Two-space indentation with arrays of scalars kept on one line; ends in a
// newline. Key order is preserved, so output is deterministic.
std::string pretty(const Json& j);
// The "kind" field, or "causal_set" for a bare {"events", "covers"}.
std::string kind_of(const Json& j);

CausalSet causal_set_from_json(const Json& j, const LoadOptions& opt);
Json to_json(const CausalSet& m);

Monoid monoid_from_json(const Json& j);
Json to_json(const Monoid& m);

Json to_json(const Report& r);
// One line per entry: status, check, target and the witness if any.
std::string report_text(const Report& r);

// Finite colors, operations by name, units, composition and permutation
// tables.
TableOperad operad_from_json(const Json& j);
Json operad_to_json(const Operad& o);

// Objects, vertical morphisms, operations and cells by name with every
// structure table.
ExplicitPseudoOperad pseudo_operad_from_json(const Json& j);
Json pseudo_operad_to_json(ExplicitPseudoOperad& p);

// Spaces double as AQFT colors and as the shapes of bordisms and collars;
// objects are spaces with a Cauchy antichain.
struct Window {
  std::vector<PrefactorizationOperad::Color> spaces;
  std::vector<PointedObject> objects;
  std::size_t max_arity = 2;
  std::size_t max_events = 10;
  Json source;  // as read, kept for writing derived models
};

Window window_from_json(const Json& j, const LoadOptions& opt);
Json to_json(const Window& w);

// Inline {"name", "M", "sigma"}, or a string naming a window object.
PointedObject object_from_json(const Json& j, const LoadOptions& opt, const Window* w = nullptr);
Json to_json(const PointedObject& o);
// Collars are objects {"event of M": "event of N"}.
Bordism bordism_from_json(const Json& j, const LoadOptions& opt, const Window* w = nullptr);
// Objects that belong to w are written by name, others inline.
Json to_json(const Bordism& b, const Window* w = nullptr);

// Everything derived from a window, built on first use. Members point into
// each other, so a World is never copied or moved.
class World {
 public:
  explicit World(Window w);
  World(const World&) = delete;
  World& operator=(const World&) = delete;

  const Window& window() const { return window_; }
  const PrefactorizationOperad& aqft();
  BordismFragment& fragment();
  const Truncation& truncation();
  const TranslationContext& context();

 private:
  Window window_;
  std::unique_ptr<PrefactorizationOperad> aqft_;
  std::unique_ptr<BordismFragment> fragment_;
  std::unique_ptr<Truncation> trunc_;
  std::unique_ptr<TranslationContext> ctx_;
};

BordismFragment build_fragment(const Window& w);

// {"kind": "aqft_model", "window", "colors": {space: monoid},
//  "ops": [{"output", "inputs", "maps", "table"}]}. Operations not listed
// stay unassigned.
Model aqft_model_from_json(const Json& j, World& world);
Json aqft_model_to_json(const Model& m, World& world);

// {"kind": "fqft_model", "window", "colors": {object: monoid},
//  "ops": [bordism fields + "table"]}. Each entry names one class through
// any representative; a class given twice must get the same table.
Model fqft_model_from_json(const Json& j, World& world);
Json fqft_model_to_json(const Model& m, World& world);

}  // namespace lqft::io
