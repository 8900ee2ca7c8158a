#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>

#include "chase/chasers.hpp"
#include "chase/request.hpp"

namespace chase {

/// Faces of the hypercube [-1,1]^d.  Non-adaptive mode cycles axes with the
/// positive face first; adaptive mode picks, at each step, the face farthest
/// from the chaser's current point (ambient norm), never repeating the face
/// it just played.
struct HypercubeFacesSpec {
  Index d = 2;
  Index n = 8;
  bool adaptive = false;
};

/// Shrinking random halfspace cuts of [-1,1]^d around a fixed interior core
/// point: rows only accumulate, so the output is nested by construction.
struct NestedCutsSpec {
  Index d = 2;
  Index n = 8;
  std::uint64_t seed = 0;
};

/// Random boxes and thin slabs (occasionally cut by an extra halfspace)
/// scattered within [-scale, scale]^d.
struct RandomBodiesSpec {
  Index d = 2;
  Index n = 8;
  std::uint64_t seed = 0;
  double scale = 3.0;
};

/// Random nonnegative max-affine functions: `pieces` random affine pieces
/// plus the explicit zero piece.
struct RandomMaxAffineSpec {
  Index d = 2;
  Index n = 8;
  std::uint64_t seed = 0;
  Index pieces = 3;
};

struct GeneratorSpec {
  std::variant<HypercubeFacesSpec, NestedCutsSpec, RandomBodiesSpec, RandomMaxAffineSpec> family;
  NormTag norm = NormTag::Euclidean;
};

/// Materialize a non-adaptive spec into a fixed instance.  Adaptive specs
/// have no offline materialization (ValidationError); run them through
/// make_source and record the realized sequence instead.
Instance generate(const GeneratorSpec& spec);

/// Online request source for any spec, adaptive families included.
std::unique_ptr<RequestSource> make_source(const GeneratorSpec& spec);

/// Parse a compact generator description, e.g.
///   "hypercube:d=2,n=8,adaptive=1"  "nested:d=2,n=8,seed=5"
///   "random-bodies:d=3,n=12,seed=1,scale=3"
///   "random-funcs:d=2,n=6,seed=2,pieces=4"
GeneratorSpec parse_generator(const std::string& text, NormTag norm);

/// JSON serialization.  Doubles round-trip bit-exactly; unknown fields are
/// rejected; a missing required field names itself in the error.
std::string to_json_string(const Instance& inst);
Instance parse_instance(const std::string& json_text);
void save_instance(const Instance& inst, const std::string& path);
Instance load_instance(const std::string& path);

}  // namespace chase
