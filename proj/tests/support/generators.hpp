// Random terms and programs for the property suites.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gradpi/parser.hpp"
#include "gradpi/syntax.hpp"

namespace gradpi::testing
{

using Rng = std::mt19937_64;

bool coin(Rng& rng, double p);
std::size_t pick(Rng& rng, std::size_t n);  // uniform in [0, n)

Type random_type(Rng& rng, int depth, bool allow_dyn);

/// A random stack that satisfies the adjacency invariant.
CastChannel random_cast_channel(Rng& rng, const std::vector<Name>& pool, int max_frames);

/// Arbitrary (untyped) terms over a small name pool, with plenty of
/// shadowing. Cast terms may contain typeError.
CastProcess random_cast_process(Rng& rng, int depth, const std::vector<Name>& pool);
SurfaceProcess random_surface_process(Rng& rng, int depth, const std::vector<Name>& pool);

struct ProgramOptions
{
  bool allow_dyn = false;
  bool allow_reverse = false;
  bool allow_replicate = true;
  double ill_typed = 0.0;  // chance that an action ignores the types
  int units = 2;
  int depth = 4;
};

/// Multi-unit programs over shared channels. Each unit sees the shared
/// channels with its own capabilities, so units can talk to each other.
Program random_program(Rng& rng, const ProgramOptions& opts);

/// Every non-dyn type position in declarations and annotations, in a fixed
/// pre-order.
std::size_t count_type_positions(const Program& p);

/// Replaces the k-th type position (see above) by dyn.
Program erase_type_position(const Program& p, std::size_t k);

/// True if `p` mentions dyn anywhere or uses a reverse output.
bool mentions_dyn(const Program& p);
bool uses_reverse(const Program& p);

}  // namespace gradpi::testing
