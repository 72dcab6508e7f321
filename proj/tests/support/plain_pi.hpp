// A small interpreter for the ordinary (cast-free) pi-calculus, kept apart
// from the library's runtime. It follows the same scheduling contract:
//   * threads are kept in a list; finished interactions remove their
//     participants and append the continuations (receiver side first);
//   * candidate reductions are listed thread by thread: a sum offers its
//     left and right branch, a replication offers one unfolding when its
//     body could meet a partner, then the thread's pairings with every
//     later thread follow;
//   * a seeded run draws each choice uniformly with mt19937_64;
//   * clashing restrictions and capturing binders get the smallest unused
//     fresh index.
// Traces are printed in the same text format as the library's.
#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "gradpi/syntax.hpp"

namespace gradpi::testing::plain
{

struct N
{
  std::string base;
  unsigned k = 0;
  friend auto operator<=>(const N&, const N&) = default;
  friend bool operator==(const N&, const N&) = default;
};

enum class K { nil, in, out, par, sum, res, rep };

struct Proc;
using P = std::shared_ptr<const Proc>;

struct Proc
{
  K kind = K::nil;
  N ch;                            // in/out subject, res name
  std::vector<N> names;            // in binders, out arguments
  std::vector<std::string> types;  // in binder types, res type (printed)
  P a, b;                          // continuation / left, right
};

/// Throws std::invalid_argument on reverse outputs.
P from_surface(const SurfaceProcess& p);
/// Throws std::invalid_argument on casts or typeError.
P from_cast(const CastProcess& p);

std::string show(const P& p);

/// Runs `p` with the seeded scheduler and returns the full trace text.
std::string run_seeded(const P& p, std::uint64_t seed, std::size_t max_steps);

}  // namespace gradpi::testing::plain
