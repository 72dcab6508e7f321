// gradpi/syntax.hpp - surface and cast-calculus process trees
//
// Two immutable ASTs share Name/Type/TypeEnv:
//   * SurfaceProcess: what programmers write; has the reversed output, no casts.
//   * CastProcess: the compiled calculus; channels may carry cast stacks and the
//     process typeError exists, reversed outputs do not.
// Nodes are held by shared_ptr<const ...> and never mutated after construction.
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "gradpi/types.hpp"

namespace gradpi
{

struct Binder
{
  Name name;
  Type type;
  friend bool operator==(const Binder&, const Binder&) = default;
};

/// One cast `source => target`. `origin` is the source span of the cast site
/// the frame descends from; it is informational and ignored by equality.
struct CastFrame
{
  Type source;
  Type target;
  Span origin{};

  [[nodiscard]] bool trivial() const { return source == target; }
  friend bool operator==(const CastFrame& a, const CastFrame& b)
  {
    return a.source == b.source && a.target == b.target;
  }
};

/// A channel name wrapped in zero or more casts. `casts.front()` is the
/// innermost frame and `casts.back()` the outermost. Consecutive frames are
/// adjacent (the target of one is the source of the next), so the stack
/// reads as the chain `base : T0 => T1 => ... => Tk`.
struct CastChannel
{
  Name base;
  std::vector<CastFrame> casts;

  CastChannel() = default;
  CastChannel(Name n) : base(std::move(n)) {}  // NOLINT: bare channel
  CastChannel(Name n, std::vector<CastFrame> frames) : base(std::move(n)), casts(std::move(frames)) {}

  [[nodiscard]] bool bare() const { return casts.empty(); }

  /// Adds `source => target` as the new outermost frame. Trivial frames are
  /// dropped. When the current outermost target differs from `source`, the
  /// bridging frame `target_k => source` is added first so the chain stays
  /// adjacent.
  [[nodiscard]] CastChannel pushed(const Type& source, const Type& target, Span origin = {}) const;

  /// Checks the adjacency invariant.
  [[nodiscard]] bool adjacent() const;

  friend bool operator==(const CastChannel&, const CastChannel&) = default;
};

/// The bare channel name at the bottom of a cast stack.
inline const Name& ch(const CastChannel& c) { return c.base; }

// ---------------------------------------------------------------------------
// Surface calculus

struct SurfaceNode;
using SurfaceProcess = std::shared_ptr<const SurfaceNode>;

namespace surface
{
struct Nil
{
};
struct Input
{
  Name subject;
  std::vector<Binder> binders;
  SurfaceProcess body;
};
/// `reversed` marks the tagged output that advertises reversed capabilities.
struct Output
{
  Name subject;
  std::vector<Name> args;
  SurfaceProcess body;
  bool reversed = false;
};
struct Par
{
  SurfaceProcess left, right;
};
struct Choice
{
  SurfaceProcess left, right;
};
struct Restrict
{
  Name name;
  Type type;
  SurfaceProcess body;
};
struct Replicate
{
  SurfaceProcess body;
};
}  // namespace surface

struct SurfaceNode
{
  using Variant = std::variant<surface::Nil, surface::Input, surface::Output, surface::Par,
                               surface::Choice, surface::Restrict, surface::Replicate>;
  Variant node;
  Span span{};
};

namespace surface
{
SurfaceProcess nil(Span span = {});
SurfaceProcess input(Name subject, std::vector<Binder> binders, SurfaceProcess body, Span span = {});
SurfaceProcess output(Name subject, std::vector<Name> args, SurfaceProcess body, Span span = {});
SurfaceProcess reverse_output(Name subject, std::vector<Name> args, SurfaceProcess body, Span span = {});
SurfaceProcess par(SurfaceProcess left, SurfaceProcess right, Span span = {});
SurfaceProcess choice(SurfaceProcess left, SurfaceProcess right, Span span = {});
SurfaceProcess restrict(Name name, Type type, SurfaceProcess body, Span span = {});
SurfaceProcess replicate(SurfaceProcess body, Span span = {});
}  // namespace surface

// ---------------------------------------------------------------------------
// Cast calculus

struct CastNode;
using CastProcess = std::shared_ptr<const CastNode>;

namespace cast
{
struct Nil
{
};
struct Input
{
  CastChannel subject;
  std::vector<Binder> binders;
  CastProcess body;
};
struct Output
{
  CastChannel subject;
  std::vector<CastChannel> args;
  CastProcess body;
};
struct Par
{
  CastProcess left, right;
};
struct Choice
{
  CastProcess left, right;
};
struct Restrict
{
  Name name;
  Type type;
  CastProcess body;
};
struct Replicate
{
  CastProcess body;
};
struct TypeError
{
};
}  // namespace cast

struct CastNode
{
  using Variant = std::variant<cast::Nil, cast::Input, cast::Output, cast::Par, cast::Choice,
                               cast::Restrict, cast::Replicate, cast::TypeError>;
  Variant node;
  Span span{};
};

namespace cast
{
CastProcess nil(Span span = {});
CastProcess input(CastChannel subject, std::vector<Binder> binders, CastProcess body, Span span = {});
CastProcess output(CastChannel subject, std::vector<CastChannel> args, CastProcess body, Span span = {});
CastProcess par(CastProcess left, CastProcess right, Span span = {});
CastProcess choice(CastProcess left, CastProcess right, Span span = {});
CastProcess restrict(Name name, Type type, CastProcess body, Span span = {});
CastProcess replicate(CastProcess body, Span span = {});
CastProcess type_error(Span span = {});
}  // namespace cast

template <class... Fs>
struct overloaded : Fs...
{
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

// ---------------------------------------------------------------------------
// Operations

std::set<Name> free_names(const SurfaceProcess& p);
std::set<Name> free_names(const CastProcess& p);

/// Smallest `(base, k)` with k >= 1 that is not in `avoid`.
Name fresh_variant(const Name& n, const std::set<Name>& avoid);

/// Simultaneous capture-avoiding substitution of cast channels for names.
/// A substituted occurrence `(a : F)` with `a -> (b : G)` becomes `(b : G ++ F)`.
using Substitution = std::map<Name, CastChannel>;
CastProcess substitute(const CastProcess& p, const Substitution& mapping);

bool alpha_equal(const CastProcess& p, const CastProcess& q);
bool alpha_equal(const SurfaceProcess& p, const SurfaceProcess& q);

/// Nameless (de Bruijn) rendering: two processes are alpha-equivalent iff
/// their keys are equal.
std::string canonical_key(const CastProcess& p);

/// As above, rendering free names through `render_free` (used to abstract
/// over names bound outside `p`, e.g. hoisted restrictions).
using FreeNameRenderer = std::function<std::string(const Name&)>;
std::string canonical_key(const CastProcess& p, const FreeNameRenderer& render_free);

}  // namespace gradpi
