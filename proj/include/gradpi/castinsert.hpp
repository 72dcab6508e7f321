// gradpi/castinsert.hpp - compiling surface processes to the cast calculus
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gradpi/parser.hpp"
#include "gradpi/syntax.hpp"

namespace gradpi
{

/// Flips the top-level capability; argument types are left alone and dyn
/// is a fixed point.
Type reverse_type(const Type& t);

/// A subject cast the compiler placed (or would have placed, when trivial).
struct CastSite
{
  Span span;
  std::string rule;  // "ci-in", "ci-out" or "ci-rout"
  Type source;
  Type target;
  bool elided = false;
};

struct CompilationOutput
{
  CastProcess proc;
  std::vector<CastSite> sites;
};

class NotWellTyped : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Throws NotWellTyped unless check(env, p) accepts.
CompilationOutput insert_casts(const TypeEnv& env, const SurfaceProcess& p);

/// Compiles each unit under its own declarations and composes the results in
/// parallel, in file order.
CompilationOutput insert_casts(const Program& program);

/// Drops every cast. Outputs come back as ordinary outputs.
/// Throws std::invalid_argument on typeError, which has no surface form.
SurfaceProcess erase_casts(const CastProcess& p);

}  // namespace gradpi
