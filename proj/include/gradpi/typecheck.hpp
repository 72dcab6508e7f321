// gradpi/typecheck.hpp - type consistency and the gradual judgement "env |- P : ok"
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gradpi/parser.hpp"
#include "gradpi/syntax.hpp"

namespace gradpi
{

/// T ~ S: dyn is consistent with everything; capability types must agree on
/// capability and arity and be pointwise consistent.
bool consistent(const Type& t, const Type& s);

/// A rule that could not be applied. For t-in/t-out, `found` is the
/// environment's type of the subject and `expected` the pattern it must be
/// consistent with. For env-lookup, `name` is the unbound channel.
struct TypeDiagnostic
{
  Span span;
  std::string rule;  // "t-in", "t-out" or "env-lookup"
  Type expected;
  Type found;
  std::optional<Name> name;

  [[nodiscard]] std::string message() const;
};

/// One consistency check performed while checking, in visiting order.
struct RuleApplication
{
  std::string rule;  // "t-in" or "t-out"
  Span span;
  Type found;
  Type expected;
  bool holds = false;
};

struct CheckResult
{
  std::vector<TypeDiagnostic> diagnostics;  // sorted by span
  std::vector<RuleApplication> log;

  [[nodiscard]] bool ok() const { return diagnostics.empty(); }
};

CheckResult check(const TypeEnv& env, const SurfaceProcess& p);

/// Reference checker for the fully static fragment: like check(), but
/// consistency is replaced by syntactic equality.
CheckResult check_static(const TypeEnv& env, const SurfaceProcess& p);

/// Checks every unit of a program under its own declarations.
CheckResult check(const Program& program);
CheckResult check_static(const Program& program);

}  // namespace gradpi
