#include "gradpi/typecheck.hpp"

#include <algorithm>
#include <tuple>

namespace gradpi
{

bool consistent(const Type& t, const Type& s)
{
  if (t.is_dyn() || s.is_dyn()) return true;
  if (t.capability() != s.capability() || t.arity() != s.arity()) return false;
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (!consistent(t.args()[i], s.args()[i])) return false;
  }
  return true;
}

std::string TypeDiagnostic::message() const
{
  if (rule == "env-lookup") {
    return "[env-lookup] channel '" + (name ? print_name(*name) : std::string("?")) + "' is not bound";
  }
  return "[" + rule + "] expected " + print_type(found) + " ~ " + print_type(expected);
}

namespace
{

using Relation = bool (*)(const Type&, const Type&);

bool equal_types(const Type& t, const Type& s) { return t == s; }

class Checker
{
public:
  explicit Checker(Relation rel) : rel_(rel) {}

  void visit(const TypeEnv& env, const SurfaceProcess& p)
  {
    std::visit(overloaded{
                   [](const surface::Nil&) {},
                   [&](const surface::Input& n) {
                     std::vector<Type> annotated;
                     for (const auto& b : n.binders) annotated.push_back(b.type);
                     if (const Type* t = lookup(env, n.subject, p->span)) {
                       apply("t-in", p->span, *t, Type::in(std::move(annotated)));
                     }
                     TypeEnv inner = env;
                     for (const auto& b : n.binders) inner.bind(b.name, b.type);
                     visit(inner, n.body);
                   },
                   [&](const surface::Output& n) {
                     const Type* subject = lookup(env, n.subject, p->span);
                     std::vector<Type> sent;
                     bool complete = true;
                     for (const auto& a : n.args) {
                       if (const Type* t = lookup(env, a, p->span)) {
                         sent.push_back(*t);
                       } else {
                         complete = false;
                       }
                     }
                     if (subject != nullptr && complete) apply("t-out", p->span, *subject, Type::out(std::move(sent)));
                     visit(env, n.body);
                   },
                   [&](const surface::Par& n) {
                     visit(env, n.left);
                     visit(env, n.right);
                   },
                   [&](const surface::Choice& n) {
                     visit(env, n.left);
                     visit(env, n.right);
                   },
                   [&](const surface::Restrict& n) { visit(env.extended(n.name, n.type), n.body); },
                   [&](const surface::Replicate& n) { visit(env, n.body); },
               },
               p->node);
  }

  CheckResult finish()
  {
    std::stable_sort(result_.diagnostics.begin(), result_.diagnostics.end(),
                     [](const TypeDiagnostic& a, const TypeDiagnostic& b) {
                       return std::tie(a.span.line, a.span.column) < std::tie(b.span.line, b.span.column);
                     });
    return std::move(result_);
  }

private:
  const Type* lookup(const TypeEnv& env, const Name& n, const Span& where)
  {
    const Type* t = env.find(n);
    if (t == nullptr) {
      result_.diagnostics.push_back(TypeDiagnostic{where, "env-lookup", Type::dyn(), Type::dyn(), n});
    }
    return t;
  }

  void apply(const char* rule, const Span& where, const Type& found, Type expected)
  {
    const bool holds = rel_(found, expected);
    result_.log.push_back(RuleApplication{rule, where, found, expected, holds});
    if (!holds) result_.diagnostics.push_back(TypeDiagnostic{where, rule, std::move(expected), found, std::nullopt});
  }

  Relation rel_;
  CheckResult result_;
};

CheckResult run(Relation rel, const TypeEnv& env, const SurfaceProcess& p)
{
  Checker c(rel);
  c.visit(env, p);
  return c.finish();
}

CheckResult run(Relation rel, const Program& program)
{
  Checker c(rel);
  for (const auto& u : program.units) c.visit(u.env, u.proc);
  return c.finish();
}

}  // namespace

CheckResult check(const TypeEnv& env, const SurfaceProcess& p) { return run(consistent, env, p); }
CheckResult check_static(const TypeEnv& env, const SurfaceProcess& p) { return run(equal_types, env, p); }
CheckResult check(const Program& program) { return run(consistent, program); }
CheckResult check_static(const Program& program) { return run(equal_types, program); }

}  // namespace gradpi
