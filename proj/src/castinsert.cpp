#include "gradpi/castinsert.hpp"

#include "gradpi/typecheck.hpp"

namespace gradpi
{

Type reverse_type(const Type& t)
{
  if (t.is_dyn()) return t;
  return Type::chan(opposite(t.capability()), t.args());
}

namespace
{

class Compiler
{
public:
  CastProcess visit(const TypeEnv& env, const SurfaceProcess& p)
  {
    const Span& s = p->span;
    return std::visit(
        overloaded{
            [&](const surface::Nil&) { return cast::nil(s); },
            [&](const surface::Input& n) {
              std::vector<Type> annotated;
              for (const auto& b : n.binders) annotated.push_back(b.type);
              CastChannel subject = cast_subject("ci-in", s, n.subject, env.lookup(n.subject),
                                                 Type::in(std::move(annotated)));
              TypeEnv inner = env;
              for (const auto& b : n.binders) inner.bind(b.name, b.type);
              return cast::input(std::move(subject), n.binders, visit(inner, n.body), s);
            },
            [&](const surface::Output& n) {
              std::vector<Type> sent;
              std::vector<CastChannel> args;
              for (const auto& a : n.args) {
                sent.push_back(n.reversed ? reverse_type(env.lookup(a)) : env.lookup(a));
                args.emplace_back(a);
              }
              CastChannel subject = cast_subject(n.reversed ? "ci-rout" : "ci-out", s, n.subject,
                                                 env.lookup(n.subject), Type::out(std::move(sent)));
              return cast::output(std::move(subject), std::move(args), visit(env, n.body), s);
            },
            [&](const surface::Par& n) {
              CastProcess left = visit(env, n.left);
              return cast::par(std::move(left), visit(env, n.right), s);
            },
            [&](const surface::Choice& n) {
              CastProcess left = visit(env, n.left);
              return cast::choice(std::move(left), visit(env, n.right), s);
            },
            [&](const surface::Restrict& n) {
              return cast::restrict(n.name, n.type, visit(env.extended(n.name, n.type), n.body), s);
            },
            [&](const surface::Replicate& n) { return cast::replicate(visit(env, n.body), s); },
        },
        p->node);
  }

  std::vector<CastSite> sites;

private:
  CastChannel cast_subject(const char* rule, const Span& s, const Name& a, const Type& from, const Type& to)
  {
    const bool trivial = from == to;
    sites.push_back(CastSite{s, rule, from, to, trivial});
    if (trivial) return CastChannel{a};
    return CastChannel{a, {CastFrame{from, to, s}}};
  }
};

void require_well_typed(const CheckResult& r)
{
  if (!r.ok()) throw NotWellTyped("cannot compile an ill-typed process: " + r.diagnostics.front().message());
}

}  // namespace

CompilationOutput insert_casts(const TypeEnv& env, const SurfaceProcess& p)
{
  require_well_typed(check(env, p));
  Compiler c;
  CastProcess out = c.visit(env, p);
  return CompilationOutput{std::move(out), std::move(c.sites)};
}

CompilationOutput insert_casts(const Program& program)
{
  require_well_typed(check(program));
  Compiler c;
  std::vector<CastProcess> parts;
  for (const auto& u : program.units) parts.push_back(c.visit(u.env, u.proc));
  if (parts.empty()) return CompilationOutput{cast::nil(), {}};
  CastProcess acc = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) {
    const Span s{parts[i]->span.line, parts[i]->span.column, acc->span.end_line, acc->span.end_column};
    acc = cast::par(parts[i], acc, s);
  }
  return CompilationOutput{std::move(acc), std::move(c.sites)};
}

SurfaceProcess erase_casts(const CastProcess& p)
{
  const Span& s = p->span;
  return std::visit(
      overloaded{
          [&](const cast::Nil&) { return surface::nil(s); },
          [&](const cast::Input& n) { return surface::input(ch(n.subject), n.binders, erase_casts(n.body), s); },
          [&](const cast::Output& n) {
            std::vector<Name> args;
            for (const auto& a : n.args) args.push_back(ch(a));
            return surface::output(ch(n.subject), std::move(args), erase_casts(n.body), s);
          },
          [&](const cast::Par& n) { return surface::par(erase_casts(n.left), erase_casts(n.right), s); },
          [&](const cast::Choice& n) { return surface::choice(erase_casts(n.left), erase_casts(n.right), s); },
          [&](const cast::Restrict& n) { return surface::restrict(n.name, n.type, erase_casts(n.body), s); },
          [&](const cast::Replicate& n) { return surface::replicate(erase_casts(n.body), s); },
          [&](const cast::TypeError&) -> SurfaceProcess {
            throw std::invalid_argument("typeError has no surface form");
          },
      },
      p->node);
}

}  // namespace gradpi
