#include "gradpi/syntax.hpp"

#include <algorithm>
#include <sstream>

namespace gradpi
{

UnboundName::UnboundName(const Name& n)
    : std::out_of_range("unbound channel '" + n.base + "'"), name(n)
{
}

const Type& TypeEnv::lookup(const Name& n) const
{
  if (const Type* t = find(n)) return *t;
  throw UnboundName(n);
}

// ---------------------------------------------------------------------------
// CastChannel

CastChannel CastChannel::pushed(const Type& source, const Type& target, Span origin) const
{
  CastChannel out = *this;
  if (source == target) return out;
  if (!out.casts.empty() && out.casts.back().target != source) {
    out.casts.push_back(CastFrame{out.casts.back().target, source, origin});
  }
  out.casts.push_back(CastFrame{source, target, origin});
  return out;
}

bool CastChannel::adjacent() const
{
  for (std::size_t i = 1; i < casts.size(); ++i) {
    if (casts[i - 1].target != casts[i].source) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Builders

namespace surface
{
namespace
{
SurfaceProcess make(SurfaceNode::Variant v, Span span)
{
  return std::make_shared<const SurfaceNode>(SurfaceNode{std::move(v), span});
}
}  // namespace

SurfaceProcess nil(Span span) { return make(Nil{}, span); }
SurfaceProcess input(Name subject, std::vector<Binder> binders, SurfaceProcess body, Span span)
{
  return make(Input{std::move(subject), std::move(binders), std::move(body)}, span);
}
SurfaceProcess output(Name subject, std::vector<Name> args, SurfaceProcess body, Span span)
{
  return make(Output{std::move(subject), std::move(args), std::move(body), false}, span);
}
SurfaceProcess reverse_output(Name subject, std::vector<Name> args, SurfaceProcess body, Span span)
{
  return make(Output{std::move(subject), std::move(args), std::move(body), true}, span);
}
SurfaceProcess par(SurfaceProcess left, SurfaceProcess right, Span span)
{
  return make(Par{std::move(left), std::move(right)}, span);
}
SurfaceProcess choice(SurfaceProcess left, SurfaceProcess right, Span span)
{
  return make(Choice{std::move(left), std::move(right)}, span);
}
SurfaceProcess restrict(Name name, Type type, SurfaceProcess body, Span span)
{
  return make(Restrict{std::move(name), std::move(type), std::move(body)}, span);
}
SurfaceProcess replicate(SurfaceProcess body, Span span) { return make(Replicate{std::move(body)}, span); }
}  // namespace surface

namespace cast
{
namespace
{
CastProcess make(CastNode::Variant v, Span span)
{
  return std::make_shared<const CastNode>(CastNode{std::move(v), span});
}
}  // namespace

CastProcess nil(Span span) { return make(Nil{}, span); }
CastProcess input(CastChannel subject, std::vector<Binder> binders, CastProcess body, Span span)
{
  return make(Input{std::move(subject), std::move(binders), std::move(body)}, span);
}
CastProcess output(CastChannel subject, std::vector<CastChannel> args, CastProcess body, Span span)
{
  return make(Output{std::move(subject), std::move(args), std::move(body)}, span);
}
CastProcess par(CastProcess left, CastProcess right, Span span)
{
  return make(Par{std::move(left), std::move(right)}, span);
}
CastProcess choice(CastProcess left, CastProcess right, Span span)
{
  return make(Choice{std::move(left), std::move(right)}, span);
}
CastProcess restrict(Name name, Type type, CastProcess body, Span span)
{
  return make(Restrict{std::move(name), std::move(type), std::move(body)}, span);
}
CastProcess replicate(CastProcess body, Span span) { return make(Replicate{std::move(body)}, span); }
CastProcess type_error(Span span) { return make(TypeError{}, span); }
}  // namespace cast

// ---------------------------------------------------------------------------
// Free names

namespace
{

// Free names are computed bottom-up: fn(body) minus binders, plus the prefix names.
std::set<Name> fn_surface(const SurfaceProcess& p)
{
  return std::visit(
      overloaded{
          [](const surface::Nil&) { return std::set<Name>{}; },
          [](const surface::Input& n) {
            auto s = fn_surface(n.body);
            for (const auto& b : n.binders) s.erase(b.name);
            s.insert(n.subject);
            return s;
          },
          [](const surface::Output& n) {
            auto s = fn_surface(n.body);
            s.insert(n.subject);
            s.insert(n.args.begin(), n.args.end());
            return s;
          },
          [](const surface::Par& n) {
            auto s = fn_surface(n.left);
            s.merge(fn_surface(n.right));
            return s;
          },
          [](const surface::Choice& n) {
            auto s = fn_surface(n.left);
            s.merge(fn_surface(n.right));
            return s;
          },
          [](const surface::Restrict& n) {
            auto s = fn_surface(n.body);
            s.erase(n.name);
            return s;
          },
          [](const surface::Replicate& n) { return fn_surface(n.body); },
      },
      p->node);
}

std::set<Name> fn_cast(const CastProcess& p)
{
  return std::visit(
      overloaded{
          [](const cast::Nil&) { return std::set<Name>{}; },
          [](const cast::TypeError&) { return std::set<Name>{}; },
          [](const cast::Input& n) {
            auto s = fn_cast(n.body);
            for (const auto& b : n.binders) s.erase(b.name);
            s.insert(n.subject.base);
            return s;
          },
          [](const cast::Output& n) {
            auto s = fn_cast(n.body);
            s.insert(n.subject.base);
            for (const auto& a : n.args) s.insert(a.base);
            return s;
          },
          [](const cast::Par& n) {
            auto s = fn_cast(n.left);
            s.merge(fn_cast(n.right));
            return s;
          },
          [](const cast::Choice& n) {
            auto s = fn_cast(n.left);
            s.merge(fn_cast(n.right));
            return s;
          },
          [](const cast::Restrict& n) {
            auto s = fn_cast(n.body);
            s.erase(n.name);
            return s;
          },
          [](const cast::Replicate& n) { return fn_cast(n.body); },
      },
      p->node);
}

}  // namespace

std::set<Name> free_names(const SurfaceProcess& p) { return fn_surface(p); }
std::set<Name> free_names(const CastProcess& p) { return fn_cast(p); }

Name fresh_variant(const Name& n, const std::set<Name>& avoid)
{
  Name candidate{n.base, 1};
  while (avoid.count(candidate) != 0) ++candidate.fresh;
  return candidate;
}

// ---------------------------------------------------------------------------
// Substitution

namespace
{

CastChannel apply(const CastChannel& c, const Substitution& m)
{
  auto it = m.find(c.base);
  if (it == m.end()) return c;
  CastChannel result = it->second;
  if (c.casts.empty()) return result;
  if (!result.casts.empty() && result.casts.back().target != c.casts.front().source) {
    result.casts.push_back(CastFrame{result.casts.back().target, c.casts.front().source, c.casts.front().origin});
  }
  result.casts.insert(result.casts.end(), c.casts.begin(), c.casts.end());
  return result;
}

std::set<Name> range_names(const Substitution& m)
{
  std::set<Name> s;
  for (const auto& [_, c] : m) s.insert(c.base);
  return s;
}

CastProcess subst(const CastProcess& p, const Substitution& m);

// Drops the binders from the mapping and renames those that would capture a
// name coming from the mapping's range.
Substitution enter_binders(const std::vector<Name*>& names, const Substitution& m, const CastProcess& body)
{
  Substitution inner = m;
  for (const Name* n : names) inner.erase(*n);
  if (inner.empty()) return inner;

  const auto range = range_names(inner);
  bool captures = false;
  for (const Name* n : names) captures = captures || range.count(*n) != 0;
  if (!captures) return inner;

  std::set<Name> avoid = free_names(body);
  avoid.insert(range.begin(), range.end());
  for (const auto& [k, _] : inner) avoid.insert(k);
  for (const Name* n : names) avoid.insert(*n);

  for (Name* n : names) {
    if (range.count(*n) == 0) continue;
    Name renamed = fresh_variant(*n, avoid);
    avoid.insert(renamed);
    inner.insert_or_assign(*n, CastChannel{renamed});
    *n = renamed;
  }
  return inner;
}

CastProcess subst(const CastProcess& p, const Substitution& m)
{
  if (m.empty()) return p;
  const Span span = p->span;
  return std::visit(
      overloaded{
          [&](const cast::Nil&) { return p; },
          [&](const cast::TypeError&) { return p; },
          [&](const cast::Input& n) {
            std::vector<Binder> binders = n.binders;
            std::vector<Name*> names;
            for (auto& b : binders) names.push_back(&b.name);
            const auto inner = enter_binders(names, m, n.body);
            return cast::input(apply(n.subject, m), std::move(binders), subst(n.body, inner), span);
          },
          [&](const cast::Output& n) {
            std::vector<CastChannel> args;
            args.reserve(n.args.size());
            for (const auto& a : n.args) args.push_back(apply(a, m));
            return cast::output(apply(n.subject, m), std::move(args), subst(n.body, m), span);
          },
          [&](const cast::Par& n) { return cast::par(subst(n.left, m), subst(n.right, m), span); },
          [&](const cast::Choice& n) { return cast::choice(subst(n.left, m), subst(n.right, m), span); },
          [&](const cast::Restrict& n) {
            Name name = n.name;
            const auto inner = enter_binders({&name}, m, n.body);
            return cast::restrict(name, n.type, subst(n.body, inner), span);
          },
          [&](const cast::Replicate& n) { return cast::replicate(subst(n.body, m), span); },
      },
      p->node);
}

}  // namespace

CastProcess substitute(const CastProcess& p, const Substitution& mapping) { return subst(p, mapping); }

// ---------------------------------------------------------------------------
// Alpha-equivalence by simultaneous traversal with paired binder scopes.

namespace
{

class Scopes
{
public:
  void push(const Name& l, const Name& r)
  {
    left_.push_back(l);
    right_.push_back(r);
  }
  void pop(std::size_t n)
  {
    left_.resize(left_.size() - n);
    right_.resize(right_.size() - n);
  }
  [[nodiscard]] bool same(const Name& l, const Name& r) const
  {
    const auto li = innermost(left_, l);
    const auto ri = innermost(right_, r);
    if (li < 0 && ri < 0) return l == r;
    return li == ri;
  }

private:
  static long innermost(const std::vector<Name>& v, const Name& n)
  {
    for (long i = static_cast<long>(v.size()) - 1; i >= 0; --i) {
      if (v[static_cast<std::size_t>(i)] == n) return i;
    }
    return -1;
  }
  std::vector<Name> left_, right_;
};

bool same_channel(const CastChannel& a, const CastChannel& b, const Scopes& s)
{
  return a.casts == b.casts && s.same(a.base, b.base);
}

bool alpha(const CastProcess& p, const CastProcess& q, Scopes& s)
{
  if (p->node.index() != q->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const cast::Nil&) { return true; },
          [&](const cast::TypeError&) { return true; },
          [&](const cast::Input& a) {
            const auto& b = std::get<cast::Input>(q->node);
            if (!same_channel(a.subject, b.subject, s) || a.binders.size() != b.binders.size()) return false;
            for (std::size_t i = 0; i < a.binders.size(); ++i) {
              if (a.binders[i].type != b.binders[i].type) return false;
            }
            for (std::size_t i = 0; i < a.binders.size(); ++i) s.push(a.binders[i].name, b.binders[i].name);
            const bool r = alpha(a.body, b.body, s);
            s.pop(a.binders.size());
            return r;
          },
          [&](const cast::Output& a) {
            const auto& b = std::get<cast::Output>(q->node);
            if (!same_channel(a.subject, b.subject, s) || a.args.size() != b.args.size()) return false;
            for (std::size_t i = 0; i < a.args.size(); ++i) {
              if (!same_channel(a.args[i], b.args[i], s)) return false;
            }
            return alpha(a.body, b.body, s);
          },
          [&](const cast::Par& a) {
            const auto& b = std::get<cast::Par>(q->node);
            return alpha(a.left, b.left, s) && alpha(a.right, b.right, s);
          },
          [&](const cast::Choice& a) {
            const auto& b = std::get<cast::Choice>(q->node);
            return alpha(a.left, b.left, s) && alpha(a.right, b.right, s);
          },
          [&](const cast::Restrict& a) {
            const auto& b = std::get<cast::Restrict>(q->node);
            if (a.type != b.type) return false;
            s.push(a.name, b.name);
            const bool r = alpha(a.body, b.body, s);
            s.pop(1);
            return r;
          },
          [&](const cast::Replicate& a) { return alpha(a.body, std::get<cast::Replicate>(q->node).body, s); },
      },
      p->node);
}

bool alpha(const SurfaceProcess& p, const SurfaceProcess& q, Scopes& s)
{
  if (p->node.index() != q->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const surface::Nil&) { return true; },
          [&](const surface::Input& a) {
            const auto& b = std::get<surface::Input>(q->node);
            if (!s.same(a.subject, b.subject) || a.binders.size() != b.binders.size()) return false;
            for (std::size_t i = 0; i < a.binders.size(); ++i) {
              if (a.binders[i].type != b.binders[i].type) return false;
            }
            for (std::size_t i = 0; i < a.binders.size(); ++i) s.push(a.binders[i].name, b.binders[i].name);
            const bool r = alpha(a.body, b.body, s);
            s.pop(a.binders.size());
            return r;
          },
          [&](const surface::Output& a) {
            const auto& b = std::get<surface::Output>(q->node);
            if (a.reversed != b.reversed || !s.same(a.subject, b.subject) || a.args.size() != b.args.size()) {
              return false;
            }
            for (std::size_t i = 0; i < a.args.size(); ++i) {
              if (!s.same(a.args[i], b.args[i])) return false;
            }
            return alpha(a.body, b.body, s);
          },
          [&](const surface::Par& a) {
            const auto& b = std::get<surface::Par>(q->node);
            return alpha(a.left, b.left, s) && alpha(a.right, b.right, s);
          },
          [&](const surface::Choice& a) {
            const auto& b = std::get<surface::Choice>(q->node);
            return alpha(a.left, b.left, s) && alpha(a.right, b.right, s);
          },
          [&](const surface::Restrict& a) {
            const auto& b = std::get<surface::Restrict>(q->node);
            if (a.type != b.type) return false;
            s.push(a.name, b.name);
            const bool r = alpha(a.body, b.body, s);
            s.pop(1);
            return r;
          },
          [&](const surface::Replicate& a) { return alpha(a.body, std::get<surface::Replicate>(q->node).body, s); },
      },
      p->node);
}

}  // namespace

bool alpha_equal(const CastProcess& p, const CastProcess& q)
{
  Scopes s;
  return alpha(p, q, s);
}

bool alpha_equal(const SurfaceProcess& p, const SurfaceProcess& q)
{
  Scopes s;
  return alpha(p, q, s);
}

// ---------------------------------------------------------------------------
// Canonical (de Bruijn) keys

namespace
{

void key_type(std::ostream& os, const Type& t)
{
  if (t.is_dyn()) {
    os << 'D';
    return;
  }
  os << (t.capability() == Capability::input ? 'i' : 'o') << '(';
  for (const auto& a : t.args()) {
    key_type(os, a);
    os << ',';
  }
  os << ')';
}

class KeyWriter
{
public:
  KeyWriter(std::ostream& os, const FreeNameRenderer* render) : os_(os), render_(render) {}

  void process(const CastProcess& p)
  {
    std::visit(overloaded{
                   [&](const cast::Nil&) { os_ << '0'; },
                   [&](const cast::TypeError&) { os_ << 'E'; },
                   [&](const cast::Input& n) {
                     os_ << "I[";
                     channel(n.subject);
                     for (const auto& b : n.binders) {
                       os_ << ';';
                       key_type(os_, b.type);
                     }
                     os_ << ']';
                     for (const auto& b : n.binders) scope_.push_back(b.name);
                     process(n.body);
                     scope_.resize(scope_.size() - n.binders.size());
                   },
                   [&](const cast::Output& n) {
                     os_ << "O[";
                     channel(n.subject);
                     for (const auto& a : n.args) {
                       os_ << ';';
                       channel(a);
                     }
                     os_ << ']';
                     process(n.body);
                   },
                   [&](const cast::Par& n) { binary('P', n.left, n.right); },
                   [&](const cast::Choice& n) { binary('C', n.left, n.right); },
                   [&](const cast::Restrict& n) {
                     os_ << "N[";
                     key_type(os_, n.type);
                     os_ << ']';
                     scope_.push_back(n.name);
                     process(n.body);
                     scope_.pop_back();
                   },
                   [&](const cast::Replicate& n) {
                     os_ << '!';
                     process(n.body);
                   },
               },
               p->node);
  }

  void channel(const CastChannel& c)
  {
    name(c.base);
    for (const auto& f : c.casts) {
      os_ << ':';
      key_type(os_, f.source);
      os_ << '>';
      key_type(os_, f.target);
    }
  }

  void name(const Name& n)
  {
    for (std::size_t i = scope_.size(); i-- > 0;) {
      if (scope_[i] == n) {
        os_ << '%' << (scope_.size() - 1 - i);
        return;
      }
    }
    if (render_ != nullptr && *render_) {
      os_ << (*render_)(n);
    } else {
      os_ << '\'' << n.base << '#' << n.fresh;
    }
  }

private:
  void binary(char tag, const CastProcess& l, const CastProcess& r)
  {
    os_ << tag << '(';
    process(l);
    os_ << ',';
    process(r);
    os_ << ')';
  }

  std::ostream& os_;
  const FreeNameRenderer* render_;
  std::vector<Name> scope_;
};

}  // namespace

std::string canonical_key(const CastProcess& p) { return canonical_key(p, FreeNameRenderer{}); }

std::string canonical_key(const CastProcess& p, const FreeNameRenderer& render_free)
{
  std::ostringstream os;
  KeyWriter w(os, &render_free);
  w.process(p);
  return os.str();
}

}  // namespace gradpi
