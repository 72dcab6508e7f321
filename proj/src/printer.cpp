#include "gradpi/parser.hpp"

#include <sstream>

namespace gradpi
{

namespace
{

void write_type(std::ostream& os, const Type& t)
{
  if (t.is_dyn()) {
    os << "dyn";
    return;
  }
  os << (t.capability() == Capability::input ? "i(" : "o(");
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i != 0) os << ',';
    write_type(os, t.args()[i]);
  }
  os << ')';
}

void write_name(std::ostream& os, const Name& n)
{
  os << n.base;
  if (n.fresh != 0) os << '#' << n.fresh;
}

void write_channel(std::ostream& os, const CastChannel& c)
{
  if (c.casts.empty()) {
    write_name(os, c.base);
    return;
  }
  os << '(';
  write_name(os, c.base);
  os << " : ";
  write_type(os, c.casts.front().source);
  // Non-adjacent stacks are printed frame by frame so nothing is lost.
  for (std::size_t i = 0; i < c.casts.size(); ++i) {
    if (i != 0 && !(c.casts[i].source == c.casts[i - 1].target)) {
      os << " ][ ";
      write_type(os, c.casts[i].source);
    }
    os << " => ";
    write_type(os, c.casts[i].target);
  }
  os << ')';
}

void write_binders(std::ostream& os, const std::vector<Binder>& bs)
{
  os << '(';
  for (std::size_t i = 0; i < bs.size(); ++i) {
    if (i != 0) os << ',';
    write_name(os, bs[i].name);
    os << ':';
    write_type(os, bs[i].type);
  }
  os << ')';
}

// Precedence levels: 0 = par, 1 = sum, 2 = prefix.
template <class Node>
int level(const Node& n)
{
  if (std::holds_alternative<typename std::variant_alternative_t<3, decltype(n.node)>>(n.node)) return 0;
  if (std::holds_alternative<typename std::variant_alternative_t<4, decltype(n.node)>>(n.node)) return 1;
  return 2;
}

class SurfaceWriter
{
public:
  explicit SurfaceWriter(std::ostream& os) : os_(os) {}

  void at(const SurfaceProcess& p, int min_level)
  {
    const bool paren = level(*p) < min_level;
    if (paren) os_ << '(';
    write(p);
    if (paren) os_ << ')';
  }

  void write(const SurfaceProcess& p)
  {
    std::visit(overloaded{
                   [&](const surface::Nil&) { os_ << '0'; },
                   [&](const surface::Input& n) {
                     write_name(os_, n.subject);
                     os_ << '?';
                     write_binders(os_, n.binders);
                     os_ << '.';
                     at(n.body, 2);
                   },
                   [&](const surface::Output& n) {
                     write_name(os_, n.subject);
                     os_ << (n.reversed ? "!!<" : "!<");
                     for (std::size_t i = 0; i < n.args.size(); ++i) {
                       if (i != 0) os_ << ',';
                       write_name(os_, n.args[i]);
                     }
                     os_ << ">.";
                     at(n.body, 2);
                   },
                   [&](const surface::Par& n) {
                     at(n.left, 1);
                     os_ << " | ";
                     at(n.right, 0);
                   },
                   [&](const surface::Choice& n) {
                     at(n.left, 2);
                     os_ << " + ";
                     at(n.right, 1);
                   },
                   [&](const surface::Restrict& n) {
                     os_ << "new (";
                     write_name(os_, n.name);
                     os_ << ':';
                     write_type(os_, n.type);
                     os_ << ") ";
                     at(n.body, 2);
                   },
                   [&](const surface::Replicate& n) {
                     os_ << '!';
                     at(n.body, 2);
                   },
               },
               p->node);
  }

private:
  std::ostream& os_;
};

class CastWriter
{
public:
  explicit CastWriter(std::ostream& os) : os_(os) {}

  void at(const CastProcess& p, int min_level)
  {
    const bool paren = level(*p) < min_level;
    if (paren) os_ << '(';
    write(p);
    if (paren) os_ << ')';
  }

  void write(const CastProcess& p)
  {
    std::visit(overloaded{
                   [&](const cast::Nil&) { os_ << '0'; },
                   [&](const cast::TypeError&) { os_ << "typeError"; },
                   [&](const cast::Input& n) {
                     write_channel(os_, n.subject);
                     os_ << '?';
                     write_binders(os_, n.binders);
                     os_ << '.';
                     at(n.body, 2);
                   },
                   [&](const cast::Output& n) {
                     write_channel(os_, n.subject);
                     os_ << "!<";
                     for (std::size_t i = 0; i < n.args.size(); ++i) {
                       if (i != 0) os_ << ',';
                       write_channel(os_, n.args[i]);
                     }
                     os_ << ">.";
                     at(n.body, 2);
                   },
                   [&](const cast::Par& n) {
                     at(n.left, 1);
                     os_ << " | ";
                     at(n.right, 0);
                   },
                   [&](const cast::Choice& n) {
                     at(n.left, 2);
                     os_ << " + ";
                     at(n.right, 1);
                   },
                   [&](const cast::Restrict& n) {
                     os_ << "new (";
                     write_name(os_, n.name);
                     os_ << ':';
                     write_type(os_, n.type);
                     os_ << ") ";
                     at(n.body, 2);
                   },
                   [&](const cast::Replicate& n) {
                     os_ << '!';
                     at(n.body, 2);
                   },
               },
               p->node);
  }

private:
  std::ostream& os_;
};

}  // namespace

std::string print_type(const Type& t)
{
  std::ostringstream os;
  write_type(os, t);
  return os.str();
}

std::string print_name(const Name& n)
{
  std::ostringstream os;
  write_name(os, n);
  return os.str();
}

std::string print_channel(const CastChannel& c)
{
  std::ostringstream os;
  write_channel(os, c);
  return os.str();
}

std::string print_frame(const CastFrame& f)
{
  return print_type(f.source) + " => " + print_type(f.target);
}

std::string print_surface(const SurfaceProcess& p)
{
  std::ostringstream os;
  SurfaceWriter(os).write(p);
  return os.str();
}

std::string print_cast(const CastProcess& p)
{
  std::ostringstream os;
  CastWriter(os).write(p);
  return os.str();
}

}  // namespace gradpi
