#include <doctest.h>

#include <algorithm>
#include <functional>

#include "debruijn.hpp"
#include "generators.hpp"
#include "gradpi/parser.hpp"

using namespace gradpi;
using gradpi::testing::Rng;

namespace
{

const std::vector<Name> pool{"a", "b", "c", "x", "y"};

std::string declare_all(const SurfaceProcess& p)
{
  std::string s;
  for (const auto& n : free_names(p)) s += "chan " + print_name(n) + " : dyn;\n";
  return s + "run " + print_surface(p) + "\n";
}

ParseError parse_error(const std::string& text)
{
  try {
    (void)parse(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("no parse error for: " << text);
  return ParseError(ParseErrorKind::syntax, {}, "");
}

void spans_nest(const SurfaceProcess& p)
{
  auto child = [&](const SurfaceProcess& c) {
    REQUIRE(p->span.contains(c->span));
    spans_nest(c);
  };
  std::visit(overloaded{
                 [&](const surface::Input& n) { child(n.body); },
                 [&](const surface::Output& n) { child(n.body); },
                 [&](const surface::Par& n) { child(n.left), child(n.right); },
                 [&](const surface::Choice& n) { child(n.left), child(n.right); },
                 [&](const surface::Restrict& n) { child(n.body); },
                 [&](const surface::Replicate& n) { child(n.body); },
                 [](const surface::Nil&) {},
             },
             p->node);
}

}  // namespace

TEST_CASE("the client parses to the expected tree")
{
  const auto prog = parse("chan r : i(dyn);\nchan m : o();\nrun r?(b:dyn).( b!<m>.0 + b?(s:o()).0 )");
  REQUIRE(prog.units.size() == 1);
  const auto& u = prog.units[0];
  CHECK(print_type(u.env.lookup("r")) == "i(dyn)");
  CHECK(print_type(u.env.lookup("m")) == "o()");
  const auto& in = std::get<surface::Input>(u.proc->node);
  CHECK(in.subject == Name("r"));
  REQUIRE(in.binders.size() == 1);
  CHECK(in.binders[0].type.is_dyn());
  const auto& sum = std::get<surface::Choice>(in.body->node);
  CHECK(std::get<surface::Output>(sum.left->node).args == std::vector<Name>{"m"});
  CHECK(std::holds_alternative<surface::Input>(sum.right->node));
  CHECK(print_surface(u.proc) == "r?(b:dyn).(b!<m>.0 + b?(s:o()).0)");
}

TEST_CASE("small programs")
{
  const auto empty = parse("run 0");
  REQUIRE(empty.units.size() == 1);
  CHECK(empty.units[0].env.empty());
  CHECK(std::holds_alternative<surface::Nil>(empty.units[0].proc->node));

  const auto p = parse("chan a : dyn; chan b : dyn; run a!<b>.0 | a?(x:dyn).0");
  CHECK(std::holds_alternative<surface::Par>(p.units[0].proc->node));

  const auto two = parse("chan a : o(); run a!<>\nchan a : i(); run a?()");
  CHECK(two.units.size() == 2);
  CHECK(print_surface(two.units[1].proc) == "a?().0");
}

TEST_CASE("precedence and associativity")
{
  auto round = [](const std::string& body) {
    return print_surface(parse("chan a : dyn; run " + body).units[0].proc);
  };
  CHECK(round("a!<>.0 | a!<> + a!<> | a!<>") == "a!<>.0 | a!<>.0 + a!<>.0 | a!<>.0");
  const auto p = parse("chan a : dyn; run a!<> | a!<> | a!<>").units[0].proc;
  CHECK(std::holds_alternative<surface::Par>(std::get<surface::Par>(p->node).right->node));
  const auto s = parse("chan a : dyn; run a!<> + a!<> + a!<>").units[0].proc;
  CHECK(std::holds_alternative<surface::Choice>(std::get<surface::Choice>(s->node).right->node));
  CHECK(round("(a!<> | a!<>) | a!<>") == "(a!<>.0 | a!<>.0) | a!<>.0");
  CHECK(round("new (x:o()) x!<> | a!<>") == "new (x:o()) x!<>.0 | a!<>.0");
  CHECK(round("!a?(y:dyn).y!<> + 0") == "!a?(y:dyn).y!<>.0 + 0");
  CHECK(round("a!!<a> -- trailing comment") == "a!!<a>.0");
}

TEST_CASE("printers")
{
  CHECK(print_surface(surface::nil()) == "0");
  CHECK(print_surface(surface::reverse_output("r", {"x"}, surface::nil())) == "r!!<x>.0");
  CHECK(print_cast(cast::type_error()) == "typeError");
  const CastChannel x{"x", {CastFrame{parse_type("o(o())"), Type::dyn()}, CastFrame{Type::dyn(), parse_type("o(o())")}}};
  CHECK(print_channel(x) == "(x : o(o()) => dyn => o(o()))");
  CHECK(print_cast(cast::output(CastChannel{"a"}, {x}, cast::nil())) == "a!<(x : o(o()) => dyn => o(o()))>.0");
  CHECK(print_type(parse_type("i(o(), dyn, i())")) == "i(o(),dyn,i())");
  CHECK(print_name(Name("x", 3)) == "x#3");
}

TEST_CASE("cast syntax round-trips")
{
  Rng rng(21);
  for (int i = 0; i < 1000; ++i) {
    const auto p = testing::random_cast_process(rng, 5, pool);
    const auto text = print_cast(p);
    const auto q = parse_cast(text);
    REQUIRE_MESSAGE(alpha_equal(p, q), text);
    REQUIRE(print_cast(q) == text);
  }
}

TEST_CASE("surface syntax round-trips")
{
  Rng rng(22);
  for (int i = 0; i < 1000; ++i) {
    const auto p = testing::random_surface_process(rng, 5, pool);
    const auto prog = parse(declare_all(p));
    REQUIRE(prog.units.size() == 1);
    REQUIRE_MESSAGE(testing::oracle_alpha_equal(p, prog.units[0].proc), print_surface(p));
    REQUIRE(print_surface(prog.units[0].proc) == print_surface(p));
  }
}

TEST_CASE("spans nest")
{
  Rng rng(23);
  for (int i = 0; i < 300; ++i) {
    testing::ProgramOptions opts;
    opts.allow_dyn = true;
    opts.allow_reverse = true;
    const auto prog = testing::random_program(rng, opts);
    // Spans only exist after a trip through the text form.
    std::string text;
    for (const auto& u : prog.units) {
      for (const auto& d : u.declarations) text += "chan " + print_name(d.name) + " : " + print_type(d.type) + ";\n";
      text += "run " + print_surface(u.proc) + "\n";
    }
    const auto parsed = parse(text);
    for (const auto& u : parsed.units) {
      REQUIRE(u.proc->span.valid());
      spans_nest(u.proc);
    }
  }
}

TEST_CASE("errors carry positions")
{
  SUBCASE("undeclared channel")
  {
    const auto e = parse_error("run a!<b>.0");
    CHECK(e.kind == ParseErrorKind::undeclared_name);
    CHECK(e.where.line == 1);
    CHECK(e.where.column == 5);
  }
  SUBCASE("duplicate declaration")
  {
    const auto e = parse_error("chan a : o();\nchan a : o(); run 0");
    CHECK(e.kind == ParseErrorKind::duplicate_declaration);
    CHECK(e.where.line == 2);
  }
  SUBCASE("dangling operator")
  {
    const auto e = parse_error("chan a : o(); run a!<>.0 +");
    CHECK(e.kind == ParseErrorKind::syntax);
    CHECK(e.where.column == 27);
    CHECK(!e.expected.empty());
  }
  SUBCASE("money is not an identifier")
  {
    const auto e = parse_error("chan r : o(o()); run r!<$100>");
    CHECK(e.where.column == 25);
  }
  SUBCASE("repeated binder")
  {
    CHECK(parse_error("chan a:i(o(),o()); run a?(x:o(), x:o()).0").kind == ParseErrorKind::syntax);
  }
  SUBCASE("cast forms are not surface syntax")
  {
    parse_error("chan r : o(); run typeError");
    parse_error("chan r : o(); run (r : o() => o())!<>.0");
    parse_error("chan r : o(); run r#1!<>.0");
  }
  SUBCASE("empty input")
  {
    const auto e = parse_error("");
    CHECK(e.where.line == 1);
    CHECK(e.where.column == 1);
  }
  SUBCASE("lines and columns")
  {
    const auto e = parse_error("chan a : o();\n-- comment\nrun a!<>.\n   ?");
    CHECK(e.where.line == 4);
    CHECK(e.where.column == 4);
  }
  CHECK_THROWS_AS(parse_type("o(dyn"), ParseError);
  CHECK_THROWS_AS(parse_cast("(x : o() => )!<>.0"), ParseError);
}

TEST_CASE("deep nesting is rejected, not a crash")
{
  std::string deep = "run ";
  for (int i = 0; i < 100000; ++i) deep += "(";
  deep += "0";
  CHECK_THROWS_AS(parse(deep), ParseError);

  std::string ok = "run ";
  for (int i = 0; i < 500; ++i) ok += "(";
  ok += "0";
  for (int i = 0; i < 500; ++i) ok += ")";
  CHECK_NOTHROW(parse(ok));
}

TEST_CASE("fuzz: arbitrary bytes never escape as anything but ParseError")
{
  Rng rng(24);
  const std::string alphabet = "chanrun:;()<>!?.,+|0dyniox#-= \n\t\x01\xff\xc3";
  auto lines_of = [](const std::string& s) { return 1 + static_cast<int>(std::count(s.begin(), s.end(), '\n')); };
  for (int i = 0; i < 20000; ++i) {
    std::string s;
    const auto n = testing::pick(rng, 60);
    const bool bytes = testing::coin(rng, 0.3);
    for (std::size_t k = 0; k < n; ++k) {
      s += bytes ? static_cast<char>(testing::pick(rng, 256)) : alphabet[testing::pick(rng, alphabet.size())];
    }
    try {
      (void)parse(s);
    } catch (const ParseError& e) {
      REQUIRE(e.where.valid());
      REQUIRE(e.where.line <= lines_of(s));
    }
    try {
      (void)parse_cast(s);
    } catch (const ParseError& e) {
      REQUIRE(e.where.valid());
    }
  }
}

TEST_CASE("fuzz: mutated valid programs")
{
  Rng rng(25);
  const std::string base =
      "chan r : o(dyn);\nchan m100 : o();\nrun new (x:o(o())) r!!<x>.x!<m100> + new (x:i(o())) r!!<x>.x?(sum:o())\n";
  for (int i = 0; i < 5000; ++i) {
    std::string s = base;
    const auto edits = 1 + testing::pick(rng, 3);
    for (std::size_t k = 0; k < edits; ++k) {
      const auto at = testing::pick(rng, s.size());
      switch (testing::pick(rng, 3)) {
        case 0: s.erase(at, 1); break;
        case 1: s.insert(at, 1, base[testing::pick(rng, base.size())]); break;
        default: s[at] = base[testing::pick(rng, base.size())];
      }
    }
    try {
      (void)parse(s);
    } catch (const ParseError& e) {
      REQUIRE(e.where.valid());
    }
  }
}
