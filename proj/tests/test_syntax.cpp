#include <doctest.h>

#include <array>
#include <map>

#include "debruijn.hpp"
#include "generators.hpp"
#include "gradpi/parser.hpp"
#include "gradpi/syntax.hpp"

using namespace gradpi;
using gradpi::testing::Rng;

namespace
{

const std::vector<Name> pool{"a", "b", "c", "x", "y"};

Type T() { return parse_type("o()"); }

// Counts of each constructor, indexed by variant position.
std::array<int, 8> census(const CastProcess& p)
{
  std::array<int, 8> n{};
  std::function<void(const CastProcess&)> go = [&](const CastProcess& q) {
    ++n[q->node.index()];
    std::visit(overloaded{
                   [&](const cast::Input& i) { go(i.body); },
                   [&](const cast::Output& o) { go(o.body); },
                   [&](const cast::Par& x) { go(x.left), go(x.right); },
                   [&](const cast::Choice& x) { go(x.left), go(x.right); },
                   [&](const cast::Restrict& r) { go(r.body); },
                   [&](const cast::Replicate& r) { go(r.body); },
                   [](const auto&) {},
               },
               q->node);
  };
  go(p);
  return n;
}

std::vector<CastChannel> channels(const CastProcess& p)
{
  std::vector<CastChannel> out;
  std::function<void(const CastProcess&)> go = [&](const CastProcess& q) {
    std::visit(overloaded{
                   [&](const cast::Input& i) {
                     out.push_back(i.subject);
                     go(i.body);
                   },
                   [&](const cast::Output& o) {
                     out.push_back(o.subject);
                     out.insert(out.end(), o.args.begin(), o.args.end());
                     go(o.body);
                   },
                   [&](const cast::Par& x) { go(x.left), go(x.right); },
                   [&](const cast::Choice& x) { go(x.left), go(x.right); },
                   [&](const cast::Restrict& r) { go(r.body); },
                   [&](const cast::Replicate& r) { go(r.body); },
                   [](const auto&) {},
               },
               q->node);
  };
  go(p);
  return out;
}

// Renames every binder to a brand new name v<k>; free names stay put.
CastProcess rename_bound(const CastProcess& p, int& counter)
{
  std::function<CastProcess(const CastProcess&, const std::map<Name, Name>&)> go;
  auto chan = [](const CastChannel& c, const std::map<Name, Name>& m) {
    auto it = m.find(c.base);
    return it == m.end() ? c : CastChannel{it->second, c.casts};
  };
  go = [&](const CastProcess& q, const std::map<Name, Name>& m) -> CastProcess {
    return std::visit(
        overloaded{
            [&](const cast::Nil&) { return q; },
            [&](const cast::TypeError&) { return q; },
            [&](const cast::Input& i) {
              auto inner = m;
              std::vector<Binder> bs;
              for (const auto& b : i.binders) {
                Name v("v" + std::to_string(counter++));
                inner[b.name] = v;
                bs.push_back({v, b.type});
              }
              return cast::input(chan(i.subject, m), bs, go(i.body, inner));
            },
            [&](const cast::Output& o) {
              std::vector<CastChannel> args;
              for (const auto& a : o.args) args.push_back(chan(a, m));
              return cast::output(chan(o.subject, m), args, go(o.body, m));
            },
            [&](const cast::Par& x) {
              auto l = go(x.left, m);
              return cast::par(l, go(x.right, m));
            },
            [&](const cast::Choice& x) {
              auto l = go(x.left, m);
              return cast::choice(l, go(x.right, m));
            },
            [&](const cast::Restrict& r) {
              auto inner = m;
              Name v("v" + std::to_string(counter++));
              inner[r.name] = v;
              return cast::restrict(v, r.type, go(r.body, inner));
            },
            [&](const cast::Replicate& r) { return cast::replicate(go(r.body, m)); },
        },
        q->node);
  };
  return go(p, {});
}

}  // namespace

TEST_CASE("free names")
{
  CHECK(free_names(cast::nil()).empty());
  CHECK(free_names(cast::restrict("x", T(), cast::output(CastChannel{"x"}, {CastChannel{"x"}}, cast::nil())))
            .empty());
  CHECK(free_names(cast::output(CastChannel{"r"}, {CastChannel{"x"}}, cast::nil())) == std::set<Name>{"r", "x"});
  CHECK(free_names(parse_cast("a?(x:o()).x!<y>.0 | new (y:o()) y!<a>.0")) == std::set<Name>{"a", "y"});
}

TEST_CASE("free names agree with the occurrence-walk oracle")
{
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const auto p = testing::random_cast_process(rng, 5, pool);
    REQUIRE(free_names(p) == testing::oracle_free_names(p));
  }
}

TEST_CASE("substitution")
{
  SUBCASE("empty mapping is the identity")
  {
    const auto p = parse_cast("a?(x:o()).x!<y>.0");
    CHECK(print_cast(substitute(p, {})) == print_cast(p));
  }
  SUBCASE("stacked cast from a substituted subject")
  {
    const auto p = parse_cast("(b : dyn => o(o()))!<m100>.0");
    const CastChannel arg{"x", {CastFrame{parse_type("o(o())"), Type::dyn()}}};
    const auto q = substitute(p, {{"b", arg}});
    CHECK(print_cast(q) == "(x : o(o()) => dyn => o(o()))!<m100>.0");
    CHECK(ch(std::get<cast::Output>(q->node).subject) == Name("x"));
  }
  SUBCASE("binder that would capture is renamed")
  {
    const auto p = parse_cast("a?(x:o()).x!<y>.0");
    const auto q = substitute(p, {{"y", CastChannel{"x"}}});
    CHECK(print_cast(q) == "a?(x#1:o()).x#1!<x>.0");
    CHECK(testing::oracle_alpha_equal(q, parse_cast("a?(z:o()).z!<x>.0")));
    CHECK(!testing::oracle_alpha_equal(q, parse_cast("a?(x:o()).x!<x>.0")));
  }
  SUBCASE("bound occurrences are untouched")
  {
    const auto p = parse_cast("new (y:o()) y!<y>.0 | y!<>.0");
    CHECK(print_cast(substitute(p, {{"y", CastChannel{"b"}}})) == "new (y:o()) y!<y>.0 | b!<>.0");
  }
  SUBCASE("simultaneous, not sequential")
  {
    const auto p = parse_cast("a!<b>.0");
    CHECK(print_cast(substitute(p, {{"a", CastChannel{"b"}}, {"b", CastChannel{"a"}}})) == "b!<a>.0");
  }
}

TEST_CASE("substitution preserves structure, adjacency and ch")
{
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const auto p = testing::random_cast_process(rng, 5, pool);
    Substitution m;
    for (const auto& n : pool) {
      if (testing::coin(rng, 0.4)) m[n] = testing::random_cast_channel(rng, pool, 3);
    }
    const auto q = substitute(p, m);
    CHECK(census(p) == census(q));
    for (const auto& c : channels(q)) REQUIRE(c.adjacent());
    const auto before = channels(p);
    const auto after = channels(q);
    REQUIRE(before.size() == after.size());
  }
}

TEST_CASE("substitution is compositional on disjoint mappings")
{
  Rng rng(13);
  int checked = 0;
  for (int i = 0; i < 1500; ++i) {
    const auto p = testing::random_cast_process(rng, 5, pool);
    const Name a = pool[testing::pick(rng, pool.size())];
    const Name b = pool[testing::pick(rng, pool.size())];
    if (a == b) continue;
    const auto c = testing::random_cast_channel(rng, pool, 2);
    const auto d = testing::random_cast_channel(rng, pool, 2);
    if (ch(c) == b) continue;
    const auto seq = substitute(substitute(p, {{a, c}}), {{b, d}});
    const auto sim = substitute(p, {{a, c}, {b, d}});
    REQUIRE_MESSAGE(testing::oracle_alpha_equal(seq, sim), print_cast(p));
    ++checked;
  }
  CHECK(checked > 500);
}

TEST_CASE("alpha equality")
{
  const auto x = parse_cast("new (x:o()) x!<>.0");
  const auto y = parse_cast("new (y:o()) y!<>.0");
  CHECK(alpha_equal(x, y));
  CHECK(!alpha_equal(parse_cast("a!<>.0"), parse_cast("b!<>.0")));
  CHECK(!alpha_equal(parse_cast("(a : dyn => o())!<>.0"), parse_cast("(a : dyn => o(dyn))!<>.0")));
  CHECK(!alpha_equal(parse_cast("new (x:o()) 0"), parse_cast("new (x:i()) 0")));

  const auto c1 = parse_cast("r?(b:dyn).((b : dyn => o(o()))!<m100>.0 + (b : dyn => i(o()))?(sum:o()).0)");
  const auto c2 = parse_cast("r?(k:dyn).((k : dyn => o(o()))!<m100>.0 + (k : dyn => i(o()))?(total:o()).0)");
  CHECK(alpha_equal(c1, c2));
  CHECK(testing::oracle_alpha_equal(c1, c2));
}

TEST_CASE("alpha equality is an equivalence and matches the de Bruijn oracle")
{
  Rng rng(14);
  int counter = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = testing::random_cast_process(rng, 5, pool);
    const auto q = rename_bound(p, counter);
    const auto r = rename_bound(q, counter);
    REQUIRE(alpha_equal(p, p));
    REQUIRE(alpha_equal(p, q));
    REQUIRE(alpha_equal(q, p));
    REQUIRE(alpha_equal(q, r));
    REQUIRE(alpha_equal(p, r));
    REQUIRE(testing::oracle_alpha_equal(p, r));

    const auto other = testing::random_cast_process(rng, 5, pool);
    REQUIRE(alpha_equal(p, other) == testing::oracle_alpha_equal(p, other));
    REQUIRE(alpha_equal(p, other) == alpha_equal(other, p));
  }
}

TEST_CASE("surface alpha equality matches the oracle")
{
  Rng rng(15);
  for (int i = 0; i < 1000; ++i) {
    const auto p = testing::random_surface_process(rng, 4, pool);
    const auto q = testing::random_surface_process(rng, 4, pool);
    REQUIRE(alpha_equal(p, p));
    REQUIRE(alpha_equal(p, q) == testing::oracle_alpha_equal(p, q));
  }
}

TEST_CASE("ch ignores the cast stack")
{
  CHECK(ch(CastChannel{"a"}) == Name("a"));
  const auto x = parse_cast("(x : o(o()) => dyn => o(o()))!<m100>.0");
  CHECK(ch(std::get<cast::Output>(x->node).subject) == Name("x"));
  Rng rng(16);
  for (int i = 0; i < 1000; ++i) {
    const Name base = pool[testing::pick(rng, pool.size())];
    CastChannel c{base};
    const auto k = testing::pick(rng, 6);
    for (std::size_t j = 0; j < k; ++j) {
      c = c.pushed(testing::random_type(rng, 2, true), testing::random_type(rng, 2, true));
    }
    REQUIRE(ch(c) == base);
    REQUIRE(c.adjacent());
  }
}

TEST_CASE("pushed keeps the chain adjacent")
{
  const Type d = Type::dyn();
  const Type o = parse_type("o(o())");
  const Type i = parse_type("i(o())");

  const CastChannel bare{"x"};
  CHECK(bare.pushed(o, o).bare());

  const auto one = bare.pushed(o, d);
  CHECK(print_channel(one) == "(x : o(o()) => dyn)");
  CHECK(print_channel(one.pushed(d, o)) == "(x : o(o()) => dyn => o(o()))");

  const auto bridged = one.pushed(i, o);
  CHECK(bridged.adjacent());
  CHECK(bridged.casts.size() == 3);
  CHECK(bridged.casts[1] == CastFrame{d, i});
}

TEST_CASE("fresh variants")
{
  CHECK(fresh_variant("x", {}) == Name("x", 1));
  CHECK(fresh_variant("x", {Name("x", 1), Name("x", 2)}) == Name("x", 3));
  CHECK(fresh_variant(Name("x", 4), {Name("x", 1)}) == Name("x", 2));
}

TEST_CASE("environments")
{
  TypeEnv env;
  CHECK_THROWS_AS((void)env.lookup("r"), UnboundName);
  env.bind("r", parse_type("i(dyn)"));
  const auto inner = env.extended("r", parse_type("o()"));
  CHECK(print_type(env.lookup("r")) == "i(dyn)");
  CHECK(print_type(inner.lookup("r")) == "o()");
  CHECK(Name("x") != Name("x", 1));
}
