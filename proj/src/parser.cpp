#include "gradpi/parser.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>

namespace gradpi
{

namespace
{

std::string join(const std::vector<std::string>& parts, const char* sep)
{
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i != 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::string describe(ParseErrorKind kind, const Span& where, const std::string& message)
{
  std::ostringstream os;
  os << where.line << ':' << where.column << ": ";
  switch (kind) {
    case ParseErrorKind::syntax: os << "syntax error: "; break;
    case ParseErrorKind::undeclared_name: os << "undeclared channel: "; break;
    case ParseErrorKind::duplicate_declaration: os << "duplicate declaration: "; break;
  }
  os << message;
  return os.str();
}

}  // namespace

ParseError::ParseError(ParseErrorKind k, Span w, const std::string& message, std::vector<std::string> exp)
    : std::runtime_error(describe(k, w, message)), kind(k), where(w), expected(std::move(exp))
{
}

namespace
{

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  ident,
  number,
  lparen,
  rparen,
  langle,
  rangle,
  comma,
  colon,
  semi,
  dot,
  question,
  bang,
  plus,
  bar,
  arrow,
  hash,
  kw_chan,
  kw_run,
  kw_new,
  kw_dyn,
  kw_type_error,
  end,
};

const char* spelling(Tok t)
{
  switch (t) {
    case Tok::ident: return "identifier";
    case Tok::number: return "number";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::langle: return "'<'";
    case Tok::rangle: return "'>'";
    case Tok::comma: return "','";
    case Tok::colon: return "':'";
    case Tok::semi: return "';'";
    case Tok::dot: return "'.'";
    case Tok::question: return "'?'";
    case Tok::bang: return "'!'";
    case Tok::plus: return "'+'";
    case Tok::bar: return "'|'";
    case Tok::arrow: return "'=>'";
    case Tok::hash: return "'#'";
    case Tok::kw_chan: return "'chan'";
    case Tok::kw_run: return "'run'";
    case Tok::kw_new: return "'new'";
    case Tok::kw_dyn: return "'dyn'";
    case Tok::kw_type_error: return "'typeError'";
    case Tok::end: return "end of input";
  }
  return "?";
}

struct Token
{
  Tok kind;
  std::string text;
  Span span;
};

bool ident_start(unsigned char c) { return (std::isalpha(c) != 0 && c < 0x80) || c == '_'; }
bool ident_continue(unsigned char c) { return ident_start(c) || (c >= '0' && c <= '9') || c == '\''; }

class Lexer
{
public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run()
  {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      const int l = line_, c = col_;
      if (pos_ >= text_.size()) {
        out.push_back(Token{Tok::end, "", Span{l, c, l, c}});
        return out;
      }
      const auto ch = static_cast<unsigned char>(text_[pos_]);
      Token tok{Tok::end, "", {}};
      if (ident_start(ch)) {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && ident_continue(static_cast<unsigned char>(text_[pos_]))) advance();
        tok.text = std::string(text_.substr(start, pos_ - start));
        tok.kind = keyword(tok.text);
      } else if (ch >= '0' && ch <= '9') {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') advance();
        tok.text = std::string(text_.substr(start, pos_ - start));
        tok.kind = Tok::number;
      } else {
        tok.text = std::string(1, static_cast<char>(ch));
        switch (ch) {
          case '(': tok.kind = Tok::lparen; break;
          case ')': tok.kind = Tok::rparen; break;
          case '<': tok.kind = Tok::langle; break;
          case '>': tok.kind = Tok::rangle; break;
          case ',': tok.kind = Tok::comma; break;
          case ':': tok.kind = Tok::colon; break;
          case ';': tok.kind = Tok::semi; break;
          case '.': tok.kind = Tok::dot; break;
          case '?': tok.kind = Tok::question; break;
          case '!': tok.kind = Tok::bang; break;
          case '+': tok.kind = Tok::plus; break;
          case '|': tok.kind = Tok::bar; break;
          case '#': tok.kind = Tok::hash; break;
          case '=':
            if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
              advance();
              tok.kind = Tok::arrow;
              tok.text = "=>";
              break;
            }
            [[fallthrough]];
          default: {
            std::string shown = ch >= 0x20 && ch < 0x7f ? std::string("'") + static_cast<char>(ch) + "'"
                                                         : "byte 0x" + hex(ch);
            throw ParseError(ParseErrorKind::syntax, Span{l, c, l, c + 1}, "unexpected character " + shown);
          }
        }
        advance();
      }
      tok.span = Span{l, c, line_, col_};
      out.push_back(std::move(tok));
    }
  }

private:
  static std::string hex(unsigned char c)
  {
    const char* digits = "0123456789abcdef";
    return {digits[c >> 4], digits[c & 15]};
  }

  static Tok keyword(const std::string& s)
  {
    if (s == "chan") return Tok::kw_chan;
    if (s == "run") return Tok::kw_run;
    if (s == "new") return Tok::kw_new;
    if (s == "dyn") return Tok::kw_dyn;
    if (s == "typeError") return Tok::kw_type_error;
    return Tok::ident;
  }

  void advance()
  {
    const auto c = static_cast<unsigned char>(text_[pos_++]);
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else if ((c & 0xC0) != 0x80) {
      ++col_;  // UTF-8 continuation bytes do not start a column
    }
  }

  void skip_space()
  {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

Span cover(const Span& a, const Span& b) { return Span{a.line, a.column, b.end_line, b.end_column}; }

// ---------------------------------------------------------------------------
// Node builders for the two calculi. The grammar is shared; channels are
// read as CastChannel and the surface builder only ever sees bare ones.

struct SurfaceBuilder
{
  using Proc = SurfaceProcess;
  static constexpr bool casts = false;

  static Proc nil(Span s) { return surface::nil(s); }
  static Proc input(CastChannel subj, std::vector<Binder> b, Proc body, Span s)
  {
    return surface::input(std::move(subj.base), std::move(b), std::move(body), s);
  }
  static Proc output(CastChannel subj, std::vector<CastChannel> args, Proc body, bool reversed, Span s)
  {
    std::vector<Name> names;
    names.reserve(args.size());
    for (auto& a : args) names.push_back(std::move(a.base));
    return reversed ? surface::reverse_output(std::move(subj.base), std::move(names), std::move(body), s)
                    : surface::output(std::move(subj.base), std::move(names), std::move(body), s);
  }
  static Proc par(Proc l, Proc r, Span s) { return surface::par(std::move(l), std::move(r), s); }
  static Proc choice(Proc l, Proc r, Span s) { return surface::choice(std::move(l), std::move(r), s); }
  static Proc restrict(Name n, Type t, Proc body, Span s) { return surface::restrict(std::move(n), std::move(t), std::move(body), s); }
  static Proc replicate(Proc body, Span s) { return surface::replicate(std::move(body), s); }
  static Proc type_error(Span) { return nullptr; }
  static Span span(const Proc& p) { return p->span; }
};

struct CastBuilder
{
  using Proc = CastProcess;
  static constexpr bool casts = true;

  static Proc nil(Span s) { return cast::nil(s); }
  static Proc input(CastChannel subj, std::vector<Binder> b, Proc body, Span s)
  {
    return cast::input(std::move(subj), std::move(b), std::move(body), s);
  }
  static Proc output(CastChannel subj, std::vector<CastChannel> args, Proc body, bool, Span s)
  {
    return cast::output(std::move(subj), std::move(args), std::move(body), s);
  }
  static Proc par(Proc l, Proc r, Span s) { return cast::par(std::move(l), std::move(r), s); }
  static Proc choice(Proc l, Proc r, Span s) { return cast::choice(std::move(l), std::move(r), s); }
  static Proc restrict(Name n, Type t, Proc body, Span s) { return cast::restrict(std::move(n), std::move(t), std::move(body), s); }
  static Proc replicate(Proc body, Span s) { return cast::replicate(std::move(body), s); }
  static Proc type_error(Span s) { return cast::type_error(s); }
  static Span span(const Proc& p) { return p->span; }
};

constexpr int max_nesting = 3000;

template <class Builder>
class Parser
{
public:
  using Proc = typename Builder::Proc;

  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program()
  {
    Program prog;
    do {
      prog.units.push_back(unit());
    } while (!at(Tok::end));
    return prog;
  }

  Proc process_only()
  {
    Proc p = proc();
    expect_end();
    return p;
  }

  Type type_only()
  {
    Type t = type();
    expect_end();
    return t;
  }

private:
  // -- token helpers --------------------------------------------------------

  [[nodiscard]] const Token& peek(std::size_t ahead = 0) const
  {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  [[nodiscard]] bool at(Tok k) const { return peek().kind == k; }
  const Token& take()
  {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    last_end_ = t.span;
    return t;
  }
  bool accept(Tok k)
  {
    if (!at(k)) return false;
    take();
    return true;
  }
  const Token& expect(Tok k)
  {
    if (!at(k)) fail({spelling(k)});
    return take();
  }
  void expect_end()
  {
    if (!at(Tok::end)) fail({spelling(Tok::end)});
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const
  {
    const Token& t = peek();
    std::string found = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
    std::string msg = expected.size() == 1 ? "expected " + expected[0]
                                           : "expected one of {" + join(expected, ", ") + "}";
    throw ParseError(ParseErrorKind::syntax, t.span, msg + ", found " + found, std::move(expected));
  }

  struct Depth
  {
    explicit Depth(Parser& p) : parser(p)
    {
      if (++parser.depth_ > max_nesting) {
        throw ParseError(ParseErrorKind::syntax, parser.peek().span, "nesting too deep");
      }
    }
    ~Depth() { --parser.depth_; }
    Depth(const Depth&) = delete;
    Depth& operator=(const Depth&) = delete;
    Parser& parser;
  };

  // -- declarations ---------------------------------------------------------

  Unit unit()
  {
    Unit u;
    std::map<Name, Span> seen;
    while (at(Tok::kw_chan)) {
      const Span start = take().span;
      const Token& id = expect(Tok::ident);
      Name n{id.text};
      const Span name_span = id.span;
      expect(Tok::colon);
      Type t = type();
      expect(Tok::semi);
      if (seen.count(n) != 0) {
        throw ParseError(ParseErrorKind::duplicate_declaration, name_span,
                         "channel '" + n.base + "' is already declared at line " +
                             std::to_string(seen[n].line));
      }
      seen.emplace(n, name_span);
      u.env.bind(n, t);
      u.declarations.push_back(Declaration{n, std::move(t), cover(start, last_end_)});
    }
    if (!at(Tok::kw_run)) fail({spelling(Tok::kw_chan), spelling(Tok::kw_run)});
    take();
    u.proc = proc();
    if (!at(Tok::end) && !at(Tok::kw_chan) && !at(Tok::kw_run)) {
      fail({spelling(Tok::bar), spelling(Tok::plus), spelling(Tok::kw_chan), spelling(Tok::kw_run),
            spelling(Tok::end)});
    }
    return u;
  }

  Type type()
  {
    Depth d(*this);
    if (accept(Tok::kw_dyn)) return Type::dyn();
    if (at(Tok::ident) && (peek().text == "i" || peek().text == "o")) {
      const Capability cap = take().text == "i" ? Capability::input : Capability::output;
      expect(Tok::lparen);
      std::vector<Type> args;
      if (!at(Tok::rparen)) {
        args.push_back(type());
        while (accept(Tok::comma)) args.push_back(type());
      }
      if (!at(Tok::rparen)) fail({spelling(Tok::comma), spelling(Tok::rparen)});
      take();
      return Type::chan(cap, std::move(args));
    }
    fail({"'dyn'", "'i'", "'o'"});
  }

  // -- processes ------------------------------------------------------------

  Proc proc()
  {
    Depth d(*this);
    Proc left = sum();
    if (accept(Tok::bar)) {
      Proc right = proc();
      const Span s = cover(Builder::span(left), Builder::span(right));
      return Builder::par(std::move(left), std::move(right), s);
    }
    return left;
  }

  Proc sum()
  {
    Depth d(*this);
    Proc left = prefix();
    if (accept(Tok::plus)) {
      Proc right = sum();
      const Span s = cover(Builder::span(left), Builder::span(right));
      return Builder::choice(std::move(left), std::move(right), s);
    }
    return left;
  }

  std::vector<std::string> prefix_starts() const
  {
    std::vector<std::string> v{"'0'", spelling(Tok::ident), spelling(Tok::kw_new), spelling(Tok::bang),
                               spelling(Tok::lparen)};
    if (Builder::casts) v.push_back(spelling(Tok::kw_type_error));
    return v;
  }

  Proc prefix()
  {
    Depth d(*this);
    const Span start = peek().span;
    if (at(Tok::number)) {
      if (peek().text != "0") fail(prefix_starts());
      take();
      return Builder::nil(start);
    }
    if (Builder::casts && at(Tok::kw_type_error)) {
      take();
      return Builder::type_error(start);
    }
    if (accept(Tok::kw_new)) {
      expect(Tok::lparen);
      Name n = name();
      expect(Tok::colon);
      Type t = type();
      expect(Tok::rparen);
      Proc body = prefix();
      const Span s = cover(start, Builder::span(body));
      return Builder::restrict(std::move(n), std::move(t), std::move(body), s);
    }
    if (accept(Tok::bang)) {
      Proc body = prefix();
      const Span s = cover(start, Builder::span(body));
      return Builder::replicate(std::move(body), s);
    }
    if (at(Tok::lparen) && !starts_cast_chain()) {
      take();
      Proc inner = proc();
      expect(Tok::rparen);
      return inner;
    }
    if (at(Tok::ident) || at(Tok::lparen)) return action(start);
    fail(prefix_starts());
  }

  [[nodiscard]] bool starts_cast_chain() const
  {
    return Builder::casts && at(Tok::lparen) && peek(1).kind == Tok::ident &&
           (peek(2).kind == Tok::colon || peek(2).kind == Tok::hash);
  }

  Proc action(const Span& start)
  {
    CastChannel subject = channel();
    if (accept(Tok::question)) {
      expect(Tok::lparen);
      std::vector<Binder> binders;
      if (!at(Tok::rparen)) {
        binders.push_back(binder());
        while (accept(Tok::comma)) binders.push_back(binder());
      }
      if (!at(Tok::rparen)) fail({spelling(Tok::comma), spelling(Tok::rparen)});
      take();
      for (std::size_t i = 0; i < binders.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
          if (binders[i].name == binders[j].name) {
            throw ParseError(ParseErrorKind::syntax, last_end_,
                             "binder '" + binders[i].name.base + "' repeated in one input");
          }
        }
      }
      Span end = last_end_;
      Proc body = continuation(end);
      return Builder::input(std::move(subject), std::move(binders), std::move(body), cover(start, end));
    }
    if (accept(Tok::bang)) {
      const bool reversed = !Builder::casts && accept(Tok::bang);
      if (!at(Tok::langle)) {
        fail(Builder::casts || reversed ? std::vector<std::string>{spelling(Tok::langle)}
                                        : std::vector<std::string>{spelling(Tok::langle), spelling(Tok::bang)});
      }
      take();
      std::vector<CastChannel> args;
      if (!at(Tok::rangle)) {
        args.push_back(channel());
        while (accept(Tok::comma)) args.push_back(channel());
      }
      if (!at(Tok::rangle)) fail({spelling(Tok::comma), spelling(Tok::rangle)});
      take();
      Span end = last_end_;
      Proc body = continuation(end);
      return Builder::output(std::move(subject), std::move(args), std::move(body), reversed, cover(start, end));
    }
    fail({spelling(Tok::question), spelling(Tok::bang)});
  }

  // `.P` or nothing (sugar for `.0`); extends `end` to the body's span.
  Proc continuation(Span& end)
  {
    if (accept(Tok::dot)) {
      Proc body = prefix();
      end = Builder::span(body);
      return body;
    }
    return Builder::nil(Span{end.end_line, end.end_column, end.end_line, end.end_column});
  }

  Binder binder()
  {
    Name n = name();
    expect(Tok::colon);
    return Binder{std::move(n), type()};
  }

  Name name()
  {
    Name n{expect(Tok::ident).text};
    if (Builder::casts && accept(Tok::hash)) {
      const Token& num = expect(Tok::number);
      try {
        n.fresh = static_cast<unsigned>(std::stoul(num.text));
      } catch (const std::exception&) {
        throw ParseError(ParseErrorKind::syntax, num.span, "fresh index out of range");
      }
    }
    return n;
  }

  CastChannel channel()
  {
    if (!starts_cast_chain()) {
      if (!at(Tok::ident)) fail({spelling(Tok::ident)});
      return CastChannel{name()};
    }
    take();  // (
    CastChannel c{name()};
    expect(Tok::colon);
    Type from = type();
    const Span origin = last_end_;
    expect(Tok::arrow);
    do {
      Type to = type();
      c.casts.push_back(CastFrame{from, to, origin});
      from = std::move(to);
    } while (accept(Tok::arrow));
    if (!at(Tok::rparen)) fail({spelling(Tok::arrow), spelling(Tok::rparen)});
    take();
    return c;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Span last_end_{};
  int depth_ = 0;
};

// ---------------------------------------------------------------------------
// Post-parse validation: every free name of a unit is declared.

void check_declared(const SurfaceProcess& p, const TypeEnv& env, std::vector<Name>& bound)
{
  auto need = [&](const Name& n, const Span& where) {
    if (std::find(bound.begin(), bound.end(), n) != bound.end()) return;
    if (!env.contains(n)) {
      throw ParseError(ParseErrorKind::undeclared_name, where,
                       "channel '" + n.base + "' is used but not declared with 'chan'");
    }
  };
  std::visit(overloaded{
                 [](const surface::Nil&) {},
                 [&](const surface::Input& n) {
                   need(n.subject, p->span);
                   for (const auto& b : n.binders) bound.push_back(b.name);
                   check_declared(n.body, env, bound);
                   bound.resize(bound.size() - n.binders.size());
                 },
                 [&](const surface::Output& n) {
                   need(n.subject, p->span);
                   for (const auto& a : n.args) need(a, p->span);
                   check_declared(n.body, env, bound);
                 },
                 [&](const surface::Par& n) {
                   check_declared(n.left, env, bound);
                   check_declared(n.right, env, bound);
                 },
                 [&](const surface::Choice& n) {
                   check_declared(n.left, env, bound);
                   check_declared(n.right, env, bound);
                 },
                 [&](const surface::Restrict& n) {
                   bound.push_back(n.name);
                   check_declared(n.body, env, bound);
                   bound.pop_back();
                 },
                 [&](const surface::Replicate& n) { check_declared(n.body, env, bound); },
             },
             p->node);
}

}  // namespace

Program parse(std::string_view text)
{
  Parser<SurfaceBuilder> parser(Lexer(text).run());
  Program prog = parser.program();
  for (const auto& u : prog.units) {
    std::vector<Name> bound;
    check_declared(u.proc, u.env, bound);
  }
  return prog;
}

CastProcess parse_cast(std::string_view text)
{
  Parser<CastBuilder> parser(Lexer(text).run());
  return parser.process_only();
}

Type parse_type(std::string_view text)
{
  Parser<SurfaceBuilder> parser(Lexer(text).run());
  return parser.type_only();
}

}  // namespace gradpi
