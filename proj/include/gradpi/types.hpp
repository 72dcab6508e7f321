// gradpi/types.hpp - capability types, channel names and type environments
#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gradpi
{

enum class Capability { input, output };

inline Capability opposite(Capability c)
{
  return c == Capability::input ? Capability::output : Capability::input;
}

/// A gradual channel type: either `dyn` or `I(T1, ..., Tn)` with I in {i, o}.
///
/// Arity is part of the identity of a capability type, so `o(T)` and
/// `o(T, S)` are unrelated. Types are finite trees compared structurally.
class Type
{
public:
  Type() = default;  // dyn

  static Type dyn() { return Type{}; }
  static Type chan(Capability cap, std::vector<Type> args)
  {
    Type t;
    t.cap_ = cap;
    t.args_ = std::move(args);
    return t;
  }
  static Type in(std::vector<Type> args) { return chan(Capability::input, std::move(args)); }
  static Type out(std::vector<Type> args) { return chan(Capability::output, std::move(args)); }
  /// `I(dyn, ..., dyn)` with the given arity.
  static Type dyn_chan(Capability cap, std::size_t arity)
  {
    return chan(cap, std::vector<Type>(arity, dyn()));
  }

  [[nodiscard]] bool is_dyn() const { return !cap_.has_value(); }
  [[nodiscard]] bool is_chan(Capability c) const { return cap_ == c; }
  /// Precondition: !is_dyn().
  [[nodiscard]] Capability capability() const { return *cap_; }
  [[nodiscard]] const std::vector<Type>& args() const { return args_; }
  [[nodiscard]] std::size_t arity() const { return args_.size(); }

  friend bool operator==(const Type& a, const Type& b)
  {
    return a.cap_ == b.cap_ && a.args_ == b.args_;
  }

private:
  std::optional<Capability> cap_;
  std::vector<Type> args_;
};

/// A channel name. User-written names always have fresh == 0; alpha-renaming
/// bumps the fresh index and keeps the base.
struct Name
{
  std::string base;
  unsigned fresh = 0;

  Name() = default;
  Name(std::string b, unsigned f = 0) : base(std::move(b)), fresh(f) {}  // NOLINT
  Name(const char* b) : base(b) {}                                       // NOLINT

  friend bool operator==(const Name&, const Name&) = default;
  friend auto operator<=>(const Name&, const Name&) = default;
};

/// Source range, 1-based line and column; a default Span means "no source".
struct Span
{
  int line = 0;
  int column = 0;
  int end_line = 0;
  int end_column = 0;

  [[nodiscard]] bool valid() const { return line > 0; }
  [[nodiscard]] bool contains(const Span& inner) const
  {
    auto before = [](int l1, int c1, int l2, int c2) { return l1 < l2 || (l1 == l2 && c1 <= c2); };
    return before(line, column, inner.line, inner.column) &&
           before(inner.end_line, inner.end_column, end_line, end_column);
  }
  friend bool operator==(const Span&, const Span&) = default;
};

class UnboundName : public std::out_of_range
{
public:
  explicit UnboundName(const Name& n);
  Name name;
};

/// Finite map from names to types. Extension shadows; lookup of an unbound
/// name throws UnboundName instead of defaulting to anything.
class TypeEnv
{
public:
  TypeEnv() = default;

  [[nodiscard]] TypeEnv extended(const Name& n, Type t) const
  {
    TypeEnv e = *this;
    e.bind(n, std::move(t));
    return e;
  }
  void bind(const Name& n, Type t) { bindings_.insert_or_assign(n, std::move(t)); }

  [[nodiscard]] const Type& lookup(const Name& n) const;
  [[nodiscard]] const Type* find(const Name& n) const
  {
    auto it = bindings_.find(n);
    return it == bindings_.end() ? nullptr : &it->second;
  }
  [[nodiscard]] bool contains(const Name& n) const { return bindings_.count(n) != 0; }
  [[nodiscard]] bool empty() const { return bindings_.empty(); }
  [[nodiscard]] std::size_t size() const { return bindings_.size(); }

  [[nodiscard]] auto begin() const { return bindings_.begin(); }
  [[nodiscard]] auto end() const { return bindings_.end(); }

  friend bool operator==(const TypeEnv&, const TypeEnv&) = default;

private:
  std::map<Name, Type> bindings_;
};

}  // namespace gradpi
