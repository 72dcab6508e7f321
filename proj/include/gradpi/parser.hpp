// gradpi/parser.hpp - concrete syntax of .gpi files and pretty-printers
//
//   file    ::= unit+
//   unit    ::= ("chan" NAME ":" type ";")* "run" proc
//   type    ::= "dyn" | "i" "(" [type ("," type)*] ")" | "o" "(" ... ")"
//   proc    ::= sum ["|" proc]
//   sum     ::= prefix ["+" sum]
//   prefix  ::= "0" | NAME "?" "(" [NAME ":" type ("," ...)*] ")" ["." prefix]
//             | NAME "!" "<" [NAME ("," NAME)*] ">" ["." prefix]
//             | NAME "!!" "<" ... ">" ["." prefix]
//             | "new" "(" NAME ":" type ")" prefix | "!" prefix | "(" proc ")"
//
// Line comments start with "--". Each unit is checked under its own
// declarations; equal free names in different units denote the same channel.
//
// parse_cast() reads the cast calculus as printed by print_cast(): subjects
// and arguments may be chains "(x : T1 => T2 => T3)", names may carry a
// fresh index "x#2", and "typeError" is a process.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gradpi/syntax.hpp"

namespace gradpi
{

enum class ParseErrorKind { syntax, undeclared_name, duplicate_declaration };

class ParseError : public std::runtime_error
{
public:
  ParseError(ParseErrorKind kind, Span where, const std::string& message, std::vector<std::string> expected = {});

  ParseErrorKind kind;
  Span where;
  std::vector<std::string> expected;
};

struct Declaration
{
  Name name;
  Type type;
  Span span;
};

/// One `chan ...; run P` block.
struct Unit
{
  TypeEnv env;
  std::vector<Declaration> declarations;
  SurfaceProcess proc;
};

struct Program
{
  std::vector<Unit> units;
};

Program parse(std::string_view text);
CastProcess parse_cast(std::string_view text);
Type parse_type(std::string_view text);

std::string print_type(const Type& t);
std::string print_name(const Name& n);
std::string print_channel(const CastChannel& c);
std::string print_frame(const CastFrame& f);
std::string print_surface(const SurfaceProcess& p);
std::string print_cast(const CastProcess& p);

}  // namespace gradpi
