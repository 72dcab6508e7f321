// gradpi/cli.hpp - the `gpi` command line: check, compile, run
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace gradpi::cli
{

enum ExitCode : int {
  exit_ok = 0,
  exit_rejected = 1,
  exit_type_error = 2,
  exit_parse_error = 3,
  exit_usage = 4,
  exit_bound = 5,
};

struct CheckOptions
{
  bool static_only = false;
};

struct CompileOptions
{
  bool show_sites = false;
};

enum class Mode { seeded, exhaustive, interactive };

struct RunOptions
{
  Mode mode = Mode::seeded;
  std::uint64_t seed = 0;
  std::size_t max_steps = 1000;
  std::size_t depth = 20;
  bool trace = false;
};

int cmd_check(const std::string& path, const CheckOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compile(const std::string& path, const CompileOptions& opts, std::ostream& out, std::ostream& err);
/// `in` feeds interactive choices; prompts go to `err`, traces to `out`.
int cmd_run(const std::string& path, const RunOptions& opts, std::istream& in, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace gradpi::cli
