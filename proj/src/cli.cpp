#include "gradpi/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "gradpi/castinsert.hpp"
#include "gradpi/parser.hpp"
#include "gradpi/runtime.hpp"
#include "gradpi/typecheck.hpp"

namespace gradpi::cli
{

namespace
{

std::optional<std::string> slurp(const std::string& path, std::ostream& err)
{
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    err << "gpi: cannot read '" << path << "'\n";
    return std::nullopt;
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Reads and parses `path`; on failure reports and sets `code`.
std::optional<Program> load(const std::string& path, std::ostream& err, int& code)
{
  const auto text = slurp(path, err);
  if (!text) {
    code = exit_usage;
    return std::nullopt;
  }
  try {
    return parse(*text);
  } catch (const ParseError& e) {
    err << path << ":" << e.what() << "\n";
    code = exit_parse_error;
    return std::nullopt;
  }
}

void report(const std::string& path, const CheckResult& r, std::ostream& os)
{
  for (const auto& d : r.diagnostics) {
    os << path << ":" << d.span.line << ":" << d.span.column << ": " << d.message() << "\n";
  }
}

int exit_for(HaltKind k)
{
  switch (k) {
    case HaltKind::normal_stuck: return exit_ok;
    case HaltKind::type_error:
    case HaltKind::malformed_cast: return exit_type_error;
    case HaltKind::max_steps:
    case HaltKind::depth_exceeded: return exit_bound;
    case HaltKind::aborted: return exit_usage;
  }
  return exit_usage;
}

std::optional<std::size_t> ask(const Configuration& cfg, const std::vector<Redex>& redexes, std::istream& in,
                                std::ostream& err)
{
  err << "configuration: " << print_configuration(cfg) << "\n";
  for (std::size_t k = 0; k < redexes.size(); ++k) {
    err << "  [" << k + 1 << "] " << describe(redexes[k], cfg) << "\n";
  }
  for (;;) {
    err << "choose 1-" << redexes.size() << " (q to quit)> " << std::flush;
    std::string line;
    if (!std::getline(in, line)) {
      err << "\n";
      return std::nullopt;
    }
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
    if (line == "q" || line == "quit") return std::nullopt;
    try {
      std::size_t used = 0;
      const unsigned long k = std::stoul(line, &used);
      if (used == line.size() && k >= 1 && k <= redexes.size()) return k - 1;
    } catch (const std::exception&) {
    }
    err << "not a choice: " << line << "\n";
  }
}

}  // namespace

int cmd_check(const std::string& path, const CheckOptions& opts, std::ostream& out, std::ostream& err)
{
  int code = exit_ok;
  auto program = load(path, err, code);
  if (!program) return code;
  const CheckResult r = opts.static_only ? check_static(*program) : check(*program);
  if (r.ok()) {
    out << "ok\n";
    return exit_ok;
  }
  report(path, r, out);
  return exit_rejected;
}

int cmd_compile(const std::string& path, const CompileOptions& opts, std::ostream& out, std::ostream& err)
{
  int code = exit_ok;
  auto program = load(path, err, code);
  if (!program) return code;
  const CheckResult r = check(*program);
  if (!r.ok()) {
    report(path, r, err);
    return exit_rejected;
  }
  std::vector<CastSite> sites;
  for (const auto& u : program->units) {
    CompilationOutput c = insert_casts(u.env, u.proc);
    out << print_cast(c.proc) << "\n";
    sites.insert(sites.end(), c.sites.begin(), c.sites.end());
  }
  if (opts.show_sites) {
    out << "cast sites:\n";
    for (const auto& s : sites) {
      out << "  " << s.span.line << ":" << s.span.column << ": [" << s.rule << "] " << print_type(s.source)
          << " => " << print_type(s.target) << (s.elided ? " elided-trivial" : "") << "\n";
    }
  }
  return exit_ok;
}

int cmd_run(const std::string& path, const RunOptions& opts, std::istream& in, std::ostream& out, std::ostream& err)
{
  int code = exit_ok;
  auto program = load(path, err, code);
  if (!program) return code;
  const CheckResult r = check(*program);
  if (!r.ok()) {
    report(path, r, err);
    return exit_rejected;
  }
  const Configuration cfg = normalize(insert_casts(*program).proc);

  switch (opts.mode) {
    case Mode::seeded:
    case Mode::interactive: {
      RunReport report = opts.mode == Mode::seeded
                             ? run(cfg, SeededScheduler{opts.seed, opts.max_steps})
                             : run(cfg, InteractiveScheduler{[&](const Configuration& c, const std::vector<Redex>& rs) {
                                                               return ask(c, rs, in, err);
                                                             },
                                                             opts.max_steps});
      const Trace& t = report.traces.front();
      if (opts.trace) {
        out << t.format();
      } else {
        out << "HALT: " << t.halt.describe() << "\n";
      }
      return exit_for(t.halt.kind);
    }
    case Mode::exhaustive: {
      RunReport report = run(cfg, ExhaustiveScheduler{opts.depth});
      const auto statuses = report.statuses();
      out << "terminal: {";
      bool first = true;
      for (HaltKind k : statuses) {
        out << (first ? "" : ", ") << to_string(k);
        first = false;
      }
      out << "}\n";
      out << "explored: " << report.explored << "\n";
      for (const auto& t : report.traces) {
        out << "witness " << to_string(t.halt.kind) << ":\n" << t.format();
      }
      if (statuses.count(HaltKind::type_error) != 0 || statuses.count(HaltKind::malformed_cast) != 0) {
        return exit_type_error;
      }
      if (statuses.count(HaltKind::depth_exceeded) != 0 || statuses.count(HaltKind::max_steps) != 0) {
        return exit_bound;
      }
      return exit_ok;
    }
  }
  return exit_usage;
}

int main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err)
{
  CLI::App app{"gpi - gradually typed pi-calculus workbench"};
  app.require_subcommand(1);
  app.footer(
      "Exit status: 0 ok or normal-stuck, 1 rejected by the checker, 2 run-time type error,\n"
      "3 parse error, 4 usage error or aborted run, 5 step or depth bound reached.");

  std::string path;
  CheckOptions check_opts;
  auto* check_cmd = app.add_subcommand("check", "type-check a .gpi file");
  check_cmd->add_option("file", path, ".gpi program")->required();
  check_cmd->add_flag("--static", check_opts.static_only, "use type equality instead of consistency");

  CompileOptions compile_opts;
  auto* compile_cmd = app.add_subcommand("compile", "insert casts and print the compiled program");
  compile_cmd->add_option("file", path, ".gpi program")->required();
  compile_cmd->add_flag("--show-sites", compile_opts.show_sites, "list every cast site, including elided ones");

  RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "compile and execute a .gpi file");
  run_cmd->add_option("file", path, ".gpi program")->required();
  run_cmd->add_option("--mode", run_opts.mode, "seeded, exhaustive or interactive")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Mode>{
              {"seeded", Mode::seeded}, {"exhaustive", Mode::exhaustive}, {"interactive", Mode::interactive}},
          CLI::ignore_case)
                     .description(""))
      ->option_text("MODE [seeded]");
  run_cmd->add_option("--seed", run_opts.seed, "seed of the random scheduler")->default_val(0);
  run_cmd->add_option("--max-steps", run_opts.max_steps, "step bound for seeded and interactive runs")
      ->default_val(1000)
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--depth", run_opts.depth, "depth bound for exhaustive runs")
      ->default_val(20)
      ->check(CLI::PositiveNumber);
  run_cmd->add_flag("--trace", run_opts.trace, "print every reduction event");
  run_cmd->footer(
      "Trace lines read '#<n> [<rule>] <before> --> <after>'; the last line is\n"
      "'HALT: <normal-stuck | type-error(<cast> at L:C) | malformed-cast(...) | max-steps | depth-exceeded>'.\n"
      "Interactive mode prompts on stderr and reads one choice per line from stdin; 'q' aborts.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (const auto* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "gpi: " << e.what() << "\n" << "run 'gpi --help' for usage\n";
    return exit_usage;
  }

  if (check_cmd->parsed()) return cmd_check(path, check_opts, out, err);
  if (compile_cmd->parsed()) return cmd_compile(path, compile_opts, out, err);
  return cmd_run(path, run_opts, in, out, err);
}

}  // namespace gradpi::cli
