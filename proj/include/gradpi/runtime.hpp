// gradpi/runtime.hpp - configurations, cast resolution, reduction and schedulers
//
// A Configuration is the canonical representative of a process up to
// structural congruence: restrictions hoisted to the top (renamed apart),
// and a multiset of threads, each headed by an input, output, choice,
// replication or typeError.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gradpi/syntax.hpp"

namespace gradpi
{

enum class HaltKind { normal_stuck, type_error, malformed_cast, max_steps, depth_exceeded, aborted };

const char* to_string(HaltKind k);

/// The cast that failed, with the subject as it stood when resolution gave up.
struct CastFailure
{
  std::string rule;  // c-out-fail, c-in-fail, or malformed
  CastChannel subject;
  Span origin;
};

struct Halt
{
  HaltKind kind = HaltKind::normal_stuck;
  std::optional<CastFailure> failure;

  /// "normal-stuck", "type-error((x : o() => i()) at 3:7)", ...
  [[nodiscard]] std::string describe() const;
};

struct Configuration
{
  std::vector<std::pair<Name, Type>> restrictions;
  std::vector<CastProcess> threads;
  std::optional<Halt> halted;  // set only for type errors
  std::set<Name> reserved;     // free names of the original program

  /// Every name that a fresh restriction must avoid.
  [[nodiscard]] std::set<Name> used_names() const;
};

/// Flattens `p` into a configuration. Free names of `p` become reserved.
Configuration normalize(const CastProcess& p);

/// Adds `p` to an existing configuration, extruding its restrictions with
/// fresh names where they clash.
void absorb(Configuration& cfg, const CastProcess& p);

enum class RedexKind { comm, csolve, choice_left, choice_right, replicate_unfold };

const char* to_string(RedexKind k);

struct Redex
{
  RedexKind kind;
  /// comm/csolve: {input thread, output thread}; otherwise {thread}.
  std::vector<std::size_t> participants;
  std::optional<Name> channel;

  friend bool operator==(const Redex&, const Redex&) = default;
};

/// Every applicable redex, in a fixed order: per thread (ascending) its
/// choice and unfold redexes, then its communications with later threads.
std::vector<Redex> enumerate_redexes(const Configuration& cfg);

std::string describe(const Redex& r, const Configuration& cfg);

struct TraceEvent
{
  std::size_t index = 0;
  std::string rule;
  std::string before;
  std::string after;

  [[nodiscard]] std::string format() const;
};

/// Outcome of one cast-resolution pass. `failure` is set for typeError and
/// malformed casts; otherwise the subject of the result is bare.
struct OutputResolution
{
  CastProcess output;
  std::vector<TraceEvent> events;
  std::optional<CastFailure> failure;
  bool malformed = false;
};

struct InputResolution
{
  CastProcess input;
  CastProcess output;
  std::vector<TraceEvent> events;
  std::optional<CastFailure> failure;
  bool malformed = false;
};

/// Applies c-out-* rules until the subject is bare or a cast fails.
OutputResolution resolve_output_casts(const CastProcess& out);

/// Applies c-in-* rules; `out` must have a bare subject.
InputResolution resolve_input_casts(const CastProcess& inp, const CastProcess& out);

struct StepResult
{
  Configuration next;
  std::vector<TraceEvent> events;  // indices left at 0
};

/// Throws std::out_of_range for a redex that does not fit `cfg`.
StepResult step(const Configuration& cfg, const Redex& r);

/// Prints the threads joined by " | ", restrictions first as "new (x:T)".
std::string print_configuration(const Configuration& cfg);

/// Equal for configurations that are equal up to renaming of restricted
/// names and reordering of threads.
std::string configuration_key(const Configuration& cfg);

// ---------------------------------------------------------------------------
// Schedulers

struct Trace
{
  std::vector<TraceEvent> events;
  Halt halt;

  [[nodiscard]] std::string format() const;  // one line per event + HALT line
};

struct SeededScheduler
{
  std::uint64_t seed = 0;
  std::size_t max_steps = 1000;
};

struct ExhaustiveScheduler
{
  std::size_t depth = 20;
  std::size_t max_states = 200000;
};

/// Returns the chosen index into `redexes`, or nullopt to abort.
using ChoiceCallback =
    std::function<std::optional<std::size_t>(const Configuration&, const std::vector<Redex>&)>;

struct InteractiveScheduler
{
  ChoiceCallback choose;
  std::size_t max_steps = 1000;
};

struct RunReport
{
  /// Seeded and interactive runs: exactly one trace. Exhaustive runs: one
  /// witness per distinct terminal status, ordered by HaltKind.
  std::vector<Trace> traces;
  std::size_t explored = 0;  // distinct configurations (exhaustive only)

  [[nodiscard]] std::set<HaltKind> statuses() const;
};

RunReport run(const Configuration& cfg, const SeededScheduler& s);
RunReport run(const Configuration& cfg, const ExhaustiveScheduler& s);
RunReport run(const Configuration& cfg, const InteractiveScheduler& s);

}  // namespace gradpi
