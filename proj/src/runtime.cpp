#include "gradpi/runtime.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "gradpi/parser.hpp"

namespace gradpi
{

const char* to_string(HaltKind k)
{
  switch (k) {
    case HaltKind::normal_stuck: return "normal-stuck";
    case HaltKind::type_error: return "type-error";
    case HaltKind::malformed_cast: return "malformed-cast";
    case HaltKind::max_steps: return "max-steps";
    case HaltKind::depth_exceeded: return "depth-exceeded";
    case HaltKind::aborted: return "aborted";
  }
  return "?";
}

const char* to_string(RedexKind k)
{
  switch (k) {
    case RedexKind::comm: return "comm";
    case RedexKind::csolve: return "c-solve";
    case RedexKind::choice_left: return "choice-left";
    case RedexKind::choice_right: return "choice-right";
    case RedexKind::replicate_unfold: return "replicate";
  }
  return "?";
}

std::string Halt::describe() const
{
  std::string out = to_string(kind);
  if (failure && (kind == HaltKind::type_error || kind == HaltKind::malformed_cast)) {
    out += "(" + print_channel(failure->subject);
    if (failure->origin.valid()) {
      out += " at " + std::to_string(failure->origin.line) + ":" + std::to_string(failure->origin.column);
    }
    out += ")";
  }
  return out;
}

std::string TraceEvent::format() const
{
  return "#" + std::to_string(index) + " [" + rule + "] " + before + " --> " + after;
}

std::string Trace::format() const
{
  std::string out;
  for (const auto& e : events) out += e.format() + "\n";
  out += "HALT: " + halt.describe() + "\n";
  return out;
}

std::set<HaltKind> RunReport::statuses() const
{
  std::set<HaltKind> s;
  for (const auto& t : traces) s.insert(t.halt.kind);
  return s;
}

// ---------------------------------------------------------------------------
// Normal form

std::set<Name> Configuration::used_names() const
{
  std::set<Name> used = reserved;
  for (const auto& r : restrictions) used.insert(r.first);
  return used;
}

void absorb(Configuration& cfg, const CastProcess& p)
{
  std::visit(overloaded{
                 [](const cast::Nil&) {},
                 [&](const cast::Par& n) {
                   absorb(cfg, n.left);
                   absorb(cfg, n.right);
                 },
                 [&](const cast::Restrict& n) {
                   Name name = n.name;
                   CastProcess body = n.body;
                   std::set<Name> used = cfg.used_names();
                   if (used.count(name) != 0) {
                     used.merge(free_names(body));
                     const Name renamed = fresh_variant(name, used);
                     body = substitute(body, Substitution{{name, CastChannel{renamed}}});
                     name = renamed;
                   }
                   cfg.restrictions.emplace_back(name, n.type);
                   absorb(cfg, body);
                 },
                 [&](const cast::TypeError&) {
                   cfg.threads.push_back(p);
                   if (!cfg.halted) cfg.halted = Halt{HaltKind::type_error, std::nullopt};
                 },
                 [&](const auto&) { cfg.threads.push_back(p); },
             },
             p->node);
}

Configuration normalize(const CastProcess& p)
{
  Configuration cfg;
  cfg.reserved = free_names(p);
  absorb(cfg, p);
  return cfg;
}

std::string print_configuration(const Configuration& cfg)
{
  std::string out;
  for (const auto& [n, t] : cfg.restrictions) out += "new (" + print_name(n) + ":" + print_type(t) + ") ";
  if (cfg.threads.empty()) return out + "0";
  for (std::size_t i = 0; i < cfg.threads.size(); ++i) {
    if (i != 0) out += " | ";
    out += print_cast(cfg.threads[i]);
  }
  return out;
}

std::string configuration_key(const Configuration& cfg)
{
  std::map<Name, Type> restricted;
  for (const auto& [n, t] : cfg.restrictions) restricted.emplace(n, t);

  // First pass: order threads by a key that hides which restriction is which.
  const FreeNameRenderer anonymous = [&](const Name& n) {
    auto it = restricted.find(n);
    if (it != restricted.end()) return "@" + print_type(it->second);
    return "'" + print_name(n);
  };
  std::vector<std::pair<std::string, std::size_t>> order;
  for (std::size_t i = 0; i < cfg.threads.size(); ++i) {
    order.emplace_back(canonical_key(cfg.threads[i], anonymous), i);
  }
  std::sort(order.begin(), order.end());

  // Second pass: number restrictions by first occurrence in that order.
  std::map<Name, std::size_t> numbering;
  const FreeNameRenderer numbered = [&](const Name& n) {
    auto it = restricted.find(n);
    if (it == restricted.end()) return "'" + print_name(n);
    const std::size_t idx = numbering.emplace(n, numbering.size()).first->second;
    return "@" + std::to_string(idx) + ":" + print_type(it->second);
  };
  std::string key;
  for (const auto& [_, i] : order) key += canonical_key(cfg.threads[i], numbered) + "|";

  std::vector<std::string> unused;
  for (const auto& [n, t] : cfg.restrictions) {
    if (numbering.count(n) == 0) unused.push_back(print_type(t));
  }
  std::sort(unused.begin(), unused.end());
  key += "/";
  for (const auto& u : unused) key += u + ",";
  if (cfg.halted) key += "/" + cfg.halted->describe();
  return key;
}

// ---------------------------------------------------------------------------
// Redexes

namespace
{

struct Head
{
  Name channel;
  Capability polarity;
  std::size_t arity;
};

void collect_heads(const CastProcess& p, std::vector<Head>& out)
{
  std::visit(overloaded{
                 [&](const cast::Input& n) {
                   out.push_back(Head{ch(n.subject), Capability::input, n.binders.size()});
                 },
                 [&](const cast::Output& n) {
                   out.push_back(Head{ch(n.subject), Capability::output, n.args.size()});
                 },
                 [&](const cast::Par& n) {
                   collect_heads(n.left, out);
                   collect_heads(n.right, out);
                 },
                 [&](const cast::Choice& n) {
                   collect_heads(n.left, out);
                   collect_heads(n.right, out);
                 },
                 [&](const cast::Restrict& n) {
                   std::vector<Head> inner;
                   collect_heads(n.body, inner);
                   for (auto& h : inner) {
                     if (!(h.channel == n.name)) out.push_back(std::move(h));
                   }
                 },
                 [&](const cast::Replicate& n) { collect_heads(n.body, out); },
                 [](const auto&) {},
             },
             p->node);
}

bool complementary(const Head& a, const Head& b)
{
  return a.channel == b.channel && a.polarity != b.polarity && a.arity == b.arity;
}

bool unfold_useful(const Configuration& cfg, std::size_t i, const cast::Replicate& rep)
{
  std::vector<Head> own;
  collect_heads(rep.body, own);
  if (own.empty()) return false;
  std::vector<Head> others = own;
  for (std::size_t j = 0; j < cfg.threads.size(); ++j) {
    if (j != i) collect_heads(cfg.threads[j], others);
  }
  for (const auto& h : own) {
    for (const auto& o : others) {
      if (complementary(h, o)) return true;
    }
  }
  return false;
}

const cast::Input* as_input(const CastProcess& p) { return std::get_if<cast::Input>(&p->node); }
const cast::Output* as_output(const CastProcess& p) { return std::get_if<cast::Output>(&p->node); }

std::string print_pair(const CastProcess& a, const CastProcess& b) { return print_cast(cast::par(a, b)); }

}  // namespace

std::vector<Redex> enumerate_redexes(const Configuration& cfg)
{
  std::vector<Redex> out;
  const auto& ts = cfg.threads;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (std::holds_alternative<cast::Choice>(ts[i]->node)) {
      out.push_back(Redex{RedexKind::choice_left, {i}, std::nullopt});
      out.push_back(Redex{RedexKind::choice_right, {i}, std::nullopt});
    }
    if (const auto* rep = std::get_if<cast::Replicate>(&ts[i]->node); rep && unfold_useful(cfg, i, *rep)) {
      out.push_back(Redex{RedexKind::replicate_unfold, {i}, std::nullopt});
    }
    for (std::size_t j = i + 1; j < ts.size(); ++j) {
      std::size_t in_idx = i;
      std::size_t out_idx = j;
      const cast::Input* in = as_input(ts[i]);
      const cast::Output* o = as_output(ts[j]);
      if (in == nullptr || o == nullptr) {
        in = as_input(ts[j]);
        o = as_output(ts[i]);
        in_idx = j;
        out_idx = i;
      }
      if (in == nullptr || o == nullptr) continue;
      if (!(ch(in->subject) == ch(o->subject)) || in->binders.size() != o->args.size()) continue;
      const bool bare = in->subject.bare() && o->subject.bare();
      out.push_back(Redex{bare ? RedexKind::comm : RedexKind::csolve, {in_idx, out_idx}, ch(in->subject)});
    }
  }
  return out;
}

std::string describe(const Redex& r, const Configuration& cfg)
{
  std::string out = to_string(r.kind);
  if (r.channel) out += " on " + print_name(*r.channel);
  out += ": ";
  if (r.participants.size() == 2) {
    out += print_pair(cfg.threads.at(r.participants[0]), cfg.threads.at(r.participants[1]));
  } else {
    out += print_cast(cfg.threads.at(r.participants.at(0)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cast resolution

namespace
{

TraceEvent event(std::string rule, std::string before, std::string after)
{
  return TraceEvent{0, std::move(rule), std::move(before), std::move(after)};
}

/// c-*-expand on the outermost frame: dyn becomes I(dyn,...,dyn). The chain
/// node is shared with the next inner frame, whose target changes too.
void expand_source(CastChannel& subject, Capability cap)
{
  CastFrame& f = subject.casts.back();
  const Type expanded = Type::dyn_chan(cap, f.target.arity());
  f.source = expanded;
  if (subject.casts.size() >= 2) subject.casts[subject.casts.size() - 2].target = expanded;
}

enum class Verdict { expand_target, fail, malformed, expand_source, succeed };

/// Classifies the outermost frame of a subject used with capability `cap`
/// and `arity` arguments.
Verdict classify(const CastFrame& f, Capability cap, std::size_t arity)
{
  if (f.target.is_dyn()) return Verdict::expand_target;
  if (!f.target.is_chan(cap)) return Verdict::fail;
  if (f.target.arity() != arity) return Verdict::malformed;
  if (f.source.is_dyn()) return Verdict::expand_source;
  if (!f.source.is_chan(cap) || f.source.arity() != f.target.arity()) return Verdict::fail;
  return Verdict::succeed;
}

/// Pushes the contravariant frames Si => Ti of a popped frame onto the
/// arguments of an output.
void distribute(std::vector<CastChannel>& args, const CastFrame& f)
{
  for (std::size_t k = 0; k < args.size(); ++k) {
    args[k] = args[k].pushed(f.target.args()[k], f.source.args()[k], f.origin);
  }
}

}  // namespace

OutputResolution resolve_output_casts(const CastProcess& out)
{
  const auto* o = as_output(out);
  if (o == nullptr) throw std::invalid_argument("resolve_output_casts: not an output");
  OutputResolution res;
  CastChannel subject = o->subject;
  std::vector<CastChannel> args = o->args;
  CastProcess current = out;
  auto rebuild = [&] { return cast::output(subject, args, o->body, out->span); };

  while (!subject.bare()) {
    const CastFrame f = subject.casts.back();
    const std::string before = print_cast(current);
    switch (classify(f, Capability::output, args.size())) {
      case Verdict::expand_target:
        subject.casts.back().target = Type::dyn_chan(Capability::output, args.size());
        current = rebuild();
        res.events.push_back(event("c-out-expand", before, print_cast(current)));
        continue;
      case Verdict::expand_source:
        expand_source(subject, Capability::output);
        current = rebuild();
        res.events.push_back(event("c-out-expand", before, print_cast(current)));
        continue;
      case Verdict::fail:
        res.failure = CastFailure{"c-out-fail", subject, f.origin};
        res.events.push_back(event("c-out-fail", before, "typeError"));
        res.output = cast::type_error(out->span);
        return res;
      case Verdict::malformed:
        res.failure = CastFailure{"malformed", subject, f.origin};
        res.malformed = true;
        res.output = current;
        return res;
      case Verdict::succeed:
        distribute(args, f);
        subject.casts.pop_back();
        current = rebuild();
        res.events.push_back(event("c-out-succeed", before, print_cast(current)));
        continue;
    }
  }
  res.output = current;
  return res;
}

InputResolution resolve_input_casts(const CastProcess& inp, const CastProcess& out)
{
  const auto* in = as_input(inp);
  const auto* o = as_output(out);
  if (in == nullptr || o == nullptr) throw std::invalid_argument("resolve_input_casts: not an input/output pair");
  if (!o->subject.bare()) throw std::invalid_argument("resolve_input_casts: output subject still has casts");
  InputResolution res;
  CastChannel subject = in->subject;
  std::vector<Binder> binders = in->binders;
  std::vector<CastChannel> args = o->args;
  CastProcess cur_in = inp;
  CastProcess cur_out = out;
  auto rebuild = [&] {
    cur_in = cast::input(subject, binders, in->body, inp->span);
    cur_out = cast::output(o->subject, args, o->body, out->span);
  };

  while (!subject.bare()) {
    const CastFrame f = subject.casts.back();
    const std::string before = print_pair(cur_in, cur_out);
    switch (classify(f, Capability::input, binders.size())) {
      case Verdict::expand_target:
        subject.casts.back().target = Type::dyn_chan(Capability::input, binders.size());
        rebuild();
        res.events.push_back(event("c-in-expand", before, print_pair(cur_in, cur_out)));
        continue;
      case Verdict::expand_source:
        expand_source(subject, Capability::input);
        rebuild();
        res.events.push_back(event("c-in-expand", before, print_pair(cur_in, cur_out)));
        continue;
      case Verdict::fail:
        res.failure = CastFailure{"c-in-fail", subject, f.origin};
        res.events.push_back(event("c-in-fail", before, "typeError"));
        res.input = cast::type_error(inp->span);
        res.output = cur_out;
        return res;
      case Verdict::malformed:
        res.failure = CastFailure{"malformed", subject, f.origin};
        res.malformed = true;
        res.input = cur_in;
        res.output = cur_out;
        return res;
      case Verdict::succeed:
        for (std::size_t k = 0; k < binders.size(); ++k) binders[k].type = f.source.args()[k];
        distribute(args, f);
        subject.casts.pop_back();
        rebuild();
        res.events.push_back(event("c-in-succeed", before, print_pair(cur_in, cur_out)));
        continue;
    }
  }
  res.input = cur_in;
  res.output = cur_out;
  return res;
}

// ---------------------------------------------------------------------------
// Steps

namespace
{

Configuration without(const Configuration& cfg, std::vector<std::size_t> drop)
{
  Configuration next = cfg;
  std::sort(drop.begin(), drop.end());
  for (auto it = drop.rbegin(); it != drop.rend(); ++it) next.threads.erase(next.threads.begin() + static_cast<long>(*it));
  return next;
}

/// The (comm) rule on a pair with bare subjects: returns the continuations.
std::pair<CastProcess, CastProcess> communicate(const CastProcess& inp, const CastProcess& out)
{
  const auto& in = std::get<cast::Input>(inp->node);
  const auto& o = std::get<cast::Output>(out->node);
  Substitution m;
  for (std::size_t k = 0; k < in.binders.size(); ++k) m.emplace(in.binders[k].name, o.args[k]);
  return {substitute(in.body, m), o.body};
}

void check_pair(const Configuration& cfg, const Redex& r)
{
  if (r.participants.size() != 2) throw std::out_of_range("communication redex needs two threads");
  const auto* in = as_input(cfg.threads.at(r.participants[0]));
  const auto* o = as_output(cfg.threads.at(r.participants[1]));
  if (in == nullptr || o == nullptr || !(ch(in->subject) == ch(o->subject)) ||
      in->binders.size() != o->args.size()) {
    throw std::out_of_range("redex does not match the configuration");
  }
}

}  // namespace

StepResult step(const Configuration& cfg, const Redex& r)
{
  if (cfg.halted) throw std::out_of_range("configuration has halted");
  if (r.participants.empty()) throw std::out_of_range("redex has no participants");
  StepResult res;
  switch (r.kind) {
    case RedexKind::choice_left:
    case RedexKind::choice_right: {
      const CastProcess& t = cfg.threads.at(r.participants[0]);
      const auto* c = std::get_if<cast::Choice>(&t->node);
      if (c == nullptr) throw std::out_of_range("choice redex on a non-choice thread");
      const CastProcess& branch = r.kind == RedexKind::choice_left ? c->left : c->right;
      res.next = without(cfg, {r.participants[0]});
      absorb(res.next, branch);
      res.events.push_back(event("choice", print_cast(t), print_cast(branch)));
      return res;
    }
    case RedexKind::replicate_unfold: {
      const CastProcess& t = cfg.threads.at(r.participants[0]);
      const auto* rep = std::get_if<cast::Replicate>(&t->node);
      if (rep == nullptr) throw std::out_of_range("unfold redex on a non-replicated thread");
      res.next = cfg;
      absorb(res.next, rep->body);
      res.events.push_back(event("replicate", print_cast(t), print_pair(t, rep->body)));
      return res;
    }
    case RedexKind::comm: {
      check_pair(cfg, r);
      const CastProcess& inp = cfg.threads[r.participants[0]];
      const CastProcess& out = cfg.threads[r.participants[1]];
      if (!std::get<cast::Input>(inp->node).subject.bare() || !std::get<cast::Output>(out->node).subject.bare()) {
        throw std::out_of_range("comm redex on cast subjects");
      }
      auto [k, q] = communicate(inp, out);
      res.next = without(cfg, r.participants);
      absorb(res.next, k);
      absorb(res.next, q);
      res.events.push_back(event("comm", print_pair(inp, out), print_pair(k, q)));
      return res;
    }
    case RedexKind::csolve: {
      check_pair(cfg, r);
      const CastProcess& inp = cfg.threads[r.participants[0]];
      const CastProcess& out = cfg.threads[r.participants[1]];
      const std::string before = print_pair(inp, out);
      res.next = without(cfg, r.participants);

      auto fail = [&](const CastFailure& f, bool malformed) {
        res.next.threads.push_back(cast::type_error(malformed ? inp->span : f.origin));
        res.next.halted = Halt{malformed ? HaltKind::malformed_cast : HaltKind::type_error, f};
        if (!malformed) res.events.push_back(event("c-solve", before, "typeError"));
        return res;
      };

      OutputResolution o = resolve_output_casts(out);
      res.events = std::move(o.events);
      if (o.failure) return fail(*o.failure, o.malformed);

      InputResolution i = resolve_input_casts(inp, o.output);
      res.events.insert(res.events.end(), i.events.begin(), i.events.end());
      if (i.failure) return fail(*i.failure, i.malformed);

      res.events.push_back(event("c-solve", before, print_pair(i.input, i.output)));
      auto [k, q] = communicate(i.input, i.output);
      absorb(res.next, k);
      absorb(res.next, q);
      res.events.push_back(event("comm", print_pair(i.input, i.output), print_pair(k, q)));
      return res;
    }
  }
  throw std::out_of_range("unknown redex kind");
}

// ---------------------------------------------------------------------------
// Schedulers

namespace
{

void append(Trace& trace, std::vector<TraceEvent>& events)
{
  for (auto& e : events) {
    e.index = trace.events.size() + 1;
    trace.events.push_back(std::move(e));
  }
}

/// Shared driver for the one-trace schedulers.
RunReport drive(Configuration cfg, std::size_t max_steps,
                const std::function<std::optional<std::size_t>(const Configuration&, const std::vector<Redex>&)>& pick)
{
  Trace trace;
  for (std::size_t steps = 0;; ++steps) {
    if (cfg.halted) {
      trace.halt = *cfg.halted;
      break;
    }
    const std::vector<Redex> redexes = enumerate_redexes(cfg);
    if (redexes.empty()) {
      trace.halt = Halt{HaltKind::normal_stuck, std::nullopt};
      break;
    }
    if (steps == max_steps) {
      trace.halt = Halt{HaltKind::max_steps, std::nullopt};
      break;
    }
    const std::optional<std::size_t> choice = pick(cfg, redexes);
    if (!choice) {
      trace.halt = Halt{HaltKind::aborted, std::nullopt};
      break;
    }
    StepResult r = step(cfg, redexes.at(*choice));
    append(trace, r.events);
    cfg = std::move(r.next);
  }
  RunReport report;
  report.traces.push_back(std::move(trace));
  return report;
}

}  // namespace

RunReport run(const Configuration& cfg, const SeededScheduler& s)
{
  std::mt19937_64 rng(s.seed);
  return drive(cfg, s.max_steps, [&](const Configuration&, const std::vector<Redex>& rs) {
    std::uniform_int_distribution<std::size_t> pick(0, rs.size() - 1);
    return std::optional<std::size_t>(pick(rng));
  });
}

RunReport run(const Configuration& cfg, const InteractiveScheduler& s)
{
  return drive(cfg, s.max_steps, [&](const Configuration& c, const std::vector<Redex>& rs) {
    std::optional<std::size_t> choice = s.choose(c, rs);
    if (choice && *choice >= rs.size()) throw std::out_of_range("interactive choice out of range");
    return choice;
  });
}

RunReport run(const Configuration& root, const ExhaustiveScheduler& s)
{
  struct Node
  {
    Configuration cfg;
    std::size_t parent;
    std::size_t redex;
    std::size_t depth;
  };
  std::vector<Node> nodes;
  std::unordered_set<std::string> seen;
  std::deque<std::size_t> queue;
  std::map<HaltKind, std::pair<std::size_t, Halt>> witness;
  auto record = [&](HaltKind k, std::size_t id, Halt h) { witness.emplace(k, std::make_pair(id, std::move(h))); };

  nodes.push_back(Node{root, 0, 0, 0});
  seen.insert(configuration_key(root));
  queue.push_back(0);
  bool capped = false;

  while (!queue.empty()) {
    const std::size_t id = queue.front();
    queue.pop_front();
    if (nodes[id].cfg.halted) {
      record(nodes[id].cfg.halted->kind, id, *nodes[id].cfg.halted);
      continue;
    }
    const std::vector<Redex> redexes = enumerate_redexes(nodes[id].cfg);
    if (redexes.empty()) {
      record(HaltKind::normal_stuck, id, Halt{HaltKind::normal_stuck, std::nullopt});
      continue;
    }
    if (nodes[id].depth >= s.depth) {
      record(HaltKind::depth_exceeded, id, Halt{HaltKind::depth_exceeded, std::nullopt});
      continue;
    }
    if (capped) {
      record(HaltKind::max_steps, id, Halt{HaltKind::max_steps, std::nullopt});
      continue;
    }
    for (std::size_t k = 0; k < redexes.size(); ++k) {
      StepResult r = step(nodes[id].cfg, redexes[k]);
      if (!seen.insert(configuration_key(r.next)).second) continue;
      if (nodes.size() >= s.max_states) {
        capped = true;
        record(HaltKind::max_steps, id, Halt{HaltKind::max_steps, std::nullopt});
        break;
      }
      nodes.push_back(Node{std::move(r.next), id, k, nodes[id].depth + 1});
      queue.push_back(nodes.size() - 1);
    }
  }

  RunReport report;
  report.explored = nodes.size();
  for (const auto& [kind, w] : witness) {
    std::vector<std::size_t> path;
    for (std::size_t id = w.first; id != 0; id = nodes[id].parent) path.push_back(nodes[id].redex);
    std::reverse(path.begin(), path.end());
    Trace trace;
    Configuration cfg = root;
    for (std::size_t k : path) {
      StepResult r = step(cfg, enumerate_redexes(cfg).at(k));
      append(trace, r.events);
      cfg = std::move(r.next);
    }
    trace.halt = w.second;
    report.traces.push_back(std::move(trace));
  }
  return report;
}

}  // namespace gradpi
