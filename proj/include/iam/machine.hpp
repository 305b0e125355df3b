#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "iam/stack.hpp"
#include "iam/syntax.hpp"

namespace iam {

enum class Direction : std::uint8_t { Down, Up };

inline Direction flip(Direction d, std::size_t times = 1) {
  return times % 2 == 0 ? d : (d == Direction::Down ? Direction::Up : Direction::Down);
}

class LoggedPosition;
using Log = Stack<LoggedPosition>;

// A variable occurrence recorded relative to its binder: the binder node's
// absolute path, the path from the binder to the occurrence, and the log of
// that relative context (one entry per box step, innermost first).
class LoggedPosition {
  struct Data;

 public:
  LoggedPosition(std::string var, Path binder, Path occurrence, Log log);

  const std::string& var() const;
  const Path& binder() const;
  const Path& occurrence() const;
  const Log& log() const;
  Path absolute() const { return concat(binder(), occurrence()); }
  std::size_t hash() const;
  const void* identity() const { return d_.get(); }

  friend bool operator==(const LoggedPosition& a, const LoggedPosition& b);

 private:
  std::shared_ptr<const Data> d_;
};

struct LoggedPosition::Data {
  std::string var;
  Path binder;
  Path occurrence;
  Log log;
  std::size_t hash;
};

inline std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

inline std::size_t hash_path(const Path& p) {
  std::size_t h = p.size();
  for (Step s : p) h = hash_combine(h, static_cast<std::size_t>(s));
  return h;
}

inline LoggedPosition::LoggedPosition(std::string var, Path binder, Path occurrence, Log log) {
  std::size_t h = std::hash<std::string>{}(var);
  h = hash_combine(h, hash_path(binder));
  h = hash_combine(h, hash_path(occurrence));
  for (const auto& e : log) h = hash_combine(h, e.hash());
  d_ = std::make_shared<const Data>(Data{std::move(var), std::move(binder), std::move(occurrence), std::move(log), h});
}

inline const std::string& LoggedPosition::var() const { return d_->var; }
inline const Path& LoggedPosition::binder() const { return d_->binder; }
inline const Path& LoggedPosition::occurrence() const { return d_->occurrence; }
inline const Log& LoggedPosition::log() const { return d_->log; }
inline std::size_t LoggedPosition::hash() const { return d_->hash; }

inline bool operator==(const LoggedPosition& a, const LoggedPosition& b) {
  if (a.d_ == b.d_) return true;
  return a.d_->hash == b.d_->hash && a.d_->var == b.d_->var && a.d_->binder == b.d_->binder &&
         a.d_->occurrence == b.d_->occurrence && a.d_->log == b.d_->log;
}

struct Mark {
  friend bool operator==(Mark, Mark) { return true; }
};

using TapeItem = std::variant<Mark, LoggedPosition>;
using Tape = Stack<TapeItem>;

inline bool is_mark(const TapeItem& i) { return std::holds_alternative<Mark>(i); }

inline std::size_t count_positions(const Tape& t) {
  std::size_t n = 0;
  for (const auto& i : t) n += !is_mark(i);
  return n;
}

inline Tape marks(std::size_t k) {
  Tape t;
  for (std::size_t i = 0; i < k; ++i) t = t.push(Mark{});
  return t;
}

struct State {
  State(Term code, Path path, Log log, Tape tape, Direction dir)
      : code(std::move(code)), path(std::move(path)), log(std::move(log)), tape(std::move(tape)), dir(dir) {
    auto s = subterm_at(this->code, this->path);
    if (!s) throw PathError("state path does not resolve");
    focus = *s;
  }

  Term code;
  Path path;
  Term focus;
  Log log;
  Tape tape;
  Direction dir;

  Position position() const { return Position(code, path); }

  State flipped() const {
    State s = *this;
    s.dir = flip(dir);
    return s;
  }

  friend bool operator==(const State& a, const State& b) {
    return a.dir == b.dir && a.path == b.path && a.log == b.log && a.tape == b.tape && a.code == b.code;
  }
};

struct StateHash {
  std::size_t operator()(const State& s) const {
    std::size_t h = std::hash<const void*>{}(s.code.identity());
    h = hash_combine(h, hash_path(s.path));
    h = hash_combine(h, static_cast<std::size_t>(s.dir));
    for (const auto& e : s.log) h = hash_combine(h, e.hash());
    h = hash_combine(h, 0x51ed);
    for (const auto& i : s.tape) h = hash_combine(h, is_mark(i) ? 7 : std::get<LoggedPosition>(i).hash());
    return h;
  }
};

inline State initial_state(const Term& t, std::size_t k) { return State(t, {}, {}, marks(k), Direction::Down); }

enum class Rule : std::uint8_t { Dot1, Dot2, Var, Bt2, Es, Var2, Dot3, Dot4, Arg, Bt1, Es2, Var3 };

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Dot1: return "dot1";
    case Rule::Dot2: return "dot2";
    case Rule::Var: return "var";
    case Rule::Bt2: return "bt2";
    case Rule::Es: return "es";
    case Rule::Var2: return "var2";
    case Rule::Dot3: return "dot3";
    case Rule::Dot4: return "dot4";
    case Rule::Arg: return "arg";
    case Rule::Bt1: return "bt1";
    case Rule::Es2: return "es2";
    case Rule::Var3: return "var3";
  }
  return "?";
}

struct FinalClass {
  enum class Kind { Failure, OpenSuccess, BoundSuccess } kind;
  std::string var;    // OpenSuccess
  std::size_t h = 0;  // BoundSuccess: marks above the logged position
  std::size_t j = 0;  // marks below it (or all marks, for OpenSuccess)

  friend bool operator==(const FinalClass&, const FinalClass&) = default;
};

struct Transition {
  State next;
  Rule rule;
};

struct Violation {
  std::string what;
};

using StepResult = std::variant<Transition, FinalClass, Violation>;

namespace detail {

// Ancestors of the node at p: nodes[i] is the node at p[0..i).
inline std::vector<Term> spine_nodes(const Term& root, const Path& p) {
  std::vector<Term> nodes{root};
  for (std::size_t i = 0; i < p.size(); ++i) nodes.push_back(*nodes.back().child(p[i]));
  return nodes;
}

inline Path prefix(const Path& p, std::size_t n) { return Path(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(n)); }

inline StepResult down_var(const State& s) {
  const std::string& x = s.focus.name();
  auto bi = binder_index(s.code, s.path);
  if (!bi) {
    if (count_positions(s.tape) != 0) return Violation{"free variable reached with a logged position on the tape"};
    return FinalClass{FinalClass::Kind::OpenSuccess, x, 0, s.tape.size()};
  }
  Path binder = prefix(s.path, *bi);
  Path occ = suffix_after(s.path, *bi);
  std::size_t n = level(occ);
  if (s.log.size() < n) return Violation{"log shorter than the level of the variable occurrence"};
  LoggedPosition lp(x, binder, occ, s.log.take(n));
  Log rest = s.log.drop(n);
  if (s.path[*bi] == Step::AbsBody) return Transition{State(s.code, binder, rest, s.tape.push(lp), Direction::Up), Rule::Var};
  binder.push_back(Step::SubDefiniens);
  return Transition{State(s.code, binder, rest.push(lp), s.tape, Direction::Down), Rule::Var2};
}

// Shared by bt2 and var3: jump from a binder back to the logged occurrence.
inline std::optional<std::string> check_jump(const State& s, const Path& binder, const LoggedPosition& lp) {
  if (lp.binder() != binder) return "logged position does not belong to this binder";
  auto occ = subterm_at(s.code, lp.absolute());
  if (!occ || !occ->is(Kind::Var)) return "logged occurrence is not a variable";
  auto bi = binder_index(s.code, lp.absolute());
  if (!bi || *bi != binder.size()) return "logged occurrence is not bound by this binder";
  if (lp.log().size() != level(lp.occurrence())) return "logged position log has the wrong length";
  return std::nullopt;
}

}  // namespace detail

inline StepResult step(const State& s) {
  using detail::prefix;
  if (s.dir == Direction::Down) {
    switch (s.focus.kind()) {
      case Kind::App: {
        Path p = s.path;
        p.push_back(Step::AppLeft);
        return Transition{State(s.code, p, s.log, s.tape.push(Mark{}), Direction::Down), Rule::Dot1};
      }
      case Kind::Abs: {
        if (s.tape.empty()) return FinalClass{FinalClass::Kind::Failure};
        if (is_mark(s.tape.top())) {
          Path p = s.path;
          p.push_back(Step::AbsBody);
          return Transition{State(s.code, p, s.log, s.tape.pop(), Direction::Down), Rule::Dot2};
        }
        const auto& lp = std::get<LoggedPosition>(s.tape.top());
        if (auto err = detail::check_jump(s, s.path, lp)) return Violation{*err};
        if (lp.occurrence().front() != Step::AbsBody) return Violation{"logged position is not under the abstraction"};
        return Transition{State(s.code, lp.absolute(), Log::concat(lp.log(), s.log), s.tape.pop(), Direction::Up),
                          Rule::Bt2};
      }
      case Kind::Sub: {
        Path p = s.path;
        p.push_back(Step::SubBody);
        return Transition{State(s.code, p, s.log, s.tape, Direction::Down), Rule::Es};
      }
      case Kind::Var: return detail::down_var(s);
      case Kind::Hole: return Violation{"hole in code"};
    }
    return Violation{"unknown node"};
  }

  if (s.path.empty()) {
    std::size_t h = 0;
    auto it = s.tape.begin();
    while (it != s.tape.end() && is_mark(*it)) ++h, ++it;
    if (it == s.tape.end()) return Violation{"upward at the root without a logged position"};
    ++it;
    std::size_t j = 0;
    while (it != s.tape.end() && is_mark(*it)) ++j, ++it;
    if (it != s.tape.end()) return Violation{"upward at the root with several logged positions"};
    if (!s.log.empty()) return Violation{"upward at the root with a non-empty log"};
    return FinalClass{FinalClass::Kind::BoundSuccess, "", h, j};
  }

  Path parent = prefix(s.path, s.path.size() - 1);
  switch (s.path.back()) {
    case Step::AppLeft: {
      if (s.tape.empty()) return Violation{"upward out of an application head with an empty tape"};
      if (is_mark(s.tape.top()))
        return Transition{State(s.code, parent, s.log, s.tape.pop(), Direction::Up), Rule::Dot3};
      Path p = parent;
      p.push_back(Step::AppRight);
      return Transition{
          State(s.code, p, s.log.push(std::get<LoggedPosition>(s.tape.top())), s.tape.pop(), Direction::Down),
          Rule::Arg};
    }
    case Step::AppRight: {
      if (s.log.empty()) return Violation{"upward out of an argument with an empty log"};
      Path p = parent;
      p.push_back(Step::AppLeft);
      return Transition{State(s.code, p, s.log.pop(), s.tape.push(s.log.top()), Direction::Down), Rule::Bt1};
    }
    case Step::AbsBody:
      return Transition{State(s.code, parent, s.log, s.tape.push(Mark{}), Direction::Up), Rule::Dot4};
    case Step::SubBody: return Transition{State(s.code, parent, s.log, s.tape, Direction::Up), Rule::Es2};
    case Step::SubDefiniens: {
      if (s.log.empty()) return Violation{"upward out of a definiens with an empty log"};
      const LoggedPosition& lp = s.log.top();
      if (auto err = detail::check_jump(s, parent, lp)) return Violation{*err};
      if (lp.occurrence().front() != Step::SubBody) return Violation{"logged position is not in the substitution body"};
      return Transition{State(s.code, lp.absolute(), Log::concat(lp.log(), s.log.pop()), s.tape, Direction::Up),
                        Rule::Var3};
    }
  }
  return Violation{"unknown step"};
}

// The unique predecessor, if any: flip, step, flip.
inline std::optional<State> step_backward(const State& s) {
  auto r = step(s.flipped());
  if (auto* t = std::get_if<Transition>(&r)) return t->next.flipped();
  return std::nullopt;
}

struct RunResult {
  enum class End { Final, Violation, OutOfFuel } end = End::OutOfFuel;
  std::vector<State> trace;  // only if requested; otherwise just the last state
  std::vector<Rule> rules;
  FinalClass final{FinalClass::Kind::Failure};
  std::string violation;
  std::size_t steps = 0;

  const State& last() const { return trace.back(); }
};

inline RunResult run_from(const State& start, std::size_t fuel, bool keep_trace = true) {
  RunResult r;
  r.trace.push_back(start);
  State cur = start;
  while (true) {
    auto res = step(cur);
    if (auto* f = std::get_if<FinalClass>(&res)) {
      r.end = RunResult::End::Final;
      r.final = *f;
      break;
    }
    if (auto* v = std::get_if<Violation>(&res)) {
      r.end = RunResult::End::Violation;
      r.violation = v->what;
      break;
    }
    if (r.steps == fuel) break;
    auto& t = std::get<Transition>(res);
    ++r.steps;
    cur = std::move(t.next);
    if (keep_trace) {
      r.rules.push_back(t.rule);
      r.trace.push_back(cur);
    }
  }
  if (!keep_trace) r.trace.back() = cur;
  return r;
}

inline RunResult run(const Term& t, std::size_t k, std::size_t fuel, bool keep_trace = true) {
  return run_from(initial_state(t, k), fuel, keep_trace);
}

struct Outcome {
  enum class Kind { Pair, OpenPair, HasAbs, Timeout, Stuck } kind;
  std::size_t h = 0, j = 0;
  std::string var;

  bool success() const { return kind == Kind::Pair || kind == Kind::OpenPair; }
  bool bottom() const { return kind == Kind::Timeout || kind == Kind::Stuck; }
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

inline std::string to_string(const Outcome& o) {
  switch (o.kind) {
    case Outcome::Kind::Pair: return "pair " + std::to_string(o.h) + " " + std::to_string(o.j);
    case Outcome::Kind::OpenPair: return "open " + o.var + " " + std::to_string(o.j);
    case Outcome::Kind::HasAbs: return "hasabs";
    case Outcome::Kind::Timeout: return "bottom (timeout)";
    case Outcome::Kind::Stuck: return "bottom (stuck)";
  }
  return "?";
}

inline Outcome outcome_of(const RunResult& r) {
  switch (r.end) {
    case RunResult::End::OutOfFuel: return {Outcome::Kind::Timeout};
    case RunResult::End::Violation: return {Outcome::Kind::Stuck};
    case RunResult::End::Final: break;
  }
  switch (r.final.kind) {
    case FinalClass::Kind::Failure: return {Outcome::Kind::HasAbs};
    case FinalClass::Kind::OpenSuccess: return {Outcome::Kind::OpenPair, 0, r.final.j, r.final.var};
    case FinalClass::Kind::BoundSuccess: return {Outcome::Kind::Pair, r.final.h, r.final.j};
  }
  return {Outcome::Kind::Stuck};
}

inline Outcome semantics(const Term& t, std::size_t k, std::size_t fuel) { return outcome_of(run(t, k, fuel, false)); }

// Number of transitions to a final state; nullopt when fuel runs out or the run gets stuck.
inline std::optional<std::size_t> run_length(const Term& t, std::size_t k, std::size_t fuel) {
  auto r = run(t, k, fuel, false);
  if (r.end != RunResult::End::Final) return std::nullopt;
  return r.steps;
}

// ---------------------------------------------------------------- rendering

std::string render(const Term& code, const LoggedPosition& lp);

inline std::string render(const Term& code, const Log& log) {
  if (log.empty()) return "ε";
  std::string s;
  for (const auto& e : log) {
    if (!s.empty()) s += "·";
    s += render(code, e);
  }
  return s;
}

inline std::string render(const Term& code, const LoggedPosition& lp) {
  auto b = subterm_at(code, lp.binder());
  std::string ctx = b ? print_context(*b, lp.occurrence()) : "?";
  return "(" + lp.var() + ", " + ctx + ", " + render(code, lp.log()) + ")";
}

inline std::string render(const Term& code, const Tape& tape) {
  if (tape.empty()) return "ε";
  std::string s;
  for (const auto& i : tape) {
    if (!s.empty()) s += "·";
    s += is_mark(i) ? std::string("p") : render(code, std::get<LoggedPosition>(i));
  }
  return s;
}

struct RenderedState {
  std::string dir, sub, ctx, log, tape;
  friend bool operator==(const RenderedState&, const RenderedState&) = default;
};

inline RenderedState render(const State& s) {
  return {s.dir == Direction::Down ? "down" : "up", print(s.focus), print_context(s.code, s.path),
          render(s.code, s.log), render(s.code, s.tape)};
}

inline std::string to_string(const FinalClass& f) {
  switch (f.kind) {
    case FinalClass::Kind::Failure: return "FAILURE";
    case FinalClass::Kind::OpenSuccess: return "OPEN SUCCESS " + f.var + " " + std::to_string(f.j);
    case FinalClass::Kind::BoundSuccess: return "BOUND SUCCESS " + std::to_string(f.h) + " " + std::to_string(f.j);
  }
  return "?";
}

}  // namespace iam
