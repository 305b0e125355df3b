#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "iam/machine.hpp"

namespace iam {

struct ExhaustTest {
  enum class Kind { Tape, Log } kind;
  std::size_t index;  // tape index (0 = top) or log index (0 = innermost)
  LoggedPosition focus;
  State start;
};

// Every tape and log test of s.
inline std::vector<ExhaustTest> tests_of(const State& s) {
  std::vector<ExhaustTest> out;
  Tape prefix;
  std::vector<TapeItem> items = s.tape.to_vector();
  std::size_t positions = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (is_mark(items[i])) continue;
    ++positions;
    // Tape T'.l with l at index i, read top first.
    Tape t = Tape::from_vector(std::vector<TapeItem>(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(i) + 1));
    out.push_back({ExhaustTest::Kind::Tape, i, std::get<LoggedPosition>(items[i]),
                   State(s.code, s.path, s.log, t, flip(Direction::Up, positions))});
  }
  std::size_t n = s.log.size();
  if (n > 0) {
    Position pos = s.position();
    std::size_t j = 0;
    for (const auto& entry : s.log) {
      std::size_t m = n - j;
      Position outer = outer_position(pos, m);
      out.push_back({ExhaustTest::Kind::Log, j, entry, State(s.code, outer.path(), s.log.drop(j), Tape{}, Direction::Up)});
      ++j;
    }
  }
  return out;
}

// s is the upward state at the logged occurrence with an empty tape and a log
// starting with the occurrence's own log.
inline bool surrounds(const State& s, const LoggedPosition& lp) {
  if (s.dir != Direction::Up || !s.tape.empty()) return false;
  if (s.path != lp.absolute()) return false;
  if (s.log.size() < lp.log().size()) return false;
  return s.log.take(lp.log().size()) == lp.log();
}

enum class Verdict { Exhaustible, CounterExample, Unknown };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Exhaustible: return "exhaustible";
    case Verdict::CounterExample: return "counterexample";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

struct ExhaustReport {
  Verdict verdict = Verdict::Exhaustible;
  std::string detail;
};

// Runs every test of a state until it completes on its focus, then checks the
// completing state recursively.  Completions and verdicts are memoised, so one
// checker should be reused across the states of a run.
class ExhaustChecker {
 public:
  ExhaustChecker(std::size_t depth = 3, std::size_t fuel = 2000) : depth_(depth), fuel_(fuel) {}

  ExhaustReport check(const State& s) { return check(s, depth_); }

  // How the completed tests ended: a bt2 popping the focus off the tape, or
  // a var3 popping it off the log.
  std::size_t closed_by_bt2() const { return by_bt2_; }
  std::size_t closed_by_var3() const { return by_var3_; }

 private:
  struct Key {
    State state;
    LoggedPosition focus;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return hash_combine(StateHash{}(k.state), k.focus.hash()); }
  };

  enum class Completion { Found, Failed, OutOfFuel };

  struct Done {
    State state;
    Rule rule;
  };

  Completion complete(const ExhaustTest& test, std::optional<State>& out, std::string& why) {
    std::vector<State> visited;
    State cur = test.start;
    Completion result = Completion::OutOfFuel;
    Rule closer = Rule::Bt2;
    for (std::size_t i = 0; i <= fuel_; ++i) {
      if (auto hit = completions_.find(Key{cur, test.focus}); hit != completions_.end()) {
        out = hit->second.state;
        closer = hit->second.rule;
        result = Completion::Found;
        break;
      }
      visited.push_back(cur);
      auto r = step(cur);
      if (auto* f = std::get_if<FinalClass>(&r)) {
        why = "test ended in " + to_string(*f);
        return Completion::Failed;
      }
      if (auto* v = std::get_if<Violation>(&r)) {
        why = "test got stuck: " + v->what;
        return Completion::Failed;
      }
      auto& t = std::get<Transition>(r);
      bool pops = false;
      if (t.rule == Rule::Bt2) pops = std::get<LoggedPosition>(cur.tape.top()) == test.focus;
      if (t.rule == Rule::Var3) pops = cur.log.top() == test.focus;
      if (pops && surrounds(t.next, test.focus)) {
        out = t.next;
        closer = t.rule;
        result = Completion::Found;
        break;
      }
      cur = std::move(t.next);
    }
    if (result == Completion::Found) {
      ++(closer == Rule::Bt2 ? by_bt2_ : by_var3_);
      for (auto& v : visited) completions_.emplace(Key{std::move(v), test.focus}, Done{*out, closer});
    }
    return result;
  }

  ExhaustReport check(const State& s, std::size_t depth) {
    if (auto hit = proven_.find(s); hit != proven_.end()) return {};
    auto tests = tests_of(s);
    if (tests.empty()) return {};
    if (depth == 0) return {Verdict::Unknown, "depth bound reached"};
    bool unknown = false;
    std::string unknown_why;
    for (const auto& test : tests) {
      std::optional<State> done;
      std::string why;
      switch (complete(test, done, why)) {
        case Completion::Failed:
          return {Verdict::CounterExample,
                  std::string(test.kind == ExhaustTest::Kind::Tape ? "tape" : "log") + " test " +
                      std::to_string(test.index) + ": " + why};
        case Completion::OutOfFuel:
          unknown = true;
          unknown_why = "fuel exhausted on a test";
          continue;
        case Completion::Found: break;
      }
      auto sub = check(*done, depth - 1);
      if (sub.verdict == Verdict::CounterExample) return sub;
      if (sub.verdict == Verdict::Unknown) {
        unknown = true;
        unknown_why = sub.detail;
      }
    }
    if (unknown) return {Verdict::Unknown, unknown_why};
    proven_.emplace(s, true);
    return {};
  }

  std::size_t depth_, fuel_;
  std::size_t by_bt2_ = 0, by_var3_ = 0;
  std::unordered_map<Key, Done, KeyHash> completions_;
  std::unordered_map<State, bool, StateHash> proven_;
};

inline ExhaustReport is_exhaustible(const State& s, std::size_t depth = 3, std::size_t fuel = 2000) {
  return ExhaustChecker(depth, fuel).check(s);
}

struct InvariantReport {
  bool ok = true;
  std::size_t index = 0;  // first failing state
  std::string what;
};

// Code constancy, balance, and the backward round trip along a trace.
inline InvariantReport check_run_invariants(const std::vector<State>& trace) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const State& s = trace[i];
    if (!(s.code == trace.front().code) || !(plug(s.position(), s.focus) == s.code))
      return {false, i, "code changed"};
    if (s.log.size() != s.position().level()) return {false, i, "log length differs from the level"};
    if (s.dir != flip(Direction::Down, count_positions(s.tape))) return {false, i, "direction does not match the tape"};
    if (i > 0) {
      auto back = step_backward(s);
      if (!back || !(*back == trace[i - 1])) return {false, i, "backward step does not return to the predecessor"};
    }
  }
  return {};
}

}  // namespace iam
