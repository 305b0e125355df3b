#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iam/generate.hpp"
#include "iam/machine.hpp"

namespace iam {

inline std::vector<Term> random_corpus(std::uint64_t seed, std::size_t count, std::size_t max_size,
                                       std::size_t min_size = 3) {
  TermGenerator g(seed);
  std::vector<Term> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(g.lsc(g.uniform(min_size, max_size)));
  return out;
}

struct PropertyFailure {
  std::string term;
  std::size_t k = 0;
  std::string what;
};

// Running with extra marks and a dummy logged position below the tape
// repeats the original run, with the same suffix on every tape.
inline std::optional<PropertyFailure> check_lifting(const Term& t, std::size_t k, std::size_t fuel) {
  auto base = run(t, k, fuel);
  LoggedPosition dummy("dummy", {}, {}, {});
  Tape suffix = Tape{}.push(dummy).push(Mark{}).push(Mark{});
  State cur(t, {}, {}, Tape::concat(marks(k), suffix), Direction::Down);
  for (std::size_t i = 0; i < base.trace.size(); ++i) {
    const State& b = base.trace[i];
    State expect(b.code, b.path, b.log, Tape::concat(b.tape, suffix), b.dir);
    if (!(cur == expect)) return PropertyFailure{print(t), k, "lifted run diverges at step " + std::to_string(i)};
    if (i + 1 == base.trace.size()) break;
    auto r = step(cur);
    auto* tr = std::get_if<Transition>(&r);
    if (!tr) return PropertyFailure{print(t), k, "lifted run stops early at step " + std::to_string(i)};
    cur = tr->next;
  }
  return std::nullopt;
}

// |t|_k <= |t|_k+1, and a success at k becomes the same success with one
// more mark at k+1.
inline std::optional<PropertyFailure> check_monotone(const Term& t, std::size_t k, std::size_t fuel) {
  auto a = run(t, k, fuel, false);
  auto b = run(t, k + 1, fuel, false);
  bool fa = a.end == RunResult::End::Final, fb = b.end == RunResult::End::Final;
  if (fa && fb && a.steps > b.steps)
    return PropertyFailure{print(t), k, "run length drops from " + std::to_string(a.steps) + " to " + std::to_string(b.steps)};
  if (fa && !fb && b.end != RunResult::End::OutOfFuel) return PropertyFailure{print(t), k, "run gets stuck with more marks"};
  auto oa = outcome_of(a), ob = outcome_of(b);
  if (oa.success()) {
    Outcome expect = oa;
    ++expect.j;
    if (!(ob == expect)) return PropertyFailure{print(t), k, to_string(oa) + " becomes " + to_string(ob)};
    if (a.steps != b.steps) return PropertyFailure{print(t), k, "successful run changes length with one more mark"};
  }
  return std::nullopt;
}

// \x0..\xn. y u1..ul with random substitution padding along the spine.
struct ReadingInstance {
  Term term;
  std::size_t n = 0;                   // binders are x0..xn
  std::optional<std::size_t> head;     // index of y among the binders, or free
  std::size_t args = 0;
};

inline ReadingInstance reading_instance(TermGenerator& g, bool closed) {
  ReadingInstance ri;
  ri.n = g.uniform(0, 4);
  std::vector<std::string> scope;
  for (std::size_t i = 0; i <= ri.n; ++i) scope.push_back("x" + std::to_string(i));
  std::size_t fresh = 0;
  auto pad = [&](Term t, const std::vector<std::string>& sc) {
    while (g.coin(0.3)) t = Term::sub(t, "e" + std::to_string(fresh++), g.lsc_in(g.uniform(1, 3), sc, !closed));
    return t;
  };
  if (closed || g.coin(0.8)) ri.head = g.uniform(0, ri.n);
  Term core = Term::var(ri.head ? scope[*ri.head] : std::string("h"));
  core = pad(core, scope);
  ri.args = g.uniform(0, 3);
  for (std::size_t i = 0; i < ri.args; ++i) core = pad(Term::app(core, g.lsc_in(g.uniform(1, 4), scope, !closed)), scope);
  for (std::size_t i = ri.n + 1; i-- > 0;) {
    std::vector<std::string> outer(scope.begin(), scope.begin() + static_cast<std::ptrdiff_t>(i));
    core = Term::abs(scope[i], core);
    if (i > 0) core = pad(core, outer);
  }
  ri.term = core;
  return ri;
}

}  // namespace iam
