#include <gtest/gtest.h>

#include "iam/exhaustibility.hpp"
#include "iam/properties.hpp"

using namespace iam;

namespace {

const char* kTraceA = "((\\z.\\x.x) w)(\\y.y)";
const char* kTraceB = "(\\x.x x)(\\y.y)";

// Prefixes of p of level m that end with a box step, by enumeration.
std::vector<Path> outer_splits(const Path& p, std::size_t m) {
  std::vector<Path> out;
  for (std::size_t len = 1; len <= p.size(); ++len) {
    Path pre(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(len));
    if (level(pre) == m && is_box_step(pre.back())) out.push_back(pre);
  }
  return out;
}

std::vector<State> corpus_states(std::uint64_t seed, std::size_t count) {
  std::vector<State> out;
  for (const auto& t : random_corpus(seed, count, 9))
    for (std::size_t k = 0; k <= 2; ++k) {
      auto r = run(t, k, 300);
      out.insert(out.end(), r.trace.begin(), r.trace.end());
    }
  return out;
}

}  // namespace

TEST(Tests, InitialStatesHaveNone) {
  for (std::size_t k = 0; k <= 3; ++k) EXPECT_TRUE(tests_of(initial_state(parse(kTraceA), k)).empty());
}

TEST(Tests, SingleTapeTestReversesDirection) {
  auto r = run(parse(kTraceA), 1, 100);
  const State& s = r.trace[5];  // up at \x.x with (x, \x.[.], ε)·p on the tape
  ASSERT_EQ(render(s).tape, "(x, \\x.[.], ε)·p");
  auto ts = tests_of(s);
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts[0].kind, ExhaustTest::Kind::Tape);
  EXPECT_EQ(ts[0].start.dir, Direction::Down);
  EXPECT_EQ(render(ts[0].start).tape, "(x, \\x.[.], ε)");
  EXPECT_EQ(ts[0].start.path, s.path);
}

TEST(Tests, TapeTestsKeepMarkersAboveTheFocus) {
  auto r = run(parse(kTraceA), 1, 100);
  const State& s = r.trace[6];  // p·(x, ...)·p
  auto ts = tests_of(s);
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts[0].index, 1u);
  EXPECT_EQ(render(ts[0].start).tape, "p·(x, \\x.[.], ε)");
}

TEST(Tests, LogTestsStartAtOuterPositions) {
  std::size_t deep = 0;
  for (const auto& s : corpus_states(2, 200)) {
    std::size_t n = s.log.size();
    auto ts = tests_of(s);
    std::size_t j = 0;
    for (const auto& t : ts) {
      if (t.kind != ExhaustTest::Kind::Log) continue;
      auto splits = outer_splits(s.path, n - j);
      ASSERT_EQ(splits.size(), 1u);
      EXPECT_EQ(t.start.path, splits[0]);
      EXPECT_EQ(t.start.log, s.log.drop(j));
      EXPECT_EQ(t.start.log.size(), n - j);
      EXPECT_TRUE(t.start.tape.empty());
      EXPECT_EQ(t.start.dir, Direction::Up);
      EXPECT_EQ(t.focus, s.log.drop(j).top());
      ++j;
    }
    EXPECT_EQ(j, n);
    EXPECT_EQ(ts.size(), n + count_positions(s.tape));
    if (n >= 2) ++deep;
  }
  EXPECT_GT(deep, 20u);
}

TEST(Tests, LogTestsAreInvariant) {
  auto log_tests = [](const State& s) {
    std::vector<State> out;
    for (const auto& t : tests_of(s))
      if (t.kind == ExhaustTest::Kind::Log) out.push_back(t.start);
    return out;
  };
  Tape other = Tape{}.push(Mark{}).push(Mark{});
  for (const auto& s : corpus_states(6, 120)) {
    auto base = log_tests(s);
    EXPECT_EQ(log_tests(s.flipped()), base);
    EXPECT_EQ(log_tests(State(s.code, s.path, s.log, other, s.dir)), base);
    // Descending along head steps leaves the level and the outer positions alone.
    Path p = s.path;
    Term cur = s.focus;
    while (true) {
      Step st;
      if (cur.is(Kind::Abs)) st = Step::AbsBody;
      else if (cur.is(Kind::App)) st = Step::AppLeft;
      else if (cur.is(Kind::Sub)) st = Step::SubBody;
      else break;
      p.push_back(st);
      cur = *cur.child(st);
      EXPECT_EQ(log_tests(State(s.code, p, s.log, other, s.dir)), base);
    }
  }
}

TEST(Surrounds, Basics) {
  Term t = parse(kTraceB);
  LoggedPosition x1("x", {Step::AppLeft}, {Step::AbsBody, Step::AppLeft}, {});
  Path at{Step::AppLeft, Step::AbsBody, Step::AppLeft};
  EXPECT_TRUE(surrounds(State(t, at, {}, {}, Direction::Up), x1));
  EXPECT_FALSE(surrounds(State(t, at, {}, {}, Direction::Down), x1));
  EXPECT_FALSE(surrounds(State(t, at, {}, Tape{}.push(Mark{}), Direction::Up), x1));
  EXPECT_FALSE(surrounds(State(t, {Step::AppLeft, Step::AbsBody, Step::AppRight}, Log{}.push(x1), {}, Direction::Up), x1));
}

TEST(Exhaustible, GoldenTraces) {
  for (auto [src, k] : {std::pair{kTraceA, std::size_t{1}}, std::pair{kTraceB, std::size_t{0}}}) {
    auto r = run(parse(src), k, 200);
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      auto rep = is_exhaustible(r.trace[i], 3, 200);
      EXPECT_EQ(rep.verdict, Verdict::Exhaustible) << src << " state " << i << ": " << rep.detail;
    }
  }
}

TEST(Exhaustible, ForgedPositionIsACounterExample) {
  // The logged occurrence is y, which x does not bind.
  Term t = parse("(\\x.x y)(\\z.z)");
  LoggedPosition wrong("x", {Step::AppLeft}, {Step::AbsBody, Step::AppRight}, {});
  State s(t, {Step::AppLeft}, {}, Tape{}.push(wrong), Direction::Up);
  auto rep = is_exhaustible(s);
  EXPECT_EQ(rep.verdict, Verdict::CounterExample);
  EXPECT_NE(rep.detail.find("tape test 0"), std::string::npos);
}

TEST(Exhaustible, SmallCorpus) {
  for (const auto& t : random_corpus(13, 60, 9)) {
    for (std::size_t k = 0; k <= 3; ++k) {
      auto r = run(t, k, 2000);
      ExhaustChecker checker(3, 2000);
      for (std::size_t i = 0; i < r.trace.size(); ++i) {
        auto rep = checker.check(r.trace[i]);
        ASSERT_EQ(rep.verdict, Verdict::Exhaustible) << print(t) << " k=" << k << " state " << i << ": " << rep.detail;
      }
    }
  }
}

// Without substitutions nothing is ever logged by var2, so var3 never closes a test.
TEST(Exhaustible, ClosingRules) {
  auto tally = [](const char* src, std::size_t k) {
    ExhaustChecker c(3, 2000);
    for (const auto& s : run(parse(src), k, 200).trace) EXPECT_EQ(c.check(s).verdict, Verdict::Exhaustible) << src;
    return std::pair{c.closed_by_bt2(), c.closed_by_var3()};
  };
  for (auto [src, k] : {std::pair{kTraceA, std::size_t{1}}, std::pair{kTraceB, std::size_t{0}}}) {
    auto [bt2, var3] = tally(src, k);
    EXPECT_GT(bt2, 0u) << src;
    EXPECT_EQ(var3, 0u) << src;
  }
  auto [bt2, var3] = tally("(x x)[x<-\\y.y]", 0);
  EXPECT_GT(bt2, 0u);
  EXPECT_GT(var3, 0u);
}

TEST(Invariants, GoldenTracesPass) {
  EXPECT_TRUE(check_run_invariants(run(parse(kTraceA), 1, 100).trace).ok);
  EXPECT_TRUE(check_run_invariants(run(parse(kTraceB), 0, 100).trace).ok);
}

TEST(Invariants, TruncatedLogIsCaught) {
  auto trace = run(parse(kTraceA), 1, 100).trace;
  ASSERT_FALSE(trace[8].log.empty());
  trace[8].log = trace[8].log.pop();
  auto rep = check_run_invariants(trace);
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.index, 8u);
  EXPECT_EQ(rep.what, "log length differs from the level");
}

TEST(Invariants, DirectionMutationIsCaught) {
  auto trace = run(parse(kTraceB), 0, 100).trace;
  trace[4] = trace[4].flipped();
  auto rep = check_run_invariants(trace);
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.index, 4u);
}
