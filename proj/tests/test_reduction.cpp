#include <gtest/gtest.h>

#include <functional>

#include "iam/generate.hpp"
#include "iam/properties.hpp"
#include "iam/reduction.hpp"

using namespace iam;

namespace {

// Head normal form of a pure term by iterated head steps.
std::optional<Term> head_normalize(Term t, std::size_t fuel) {
  for (std::size_t i = 0; i < fuel; ++i) {
    auto n = head_step(t);
    if (!n) return t;
    t = *n;
  }
  return std::nullopt;
}

std::vector<std::string> rule_names(const Reduction& r) {
  std::vector<std::string> out;
  for (const auto& [redex, _] : r.steps) out.push_back(rule_name(redex.rule));
  return out;
}

Term gc_all(Term t) {
  while (true) {
    auto rs = lhe_redexes(t, true);
    auto it = std::find_if(rs.begin(), rs.end(), [](const Redex& r) { return r.rule == RuleName::gc; });
    if (it == rs.end()) return t;
    t = lhe_step(t, *it);
  }
}

// Positions where two terms of the same shape differ.
void diff_positions(const Term& a, const Term& b, Path& p, std::vector<Path>& out) {
  if (a.kind() != b.kind() || ((a.is(Kind::Var) || a.is(Kind::Abs) || a.is(Kind::Sub)) && a.name() != b.name())) {
    out.push_back(p);
    return;
  }
  for (Step s : {Step::AbsBody, Step::AppLeft, Step::AppRight, Step::SubBody, Step::SubDefiniens}) {
    auto ca = a.child(s), cb = b.child(s);
    if (!ca) continue;
    p.push_back(s);
    diff_positions(*ca, *cb, p, out);
    p.pop_back();
  }
}

}  // namespace

TEST(HeadStep, Examples) {
  EXPECT_TRUE(alpha_eq(*head_step(parse("((\\z.\\x.x) w)(\\y.y)")), parse("(\\x.x)(\\y.y)")));
  EXPECT_FALSE(head_step(parse("\\y.y")));
  EXPECT_FALSE(head_step(parse("x ((\\y.y) z)")));
  Term lam = parse("\\x.\\y.x x");
  Term big = Term::app(lam, lam);
  EXPECT_TRUE(alpha_eq(*head_step(big), Term::abs("y", big)));
  // Capture avoidance: (\x.\y.x) y
  Term r = *head_step(parse("(\\x.\\y.x) y"));
  ASSERT_TRUE(r.is(Kind::Abs));
  EXPECT_NE(r.name(), "y");
  EXPECT_EQ(r.body(), Term::var("y"));
}

TEST(Unfold, Examples) {
  EXPECT_EQ(unfold(parse("(x x)[x<-\\y.y]")), parse("(\\y.y)(\\y.y)"));
  EXPECT_TRUE(alpha_eq(unfold(parse("y[y<-x][x<-\\y.y]")), parse("\\y.y")));
  Term pure = parse("(\\x.x y)(\\z.z)");
  EXPECT_EQ(unfold(pure), pure);
  EXPECT_TRUE(alpha_eq(unfold(parse("(\\y.x)[x<-y]")), parse("\\z.y")));
}

TEST(Redexes, Examples) {
  EXPECT_EQ(lhe_redexes(parse("(\\x.x x)(\\y.y)")), (std::vector<Redex>{{RuleName::dB, {}}}));
  EXPECT_EQ(lhe_redexes(parse("(x x)[x<-\\y.y]")), (std::vector<Redex>{{RuleName::ls, {}}}));
  // Only the inner substitution is garbage at first; the outer one binds x in the inner definiens.
  Term t = parse("(\\y.y)[y<-x][x<-\\y.y]");
  EXPECT_EQ(lhe_redexes(t), (std::vector<Redex>{{RuleName::gc, {Step::SubBody}}}));
  Term u = lhe_step(t, {RuleName::gc, {Step::SubBody}});
  EXPECT_EQ(lhe_redexes(u), (std::vector<Redex>{{RuleName::gc, {}}}));
  EXPECT_TRUE(lhe_redexes(parse("x ((\\y.y) z)")).empty());
  EXPECT_TRUE(lhe_redexes(parse("\\q.f q")).empty());
}

TEST(Redexes, GcCanBeExcluded) {
  Term t = parse("((\\x.x) z)[y<-w]");
  auto all = lhe_redexes(t, true);
  EXPECT_EQ(all.size(), 2u);
  auto no_gc = lhe_redexes(t, false);
  EXPECT_EQ(no_gc, (std::vector<Redex>{{RuleName::dB, {Step::SubBody}}}));
}

TEST(Step, WorkedExamples) {
  EXPECT_EQ(lhe_step(parse("(\\x.x x)(\\y.y)"), {RuleName::dB, {}}), parse("(x x)[x<-\\y.y]"));
  EXPECT_EQ(lhe_step(parse("(x x)[x<-\\y.y]"), {RuleName::ls, {}}), parse("((\\y.y) x)[x<-\\y.y]"));
  EXPECT_EQ(lhe_step(parse("y[y<-x][x<-\\y.y]"), {RuleName::ls, {Step::SubBody}}), parse("x[y<-x][x<-\\y.y]"));
  EXPECT_THROW(lhe_step(parse("\\x.x"), {RuleName::dB, {}}), std::invalid_argument);
}

TEST(Step, DbRenamesCapturingSubstitutions) {
  // The argument y must not be captured by [y<-w].
  Term u = lhe_step(parse("((\\x.x)[y<-w]) y"), {RuleName::dB, {}});
  EXPECT_TRUE(occurs_free("y", u));
  EXPECT_TRUE(alpha_eq(unfold(u), parse("y")));
  EXPECT_TRUE(alpha_eq(u, parse("x[x<-y][v<-w]")));
}

TEST(Step, LsRenamesWhenTheDefiniensMentionsTheBinder) {
  // The copied x is free and must not be captured by [x<-x].
  Term u = lhe_step(parse("x[x<-x]"), {RuleName::ls, {}});
  EXPECT_TRUE(alpha_eq(u, parse("x[v<-x]")));
  // Abstractions of H that would capture the copy are renamed.
  Term v = lhe_step(parse("(\\z.x)[x<-z]"), {RuleName::ls, {}});
  EXPECT_TRUE(alpha_eq(unfold(v), parse("\\q.z")));
  EXPECT_TRUE(alpha_eq(v, parse("(\\q.z)[x<-z]")));
}

TEST(Normalize, SelfApplicationOfIdentity) {
  auto r = lhe_normalize(parse("(\\x.x x)(\\y.y)"), 100);
  ASSERT_TRUE(r.normal_form);
  EXPECT_EQ(rule_names(r), (std::vector<std::string>{"dB", "ls", "dB", "ls", "ls", "gc", "gc"}));
  const char* expected[] = {"(x x)[x<-\\y.y]",         "((\\y.y) x)[x<-\\y.y]",   "y[y<-x][x<-\\y.y]",
                            "x[y<-x][x<-\\y.y]",       "(\\y.y)[y<-x][x<-\\y.y]", "(\\y.y)[x<-\\y.y]",
                            "\\y.y"};
  for (std::size_t i = 0; i < r.steps.size(); ++i) EXPECT_TRUE(alpha_eq(r.steps[i].second, parse(expected[i]))) << i;
  EXPECT_TRUE(alpha_eq(*r.normal_form, parse("\\z.z")));
}

TEST(Normalize, TrivialAndDivergent) {
  auto r = lhe_normalize(parse("\\x.x"), 10);
  EXPECT_TRUE(r.steps.empty());
  EXPECT_EQ(*r.normal_form, parse("\\x.x"));
  auto o = lhe_normalize(parse("(\\x.x x)(\\x.x x)"), 500);
  EXPECT_FALSE(o.normal_form);
  EXPECT_EQ(o.steps.size(), 500u);
}

TEST(Spine, Examples) {
  auto s = spine(parse("\\x.\\y.x u v"));
  ASSERT_TRUE(s);
  EXPECT_EQ(s->binders.size(), 2u);
  EXPECT_EQ(s->head_index, 0u);
  EXPECT_EQ(s->args, 2u);
  auto f = spine(parse("\\a.(f a)[z<-a]"));
  ASSERT_TRUE(f);
  EXPECT_EQ(f->head, "f");
  EXPECT_FALSE(f->head_index);
  EXPECT_EQ(f->args, 1u);
  auto g = spine(parse("(\\x.x[q<-x] w)[r<-\\a.a]"));
  EXPECT_FALSE(spine(parse("\\x.(\\y.y)[q<-x] w")));
  ASSERT_TRUE(g);
  EXPECT_EQ(g->head_index, 0u);
  EXPECT_FALSE(spine(parse("(x x)[x<-\\y.y]")));
  EXPECT_FALSE(spine(parse("(\\x.x) y")));
}

TEST(Properties, DiamondUpToSizeTen) {
  TermGenerator g(31);
  std::size_t checked = 0;
  for (int n = 0; n < 3000; ++n) {
    Term t = g.lsc_up_to(10);
    auto rs = lhe_redexes(t);
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t j = i + 1; j < rs.size(); ++j) {
        Term a = lhe_step(t, rs[i]), b = lhe_step(t, rs[j]);
        bool joined = alpha_eq(a, b);
        for (const auto& ra : lhe_redexes(a))
          for (const auto& rb : lhe_redexes(b))
            if (!joined && alpha_eq(lhe_step(a, ra), lhe_step(b, rb))) joined = true;
        EXPECT_TRUE(joined) << print(t);
        ++checked;
      }
  }
  EXPECT_GT(checked, 50u);
}

TEST(Properties, SpineAgreesWithHeadNormalForm) {
  std::size_t compared = 0;
  for (const auto& t : random_corpus(8, 400, 10)) {
    auto r = lhe_normalize(t, 2000);
    if (!r.normal_form) continue;
    auto hnf = head_normalize(unfold(t), 2000);
    ASSERT_TRUE(hnf) << print(t);
    auto a = spine(*r.normal_form), b = spine(*hnf);
    ASSERT_TRUE(a && b) << print(t);
    EXPECT_EQ(a->binders.size(), b->binders.size()) << print(t);
    EXPECT_EQ(a->head_index, b->head_index) << print(t);
    if (!a->head_index) {
      EXPECT_EQ(a->head, b->head) << print(t);
    }
    EXPECT_EQ(a->args, b->args) << print(t);
    // The unfolded normal form is the head normal form itself.
    EXPECT_TRUE(alpha_eq(unfold(*r.normal_form), *hnf)) << print(t);
    ++compared;
  }
  EXPECT_GT(compared, 200u);
}

TEST(Properties, GcCanBePostponed) {
  for (const auto& t : random_corpus(12, 300, 10)) {
    auto with = lhe_normalize(t, 2000, true);
    auto without = lhe_normalize(t, 2000, false);
    ASSERT_EQ(with.normal_form.has_value(), without.normal_form.has_value()) << print(t);
    if (!with.normal_form) continue;
    EXPECT_TRUE(alpha_eq(unfold(*with.normal_form), unfold(gc_all(*without.normal_form)))) << print(t);
    EXPECT_TRUE(lhe_redexes(gc_all(*without.normal_form)).empty());
  }
}

TEST(Properties, LsOnlyTouchesTheHeadOccurrence) {
  TermGenerator g(44);
  std::size_t seen = 0;
  for (int n = 0; n < 3000; ++n) {
    Term t = g.lsc_up_to(11);
    for (const auto& r : lhe_redexes(t)) {
      if (r.rule != RuleName::ls) continue;
      Term u = lhe_step(t, r);
      auto hv = head_variable(subterm_at(t, r.site)->body());
      ASSERT_TRUE(hv);
      Path occ = concat(concat(r.site, {Step::SubBody}), hv->path);
      std::vector<Path> diffs;
      Path p;
      diff_positions(t, u, p, diffs);
      // Renamed binders aside, the only change is at the head occurrence.
      for (const auto& d : diffs) {
        if (d == occ) continue;
        Term a = *subterm_at(t, d);
        EXPECT_TRUE(a.is(Kind::Abs) || a.is(Kind::Sub)) << print(t) << " differs at " << print_path(d);
      }
      EXPECT_TRUE(alpha_eq(unfold(t), unfold(u))) << print(t);
      ++seen;
    }
  }
  EXPECT_GT(seen, 100u);
}

TEST(Properties, StepsPreserveTheUnfoldedHeadNormalForm) {
  for (const auto& t : random_corpus(19, 300, 9)) {
    auto h = head_normalize(unfold(t), 500);
    if (!h) continue;
    for (const auto& r : lhe_redexes(t)) {
      auto h2 = head_normalize(unfold(lhe_step(t, r)), 500);
      ASSERT_TRUE(h2) << print(t);
      EXPECT_TRUE(alpha_eq(*h, *h2)) << print(t) << " via " << rule_name(r.rule);
    }
  }
}

TEST(ContextRewrite, DbAroundTheHole) {
  auto a = ctx_rewrite(RuleName::dB, parse_context("((\\x.[.])[y<-v]) w"));
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(print(a[0]), "[.][x<-w][y<-v]");
  auto b = ctx_rewrite(RuleName::dB, parse_context("(\\x.x) [.]"));
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(print(b[0]), "x[x<-[.]]");
  auto c = ctx_rewrite(RuleName::dB, parse_context("((\\x.x) z) [.]"));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(print(c[0]), "x[x<-z] [.]");
}

TEST(ContextRewrite, ParametricLs) {
  Term ctx = parse_context("(x y)[x<-[.]]");
  EXPECT_TRUE(ctx_rewrite(RuleName::ls, ctx).empty());
  auto r = ctx_rewrite(RuleName::ls, ctx, parse("\\q.q"));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(print(r[0]), "([.] y)[x<-\\q.q]");
  // A hole in the body is just carried along.
  auto s = ctx_rewrite(RuleName::ls, parse_context("(x [.])[x<-\\q.q]"));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(print(s[0]), "((\\q.q) [.])[x<-\\q.q]");
}

TEST(ContextRewrite, ParametricGc) {
  Term ctx = parse_context("[.][x<-v]");
  EXPECT_TRUE(ctx_rewrite(RuleName::gc, ctx).empty());
  auto a = ctx_rewrite(RuleName::gc, ctx, parse("y"));
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(print(a[0]), "[.]");
  EXPECT_TRUE(ctx_rewrite(RuleName::gc, ctx, parse("x")).empty());
  // x occurs in the body outside the hole: no erasure, and the readings differ.
  std::vector<std::string> notes;
  EXPECT_TRUE(ctx_rewrite(RuleName::gc, parse_context("(x [.])[x<-v]"), parse("y"), &notes).empty());
  EXPECT_EQ(notes.size(), 1u);
  EXPECT_THROW(ctx_rewrite(RuleName::gc, parse("x")), std::invalid_argument);
}
