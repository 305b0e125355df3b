#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "iam/syntax.hpp"

namespace iam {

// Capture-avoiding meta-level substitution t{x:=u}.  Works on terms with
// explicit substitutions too; t[y<-d] binds y in t only.
inline Term subst(const Term& t, const std::string& x, const Term& u, const std::set<std::string>& fvu) {
  switch (t.kind()) {
    case Kind::Var: return t.name() == x ? u : t;
    case Kind::Hole: return t;
    case Kind::App: return Term::app(subst(t.fun(), x, u, fvu), subst(t.arg(), x, u, fvu));
    case Kind::Abs:
    case Kind::Sub: {
      Term def = t.is(Kind::Sub) ? subst(t.definiens(), x, u, fvu) : Term();
      auto rebuild = [&](const std::string& y, const Term& b) {
        return t.is(Kind::Abs) ? Term::abs(y, b) : Term::sub(b, y, def);
      };
      const std::string& y = t.name();
      if (y == x || !occurs_free(x, t.body())) return rebuild(y, t.body());
      if (fvu.count(y)) {
        std::set<std::string> avoid = fvu;
        collect_names(t.body(), avoid);
        avoid.insert(x);
        std::string y2 = fresh_name(y, avoid);
        Term b = subst(t.body(), y, Term::var(y2), {y2});
        return rebuild(y2, subst(b, x, u, fvu));
      }
      return rebuild(y, subst(t.body(), x, u, fvu));
    }
  }
  return t;
}

inline Term subst(const Term& t, const std::string& x, const Term& u) { return subst(t, x, u, free_vars(u)); }

// One head beta step on a pure term, or nullopt at head normal form.
inline std::optional<Term> head_step(const Term& t) {
  switch (t.kind()) {
    case Kind::Abs:
      if (auto b = head_step(t.body())) return Term::abs(t.name(), *b);
      return std::nullopt;
    case Kind::App:
      if (t.fun().is(Kind::Abs)) return subst(t.fun().body(), t.fun().name(), t.arg());
      if (auto f = head_step(t.fun())) return Term::app(*f, t.arg());
      return std::nullopt;
    default: return std::nullopt;
  }
}

// Meta-level unfolding: every explicit substitution becomes a substitution.
inline Term unfold(const Term& t) {
  switch (t.kind()) {
    case Kind::Var:
    case Kind::Hole: return t;
    case Kind::Abs: return Term::abs(t.name(), unfold(t.body()));
    case Kind::App: return Term::app(unfold(t.fun()), unfold(t.arg()));
    case Kind::Sub: return subst(unfold(t.body()), t.name(), unfold(t.definiens()));
  }
  return t;
}

// ---------------------------------------------------------------- linear head

enum class RuleName { dB, ls, gc };

inline const char* rule_name(RuleName r) {
  switch (r) {
    case RuleName::dB: return "dB";
    case RuleName::ls: return "ls";
    case RuleName::gc: return "gc";
  }
  return "?";
}

struct Redex {
  RuleName rule;
  Path site;
  friend bool operator==(const Redex&, const Redex&) = default;
};

struct HeadVariable {
  std::string name;
  Path path;  // relative to the term it was found in
};

// The variable at the end of the head path, unless a binder on the way binds it.
inline std::optional<HeadVariable> head_variable(const Term& t) {
  std::vector<std::string> bound;
  Path p;
  Term cur = t;
  while (true) {
    switch (cur.kind()) {
      case Kind::Var:
        if (std::find(bound.begin(), bound.end(), cur.name()) != bound.end()) return std::nullopt;
        return HeadVariable{cur.name(), p};
      case Kind::Hole: return std::nullopt;
      case Kind::Abs:
        bound.push_back(cur.name());
        p.push_back(Step::AbsBody);
        cur = cur.body();
        break;
      case Kind::Sub:
        bound.push_back(cur.name());
        p.push_back(Step::SubBody);
        cur = cur.body();
        break;
      case Kind::App:
        p.push_back(Step::AppLeft);
        cur = cur.fun();
        break;
    }
  }
}

// Number of substitutions wrapped around an abstraction, if t = S<\x.b>.
inline std::optional<std::size_t> subs_around_abs(Term t) {
  std::size_t n = 0;
  while (t.is(Kind::Sub)) {
    t = t.body();
    ++n;
  }
  if (t.is(Kind::Abs)) return n;
  return std::nullopt;
}

namespace detail {
inline void collect_redexes(const Term& t, Path& p, bool gc, std::vector<Redex>& out) {
  switch (t.kind()) {
    case Kind::App:
      if (subs_around_abs(t.fun())) out.push_back({RuleName::dB, p});
      p.push_back(Step::AppLeft);
      collect_redexes(t.fun(), p, gc, out);
      p.pop_back();
      break;
    case Kind::Sub: {
      auto hv = head_variable(t.body());
      if (hv && hv->name == t.name()) out.push_back({RuleName::ls, p});
      if (gc && !occurs_free(t.name(), t.body())) out.push_back({RuleName::gc, p});
      p.push_back(Step::SubBody);
      collect_redexes(t.body(), p, gc, out);
      p.pop_back();
      break;
    }
    case Kind::Abs:
      p.push_back(Step::AbsBody);
      collect_redexes(t.body(), p, gc, out);
      p.pop_back();
      break;
    default: break;
  }
}

inline Term contract_db(const Term& t, std::set<std::string> avoid) {
  Term w = t.arg();
  std::set<std::string> fvw = free_vars(w);
  avoid.insert(fvw.begin(), fvw.end());
  std::vector<Term> subs;  // innermost last
  Term cur = t.fun();
  while (cur.is(Kind::Sub)) {
    subs.push_back(cur);
    cur = cur.body();
  }
  // Rebuild S<\x.b>, renaming the binders of S that would capture fv(w).
  Term inner = cur;
  for (auto it = subs.rbegin(); it != subs.rend(); ++it) {
    std::string y = it->name();
    if (fvw.count(y)) {
      std::string y2 = fresh_name(y, avoid);
      avoid.insert(y2);
      inner = subst(inner, y, Term::var(y2), {y2});
      y = y2;
    }
    inner = Term::sub(inner, y, it->definiens());
  }
  // Peel the renamed S again: inner binders' definientia may have been renamed too.
  std::vector<Term> renamed;
  while (inner.is(Kind::Sub)) {
    renamed.push_back(inner);
    inner = inner.body();
  }
  Term out = Term::sub(inner.body(), inner.name(), w);
  for (auto it = renamed.rbegin(); it != renamed.rend(); ++it) out = Term::sub(out, it->name(), it->definiens());
  return out;
}

inline Term contract_ls(const Term& node, const Path& h, std::size_t i, const Term& r,
                        const std::set<std::string>& fvr, std::set<std::string>& avoid) {
  if (i == h.size()) return r;
  Term cur = node;
  Term child = *cur.child(h[i]);
  bool binds = cur.is(Kind::Abs) || (cur.is(Kind::Sub) && h[i] == Step::SubBody);
  if (binds && fvr.count(cur.name())) {
    std::string y2 = fresh_name(cur.name(), avoid);
    avoid.insert(y2);
    child = subst(child, cur.name(), Term::var(y2), {y2});
    cur = cur.renamed(y2);
  }
  return cur.with_child(h[i], contract_ls(child, h, i + 1, r, fvr, avoid));
}
}  // namespace detail

inline std::vector<Redex> lhe_redexes(const Term& t, bool include_gc = true) {
  std::vector<Redex> out;
  Path p;
  detail::collect_redexes(t, p, include_gc, out);
  return out;
}

inline Term lhe_step(const Term& t, const Redex& r) {
  auto rs = lhe_redexes(t, true);
  if (std::find(rs.begin(), rs.end(), r) == rs.end()) throw std::invalid_argument("not a head redex of the term");
  Term node = *subterm_at(t, r.site);
  switch (r.rule) {
    case RuleName::dB: return replace_at(t, r.site, detail::contract_db(node, all_names(t)));
    case RuleName::ls: {
      auto hv = head_variable(node.body());
      Term def = node.definiens();
      std::set<std::string> fvr = free_vars(def);
      std::set<std::string> avoid = all_names(t);
      avoid.insert(fvr.begin(), fvr.end());
      std::string x = node.name();
      Term body = node.body();
      if (fvr.count(x)) {  // the copy would be captured by the substitution itself
        x = fresh_name(x, avoid);
        avoid.insert(x);
        body = subst(body, node.name(), Term::var(x), {x});
      }
      body = detail::contract_ls(body, hv->path, 0, def, fvr, avoid);
      return replace_at(t, r.site, Term::sub(body, x, def));
    }
    case RuleName::gc: return replace_at(t, r.site, node.body());
  }
  return t;
}

struct Reduction {
  std::vector<std::pair<Redex, Term>> steps;  // each redex with the term it produced
  std::optional<Term> normal_form;            // nullopt when fuel ran out
};

// Leftmost-outermost linear head evaluation.
inline Reduction lhe_normalize(const Term& t, std::size_t fuel, bool include_gc = true) {
  Reduction out;
  Term cur = t;
  for (std::size_t i = 0;; ++i) {
    auto rs = lhe_redexes(cur, include_gc);
    if (rs.empty()) {
      out.normal_form = cur;
      return out;
    }
    if (i == fuel) return out;
    cur = lhe_step(cur, rs.front());
    out.steps.emplace_back(rs.front(), cur);
  }
}

// Shape of a head normal form \x0..\xn-1. S<y t1 .. tl> (substitution
// contexts skipped).  head_index counts binders from the outermost one.
struct Spine {
  std::vector<std::string> binders;
  std::optional<std::size_t> head_index;
  std::string head;
  std::size_t args = 0;
};

inline std::optional<Spine> spine(const Term& t) {
  Spine sp;
  struct Scope {
    std::string name;
    std::optional<std::size_t> lambda;
  };
  std::vector<Scope> scope;
  Term cur = t;
  while (true) {
    switch (cur.kind()) {
      case Kind::Abs:
        if (sp.args > 0) return std::nullopt;
        scope.push_back({cur.name(), sp.binders.size()});
        sp.binders.push_back(cur.name());
        cur = cur.body();
        break;
      case Kind::Sub:
        scope.push_back({cur.name(), std::nullopt});
        cur = cur.body();
        break;
      case Kind::App:
        ++sp.args;
        cur = cur.fun();
        break;
      case Kind::Hole: return std::nullopt;
      case Kind::Var: {
        sp.head = cur.name();
        for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
          if (it->name != cur.name()) continue;
          if (!it->lambda) return std::nullopt;
          sp.head_index = it->lambda;
          break;
        }
        return sp;
      }
    }
  }
}

// One-step reducts of a context (a term with exactly one hole) under the
// rule, closed by head contexts.  The hole is an opaque atom.  With a plug t,
// the variants that need to know the hole's content are included: copying a
// definiens that holds the hole, and erasing a substitution whose body holds
// it.  Erasure is only allowed when x is free in neither the plug nor the rest
// of the body; cases where x occurs only outside the plug are reported in notes.
inline std::vector<Term> ctx_rewrite(RuleName rule, const Term& ctx, const std::optional<Term>& plug = std::nullopt,
                                     std::vector<std::string>* notes = nullptr) {
  if (count_holes(ctx) != 1) throw std::invalid_argument("context must contain exactly one hole");
  Path hp = *hole_path(ctx);
  std::vector<Term> out;
  for (const auto& r : lhe_redexes(ctx, true)) {
    if (r.rule != rule) continue;
    bool inside = is_prefix(r.site, hp) && hp.size() > r.site.size();
    Term next = lhe_step(ctx, r);
    if (!inside || rule == RuleName::dB) {
      out.push_back(next);
      continue;
    }
    Step first = hp[r.site.size()];
    if (rule == RuleName::ls) {
      if (first == Step::SubBody) {
        out.push_back(next);
      } else if (plug) {
        Path in_def = r.site;
        in_def.push_back(Step::SubDefiniens);
        out.push_back(replace_at(next, concat(in_def, suffix_after(hp, r.site.size() + 1)), *plug));
      }
    } else if (first == Step::SubBody && plug) {
      const std::string& x = subterm_at(ctx, r.site)->name();
      if (!occurs_free(x, *plug)) out.push_back(next);
    }
  }
  if (rule == RuleName::gc && plug && notes) {
    // Substitutions above the hole that the weaker reading would also erase.
    Path p;
    for (std::size_t i = 0; i < hp.size(); ++i) {
      Term node = *subterm_at(ctx, p);
      if (node.is(Kind::Sub) && hp[i] == Step::SubBody && occurs_free(node.name(), node.body()) &&
          !occurs_free(node.name(), *plug)) {
        notes->push_back("readings differ at " + print_path(p));
      }
      if (hp[i] == Step::AppRight || hp[i] == Step::SubDefiniens) break;
      p.push_back(hp[i]);
    }
  }
  return out;
}

}  // namespace iam
