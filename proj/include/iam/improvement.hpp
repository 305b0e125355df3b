#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "iam/machine.hpp"
#include "iam/reduction.hpp"

namespace iam {

// The relation between machine states of t and of u, for one linear head
// step t -> u.  Positions of t are sent to the corresponding positions of u;
// a few positions (the pieces of the redex that the step consumes) have no
// counterpart.  For ls, a position inside the definiens may also be matched
// with the same position inside the fresh copy, dropping the log entry that
// records the crossing through the head occurrence.
class StepMap {
 public:
  StepMap(Term source, Redex redex) : t_(std::move(source)), redex_(std::move(redex)) {
    u_ = lhe_step(t_, redex_);
    Term node = *subterm_at(t_, redex_.site);
    if (redex_.rule == RuleName::dB) subs_ = *subs_around_abs(node.fun());
    if (redex_.rule == RuleName::ls) {
      head_ = concat(concat(redex_.site, {Step::SubBody}), head_variable(node.body())->path);
    }
  }

  const Term& source() const { return t_; }
  const Term& target() const { return u_; }
  const Redex& redex() const { return redex_; }

  struct Image {
    Path path;
    bool copy = false;  // ls: the image lies in the copy of the definiens
  };

  // Images of a state position of t.
  std::vector<Image> map_position(const Path& p) const { return map(p, false); }

  // Images of a binder node of t (abstraction or substitution).
  std::vector<Image> map_binder(const Path& p) const { return map(p, true); }

  // Logged position of the head occurrence, entered through the definiens.
  bool is_head_record(const LoggedPosition& lp) const {
    return redex_.rule == RuleName::ls && lp.binder() == redex_.site && lp.absolute() == head_ && lp.log().empty();
  }

  bool related(const State& s, const State& q) const {
    if (s.dir != q.dir || s.tape.size() != q.tape.size() || !(s.code == t_) || !(q.code == u_)) return false;
    bool tapes = false, tapes_known = false;
    for (const auto& img : map_position(s.path)) {
      if (img.path != q.path) continue;
      if (!tapes_known) {
        tapes = related_tapes(s.tape, q.tape);
        tapes_known = true;
      }
      if (!tapes) return false;
      if (img.copy) {
        if (s.log.empty() || !is_head_record(s.log.bottom())) continue;
        if (related_logs(s.log.without_bottom(), q.log)) return true;
      } else if (related_logs(s.log, q.log)) {
        return true;
      }
    }
    return false;
  }

  bool related(const LoggedPosition& a, const LoggedPosition& b) const {
    Path at = a.absolute();
    Path bt = b.absolute();
    for (const auto& bi : map_binder(a.binder())) {
      if (bi.path != b.binder()) continue;
      for (const auto& oi : map_binder(at)) {
        if (oi.path != bt) continue;
        bool in_def = redex_.rule == RuleName::ls && is_prefix(definiens_path(), a.binder());
        if (in_def) {
          if (oi.copy != bi.copy) continue;
          if (related_logs(a.log(), b.log())) return true;
        } else if (oi.copy) {
          if (a.log().empty() || !is_head_record(a.log().bottom())) continue;
          if (related_logs(a.log().without_bottom(), b.log())) return true;
        } else if (related_logs(a.log(), b.log())) {
          return true;
        }
      }
    }
    return false;
  }

  bool related_logs(const Log& a, const Log& b) const {
    if (a.size() != b.size()) return false;
    auto j = b.begin();
    for (const auto& x : a) {
      if (!related(x, *j)) return false;
      ++j;
    }
    return true;
  }

  bool related_tapes(const Tape& a, const Tape& b) const {
    if (a.size() != b.size()) return false;
    auto j = b.begin();
    for (const auto& x : a) {
      if (is_mark(x) != is_mark(*j)) return false;
      if (!is_mark(x) && !related(std::get<LoggedPosition>(x), std::get<LoggedPosition>(*j))) return false;
      ++j;
    }
    return true;
  }

 private:
  Path definiens_path() const { return concat(redex_.site, {Step::SubDefiniens}); }

  std::vector<Image> map(const Path& p, bool binders) const {
    const Path& site = redex_.site;
    if (!is_prefix(site, p) || p.size() == site.size()) return {{p}};
    Path r = suffix_after(p, site.size());
    switch (redex_.rule) {
      case RuleName::dB: {
        if (r[0] == Step::AppRight) {
          Path out = site;
          out.insert(out.end(), subs_, Step::SubBody);
          out.push_back(Step::SubDefiniens);
          return {{concat(out, suffix_after(r, 1))}};
        }
        std::size_t i = 0;
        while (i < subs_ && i + 1 < r.size() && r[i + 1] == Step::SubBody) ++i;
        Path out = site;
        out.insert(out.end(), i, Step::SubBody);
        Path rest = suffix_after(r, 1 + i);
        if (rest.empty()) {
          if (binders) return {{out}};  // substitutions of S, or the abstraction turned substitution
          return {};
        }
        if (i == subs_) out.push_back(Step::SubBody);  // rest starts with AbsBody
        else out.push_back(Step::SubDefiniens);        // rest starts with SubDefiniens
        return {{concat(out, suffix_after(rest, 1))}};
      }
      case RuleName::ls: {
        if (r[0] == Step::SubBody) return {{p}};
        Path copy = concat(head_, suffix_after(r, 1));
        return {{p}, {copy, true}};
      }
      case RuleName::gc: {
        if (r[0] == Step::SubDefiniens) return {};
        return {{concat(site, suffix_after(r, 1))}};
      }
    }
    return {};
  }

  Term t_, u_;
  Redex redex_;
  std::size_t subs_ = 0;  // dB: substitutions between the application and the abstraction
  Path head_;             // ls: absolute path of the head occurrence
};

// Relation for a rule without a fixed redex: some head redex of the rule's
// kind turns the code of s into the code of q.
inline std::optional<StepMap> find_step(const Term& t, const Term& u, std::optional<RuleName> rule = std::nullopt) {
  for (const auto& r : lhe_redexes(t, true)) {
    if (rule && r.rule != *rule) continue;
    StepMap m(t, r);
    if (alpha_eq(m.target(), u) && m.target() == u) return m;
  }
  return std::nullopt;
}

inline bool related(std::optional<RuleName> rule, const State& s, const State& q) {
  auto m = find_step(s.code, q.code, rule);
  return m && m->related(s, q);
}

// ---------------------------------------------------------------- diagrams

enum class Clause { FinalLeft, FinalRight, TransitionLeft, TransitionRight };

inline const char* clause_name(Clause c) {
  switch (c) {
    case Clause::FinalLeft: return "final-left";
    case Clause::FinalRight: return "final-right";
    case Clause::TransitionLeft: return "transition-left";
    case Clause::TransitionRight: return "transition-right";
  }
  return "?";
}

struct DiagramReport {
  Clause clause;
  bool applies = false;  // the clause's premise holds
  bool closed = false;
  std::size_t m = 0, n = 0;
};

// A run prefix, with whether it ends because its last state is final.
struct RunPrefix {
  std::vector<State> states;
  bool ends_final = false;

  static RunPrefix from(const State& s, std::size_t steps) {
    RunPrefix r{{s}};
    while (r.states.size() <= steps) {
      auto res = step(r.states.back());
      auto* t = std::get_if<Transition>(&res);
      if (!t) {
        r.ends_final = std::holds_alternative<FinalClass>(res);
        break;
      }
      r.states.push_back(t->next);
    }
    return r;
  }

  bool final_at(std::size_t i) const { return ends_final && i + 1 == states.size(); }
};

// The four clauses at the related pair (s_i, q_j).  For the transition
// clauses the earliest closing (m, n) is reported, m first.
inline std::vector<DiagramReport> check_diagram_at(const StepMap& rel, const RunPrefix& sr, std::size_t i,
                                                   const RunPrefix& qr, std::size_t j, std::size_t bound) {
  std::vector<DiagramReport> out;
  const std::size_t s_len = sr.states.size() - i;  // states available from s on
  const std::size_t q_len = qr.states.size() - j;
  auto S = [&](std::size_t m) -> const State& { return sr.states[i + m]; };
  auto Q = [&](std::size_t n) -> const State& { return qr.states[j + n]; };
  bool s_final = sr.final_at(i);
  bool q_final = qr.final_at(j);

  out.push_back({Clause::FinalLeft, s_final, !s_final || q_final});

  DiagramReport fr{Clause::FinalRight, q_final, true};
  if (q_final) {
    fr.closed = sr.ends_final && s_len <= bound + 1;
    fr.m = s_len - 1;
  }
  out.push_back(fr);

  DiagramReport tl{Clause::TransitionLeft, !s_final && s_len > 1};
  if (tl.applies) {
    for (std::size_t m = 0; m + 1 < s_len && m <= bound && !tl.closed; ++m)
      for (std::size_t n = 0; n <= m + 1 && n < q_len; ++n)
        if (rel.related(S(m + 1), Q(n))) {
          tl.closed = true;
          tl.m = m;
          tl.n = n;
          break;
        }
  } else {
    tl.closed = true;
  }
  out.push_back(tl);

  DiagramReport tr{Clause::TransitionRight, !q_final && q_len > 1};
  if (tr.applies) {
    for (std::size_t n = 0; n + 1 < q_len && n <= bound && !tr.closed; ++n)
      for (std::size_t m = n + 1; m < s_len && m <= bound + n + 1; ++m)
        if (rel.related(S(m), Q(n + 1))) {
          tr.closed = true;
          tr.m = m;
          tr.n = n;
          break;
        }
  } else {
    tr.closed = true;
  }
  out.push_back(tr);
  return out;
}

inline std::vector<DiagramReport> check_diagram(const StepMap& rel, const State& s, const State& q, std::size_t bound) {
  auto sr = RunPrefix::from(s, 2 * bound + 2);
  auto qr = RunPrefix::from(q, 2 * bound + 2);
  return check_diagram_at(rel, sr, 0, qr, 0, bound);
}

struct CoRunReport {
  bool ok = true;
  std::size_t syncs = 0;    // related pairs visited
  std::size_t s_steps = 0;  // transitions of the run of t covered
  bool reached_final = false;
  std::string failure;
};

// Walks the runs of t and u from their initial states, checking every clause
// at every related pair and resynchronising on the witness of the left
// transition clause.
inline CoRunReport co_run(const StepMap& rel, std::size_t k, std::size_t bound, std::size_t fuel) {
  CoRunReport rep;
  auto sr = RunPrefix::from(initial_state(rel.source(), k), fuel + 2 * bound + 2);
  auto qr = RunPrefix::from(initial_state(rel.target(), k), fuel + 2 * bound + 2);
  std::size_t i = 0, j = 0;
  if (!rel.related(sr.states[0], qr.states[0])) {
    rep.ok = false;
    rep.failure = "initial states are not related";
    return rep;
  }
  while (i <= fuel) {
    ++rep.syncs;
    auto reports = check_diagram_at(rel, sr, i, qr, j, bound);
    for (const auto& r : reports) {
      if (!r.closed) {
        rep.ok = false;
        rep.failure = std::string(clause_name(r.clause)) + " not closed after " + std::to_string(i) + " steps";
        return rep;
      }
    }
    if (reports[0].applies) {
      rep.reached_final = true;
      break;
    }
    if (!reports[2].applies) break;  // stuck, or the prefix ran out
    i += reports[2].m + 1;
    j += reports[2].n;
  }
  rep.s_steps = i;
  return rep;
}

// ---------------------------------------------------------------- soundness

struct SoundnessRow {
  Redex redex;
  Term reduct;
  Outcome before, after;
  std::optional<std::size_t> len_before, len_after;
  bool equal() const { return before == after; }
  bool both_timeout() const {
    return before.kind == Outcome::Kind::Timeout && after.kind == Outcome::Kind::Timeout;
  }
};

// Semantics and run length of t and of every head reduct of t.
inline std::vector<SoundnessRow> check_soundness(const Term& t, std::size_t k, std::size_t fuel) {
  std::vector<SoundnessRow> out;
  auto rb = run(t, k, fuel, false);
  for (const auto& r : lhe_redexes(t, true)) {
    Term u = lhe_step(t, r);
    auto ra = run(u, k, fuel, false);
    out.push_back({r, u, outcome_of(rb), outcome_of(ra),
                   rb.end == RunResult::End::Final ? std::optional(rb.steps) : std::nullopt,
                   ra.end == RunResult::End::Final ? std::optional(ra.steps) : std::nullopt});
  }
  return out;
}

// Least k0 <= kmax such that |t|_h > |u|_h for every h in [k0, kmax].
// Requires |t|_h to be finite on the whole range.
inline std::optional<std::size_t> check_length_decrease(const Term& t, const Term& u, std::size_t fuel,
                                                        std::size_t kmax) {
  std::optional<std::size_t> k0;
  for (std::size_t h = kmax + 1; h-- > 0;) {
    auto lt = run_length(t, h, fuel);
    auto lu = run_length(u, h, fuel);
    if (!lt || !lu || *lt <= *lu) break;
    k0 = h;
  }
  return k0;
}

}  // namespace iam
