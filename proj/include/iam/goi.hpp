#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "iam/machine.hpp"

namespace iam {

// Exponential signatures: box, pairs <s,t>, and the two contraction choices.
class Signature {
 public:
  enum class Kind { Box, Pair, Left, Right };

  static Signature box() { return Signature(Kind::Box, nullptr, nullptr); }
  static Signature pair(const Signature& a, const Signature& b) { return Signature(Kind::Pair, a.n_, b.n_); }
  static Signature left(const Signature& a) { return Signature(Kind::Left, a.n_, nullptr); }
  static Signature right(const Signature& a) { return Signature(Kind::Right, a.n_, nullptr); }

  Kind kind() const { return n_->kind; }

  friend bool operator==(const Signature& a, const Signature& b) {
    if (a.n_ == b.n_) return true;
    if (a.n_->kind != b.n_->kind) return false;
    auto eq = [](const std::shared_ptr<const Node>& x, const std::shared_ptr<const Node>& y) {
      return (!x && !y) || (x && y && Signature(x) == Signature(y));
    };
    return eq(a.n_->a, b.n_->a) && eq(a.n_->b, b.n_->b);
  }

  std::string str() const {
    switch (n_->kind) {
      case Kind::Box: return "□";
      case Kind::Pair: return "<" + Signature(n_->a).str() + "," + Signature(n_->b).str() + ">";
      case Kind::Left: return "<l," + Signature(n_->a).str() + ">";
      case Kind::Right: return "<r," + Signature(n_->a).str() + ">";
    }
    return "?";
  }

 private:
  struct Node {
    Kind kind;
    std::shared_ptr<const Node> a, b;
  };
  Signature(Kind k, std::shared_ptr<const Node> a, std::shared_ptr<const Node> b)
      : n_(std::make_shared<const Node>(Node{k, std::move(a), std::move(b)})) {}
  explicit Signature(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

  std::shared_ptr<const Node> n_;
};

using GoiItem = std::variant<Mark, Signature>;

// Boxes stack B and balancing stack S, tops first.
struct GoiState {
  std::vector<Signature> boxes;
  std::vector<GoiItem> balancing;
  friend bool operator==(const GoiState&, const GoiState&) = default;
};

inline std::string to_string(const GoiState& g) {
  std::string s = "B=";
  if (g.boxes.empty()) s += "ε";
  for (std::size_t i = 0; i < g.boxes.size(); ++i) s += (i ? "·" : "") + g.boxes[i].str();
  s += " S=";
  if (g.balancing.empty()) s += "ε";
  for (std::size_t i = 0; i < g.balancing.size(); ++i) {
    if (i) s += "·";
    s += std::holds_alternative<Mark>(g.balancing[i]) ? "p" : std::get<Signature>(g.balancing[i]).str();
  }
  return s;
}

// Relative paths of the occurrences bound by the binder at `binder`, left to right.
inline std::vector<Path> bound_occurrences(const Term& code, const Path& binder) {
  Term b = *subterm_at(code, binder);
  std::vector<Path> out;
  Path cur{b.is(Kind::Abs) ? Step::AbsBody : Step::SubBody};
  const std::string& x = b.name();
  std::function<void(const Term&)> walk = [&](const Term& t) {
    switch (t.kind()) {
      case Kind::Var:
        if (t.name() == x) out.push_back(cur);
        return;
      case Kind::Hole: return;
      case Kind::Abs:
        if (t.name() == x) return;
        cur.push_back(Step::AbsBody);
        walk(t.body());
        cur.pop_back();
        return;
      case Kind::App:
        cur.push_back(Step::AppLeft);
        walk(t.fun());
        cur.back() = Step::AppRight;
        walk(t.arg());
        cur.pop_back();
        return;
      case Kind::Sub:
        if (t.name() != x) {
          cur.push_back(Step::SubBody);
          walk(t.body());
          cur.pop_back();
        }
        cur.push_back(Step::SubDefiniens);
        walk(t.definiens());
        cur.pop_back();
        return;
    }
  };
  walk(b.body());
  return out;
}

// Contraction choices from the root of the right comb to the occurrence:
// occurrence i of k sits at r^i l, the last one at r^(k-1).  Empty when linear.
inline std::vector<bool> comb_path(std::size_t i, std::size_t k) {
  std::vector<bool> right;  // true = r, false = l
  if (k < 2) return right;
  for (std::size_t j = 0; j < i; ++j) right.push_back(true);
  if (i + 1 < k) right.push_back(false);
  return right;
}

inline std::vector<bool> contraction_of(const Term& code, const LoggedPosition& lp) {
  auto occs = bound_occurrences(code, lp.binder());
  for (std::size_t i = 0; i < occs.size(); ++i)
    if (occs[i] == lp.occurrence()) return comb_path(i, occs.size());
  throw std::invalid_argument("logged occurrence is not bound by its binder");
}

inline Signature wrap_contraction(Signature s, const std::vector<bool>& comb) {
  for (auto it = comb.rbegin(); it != comb.rend(); ++it) s = *it ? Signature::right(s) : Signature::left(s);
  return s;
}

inline Signature encode(const Term& code, const LoggedPosition& lp) {
  Signature s = Signature::box();
  for (const auto& e : lp.log()) s = Signature::pair(encode(code, e), s);
  return wrap_contraction(s, contraction_of(code, lp));
}

inline GoiState encode_state(const State& st) {
  GoiState g;
  for (const auto& e : st.log) g.boxes.push_back(encode(st.code, e));
  for (const auto& i : st.tape) {
    if (is_mark(i)) g.balancing.emplace_back(Mark{});
    else g.balancing.emplace_back(encode(st.code, std::get<LoggedPosition>(i)));
  }
  return g;
}

// The token's micro-steps for one var / var2 transition from s: dereliction,
// one auxiliary door per box of the relative context, the contraction tree,
// and for var2 the principal door of the substitution's box.
inline std::vector<GoiState> micro_var_expand(const State& s) {
  auto r = step(s);
  auto* t = std::get_if<Transition>(&r);
  if (!t || (t->rule != Rule::Var && t->rule != Rule::Var2))
    throw std::invalid_argument("state does not fire a variable transition");
  const LoggedPosition& lp = t->rule == Rule::Var ? std::get<LoggedPosition>(t->next.tape.top()) : t->next.log.top();
  std::vector<GoiState> out{encode_state(s)};
  GoiState g = out.back();
  g.balancing.insert(g.balancing.begin(), Signature::box());
  out.push_back(g);
  for (std::size_t i = 0; i < lp.log().size(); ++i) {
    Signature door = g.boxes.front();
    Signature top = std::get<Signature>(g.balancing.front());
    g.boxes.erase(g.boxes.begin());
    g.balancing.front() = Signature::pair(door, top);
    out.push_back(g);
  }
  auto comb = contraction_of(s.code, lp);
  for (auto it = comb.rbegin(); it != comb.rend(); ++it) {
    Signature top = std::get<Signature>(g.balancing.front());
    g.balancing.front() = *it ? Signature::right(top) : Signature::left(top);
    out.push_back(g);
  }
  if (t->rule == Rule::Var2) {
    g.boxes.insert(g.boxes.begin(), std::get<Signature>(g.balancing.front()));
    g.balancing.erase(g.balancing.begin());
    out.push_back(g);
  }
  return out;
}

// What a non-variable transition does to the two stacks.
inline std::optional<GoiState> act(Rule rule, GoiState g) {
  switch (rule) {
    case Rule::Dot1:
    case Rule::Dot4: g.balancing.insert(g.balancing.begin(), Mark{}); return g;
    case Rule::Dot2:
    case Rule::Dot3:
      if (g.balancing.empty() || !std::holds_alternative<Mark>(g.balancing.front())) return std::nullopt;
      g.balancing.erase(g.balancing.begin());
      return g;
    case Rule::Arg:
      if (g.balancing.empty() || std::holds_alternative<Mark>(g.balancing.front())) return std::nullopt;
      g.boxes.insert(g.boxes.begin(), std::get<Signature>(g.balancing.front()));
      g.balancing.erase(g.balancing.begin());
      return g;
    case Rule::Bt1:
      if (g.boxes.empty()) return std::nullopt;
      g.balancing.insert(g.balancing.begin(), g.boxes.front());
      g.boxes.erase(g.boxes.begin());
      return g;
    case Rule::Es:
    case Rule::Es2: return g;
    default: return std::nullopt;
  }
}

struct CoherenceReport {
  bool ok = true;
  std::size_t transitions = 0;
  std::size_t index = 0;  // first failing transition
  std::string what;
};

// Every transition of the trace, checked against the token's action on the
// encoded stacks.  The jumps back (bt2, var3) are checked as the reverse of
// the variable transition they undo.
inline CoherenceReport check_coherence(const std::vector<State>& trace, const std::vector<Rule>& rules) {
  CoherenceReport rep;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    ++rep.transitions;
    const State& s = trace[i];
    const State& n = trace[i + 1];
    GoiState from = encode_state(s), to = encode_state(n);
    bool ok = false;
    switch (rules[i]) {
      case Rule::Var:
      case Rule::Var2: {
        auto e = micro_var_expand(s);
        ok = e.front() == from && e.back() == to;
        break;
      }
      case Rule::Bt2:
      case Rule::Var3: {
        auto e = micro_var_expand(n.flipped());
        ok = e.front() == to && e.back() == from;
        break;
      }
      default: {
        auto g = act(rules[i], from);
        ok = g && *g == to;
      }
    }
    if (!ok) {
      rep.ok = false;
      rep.index = i;
      rep.what = std::string("transition ") + rule_name(rules[i]) + " does not match the encoding";
      return rep;
    }
  }
  return rep;
}

}  // namespace iam
