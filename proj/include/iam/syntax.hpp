#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace iam {

enum class Kind : std::uint8_t { Var, Abs, App, Sub, Hole };

// One step down the syntax tree.  Sub nodes are t[x<-u]: body t, definiens u.
enum class Step : std::uint8_t { AbsBody, AppLeft, AppRight, SubBody, SubDefiniens };

using Path = std::vector<Step>;

inline bool is_box_step(Step s) { return s == Step::AppRight || s == Step::SubDefiniens; }

inline std::size_t level(const Path& p) {
  return static_cast<std::size_t>(std::count_if(p.begin(), p.end(), is_box_step));
}

inline bool is_prefix(const Path& pre, const Path& p) {
  return pre.size() <= p.size() && std::equal(pre.begin(), pre.end(), p.begin());
}

inline Path concat(Path a, const Path& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline Path suffix_after(const Path& p, std::size_t n) { return Path(p.begin() + static_cast<std::ptrdiff_t>(n), p.end()); }

inline const char* step_name(Step s) {
  switch (s) {
    case Step::AbsBody: return "abs_body";
    case Step::AppLeft: return "app_left";
    case Step::AppRight: return "app_right";
    case Step::SubBody: return "sub_body";
    case Step::SubDefiniens: return "sub_def";
  }
  return "?";
}

inline std::optional<Step> step_from_name(std::string_view n) {
  for (Step s : {Step::AbsBody, Step::AppLeft, Step::AppRight, Step::SubBody, Step::SubDefiniens})
    if (n == step_name(s)) return s;
  return std::nullopt;
}

class Term {
  struct Node {
    Kind kind;
    std::string name;
    std::shared_ptr<const Node> left, right;
    std::size_t size;
  };

 public:
  Term() = default;

  static Term var(std::string x) { return Term(Node{Kind::Var, std::move(x), nullptr, nullptr, 1}); }
  static Term hole() { return Term(Node{Kind::Hole, "", nullptr, nullptr, 1}); }
  static Term abs(std::string x, const Term& body) {
    return Term(Node{Kind::Abs, std::move(x), body.n_, nullptr, 1 + body.size()});
  }
  static Term app(const Term& f, const Term& a) {
    return Term(Node{Kind::App, "", f.n_, a.n_, 1 + f.size() + a.size()});
  }
  static Term sub(const Term& body, std::string x, const Term& def) {
    return Term(Node{Kind::Sub, std::move(x), body.n_, def.n_, 1 + body.size() + def.size()});
  }

  bool null() const { return !n_; }
  Kind kind() const { return n_->kind; }
  bool is(Kind k) const { return n_ && n_->kind == k; }
  // Variable name, or the binder of an abstraction / substitution.
  const std::string& name() const { return n_->name; }
  std::size_t size() const { return n_ ? n_->size : 0; }

  Term body() const { return Term(n_->left); }  // Abs and Sub
  Term fun() const { return Term(n_->left); }
  Term arg() const { return Term(n_->right); }
  Term definiens() const { return Term(n_->right); }

  std::optional<Term> child(Step s) const {
    switch (s) {
      case Step::AbsBody: if (is(Kind::Abs)) return body(); break;
      case Step::AppLeft: if (is(Kind::App)) return fun(); break;
      case Step::AppRight: if (is(Kind::App)) return arg(); break;
      case Step::SubBody: if (is(Kind::Sub)) return body(); break;
      case Step::SubDefiniens: if (is(Kind::Sub)) return definiens(); break;
    }
    return std::nullopt;
  }

  // Rebuild this node with one child replaced.
  Term with_child(Step s, const Term& c) const {
    switch (s) {
      case Step::AbsBody: return abs(name(), c);
      case Step::AppLeft: return app(c, arg());
      case Step::AppRight: return app(fun(), c);
      case Step::SubBody: return sub(c, name(), definiens());
      case Step::SubDefiniens: return sub(body(), name(), c);
    }
    return *this;
  }

  Term renamed(std::string x) const {
    Node n = *n_;
    n.name = std::move(x);
    return Term(std::move(n));
  }

  const void* identity() const { return n_.get(); }

  // Structural equality, names included.
  friend bool operator==(const Term& a, const Term& b) {
    if (a.n_ == b.n_) return true;
    if (!a.n_ || !b.n_) return false;
    const Node& x = *a.n_;
    const Node& y = *b.n_;
    return x.kind == y.kind && x.size == y.size && x.name == y.name && Term(x.left) == Term(y.left) &&
           Term(x.right) == Term(y.right);
  }

 private:
  explicit Term(Node n) : n_(std::make_shared<const Node>(std::move(n))) {}
  explicit Term(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

  std::shared_ptr<const Node> n_;
};

struct PathError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline std::optional<Term> subterm_at(const Term& root, const Path& p) {
  Term t = root;
  for (Step s : p) {
    auto c = t.child(s);
    if (!c) return std::nullopt;
    t = *c;
  }
  return t;
}

inline Term replace_at(const Term& root, const Path& p, const Term& filler, std::size_t from = 0) {
  if (from == p.size()) return filler;
  auto c = root.child(p[from]);
  if (!c) throw PathError("path does not resolve");
  return root.with_child(p[from], replace_at(*c, p, filler, from + 1));
}

// A term together with a path into it; the path is the context C and the
// subterm at its end is what C is wrapped around.
class Position {
 public:
  Position(Term root, Path path) : root_(std::move(root)), path_(std::move(path)) {
    auto s = subterm_at(root_, path_);
    if (!s) throw PathError("path does not resolve");
    sub_ = *s;
  }

  const Term& root() const { return root_; }
  const Path& path() const { return path_; }
  const Term& subterm() const { return sub_; }
  std::size_t level() const { return iam::level(path_); }
  Term context() const { return replace_at(root_, path_, Term::hole()); }

  friend bool operator==(const Position& a, const Position& b) {
    return a.path_ == b.path_ && a.root_ == b.root_;
  }

 private:
  Term root_;
  Path path_;
  Term sub_;
};

inline Position resolve(const Term& root, Path p) { return Position(root, std::move(p)); }

inline Term plug(const Position& ctx, const Term& filler) { return replace_at(ctx.root(), ctx.path(), filler); }

// The m-outer position of p: cut the path right after its m-th box step,
// counted from the root.  The result has level m.
inline Position outer_position(const Position& p, std::size_t m) {
  if (m == 0 || m > p.level()) throw std::out_of_range("outer position index out of range");
  std::size_t seen = 0;
  for (std::size_t i = 0; i < p.path().size(); ++i) {
    if (is_box_step(p.path()[i]) && ++seen == m)
      return Position(p.root(), Path(p.path().begin(), p.path().begin() + static_cast<std::ptrdiff_t>(i) + 1));
  }
  throw std::logic_error("unreachable");
}

// Substitution context [x1<-u1]...[xn<-un]; entries[0] is the innermost.
struct SubstCtx {
  std::vector<std::pair<std::string, Term>> entries;

  Term plug(Term t) const {
    for (const auto& [x, u] : entries) t = Term::sub(t, x, u);
    return t;
  }
  std::size_t size() const { return entries.size(); }
};

// ---------------------------------------------------------------- variables

inline void collect_free(const Term& t, std::vector<std::string>& bound, std::set<std::string>& out) {
  switch (t.kind()) {
    case Kind::Var:
      if (std::find(bound.begin(), bound.end(), t.name()) == bound.end()) out.insert(t.name());
      break;
    case Kind::Hole: break;
    case Kind::Abs:
      bound.push_back(t.name());
      collect_free(t.body(), bound, out);
      bound.pop_back();
      break;
    case Kind::App:
      collect_free(t.fun(), bound, out);
      collect_free(t.arg(), bound, out);
      break;
    case Kind::Sub:
      collect_free(t.definiens(), bound, out);
      bound.push_back(t.name());
      collect_free(t.body(), bound, out);
      bound.pop_back();
      break;
  }
}

inline std::set<std::string> free_vars(const Term& t) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  collect_free(t, bound, out);
  return out;
}

inline bool occurs_free(const std::string& x, const Term& t) { return free_vars(t).count(x) > 0; }

inline void collect_names(const Term& t, std::set<std::string>& out) {
  if (t.is(Kind::Hole)) return;
  if (!t.is(Kind::App)) out.insert(t.name());
  for (Step s : {Step::AbsBody, Step::AppLeft, Step::AppRight, Step::SubBody, Step::SubDefiniens})
    if (auto c = t.child(s)) collect_names(*c, out);
}

inline std::set<std::string> all_names(const Term& t) {
  std::set<std::string> out;
  collect_names(t, out);
  return out;
}

inline std::string fresh_name(std::string base, const std::set<std::string>& avoid) {
  while (avoid.count(base)) base += '\'';
  return base;
}

inline bool closed(const Term& t) { return free_vars(t).empty(); }

// Path from the root to the nearest enclosing binder of the variable at p,
// or nullopt if the variable is free.  Sub nodes bind only in their body.
inline std::optional<std::size_t> binder_index(const Term& root, const Path& p) {
  auto x = subterm_at(root, p);
  if (!x || !x->is(Kind::Var)) return std::nullopt;
  std::vector<Term> nodes{root};
  for (std::size_t i = 0; i + 1 < p.size(); ++i) nodes.push_back(*nodes.back().child(p[i]));
  for (std::size_t i = p.size(); i-- > 0;) {
    const Term& n = nodes[i];
    if ((p[i] == Step::AbsBody || p[i] == Step::SubBody) && n.name() == x->name()) return i;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- alpha

namespace detail {
inline std::ptrdiff_t scope_index(const std::vector<std::string>& env, const std::string& x) {
  for (std::size_t i = env.size(); i-- > 0;)
    if (env[i] == x) return static_cast<std::ptrdiff_t>(env.size() - i);
  return -1;
}

inline bool alpha_rec(const Term& a, const Term& b, std::vector<std::string>& ea, std::vector<std::string>& eb) {
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  switch (a.kind()) {
    case Kind::Hole: return true;
    case Kind::Var: {
      auto i = scope_index(ea, a.name());
      auto j = scope_index(eb, b.name());
      return i == j && (i >= 0 || a.name() == b.name());
    }
    case Kind::App: return alpha_rec(a.fun(), b.fun(), ea, eb) && alpha_rec(a.arg(), b.arg(), ea, eb);
    case Kind::Abs:
    case Kind::Sub: {
      if (a.is(Kind::Sub) && !alpha_rec(a.definiens(), b.definiens(), ea, eb)) return false;
      ea.push_back(a.name());
      eb.push_back(b.name());
      bool r = alpha_rec(a.body(), b.body(), ea, eb);
      ea.pop_back();
      eb.pop_back();
      return r;
    }
  }
  return false;
}
}  // namespace detail

inline bool alpha_eq(const Term& a, const Term& b) {
  std::vector<std::string> ea, eb;
  return detail::alpha_rec(a, b, ea, eb);
}

// ---------------------------------------------------------------- printing

namespace detail {
enum class Slot { Top, Left, Right, SubBody };

inline void print_rec(const Term& t, Slot slot, std::string& out) {
  bool paren = false;
  switch (t.kind()) {
    case Kind::Var:
    case Kind::Hole: break;
    case Kind::Sub: break;
    case Kind::Abs: paren = slot != Slot::Top; break;
    case Kind::App: paren = slot == Slot::Right || slot == Slot::SubBody; break;
  }
  if (paren) out += '(';
  switch (t.kind()) {
    case Kind::Var: out += t.name(); break;
    case Kind::Hole: out += "[.]"; break;
    case Kind::Abs:
      out += '\\';
      out += t.name();
      out += '.';
      print_rec(t.body(), Slot::Top, out);
      break;
    case Kind::App:
      print_rec(t.fun(), Slot::Left, out);
      out += ' ';
      print_rec(t.arg(), Slot::Right, out);
      break;
    case Kind::Sub:
      print_rec(t.body(), Slot::SubBody, out);
      out += '[';
      out += t.name();
      out += "<-";
      print_rec(t.definiens(), Slot::Top, out);
      out += ']';
      break;
  }
  if (paren) out += ')';
}
}  // namespace detail

inline std::string print(const Term& t) {
  std::string out;
  detail::print_rec(t, detail::Slot::Top, out);
  return out;
}

inline std::string print_context(const Term& root, const Path& p) { return print(replace_at(root, p, Term::hole())); }

inline std::string print_path(const Path& p) {
  std::string s = "[";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ',';
    s += step_name(p[i]);
  }
  return s + "]";
}

// ---------------------------------------------------------------- parsing

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset(offset) {}
  std::size_t offset;
};

namespace detail {
class Parser {
 public:
  Parser(std::string_view src, bool holes) : src_(src), holes_(holes) {}

  Term parse() {
    Term t = term();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected input");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool at_lambda() {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '\\') return true;
    return src_.substr(pos_, 2) == "\xCE\xBB";
  }

  bool peek(std::string_view tok) {
    skip_ws();
    return src_.substr(pos_, tok.size()) == tok;
  }

  void expect(std::string_view tok) {
    if (!peek(tok)) fail("expected '" + std::string(tok) + "'");
    pos_ += tok.size();
  }

  bool at_ident() {
    skip_ws();
    return pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]));
  }

  std::string ident() {
    if (!at_ident()) fail("expected identifier");
    std::size_t start = pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'') ++pos_;
      else break;
    }
    return std::string(src_.substr(start, pos_ - start));
  }

  bool at_hole() { return holes_ && peek("[.]"); }

  bool at_atom() { return at_ident() || peek("(") || at_hole(); }

  Term term() {
    if (at_lambda()) return abstraction();
    return application();
  }

  Term abstraction() {
    pos_ += src_[pos_] == '\\' ? 1 : 2;
    std::string x = ident();
    expect(".");
    return Term::abs(x, term());
  }

  Term application() {
    if (!at_atom()) fail("expected term");
    Term t = item();
    while (true) {
      if (at_atom()) t = Term::app(t, item());
      else if (at_lambda()) return Term::app(t, abstraction());
      else return t;
    }
  }

  Term item() {
    Term t = atom();
    while (peek("[") && !at_hole()) {
      expect("[");
      std::string x = ident();
      expect("<-");
      Term u = term();
      expect("]");
      t = Term::sub(t, x, u);
    }
    return t;
  }

  Term atom() {
    if (at_hole()) {
      pos_ += 3;
      return Term::hole();
    }
    if (peek("(")) {
      expect("(");
      Term t = term();
      expect(")");
      return t;
    }
    return Term::var(ident());
  }

  std::string_view src_;
  bool holes_;
  std::size_t pos_ = 0;
};
}  // namespace detail

inline Term parse(std::string_view src) { return detail::Parser(src, false).parse(); }

// Like parse, but also accepts the hole atom "[.]".
inline Term parse_context(std::string_view src) { return detail::Parser(src, true).parse(); }

inline std::optional<Path> hole_path(const Term& t) {
  if (t.is(Kind::Hole)) return Path{};
  for (Step s : {Step::AbsBody, Step::AppLeft, Step::AppRight, Step::SubBody, Step::SubDefiniens}) {
    if (auto c = t.child(s)) {
      if (auto p = hole_path(*c)) {
        p->insert(p->begin(), s);
        return p;
      }
    }
  }
  return std::nullopt;
}

inline std::size_t count_holes(const Term& t) {
  if (t.is(Kind::Hole)) return 1;
  std::size_t n = 0;
  for (Step s : {Step::AbsBody, Step::AppLeft, Step::AppRight, Step::SubBody, Step::SubDefiniens})
    if (auto c = t.child(s)) n += count_holes(*c);
  return n;
}

// All paths of t, in pre-order.
inline void all_paths(const Term& t, Path& cur, std::vector<Path>& out) {
  out.push_back(cur);
  for (Step s : {Step::AbsBody, Step::AppLeft, Step::AppRight, Step::SubBody, Step::SubDefiniens}) {
    if (auto c = t.child(s)) {
      cur.push_back(s);
      all_paths(*c, cur, out);
      cur.pop_back();
    }
  }
}

inline std::vector<Path> all_paths(const Term& t) {
  Path cur;
  std::vector<Path> out;
  all_paths(t, cur, out);
  return out;
}

}  // namespace iam
