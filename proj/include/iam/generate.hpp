#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "iam/syntax.hpp"

namespace iam {

// Seeded random terms for property tests and the corpus checks.
class TermGenerator {
 public:
  explicit TermGenerator(std::uint64_t seed) : rng_(seed) {}

  // A term with explicit substitutions of exactly `size` nodes.  Roughly one
  // variable in eight is left free when open terms are allowed.
  Term lsc(std::size_t size, bool allow_open = true) {
    std::vector<std::string> scope;
    return gen(size, scope, true, allow_open);
  }

  Term pure(std::size_t size, bool allow_open = true) {
    std::vector<std::string> scope;
    return gen(size, scope, false, allow_open);
  }

  Term lsc_up_to(std::size_t max_size, bool allow_open = true) { return lsc(uniform(1, max_size), allow_open); }

  // A term whose free variables, apart from the free pool, come from `scope`.
  Term lsc_in(std::size_t size, std::vector<std::string> scope, bool allow_open = false) {
    return gen(size, scope, true, allow_open);
  }

  std::size_t uniform(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[uniform(0, v.size() - 1)];
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  Term variable(const std::vector<std::string>& scope, bool allow_open) {
    if (scope.empty() || (allow_open && coin(0.125))) {
      if (!allow_open && !scope.empty()) return Term::var(pick(scope));
      return Term::var(pick(free_names_));
    }
    return Term::var(pick(scope));
  }

  Term gen(std::size_t size, std::vector<std::string>& scope, bool subs, bool allow_open) {
    if (size <= 1) {
      if (!allow_open && scope.empty()) return Term::abs("x", Term::var("x"));  // smallest closed term
      return variable(scope, allow_open);
    }
    if (size == 2) return binder(Kind::Abs, size, scope, subs, allow_open);
    std::size_t choice = uniform(0, subs ? 9 : 6);
    if (choice < 3) return binder(Kind::Abs, size, scope, subs, allow_open);
    if (choice < 7) {
      std::size_t left = uniform(1, size - 2);
      Term f = gen(left, scope, subs, allow_open);
      return Term::app(f, gen(size - 1 - left, scope, subs, allow_open));
    }
    return binder(Kind::Sub, size, scope, subs, allow_open);
  }

  Term binder(Kind k, std::size_t size, std::vector<std::string>& scope, bool subs, bool allow_open) {
    const std::string& x = pick(binder_names_);
    if (k == Kind::Abs) {
      scope.push_back(x);
      Term b = gen(size - 1, scope, subs, allow_open);
      scope.pop_back();
      return Term::abs(x, b);
    }
    std::size_t body = uniform(1, size - 2);
    Term d = gen(size - 1 - body, scope, subs, allow_open);
    scope.push_back(x);
    Term b = gen(body, scope, subs, allow_open);
    scope.pop_back();
    return Term::sub(b, x, d);
  }

  std::mt19937_64 rng_;
  std::vector<std::string> binder_names_{"x", "y", "z", "w"};
  std::vector<std::string> free_names_{"f", "g"};
};

}  // namespace iam
