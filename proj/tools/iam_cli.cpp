// iam: run, inspect and cross-check the interaction abstract machine.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "iam/exhaustibility.hpp"
#include "iam/goi.hpp"
#include "iam/improvement.hpp"
#include "iam/machine.hpp"
#include "iam/properties.hpp"
#include "iam/reduction.hpp"
#include "trace_json.hpp"

namespace {

using namespace iam;
using nlohmann::json;

enum Exit { kOk = 0, kBottom = 1, kUsage = 2, kViolation = 3 };

struct Options {
  std::string term;
  std::string file;
  std::size_t k = 0;
  std::size_t fuel = 10000;
  bool json = false;
  bool trace_json = false;
  bool no_gc = false;
  bool check = false;
  std::string suite;
  std::size_t size = 9;
  std::size_t count = 100;
  std::size_t depth = 3;
  std::size_t kmax = 3;
  std::uint64_t seed = 1;
};

Term load(const Options& o) {
  std::string src = o.term;
  if (!o.file.empty()) {
    std::ifstream in(o.file);
    if (!in) throw std::runtime_error("cannot read " + o.file);
    std::stringstream ss;
    ss << in.rdbuf();
    src = ss.str();
  }
  if (src.empty()) throw std::runtime_error("no term given");
  return parse(src);
}

int run_cmd(const Options& o) {
  Term t = load(o);
  auto r = run(t, o.k, o.fuel);
  if (o.trace_json) {
    for (std::size_t i = 0; i < r.trace.size(); ++i) std::cout << trace_json::state(i, r.trace[i]).dump() << "\n";
  } else {
    std::printf("%4s  %-4s  %s | %s | %s | %s\n", "#", "dir", "subterm", "context", "log", "tape");
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      auto row = render(r.trace[i]);
      std::printf("%4zu  %-4s  %s | %s | %s | %s\n", i, row.dir.c_str(), row.sub.c_str(), row.ctx.c_str(),
                  row.log.c_str(), row.tape.c_str());
    }
  }
  switch (r.end) {
    case RunResult::End::Final:
      if (!o.trace_json) std::cout << to_string(r.final) << "\n";
      return kOk;
    case RunResult::End::OutOfFuel:
      if (!o.trace_json) std::cout << "TIMEOUT after " << r.steps << " steps\n";
      return kBottom;
    case RunResult::End::Violation:
      std::cerr << "invariant violation: " << r.violation << "\n";
      return kViolation;
  }
  return kOk;
}

int sem_cmd(const Options& o) {
  Term t = load(o);
  auto r = run(t, o.k, o.fuel, false);
  Outcome out = outcome_of(r);
  if (o.json) {
    json j = trace_json::outcome(out);
    j["k"] = o.k;
    j["steps"] = r.steps;
    std::cout << j.dump() << "\n";
  } else {
    std::cout << to_string(out) << "\n";
  }
  if (out.kind == Outcome::Kind::Stuck) return kViolation;
  return out.kind == Outcome::Kind::Timeout ? kBottom : kOk;
}

int reduce_cmd(const Options& o) {
  Term t = load(o);
  auto red = lhe_normalize(t, o.fuel, !o.no_gc);
  for (const auto& [r, u] : red.steps) {
    if (o.json) std::cout << json{{"rule", rule_name(r.rule)}, {"site", trace_json::path(r.site)}, {"term", print(u)}}.dump() << "\n";
    else std::cout << rule_name(r.rule) << "  " << print_path(r.site) << "  " << print(u) << "\n";
  }
  if (!red.normal_form) {
    if (!o.json) std::cout << "no normal form within " << o.fuel << " steps\n";
    return kBottom;
  }
  return kOk;
}

int diff_cmd(const Options& o) {
  Term t = load(o);
  auto red = lhe_normalize(t, o.fuel, !o.no_gc);
  std::vector<std::pair<std::string, Term>> seq{{"", t}};
  for (const auto& [r, u] : red.steps) seq.emplace_back(rule_name(r.rule), u);
  int code = kOk;
  Outcome first = semantics(t, o.k, o.fuel);
  std::optional<std::size_t> prev;
  bool first_row = true;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    auto r = run(seq[i].second, o.k, o.fuel, false);
    Outcome out = outcome_of(r);
    std::optional<std::size_t> len;
    if (r.end == RunResult::End::Final) len = r.steps;
    bool agrees = out == first;
    bool shorter = first_row || !prev || (len && *len <= *prev);
    if (!agrees || !shorter) code = kViolation;
    if (out.bottom() && code == kOk) code = kBottom;
    if (o.json) {
      json j = {{"i", i}, {"rule", seq[i].first}, {"term", print(seq[i].second)}, {"outcome", trace_json::outcome(out)},
                {"length", len ? json(*len) : json(nullptr)}, {"agrees", agrees}};
      std::cout << j.dump() << "\n";
    } else {
      std::printf("%3zu  %-3s  %-22s  %6s  %s  %s\n", i, seq[i].first.c_str(), to_string(out).c_str(),
                  len ? std::to_string(*len).c_str() : "inf", agrees ? "ok" : "DIFFERS", print(seq[i].second).c_str());
    }
    prev = len;
    first_row = false;
  }
  return code;
}

int goi_cmd(const Options& o) {
  Term t = load(o);
  auto r = run(t, o.k, o.fuel);
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const State& s = r.trace[i];
    GoiState g = encode_state(s);
    if (o.json) {
      json j = trace_json::goi(g);
      j["i"] = i;
      j["rule"] = i == 0 ? "" : rule_name(r.rules[i - 1]);
      j["log"] = trace_json::log(s.log);
      j["tape"] = trace_json::tape(s.tape);
      std::cout << j.dump() << "\n";
    } else {
      std::printf("%4zu  %-5s  %s  |  L=%s T=%s\n", i, i == 0 ? "" : rule_name(r.rules[i - 1]), to_string(g).c_str(),
                  render(s.code, s.log).c_str(), render(s.code, s.tape).c_str());
    }
  }
  if (o.check) {
    auto rep = check_coherence(r.trace, r.rules);
    if (!rep.ok) {
      std::cerr << "incoherent at transition " << rep.index << ": " << rep.what << "\n";
      return kViolation;
    }
    if (!o.json) std::cout << "coherent on " << rep.transitions << " transitions\n";
  }
  return r.end == RunResult::End::OutOfFuel ? kBottom : kOk;
}

int check_cmd(const Options& o) {
  auto corpus = random_corpus(o.seed, o.count, o.size);
  json failures = json::array();
  std::size_t runs = 0, states = 0, by_bt2 = 0, by_var3 = 0;
  auto fail = [&](const Term& t, std::size_t k, const std::string& what) {
    failures.push_back({{"term", print(t)}, {"k", k}, {"what", what}});
  };
  for (const auto& t : corpus) {
    for (std::size_t k = 0; k <= o.kmax; ++k) {
      ++runs;
      if (o.suite == "exhaust") {
        auto r = run(t, k, o.fuel);
        ExhaustChecker checker(o.depth, o.fuel);
        for (std::size_t i = 0; i < r.trace.size(); ++i) {
          ++states;
          auto rep = checker.check(r.trace[i]);
          if (rep.verdict != Verdict::Exhaustible) {
            fail(t, k, "state " + std::to_string(i) + ": " + verdict_name(rep.verdict) + ", " + rep.detail);
            break;
          }
        }
        by_bt2 += checker.closed_by_bt2();
        by_var3 += checker.closed_by_var3();
      } else if (o.suite == "balance") {
        auto r = run(t, k, o.fuel);
        states += r.trace.size();
        auto rep = check_run_invariants(r.trace);
        if (!rep.ok) fail(t, k, "state " + std::to_string(rep.index) + ": " + rep.what);
      } else if (o.suite == "reversible") {
        auto r = run(t, k, o.fuel, false);
        State cur = r.last();
        std::size_t back = 0;
        while (auto prev = step_backward(cur)) {
          cur = *prev;
          if (++back > r.steps) break;
        }
        states += r.steps + 1;
        if (back != r.steps || !(cur == initial_state(t, k)))
          fail(t, k, "backward run has " + std::to_string(back) + " steps, forward run " + std::to_string(r.steps));
      } else if (o.suite == "lifting") {
        if (auto f = check_lifting(t, k, o.fuel)) fail(t, k, f->what);
      } else if (o.suite == "monotone") {
        if (auto f = check_monotone(t, k, o.fuel)) fail(t, k, f->what);
      } else {
        std::cerr << "unknown suite: " << o.suite << "\n";
        return kUsage;
      }
    }
  }
  json report = {{"suite", o.suite}, {"seed", o.seed},     {"terms", corpus.size()}, {"runs", runs},
                 {"states", states}, {"failures", failures}, {"ok", failures.empty()}};
  if (o.suite == "exhaust") report["tests_closed_by"] = {{"bt2", by_bt2}, {"var3", by_var3}};
  std::cout << report.dump(o.json ? -1 : 2) << "\n";
  return failures.empty() ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interaction abstract machine toolkit"};
  app.require_subcommand(1);
  Options o;

  auto term_opts = [&](CLI::App* sc) {
    sc->add_option("term", o.term, "Term, e.g. \"(\\x.x x)(\\y.y)\"");
    sc->add_option("--file", o.file, "Read the term from a file");
    sc->add_option("--k", o.k, "Number of initial marks on the tape");
    sc->add_option("--fuel", o.fuel, "Maximum number of transitions")->check(CLI::PositiveNumber);
    sc->add_flag("--json", o.json, "Emit JSON lines");
  };

  auto* run = app.add_subcommand("run", "Print the machine trace");
  term_opts(run);
  run->add_flag("--trace-json", o.trace_json, "One JSON object per state");
  auto* sem = app.add_subcommand("sem", "Print the semantics at k");
  term_opts(sem);
  auto* reduce = app.add_subcommand("reduce", "Print the linear head reduction sequence");
  term_opts(reduce);
  reduce->add_flag("--no-gc", o.no_gc, "Leave garbage substitutions in place");
  auto* diff = app.add_subcommand("diff", "Semantics and run length along the reduction sequence");
  term_opts(diff);
  diff->add_flag("--no-gc", o.no_gc, "Leave garbage substitutions in place");
  auto* goi = app.add_subcommand("goi", "Show the encoded token stacks next to the machine state");
  term_opts(goi);
  goi->add_flag("--check", o.check, "Check every transition against the token's micro-steps");
  auto* check = app.add_subcommand("check", "Run a property suite on a random corpus");
  check->add_option("--suite", o.suite, "exhaust, balance, reversible, lifting or monotone")->required();
  check->add_option("--size", o.size, "Maximum term size");
  check->add_option("--count", o.count, "Number of terms");
  check->add_option("--depth", o.depth, "Recursion depth of the exhaustibility check");
  check->add_option("--fuel", o.fuel, "Maximum number of transitions per run")->check(CLI::PositiveNumber);
  check->add_option("--kmax", o.kmax, "Largest k to run");
  check->add_option("--seed", o.seed, "Corpus seed");
  check->add_flag("--json", o.json, "Compact output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (run->parsed()) return run_cmd(o);
    if (sem->parsed()) return sem_cmd(o);
    if (reduce->parsed()) return reduce_cmd(o);
    if (diff->parsed()) return diff_cmd(o);
    if (goi->parsed()) return goi_cmd(o);
    if (check->parsed()) return check_cmd(o);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
