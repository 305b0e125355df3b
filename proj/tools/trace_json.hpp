#pragma once

#include <json.hpp>

#include "iam/goi.hpp"
#include "iam/machine.hpp"
#include "iam/reduction.hpp"

namespace iam::trace_json {

using nlohmann::json;

inline json path(const Path& p) {
  json a = json::array();
  for (Step s : p) a.push_back(step_name(s));
  return a;
}

json logged(const LoggedPosition& lp);

inline json log(const Log& l) {
  json a = json::array();
  for (const auto& e : l) a.push_back(logged(e));
  return a;
}

inline json logged(const LoggedPosition& lp) {
  return {{"var", lp.var()}, {"binder_path", path(lp.binder())}, {"occ_path", path(lp.occurrence())}, {"log", log(lp.log())}};
}

inline json tape(const Tape& t) {
  json a = json::array();
  for (const auto& i : t) a.push_back(is_mark(i) ? json("p") : logged(std::get<LoggedPosition>(i)));
  return a;
}

inline json state(std::size_t i, const State& s) {
  return {{"i", i},
          {"dir", s.dir == Direction::Down ? "down" : "up"},
          {"sub", print(s.focus)},
          {"path", path(s.path)},
          {"log", log(s.log)},
          {"tape", tape(s.tape)}};
}

inline json outcome(const Outcome& o) {
  json j = {{"result", to_string(o)}};
  switch (o.kind) {
    case Outcome::Kind::Pair: j["kind"] = "pair"; j["h"] = o.h; j["j"] = o.j; break;
    case Outcome::Kind::OpenPair: j["kind"] = "open"; j["var"] = o.var; j["j"] = o.j; break;
    case Outcome::Kind::HasAbs: j["kind"] = "hasabs"; break;
    case Outcome::Kind::Timeout: j["kind"] = "timeout"; break;
    case Outcome::Kind::Stuck: j["kind"] = "stuck"; break;
  }
  return j;
}

inline json goi(const GoiState& g) {
  json b = json::array(), s = json::array();
  for (const auto& x : g.boxes) b.push_back(x.str());
  for (const auto& x : g.balancing) s.push_back(std::holds_alternative<Mark>(x) ? std::string("p") : std::get<Signature>(x).str());
  return {{"boxes", b}, {"balancing", s}};
}

}  // namespace iam::trace_json
