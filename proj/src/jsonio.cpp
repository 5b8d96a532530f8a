#include "cans/jsonio.hpp"

#include <fstream>
#include <utility>
#include <vector>

#include "cans/errors.hpp"

namespace cans {

namespace {

std::vector<double> number_array(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw ParseError(std::string(what) + ": expected a non-empty array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number())
      throw ParseError(std::string(what) + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

double number_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ParseError(std::string("missing numeric field \"") + key + "\"");
  return j[key].get<double>();
}

}  // namespace

nlohmann::json poly_to_json(const OddPolynomial& p) {
  return nlohmann::json{{"coeffs", p.coeffs()}};
}

OddPolynomial poly_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("coeffs"))
    throw ParseError("polynomial: expected an object with \"coeffs\"");
  return OddPolynomial(number_array(j["coeffs"], "coeffs"));
}

nlohmann::json composition_to_json(const Composition& c) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : c.polys()) arr.push_back(poly_to_json(p));
  return arr;
}

Composition composition_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty())
    throw ParseError("composition: expected a non-empty array of polynomials");
  std::vector<OddPolynomial> stages;
  stages.reserve(j.size());
  for (const auto& e : j) stages.push_back(poly_from_json(e));
  return Composition(std::move(stages));
}

nlohmann::json minimax_to_json(const MinimaxResult& r) {
  return nlohmann::json{{"a", r.a},
                        {"alternance", r.alternance},
                        {"b", r.b},
                        {"coeffs", r.poly.coeffs()},
                        {"epsilon", r.epsilon}};
}

nlohmann::json schedule_to_json(const Schedule& s,
                                std::optional<double> delta) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : s.entries) {
    entries.push_back(nlohmann::json{{"a", e.pre.lo},
                                     {"b", e.pre.hi},
                                     {"coeffs", e.poly.coeffs()},
                                     {"epsilon", e.epsilon}});
  }
  nlohmann::json j{{"entries", std::move(entries)},
                   {"total_matmuls", s.total_matmuls}};
  if (delta) j["delta"] = *delta;
  return j;
}

Schedule schedule_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array() ||
      j["entries"].empty())
    throw ParseError("schedule: expected an object with non-empty \"entries\"");
  Schedule s;
  for (const auto& e : j["entries"]) {
    ScheduleEntry entry{OddPolynomial(number_array(e["coeffs"], "coeffs")),
                        Interval{number_field(e, "a"), number_field(e, "b")},
                        Interval{},
                        number_field(e, "epsilon")};
    s.entries.push_back(std::move(entry));
  }
  // post intervals: each stage feeds the next; the last is [1-eps, 1+eps]
  // (or [1-delta, 1+delta] when the design targeted delta).
  for (std::size_t k = 0; k + 1 < s.entries.size(); ++k)
    s.entries[k].post = s.entries[k + 1].pre;
  double final_eps = s.entries.back().epsilon;
  if (j.contains("delta")) {
    if (!j["delta"].is_number()) throw ParseError("schedule: bad \"delta\"");
    final_eps = j["delta"].get<double>();
  }
  s.entries.back().post = Interval{1.0 - final_eps, 1.0 + final_eps};
  if (j.contains("total_matmuls")) {
    if (!j["total_matmuls"].is_number_integer())
      throw ParseError("schedule: bad \"total_matmuls\"");
    s.total_matmuls = j["total_matmuls"].get<long>();
  } else {
    for (const auto& e : s.entries)
      s.total_matmuls += e.poly.matmul_cost();
  }
  return s;
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

Composition load_composition_file(const std::string& path) {
  try {
    return composition_from_json(load_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(path + ": " + e.what());
  }
}

Schedule load_schedule_file(const std::string& path) {
  try {
    return schedule_from_json(load_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace cans
