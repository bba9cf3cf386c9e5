#include "ninput/report.hpp"

#include <cmath>

#include "json.hpp"

namespace ninput {
namespace {

using nlohmann::ordered_json;

ordered_json number(double x) {
  // JSON has no NaN/Inf; keep the information as a string.
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

ordered_json to_json_value(const Report& r) {
  ordered_json j;
  j["scenario"] = r.scenario;
  j["pass"] = r.passed();
  j["parameters"] = ordered_json::object();
  for (const auto& [k, v] : r.parameters) j["parameters"][k] = v;
  j["seeds"] = ordered_json::object();
  for (const auto& [k, v] : r.seeds) j["seeds"][k] = v;
  j["assertions"] = ordered_json::array();
  for (const auto& a : r.assertions) {
    ordered_json e;
    e["description"] = a.description;
    e["observed"] = number(a.observed);
    e["expected"] = number(a.expected);
    e["tolerance"] = number(a.tolerance);
    e["comparison"] = to_string(a.comparison);
    e["pass"] = a.pass;
    e["source"] = to_string(a.source);
    e["basis"] = a.basis;
    j["assertions"].push_back(std::move(e));
  }
  if (r.wall_seconds) j["wall_seconds"] = *r.wall_seconds;
  return j;
}

}  // namespace

const char* to_string(Source s) {
  switch (s) {
    case Source::reference: return "reference";
    case Source::elementary: return "elementary";
    case Source::oracle: return "oracle";
  }
  return "?";
}

const char* to_string(Comparison c) {
  switch (c) {
    case Comparison::near: return "near";
    case Comparison::at_most: return "at_most";
    case Comparison::at_least: return "at_least";
  }
  return "?";
}

Assertion make_assertion(std::string description, double observed, double expected, double tolerance,
                         Comparison comparison, Source source, std::string basis) {
  Assertion a{std::move(description), observed, expected, tolerance, comparison, source, std::move(basis), false};
  switch (comparison) {
    case Comparison::near: a.pass = std::abs(observed - expected) <= tolerance; break;
    case Comparison::at_most: a.pass = observed <= expected + tolerance; break;
    case Comparison::at_least: a.pass = observed >= expected - tolerance; break;
  }
  return a;
}

bool Report::passed() const {
  for (const auto& a : assertions) {
    if (!a.pass) return false;
  }
  return true;
}

std::string Report::to_json(int indent) const { return to_json_value(*this).dump(indent); }

std::string reports_to_json(const std::vector<Report>& reports, int indent) {
  ordered_json j;
  bool all = true;
  for (const auto& r : reports) all = all && r.passed();
  j["pass"] = all;
  j["reports"] = ordered_json::array();
  for (const auto& r : reports) j["reports"].push_back(to_json_value(r));
  return j.dump(indent);
}

}  // namespace ninput
