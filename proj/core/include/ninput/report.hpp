#pragma once

// Scenario reports: a list of checked assertions, serialized as JSON.
// Serialization is deterministic; wall-clock time is only emitted on request.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ninput {

/// Where an expected value comes from.
enum class Source {
  reference,   // a published closed form or exact counterexample value
  elementary,  // follows directly from a definition
  oracle,      // computed by an independent route (moment formula, hand enumeration)
};

const char* to_string(Source s);

enum class Comparison {
  near,      // |observed - expected| <= tolerance
  at_most,   // observed <= expected + tolerance
  at_least,  // observed >= expected - tolerance
};

const char* to_string(Comparison c);

struct Assertion {
  std::string description;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  Comparison comparison = Comparison::near;
  Source source = Source::elementary;
  std::string basis;   // the mathematical statement the expectation rests on
  bool pass = false;
};

Assertion make_assertion(std::string description, double observed, double expected, double tolerance,
                         Comparison comparison, Source source, std::string basis);

struct Report {
  std::string scenario;
  std::map<std::string, std::string> parameters;
  std::map<std::string, std::uint64_t> seeds;
  std::vector<Assertion> assertions;
  std::optional<double> wall_seconds;

  bool passed() const;
  std::string to_json(int indent = 2) const;
};

/// {"pass": ..., "reports": [...]} in the given order.
std::string reports_to_json(const std::vector<Report>& reports, int indent = 2);

}  // namespace ninput
