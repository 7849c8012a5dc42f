#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace simulate {

// Parse problems are collected, never thrown: the caller reports all of
// them at once.
struct ErrorList {
  std::vector<std::string> errors;

  void add(const std::string& where, const std::string& what) {
    errors.push_back(where + ": " + what);
  }
  bool ok() const { return errors.empty(); }
};

enum class Dim { frequency, field, time };

// A dimensional input in canonical units: rad/s, tesla, or seconds.
// gamma_relative marks the "Gamma" / "/Gamma" suffixes, which are resolved
// against the scenario's decay rate after parsing.
struct Quantity {
  double value = 0.0;
  bool gamma_relative = false;
};

// Accepted spellings for a dimensional value:
//   "4e6 rad/s"                      number, whitespace, unit suffix
//   {"value": 4e6, "unit": "rad/s"}  object form (value may be an array)
// A bare number is rejected: every dimensional input names its unit.
// Frequencies given in Hz and multiples are cycle frequencies and convert
// to angular units with a factor 2 pi.
std::optional<Quantity> parse_quantity(const nlohmann::json& node, Dim dim,
                                       const std::string& key, ErrorList& errs);

// Object form with an array value, one unit for all entries.
std::optional<std::vector<Quantity>> parse_quantity_array(const nlohmann::json& node,
                                                          Dim dim, const std::string& key,
                                                          ErrorList& errs);

// Unit names for error messages and the manifest echo.
const char* canonical_unit(Dim dim);

}  // namespace simulate
