#include "simulate/units.hpp"

#include <cmath>
#include <cstdlib>
#include <utility>

namespace simulate {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

struct UnitEntry {
  const char* name;
  double factor;
  bool gamma_relative;
};

const UnitEntry* unit_table(Dim dim, int& count) {
  static const UnitEntry freq[] = {
      {"rad/s", 1.0, false},        {"/s", 1.0, false},
      {"1/s", 1.0, false},          {"Hz", two_pi, false},
      {"kHz", two_pi * 1e3, false}, {"MHz", two_pi * 1e6, false},
      {"GHz", two_pi * 1e9, false}, {"Gamma", 1.0, true},
  };
  static const UnitEntry field[] = {
      {"T", 1.0, false},
      {"mT", 1e-3, false},
      {"uT", 1e-6, false},
      {"G", 1e-4, false},
  };
  static const UnitEntry time[] = {
      {"s", 1.0, false},    {"ms", 1e-3, false},     {"us", 1e-6, false},
      {"ns", 1e-9, false},  {"/Gamma", 1.0, true},   {"1/Gamma", 1.0, true},
  };
  switch (dim) {
    case Dim::frequency: count = sizeof(freq) / sizeof(freq[0]); return freq;
    case Dim::field: count = sizeof(field) / sizeof(field[0]); return field;
    case Dim::time: count = sizeof(time) / sizeof(time[0]); return time;
  }
  count = 0;
  return nullptr;
}

std::string known_units(Dim dim) {
  int count = 0;
  const UnitEntry* table = unit_table(dim, count);
  std::string out;
  for (int i = 0; i < count; ++i) {
    if (i) out += ", ";
    out += table[i].name;
  }
  return out;
}

const UnitEntry* lookup(Dim dim, const std::string& unit) {
  int count = 0;
  const UnitEntry* table = unit_table(dim, count);
  for (int i = 0; i < count; ++i)
    if (unit == table[i].name) return &table[i];
  return nullptr;
}

bool split_string_form(const std::string& text, double& value, std::string& unit) {
  const char* begin = text.c_str();
  char* end = nullptr;
  value = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t') ++end;
  if (*end == '\0') return false;  // no unit part
  unit = end;
  while (!unit.empty() && (unit.back() == ' ' || unit.back() == '\t')) unit.pop_back();
  return true;
}

std::optional<Quantity> convert(double value, const std::string& unit, Dim dim,
                                const std::string& key, ErrorList& errs) {
  if (!std::isfinite(value)) {
    errs.add(key, "value must be finite");
    return std::nullopt;
  }
  const UnitEntry* entry = lookup(dim, unit);
  if (!entry) {
    errs.add(key, "unknown unit \"" + unit + "\" (expected one of: " + known_units(dim) + ")");
    return std::nullopt;
  }
  return Quantity{value * entry->factor, entry->gamma_relative};
}

}  // namespace

const char* canonical_unit(Dim dim) {
  switch (dim) {
    case Dim::frequency: return "rad/s";
    case Dim::field: return "T";
    case Dim::time: return "s";
  }
  return "";
}

std::optional<Quantity> parse_quantity(const nlohmann::json& node, Dim dim,
                                       const std::string& key, ErrorList& errs) {
  if (node.is_number()) {
    errs.add(key, "missing unit on dimensional value (write e.g. \"" +
                      nlohmann::to_string(node) + " " + canonical_unit(dim) + "\")");
    return std::nullopt;
  }
  if (node.is_string()) {
    double value = 0.0;
    std::string unit;
    if (!split_string_form(node.get<std::string>(), value, unit)) {
      errs.add(key, "expected \"<number> <unit>\", got " + nlohmann::to_string(node));
      return std::nullopt;
    }
    return convert(value, unit, dim, key, errs);
  }
  if (node.is_object()) {
    bool shape_ok = true;
    for (auto it = node.begin(); it != node.end(); ++it) {
      if (it.key() != "value" && it.key() != "unit") {
        errs.add(key, "unknown key \"" + it.key() + "\" in quantity object");
        shape_ok = false;
      }
    }
    if (!node.contains("value") || !node.contains("unit")) {
      errs.add(key, "quantity object needs both \"value\" and \"unit\"");
      return std::nullopt;
    }
    if (!node["value"].is_number()) {
      errs.add(key, "quantity \"value\" must be a number");
      return std::nullopt;
    }
    if (!node["unit"].is_string()) {
      errs.add(key, "quantity \"unit\" must be a string");
      return std::nullopt;
    }
    if (!shape_ok) return std::nullopt;
    return convert(node["value"].get<double>(), node["unit"].get<std::string>(), dim, key,
                   errs);
  }
  errs.add(key, "expected a quantity (string \"<number> <unit>\" or {value, unit})");
  return std::nullopt;
}

std::optional<std::vector<Quantity>> parse_quantity_array(const nlohmann::json& node,
                                                          Dim dim, const std::string& key,
                                                          ErrorList& errs) {
  if (!node.is_object() || !node.contains("value") || !node.contains("unit") ||
      !node["value"].is_array()) {
    errs.add(key, "expected {\"value\": [numbers...], \"unit\": \"...\"}");
    return std::nullopt;
  }
  for (auto it = node.begin(); it != node.end(); ++it) {
    if (it.key() != "value" && it.key() != "unit") {
      errs.add(key, "unknown key \"" + it.key() + "\" in quantity object");
      return std::nullopt;
    }
  }
  if (!node["unit"].is_string()) {
    errs.add(key, "quantity \"unit\" must be a string");
    return std::nullopt;
  }
  std::string unit = node["unit"].get<std::string>();
  std::vector<Quantity> out;
  out.reserve(node["value"].size());
  size_t i = 0;
  bool all_ok = true;
  for (const auto& v : node["value"]) {
    std::string where = key + "[" + std::to_string(i++) + "]";
    if (!v.is_number()) {
      errs.add(where, "expected a number");
      all_ok = false;
      continue;
    }
    auto q = convert(v.get<double>(), unit, dim, where, errs);
    if (!q) {
      all_ok = false;
      // the unit error repeats per element otherwise
      break;
    }
    out.push_back(*q);
  }
  if (!all_ok) return std::nullopt;
  return out;
}

}  // namespace simulate
