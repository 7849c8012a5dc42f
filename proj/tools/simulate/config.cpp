#include "simulate/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace simulate {

namespace {

using nlohmann::json;
using pauliblock::Mode3;
using pauliblock::Vec3;

constexpr double two_pi = 6.283185307179586476925286766559;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where, ErrorList& errs) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        known = true;
        break;
      }
    if (!known) errs.add(where, "unknown key \"" + it.key() + "\"");
  }
}

std::optional<double> get_number(const json& obj, const std::string& key,
                                 const std::string& where, ErrorList& errs,
                                 bool required, std::optional<double> fallback = {}) {
  if (!obj.contains(key)) {
    if (required) errs.add(where + "." + key, "required parameter missing");
    return fallback;
  }
  const json& node = obj[key];
  if (!node.is_number()) {
    if (node.is_string() || node.is_object())
      errs.add(where + "." + key, "dimensionless parameter must be a bare number");
    else
      errs.add(where + "." + key, "expected a number");
    return std::nullopt;
  }
  double v = node.get<double>();
  if (!std::isfinite(v)) {
    errs.add(where + "." + key, "value must be finite");
    return std::nullopt;
  }
  return v;
}

std::optional<int> get_integer(const json& obj, const std::string& key,
                               const std::string& where, ErrorList& errs, bool required,
                               std::optional<int> fallback = {}) {
  if (!obj.contains(key)) {
    if (required) errs.add(where + "." + key, "required parameter missing");
    return fallback;
  }
  const json& node = obj[key];
  if (!node.is_number_integer()) {
    errs.add(where + "." + key, "expected an integer");
    return std::nullopt;
  }
  return node.get<int>();
}

std::optional<bool> get_bool(const json& obj, const std::string& key,
                             const std::string& where, ErrorList& errs, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) {
    errs.add(where + "." + key, "expected true or false");
    return std::nullopt;
  }
  return obj[key].get<bool>();
}

std::optional<std::string> get_string(const json& obj, const std::string& key,
                                      const std::string& where, ErrorList& errs,
                                      bool required,
                                      std::optional<std::string> fallback = {}) {
  if (!obj.contains(key)) {
    if (required) errs.add(where + "." + key, "required parameter missing");
    return fallback;
  }
  if (!obj[key].is_string()) {
    errs.add(where + "." + key, "expected a string");
    return std::nullopt;
  }
  return obj[key].get<std::string>();
}

std::optional<Vec3> parse_vec3(const json& node, const std::string& where,
                               ErrorList& errs) {
  if (!node.is_array() || node.size() != 3) {
    errs.add(where, "expected an array of 3 numbers");
    return std::nullopt;
  }
  Vec3 v{};
  for (int j = 0; j < 3; ++j) {
    if (!node[j].is_number() || !std::isfinite(node[j].get<double>())) {
      errs.add(where, "expected an array of 3 finite numbers");
      return std::nullopt;
    }
    v[j] = node[j].get<double>();
  }
  return v;
}

std::optional<Mode3> get_mode3(const json& obj, const std::string& key,
                               const std::string& where, ErrorList& errs,
                               Mode3 fallback) {
  if (!obj.contains(key)) return fallback;
  const json& node = obj[key];
  if (!node.is_array() || node.size() != 3) {
    errs.add(where + "." + key, "expected an array of 3 non-negative integers");
    return std::nullopt;
  }
  Mode3 m{};
  for (int j = 0; j < 3; ++j) {
    if (!node[j].is_number_integer() || node[j].get<int>() < 0) {
      errs.add(where + "." + key, "expected an array of 3 non-negative integers");
      return std::nullopt;
    }
    m[j] = node[j].get<int>();
  }
  return m;
}

std::optional<Quantity> get_quantity(const json& obj, const std::string& key, Dim dim,
                                     const std::string& where, ErrorList& errs,
                                     bool required, std::optional<Quantity> fallback = {}) {
  if (!obj.contains(key)) {
    if (required) errs.add(where + "." + key, "required parameter missing");
    return fallback;
  }
  return parse_quantity(obj[key], dim, where + "." + key, errs);
}

// Resolves a frequency against gamma: "Gamma"-suffixed values are already
// multiples of gamma, physical ones divide by it.
double over_gamma(const Quantity& q, double gamma) {
  return q.gamma_relative ? q.value : q.value / gamma;
}

// Resolves a time to units of 1/gamma.
double times_gamma_units(const Quantity& q, double gamma) {
  return q.gamma_relative ? q.value : q.value * gamma;
}

std::optional<double> get_gamma(const json& p, const std::string& where, ErrorList& errs) {
  auto q = get_quantity(p, "gamma", Dim::frequency, where, errs, false,
                        Quantity{1.0, false});
  if (!q) return std::nullopt;
  if (q->gamma_relative) {
    errs.add(where + ".gamma", "the reference rate cannot itself be Gamma-relative");
    return std::nullopt;
  }
  if (!(q->value > 0.0)) {
    errs.add(where + ".gamma", "must be positive");
    return std::nullopt;
  }
  return q->value;
}

// "perp"/"parallel" orient the dipole relative to the x motion axis;
// an explicit 3-vector gives full control.
std::optional<Vec3> get_orientation(const json& p, const std::string& where,
                                    ErrorList& errs) {
  if (!p.contains("orientation")) return Vec3{0.0, 0.0, 1.0};
  const json& node = p["orientation"];
  if (node.is_string()) {
    std::string s = node.get<std::string>();
    if (s == "perp") return Vec3{0.0, 0.0, 1.0};
    if (s == "parallel") return Vec3{1.0, 0.0, 0.0};
    errs.add(where + ".orientation", "expected \"perp\", \"parallel\", or a 3-vector");
    return std::nullopt;
  }
  auto v = parse_vec3(node, where + ".orientation", errs);
  if (!v) return std::nullopt;
  if (pauliblock::norm(*v) == 0.0) {
    errs.add(where + ".orientation", "must be a nonzero vector");
    return std::nullopt;
  }
  return v;
}

// eta as a scalar or a 3-vector; the scalar meaning is scenario-specific
// (single tight axis or isotropic), so the caller maps it.
struct EtaInput {
  double scalar = 0.0;
  Vec3 vec{};
  bool is_scalar = false;
};

std::optional<EtaInput> get_eta(const json& p, const std::string& where, ErrorList& errs) {
  if (!p.contains("eta")) {
    errs.add(where + ".eta", "required parameter missing");
    return std::nullopt;
  }
  const json& node = p["eta"];
  EtaInput out;
  if (node.is_number()) {
    out.scalar = node.get<double>();
    out.is_scalar = true;
    if (!std::isfinite(out.scalar) || out.scalar < 0.0 || out.scalar > 2.0) {
      errs.add(where + ".eta", "must lie in [0, 2]");
      return std::nullopt;
    }
    return out;
  }
  auto v = parse_vec3(node, where + ".eta", errs);
  if (!v) return std::nullopt;
  for (double e : *v)
    if (e < 0.0 || e > 2.0) {
      errs.add(where + ".eta", "components must lie in [0, 2]");
      return std::nullopt;
    }
  out.vec = *v;
  return out;
}

// Times come either as an explicit list with one unit or as a linspace
// {start, stop, count}. Returned in units of 1/gamma.
std::optional<std::vector<double>> get_times(const json& p, const std::string& key,
                                             const std::string& where, ErrorList& errs,
                                             double gamma, bool required,
                                             bool allow_gamma_relative) {
  if (!p.contains(key)) {
    if (required) errs.add(where + "." + key, "required parameter missing");
    return std::nullopt;
  }
  const json& node = p[key];
  std::string loc = where + "." + key;
  std::vector<double> out;
  if (node.is_object() && node.contains("start")) {
    reject_unknown(node, {"start", "stop", "count"}, loc, errs);
    auto start = parse_quantity(node["start"], Dim::time, loc + ".start", errs);
    std::optional<Quantity> stop;
    if (node.contains("stop"))
      stop = parse_quantity(node["stop"], Dim::time, loc + ".stop", errs);
    else
      errs.add(loc + ".stop", "required");
    auto count = get_integer(node, "count", loc, errs, true);
    if (!start || !stop || !count) return std::nullopt;
    if (!allow_gamma_relative && (start->gamma_relative || stop->gamma_relative)) {
      errs.add(loc, "Gamma-relative units are not available in this scenario");
      return std::nullopt;
    }
    if (start->gamma_relative != stop->gamma_relative) {
      errs.add(loc, "start and stop must use the same kind of unit");
      return std::nullopt;
    }
    if (*count < 2) {
      errs.add(loc + ".count", "must be at least 2");
      return std::nullopt;
    }
    double a = times_gamma_units(*start, gamma);
    double b = times_gamma_units(*stop, gamma);
    if (!(b > a)) {
      errs.add(loc, "stop must exceed start");
      return std::nullopt;
    }
    out.resize(*count);
    for (int i = 0; i < *count; ++i)
      out[i] = (i == *count - 1) ? b : a + (b - a) * i / (*count - 1);
  } else {
    auto qs = parse_quantity_array(node, Dim::time, loc, errs);
    if (!qs) return std::nullopt;
    if (qs->empty()) {
      errs.add(loc, "needs at least one time");
      return std::nullopt;
    }
    out.reserve(qs->size());
    for (const auto& q : *qs) {
      if (!allow_gamma_relative && q.gamma_relative) {
        errs.add(loc, "Gamma-relative units are not available in this scenario");
        return std::nullopt;
      }
      out.push_back(times_gamma_units(q, gamma));
    }
  }
  for (size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 0.0) {
      errs.add(loc, "times must be non-negative");
      return std::nullopt;
    }
    if (i > 0 && out[i] <= out[i - 1]) {
      errs.add(loc, "times must be strictly ascending");
      return std::nullopt;
    }
  }
  return out;
}

std::optional<std::complex<double>> get_complex(const json& p, const std::string& key,
                                                const std::string& where, ErrorList& errs,
                                                std::complex<double> fallback,
                                                bool required) {
  if (!p.contains(key)) {
    if (required) {
      errs.add(where + "." + key, "required parameter missing");
      return std::nullopt;
    }
    return fallback;
  }
  const json& node = p[key];
  if (node.is_number()) return std::complex<double>(node.get<double>(), 0.0);
  if (node.is_array() && node.size() == 2 && node[0].is_number() && node[1].is_number())
    return std::complex<double>(node[0].get<double>(), node[1].get<double>());
  errs.add(where + "." + key, "expected a number or [re, im]");
  return std::nullopt;
}

// ---- per-scenario extraction ----

std::optional<RatesParams> extract_rates(const json& p, ErrorList& errs) {
  const std::string where = "parameters";
  reject_unknown(p, {"eta", "orientation", "gamma", "blocking_mode", "blocked",
                     "laser_khat"},
                 where, errs);
  RatesParams out;
  auto eta = get_eta(p, where, errs);
  auto dipole = get_orientation(p, where, errs);
  auto gamma = get_gamma(p, where, errs);
  auto blocking = get_mode3(p, "blocking_mode", where, errs, {0, 0, 0});
  auto blocked = get_bool(p, "blocked", where, errs, true);
  if (p.contains("laser_khat")) {
    auto k = parse_vec3(p["laser_khat"], where + ".laser_khat", errs);
    if (k && pauliblock::norm(*k) == 0.0) {
      errs.add(where + ".laser_khat", "must be a nonzero direction");
      k = std::nullopt;
    }
    if (!k) return std::nullopt;
    out.laser_khat = pauliblock::normalized(*k);
  }
  if (!eta || !dipole || !gamma || !blocking || !blocked) return std::nullopt;
  out.eta_scalar = eta->is_scalar;
  out.eta = eta->is_scalar ? Vec3{eta->scalar, 0.0, 0.0} : eta->vec;
  out.dipole = *dipole;
  out.gamma = *gamma;
  out.blocking_mode = *blocking;
  out.blocked = *blocked;
  return out;
}

struct ConstantsBlock {
  double a_hfs_hz = 0.0;
  double g_j = 0.0;
  double g_i = 0.0;
};

std::optional<ConstantsBlock> extract_constants(const json& c, const std::string& where,
                                                ErrorList& errs) {
  if (!c.is_object()) {
    errs.add(where, "expected an object {a_hfs, g_j, g_i}");
    return std::nullopt;
  }
  reject_unknown(c, {"a_hfs", "g_j", "g_i"}, where, errs);
  auto a = get_quantity(c, "a_hfs", Dim::frequency, where, errs, true);
  auto gj = get_number(c, "g_j", where, errs, true);
  auto gi = get_number(c, "g_i", where, errs, true);
  if (!a || !gj || !gi) return std::nullopt;
  if (a->gamma_relative) {
    errs.add(where + ".a_hfs", "Gamma-relative units are not available here");
    return std::nullopt;
  }
  if (a->value == 0.0) {
    errs.add(where + ".a_hfs", "must be nonzero");
    return std::nullopt;
  }
  // The hyperfine solver works in plain Hz, not angular units.
  return ConstantsBlock{a->value / two_pi, *gj, *gi};
}

std::optional<ZeemanParams> extract_zeeman(const json& p, const std::string& base_dir,
                                           ErrorList& errs) {
  const std::string where = "parameters";
  reject_unknown(p, {"x", "b_field", "species", "constants", "constants_file"}, where,
                 errs);
  ZeemanParams out;
  bool has_x = p.contains("x");
  bool has_b = p.contains("b_field");
  if (has_x == has_b) {
    errs.add(where, "give exactly one of \"x\" (dimensionless) or \"b_field\"");
    return std::nullopt;
  }
  if (has_x) {
    auto x = get_number(p, "x", where, errs, true);
    if (p.contains("constants") || p.contains("constants_file") || p.contains("species"))
      errs.add(where, "species constants only combine with \"b_field\"");
    if (!x) return std::nullopt;
    if (*x < 0.0) {
      errs.add(where + ".x", "must be non-negative");
      return std::nullopt;
    }
    out.x_mode = true;
    out.x = *x;
    return out;
  }
  auto b = get_quantity(p, "b_field", Dim::field, where, errs, true);
  if (b && b->value < 0.0) {
    errs.add(where + ".b_field", "must be non-negative");
    b = std::nullopt;
  }
  bool inline_constants = p.contains("constants");
  bool file_constants = p.contains("constants_file");
  if (inline_constants == file_constants) {
    errs.add(where, "b_field needs species constants: exactly one of \"constants\" or "
                    "\"constants_file\"");
    return std::nullopt;
  }
  std::optional<ConstantsBlock> cb;
  if (inline_constants) {
    cb = extract_constants(p["constants"], where + ".constants", errs);
    out.species = get_string(p, "species", where, errs, false, std::string{}).value_or("");
  } else {
    auto path = get_string(p, "constants_file", where, errs, true);
    auto species = get_string(p, "species", where, errs, true);
    if (!path || !species) return std::nullopt;
    std::string full = *path;
    if (!base_dir.empty() && !full.empty() && full[0] != '/')
      full = base_dir + "/" + full;
    std::ifstream in(full);
    if (!in) {
      errs.add(where + ".constants_file", "cannot open \"" + full + "\"");
      return std::nullopt;
    }
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) {
      errs.add(where + ".constants_file", "\"" + full + "\" is not valid JSON");
      return std::nullopt;
    }
    std::string floc = where + ".constants_file(" + *path + ")";
    if (!doc.is_object() || !doc.contains("schema") || !doc.contains("species")) {
      errs.add(floc, "expected {\"schema\": 1, \"species\": {name: {a_hfs, g_j, g_i}}}");
      return std::nullopt;
    }
    reject_unknown(doc, {"schema", "species", "note"}, floc, errs);
    if (!doc["schema"].is_number_integer() || doc["schema"].get<int>() != 1) {
      errs.add(floc + ".schema", "unsupported schema version");
      return std::nullopt;
    }
    if (!doc["species"].is_object() || !doc["species"].contains(*species)) {
      errs.add(floc, "species \"" + *species + "\" not found");
      return std::nullopt;
    }
    cb = extract_constants(doc["species"][*species], floc + "." + *species, errs);
    out.species = *species;
  }
  if (!b || !cb) return std::nullopt;
  out.x_mode = false;
  out.b_tesla = b->value;
  out.a_hfs_hz = cb->a_hfs_hz;
  out.g_j = cb->g_j;
  out.g_i = cb->g_i;
  return out;
}

std::optional<EvolveParams> extract_evolve(const json& p, ErrorList& errs) {
  const std::string where = "parameters";
  reject_unknown(p, {"eta", "nu", "orientation", "gamma", "n_max", "sectors",
                     "dipole_dipole", "initial", "blocking_mode", "times"},
                 where, errs);
  EvolveParams out;
  auto eta = get_eta(p, where, errs);
  auto dipole = get_orientation(p, where, errs);
  auto gamma = get_gamma(p, where, errs);
  if (!gamma) return std::nullopt;
  out.gamma = *gamma;

  // nu: scalar or per-axis, physical or Gamma-relative
  if (!p.contains("nu")) {
    errs.add(where + ".nu", "required parameter missing");
    return std::nullopt;
  }
  if (p["nu"].is_object() && p["nu"].contains("value") && p["nu"]["value"].is_array()) {
    auto qs = parse_quantity_array(p["nu"], Dim::frequency, where + ".nu", errs);
    if (!qs) return std::nullopt;
    if (qs->size() != 3) {
      errs.add(where + ".nu", "per-axis form needs exactly 3 values");
      return std::nullopt;
    }
    for (int j = 0; j < 3; ++j) out.nu_over_gamma[j] = over_gamma((*qs)[j], out.gamma);
  } else {
    auto q = parse_quantity(p["nu"], Dim::frequency, where + ".nu", errs);
    if (!q) return std::nullopt;
    double v = over_gamma(*q, out.gamma);
    out.nu_over_gamma = {v, v, v};
  }
  for (double v : out.nu_over_gamma)
    if (!(v > 0.0)) {
      errs.add(where + ".nu", "must be positive");
      return std::nullopt;
    }

  auto initial = get_string(p, "initial", where, errs, false, std::string("blocked_pair"));
  if (initial && *initial != "blocked_pair" && *initial != "single_excited") {
    errs.add(where + ".initial", "expected \"blocked_pair\" or \"single_excited\"");
    initial = std::nullopt;
  }

  // n_max: scalar follows the eta shape (tight axis or all axes)
  std::optional<Mode3> n_max;
  if (!p.contains("n_max")) {
    errs.add(where + ".n_max", "required parameter missing");
  } else if (p["n_max"].is_number_integer()) {
    int n = p["n_max"].get<int>();
    if (n < 0) {
      errs.add(where + ".n_max", "must be non-negative");
    } else if (eta && eta->is_scalar) {
      n_max = Mode3{n, 0, 0};
    } else {
      n_max = Mode3{n, n, n};
    }
  } else {
    n_max = get_mode3(p, "n_max", where, errs, {0, 0, 0});
  }

  if (p.contains("sectors")) {
    if (initial && *initial == "single_excited") {
      errs.add(where + ".sectors", "only applies to the pair problem");
      return std::nullopt;
    }
    const json& s = p["sectors"];
    if (!s.is_array() || s.empty()) {
      errs.add(where + ".sectors", "expected a non-empty array drawn from [0, 1, 2]");
      return std::nullopt;
    }
    out.sectors.clear();
    for (const auto& e : s) {
      if (!e.is_number_integer() || e.get<int>() < 0 || e.get<int>() > 2) {
        errs.add(where + ".sectors", "expected a non-empty array drawn from [0, 1, 2]");
        return std::nullopt;
      }
      out.sectors.insert(e.get<int>());
    }
  }

  if (p.contains("dipole_dipole")) {
    const json& dd = p["dipole_dipole"];
    if (dd.is_boolean()) {
      out.dd_include = dd.get<bool>();
    } else if (dd.is_object()) {
      reject_unknown(dd, {"cutoff"}, where + ".dipole_dipole", errs);
      auto c = get_number(dd, "cutoff", where + ".dipole_dipole", errs, true);
      if (!c) return std::nullopt;
      out.dd_include = true;
      out.dd_cutoff = *c;
    } else {
      errs.add(where + ".dipole_dipole", "expected a bool or {cutoff}");
      return std::nullopt;
    }
  }

  auto blocking = get_mode3(p, "blocking_mode", where, errs, {0, 0, 0});
  auto times = get_times(p, "times", where, errs, out.gamma, true, true);
  if (!eta || !dipole || !n_max || !initial || !blocking || !times) return std::nullopt;
  out.eta = eta->is_scalar ? Vec3{eta->scalar, 0.0, 0.0} : eta->vec;
  out.dipole = *dipole;
  out.n_max = *n_max;
  out.initial = *initial;
  out.blocking_mode = *blocking;
  out.times_gamma = *times;
  for (int j = 0; j < 3; ++j)
    if (out.blocking_mode[j] > out.n_max[j]) {
      errs.add(where + ".blocking_mode", "exceeds n_max");
      return std::nullopt;
    }
  return out;
}

std::optional<PhotonParams> extract_photon(const json& p, ErrorList& errs) {
  const std::string where = "parameters";
  reject_unknown(p, {"eta", "nu", "gamma", "mu0", "mu1", "t", "n_samples"}, where, errs);
  PhotonParams out;
  auto eta = get_eta(p, where, errs);
  if (eta && !eta->is_scalar) {
    errs.add(where + ".eta", "the wavepacket model is one-dimensional; give a scalar");
    eta = std::nullopt;
  }
  auto gamma = get_gamma(p, where, errs);
  if (!gamma) return std::nullopt;
  out.gamma = *gamma;
  std::optional<double> nu;
  if (!p.contains("nu")) {
    errs.add(where + ".nu", "required parameter missing");
  } else {
    auto q = parse_quantity(p["nu"], Dim::frequency, where + ".nu", errs);
    if (q) nu = over_gamma(*q, out.gamma);
  }
  auto mu0 = get_complex(p, "mu0", where, errs, {1.0, 0.0}, false);
  auto mu1 = get_complex(p, "mu1", where, errs, {0.0, 0.0}, false);
  std::optional<double> t;
  if (!p.contains("t")) {
    errs.add(where + ".t", "required parameter missing");
  } else {
    auto q = parse_quantity(p["t"], Dim::time, where + ".t", errs);
    if (q) t = times_gamma_units(*q, out.gamma);
  }
  auto n_samples = get_integer(p, "n_samples", where, errs, false, 4001);
  if (mu0 && mu1 && std::abs(std::norm(*mu0) + std::norm(*mu1) - 1.0) > 1e-9) {
    errs.add(where, "|mu0|^2 + |mu1|^2 must equal 1");
    mu0 = std::nullopt;
  }
  if (n_samples && *n_samples < 3) {
    errs.add(where + ".n_samples", "must be at least 3");
    n_samples = std::nullopt;
  }
  if (t && !(*t > 0.0)) {
    errs.add(where + ".t", "must be positive");
    t = std::nullopt;
  }
  if (!eta || !nu || !mu0 || !mu1 || !t || !n_samples) return std::nullopt;
  out.eta = eta->scalar;
  out.nu_over_gamma = *nu;
  out.mu0 = *mu0;
  out.mu1 = *mu1;
  out.t_gamma = *t;
  out.n_samples = *n_samples;
  return out;
}

std::optional<DipoleDipoleParams> extract_dd(const json& p, ErrorList& errs) {
  const std::string where = "parameters";
  reject_unknown(p, {"eta", "orientation", "gamma", "bra_e", "bra_g", "ket_g", "ket_e",
                     "cutoff"},
                 where, errs);
  DipoleDipoleParams out;
  auto eta = get_eta(p, where, errs);
  auto dipole = get_orientation(p, where, errs);
  auto gamma = get_gamma(p, where, errs);
  auto bra_e = get_mode3(p, "bra_e", where, errs, {0, 0, 0});
  auto bra_g = get_mode3(p, "bra_g", where, errs, {0, 0, 0});
  auto ket_g = get_mode3(p, "ket_g", where, errs, {0, 0, 0});
  auto ket_e = get_mode3(p, "ket_e", where, errs, {0, 0, 0});
  auto cutoff = get_number(p, "cutoff", where, errs, false, 0.01);
  if (cutoff && !(*cutoff > 1e-4 && *cutoff < 1.0)) {
    errs.add(where + ".cutoff", "must lie in (1e-4, 1)");
    cutoff = std::nullopt;
  }
  if (eta) {
    // In this scenario a scalar eta means an isotropic trap: the interaction
    // needs finite extent on every axis.
    double smallest = eta->is_scalar
                          ? eta->scalar
                          : std::min({eta->vec[0], eta->vec[1], eta->vec[2]});
    if (!(smallest > 0.0)) {
      errs.add(where + ".eta", "every axis needs a positive extent here");
      eta = std::nullopt;
    }
  }
  if (!eta || !dipole || !gamma || !bra_e || !bra_g || !ket_g || !ket_e || !cutoff)
    return std::nullopt;
  out.eta_scalar = eta->is_scalar;
  out.eta = eta->is_scalar ? Vec3{eta->scalar, eta->scalar, eta->scalar} : eta->vec;
  out.dipole = *dipole;
  out.gamma = *gamma;
  out.bra_e = *bra_e;
  out.bra_g = *bra_g;
  out.ket_g = *ket_g;
  out.ket_e = *ket_e;
  out.cutoff = *cutoff;
  return out;
}

std::optional<QuenchParams> extract_quench(const json& p, ErrorList& errs) {
  const std::string where = "parameters";
  reject_unknown(p, {"omega_dr", "delta_dr", "gamma_1p", "eta", "eta_dr", "c_up_sq",
                     "times"},
                 where, errs);
  QuenchParams out;
  auto omega = get_quantity(p, "omega_dr", Dim::frequency, where, errs, true);
  auto delta = get_quantity(p, "delta_dr", Dim::frequency, where, errs, true);
  auto g1p = get_quantity(p, "gamma_1p", Dim::frequency, where, errs, true);
  for (const auto* q : {&omega, &delta, &g1p}) {
    if (*q && (*q)->gamma_relative) {
      errs.add(where, "Gamma-relative units are not available in this scenario");
      return std::nullopt;
    }
  }
  auto eta = get_number(p, "eta", where, errs, false, 0.0);
  auto eta_dr = get_number(p, "eta_dr", where, errs, false, 0.0);
  auto c_up_sq = get_number(p, "c_up_sq", where, errs, false, 1.0);
  if (omega && !(omega->value >= 0.0)) {
    errs.add(where + ".omega_dr", "must be non-negative");
    omega = std::nullopt;
  }
  if (delta && delta->value == 0.0) {
    errs.add(where + ".delta_dr", "must be nonzero");
    delta = std::nullopt;
  }
  if (g1p && !(g1p->value > 0.0)) {
    errs.add(where + ".gamma_1p", "must be positive");
    g1p = std::nullopt;
  }
  if (eta && *eta < 0.0) {
    errs.add(where + ".eta", "must be non-negative");
    eta = std::nullopt;
  }
  if (eta_dr && *eta_dr < 0.0) {
    errs.add(where + ".eta_dr", "must be non-negative");
    eta_dr = std::nullopt;
  }
  if (c_up_sq && (*c_up_sq < 0.0 || *c_up_sq > 1.0)) {
    errs.add(where + ".c_up_sq", "must lie in [0, 1]");
    c_up_sq = std::nullopt;
  }
  if (!omega || !delta || !g1p || !eta || !eta_dr || !c_up_sq) return std::nullopt;
  out.omega_dr = omega->value;
  out.delta_dr = delta->value;
  out.gamma_1p = g1p->value;
  out.eta = *eta;
  out.eta_dr = *eta_dr;
  out.c_up_sq = *c_up_sq;
  if (p.contains("times")) {
    // physical times only: the natural reference rate is the output here
    auto t = get_times(p, "times", where, errs, 1.0, false, false);
    if (!t) return std::nullopt;
    out.times_s = *t;
  }
  return out;
}

std::optional<ScenarioParams> extract_params(const std::string& scenario, const json& p,
                                             const std::string& base_dir,
                                             ErrorList& errs) {
  if (scenario == "rates") {
    auto v = extract_rates(p, errs);
    if (v) return ScenarioParams{*v};
  } else if (scenario == "zeeman") {
    auto v = extract_zeeman(p, base_dir, errs);
    if (v) return ScenarioParams{*v};
  } else if (scenario == "evolve") {
    auto v = extract_evolve(p, errs);
    if (v) return ScenarioParams{*v};
  } else if (scenario == "photon") {
    auto v = extract_photon(p, errs);
    if (v) return ScenarioParams{*v};
  } else if (scenario == "dipole_dipole") {
    auto v = extract_dd(p, errs);
    if (v) return ScenarioParams{*v};
  } else if (scenario == "quench") {
    auto v = extract_quench(p, errs);
    if (v) return ScenarioParams{*v};
  }
  return std::nullopt;
}

// Scannable keys per scenario. The grid runs in the unit the parameter
// declares in the config.
bool scannable(const std::string& scenario, const std::string& key) {
  if (scenario == "rates") return key == "eta";
  if (scenario == "zeeman") return key == "x" || key == "b_field";
  if (scenario == "dipole_dipole") return key == "eta" || key == "cutoff";
  if (scenario == "quench")
    return key == "omega_dr" || key == "delta_dr" || key == "gamma_1p" || key == "eta" ||
           key == "eta_dr" || key == "c_up_sq";
  return false;
}

std::optional<GridSpec> extract_grid(const json& g, ErrorList& errs) {
  const std::string where = "scan.grid";
  if (!g.is_object()) {
    errs.add(where, "expected an object");
    return std::nullopt;
  }
  auto type = get_string(g, "type", where, errs, true);
  if (!type) return std::nullopt;
  GridSpec grid;
  if (*type == "list") {
    grid.type = GridSpec::Type::list;
    reject_unknown(g, {"type", "values"}, where, errs);
    if (!g.contains("values") || !g["values"].is_array() || g["values"].empty()) {
      errs.add(where + ".values", "expected a non-empty array of numbers");
      return std::nullopt;
    }
    for (const auto& v : g["values"]) {
      if (!v.is_number() || !std::isfinite(v.get<double>())) {
        errs.add(where + ".values", "expected finite numbers");
        return std::nullopt;
      }
      grid.values.push_back(v.get<double>());
    }
    bool ascending = true, descending = true;
    for (size_t i = 1; i < grid.values.size(); ++i) {
      if (grid.values[i] <= grid.values[i - 1]) ascending = false;
      if (grid.values[i] >= grid.values[i - 1]) descending = false;
    }
    if (grid.values.size() > 1 && !ascending && !descending) {
      errs.add(where + ".values", "must be strictly monotone");
      return std::nullopt;
    }
    return grid;
  }
  if (*type != "linspace" && *type != "logspace") {
    errs.add(where + ".type", "expected \"linspace\", \"logspace\", or \"list\"");
    return std::nullopt;
  }
  grid.type = (*type == "linspace") ? GridSpec::Type::linspace : GridSpec::Type::logspace;
  reject_unknown(g, {"type", "start", "stop", "count"}, where, errs);
  auto start = get_number(g, "start", where, errs, true);
  auto stop = get_number(g, "stop", where, errs, true);
  auto count = get_integer(g, "count", where, errs, true);
  if (!start || !stop || !count) return std::nullopt;
  if (*count < 2) {
    errs.add(where + ".count", "must be at least 2");
    return std::nullopt;
  }
  if (*start == *stop) {
    errs.add(where, "start and stop must differ");
    return std::nullopt;
  }
  if (grid.type == GridSpec::Type::logspace && (*start <= 0.0 || *stop <= 0.0)) {
    errs.add(where, "logspace endpoints must be positive");
    return std::nullopt;
  }
  grid.start = *start;
  grid.stop = *stop;
  grid.count = *count;
  return grid;
}

}  // namespace

std::vector<double> GridSpec::expand() const {
  if (type == Type::list) return values;
  std::vector<double> out(static_cast<size_t>(count));
  if (type == Type::linspace) {
    for (int i = 0; i < count; ++i)
      out[i] = (i == count - 1) ? stop : start + (stop - start) * i / (count - 1);
  } else {
    double la = std::log(start), lb = std::log(stop);
    for (int i = 0; i < count; ++i)
      out[i] = (i == 0) ? start
               : (i == count - 1) ? stop
                                  : std::exp(la + (lb - la) * i / (count - 1));
  }
  return out;
}

nlohmann::json NumericsSpec::echo() const {
  return nlohmann::json{
      {"quadrature",
       {{"polar_order", quadrature.polar_order},
        {"azimuthal_points", quadrature.azimuthal_points},
        {"rel_tol", quadrature.rel_tol},
        {"max_refinements", quadrature.max_refinements}}},
      {"evolve", {{"rel_tol", evolve_rel_tol}, {"abs_tol", evolve_abs_tol}}},
  };
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex16(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

ScenarioConfig parse_config(const std::string& text, ErrorList& errs,
                            const std::string& base_dir) {
  ScenarioConfig cfg;
  cfg.config_hash = fnv1a64(text);
  cfg.base_dir = base_dir;

  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    errs.add("config", "not valid JSON");
    return cfg;
  }
  if (!doc.is_object()) {
    errs.add("config", "top level must be an object");
    return cfg;
  }
  reject_unknown(doc, {"schema", "scenario", "parameters", "output", "scan", "numerics"},
                 "config", errs);

  if (!doc.contains("schema")) {
    errs.add("config.schema", "required (this tool reads schema version 1)");
  } else if (!doc["schema"].is_number_integer() || doc["schema"].get<int>() != 1) {
    errs.add("config.schema", "unsupported schema version (expected 1)");
  } else {
    cfg.schema = 1;
  }

  static const char* scenarios[] = {"rates",  "zeeman",        "evolve",
                                    "photon", "dipole_dipole", "quench"};
  auto name = get_string(doc, "scenario", "config", errs, true);
  bool scenario_ok = false;
  if (name) {
    for (const char* s : scenarios) scenario_ok = scenario_ok || (*name == s);
    if (!scenario_ok)
      errs.add("config.scenario", "unknown scenario \"" + *name + "\"");
    else
      cfg.scenario = *name;
  }

  if (!doc.contains("parameters") || !doc["parameters"].is_object()) {
    errs.add("config.parameters", "required object missing");
  } else if (scenario_ok) {
    cfg.parameters = doc["parameters"];
    auto params = extract_params(cfg.scenario, cfg.parameters, base_dir, errs);
    if (params) cfg.params = *params;
  }

  cfg.output.path = scenario_ok ? cfg.scenario : "output";
  if (doc.contains("output")) {
    const json& o = doc["output"];
    if (!o.is_object()) {
      errs.add("config.output", "expected an object");
    } else {
      reject_unknown(o, {"format", "path"}, "config.output", errs);
      auto fmt = get_string(o, "format", "config.output", errs, false,
                            std::string("csv"));
      if (fmt) {
        if (*fmt == "csv")
          cfg.output.format = OutputSpec::Format::csv;
        else if (*fmt == "json")
          cfg.output.format = OutputSpec::Format::json;
        else
          errs.add("config.output.format", "expected \"csv\" or \"json\"");
      }
      auto path = get_string(o, "path", "config.output", errs, false);
      if (path) {
        if (path->empty() || (*path)[0] == '/' || path->find("..") != std::string::npos)
          errs.add("config.output.path", "must be a relative file stem");
        else
          cfg.output.path = *path;
      }
    }
  }

  if (doc.contains("numerics")) {
    const json& n = doc["numerics"];
    if (!n.is_object()) {
      errs.add("config.numerics", "expected an object");
    } else {
      reject_unknown(n,
                     {"rel_tol", "polar_order", "azimuthal_points", "max_refinements",
                      "evolve_rel_tol", "evolve_abs_tol"},
                     "config.numerics", errs);
      auto rel = get_number(n, "rel_tol", "config.numerics", errs, false);
      auto polar = get_integer(n, "polar_order", "config.numerics", errs, false);
      auto az = get_integer(n, "azimuthal_points", "config.numerics", errs, false);
      auto refine = get_integer(n, "max_refinements", "config.numerics", errs, false);
      auto erel = get_number(n, "evolve_rel_tol", "config.numerics", errs, false);
      auto eabs = get_number(n, "evolve_abs_tol", "config.numerics", errs, false);
      if (rel) {
        if (*rel > 0.0)
          cfg.numerics.quadrature.rel_tol = *rel;
        else
          errs.add("config.numerics.rel_tol", "must be positive");
      }
      if (polar) {
        if (*polar >= 4)
          cfg.numerics.quadrature.polar_order = *polar;
        else
          errs.add("config.numerics.polar_order", "must be at least 4");
      }
      if (az) {
        if (*az >= 4)
          cfg.numerics.quadrature.azimuthal_points = *az;
        else
          errs.add("config.numerics.azimuthal_points", "must be at least 4");
      }
      if (refine) {
        if (*refine >= 0)
          cfg.numerics.quadrature.max_refinements = *refine;
        else
          errs.add("config.numerics.max_refinements", "must be non-negative");
      }
      if (erel) {
        if (*erel > 0.0)
          cfg.numerics.evolve_rel_tol = *erel;
        else
          errs.add("config.numerics.evolve_rel_tol", "must be positive");
      }
      if (eabs) {
        if (*eabs > 0.0)
          cfg.numerics.evolve_abs_tol = *eabs;
        else
          errs.add("config.numerics.evolve_abs_tol", "must be positive");
      }
    }
  }

  if (doc.contains("scan")) {
    const json& s = doc["scan"];
    if (!s.is_object()) {
      errs.add("config.scan", "expected an object");
      return cfg;
    }
    reject_unknown(s, {"parameter", "grid"}, "config.scan", errs);
    auto param = get_string(s, "parameter", "config.scan", errs, true);
    std::optional<GridSpec> grid;
    if (s.contains("grid"))
      grid = extract_grid(s["grid"], errs);
    else
      errs.add("config.scan.grid", "required");
    if (!param || !grid || !scenario_ok) return cfg;
    if (!scannable(cfg.scenario, *param)) {
      errs.add("config.scan.parameter",
               "\"" + *param + "\" is not scannable in scenario " + cfg.scenario);
      return cfg;
    }
    if (cfg.scenario == "quench" && cfg.parameters.contains("times")) {
      errs.add("config.scan", "cannot combine a scan with a quench time table");
      return cfg;
    }
    if (!cfg.parameters.contains(*param)) {
      errs.add("config.scan.parameter",
               "\"" + *param + "\" must also appear in parameters (it fixes the unit)");
      return cfg;
    }
    const json& target = cfg.parameters[*param];
    bool bare = target.is_number();
    bool object_form = target.is_object() && target.contains("value") &&
                       target["value"].is_number();
    if (!bare && !object_form) {
      errs.add("config.scan.parameter",
               "scan target must be a bare number or a {value, unit} object "
               "(string quantities are not scannable)");
      return cfg;
    }
    cfg.scan = ScanSpec{*param, *grid};

    // dry-run the grid so domain problems surface now, once
    if (errs.ok()) {
      auto points = grid->expand();
      int bad = 0;
      std::string first;
      for (size_t i = 0; i < points.size(); ++i) {
        ErrorList point_errs;
        substitute_scan_value(cfg, points[i], point_errs);
        if (!point_errs.ok()) {
          if (bad == 0)
            first = "scan point " + std::to_string(i) + " (value " +
                    std::to_string(points[i]) + "): " + point_errs.errors.front();
          ++bad;
        }
      }
      if (bad > 0)
        errs.add("config.scan",
                 first + " (" + std::to_string(bad) + " of " +
                     std::to_string(points.size()) + " grid points fail)");
    }
  }

  return cfg;
}

ScenarioParams substitute_scan_value(const ScenarioConfig& cfg, double value,
                                     ErrorList& errs) {
  json tree = cfg.parameters;
  json& node = tree[cfg.scan->parameter];
  if (node.is_object())
    node["value"] = value;
  else
    node = value;
  auto params = extract_params(cfg.scenario, tree, cfg.base_dir, errs);
  return params ? *params : cfg.params;
}

}  // namespace simulate
