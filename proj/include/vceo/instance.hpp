#pragma once

// Instance files: a JSON object with "model", "targets" and optional
// "options". Parsing reports the offending line and field; serialization
// emits the canonical form (fixed key order, every option present).

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vceo/errors.hpp"
#include "vceo/types.hpp"

namespace vceo {

enum class Unit { Nats, Bits };

struct InstanceOptions {
  double tol = 1e-7;            ///< optimizer local-search tolerance
  int starts = 16;              ///< optimizer multistart count
  int grid = 64;                ///< lower-bound grid points per dimension
  std::uint64_t seed = 1;
  Unit unit = Unit::Nats;
  double verify_tol = 1e-9;     ///< certificate identity tolerance (nats)
  double equality_tol = 1e-3;   ///< relative optimizer-vs-bound tolerance
  std::uint64_t mc_samples = 1000000;

  bool operator==(const InstanceOptions&) const = default;
};

struct InstanceSpec {
  SourceModel model;
  DistortionTriple targets;
  InstanceOptions options;

  bool operator==(const InstanceSpec&) const = default;
};

namespace detail {

/// 1-based line of the key `"leaf"` that follows `"parent"` (if given).
inline int line_of_key(std::string_view text, std::string_view parent, std::string_view leaf) {
  std::size_t from = 0;
  if (!parent.empty()) {
    const auto p = text.find("\"" + std::string(parent) + "\"");
    if (p != std::string_view::npos) from = p;
  }
  auto pos = text.find("\"" + std::string(leaf) + "\"", from);
  if (pos == std::string_view::npos) pos = from;
  int line = 1;
  for (std::size_t i = 0; i < pos && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

class InstanceReader {
 public:
  explicit InstanceReader(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(const std::string& parent, const std::string& leaf,
                         const std::string& msg) const {
    const std::string field = parent.empty() ? leaf : parent + "." + leaf;
    const int line = line_of_key(text_, parent, leaf);
    throw ParseError("line " + std::to_string(line) + ", field '" + field + "': " + msg, line,
                     field);
  }

  const nlohmann::json& object(const nlohmann::json& j, const std::string& parent,
                               const std::string& key, bool required) const {
    static const nlohmann::json empty = nlohmann::json::object();
    if (!j.contains(key)) {
      if (required) fail(parent, key, "missing required object");
      return empty;
    }
    if (!j.at(key).is_object()) fail(parent, key, "expected an object");
    return j.at(key);
  }

  void only_keys(const nlohmann::json& j, const std::string& parent,
                 const std::vector<std::string>& allowed) const {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool ok = false;
      for (const auto& a : allowed) ok = ok || a == it.key();
      if (!ok) fail(parent, it.key(), "unknown key");
    }
  }

  double number(const nlohmann::json& j, const std::string& parent, const std::string& key,
                bool required, double fallback) const {
    if (!j.contains(key)) {
      if (required) fail(parent, key, "missing required number");
      return fallback;
    }
    const auto& v = j.at(key);
    if (!v.is_number()) fail(parent, key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(parent, key, "expected a finite number");
    return d;
  }

  std::uint64_t count(const nlohmann::json& j, const std::string& parent, const std::string& key,
                      std::uint64_t fallback, std::uint64_t min_value) const {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                   v.get<std::int64_t>() < 0))
      fail(parent, key, "expected a nonnegative integer");
    const auto n = v.get<std::uint64_t>();
    if (n < min_value) fail(parent, key, "must be >= " + std::to_string(min_value));
    return n;
  }

 private:
  std::string_view text_;
};

}  // namespace detail

inline InstanceSpec parse_instance(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    int line = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    throw ParseError("line " + std::to_string(line) + ": malformed JSON (" + e.what() + ")", line,
                     "");
  }
  const detail::InstanceReader rd(text);
  if (!j.is_object()) throw ParseError("line 1: instance must be a JSON object", 1, "");
  rd.only_keys(j, "", {"model", "targets", "options"});

  InstanceSpec s;
  const auto& m = rd.object(j, "", "model", true);
  rd.only_keys(m, "model", {"sigma_s2", "sigma_n1_2", "sigma_n2_2"});
  s.model.sigma_s2 = rd.number(m, "model", "sigma_s2", true, 0);
  s.model.sigma_n1_2 = rd.number(m, "model", "sigma_n1_2", true, 0);
  s.model.sigma_n2_2 = rd.number(m, "model", "sigma_n2_2", true, 0);
  for (const char* k : {"sigma_s2", "sigma_n1_2", "sigma_n2_2"})
    if (!(m.at(k).get<double>() > 0.0)) rd.fail("model", k, "variance must be > 0");

  const auto& t = rd.object(j, "", "targets", true);
  rd.only_keys(t, "targets", {"d1", "d2", "d0"});
  s.targets.d1 = rd.number(t, "targets", "d1", true, 0);
  s.targets.d2 = rd.number(t, "targets", "d2", true, 0);
  s.targets.d0 = rd.number(t, "targets", "d0", true, 0);
  for (const char* k : {"d1", "d2", "d0"})
    if (!(t.at(k).get<double>() > 0.0)) rd.fail("targets", k, "distortion must be > 0");

  const auto& o = rd.object(j, "", "options", false);
  rd.only_keys(o, "options",
               {"tol", "starts", "grid", "seed", "unit", "verify_tol", "equality_tol",
                "mc_samples"});
  InstanceOptions& opt = s.options;
  opt.tol = rd.number(o, "options", "tol", false, opt.tol);
  if (!(opt.tol > 0.0)) rd.fail("options", "tol", "must be > 0");
  opt.starts = static_cast<int>(rd.count(o, "options", "starts", 16, 1));
  opt.grid = static_cast<int>(rd.count(o, "options", "grid", 64, 2));
  opt.seed = rd.count(o, "options", "seed", 1, 0);
  if (o.contains("unit")) {
    const auto& u = o.at("unit");
    if (!u.is_string() || (u != "nats" && u != "bits"))
      rd.fail("options", "unit", "expected \"nats\" or \"bits\"");
    opt.unit = u == "bits" ? Unit::Bits : Unit::Nats;
  }
  opt.verify_tol = rd.number(o, "options", "verify_tol", false, opt.verify_tol);
  if (opt.verify_tol < 0.0) rd.fail("options", "verify_tol", "must be >= 0");
  opt.equality_tol = rd.number(o, "options", "equality_tol", false, opt.equality_tol);
  if (opt.equality_tol < 0.0) rd.fail("options", "equality_tol", "must be >= 0");
  opt.mc_samples = rd.count(o, "options", "mc_samples", opt.mc_samples, 2);
  return s;
}

inline InstanceSpec load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file '" + path + "'", 0, "");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

inline nlohmann::ordered_json to_json(const InstanceSpec& s) {
  nlohmann::ordered_json j;
  j["model"] = {{"sigma_s2", s.model.sigma_s2},
                {"sigma_n1_2", s.model.sigma_n1_2},
                {"sigma_n2_2", s.model.sigma_n2_2}};
  j["targets"] = {{"d1", s.targets.d1}, {"d2", s.targets.d2}, {"d0", s.targets.d0}};
  const auto& o = s.options;
  j["options"] = {{"tol", o.tol},
                  {"starts", o.starts},
                  {"grid", o.grid},
                  {"seed", o.seed},
                  {"unit", o.unit == Unit::Bits ? "bits" : "nats"},
                  {"verify_tol", o.verify_tol},
                  {"equality_tol", o.equality_tol},
                  {"mc_samples", o.mc_samples}};
  return j;
}

/// Canonical text: two-space indent, fixed key order, shortest round-trip doubles.
inline std::string serialize_instance(const InstanceSpec& s) { return to_json(s).dump(2) + "\n"; }

}  // namespace vceo
