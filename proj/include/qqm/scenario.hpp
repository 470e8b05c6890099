#pragma once

// Scenario files: INI-style text with [section] headers and `key = value`
// lines. '#' and ';' start comments. Vectors and complex numbers are
// whitespace-separated reals. Every key must be consumed by the runner;
// leftovers are schema errors.

#include <array>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qqm/quaternion.hpp"
#include "qqm/vec3.hpp"

namespace qqm {

/// Malformed or schema-violating scenario (CLI exit code 2).
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScenarioKind { time_phase, free_particle, separation, step_scattering, current_profile };

inline ScenarioKind parse_kind(const std::string& s) {
  if (s == "time_phase") return ScenarioKind::time_phase;
  if (s == "free_particle") return ScenarioKind::free_particle;
  if (s == "separation") return ScenarioKind::separation;
  if (s == "step_scattering") return ScenarioKind::step_scattering;
  if (s == "current_profile") return ScenarioKind::current_profile;
  throw ScenarioError("unknown scenario kind '" + s + "'");
}

inline std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::time_phase: return "time_phase";
    case ScenarioKind::free_particle: return "free_particle";
    case ScenarioKind::separation: return "separation";
    case ScenarioKind::step_scattering: return "step_scattering";
    case ScenarioKind::current_profile: return "current_profile";
  }
  return "?";
}

class Scenario {
 public:
  static constexpr std::array<const char*, 4> kSections{"scenario", "units", "grid", "params"};

  static Scenario parse(const std::string& text) {
    Scenario sc;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto cut = line.find_first_of("#;"); cut != std::string::npos) line.erase(cut);
      line = trim(line);
      if (line.empty()) continue;
      const std::string where = "line " + std::to_string(lineno) + ": ";
      if (line.front() == '[') {
        if (line.back() != ']') throw ScenarioError(where + "unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        bool known = false;
        for (const char* s : kSections) known = known || section == s;
        if (!known) throw ScenarioError(where + "unknown section [" + section + "]");
        if (!sc.seen_sections_.insert(section).second)
          throw ScenarioError(where + "duplicate section [" + section + "]");
        continue;
      }
      if (section.empty()) throw ScenarioError(where + "key outside of any section");
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ScenarioError(where + "expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ScenarioError(where + "empty key");
      if (!sc.entries_[section].emplace(key, value).second)
        throw ScenarioError(where + "duplicate key '" + key + "' in [" + section + "]");
    }
    sc.kind_ = parse_kind(sc.require_string("scenario", "kind"));
    return sc;
  }

  static Scenario load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ScenarioError("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    return parse(buf.str());
  }

  ScenarioKind kind() const { return kind_; }

  bool has_section(const std::string& section) const { return seen_sections_.count(section) != 0; }

  bool has(const std::string& section, const std::string& key) const {
    const auto s = entries_.find(section);
    return s != entries_.end() && s->second.count(key) != 0;
  }

  std::optional<std::string> get_string(const std::string& section, const std::string& key) const {
    const auto s = entries_.find(section);
    if (s == entries_.end()) return std::nullopt;
    const auto it = s->second.find(key);
    if (it == s->second.end()) return std::nullopt;
    consumed_.insert(section + "." + key);
    return it->second;
  }

  std::string require_string(const std::string& section, const std::string& key) const {
    if (auto v = get_string(section, key)) return *v;
    throw ScenarioError("missing required key '" + key + "' in [" + section + "]");
  }

  std::vector<double> reals(const std::string& section, const std::string& key, std::size_t count) const {
    const std::string raw = require_string(section, key);
    std::istringstream in(raw);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw ScenarioError("[" + section + "] " + key + ": '" + tok + "' is not a number");
      out.push_back(v);
    }
    if (out.size() != count)
      throw ScenarioError("[" + section + "] " + key + ": expected " + std::to_string(count) + " number(s), got " +
                          std::to_string(out.size()));
    return out;
  }

  double real(const std::string& section, const std::string& key) const { return reals(section, key, 1)[0]; }

  double real_or(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? real(section, key) : fallback;
  }

  std::size_t count_or(const std::string& section, const std::string& key, std::size_t fallback) const {
    if (!has(section, key)) return fallback;
    const double v = real(section, key);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
      throw ScenarioError("[" + section + "] " + key + ": expected a non-negative integer");
    return static_cast<std::size_t>(v);
  }

  Vec3 vec3_or(const std::string& section, const std::string& key, Vec3 fallback) const {
    if (!has(section, key)) return fallback;
    const auto v = reals(section, key, 3);
    return {v[0], v[1], v[2]};
  }

  Complex complex_or(const std::string& section, const std::string& key, Complex fallback) const {
    if (!has(section, key)) return fallback;
    const auto v = reals(section, key, 2);
    return {v[0], v[1]};
  }

  /// Quaternion as four reals w x y z of w + x i + y j + z k.
  Quaternion quaternion_or(const std::string& section, const std::string& key, Quaternion fallback) const {
    if (!has(section, key)) return fallback;
    const auto v = reals(section, key, 4);
    return {Complex{v[0], v[1]}, Complex{v[2], v[3]}};
  }

  bool flag_or(const std::string& section, const std::string& key, bool fallback) const {
    const auto v = get_string(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ScenarioError("[" + section + "] " + key + ": expected true or false");
  }

  /// Throws if any key was never read.
  void reject_unknown_keys() const {
    for (const auto& [section, kv] : entries_)
      for (const auto& [key, value] : kv)
        if (!consumed_.count(section + "." + key))
          throw ScenarioError("unknown key '" + key + "' in [" + section + "] for kind " + to_string(kind_));
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  ScenarioKind kind_{};
  std::map<std::string, std::map<std::string, std::string>> entries_;
  std::set<std::string> seen_sections_;
  mutable std::set<std::string> consumed_;
};

}  // namespace qqm
