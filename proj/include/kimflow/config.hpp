#pragma once

#include <climits>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "kimflow/common.hpp"

namespace kimflow {

namespace detail {

inline std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  const auto a = s.find_first_not_of(ws);
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(ws);
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  if (s.empty()) throw ConfigError(where + ": empty number");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size())
    throw ConfigError(where + ": cannot parse '" + s + "' as a number");
  return v;
}

inline long long parse_int(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  if (s.empty()) throw ConfigError(where + ": empty integer");
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size())
    throw ConfigError(where + ": cannot parse '" + s + "' as an integer");
  return v;
}

inline std::string number_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// Flat two-level key/value store behind both config syntaxes. The INI form
// uses [section] headers with key = value lines and '#' comments; vectors
// are comma separated, matrices use ';' between rows ("1,0; 0,1"). The JSON
// form nests objects instead of sections and maps onto the same store.
class ConfigMap {
 public:
  struct Entry {
    std::string text;
    int line = 0;
  };

  static ConfigMap from_ini_text(const std::string& text,
                                 const std::string& origin = "<config>") {
    ConfigMap cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError(cfg.where(lineno) + ": unterminated section header");
        section = detail::trim(line.substr(1, line.size() - 2));
        if (section.empty())
          throw ConfigError(cfg.where(lineno) + ": empty section name");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(cfg.where(lineno) + ": expected key = value");
      const std::string key = detail::trim(line.substr(0, eq));
      const std::string value = detail::trim(line.substr(eq + 1));
      if (key.empty())
        throw ConfigError(cfg.where(lineno) + ": empty key");
      cfg.insert(section, key, value, lineno);
    }
    return cfg;
  }

  static ConfigMap from_json_text(const std::string& text,
                                  const std::string& origin = "<config>") {
    ConfigMap cfg;
    cfg.origin_ = origin;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(origin + ": " + e.what());
    }
    if (!doc.is_object())
      throw ConfigError(origin + ": top level must be an object");
    cfg.flatten(doc, "");
    return cfg;
  }

  static ConfigMap from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const bool json = path.size() >= 5 &&
                      path.compare(path.size() - 5, 5, ".json") == 0;
    return json ? from_json_text(buf.str(), path)
                : from_ini_text(buf.str(), path);
  }

  const std::string& origin() const { return origin_; }

  bool has_section(const std::string& section) const {
    return data_.count(section) > 0;
  }

  bool has(const std::string& section, const std::string& key) const {
    const auto s = data_.find(section);
    return s != data_.end() && s->second.count(key) > 0;
  }

  std::string get_string(const std::string& section,
                         const std::string& key) const {
    const Entry& e = lookup(section, key);
    return e.text;
  }

  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
  }

  double get_double(const std::string& section, const std::string& key) const {
    return detail::parse_double(get_string(section, key), where(section, key));
  }

  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
  }

  int get_int(const std::string& section, const std::string& key) const {
    const long long v =
        detail::parse_int(get_string(section, key), where(section, key));
    if (v < INT_MIN || v > INT_MAX)
      throw ConfigError(where(section, key) + ": integer out of range");
    return static_cast<int>(v);
  }

  int get_int_or(const std::string& section, const std::string& key,
                 int fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
  }

  std::uint64_t get_u64(const std::string& section,
                        const std::string& key) const {
    const std::string s = get_string(section, key);
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size())
      throw ConfigError(where(section, key) + ": cannot parse '" + s +
                        "' as an unsigned integer");
    return v;
  }

  std::uint64_t get_u64_or(const std::string& section, const std::string& key,
                           std::uint64_t fallback) const {
    return has(section, key) ? get_u64(section, key) : fallback;
  }

  bool get_bool_or(const std::string& section, const std::string& key,
                   bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string s = get_string(section, key);
    if (s == "true") return true;
    if (s == "false") return false;
    throw ConfigError(where(section, key) + ": expected true or false");
  }

  Eigen::VectorXd get_vector(const std::string& section,
                             const std::string& key) const {
    const auto parts = detail::split(get_string(section, key), ',');
    Eigen::VectorXd v(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i)
      v[static_cast<Eigen::Index>(i)] =
          detail::parse_double(parts[i], where(section, key));
    return v;
  }

  Eigen::MatrixXd get_matrix(const std::string& section,
                             const std::string& key) const {
    const auto rows = detail::split(get_string(section, key), ';');
    const std::string w = where(section, key);
    Eigen::MatrixXd m;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto parts = detail::split(rows[r], ',');
      if (r == 0) {
        m.resize(static_cast<Eigen::Index>(rows.size()),
                 static_cast<Eigen::Index>(parts.size()));
      } else if (static_cast<Eigen::Index>(parts.size()) != m.cols()) {
        throw ConfigError(w + ": ragged matrix rows");
      }
      for (std::size_t c = 0; c < parts.size(); ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            detail::parse_double(parts[c], w);
    }
    return m;
  }

  // Typo guard: every key a run loads must have been read by the time the
  // harness finishes assembling its experiment.
  void require_consumed() const {
    std::vector<std::string> stray;
    for (const auto& [section, entries] : data_)
      for (const auto& [key, entry] : entries)
        if (!used_.count(section + '\n' + key))
          stray.push_back(where(section, key) +
                          (entry.line ? " (line " + std::to_string(entry.line) + ")"
                                      : ""));
    if (!stray.empty()) {
      std::string msg = "unrecognized config entries:";
      for (const auto& s : stray) msg += "\n  " + s;
      throw ConfigError(msg);
    }
  }

 private:
  void insert(const std::string& section, const std::string& key,
              const std::string& value, int line) {
    auto& slot = data_[section][key];
    if (!slot.text.empty() || slot.line != 0)
      throw ConfigError(where(section, key) + ": duplicate key (lines " +
                        std::to_string(slot.line) + " and " +
                        std::to_string(line) + ")");
    slot = Entry{value, line};
  }

  void flatten(const nlohmann::json& node, const std::string& path) {
    for (const auto& [key, value] : node.items()) {
      const std::string full = path.empty() ? key : path + '.' + key;
      if (value.is_object()) {
        flatten(value, full);
        continue;
      }
      const auto dot = full.rfind('.');
      const std::string section = dot == std::string::npos ? "" : full.substr(0, dot);
      const std::string leaf = dot == std::string::npos ? full : full.substr(dot + 1);
      data_[section][leaf] = Entry{scalar_text(value, full), 0};
    }
  }

  std::string scalar_text(const nlohmann::json& v, const std::string& full) const {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer())
      return std::to_string(v.get<long long>());
    if (v.is_number())
      return detail::number_text(v.get<double>());
    if (v.is_array()) {
      std::string out;
      bool nested = false;
      for (const auto& item : v) nested = nested || item.is_array();
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += nested ? "; " : ", ";
        if (nested) {
          const auto& row = v[i];
          if (!row.is_array())
            throw ConfigError(origin_ + ": " + full +
                              ": mixed scalars and rows in array");
          for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ", ";
            out += scalar_text(row[j], full);
          }
        } else {
          out += scalar_text(v[i], full);
        }
      }
      return out;
    }
    throw ConfigError(origin_ + ": " + full + ": unsupported value type");
  }

  std::string where(int line) const {
    return origin_ + ":" + std::to_string(line);
  }
  std::string where(const std::string& section, const std::string& key) const {
    return origin_ + (section.empty() ? " " : " [" + section + "] ") + key;
  }

  std::map<std::string, std::map<std::string, Entry>> data_;
  mutable std::set<std::string> used_;
  std::string origin_ = "<config>";

  const Entry& lookup(const std::string& section, const std::string& key) const {
    const auto s = data_.find(section);
    if (s != data_.end()) {
      const auto k = s->second.find(key);
      if (k != s->second.end()) {
        used_.insert(section + '\n' + key);
        return k->second;
      }
    }
    throw ConfigError("missing required entry " + where(section, key));
  }
};

}  // namespace kimflow
