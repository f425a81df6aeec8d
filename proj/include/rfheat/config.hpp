#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rfheat/errors.hpp"

namespace rfheat {

/// Flat sectioned key-value config:
///   [section]
///   key = value        # trailing comments allowed
/// Values are kept as strings; typed accessors convert on demand and raise
/// ConfigError naming the offending section.key (and line, when known).
struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::map<std::string, int> key_lines;  // "section.key" -> 1-based line

  bool has(const std::string& sec, const std::string& key) const {
    auto s = sections.find(sec);
    return s != sections.end() && s->second.count(key) > 0;
  }

  int line_of(const std::string& sec, const std::string& key) const {
    auto it = key_lines.find(sec + "." + key);
    return it == key_lines.end() ? -1 : it->second;
  }

  std::string require(const std::string& sec, const std::string& key) const {
    if (!has(sec, key))
      throw ConfigError("missing required field [" + sec + "] " + key);
    return sections.at(sec).at(key);
  }

  std::string get(const std::string& sec, const std::string& key,
                  const std::string& fallback) const {
    return has(sec, key) ? sections.at(sec).at(key) : fallback;
  }

  double get_double(const std::string& sec, const std::string& key, double fallback) const {
    if (!has(sec, key)) return fallback;
    return parse_double(sec, key, sections.at(sec).at(key));
  }

  double require_double(const std::string& sec, const std::string& key) const {
    return parse_double(sec, key, require(sec, key));
  }

  int get_int(const std::string& sec, const std::string& key, int fallback) const {
    if (!has(sec, key)) return fallback;
    const std::string& v = sections.at(sec).at(key);
    try {
      size_t pos = 0;
      const int x = std::stoi(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing junk");
      return x;
    } catch (const std::exception&) {
      throw ConfigError("field [" + sec + "] " + key + ": not an integer: '" + v + "'",
                        line_of(sec, key));
    }
  }

  bool get_bool(const std::string& sec, const std::string& key, bool fallback) const {
    if (!has(sec, key)) return fallback;
    const std::string& v = sections.at(sec).at(key);
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("field [" + sec + "] " + key + ": not a boolean: '" + v + "'",
                      line_of(sec, key));
  }

  std::vector<double> get_doubles(const std::string& sec, const std::string& key,
                                  std::vector<double> fallback) const {
    if (!has(sec, key)) return fallback;
    std::istringstream in(sections.at(sec).at(key));
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_double(sec, key, tok));
    return out;
  }

  std::vector<std::string> get_words(const std::string& sec, const std::string& key) const {
    std::vector<std::string> out;
    if (!has(sec, key)) return out;
    std::istringstream in(sections.at(sec).at(key));
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
  }

 private:
  double parse_double(const std::string& sec, const std::string& key,
                      const std::string& v) const {
    try {
      size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing junk");
      return x;
    } catch (const std::exception&) {
      throw ConfigError("field [" + sec + "] " + key + ": not a number: '" + v + "'",
                        line_of(sec, key));
    }
  }
};

namespace detail {
inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}
}  // namespace detail

inline ConfigFile parse_config(std::istream& in) {
  ConfigFile cfg;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header: '" + line + "'", line_no);
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("empty section name", line_no);
      cfg.sections[section];  // register even if empty
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value': '" + line + "'", line_no);
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    if (section.empty())
      throw ConfigError("key '" + key + "' outside any [section]", line_no);
    if (cfg.sections[section].count(key))
      throw ConfigError("duplicate key [" + section + "] " + key, line_no);
    cfg.sections[section][key] = value;
    cfg.key_lines[section + "." + key] = line_no;
  }
  return cfg;
}

inline ConfigFile load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in);
}

}  // namespace rfheat
