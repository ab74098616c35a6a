#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tvlab {

// Flat `key = value` config files. '#' starts a comment, blank lines are
// ignored, later keys override earlier ones.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("Config: cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return from_string(ss.str());
  }

  static Config from_string(const std::string& text) {
    Config c;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("Config: missing '=' on line " + std::to_string(lineno));
      std::string key = trim(line.substr(0, eq));
      std::string val = trim(line.substr(eq + 1));
      if (key.empty()) throw std::runtime_error("Config: empty key on line " + std::to_string(lineno));
      c.kv_[key] = val;
    }
    return c;
  }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw std::runtime_error("Config: missing key '" + key + "'");
    return it->second;
  }
  std::string get_string(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
  }

  double get_double(const std::string& key) const { return parse_double(get_string(key), key); }
  double get_double(const std::string& key, double dflt) const {
    return has(key) ? get_double(key) : dflt;
  }

  long get_long(const std::string& key) const {
    return static_cast<long>(parse_double(get_string(key), key));
  }
  long get_long(const std::string& key, long dflt) const {
    return has(key) ? get_long(key) : dflt;
  }

  bool get_bool(const std::string& key, bool dflt) const {
    if (!has(key)) return dflt;
    std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::runtime_error("Config: bad boolean for '" + key + "': " + v);
  }

  void set(const std::string& key, const std::string& val) { kv_[key] = val; }

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  static double parse_double(const std::string& s, const std::string& key) {
    // Accepts plain numbers and simple fractions like 1/3.
    auto slash = s.find('/');
    try {
      if (slash != std::string::npos) {
        double a = std::stod(s.substr(0, slash));
        double b = std::stod(s.substr(slash + 1));
        return a / b;
      }
      std::size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw std::runtime_error("Config: bad number for '" + key + "': " + s);
    }
  }

  std::map<std::string, std::string> kv_;
};

}  // namespace tvlab
