#pragma once

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "avsal/types.hpp"

namespace avsal {

inline std::string trim_ws(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// `key = value` (or `key value`) per line, '#' starts a comment.
inline std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim_ws(line);
    if (line.empty()) continue;
    std::string key, value;
    auto eq = line.find('=');
    if (eq != std::string::npos) {
      key = trim_ws(line.substr(0, eq));
      value = trim_ws(line.substr(eq + 1));
    } else {
      auto sp = line.find_first_of(" \t");
      if (sp == std::string::npos) {
        throw Error(Errc::bad_format, "config: expected `key = value`: " + line);
      }
      key = trim_ws(line.substr(0, sp));
      value = trim_ws(line.substr(sp + 1));
    }
    if (key.empty() || value.empty()) {
      throw Error(Errc::bad_format, "config: expected `key = value`: " + line);
    }
    entries.emplace_back(std::move(key), std::move(value));
  }
  return entries;
}

inline std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim_ws(item);
    if (item.empty()) throw Error(Errc::bad_format, "config: empty entry in list: " + s);
    out.push_back(std::stoi(item));
  }
  return out;
}

inline std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim_ws(item);
    if (item.empty()) throw Error(Errc::bad_format, "config: empty entry in list: " + s);
    out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace avsal
