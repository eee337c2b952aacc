#include "pauserl/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <stdexcept>

namespace pauserl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double x = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw std::invalid_argument(what + ": expected a number, got '" + text + "'");
  }
  return x;
}

long long parse_int(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  long long x = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw std::invalid_argument(what + ": expected an integer, got '" + text + "'");
  }
  return x;
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  const std::string last = trim(cur);
  if (!last.empty() || !out.empty()) out.push_back(last);
  return out;
}

Config Config::parse(std::istream& in, const std::string& source) {
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(source + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument(source + ":" + std::to_string(lineno) + ": empty key");
    if (cfg.has(key)) {
      throw std::invalid_argument(source + ":" + std::to_string(lineno) + ": duplicate key " + key);
    }
    cfg.set(key, value);
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  return parse(in, path);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_double(it->second, key);
}

long long Config::get_int(const std::string& key, long long fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_int(it->second, key);
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string t = trim(it->second);
  std::uint64_t x = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw std::invalid_argument(key + ": expected an unsigned integer, got '" + it->second + "'");
  }
  return x;
}

std::vector<double> Config::get_doubles(const std::string& key,
                                        const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(it->second)) out.push_back(parse_double(item, key));
  return out;
}

std::vector<std::string> Config::get_strings(const std::string& key,
                                             const std::vector<std::string>& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : split_list(it->second);
}

void Config::reject_unknown(const std::set<std::string>& allowed) const {
  std::string bad;
  for (const auto& [key, value] : values_) {
    if (allowed.count(key) == 0) bad += (bad.empty() ? "" : ", ") + key;
  }
  if (!bad.empty()) throw std::invalid_argument("unknown config keys: " + bad);
}

std::string Config::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [key, value] : values_) feed(key + "=" + value + "\n");
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pauserl
