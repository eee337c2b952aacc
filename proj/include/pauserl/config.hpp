#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace pauserl {

// Line-based `key = value` settings; `#` starts a comment.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config parse_file(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void erase(const std::string& key) { values_.erase(key); }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> get_strings(const std::string& key,
                                       const std::vector<std::string>& fallback) const;

  // Throws std::invalid_argument naming every key outside `allowed`.
  void reject_unknown(const std::set<std::string>& allowed) const;

  // FNV-1a over the sorted `key=value` lines, as 16 hex digits.
  std::string hash() const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

double parse_double(const std::string& text, const std::string& what);
long long parse_int(const std::string& text, const std::string& what);
std::vector<std::string> split_list(const std::string& text, char sep = ',');

}  // namespace pauserl
