#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace pauserl {

// Shortest decimal string that parses back to the same double.
std::string format_number(double x);

// Writes the metadata comment line and the header row, then data rows.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::uint64_t seed, std::string_view config_hash,
            const std::vector<std::string>& header);

  CsvWriter& cell(std::string_view text);
  CsvWriter& cell(double x);
  CsvWriter& cell(long long x);
  CsvWriter& cell(int x) { return cell(static_cast<long long>(x)); }
  CsvWriter& cell(std::size_t x) { return cell(static_cast<long long>(x)); }
  void end_row();

 private:
  std::ostream& out_;
  bool first_ = true;
};

std::string metadata_line(std::uint64_t seed, std::string_view config_hash);

}  // namespace pauserl
