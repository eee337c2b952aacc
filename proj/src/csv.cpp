#include "pauserl/csv.hpp"

#include <charconv>
#include <stdexcept>

namespace pauserl {

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  if (res.ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

std::string metadata_line(std::uint64_t seed, std::string_view config_hash) {
  return "# seed=" + std::to_string(seed) + " config_hash=" + std::string(config_hash);
}

CsvWriter::CsvWriter(std::ostream& out, std::uint64_t seed, std::string_view config_hash,
                     const std::vector<std::string>& header)
    : out_(out) {
  out_ << metadata_line(seed, config_hash) << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(std::string_view text) {
  if (!first_) out_ << ',';
  out_ << text;
  first_ = false;
  return *this;
}

CsvWriter& CsvWriter::cell(double x) { return cell(std::string_view(format_number(x))); }

CsvWriter& CsvWriter::cell(long long x) { return cell(std::string_view(std::to_string(x))); }

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

}  // namespace pauserl
