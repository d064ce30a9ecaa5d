#pragma once

// Minimal delimited-text reader for logger exports. No quoting rules: the
// OpenLog-style files this ingests never quote fields.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace actocat {

inline std::vector<std::string> split_fields(std::string_view line,
                                             char delim) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(delim, pos);
    std::string_view field = line.substr(
        pos, next == std::string_view::npos ? std::string_view::npos
                                            : next - pos);
    while (!field.empty() &&
           std::isspace(static_cast<unsigned char>(field.front())))
      field.remove_prefix(1);
    while (!field.empty() &&
           std::isspace(static_cast<unsigned char>(field.back())))
      field.remove_suffix(1);
    out.emplace_back(field);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

class CsvReader {
public:
  explicit CsvReader(std::istream& in, char delim = ',')
      : in_(in), delim_(delim) {
    std::string line;
    if (read_line(line)) header_ = split_fields(line, delim_);
  }

  const std::vector<std::string>& header() const { return header_; }

  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (read_line(line)) {
      if (line.empty()) continue;
      fields = split_fields(line, delim_);
      return true;
    }
    return false;
  }

private:
  bool read_line(std::string& line) {
    if (!std::getline(in_, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::istream& in_;
  char delim_;
  std::vector<std::string> header_;
};

// Lowercase and strip everything but [a-z0-9] so "rtcDate", "RTC_Date" and
// "rtcdate" all compare equal.
inline std::string normalize_column(std::string_view name) {
  std::string out;
  for (char c : name) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc)) out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

inline int find_column(const std::vector<std::string>& header,
                       std::initializer_list<const char*> candidates) {
  for (const char* want : candidates) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (normalize_column(header[i]) == want) return static_cast<int>(i);
    }
  }
  return -1;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return v;
}

}  // namespace actocat
