// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace reviewjudge {

/// Streaming RFC 4180 reader: comma separated, double-quote quoting, quoted
/// fields may contain commas, doubled quotes and line breaks. CRLF and LF
/// line endings are both accepted.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  /// Next record, or nullopt at end of input. Blank lines are skipped.
  std::optional<std::vector<std::string>> next();

  /// 1-based physical line on which the last returned record started.
  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

}  // namespace reviewjudge
