// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#include "reviewjudge/csv.hpp"

#include "reviewjudge/error.hpp"

namespace reviewjudge {

std::optional<std::vector<std::string>> CsvReader::next() {
  using traits = std::char_traits<char>;
  for (;;) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool any = false;
    record_line_ = line_;

    for (;;) {
      const int ch = in_.get();
      if (ch == traits::eof()) {
        if (quoted) throw RecordError(record_line_, "unterminated quoted field");
        if (!any) return std::nullopt;
        fields.push_back(std::move(field));
        return fields;
      }
      const char c = static_cast<char>(ch);
      if (quoted) {
        if (c == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(c);
        }
        continue;
      }
      if (c == '"') {
        quoted = true;
        any = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        any = true;
      } else if (c == '\r' && in_.peek() == '\n') {
        // Folded into the '\n' branch on the next read.
      } else if (c == '\n') {
        ++line_;
        break;
      } else {
        field.push_back(c);
        any = true;
      }
    }
    if (!any) continue;
    fields.push_back(std::move(field));
    return fields;
  }
}

}  // namespace reviewjudge
