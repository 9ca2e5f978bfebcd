// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace reviewjudge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A CSV header is missing a required column.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A single data row could not be turned into a record.
class RecordError : public Error {
 public:
  RecordError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Bad magic, bad version, or otherwise unreadable binary file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Truncated or inconsistent binary payload.
class CorruptionError : public FormatError {
 public:
  CorruptionError(std::uint64_t offset, const std::string& what)
      : FormatError(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace reviewjudge
