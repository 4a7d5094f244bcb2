// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0
//
// Exception hierarchy shared by every roadex module. The command-line tool
// maps these onto process exit codes.

#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace roadex {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric parameter is outside its documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : Error(path.string() + ": " + what), path_(path) {}
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

/// Malformed file content; `offset` is the byte offset of the failure.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : Error("parse error at byte " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A file ended before the declared amount of data.
class TruncationError : public Error {
 public:
  TruncationError(std::size_t expected, std::size_t found)
      : Error("truncated data: expected " + std::to_string(expected) + " vertices, found " +
              std::to_string(found)),
        expected_(expected),
        found_(found) {}
  std::size_t expected() const noexcept { return expected_; }
  std::size_t found() const noexcept { return found_; }

 private:
  std::size_t expected_;
  std::size_t found_;
};

/// A value failed validation; `index` names the offending element.
class ValidationError : public Error {
 public:
  ValidationError(std::size_t index, const std::string& what)
      : Error("element " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Model fitting (RANSAC, least squares) failed.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Geographic input outside the representable range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Two georeferenced inputs do not describe compatible extents.
class GeorefError : public Error {
 public:
  using Error::Error;
};

/// Invalid or unknown configuration key.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace roadex
