// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace infominer {

/// Base of every exception thrown by the library. `category()` is a short
/// stable tag used as the machine-readable prefix of CLI error lines.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& what)
      : std::runtime_error(what), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

/// Malformed input data. `line` is the 1-based physical line in the source
/// (the header is line 1); 0 when not tied to a line.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t line = 0, std::string column = {})
      : Error("data", what), line_(line), column_(std::move(column)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::string column_;
};

class SamplingError : public Error {
 public:
  explicit SamplingError(const std::string& what) : Error("sampling", what) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error("shape", what) {}
};

class GraphError : public Error {
 public:
  explicit GraphError(const std::string& what) : Error("graph", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

class CheckpointError : public Error {
 public:
  explicit CheckpointError(const std::string& what) : Error("checkpoint", what) {}
};

class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, long step = -1)
      : Error("train", what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

class ScoringError : public Error {
 public:
  explicit ScoringError(const std::string& what) : Error("score", what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace infominer
