#pragma once

#include <stdexcept>
#include <string>

namespace predeval {

// Bad or inconsistent input data: parse failures, mismatched evaluation
// sets, pairing violations. CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A statistic is undefined for the given inputs, e.g. a guessing baseline
// with zero spread. CLI exit code 3.
class DegenerateError : public std::runtime_error {
 public:
  explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

// The strict preference relation contains a cycle. CLI exit code 4.
class CycleError : public std::runtime_error {
 public:
  explicit CycleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace predeval
