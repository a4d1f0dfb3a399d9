#pragma once

#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

#include "meadow/core/tuple.hpp"

namespace meadow {

std::string format_tuple(std::span<const Index> t);

/// Bad or inconsistent input data (sets, parameters, spaces).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingParameter : public DataError {
 public:
  MissingParameter(std::string name, std::vector<Index> tuple)
      : DataError("missing parameter entry " + name + format_tuple(tuple)),
        name_(std::move(name)),
        tuple_(std::move(tuple)) {}
  const std::string& name() const { return name_; }
  const std::vector<Index>& tuple() const { return tuple_; }

 private:
  std::string name_;
  std::vector<Index> tuple_;
};

class MissingRhs : public DataError {
 public:
  MissingRhs(std::size_t block, std::vector<Index> global)
      : DataError("missing rhs for constraint block " + std::to_string(block) +
                  " at " + format_tuple(global)),
        block_(block),
        global_(std::move(global)) {}
  std::size_t block() const { return block_; }
  const std::vector<Index>& global() const { return global_; }

 private:
  std::size_t block_;
  std::vector<Index> global_;
};

class MissingSpace : public DataError {
 public:
  explicit MissingSpace(std::string placeholder)
      : DataError("no index space for placeholder '" + placeholder + "'"),
        placeholder_(std::move(placeholder)) {}
  const std::string& placeholder() const { return placeholder_; }

 private:
  std::string placeholder_;
};

/// A parallel worker failed; carries the part id of the failing worker.
class WorkerError : public std::runtime_error {
 public:
  WorkerError(std::size_t part, const std::string& what, std::exception_ptr cause)
      : std::runtime_error("worker " + std::to_string(part) + ": " + what),
        part_(part),
        cause_(std::move(cause)) {}
  std::size_t part() const { return part_; }
  /// The exception the worker raised.
  std::exception_ptr cause() const { return cause_; }

 private:
  std::size_t part_;
  std::exception_ptr cause_;
};

}  // namespace meadow
