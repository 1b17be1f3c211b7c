#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace forkbench {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition or contract violation by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Raised by blocking operations when a test-mode timeout expires. Almost
// always means mismatched participation (a probable deadlock).
class TimeoutError : public Error {
 public:
  using Error::Error;
};

// Thrown to workers waiting at a barrier when a teammate failed. Reported
// only when no worker failed for another reason.
class BarrierBrokenError : public Error {
 public:
  using Error::Error;
};

// Failures collected from several workers (or sections) after all of them
// have joined. `ids()` is ascending.
class AggregateError : public Error {
 public:
  struct Failure {
    std::size_t id;
    std::string message;
  };

  explicit AggregateError(std::vector<Failure> failures);

  const std::vector<Failure>& failures() const noexcept { return failures_; }
  std::vector<std::size_t> ids() const;

 private:
  std::vector<Failure> failures_;
};

}  // namespace forkbench
