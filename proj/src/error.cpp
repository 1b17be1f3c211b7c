#include "forkbench/error.hpp"

#include <algorithm>

namespace forkbench {

namespace {

std::string describe(const std::vector<AggregateError::Failure>& failures) {
  std::string text = "failures in ids {";
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (i != 0) text += ",";
    text += std::to_string(failures[i].id);
  }
  text += "}";
  for (const auto& failure : failures) {
    text += "; [" + std::to_string(failure.id) + "] " + failure.message;
  }
  return text;
}

}  // namespace

AggregateError::AggregateError(std::vector<Failure> failures)
    : Error([&] {
        std::sort(failures.begin(), failures.end(),
                  [](const Failure& a, const Failure& b) { return a.id < b.id; });
        return describe(failures);
      }()),
      failures_(std::move(failures)) {}

std::vector<std::size_t> AggregateError::ids() const {
  std::vector<std::size_t> out;
  out.reserve(failures_.size());
  for (const auto& failure : failures_) out.push_back(failure.id);
  return out;
}

}  // namespace forkbench
