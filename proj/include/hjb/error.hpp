#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hjb {

enum class ErrorCode {
  EmptyDomain,
  MissingNeighbor,
  OutOfDomain,
  WrongRegime,
  DegenerateMatching,
  NoInterface,
  NoConvergence,
  BadParameter,
  EmptyInterface,
  ConfigParse,
  Validation,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Carries the residual history of the failed iteration.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& what, std::vector<double> history)
      : Error(ErrorCode::NoConvergence, what), history_(std::move(history)) {}

  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace hjb
