#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace egoloc {

enum class ErrorKind {
  InvalidInput,  // malformed or inconsistent caller input
  Numerical,     // singular / degenerate / ill-conditioned data
};

/// Base of every error thrown by the library. Carries the pipeline stage
/// that raised it so the CLI can report "<stage>: <message>".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string stage, const std::string& message)
      : std::runtime_error(message), kind_(kind), stage_(std::move(stage)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  ErrorKind kind_;
  std::string stage_;
};

class InvalidInput : public Error {
 public:
  InvalidInput(std::string stage, const std::string& message)
      : Error(ErrorKind::InvalidInput, std::move(stage), message) {}
};

class NumericalFailure : public Error {
 public:
  NumericalFailure(std::string stage, const std::string& message)
      : Error(ErrorKind::Numerical, std::move(stage), message) {}
};

/// Runs `fn`, re-tagging any library error with `stage` unless it already
/// names one.
template <typename Fn>
decltype(auto) with_stage(const std::string& stage, Fn&& fn) {
  try {
    return std::forward<Fn>(fn)();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    if (e.kind() == ErrorKind::InvalidInput) throw InvalidInput(stage, e.what());
    throw NumericalFailure(stage, e.what());
  }
}

}  // namespace egoloc
