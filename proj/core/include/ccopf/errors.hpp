#pragma once

#include <stdexcept>
#include <string>

namespace ccopf {

// Broad failure classes; the CLI maps them onto exit codes.
enum class ErrorKind {
  Parse,       // malformed input file, bad config value
  Validation,  // structurally valid input violating a model invariant
  Infeasible,  // model has no solution (reported, not thrown, where possible)
  Numerical,   // singular system, unreachable plane, iteration limit
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error parse_error(std::string msg) { return {ErrorKind::Parse, std::move(msg)}; }
inline Error validation_error(std::string msg) { return {ErrorKind::Validation, std::move(msg)}; }
inline Error infeasible_error(std::string msg) { return {ErrorKind::Infeasible, std::move(msg)}; }
inline Error numerical_error(std::string msg) { return {ErrorKind::Numerical, std::move(msg)}; }

}  // namespace ccopf
