#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bellsig {

// Bad argument to a numerical routine (non-finite angle, negative statistic...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A value violates a documented invariant. `key` names the offending field
// (config key or record field) when one exists.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string key, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// Malformed text input. `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative solver gave up. Carries the best iterate it reached.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> best_iterate,
                      double gradient_norm)
      : std::runtime_error(what),
        best_iterate_(std::move(best_iterate)),
        gradient_norm_(gradient_norm) {}
  const std::vector<double>& best_iterate() const noexcept { return best_iterate_; }
  double gradient_norm() const noexcept { return gradient_norm_; }

 private:
  std::vector<double> best_iterate_;
  double gradient_norm_;
};

}  // namespace bellsig
