#pragma once

#include <stdexcept>
#include <string>

namespace ergmbf {

/// Bad user input: malformed files, unknown names, invalid hypotheses.
/// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical procedure could not produce a usable result (non-existent
/// MLE, singular design, sampler tuning failure). CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ergmbf
