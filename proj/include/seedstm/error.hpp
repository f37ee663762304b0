#pragma once

#include <stdexcept>
#include <string>

namespace seedstm {

// Bad or missing input: files, schemas, configuration. CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation could not produce a valid result (empty lexicon,
// non-finite bound, degenerate data). CLI exit code 1.
class ComputeError : public std::runtime_error {
 public:
  explicit ComputeError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace seedstm
