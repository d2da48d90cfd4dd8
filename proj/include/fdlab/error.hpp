#pragma once

#include <stdexcept>
#include <string>

namespace fdlab {

// Violated precondition of a causal/estimation operation.
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or unusable input data (CSV, JSON documents, missing columns).
class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fdlab
