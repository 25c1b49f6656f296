#pragma once

#include <stdexcept>
#include <string>

namespace lagflow {

/// Induced metric lost positive definiteness (or the graph folded over).
/// Carries the offending node so a failed run can be diagnosed.
class DegenerateGraphError : public std::runtime_error {
public:
  DegenerateGraphError(const std::string& what, int i, int j)
      : std::runtime_error(what + " at node (" + std::to_string(i) + ", " +
                           std::to_string(j) + ")"),
        node_i(i), node_j(j) {}
  int node_i;
  int node_j;
};

/// NaN/Inf detected in a computed field.
class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid argument to a numerical routine (out-of-range time, bad order, ...).
class ArgumentError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Map construction failed (non-convergent solve, folded composition, ...).
class GeneratorError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed run configuration or input file.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unreadable or syntactically invalid snapshot/CSV file.
class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lagflow
