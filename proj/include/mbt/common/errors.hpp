#ifndef MBT_COMMON_ERRORS_HPP_
#define MBT_COMMON_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace mbt {

// Invalid scene, curriculum, or command-line configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The constrained-dynamics system could not be solved.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Simulation state became non-finite. The message carries a state dump.
class NumericalFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor or array dimensions do not line up.
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An API was called in a state where it is not allowed.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Optimisation produced non-finite values.
class TrainingFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mbt

#endif  // MBT_COMMON_ERRORS_HPP_
