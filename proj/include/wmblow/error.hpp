#pragma once

#include <stdexcept>
#include <string>

namespace wmblow {

/// Base class of every failure raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Configuration or precondition problems (CLI exit code 2).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error("config: " + msg) {}
};

/// Numerical failures (CLI exit code 3) derive from this.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

#define WMBLOW_DEFINE_NUMERICAL_ERROR(Name, prefix)                  \
  class Name : public NumericalError {                               \
   public:                                                           \
    explicit Name(const std::string& msg) : NumericalError(prefix + msg) {} \
  };

WMBLOW_DEFINE_NUMERICAL_ERROR(InvalidProfile, std::string("invalid profile: "))
WMBLOW_DEFINE_NUMERICAL_ERROR(NonConvergence, std::string("non-convergence: "))
WMBLOW_DEFINE_NUMERICAL_ERROR(QuadratureFailure, std::string("quadrature failure: "))
WMBLOW_DEFINE_NUMERICAL_ERROR(SingularEndpoint, std::string("singular endpoint: "))
WMBLOW_DEFINE_NUMERICAL_ERROR(StepFailure, std::string("step failure: "))
WMBLOW_DEFINE_NUMERICAL_ERROR(AmplitudeExtraction, std::string("amplitude extraction: "))
WMBLOW_DEFINE_NUMERICAL_ERROR(Instability, std::string("instability: "))
WMBLOW_DEFINE_NUMERICAL_ERROR(Underresolved, std::string("underresolved: "))
WMBLOW_DEFINE_NUMERICAL_ERROR(LevelNotCrossed, std::string("level not crossed: "))
WMBLOW_DEFINE_NUMERICAL_ERROR(DegenerateFit, std::string("degenerate fit: "))
WMBLOW_DEFINE_NUMERICAL_ERROR(ContractViolation, std::string("contract violation: "))

#undef WMBLOW_DEFINE_NUMERICAL_ERROR

}  // namespace wmblow
