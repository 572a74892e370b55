#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace clustclass {

// Root of every error the library throws. `category()` is what the CLI
// prints in front of the message.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* category() const noexcept { return "error"; }
};

#define CLUSTCLASS_ERROR(Name, tag)                                     \
  class Name : public Error {                                           \
   public:                                                              \
    using Error::Error;                                                 \
    const char* category() const noexcept override { return tag; }      \
  };

CLUSTCLASS_ERROR(ParseError, "parse")
CLUSTCLASS_ERROR(SchemaError, "schema")
CLUSTCLASS_ERROR(ArgumentError, "argument")
CLUSTCLASS_ERROR(ImputationError, "imputation")
CLUSTCLASS_ERROR(LeakageError, "leakage")
CLUSTCLASS_ERROR(ConfigError, "config")
CLUSTCLASS_ERROR(FitError, "fit")
CLUSTCLASS_ERROR(MetricError, "metric")
CLUSTCLASS_ERROR(StratificationError, "stratification")
CLUSTCLASS_ERROR(InfeasibleError, "infeasible")
CLUSTCLASS_ERROR(SizeError, "size")
CLUSTCLASS_ERROR(InvariantError, "invariant")
CLUSTCLASS_ERROR(RangeError, "range")
CLUSTCLASS_ERROR(DegenerateTestError, "degenerate-test")
CLUSTCLASS_ERROR(IoError, "io")

#undef CLUSTCLASS_ERROR

// An iterative solver stopped before certifying its tolerance. Carries the
// best iterate found and the optimality residual at that point.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<double> best_weights, double best_offset,
              double residual)
      : Error(what),
        best_weights(std::move(best_weights)),
        best_offset(best_offset),
        residual(residual) {}
  const char* category() const noexcept override { return "solver"; }

  std::vector<double> best_weights;
  double best_offset;
  double residual;
};

}  // namespace clustclass
