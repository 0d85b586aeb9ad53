#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace satisrank {

/// Base of every error raised by the library. Carries the name of the module
/// that raised it so the CLI can echo it in its error record.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

  virtual const char* kind() const noexcept { return "error"; }

 private:
  std::string module_;
};

#define SATISRANK_DEFINE_ERROR(Name, tag)                     \
  class Name : public Error {                                 \
   public:                                                    \
    using Error::Error;                                       \
    const char* kind() const noexcept override { return tag; } \
  };

SATISRANK_DEFINE_ERROR(ConfigError, "configuration")
SATISRANK_DEFINE_ERROR(ArgumentError, "argument")
SATISRANK_DEFINE_ERROR(DomainError, "domain")
SATISRANK_DEFINE_ERROR(InfeasibleEvaluation, "infeasible_evaluation")
SATISRANK_DEFINE_ERROR(SolverError, "solver")
SATISRANK_DEFINE_ERROR(InfeasibleParameters, "infeasible_parameters")
SATISRANK_DEFINE_ERROR(ParseError, "parse")
SATISRANK_DEFINE_ERROR(StreamError, "stream")

#undef SATISRANK_DEFINE_ERROR

}  // namespace satisrank
