#pragma once

#include <stdexcept>
#include <string>

namespace psh {

enum class ErrorKind {
  syntax,
  undeclared_variable,
  non_integer_exponent,
  division_by_zero,
  kind_mismatch,
  singular_stencil,
  non_integrable,
  empty_domain,
  domain_truncated,
  rule_too_coarse,
  not_admissible,
  not_radial,
  not_strictly_psh,
  precondition,
  field_too_singular,
  solver,
  unsupported_family,
  config,
  io,
};

const char* to_string(ErrorKind kind);

// Every recoverable failure in the library is reported through this type; the
// kind lets callers (and the CLI exit-code mapping) branch without parsing text.
class LabError : public std::runtime_error {
 public:
  LabError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace psh
