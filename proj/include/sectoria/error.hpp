#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sectoria {

enum class ErrorKind {
  syntax,
  unknown_identifier,
  variable_range,
  singularity,
  domain,
  pole_proximity,
  dimension,
  quadrature,
  hypothesis,
  input,
};

/// Library-wide exception. `position` carries a 1-based column for syntax
/// errors and the 1-based variable index for per-component failures; 0 when
/// not applicable.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::size_t position = 0)
      : std::runtime_error(what), kind_(kind), position_(position) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }

 private:
  ErrorKind kind_;
  std::size_t position_;
};

}  // namespace sectoria
