#pragma once

#include <stdexcept>

namespace qes {

/// A computation ran but produced an unusable result (basis collapse,
/// failed closure check, missing roots). Precondition violations use
/// std::invalid_argument / std::domain_error instead.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qes
