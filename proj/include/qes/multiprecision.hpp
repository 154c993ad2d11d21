#pragma once

// 100-digit binary floating point usable as an Eigen scalar.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <Eigen/Core>

#include <limits>

namespace qes {

using HighPrecision =
    boost::multiprecision::number<boost::multiprecision::cpp_bin_float<100>, boost::multiprecision::et_off>;

}  // namespace qes

namespace Eigen {

template <>
struct NumTraits<qes::HighPrecision> : GenericNumTraits<qes::HighPrecision> {
  using Real = qes::HighPrecision;
  using NonInteger = qes::HighPrecision;
  using Nested = qes::HighPrecision;
  using Literal = qes::HighPrecision;

  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 8,
    MulCost = 16
  };

  static Real epsilon() { return std::numeric_limits<Real>::epsilon(); }
  static Real dummy_precision() { return 1000 * epsilon(); }
  static Real highest() { return (std::numeric_limits<Real>::max)(); }
  static Real lowest() { return (std::numeric_limits<Real>::lowest)(); }
  static Real infinity() { return std::numeric_limits<Real>::infinity(); }
  static Real quiet_NaN() { return std::numeric_limits<Real>::quiet_NaN(); }
  static int digits10() { return std::numeric_limits<Real>::digits10; }
};

}  // namespace Eigen
