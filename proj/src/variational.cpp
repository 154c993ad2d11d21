#include "qes/variational.hpp"

#include <cmath>
#include <stdexcept>

namespace qes {

std::vector<double> make_grid(double a_min, double a_max, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("make_grid: step must be positive");
  if (!(a_max >= a_min)) throw std::invalid_argument("make_grid: a_max < a_min");
  const auto count = static_cast<long long>(std::llround((a_max - a_min) / step));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count) + 1);
  for (long long k = 0; k <= count; ++k) grid.push_back(a_min + static_cast<double>(k) * step);
  return grid;
}

const char* to_string(MatchStatus s) {
  switch (s) {
    case MatchStatus::Assigned: return "ASSIGNED";
    case MatchStatus::IndexMismatch: return "INDEX_MISMATCH";
    case MatchStatus::Unmatched: return "UNMATCHED";
    case MatchStatus::OutOfRange: return "OUT_OF_RANGE";
  }
  return "UNKNOWN";
}

}  // namespace qes
