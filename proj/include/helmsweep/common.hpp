#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace helmsweep {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;
using Vec3i = std::array<int, 3>;
using Vec3d = std::array<double, 3>;

// Thrown for bad run configurations (divisibility, ranges, file formats).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown for bad input data (non-positive velocities, malformed grids).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a factorization hits a near-zero pivot.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& msg, std::int64_t pivot)
      : std::runtime_error(msg), pivot_index(pivot) {}
  std::int64_t pivot_index;
};

inline double norm2(const CVector& v) {
  double s = 0.0;
  for (const Complex& z : v) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace helmsweep
