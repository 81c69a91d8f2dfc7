#include "authbound/rng.hpp"

#include <cmath>
#include <numbers>

namespace authbound {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(splitmix64(base) ^ splitmix64(~stream));
}

double GaussianSource::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianSource::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // u1 shifted into (0, 1] so the log is finite.
  const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

Complex GaussianSource::complex_normal() {
  const double re = normal() * std::numbers::sqrt2 / 2.0;
  const double im = normal() * std::numbers::sqrt2 / 2.0;
  return {re, im};
}

Matrix GaussianSource::matrix(Eigen::Index rows, Eigen::Index cols, bool complex_entries) {
  Matrix out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      out(r, c) = complex_entries ? complex_normal() : Complex(normal(), 0.0);
    }
  }
  return out;
}

}  // namespace authbound
