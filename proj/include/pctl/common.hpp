#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pctl {

using Vector = std::vector<double>;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A matrix expected to be symmetric positive definite is not.
/// `index` is the 1-based row where this was detected (0 if unknown).
class NotSpdError : public Error {
 public:
  NotSpdError(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Input violates the structural assumptions of the 3T system.
class InvalidInstanceError : public Error {
 public:
  using Error::Error;
};

/// Generator or sweep targets that no valid instance can satisfy.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Default tolerances and caps. Every routine that uses one takes it as a
/// parameter defaulted to the value here.
namespace defaults {
inline constexpr std::size_t kDenseCap = 256;
inline constexpr double kSymmetryRelTol = 1e-14;
inline constexpr double kInnerCgTol = 1e-12;
inline constexpr double kSpsdRelTol = 1e-10;
inline constexpr double kIdentityTol = 1e-10;
inline constexpr double kChainSlack = 1e-8;
inline constexpr double kErrorFloor = 1e-13;
inline constexpr std::size_t kRhoCycles = 30;
inline constexpr std::size_t kRhoSkip = 5;
}  // namespace defaults

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

}  // namespace pctl
