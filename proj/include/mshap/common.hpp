#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace mshap {

// Row-major so that a row of an attribution matrix is contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Error hierarchy. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class EnumerationLimitError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class AlphaMethod { Uniform, RawWeights, AbsoluteWeights, SquaredWeights };

inline constexpr AlphaMethod kAllAlphaMethods[] = {
    AlphaMethod::Uniform, AlphaMethod::RawWeights, AlphaMethod::AbsoluteWeights,
    AlphaMethod::SquaredWeights};

std::string_view to_string(AlphaMethod method);
AlphaMethod parse_alpha_method(std::string_view name);

// Neumaier-compensated accumulator. Summation results do not depend on
// how the caller happened to chunk the input beyond the last few ulps.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

template <typename Derived>
double compensated_sum(const Eigen::DenseBase<Derived>& xs) {
  CompensatedSum acc;
  for (Index i = 0; i < xs.rows(); ++i) {
    for (Index j = 0; j < xs.cols(); ++j) acc.add(xs(i, j));
  }
  return acc.value();
}

}  // namespace mshap
