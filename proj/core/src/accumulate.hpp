#pragma once

#include "bwf/geometry.hpp"

namespace bwf::detail {

// Kahan-compensated scalar sum; keeps n-term averages stable under sample
// permutation.
class KahanSum {
 public:
  void add(double value) {
    const double y = value - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Entrywise Kahan-compensated matrix sum.
class KahanMatrixSum {
 public:
  explicit KahanMatrixSum(Eigen::Index rows, Eigen::Index cols)
      : sum_(Matrix::Zero(rows, cols)), comp_(Matrix::Zero(rows, cols)) {}

  void add(const Matrix& value) {
    const Matrix y = value - comp_;
    const Matrix t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  const Matrix& value() const { return sum_; }

 private:
  Matrix sum_;
  Matrix comp_;
};

}  // namespace bwf::detail
