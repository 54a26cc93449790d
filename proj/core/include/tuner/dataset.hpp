#pragma once

#include "tuner/common.hpp"

namespace tuner {

/// Paired observations: rows of x are parameter vectors in the unit box,
/// y holds the matching scalar performance values.
struct Dataset {
  Matrix x;  // n x D
  Vector y;  // n

  Dataset() = default;
  Dataset(Matrix x_, Vector y_) : x(std::move(x_)), y(std::move(y_)) {
    if (x.rows() != y.size()) throw ArgumentError("dataset: x rows and y length differ");
  }

  Eigen::Index size() const { return x.rows(); }
  Eigen::Index dims() const { return x.cols(); }
  bool empty() const { return x.rows() == 0; }

  void append(const Eigen::Ref<const Vector>& point, double value) {
    if (x.rows() == 0 && x.cols() == 0) x.resize(0, point.size());
    if (point.size() != x.cols()) throw ArgumentError("dataset: appended point has wrong dimension");
    x.conservativeResize(x.rows() + 1, Eigen::NoChange);
    x.row(x.rows() - 1) = point.transpose();
    y.conservativeResize(y.size() + 1);
    y(y.size() - 1) = value;
  }
};

}  // namespace tuner
