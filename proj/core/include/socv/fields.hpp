#pragma once

#include "socv/types.hpp"

#include <vector>

namespace socv {

enum class FieldShape { Scalar, State, Control, StateNoise };

/// A quantity sampled per (path, step): state paths, control fields, adjoint
/// samples. Values at step k are, by construction of every producer in this
/// library, functions of noise increments with index < k and deterministic
/// data only (feedback controls may additionally read the state at step k).
class AdaptedField {
 public:
  AdaptedField() = default;
  AdaptedField(FieldShape shape, int paths, int steps, int rows, int cols = 1);

  FieldShape shape() const { return shape_; }
  int paths() const { return paths_; }
  int steps() const { return steps_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Eigen::Map<Matrix> at(int path, int step) {
    return Eigen::Map<Matrix>(cell(path, step), rows_, cols_);
  }
  Eigen::Map<const Matrix> at(int path, int step) const {
    return Eigen::Map<const Matrix>(cell(path, step), rows_, cols_);
  }

  /// Column view, for vector-shaped fields (cols == 1).
  Eigen::Map<Vector> vec(int path, int step) {
    return Eigen::Map<Vector>(cell(path, step), rows_);
  }
  Eigen::Map<const Vector> vec(int path, int step) const {
    return Eigen::Map<const Vector>(cell(path, step), rows_);
  }

  double& scalar(int path, int step) { return *cell(path, step); }
  double scalar(int path, int step) const { return *cell(path, step); }

  void set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

  /// sup over steps of the sample L2 norm sqrt(mean_p |field(p,k)|^2).
  double sup_sample_l2() const;

  /// Per-step sample L2 norms (length steps()).
  Vector sample_l2_by_step() const;

  static AdaptedField state_field(int paths, int steps, int n) {
    return AdaptedField(FieldShape::State, paths, steps, n, 1);
  }
  static AdaptedField control_field(int paths, int steps, int d) {
    return AdaptedField(FieldShape::Control, paths, steps, d, 1);
  }
  static AdaptedField matrix_field(int paths, int steps, int rows, int cols) {
    return AdaptedField(FieldShape::StateNoise, paths, steps, rows, cols);
  }
  static AdaptedField scalar_field(int paths, int steps) {
    return AdaptedField(FieldShape::Scalar, paths, steps, 1, 1);
  }

 private:
  double* cell(int path, int step) {
    return data_.data() +
           (static_cast<size_t>(path) * steps_ + step) * rows_ * cols_;
  }
  const double* cell(int path, int step) const {
    return data_.data() +
           (static_cast<size_t>(path) * steps_ + step) * rows_ * cols_;
  }

  FieldShape shape_ = FieldShape::Scalar;
  int paths_ = 0, steps_ = 0, rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

}  // namespace socv
