#include "socv/fields.hpp"

#include <cmath>

namespace socv {

AdaptedField::AdaptedField(FieldShape shape, int paths, int steps, int rows,
                           int cols)
    : shape_(shape), paths_(paths), steps_(steps), rows_(rows), cols_(cols) {
  require(paths >= 1 && steps >= 1 && rows >= 1 && cols >= 1,
          "AdaptedField dimensions must be positive");
  data_.assign(static_cast<size_t>(paths) * steps * rows * cols, 0.0);
}

Vector AdaptedField::sample_l2_by_step() const {
  Vector norms(steps_);
  for (int k = 0; k < steps_; ++k) {
    double acc = 0.0;
    for (int p = 0; p < paths_; ++p) {
      acc += at(p, k).squaredNorm();
    }
    norms[k] = std::sqrt(acc / paths_);
  }
  return norms;
}

double AdaptedField::sup_sample_l2() const {
  return sample_l2_by_step().maxCoeff();
}

}  // namespace socv
