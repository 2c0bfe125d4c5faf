#include "cohere/vec.hpp"

#include <stdexcept>

namespace cohere {

Mat Mat::inverse() const {
  Mat inv(dim_);
  const Mat& m = *this;
  switch (dim_) {
    case 1: {
      if (m(0, 0) == 0.0) throw std::runtime_error("Mat::inverse: singular 1x1 matrix");
      inv(0, 0) = 1.0 / m(0, 0);
      return inv;
    }
    case 2: {
      double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
      if (det == 0.0) throw std::runtime_error("Mat::inverse: singular 2x2 matrix");
      inv(0, 0) = m(1, 1) / det;
      inv(0, 1) = -m(0, 1) / det;
      inv(1, 0) = -m(1, 0) / det;
      inv(1, 1) = m(0, 0) / det;
      return inv;
    }
    case 3: {
      double c00 = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
      double c01 = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
      double c02 = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
      double det = m(0, 0) * c00 + m(0, 1) * c01 + m(0, 2) * c02;
      if (det == 0.0) throw std::runtime_error("Mat::inverse: singular 3x3 matrix");
      inv(0, 0) = c00 / det;
      inv(1, 0) = c01 / det;
      inv(2, 0) = c02 / det;
      inv(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) / det;
      inv(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) / det;
      inv(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) / det;
      inv(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / det;
      inv(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) / det;
      inv(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / det;
      return inv;
    }
    default:
      throw std::runtime_error("Mat::inverse: unsupported dimension");
  }
}

}  // namespace cohere
