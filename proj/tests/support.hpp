#pragma once

#include <complex>
#include <string>

#include "densegame/tensor_core.hpp"

namespace densegame::test {

inline const Complex kI{0.0, 1.0};

inline ComplexMatrix sigma_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline ComplexMatrix sigma_y() {
  ComplexMatrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

inline ComplexMatrix sigma_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline ComplexMatrix diag(std::initializer_list<double> values) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                                        static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double v : values) m(k, k) = v, ++k;
  return m;
}

inline double dist(const ComplexMatrix& a, const ComplexMatrix& b) { return max_abs(a - b); }

inline std::string data_file(const std::string& name) {
  return std::string(DENSEGAME_DATA_DIR) + "/" + name + ".json";
}

}  // namespace densegame::test
