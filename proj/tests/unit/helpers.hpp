#pragma once

#include "hlyap/group.hpp"
#include "hlyap/projlin.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <random>
#include <string>

namespace hlyap::test {

inline std::string group_path(const std::string& name) {
  return std::string(HLYAP_DATA_DIR) + "/groups/" + name + ".json";
}

inline projlin::Group load_group(const std::string& name) { return projlin::Group::load(group_path(name)); }

inline projlin::GroupElement diag_element(std::initializer_list<double> values) {
  Vector d(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) d(i++) = v;
  return projlin::GroupElement(d.asDiagonal(), d.cwiseInverse().asDiagonal());
}

// Boost of rapidity s in SO(2,1) for the form diag(1, 1, -1); eigenvalues e^s, 1, e^-s.
inline Matrix boost(double s) {
  Matrix b = Matrix::Identity(3, 3);
  b(0, 0) = b(2, 2) = std::cosh(s);
  b(0, 2) = b(2, 0) = std::sinh(s);
  return b;
}

inline Matrix rotation_xy(double phi) {
  Matrix r = Matrix::Identity(3, 3);
  r(0, 0) = r(1, 1) = std::cos(phi);
  r(0, 1) = -std::sin(phi);
  r(1, 0) = std::sin(phi);
  return r;
}

inline projlin::GroupElement element(const Matrix& m) { return projlin::GroupElement(m, m.inverse()); }

inline Matrix random_matrix(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n;
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = n(rng);
  return m;
}

inline Matrix random_rotation(std::mt19937_64& rng, int d) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, d));
  Matrix q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

}  // namespace hlyap::test
