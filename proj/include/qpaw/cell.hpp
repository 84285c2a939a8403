#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>

namespace qpaw {

// Periodic simulation cell. Rows of `lattice` are the lattice vectors a1,a2,a3
// in Bohr. Reciprocal rows b_i satisfy b_i . a_j = 2*pi*delta_ij.
struct Cell {
  Eigen::Matrix3d lattice;

  explicit Cell(const Eigen::Matrix3d& lattice_bohr) : lattice(lattice_bohr) {
    if (!(std::abs(lattice.determinant()) > 1e-12)) {
      throw std::invalid_argument("cell: lattice matrix is singular");
    }
  }

  static Cell cubic(double a_bohr) {
    return Cell(Eigen::Matrix3d::Identity() * a_bohr);
  }

  double volume() const { return std::abs(lattice.determinant()); }

  Eigen::Matrix3d reciprocal() const {
    return 2.0 * M_PI * lattice.inverse().transpose();
  }

  // Cartesian G for a Miller triple, in 1/Bohr.
  Eigen::Vector3d gvec(const std::array<int, 3>& m) const {
    Eigen::Matrix3d b = reciprocal();
    return m[0] * b.row(0).transpose() + m[1] * b.row(1).transpose() +
           m[2] * b.row(2).transpose();
  }
};

}  // namespace qpaw
