#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "hqpulse/rng.hpp"

namespace test_helpers {

inline double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

inline double comm_norm(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return max_abs(a * b - b * a);
}

inline double unitarity_defect(const Eigen::MatrixXcd& u) {
  return max_abs(u.adjoint() * u -
                 Eigen::MatrixXcd::Identity(u.rows(), u.cols()));
}

// Matrix exponential by scaling and squaring with a Taylor core; the
// independent reference for the eigendecomposition-based propagator.
inline Eigen::MatrixXcd expm_taylor(const Eigen::MatrixXcd& a) {
  const int squarings = 10;
  const Eigen::MatrixXcd scaled = a / std::pow(2.0, squarings);
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
  Eigen::MatrixXcd sum = term;
  for (int k = 1; k <= 18; ++k) {
    term = (term * scaled) / static_cast<double>(k);
    sum += term;
  }
  for (int k = 0; k < squarings; ++k) sum = sum * sum;
  return sum;
}

// Largest |entry| difference after aligning global phase on the largest
// element of `a`.
inline double phase_aligned_distance(const Eigen::MatrixXcd& a,
                                     const Eigen::MatrixXcd& b) {
  int r = 0, c = 0;
  a.cwiseAbs().maxCoeff(&r, &c);
  const std::complex<double> phase = b(r, c) / a(r, c);
  return max_abs(a * (phase / std::abs(phase)) - b);
}

}  // namespace test_helpers
