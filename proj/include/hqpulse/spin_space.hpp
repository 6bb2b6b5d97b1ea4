#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hqpulse {

// Register of spin-1/2 sites. Basis index encodes spin k (1-based label) in
// bit k-1; bit value 1 = up, 0 = down. For two qubits, spins 1a,2a,3a sit in
// the low bits and 1b,2b,3b in the high ones (labels 4,5,6).
struct SpinRegister {
  int n_spins = 3;

  static SpinRegister one_qubit() { return {3}; }
  static SpinRegister two_qubits() { return {6}; }

  int dim() const { return 1 << n_spins; }
  bool contains(int label) const { return label >= 1 && label <= n_spins; }
};

// S_i . S_j with S = sigma/2, so a spin pair has eigenvalues +1/4 (triplet)
// and -3/4 (singlet). Diagonal part from S^z S^z, flip-flop from the ladder
// terms.
inline Eigen::MatrixXcd exchange_operator(const SpinRegister& reg, int i, int j) {
  if (!reg.contains(i) || !reg.contains(j))
    throw std::invalid_argument("exchange_operator: unknown spin label");
  if (i == j)
    throw std::invalid_argument("exchange_operator: spin labels must differ");
  const int dim = reg.dim();
  const unsigned bi = 1u << (i - 1);
  const unsigned bj = 1u << (j - 1);
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim, dim);
  for (int s = 0; s < dim; ++s) {
    const bool ui = s & bi;
    const bool uj = s & bj;
    op(s, s) += (ui == uj) ? 0.25 : -0.25;
    if (ui != uj) op(s ^ static_cast<int>(bi | bj), s) += 0.5;
  }
  return op;
}

// (S^2, S_z) for the whole register. S^2 = (3n/4) I + 2 sum_{i<j} S_i.S_j.
inline std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> total_spin_operators(
    const SpinRegister& reg) {
  const int dim = reg.dim();
  Eigen::MatrixXcd sz = Eigen::MatrixXcd::Zero(dim, dim);
  for (int s = 0; s < dim; ++s)
    sz(s, s) = std::popcount(static_cast<unsigned>(s)) - 0.5 * reg.n_spins;
  Eigen::MatrixXcd s2 =
      0.75 * reg.n_spins * Eigen::MatrixXcd::Identity(dim, dim);
  for (int i = 1; i <= reg.n_spins; ++i)
    for (int j = i + 1; j <= reg.n_spins; ++j)
      s2 += 2.0 * exchange_operator(reg, i, j);
  return {std::move(s2), std::move(sz)};
}

// Indices of the computational states with the given total S_z.
inline std::vector<int> sz_sector_indices(const SpinRegister& reg, double sz) {
  const int ups = static_cast<int>(std::lround(sz + 0.5 * reg.n_spins));
  std::vector<int> out;
  for (int s = 0; s < reg.dim(); ++s)
    if (std::popcount(static_cast<unsigned>(s)) == ups) out.push_back(s);
  return out;
}

// Orthonormal logical basis embedded in the full spin space, plus the
// orthonormal complement ("leak" states) inside the same S_z sector.
struct LogicalFrame {
  Eigen::MatrixXcd basis;  // ambient_dim x d, orthonormal columns
  Eigen::MatrixXcd leak;   // ambient_dim x m, complement within the sector

  int dim() const { return static_cast<int>(basis.rows()); }
  int logical_dim() const { return static_cast<int>(basis.cols()); }
};

namespace detail {

// Phase convention: largest-magnitude amplitude made real positive.
inline void fix_phase(Eigen::VectorXcd& v) {
  int imax = 0;
  double best = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best + 1e-12) {
      best = a;
      imax = i;
    }
  }
  if (best > 0.0) v *= std::conj(v(imax)) / best;
}

// Gram-Schmidt of the sector's computational states against the logical
// basis; the survivors span the leak space.
inline Eigen::MatrixXcd leak_complement(const SpinRegister& reg,
                                        const Eigen::MatrixXcd& basis,
                                        double sz) {
  const auto sector = sz_sector_indices(reg, sz);
  std::vector<Eigen::VectorXcd> kept;
  for (int idx : sector) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(reg.dim());
    v(idx) = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      v -= basis * (basis.adjoint() * v);
      for (const auto& k : kept) v -= k * k.dot(v);
    }
    const double nrm = v.norm();
    if (nrm > 1e-8) {
      v /= nrm;
      fix_phase(v);
      kept.push_back(std::move(v));
    }
  }
  Eigen::MatrixXcd leak(reg.dim(), static_cast<int>(kept.size()));
  for (int c = 0; c < leak.cols(); ++c) leak.col(c) = kept[c];
  return leak;
}

}  // namespace detail

// |0> = |S>|dn>, |1> = sqrt(1/3)|T0>|dn> - sqrt(2/3)|T->|up>, with the
// singlet/triplet pair on spins (1,2) and the lone spin on 3. Both live in
// the S=1/2, S_z=-1/2 doublet; the leak state is the S=3/2, S_z=-1/2
// quadruplet member.
inline LogicalFrame logical_frame_single() {
  const SpinRegister reg = SpinRegister::one_qubit();
  Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(8, 2);
  const double r2 = 1.0 / std::sqrt(2.0);
  const double r6 = 1.0 / std::sqrt(6.0);
  // index bits: (spin1, spin2, spin3) -> (bit0, bit1, bit2)
  basis(0b001, 0) = r2;   // |up dn dn>
  basis(0b010, 0) = -r2;  // |dn up dn>
  basis(0b001, 1) = r6;
  basis(0b010, 1) = r6;
  basis(0b100, 1) = -std::sqrt(2.0 / 3.0);  // |dn dn up>
  return {basis, detail::leak_complement(reg, basis, -0.5)};
}

// Tensor products |x>_a |y>_b ordered (00,01,10,11), qubit a the control;
// everything lies in the total S_z = -1 sector (dimension 15), whose
// remaining 11 directions form the leak space.
inline LogicalFrame logical_frame_two() {
  const LogicalFrame one = logical_frame_single();
  Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(64, 4);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int sa = 0; sa < 8; ++sa)
        for (int sb = 0; sb < 8; ++sb)
          basis(sa + 8 * sb, 2 * x + y) = one.basis(sa, x) * one.basis(sb, y);
  return {basis, detail::leak_complement(SpinRegister::two_qubits(), basis, -1.0)};
}

// Logical-block matrix M_xy = <x|U|y>.
inline Eigen::MatrixXcd project(const Eigen::MatrixXcd& u, const LogicalFrame& frame) {
  if (u.rows() != frame.dim() || u.cols() != frame.dim())
    throw std::invalid_argument("project: dimension mismatch");
  return frame.basis.adjoint() * u * frame.basis;
}

}  // namespace hqpulse
