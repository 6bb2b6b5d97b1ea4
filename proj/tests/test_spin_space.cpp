#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <numbers>

#include "hqpulse/spin_space.hpp"
#include "test_helpers.hpp"

using namespace hqpulse;
using test_helpers::comm_norm;
using test_helpers::max_abs;

namespace {

std::vector<double> sorted_eigenvalues(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

Eigen::MatrixXcd evolve_exchange(const SpinRegister& reg, int i, int j, double theta) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(exchange_operator(reg, i, j));
  const Eigen::VectorXcd ph =
      (std::complex<double>(0, -theta) * es.eigenvalues()).array().exp();
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

TEST_CASE("exchange operator has singlet/triplet spectrum on a pair") {
  const SpinRegister reg{2};
  const auto ev = sorted_eigenvalues(exchange_operator(reg, 1, 2));
  REQUIRE_THAT(ev[0], Catch::Matchers::WithinAbs(-0.75, 1e-12));
  for (int k = 1; k < 4; ++k)
    REQUIRE_THAT(ev[k], Catch::Matchers::WithinAbs(0.25, 1e-12));
}

TEST_CASE("exchange operator algebra") {
  for (int n : {3, 6}) {
    const SpinRegister reg{n};
    const auto [s2, sz] = total_spin_operators(reg);
    for (int i = 1; i <= n; ++i) {
      for (int j = i + 1; j <= n; ++j) {
        const Eigen::MatrixXcd e = exchange_operator(reg, i, j);
        REQUIRE(max_abs(e - e.adjoint()) < 1e-12);
        REQUIRE(std::abs(e.trace()) < 1e-12);
        // (S_i.S_j)^2 = 3/16 I - 1/2 S_i.S_j
        const Eigen::MatrixXcd lhs = e * e;
        const Eigen::MatrixXcd rhs =
            3.0 / 16.0 * Eigen::MatrixXcd::Identity(reg.dim(), reg.dim()) - 0.5 * e;
        REQUIRE(max_abs(lhs - rhs) < 1e-12);
        REQUIRE(comm_norm(e, s2) < 1e-12);
        REQUIRE(comm_norm(e, sz) < 1e-12);
      }
    }
  }
}

TEST_CASE("exchange operator rejects bad labels") {
  const SpinRegister reg = SpinRegister::one_qubit();
  REQUIRE_THROWS_AS(exchange_operator(reg, 1, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(exchange_operator(reg, 0, 2), std::invalid_argument);
  REQUIRE_THROWS_AS(exchange_operator(reg, 1, 4), std::invalid_argument);
}

TEST_CASE("total spin spectra") {
  SECTION("one spin") {
    const auto [s2, sz] = total_spin_operators(SpinRegister{1});
    REQUIRE(max_abs(s2 - 0.75 * Eigen::MatrixXcd::Identity(2, 2)) < 1e-12);
  }
  SECTION("two spins: singlet plus triplet") {
    const auto [s2, sz] = total_spin_operators(SpinRegister{2});
    const auto ev = sorted_eigenvalues(s2);
    REQUIRE_THAT(ev[0], Catch::Matchers::WithinAbs(0.0, 1e-12));
    for (int k = 1; k < 4; ++k)
      REQUIRE_THAT(ev[k], Catch::Matchers::WithinAbs(2.0, 1e-12));
  }
  SECTION("three spins: quadruplet plus two doublets") {
    const auto [s2, sz] = total_spin_operators(SpinRegister::one_qubit());
    const auto ev = sorted_eigenvalues(s2);
    for (int k = 0; k < 4; ++k)
      REQUIRE_THAT(ev[k], Catch::Matchers::WithinAbs(0.75, 1e-12));
    for (int k = 4; k < 8; ++k)
      REQUIRE_THAT(ev[k], Catch::Matchers::WithinAbs(3.75, 1e-12));
    REQUIRE(std::abs(sz(0, 0) - std::complex<double>(-1.5)) < 1e-12);
  }
  SECTION("S_z is diagonal with the bit-count rule") {
    const auto [s2, sz] = total_spin_operators(SpinRegister::two_qubits());
    for (int s = 0; s < 64; ++s)
      REQUIRE_THAT(sz(s, s).real(),
                   Catch::Matchers::WithinAbs(std::popcount(unsigned(s)) - 3.0, 1e-12));
  }
}

TEST_CASE("single-qubit logical frame matches the Clebsch-Gordan expansion") {
  const LogicalFrame f = logical_frame_single();
  const double r2 = 1.0 / std::sqrt(2.0);
  const double r6 = 1.0 / std::sqrt(6.0);

  REQUIRE(max_abs(f.basis.adjoint() * f.basis - Eigen::MatrixXcd::Identity(2, 2)) <
          1e-12);
  REQUIRE(std::abs(f.basis(0b001, 0) - std::complex<double>(r2)) < 1e-12);
  REQUIRE(std::abs(f.basis(0b010, 0) - std::complex<double>(-r2)) < 1e-12);
  REQUIRE(std::abs(f.basis(0b001, 1) - std::complex<double>(r6)) < 1e-12);
  REQUIRE(std::abs(f.basis(0b010, 1) - std::complex<double>(r6)) < 1e-12);
  REQUIRE(std::abs(f.basis(0b100, 1) - std::complex<double>(-std::sqrt(2.0 / 3.0))) <
          1e-12);

  const auto [s2, sz] = total_spin_operators(SpinRegister::one_qubit());
  for (int c = 0; c < 2; ++c) {
    REQUIRE(max_abs(s2 * f.basis.col(c) - 0.75 * f.basis.col(c)) < 1e-12);
    REQUIRE(max_abs(sz * f.basis.col(c) + 0.5 * f.basis.col(c)) < 1e-12);
  }

  SECTION("leak state is the S=3/2 member of the sector") {
    REQUIRE(f.leak.cols() == 1);
    REQUIRE(max_abs(s2 * f.leak.col(0) - 3.75 * f.leak.col(0)) < 1e-12);
    REQUIRE(max_abs(f.basis.adjoint() * f.leak) < 1e-12);
    // phase convention: equal amplitudes 1/sqrt(3), real positive
    for (int idx : {0b001, 0b010, 0b100})
      REQUIRE(std::abs(f.leak(idx, 0) - std::complex<double>(1.0 / std::sqrt(3.0))) <
              1e-12);
  }
}

TEST_CASE("two-qubit logical frame") {
  const LogicalFrame f = logical_frame_two();
  REQUIRE(f.dim() == 64);
  REQUIRE(f.logical_dim() == 4);
  REQUIRE(max_abs(f.basis.adjoint() * f.basis - Eigen::MatrixXcd::Identity(4, 4)) <
          1e-12);

  const SpinRegister reg = SpinRegister::two_qubits();
  REQUIRE(sz_sector_indices(reg, -1.0).size() == 15);  // C(6,2)
  REQUIRE(f.leak.cols() == 11);

  const auto [s2, sz] = total_spin_operators(reg);
  for (int c = 0; c < 4; ++c)
    REQUIRE(max_abs(sz * f.basis.col(c) + f.basis.col(c)) < 1e-12);
  REQUIRE(max_abs(f.basis.adjoint() * f.leak) < 1e-12);
  REQUIRE(max_abs(f.leak.adjoint() * f.leak - Eigen::MatrixXcd::Identity(11, 11)) <
          1e-12);

  SECTION("ordering is (00,01,10,11) with qubit a in the low bits") {
    const LogicalFrame one = logical_frame_single();
    for (int sa = 0; sa < 8; ++sa)
      for (int sb = 0; sb < 8; ++sb) {
        REQUIRE(std::abs(f.basis(sa + 8 * sb, 1) -
                         one.basis(sa, 0) * one.basis(sb, 1)) < 1e-12);
        REQUIRE(std::abs(f.basis(sa + 8 * sb, 2) -
                         one.basis(sa, 1) * one.basis(sb, 0)) < 1e-12);
      }
  }
}

TEST_CASE("project") {
  const LogicalFrame f = logical_frame_single();
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(8, 8);

  SECTION("identity and global phase") {
    REQUIRE(max_abs(project(eye, f) - Eigen::MatrixXcd::Identity(2, 2)) < 1e-12);
    const auto phase = std::polar(1.0, 0.83);
    REQUIRE(max_abs(project(phase * eye, f) -
                    phase * Eigen::MatrixXcd::Identity(2, 2)) < 1e-12);
  }

  SECTION("dimension mismatch is rejected") {
    REQUIRE_THROWS_AS(project(Eigen::MatrixXcd::Identity(4, 4), f),
                      std::invalid_argument);
  }

  SECTION("exchange phase pi separates singlet and triplet content") {
    const SpinRegister reg = SpinRegister::one_qubit();
    const Eigen::MatrixXcd u = evolve_exchange(reg, 1, 2, std::numbers::pi);
    const Eigen::MatrixXcd m = project(u, f);
    REQUIRE(std::abs(m(0, 0) - std::polar(1.0, 3.0 * std::numbers::pi / 4.0)) < 1e-12);
    REQUIRE(std::abs(m(1, 1) - std::polar(1.0, -std::numbers::pi / 4.0)) < 1e-12);
    REQUIRE(std::abs(m(0, 1)) < 1e-12);
    REQUIRE(std::abs(m(1, 0)) < 1e-12);
  }

  SECTION("multiplicative exactly when both factors preserve the span") {
    const SpinRegister reg = SpinRegister::one_qubit();
    const Eigen::MatrixXcd u = evolve_exchange(reg, 1, 3, 0.7);
    const Eigen::MatrixXcd v = evolve_exchange(reg, 2, 3, 1.3);
    REQUIRE(max_abs(project(u * v, f) - project(u, f) * project(v, f)) < 1e-12);

    // rotation out of the logical span breaks the identity
    const Eigen::VectorXcd b0 = f.basis.col(0);
    const Eigen::VectorXcd l0 = f.leak.col(0);
    const double ang = 0.6;
    Eigen::MatrixXcd w = eye;
    w += (std::cos(ang) - 1.0) * (b0 * b0.adjoint() + l0 * l0.adjoint());
    w += std::sin(ang) * (l0 * b0.adjoint() - b0 * l0.adjoint());
    REQUIRE(test_helpers::unitarity_defect(w) < 1e-12);
    REQUIRE(max_abs(project(w * w, f) - project(w, f) * project(w, f)) > 1e-3);
  }
}
