#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hqpulse/effective.hpp"
#include "hqpulse/spin_space.hpp"
#include "hqpulse/topology.hpp"

namespace hqpulse {

// Planck constant in ueV*ns; one tau unit is h/J^max.
inline constexpr double kPlanckUevNs = 4.135667696;

// One piecewise-constant pulse: hold the coupling set for duration tau
// (units h/J^max).
struct PulseStep {
  double tau = 0.0;
  ExchangeCouplings couplings{};
};

struct PulseSequence {
  Topology topology = Topology::Single;
  double j12_frozen = 0.5;
  std::vector<PulseStep> steps;
  std::string gate;
  double fidelity = 0.0;
  std::uint64_t seed = 0;

  double total_tau() const {
    double t = 0.0;
    for (const auto& s : steps) t += s.tau;
    return t;
  }

  void validate() const {
    if (steps.empty())
      throw std::invalid_argument("pulse sequence: no steps");
    for (const auto& s : steps) {
      if (!(s.tau >= 0.0))
        throw std::invalid_argument("pulse sequence: tau must be >= 0");
      if (s.couplings.topology != topology)
        throw std::invalid_argument("pulse sequence: topology mismatch in step");
      const auto in_range = [](double j) { return j >= 0.0 && j <= 1.0; };
      if (!in_range(s.couplings.a.j13) || !in_range(s.couplings.a.j23))
        throw std::invalid_argument("pulse sequence: tunable coupling outside [0,1]");
      if (std::abs(s.couplings.a.j12 - j12_frozen) > 1e-12)
        throw std::invalid_argument("pulse sequence: J12 differs from frozen value");
      if (topology != Topology::Single) {
        if (!in_range(s.couplings.b.j13) || !in_range(s.couplings.b.j23) ||
            !in_range(s.couplings.inter[0]) || !in_range(s.couplings.inter[1]))
          throw std::invalid_argument("pulse sequence: tunable coupling outside [0,1]");
        if (std::abs(s.couplings.b.j12 - j12_frozen) > 1e-12)
          throw std::invalid_argument("pulse sequence: J12 differs from frozen value");
      }
    }
  }
};

struct GateTarget {
  std::string name;
  Eigen::MatrixXcd matrix;

  void validate() const {
    if (matrix.rows() != matrix.cols() || (matrix.rows() != 2 && matrix.rows() != 4))
      throw std::invalid_argument("gate target: matrix must be 2x2 or 4x4");
    const double dev = (matrix.adjoint() * matrix -
                        Eigen::MatrixXcd::Identity(matrix.rows(), matrix.cols()))
                           .cwiseAbs()
                           .maxCoeff();
    if (dev > 1e-12)
      throw std::invalid_argument("gate target: matrix is not unitary");
  }

  static GateTarget hadamard() {
    Eigen::MatrixXcd m(2, 2);
    const double r2 = 1.0 / std::sqrt(2.0);
    m << r2, r2, r2, -r2;
    return {"hadamard", m};
  }

  static GateTarget pi8() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2);
    m(1, 1) = std::polar(1.0, std::numbers::pi / 4.0);
    return {"pi8", m};
  }

  static GateTarget cnot() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    return {"cnot", m};
  }

  static GateTarget identity(int d) {
    return {"identity", Eigen::MatrixXcd::Identity(d, d)};
  }
};

struct FidelityReport {
  double fidelity = 0.0;
  double leakage = 0.0;
  double total_tau = 0.0;
  std::optional<double> physical_time_ns;
};

namespace detail {

inline double clamp01(double x) {
  if (std::abs(x) < 1e-12) return 0.0;
  if (std::abs(x - 1.0) < 1e-12) return 1.0;
  return std::clamp(x, 0.0, 1.0);
}

inline Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXcd& h, double scale) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::VectorXcd phases =
      (std::complex<double>(0.0, scale) * es.eigenvalues()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

// Square-pulse propagator U = exp(-i 2pi H tau): H in J^max units, tau in
// h/J^max units, so a lone pair at J=1 held for tau=1/2 is a SWAP up to
// global phase.
inline Eigen::MatrixXcd step_unitary(const PulseStep& step) {
  if (!(step.tau >= 0.0))
    throw std::invalid_argument("step_unitary: tau must be >= 0");
  return detail::expm_hermitian(heisenberg_hamiltonian(step.couplings),
                                -2.0 * std::numbers::pi * step.tau);
}

// Right-to-left product; step 1 acts first.
inline Eigen::MatrixXcd sequence_unitary(const PulseSequence& seq) {
  const int dim = 1 << n_spins(seq.topology);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& s : seq.steps) {
    if (s.couplings.topology != seq.topology)
      throw std::invalid_argument("sequence_unitary: topology mismatch");
    u = step_unitary(s) * u;
  }
  return u;
}

// Logical-block fidelity (global-phase invariant) and leakage of a full
// unitary against a target gate.
inline FidelityReport gate_fidelity(const Eigen::MatrixXcd& u,
                                    const LogicalFrame& frame,
                                    const GateTarget& target) {
  const int d = frame.logical_dim();
  if (target.matrix.rows() != d)
    throw std::invalid_argument("gate_fidelity: target dimension mismatch");
  const Eigen::MatrixXcd m = project(u, frame);
  FidelityReport r;
  r.fidelity = detail::clamp01(std::abs((target.matrix.adjoint() * m).trace()) / d);
  r.leakage = detail::clamp01(1.0 - (m.adjoint() * m).trace().real() / d);
  return r;
}

// tau (h/J^max units) to nanoseconds for a given J^max in ueV.
inline double duration_to_ns(double tau, double jmax_uev) {
  if (!(jmax_uev > 0.0))
    throw std::invalid_argument("duration_to_ns: jmax must be > 0");
  return tau * kPlanckUevNs / jmax_uev;
}

// Evolution restricted to the S_z sector that carries the logical frame
// (3-dimensional for one qubit, 15 for two). Exchange Hamiltonians conserve
// S_z, so the logical action computed here matches the full-space product
// exactly; it is the fast path used by synthesis.
class LogicalActionEvaluator {
 public:
  explicit LogicalActionEvaluator(Topology t)
      : topology_(t),
        frame_(t == Topology::Single ? logical_frame_single()
                                     : logical_frame_two()) {
    const SpinRegister reg{n_spins(t)};
    sector_ = sz_sector_indices(reg, t == Topology::Single ? -0.5 : -1.0);
    const int s = static_cast<int>(sector_.size());

    ExchangeCouplings probe;
    probe.topology = t;
    for (const auto& term : probe.terms()) {
      const Eigen::MatrixXcd full = exchange_operator(reg, term.i, term.j);
      Eigen::MatrixXd op(s, s);
      for (int r = 0; r < s; ++r)
        for (int c = 0; c < s; ++c) op(r, c) = full(sector_[r], sector_[c]).real();
      ops_.push_back(std::move(op));
    }

    frame_sector_.resize(s, frame_.logical_dim());
    for (int r = 0; r < s; ++r) frame_sector_.row(r) = frame_.basis.row(sector_[r]);
  }

  Topology topology() const { return topology_; }
  const LogicalFrame& frame() const { return frame_; }

  // d x d logical action of the sequence (steps applied in order).
  Eigen::MatrixXcd logical_action(std::span<const PulseStep> steps) const {
    const int s = static_cast<int>(sector_.size());
    Eigen::MatrixXcd cols = frame_sector_;
    Eigen::MatrixXd h(s, s);
    for (const auto& step : steps) {
      h.setZero();
      const auto terms = step.couplings.terms();
      for (std::size_t k = 0; k < terms.size(); ++k)
        if (terms[k].value != 0.0) h += terms[k].value * ops_[k];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
      const Eigen::VectorXcd phases =
          (std::complex<double>(0.0, -2.0 * std::numbers::pi * step.tau) *
           es.eigenvalues())
              .array()
              .exp();
      cols = es.eigenvectors() *
             (phases.asDiagonal() * (es.eigenvectors().transpose() * cols));
    }
    return frame_sector_.adjoint() * cols;
  }

  FidelityReport report(std::span<const PulseStep> steps,
                        const GateTarget& target) const {
    const Eigen::MatrixXcd m = logical_action(steps);
    const int d = frame_.logical_dim();
    FidelityReport r;
    r.fidelity =
        detail::clamp01(std::abs((target.matrix.adjoint() * m).trace()) / d);
    r.leakage = detail::clamp01(1.0 - (m.adjoint() * m).trace().real() / d);
    for (const auto& s : steps) r.total_tau += s.tau;
    return r;
  }

 private:
  Topology topology_;
  LogicalFrame frame_;
  std::vector<int> sector_;
  std::vector<Eigen::MatrixXd> ops_;
  Eigen::MatrixXcd frame_sector_;
};

// Full-space verification of a sequence against a target; this is the
// binding check every synthesized gate must pass.
inline FidelityReport verify_sequence(const PulseSequence& seq,
                                      const GateTarget& target,
                                      std::optional<double> jmax_uev = std::nullopt) {
  seq.validate();
  target.validate();
  const LogicalFrame frame = seq.topology == Topology::Single
                                 ? logical_frame_single()
                                 : logical_frame_two();
  FidelityReport r = gate_fidelity(sequence_unitary(seq), frame, target);
  r.total_tau = seq.total_tau();
  if (jmax_uev) r.physical_time_ns = duration_to_ns(r.total_tau, *jmax_uev);
  return r;
}

}  // namespace hqpulse
