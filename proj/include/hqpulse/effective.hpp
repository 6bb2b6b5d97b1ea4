#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hqpulse/hubbard.hpp"
#include "hqpulse/spin_space.hpp"
#include "hqpulse/topology.hpp"

namespace hqpulse {

// Per-qubit Heisenberg couplings, in units of J^max.
struct QubitCouplings {
  double j13 = 0.0, j23 = 0.0, j12 = 0.0;
};

// Complete coupling set for a topology. The two inter-qubit entries mean
//   ConfigA: inter[0] = J(3a,1b), inter[1] = J(3a,2b)
//   ConfigB: inter[0] = J(1a,1b), inter[1] = J(2a,2b)
// ConfigB's crossed couplings (1a,2b)/(2a,1b) are structurally zero and not
// represented.
struct ExchangeCouplings {
  Topology topology = Topology::Single;
  QubitCouplings a{}, b{};
  std::array<double, 2> inter{0.0, 0.0};

  struct Term {
    int i, j;      // spin labels (1..3 single, 1..6 two-qubit)
    double value;  // J in J^max units
  };

  // Canonical term order; every consumer (Hamiltonian builder, evolution,
  // serialization) iterates in this order.
  std::vector<Term> terms() const {
    std::vector<Term> out{{1, 3, a.j13}, {2, 3, a.j23}, {1, 2, a.j12}};
    if (topology == Topology::Single) return out;
    out.push_back({4, 6, b.j13});
    out.push_back({5, 6, b.j23});
    out.push_back({4, 5, b.j12});
    if (topology == Topology::ConfigA) {
      out.push_back({3, 4, inter[0]});
      out.push_back({3, 5, inter[1]});
    } else {
      out.push_back({1, 4, inter[0]});
      out.push_back({2, 5, inter[1]});
    }
    return out;
  }

  static ExchangeCouplings single(double j13, double j23, double j12) {
    ExchangeCouplings c;
    c.topology = Topology::Single;
    c.a = {j13, j23, j12};
    return c;
  }
};

// Raised when a charge-energy denominator vanishes; perturbation theory is
// meaningless there.
class DegenerateChargeSector : public std::runtime_error {
 public:
  DegenerateChargeSector(std::string which, double value)
      : std::runtime_error("degenerate charge sector: |" + which + "| = " +
                           std::to_string(value) + " below tolerance"),
        which_(std::move(which)),
        value_(value) {}

  const std::string& which() const { return which_; }
  double value() const { return value_; }

 private:
  std::string which_;
  double value_;
};

struct SingleCouplings {
  double j13 = 0.0, j23 = 0.0, j12 = 0.0;
  std::array<double, 4> delta_e{};  // dE1..dE4
};

struct TwoQubitCouplings {
  ExchangeCouplings couplings{};
  std::array<double, 4> delta_e_a{}, delta_e_b{};
  std::array<double, 2> delta_e_inter{};  // dE5, dE6 (config A only)
};

inline constexpr double kDegenerateTolerance = 1e-9;

namespace detail {

inline double checked(double de, const char* name, double tol) {
  if (std::abs(de) < tol) throw DegenerateChargeSector(name, de);
  return de;
}

inline double sq(double x) { return x * x; }

}  // namespace detail

// Perturbative couplings of one qubit. The superexchange pieces use the
// charge-transfer energies toward the doubly occupied interdot level; the
// intradot J12 has no tunneling contribution and is driven by Jt alone.
inline SingleCouplings couplings_single(const HubbardParams1Q& p,
                                        double tol = kDegenerateTolerance) {
  const double e0 = charge_energy(p, {1, 1, 1});
  SingleCouplings r;
  r.delta_e[0] = detail::checked(charge_energy(p, {0, 1, 2}) - e0, "dE1", tol);
  r.delta_e[1] = detail::checked(charge_energy(p, {1, 0, 2}) - e0, "dE2", tol);
  r.delta_e[2] = detail::checked(charge_energy(p, {2, 0, 1}) - e0, "dE3", tol);
  r.delta_e[3] = detail::checked(charge_energy(p, {0, 2, 1}) - e0, "dE4", tol);
  r.j13 = 4.0 * detail::sq(p.t13 - p.j13.Jt) / r.delta_e[0] - 2.0 * p.j13.Je;
  r.j23 = 4.0 * detail::sq(p.t23 - p.j23.Jt) / r.delta_e[1] - 2.0 * p.j23.Je;
  r.j12 = (1.0 / r.delta_e[2] + 1.0 / r.delta_e[3]) * 4.0 * detail::sq(p.j12.Jt) -
          2.0 * p.j12.Je;
  return r;
}

// Full coupling set for a coupled pair. Intra-qubit denominators are
// evaluated on the two-qubit charge formulas (they pick up inter-qubit
// Coulomb shifts); configuration B inter-couplings are first-order,
// -2 Je, with no denominator at all.
inline TwoQubitCouplings couplings_two(const HubbardParams2Q& p,
                                       double tol = kDegenerateTolerance) {
  const HubbardModel model = make_model(p);
  const auto energy = [&](std::array<int, 3> oa, std::array<int, 3> ob) {
    const std::array<int, 6> occ{oa[0], oa[1], oa[2], ob[0], ob[1], ob[2]};
    return charge_energy(model, occ);
  };
  const double e0 = energy({1, 1, 1}, {1, 1, 1});

  TwoQubitCouplings r;
  const std::array<std::array<int, 3>, 4> excited{
      {{0, 1, 2}, {1, 0, 2}, {2, 0, 1}, {0, 2, 1}}};
  for (int k = 0; k < 4; ++k) {
    const std::string na = "dE" + std::to_string(k + 1) + "a";
    const std::string nb = "dE" + std::to_string(k + 1) + "b";
    r.delta_e_a[k] =
        detail::checked(energy(excited[k], {1, 1, 1}) - e0, na.c_str(), tol);
    r.delta_e_b[k] =
        detail::checked(energy({1, 1, 1}, excited[k]) - e0, nb.c_str(), tol);
  }

  const auto qubit = [&](const HubbardParams1Q& q, const std::array<double, 4>& de) {
    QubitCouplings c;
    c.j13 = 4.0 * detail::sq(q.t13 - q.j13.Jt) / de[0] - 2.0 * q.j13.Je;
    c.j23 = 4.0 * detail::sq(q.t23 - q.j23.Jt) / de[1] - 2.0 * q.j23.Je;
    c.j12 = (1.0 / de[2] + 1.0 / de[3]) * 4.0 * detail::sq(q.j12.Jt) - 2.0 * q.j12.Je;
    return c;
  };

  r.couplings.topology = p.config;
  r.couplings.a = qubit(p.a, r.delta_e_a);
  r.couplings.b = qubit(p.b, r.delta_e_b);

  if (p.config == Topology::ConfigA) {
    r.delta_e_inter[0] =
        detail::checked(energy({1, 1, 2}, {0, 1, 1}) - e0, "dE5", tol);
    r.delta_e_inter[1] =
        detail::checked(energy({1, 1, 2}, {1, 0, 1}) - e0, "dE6", tol);
    r.couplings.inter[0] =
        4.0 * detail::sq(p.t_3a1b - p.j_3a1b.Jt) / r.delta_e_inter[0] -
        2.0 * p.j_3a1b.Je;
    r.couplings.inter[1] =
        4.0 * detail::sq(p.t_3a2b - p.j_3a2b.Jt) / r.delta_e_inter[1] -
        2.0 * p.j_3a2b.Je;
  } else {
    r.couplings.inter[0] = -2.0 * p.j_1a1b.Je;
    r.couplings.inter[1] = -2.0 * p.j_2a2b.Je;
  }
  return r;
}

// H = sum_ij J_ij S_i.S_j over the topology's pairs (8x8 or 64x64).
inline Eigen::MatrixXcd heisenberg_hamiltonian(const ExchangeCouplings& j) {
  const SpinRegister reg{n_spins(j.topology)};
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(reg.dim(), reg.dim());
  for (const auto& t : j.terms())
    if (t.value != 0.0) h += t.value * exchange_operator(reg, t.i, t.j);
  return h;
}

// One point of the detuning model: couplings plus the interdot energy
// offset that drags the |E> state through the logical doublet.
struct DetuningPoint {
  double eps = 0.0;
  double j12 = 0.0, j13 = 0.0, j23 = 0.0;
};

// Effective Hamiltonian in the {|0>,|1>,|E>} basis.
inline Eigen::Matrix3d h3x3(const DetuningPoint& p) {
  const double s3 = std::sqrt(3.0);
  Eigen::Matrix3d h;
  h(0, 0) = -0.75 * p.j12;
  h(0, 1) = -s3 / 4.0 * (p.j13 - p.j23);
  h(0, 2) = 3.0 / 8.0 * (p.j23 - p.j13 + p.j12);
  h(1, 0) = h(0, 1);
  h(1, 1) = 0.25 * p.j12 - 0.5 * (p.j13 + p.j23);
  h(1, 2) = -s3 / 8.0 * (p.j13 + 3.0 * p.j23 - p.j12);
  h(2, 0) = h(0, 2);
  h(2, 1) = h(1, 2);
  h(2, 2) = -0.75 * p.j23 - p.eps;
  return h;
}

enum class SweepScenario { BothOff, T13On, T23On };

inline std::string to_string(SweepScenario s) {
  switch (s) {
    case SweepScenario::BothOff: return "both-off";
    case SweepScenario::T13On: return "t13";
    case SweepScenario::T23On: return "t23";
  }
  throw std::logic_error("bad scenario");
}

inline SweepScenario scenario_from_string(const std::string& s) {
  if (s == "both-off") return SweepScenario::BothOff;
  if (s == "t13") return SweepScenario::T13On;
  if (s == "t23") return SweepScenario::T23On;
  throw std::invalid_argument("unknown scenario '" + s +
                              "' (expected both-off|t13|t23)");
}

struct SweepRow {
  double eps, lambda0, lambda1, lambda2;
};

// Eigenvalues of h3x3 along a detuning grid. Scenario fixes (J13,J23) to
// (0,0), (1,0) or (0,1) in J^max units; J12 is whatever the caller says.
inline std::vector<SweepRow> spectrum_sweep(const std::vector<double>& eps_grid,
                                            SweepScenario scenario, double j12) {
  if (eps_grid.empty())
    throw std::invalid_argument("spectrum_sweep: empty grid");
  for (std::size_t k = 1; k < eps_grid.size(); ++k)
    if (!(eps_grid[k] > eps_grid[k - 1]))
      throw std::invalid_argument("spectrum_sweep: grid must ascend");
  double j13 = 0.0, j23 = 0.0;
  if (scenario == SweepScenario::T13On) j13 = 1.0;
  if (scenario == SweepScenario::T23On) j23 = 1.0;
  std::vector<SweepRow> rows;
  rows.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(
        h3x3({eps, j12, j13, j23}), Eigen::EigenvaluesOnly);
    rows.push_back({eps, es.eigenvalues()(0), es.eigenvalues()(1),
                    es.eigenvalues()(2)});
  }
  return rows;
}

}  // namespace hqpulse
