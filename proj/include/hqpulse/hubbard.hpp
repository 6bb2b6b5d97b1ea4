#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hqpulse/topology.hpp"

namespace hqpulse {

// Exchange-family interaction strengths for one level pair: spin exchange,
// pair hopping, and occupation-modulated hopping.
struct PairInteraction {
  double Je = 0.0;
  double Jp = 0.0;
  double Jt = 0.0;

  double max_abs() const {
    return std::max({std::abs(Je), std::abs(Jp), std::abs(Jt)});
  }
};

// Microscopic parameters of one hybrid qubit: levels 1,2 in the doubly
// occupied dot, level 3 in the other. There is no direct 1-2 tunneling;
// that pair interacts only through its exchange family.
struct HubbardParams1Q {
  std::array<double, 3> eps{0.0, 0.0, 0.0};  // level energies
  double t13 = 0.0, t23 = 0.0;               // interdot tunneling
  std::array<double, 3> U{0.0, 0.0, 0.0};    // same-level Coulomb U1..U3
  double U12 = 0.0, U13 = 0.0, U23 = 0.0;    // interlevel Coulomb
  PairInteraction j13{}, j23{}, j12{};

  void validate() const {
    for (double u : {U[0], U[1], U[2], U12, U13, U23})
      if (u < 0.0) throw std::invalid_argument("hubbard: Coulomb energies must be >= 0");
    for (double x : {eps[0], eps[1], eps[2], t13, t23, U12, U13, U23})
      if (!std::isfinite(x)) throw std::invalid_argument("hubbard: parameter not finite");
  }

  double max_perturbation() const {
    return std::max({std::abs(t13), std::abs(t23), j13.max_abs(), j23.max_abs(),
                     j12.max_abs()});
  }

  // True when the coupling formulas are trustworthy: every perturbation is
  // small against the smallest same-level Coulomb energy.
  bool perturbative(double ratio = 0.1) const {
    const double umin = std::min({U[0], U[1], U[2]});
    return umin > 0.0 && max_perturbation() <= ratio * umin;
  }
};

// Parameters for a coupled pair of qubits. Configuration A joins spin 3 of
// qubit a to spins 1,2 of qubit b; configuration B joins like-indexed
// levels, and carries no (1a,2b)/(2a,1b) tunneling or exchange terms.
struct HubbardParams2Q {
  HubbardParams1Q a{}, b{};
  Topology config = Topology::ConfigA;

  // configuration A inter-qubit terms
  double t_3a1b = 0.0, t_3a2b = 0.0;
  double U_3a1b = 0.0, U_3a2b = 0.0;
  PairInteraction j_3a1b{}, j_3a2b{};

  // configuration B inter-qubit terms (Coulomb also on the crossed pairs)
  double t_1a1b = 0.0, t_2a2b = 0.0;
  double U_1a1b = 0.0, U_1a2b = 0.0, U_2a1b = 0.0, U_2a2b = 0.0;
  PairInteraction j_1a1b{}, j_2a2b{};

  void validate() const {
    if (config == Topology::Single)
      throw std::invalid_argument("hubbard: two-qubit config must be A or B");
    a.validate();
    b.validate();
    for (double u : {U_3a1b, U_3a2b, U_1a1b, U_1a2b, U_2a1b, U_2a2b})
      if (u < 0.0) throw std::invalid_argument("hubbard: Coulomb energies must be >= 0");
  }
};

// Level-resolved model description shared by the Fock-space builder and the
// classical charge-energy formula. Levels are indexed globally: 0,1,2 for
// qubit a and 3,4,5 for qubit b.
struct HubbardModel {
  struct Pair {
    int li, lj;                   // global level indices
    double t = 0.0;               // tunneling amplitude
    PairInteraction j{};          // exchange family
    std::vector<int> spectators;  // levels whose occupation modulates the Jt hop
  };

  int n_levels = 3;
  std::vector<double> eps;                          // per level
  std::vector<double> level_u;                      // same-level Coulomb
  std::vector<std::array<double, 3>> density_u;     // {li, lj, U} as doubles
  std::vector<Pair> pairs;
};

namespace detail {

inline void add_density_u(HubbardModel& m, int li, int lj, double u) {
  m.density_u.push_back({static_cast<double>(li), static_cast<double>(lj), u});
}

inline std::vector<int> spectators_within(std::span<const int> levels, int li, int lj) {
  std::vector<int> out;
  for (int k : levels)
    if (k != li && k != lj) out.push_back(k);
  return out;
}

inline void add_qubit_terms(HubbardModel& m, const HubbardParams1Q& p, int off) {
  const std::array<int, 3> lv{off + 0, off + 1, off + 2};
  for (int k = 0; k < 3; ++k) {
    m.eps[lv[k]] = p.eps[k];
    m.level_u[lv[k]] = p.U[k];
  }
  add_density_u(m, lv[0], lv[1], p.U12);
  add_density_u(m, lv[0], lv[2], p.U13);
  add_density_u(m, lv[1], lv[2], p.U23);
  m.pairs.push_back({lv[0], lv[2], p.t13, p.j13, {lv[1]}});
  m.pairs.push_back({lv[1], lv[2], p.t23, p.j23, {lv[0]}});
  m.pairs.push_back({lv[0], lv[1], 0.0, p.j12, {lv[2]}});
}

}  // namespace detail

inline HubbardModel make_model(const HubbardParams1Q& p) {
  p.validate();
  HubbardModel m;
  m.n_levels = 3;
  m.eps.assign(3, 0.0);
  m.level_u.assign(3, 0.0);
  detail::add_qubit_terms(m, p, 0);
  return m;
}

inline HubbardModel make_model(const HubbardParams2Q& p) {
  p.validate();
  HubbardModel m;
  m.n_levels = 6;
  m.eps.assign(6, 0.0);
  m.level_u.assign(6, 0.0);
  detail::add_qubit_terms(m, p.a, 0);
  detail::add_qubit_terms(m, p.b, 3);
  const std::array<int, 6> all{0, 1, 2, 3, 4, 5};
  if (p.config == Topology::ConfigA) {
    detail::add_density_u(m, 2, 3, p.U_3a1b);
    detail::add_density_u(m, 2, 4, p.U_3a2b);
    m.pairs.push_back({2, 3, p.t_3a1b, p.j_3a1b, detail::spectators_within(all, 2, 3)});
    m.pairs.push_back({2, 4, p.t_3a2b, p.j_3a2b, detail::spectators_within(all, 2, 4)});
  } else {
    detail::add_density_u(m, 0, 3, p.U_1a1b);
    detail::add_density_u(m, 0, 4, p.U_1a2b);
    detail::add_density_u(m, 1, 3, p.U_2a1b);
    detail::add_density_u(m, 1, 4, p.U_2a2b);
    m.pairs.push_back({0, 3, p.t_1a1b, p.j_1a1b, detail::spectators_within(all, 0, 3)});
    m.pairs.push_back({1, 4, p.t_2a2b, p.j_2a2b, detail::spectators_within(all, 1, 4)});
  }
  return m;
}

// Classical charge energy of a level-occupation assignment: the diagonal of
// the model with every hopping and exchange term removed. This single
// formula reproduces the published E_(ijk,...) series for both
// configurations (occupation products for the Coulomb terms, plus U_k for
// each doubly occupied level).
inline double charge_energy(const HubbardModel& m, std::span<const int> occ) {
  if (static_cast<int>(occ.size()) != m.n_levels)
    throw std::invalid_argument("charge_energy: wrong occupation length");
  int total = 0;
  for (int n : occ) {
    if (n < 0 || n > 2) throw std::invalid_argument("charge_energy: occupation out of range");
    total += n;
  }
  if (total != 3 * (m.n_levels / 3))
    throw std::invalid_argument("charge_energy: total electron number must be 3 per qubit");
  double e = 0.0;
  for (int k = 0; k < m.n_levels; ++k) {
    e += occ[k] * m.eps[k];
    if (occ[k] == 2) e += m.level_u[k];
  }
  for (const auto& du : m.density_u)
    e += occ[static_cast<int>(du[0])] * occ[static_cast<int>(du[1])] * du[2];
  return e;
}

inline double charge_energy(const HubbardParams1Q& p, std::array<int, 3> occ) {
  return charge_energy(make_model(p), occ);
}

inline double charge_energy(const HubbardParams2Q& p, std::array<int, 3> occ_a,
                            std::array<int, 3> occ_b) {
  const std::array<int, 6> occ{occ_a[0], occ_a[1], occ_a[2],
                               occ_b[0], occ_b[1], occ_b[2]};
  return charge_energy(make_model(p), occ);
}

// Spin-orbital ordering convention. Interleaved (1up,1dn,2up,2dn,...) is the
// documented default; the blocked alternative exists to check that the
// fermionic sign bookkeeping is ordering-independent.
enum class ModeOrder { SpinInterleaved, SpinBlocked };

struct FockBlock {
  int n_modes = 0;
  int n_electrons = 0;
  std::optional<double> sz;
  std::vector<std::uint32_t> basis;  // occupation bitmasks, ascending
  Eigen::MatrixXd hamiltonian;

  int dim() const { return static_cast<int>(basis.size()); }
};

namespace detail {

struct FermionOp {
  int mode;
  bool create;
};

// Applies a product of fermion operators (rightmost acts first) to a basis
// state. Sign convention: (-1)^(occupied modes below the acted mode).
// Returns 0 if the product annihilates the state.
inline int apply_product(std::uint32_t& s, std::span<const FermionOp> ops) {
  int sign = 1;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    const std::uint32_t bit = 1u << it->mode;
    const bool occ = s & bit;
    if (it->create == occ) return 0;
    if (std::popcount(s & (bit - 1)) & 1) sign = -sign;
    s ^= bit;
  }
  return sign;
}

class FockSpace {
 public:
  FockSpace(int n_levels, int n_electrons, std::optional<double> sz, ModeOrder order)
      : n_levels_(n_levels), n_modes_(2 * n_levels), order_(order) {
    const std::uint32_t end = 1u << n_modes_;
    for (std::uint32_t s = 0; s < end; ++s) {
      if (std::popcount(s) != n_electrons) continue;
      if (sz && std::abs(sz_of(s) - *sz) > 1e-9) continue;
      basis_.push_back(s);
    }
  }

  // spin: 0 = up, 1 = down
  int mode(int level, int spin) const {
    return order_ == ModeOrder::SpinInterleaved ? 2 * level + spin
                                                : level + spin * n_levels_;
  }

  double sz_of(std::uint32_t s) const {
    int up = 0;
    for (int l = 0; l < n_levels_; ++l)
      if (s & (1u << mode(l, 0))) ++up;
    return up - 0.5 * std::popcount(s);
  }

  int index_of(std::uint32_t s) const {
    const auto it = std::lower_bound(basis_.begin(), basis_.end(), s);
    return static_cast<int>(it - basis_.begin());
  }

  const std::vector<std::uint32_t>& basis() const { return basis_; }
  int n_modes() const { return n_modes_; }

 private:
  int n_levels_, n_modes_;
  ModeOrder order_;
  std::vector<std::uint32_t> basis_;
};

inline FockBlock build_block(const HubbardModel& model, int n_electrons,
                             std::optional<double> sz, ModeOrder order) {
  const FockSpace space(model.n_levels, n_electrons, sz, order);
  const int dim = static_cast<int>(space.basis().size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);

  const auto occ = [&](std::uint32_t s, int level, int spin) -> int {
    return (s >> space.mode(level, spin)) & 1u;
  };
  const auto add = [&](std::uint32_t s_in, int col, double amp,
                       std::initializer_list<FermionOp> ops) {
    if (amp == 0.0) return;
    std::uint32_t s = s_in;
    const int sign = apply_product(s, std::span<const FermionOp>(ops.begin(), ops.size()));
    if (sign) h(space.index_of(s), col) += sign * amp;
  };

  for (int col = 0; col < dim; ++col) {
    const std::uint32_t s = space.basis()[col];

    // level energies and Coulomb terms (diagonal)
    double diag = 0.0;
    for (int l = 0; l < model.n_levels; ++l) {
      const int n = occ(s, l, 0) + occ(s, l, 1);
      diag += model.eps[l] * n;
      diag += model.level_u[l] * occ(s, l, 0) * occ(s, l, 1);
    }
    for (const auto& du : model.density_u) {
      const int li = static_cast<int>(du[0]), lj = static_cast<int>(du[1]);
      diag += du[2] * (occ(s, li, 0) + occ(s, li, 1)) * (occ(s, lj, 0) + occ(s, lj, 1));
    }

    for (const auto& pr : model.pairs) {
      const int i = pr.li, j = pr.lj;
      // density-density part of the spin exchange
      diag += -pr.j.Je * (occ(s, i, 0) * occ(s, j, 0) + occ(s, i, 1) * occ(s, j, 1));

      for (int spin = 0; spin < 2; ++spin) {
        // tunneling, both directions
        add(s, col, pr.t, {{space.mode(i, spin), true}, {space.mode(j, spin), false}});
        add(s, col, pr.t, {{space.mode(j, spin), true}, {space.mode(i, spin), false}});
        // occupation-modulated hopping: spectator density of spin `spin`
        // gates a hop of the opposite spin
        int nk = 0;
        for (int k : pr.spectators) nk += occ(s, k, spin);
        const double amp = -pr.j.Jt * nk;
        const int sb = 1 - spin;
        add(s, col, amp, {{space.mode(i, sb), true}, {space.mode(j, sb), false}});
        add(s, col, amp, {{space.mode(j, sb), true}, {space.mode(i, sb), false}});
      }

      // spin-flip part of the exchange: -Je c+_{i dn} c+_{j up} c_{j dn} c_{i up} + h.c.
      add(s, col, -pr.j.Je,
          {{space.mode(i, 1), true}, {space.mode(j, 0), true},
           {space.mode(j, 1), false}, {space.mode(i, 0), false}});
      add(s, col, -pr.j.Je,
          {{space.mode(i, 0), true}, {space.mode(j, 1), true},
           {space.mode(j, 0), false}, {space.mode(i, 1), false}});

      // pair hopping: -Jp c+_{j up} c+_{j dn} c_{i up} c_{i dn} + h.c.
      add(s, col, -pr.j.Jp,
          {{space.mode(j, 0), true}, {space.mode(j, 1), true},
           {space.mode(i, 0), false}, {space.mode(i, 1), false}});
      add(s, col, -pr.j.Jp,
          {{space.mode(i, 0), true}, {space.mode(i, 1), true},
           {space.mode(j, 0), false}, {space.mode(j, 1), false}});
    }

    h(col, col) += diag;
  }

  return {space.n_modes(), n_electrons, sz, space.basis(), std::move(h)};
}

}  // namespace detail

// Full 20-dimensional block of one qubit (3 electrons in 6 spin-orbitals),
// or the 9-dimensional S_z=-1/2 block when restricted.
inline FockBlock build_single(const HubbardParams1Q& params,
                              std::optional<double> sz = std::nullopt,
                              ModeOrder order = ModeOrder::SpinInterleaved) {
  return detail::build_block(make_model(params), 3, sz, order);
}

// Coupled pair: 6 electrons in 12 spin-orbitals; the S_z=-1 restriction
// gives the 225-dimensional block used by the oracle comparisons.
inline FockBlock build_two(const HubbardParams2Q& params,
                           std::optional<double> sz = std::nullopt,
                           ModeOrder order = ModeOrder::SpinInterleaved) {
  return detail::build_block(make_model(params), 6, sz, order);
}

// k lowest eigenvalues, ascending, degenerate values repeated.
inline std::vector<double> exact_spectrum(const FockBlock& block, int k) {
  if (k < 0 || k > block.dim())
    throw std::invalid_argument("exact_spectrum: k out of range");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block.hamiltonian,
                                                    Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + k);
}

}  // namespace hqpulse
