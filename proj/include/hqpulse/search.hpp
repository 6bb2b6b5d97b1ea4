#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hqpulse/evolve.hpp"
#include "hqpulse/rng.hpp"
#include "hqpulse/topology.hpp"

namespace hqpulse {

enum class CouplingMode { Binary, Continuous };

struct SearchConfig {
  int population_size = 64;
  int max_generations = 2000;
  double mutation_sigma_tau = 0.1;
  double coupling_mutation_prob = 0.05;
  // Small Gaussian nudges on couplings (continuous mode). Uniform redraws
  // alone explore but cannot fine-tune; without creep the two-qubit
  // searches plateau around 5e-3 infidelity.
  double coupling_creep_prob = 0.15;
  double coupling_creep_sigma = 0.02;
  int elite_count = 2;
  int simplex_period = 50;
  int simplex_max_iters = 200;
  double fidelity_goal = 1.0 - 1e-4;
  double leakage_goal = 1e-6;
  int max_steps = 0;  // 0 = topology default: 8 single-qubit, 20 two-qubit
  double tau_max = 2.0;
  std::uint64_t rng_seed = 0;
  CouplingMode coupling_mode = CouplingMode::Continuous;
  double j12_frozen = 0.5;
  double leak_weight = 1.0;   // w_L in the fitness
  double time_weight = 1e-4;  // w_T in the fitness
  // Abandon a step count once the incumbent has stopped improving for this
  // many generations; the outer loop then grows the sequence.
  int stall_generations = 250;
  std::ostream* progress = nullptr;

  int resolved_max_steps(Topology t) const {
    if (max_steps > 0) return max_steps;
    return t == Topology::Single ? 8 : 20;
  }

  void validate() const {
    if (population_size < 3 || max_generations < 1 || elite_count < 1 ||
        elite_count >= population_size || simplex_period < 1 || simplex_max_iters < 0)
      throw std::invalid_argument("search config: counts must be positive");
    if (!(fidelity_goal > 0.0 && fidelity_goal < 1.0) ||
        !(leakage_goal > 0.0 && leakage_goal < 1.0))
      throw std::invalid_argument("search config: goals must lie in (0,1)");
    if (!(tau_max > 0.0))
      throw std::invalid_argument("search config: tau_max must be > 0");
    if (!(j12_frozen >= 0.0 && j12_frozen <= 1.0))
      throw std::invalid_argument("search config: j12 must lie in [0,1]");
  }
};

// Fixed-length genome: one tau plus one tunable-coupling vector per step.
// The frozen J12 is not encoded; it is injected on decode.
struct Chromosome {
  std::vector<double> tau;
  std::vector<std::vector<double>> couplings;  // [step][tunable]
  double fitness = std::numeric_limits<double>::infinity();
  double f = 0.0;  // logical fidelity
  double l = 1.0;  // leakage
  bool evaluated = false;

  int steps() const { return static_cast<int>(tau.size()); }
};

struct SynthesisResult {
  PulseSequence sequence;
  bool goal_met = false;
  double fidelity = 0.0;
  double leakage = 0.0;
  int steps = 0;
  long generations = 0;
};

namespace detail {

inline int tunable_count(Topology t) { return t == Topology::Single ? 2 : 6; }

inline ExchangeCouplings decode_step(Topology t, double j12,
                                     std::span<const double> g) {
  ExchangeCouplings c;
  c.topology = t;
  c.a = {g[0], g[1], j12};
  if (t != Topology::Single) {
    c.b = {g[2], g[3], j12};
    c.inter = {g[4], g[5]};
  }
  return c;
}

struct NelderMeadResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

// Nelder-Mead with reflection/expansion/contraction/shrink coefficients
// (1, 2, 0.5, 0.5), box-clamped to per-dimension [lo, hi]. Tracks the best
// vertex ever seen, so the returned value never exceeds f(x0).
template <typename F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0,
                             const std::vector<double>& step,
                             const std::vector<double>& lo,
                             const std::vector<double>& hi, int max_iters,
                             double ftol = 1e-13) {
  const int n = static_cast<int>(x0.size());
  const auto clamp_vec = [&](std::vector<double>& v) {
    for (int i = 0; i < n; ++i) v[i] = std::clamp(v[i], lo[i], hi[i]);
  };
  clamp_vec(x0);

  std::vector<std::vector<double>> xs(n + 1, x0);
  for (int i = 0; i < n; ++i) {
    double h = step[i];
    if (x0[i] + h > hi[i]) h = -step[i];
    xs[i + 1][i] = std::clamp(x0[i] + h, lo[i], hi[i]);
  }
  std::vector<double> fs(n + 1);
  for (int i = 0; i <= n; ++i) fs[i] = f(xs[i]);

  NelderMeadResult best;
  const auto note = [&](const std::vector<double>& x, double v) {
    if (v < best.value) {
      best.value = v;
      best.x = x;
    }
  };
  for (int i = 0; i <= n; ++i) note(xs[i], fs[i]);

  std::vector<int> order(n + 1);
  int it = 0;
  for (; it < max_iters; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fs[a] < fs[b]; });
    double diameter = 0.0;
    for (int k = 1; k <= n; ++k)
      for (int d = 0; d < n; ++d)
        diameter = std::max(diameter,
                            std::abs(xs[order[k]][d] - xs[order[0]][d]));
    if (fs[order[n]] - fs[order[0]] < ftol && diameter < 1e-9) break;

    std::vector<double> centroid(n, 0.0);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) centroid[i] += xs[order[k]][i];
    for (double& c : centroid) c /= n;

    const int worst = order[n];
    const auto blend = [&](double coef) {
      std::vector<double> x(n);
      for (int i = 0; i < n; ++i)
        x[i] = centroid[i] + coef * (centroid[i] - xs[worst][i]);
      clamp_vec(x);
      return x;
    };

    std::vector<double> xr = blend(1.0);
    const double fr = f(xr);
    note(xr, fr);

    if (fr < fs[order[0]]) {
      std::vector<double> xe = blend(2.0);
      const double fe = f(xe);
      note(xe, fe);
      if (fe < fr) {
        xs[worst] = std::move(xe);
        fs[worst] = fe;
      } else {
        xs[worst] = std::move(xr);
        fs[worst] = fr;
      }
      continue;
    }
    if (fr < fs[order[n - 1]]) {
      xs[worst] = std::move(xr);
      fs[worst] = fr;
      continue;
    }
    std::vector<double> xc = blend(fr < fs[worst] ? 0.5 : -0.5);
    const double fc = f(xc);
    note(xc, fc);
    if (fc < std::min(fr, fs[worst])) {
      xs[worst] = std::move(xc);
      fs[worst] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (int k = 1; k <= n; ++k) {
      const int i = order[k];
      for (int d = 0; d < n; ++d)
        xs[i][d] = xs[order[0]][d] + 0.5 * (xs[i][d] - xs[order[0]][d]);
      clamp_vec(xs[i]);
      fs[i] = f(xs[i]);
      note(xs[i], fs[i]);
    }
  }
  best.iterations = it;
  return best;
}

}  // namespace detail

// Search driver for one target gate. Outer loop grows the step count;
// inside, a generational GA (tournament selection, single-point crossover,
// Gaussian tau mutation, uniform coupling redraw, elitism) is interleaved
// with Nelder-Mead refinement of the incumbent's durations.
class Synthesizer {
 public:
  Synthesizer(GateTarget target, Topology topology, SearchConfig cfg)
      : target_(std::move(target)),
        topology_(topology),
        cfg_(cfg),
        evaluator_(topology) {
    cfg_.validate();
    target_.validate();
    if (target_.matrix.rows() != logical_dim(topology))
      throw std::invalid_argument(
          "synthesize: target dimension does not match topology");
  }

  double fitness_of(Chromosome& c) const {
    if (!c.evaluated) {
      const auto steps = decode(c);
      const FidelityReport r = evaluator_.report(steps, target_);
      c.f = r.fidelity;
      c.l = r.leakage;
      c.fitness = 1.0 - r.fidelity + cfg_.leak_weight * r.leakage +
                  cfg_.time_weight * r.total_tau;
      c.evaluated = true;
    }
    return c.fitness;
  }

  std::vector<PulseStep> decode(const Chromosome& c) const {
    std::vector<PulseStep> steps(c.steps());
    for (int k = 0; k < c.steps(); ++k)
      steps[k] = {c.tau[k],
                  detail::decode_step(topology_, cfg_.j12_frozen, c.couplings[k])};
    return steps;
  }

  PulseSequence to_sequence(const Chromosome& c) const {
    PulseSequence seq;
    seq.topology = topology_;
    seq.j12_frozen = cfg_.j12_frozen;
    seq.steps = decode(c);
    seq.gate = target_.name;
    seq.seed = cfg_.rng_seed;
    return seq;
  }

  // Nelder-Mead over the tau vector, couplings held fixed. The initial
  // simplex shrinks as the incumbent improves so late polishes do not waste
  // iterations re-contracting.
  Chromosome refine_taus(const Chromosome& c, int max_iters) const {
    Chromosome out = c;
    const auto objective = [&](const std::vector<double>& taus) {
      Chromosome probe = c;
      probe.tau = taus;
      probe.evaluated = false;
      return fitness_of(probe);
    };
    const double scale =
        c.evaluated ? std::clamp(std::sqrt(std::max(c.fitness, 0.0)), 0.01, 0.05)
                    : 0.05;
    const int n = c.steps();
    const std::vector<double> step(n, scale * cfg_.tau_max);
    const std::vector<double> lo(n, 0.0), hi(n, cfg_.tau_max);
    const auto r = detail::nelder_mead(objective, c.tau, step, lo, hi, max_iters);
    if (r.value < fitness_of(out)) {
      out.tau = r.x;
      out.evaluated = false;
      fitness_of(out);
    }
    return out;
  }

  // Block-coordinate polish: Nelder-Mead over each step's (tau, couplings)
  // block in turn. The duration-only simplex cannot remove coupling-space
  // error, and the leakage goal needs convergence far beyond what the
  // genetic operators deliver; this closes the last orders of magnitude
  // once the GA has found the basin.
  Chromosome polish_blocks(const Chromosome& c, int iters_per_block,
                           int max_rounds) const {
    if (cfg_.coupling_mode == CouplingMode::Binary)
      return refine_taus(c, iters_per_block);
    Chromosome best = c;
    fitness_of(best);
    const int n = best.steps();
    const int m = detail::tunable_count(topology_);
    std::vector<double> lo(1 + m, 0.0), hi(1 + m, 1.0);
    hi[0] = cfg_.tau_max;
    for (int round = 0; round < max_rounds; ++round) {
      const double before = best.fitness;
      for (int k = 0; k < n; ++k) {
        std::vector<double> x0{best.tau[k]};
        x0.insert(x0.end(), best.couplings[k].begin(), best.couplings[k].end());
        const double scale =
            std::clamp(std::sqrt(std::max(best.fitness, 1e-16)), 3e-4, 0.05);
        std::vector<double> step(1 + m, scale);
        step[0] = scale * cfg_.tau_max;
        const auto objective = [&](const std::vector<double>& x) {
          Chromosome probe = best;
          probe.tau[k] = x[0];
          for (int q = 0; q < m; ++q) probe.couplings[k][q] = x[1 + q];
          probe.evaluated = false;
          return fitness_of(probe);
        };
        const auto r =
            detail::nelder_mead(objective, x0, step, lo, hi, iters_per_block);
        if (r.value < best.fitness - 1e-16) {
          best.tau[k] = r.x[0];
          for (int q = 0; q < m; ++q) best.couplings[k][q] = r.x[1 + q];
          best.evaluated = false;
          fitness_of(best);
        }
      }
      if (best.fitness > before - 1e-14) break;
    }
    return best;
  }

  bool meets_goal(const Chromosome& c) const {
    return c.evaluated && c.f >= cfg_.fidelity_goal && c.l <= cfg_.leakage_goal;
  }

  SynthesisResult run() {
    const int max_steps = cfg_.resolved_max_steps(topology_);
    Chromosome global_best;
    std::optional<Chromosome> carry;
    long generations = 0;

    for (int n = 1; n <= max_steps; ++n) {
      auto outcome = run_step_count(n, carry, generations);
      if (outcome.evaluated &&
          (!global_best.evaluated || outcome.fitness < global_best.fitness))
        global_best = outcome;
      if (meets_goal(outcome)) return finish(outcome, true, generations);
      carry = outcome;
    }
    return finish(global_best, false, generations);
  }

 private:
  Chromosome random_chromosome(int n, rng::Stream& st) const {
    Chromosome c;
    c.tau.resize(n);
    c.couplings.assign(n, std::vector<double>(detail::tunable_count(topology_)));
    for (int k = 0; k < n; ++k) {
      c.tau[k] = st.uniform(0.0, cfg_.tau_max);
      for (double& j : c.couplings[k]) j = random_coupling(st);
    }
    return c;
  }

  double random_coupling(rng::Stream& st) const {
    if (cfg_.coupling_mode == CouplingMode::Binary)
      return st.uniform() < 0.5 ? 0.0 : 1.0;
    return st.uniform();
  }

  // Extends a shorter incumbent by one random step at a random position;
  // used to warm-start the next step count.
  Chromosome extended(const Chromosome& base, int n, rng::Stream& st) const {
    Chromosome c = base;
    c.evaluated = false;
    c.fitness = std::numeric_limits<double>::infinity();
    while (c.steps() < n) {
      const int pos = static_cast<int>(st.uniform_int(c.steps() + 1));
      std::vector<double> j(detail::tunable_count(topology_));
      for (double& x : j) x = random_coupling(st);
      c.tau.insert(c.tau.begin() + pos, st.uniform(0.0, cfg_.tau_max));
      c.couplings.insert(c.couplings.begin() + pos, std::move(j));
    }
    return c;
  }

  int tournament(const std::vector<Chromosome>& pop, rng::Stream& st) const {
    int best = -1;
    for (int k = 0; k < 3; ++k) {
      const int i = static_cast<int>(st.uniform_int(pop.size()));
      if (best < 0 || pop[i].fitness < pop[best].fitness ||
          (pop[i].fitness == pop[best].fitness && i < best))
        best = i;
    }
    return best;
  }

  Chromosome make_child(const std::vector<Chromosome>& pop, int n,
                        rng::Stream& st) const {
    const Chromosome& p1 = pop[tournament(pop, st)];
    const Chromosome& p2 = pop[tournament(pop, st)];
    Chromosome child = p1;
    child.evaluated = false;
    child.fitness = std::numeric_limits<double>::infinity();
    if (n >= 2 && st.uniform() < 0.9) {
      const int cut = 1 + static_cast<int>(st.uniform_int(n - 1));
      for (int k = cut; k < n; ++k) {
        child.tau[k] = p2.tau[k];
        child.couplings[k] = p2.couplings[k];
      }
    }
    for (int k = 0; k < n; ++k) {
      child.tau[k] = std::clamp(child.tau[k] + st.gaussian(cfg_.mutation_sigma_tau),
                                0.0, cfg_.tau_max);
      for (double& j : child.couplings[k]) {
        if (st.uniform() < cfg_.coupling_mutation_prob) j = random_coupling(st);
        if (cfg_.coupling_mode == CouplingMode::Continuous &&
            st.uniform() < cfg_.coupling_creep_prob)
          j = std::clamp(j + st.gaussian(cfg_.coupling_creep_sigma), 0.0, 1.0);
      }
    }
    return child;
  }

  void log_progress(long gen, const Chromosome& best) const {
    if (cfg_.progress)
      *cfg_.progress << gen << ',' << best.fitness << ',' << best.f << ','
                     << best.l << '\n';
  }

  Chromosome run_step_count(int n, const std::optional<Chromosome>& carry,
                            long& generations) {
    const std::uint64_t phase = static_cast<std::uint64_t>(n) << 40;

    std::vector<Chromosome> pop(cfg_.population_size);
    for (int i = 0; i < cfg_.population_size; ++i) {
      rng::Stream st(cfg_.rng_seed, phase, static_cast<std::uint64_t>(i));
      if (carry && i % 4 == 0)
        pop[i] = extended(*carry, n, st);
      else
        pop[i] = random_chromosome(n, st);
      fitness_of(pop[i]);
    }

    Chromosome incumbent = *std::min_element(
        pop.begin(), pop.end(),
        [](const Chromosome& a, const Chromosome& b) { return a.fitness < b.fitness; });
    long last_improvement = 0;

    for (long gen = 1; gen <= cfg_.max_generations; ++gen) {
      ++generations;
      if (meets_goal(incumbent)) break;

      std::vector<int> order(pop.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return pop[a].fitness < pop[b].fitness;
      });

      std::vector<Chromosome> next;
      next.reserve(pop.size());
      for (int e = 0; e < cfg_.elite_count; ++e) next.push_back(pop[order[e]]);
      for (int i = cfg_.elite_count; i < cfg_.population_size; ++i) {
        rng::Stream st(cfg_.rng_seed, phase | static_cast<std::uint64_t>(gen),
                       static_cast<std::uint64_t>(i));
        next.push_back(make_child(pop, n, st));
        fitness_of(next.back());
      }
      pop = std::move(next);

      const Chromosome& gen_best = *std::min_element(
          pop.begin(), pop.end(),
          [](const Chromosome& a, const Chromosome& b) { return a.fitness < b.fitness; });
      if (gen_best.fitness < incumbent.fitness - 1e-15) {
        incumbent = gen_best;
        last_improvement = gen;
      }

      if (gen % cfg_.simplex_period == 0) {
        Chromosome refined = refine_taus(incumbent, cfg_.simplex_max_iters);
        if (refined.fitness < 0.05)
          refined = polish_blocks(refined,
                                  std::max(cfg_.simplex_max_iters / 3, 50), 1);
        if (refined.fitness < incumbent.fitness - 1e-15) {
          incumbent = refined;
          last_improvement = gen;
          pop[0] = incumbent;  // feed the refinement back into the population
        }
      }

      log_progress(generations, incumbent);
      if (meets_goal(incumbent)) break;
      if (gen - last_improvement > cfg_.stall_generations) {
        // one serious closing attempt before giving up on this step count
        if (incumbent.fitness < 0.05) {
          Chromosome push =
              polish_blocks(incumbent, 2 * cfg_.simplex_max_iters, 8);
          if (push.fitness < incumbent.fitness - 1e-15) {
            incumbent = push;
            last_improvement = gen;
            pop[0] = incumbent;
            if (meets_goal(incumbent)) break;
            continue;
          }
        }
        break;
      }
    }
    return incumbent;
  }

  SynthesisResult finish(Chromosome best, bool goal_met, long generations) {
    if (goal_met) {
      // Final polish; only accepted if the goals still hold.
      Chromosome polished = refine_taus(best, cfg_.simplex_max_iters);
      polished = polish_blocks(polished, cfg_.simplex_max_iters, 2);
      if (meets_goal(polished) && polished.fitness <= best.fitness)
        best = polished;
    }
    SynthesisResult result;
    result.sequence = to_sequence(best);
    // Re-verify through the full-space path: the reported numbers are never
    // the search's own estimate.
    const FidelityReport check = verify_sequence(result.sequence, target_);
    result.fidelity = check.fidelity;
    result.leakage = check.leakage;
    result.goal_met = goal_met && check.fidelity >= cfg_.fidelity_goal &&
                      check.leakage <= cfg_.leakage_goal;
    result.sequence.fidelity = check.fidelity;
    result.steps = static_cast<int>(result.sequence.steps.size());
    result.generations = generations;
    return result;
  }

  GateTarget target_;
  Topology topology_;
  SearchConfig cfg_;
  LogicalActionEvaluator evaluator_;
};

inline SynthesisResult synthesize(const GateTarget& target, Topology topology,
                                  const SearchConfig& cfg) {
  return Synthesizer(target, topology, cfg).run();
}

// Standalone fitness of a chromosome, matching the synthesizer's objective.
inline double fitness(const Chromosome& c, const GateTarget& target,
                      Topology topology, const SearchConfig& cfg) {
  Chromosome copy = c;
  copy.evaluated = false;
  return Synthesizer(target, topology, cfg).fitness_of(copy);
}

// Nelder-Mead polish of a sequence's durations (couplings fixed).
inline PulseSequence refine(const PulseSequence& seq, const GateTarget& target,
                            const SearchConfig& cfg) {
  seq.validate();
  SearchConfig local = cfg;
  local.j12_frozen = seq.j12_frozen;
  Synthesizer syn(target, seq.topology, local);
  Chromosome c;
  for (const auto& step : seq.steps) {
    c.tau.push_back(step.tau);
    std::vector<double> g{step.couplings.a.j13, step.couplings.a.j23};
    if (seq.topology != Topology::Single) {
      g.push_back(step.couplings.b.j13);
      g.push_back(step.couplings.b.j23);
      g.push_back(step.couplings.inter[0]);
      g.push_back(step.couplings.inter[1]);
    }
    c.couplings.push_back(std::move(g));
  }
  syn.fitness_of(c);
  const Chromosome refined = syn.refine_taus(c, cfg.simplex_max_iters);
  PulseSequence out = syn.to_sequence(refined);
  out.gate = seq.gate;
  out.seed = seq.seed;
  out.fidelity = verify_sequence(out, target).fidelity;
  return out;
}

}  // namespace hqpulse
