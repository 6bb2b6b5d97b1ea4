// Command-line front end: gate-sequence synthesis, verification, effective
// couplings, detuning spectra, and physical-time conversion.
//
// Exit codes: 0 success, 1 usage or validation error, 2 synthesis goal not
// met (best-effort sequence still written), 3 verification below goal,
// 4 degenerate charge sector.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hqpulse/json_io.hpp"
#include "hqpulse/search.hpp"
#include "hqpulse/version.hpp"

namespace {

using namespace hqpulse;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitGoalNotMet = 2;
constexpr int kExitVerifyFailed = 3;
constexpr int kExitDegenerate = 4;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  }
};

GateTarget resolve_gate(const std::string& gate, Topology topology) {
  if (gate == "hadamard") return GateTarget::hadamard();
  if (gate == "pi8") return GateTarget::pi8();
  if (gate == "cnot") return GateTarget::cnot();
  if (gate == "identity") return GateTarget::identity(logical_dim(topology));
  if (std::filesystem::exists(gate))
    return gate_from_json(json::parse(read_file(gate)));
  throw std::invalid_argument("unknown gate '" + gate +
                              "' (expected hadamard|pi8|cnot|identity or a gate file)");
}

json manifest_json(const std::string& command, json config, std::uint64_t seed,
                   const std::vector<std::string>& inputs, double wall_ms) {
  RunManifest m;
  m.command = command;
  m.config = std::move(config);
  m.seed = seed;
  for (const auto& path : inputs) m.input_hashes[path] = fnv1a64_hex(read_file(path));
  m.wall_ms = wall_ms;
  return to_json(m);
}

// --- synthesize -------------------------------------------------------------

struct SynthesizeArgs {
  std::string gate;
  std::string topology = "single";
  std::string out;
  std::uint64_t seed = 0;
  double fmin = 1.0 - 1e-4;
  double lmax = 1e-6;
  int max_steps = 0;
  double tau_max = 2.0;
  double j12 = 0.5;
  std::string coupling_mode = "continuous";
  int population = 64;
  int generations = 2000;
  int simplex_period = 50;
  int simplex_iters = 200;
  int stall = 250;
  double mutation_sigma = 0.1;
  double coupling_mutation_prob = 0.05;
  double coupling_creep_prob = 0.15;
  double coupling_creep_sigma = 0.02;
  bool progress = false;
};

int run_synthesize(const SynthesizeArgs& a) {
  const Timer timer;
  const Topology topology = topology_from_string(a.topology);
  const GateTarget target = resolve_gate(a.gate, topology);
  if (target.matrix.rows() != logical_dim(topology))
    throw std::invalid_argument("gate '" + a.gate + "' does not fit topology '" +
                                a.topology + "'");

  SearchConfig cfg;
  cfg.rng_seed = a.seed;
  cfg.fidelity_goal = a.fmin;
  cfg.leakage_goal = a.lmax;
  cfg.max_steps = a.max_steps;
  cfg.tau_max = a.tau_max;
  cfg.j12_frozen = a.j12;
  cfg.population_size = a.population;
  cfg.max_generations = a.generations;
  cfg.simplex_period = a.simplex_period;
  cfg.simplex_max_iters = a.simplex_iters;
  cfg.stall_generations = a.stall;
  cfg.mutation_sigma_tau = a.mutation_sigma;
  cfg.coupling_mutation_prob = a.coupling_mutation_prob;
  cfg.coupling_creep_prob = a.coupling_creep_prob;
  cfg.coupling_creep_sigma = a.coupling_creep_sigma;
  if (a.coupling_mode == "binary")
    cfg.coupling_mode = CouplingMode::Binary;
  else if (a.coupling_mode != "continuous")
    throw std::invalid_argument("coupling-mode must be continuous|binary");
  if (a.progress) cfg.progress = &std::cerr;

  const SynthesisResult result = synthesize(target, topology, cfg);

  const json seq_json = to_json(result.sequence);
  write_file(a.out, seq_json.dump(2) + "\n");

  json config{{"gate", a.gate},
              {"topology", a.topology},
              {"fidelity_goal", cfg.fidelity_goal},
              {"leakage_goal", cfg.leakage_goal},
              {"max_steps", cfg.resolved_max_steps(topology)},
              {"tau_max", cfg.tau_max},
              {"j12_frozen", cfg.j12_frozen},
              {"coupling_mode", a.coupling_mode},
              {"population_size", cfg.population_size},
              {"max_generations", cfg.max_generations},
              {"simplex_period", cfg.simplex_period},
              {"simplex_max_iters", cfg.simplex_max_iters},
              {"stall_generations", cfg.stall_generations},
              {"mutation_sigma_tau", cfg.mutation_sigma_tau},
              {"coupling_mutation_prob", cfg.coupling_mutation_prob},
              {"coupling_creep_prob", cfg.coupling_creep_prob},
              {"coupling_creep_sigma", cfg.coupling_creep_sigma},
              {"out", a.out}};
  write_file(a.out + ".manifest.json",
             manifest_json("synthesize", config, a.seed, {}, timer.ms()).dump(2) + "\n");

  std::cout << json{{"goal_met", result.goal_met},
                    {"fidelity", result.fidelity},
                    {"leakage", result.leakage},
                    {"steps", result.steps},
                    {"total_tau", result.sequence.total_tau()},
                    {"generations", result.generations},
                    {"out", a.out}}
                   .dump(2)
            << std::endl;
  return result.goal_met ? kExitOk : kExitGoalNotMet;
}

// --- verify -----------------------------------------------------------------

int run_verify(const std::string& seq_path, const std::string& gate, double fmin,
               std::optional<double> jmax_uev) {
  const Timer timer;
  const PulseSequence seq = sequence_from_json(json::parse(read_file(seq_path)));
  const GateTarget target = resolve_gate(gate.empty() ? seq.gate : gate, seq.topology);
  if (target.matrix.rows() != logical_dim(seq.topology))
    throw std::invalid_argument("gate does not fit the sequence topology");

  const FidelityReport report = verify_sequence(seq, target, jmax_uev);
  json out = to_json(report);
  out["gate"] = target.name;
  out["topology"] = to_string(seq.topology);
  out["steps"] = seq.steps.size();
  out["goal_fidelity"] = fmin;
  out["manifest"] = manifest_json("verify", json{{"gate", target.name}, {"fmin", fmin}},
                                  seq.seed, {seq_path}, timer.ms());
  std::cout << out.dump(2) << std::endl;
  return report.fidelity >= fmin ? kExitOk : kExitVerifyFailed;
}

// --- couplings ---------------------------------------------------------------

json oracle_report_single(const HubbardParams1Q& p, const SingleCouplings& c) {
  const FockBlock block = build_single(p, -0.5);
  const auto exact = exact_spectrum(block, 3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      heisenberg_hamiltonian(ExchangeCouplings::single(c.j13, c.j23, c.j12)));
  std::vector<double> model;
  const SpinRegister reg = SpinRegister::one_qubit();
  // Heisenberg eigenvalues restricted to S_z=-1/2 = three of the full eight;
  // pick them by projecting eigenvectors onto the sector.
  const auto sector = sz_sector_indices(reg, -0.5);
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    double weight = 0.0;
    for (int idx : sector) weight += std::norm(es.eigenvectors()(idx, k));
    if (weight > 0.5) model.push_back(es.eigenvalues()(k));
  }
  std::sort(model.begin(), model.end());
  json gaps_exact = json::array(), gaps_model = json::array();
  double max_rel = 0.0;
  const double span = exact[2] - exact[0];
  for (auto [i, j] : std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}}) {
    const double ge = exact[j] - exact[i];
    const double gm = model[j] - model[i];
    gaps_exact.push_back(ge);
    gaps_model.push_back(gm);
    const double denom = std::max(std::abs(ge), 0.05 * span);
    if (denom > 0.0) max_rel = std::max(max_rel, std::abs(gm - ge) / denom);
  }
  return json{{"gaps_exact", gaps_exact},
              {"gaps_model", gaps_model},
              {"max_relative_error", max_rel}};
}

json oracle_report_two(const HubbardParams2Q& p, const TwoQubitCouplings& c) {
  const FockBlock block = build_two(p, -1.0);
  const auto exact = exact_spectrum(block, 15);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      heisenberg_hamiltonian(c.couplings));
  const auto sector = sz_sector_indices(SpinRegister::two_qubits(), -1.0);
  std::vector<double> model;
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    double weight = 0.0;
    for (int idx : sector) weight += std::norm(es.eigenvectors()(idx, k));
    if (weight > 0.5) model.push_back(es.eigenvalues()(k));
  }
  std::sort(model.begin(), model.end());
  double max_rel = 0.0;
  const double span = exact[14] - exact[0];
  json gaps_exact = json::array(), gaps_model = json::array();
  for (int k = 1; k < 15; ++k) {
    const double ge = exact[k] - exact[0];
    const double gm = model[k] - model[0];
    gaps_exact.push_back(ge);
    gaps_model.push_back(gm);
    const double denom = std::max(std::abs(ge), 0.05 * span);
    if (denom > 0.0) max_rel = std::max(max_rel, std::abs(gm - ge) / denom);
  }
  return json{{"gaps_exact", gaps_exact},
              {"gaps_model", gaps_model},
              {"max_relative_error", max_rel}};
}

int run_couplings(const std::string& params_path, bool oracle) {
  const Timer timer;
  const HubbardFile file = hubbard_from_json(json::parse(read_file(params_path)));
  json out;
  double min_de = std::numeric_limits<double>::infinity();
  double max_pert = 0.0;
  if (!file.two_qubit) {
    const SingleCouplings c = couplings_single(file.one);
    out = json{{"topology", "single"},
               {"unit", file.unit},
               {"J13", c.j13},
               {"J23", c.j23},
               {"J12", c.j12},
               {"delta_e",
                json{{"dE1", c.delta_e[0]},
                     {"dE2", c.delta_e[1]},
                     {"dE3", c.delta_e[2]},
                     {"dE4", c.delta_e[3]}}}};
    for (double de : c.delta_e) min_de = std::min(min_de, std::abs(de));
    max_pert = file.one.max_perturbation();
    if (oracle) out["oracle"] = oracle_report_single(file.one, c);
  } else {
    const TwoQubitCouplings c = couplings_two(file.two);
    json de{{"dE1a", c.delta_e_a[0]}, {"dE2a", c.delta_e_a[1]},
            {"dE3a", c.delta_e_a[2]}, {"dE4a", c.delta_e_a[3]},
            {"dE1b", c.delta_e_b[0]}, {"dE2b", c.delta_e_b[1]},
            {"dE3b", c.delta_e_b[2]}, {"dE4b", c.delta_e_b[3]}};
    json inter;
    if (file.two.config == Topology::ConfigA) {
      de["dE5"] = c.delta_e_inter[0];
      de["dE6"] = c.delta_e_inter[1];
      inter = json{{"J_3a1b", c.couplings.inter[0]}, {"J_3a2b", c.couplings.inter[1]}};
    } else {
      inter = json{{"J_1a1b", c.couplings.inter[0]}, {"J_2a2b", c.couplings.inter[1]}};
    }
    out = json{{"topology", to_string(file.two.config)},
               {"unit", file.unit},
               {"qubit_a", json{{"J13", c.couplings.a.j13},
                                {"J23", c.couplings.a.j23},
                                {"J12", c.couplings.a.j12}}},
               {"qubit_b", json{{"J13", c.couplings.b.j13},
                                {"J23", c.couplings.b.j23},
                                {"J12", c.couplings.b.j12}}},
               {"inter", inter},
               {"delta_e", de}};
    for (const auto& [key, v] : out["delta_e"].items())
      min_de = std::min(min_de, std::abs(v.get<double>()));
    max_pert = std::max({file.two.a.max_perturbation(), file.two.b.max_perturbation(),
                         std::abs(file.two.t_3a1b), std::abs(file.two.t_3a2b),
                         std::abs(file.two.t_1a1b), std::abs(file.two.t_2a2b),
                         file.two.j_3a1b.max_abs(), file.two.j_3a2b.max_abs(),
                         file.two.j_1a1b.max_abs(), file.two.j_2a2b.max_abs()});
    if (oracle) out["oracle"] = oracle_report_two(file.two, c);
  }
  const double ratio = max_pert / min_de;
  out["perturbative_warning"] = ratio > 0.1;
  out["perturbation_ratio"] = ratio;
  out["manifest"] = manifest_json("couplings", json{{"oracle", oracle}}, 0,
                                  {params_path}, timer.ms());
  std::cout << out.dump(2) << std::endl;
  return kExitOk;
}

// --- spectrum ----------------------------------------------------------------

int run_spectrum(const std::string& scenario, double eps_min, double eps_max,
                 int points, double j12, const std::string& out_path, bool gap) {
  const Timer timer;
  if (points < 2) throw std::invalid_argument("spectrum: need at least 2 points");
  if (!(eps_max > eps_min)) throw std::invalid_argument("spectrum: bad eps range");
  std::vector<double> grid(points);
  for (int k = 0; k < points; ++k)
    grid[k] = eps_min + (eps_max - eps_min) * k / (points - 1);
  const auto rows = spectrum_sweep(grid, scenario_from_string(scenario), j12);

  std::string csv = "eps,lambda0,lambda1,lambda2\n";
  for (const auto& r : rows)
    csv += format_double(r.eps) + "," + format_double(r.lambda0) + "," +
           format_double(r.lambda1) + "," + format_double(r.lambda2) + "\n";
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    write_file(out_path, csv);
    json config{{"scenario", scenario}, {"eps_min", eps_min}, {"eps_max", eps_max},
                {"points", points},     {"j12", j12},         {"out", out_path}};
    write_file(out_path + ".manifest.json",
               manifest_json("spectrum", config, 0, {}, timer.ms()).dump(2) + "\n");
  }
  if (gap) {
    double min_gap = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) min_gap = std::min(min_gap, r.lambda1 - r.lambda0);
    std::cout << "min_gap " << format_double(min_gap) << std::endl;
  }
  return kExitOk;
}

// --- times -------------------------------------------------------------------

int run_times(const std::string& seq_path, double jmax_uev) {
  const PulseSequence seq = sequence_from_json(json::parse(read_file(seq_path)));
  const double unit_ns = duration_to_ns(1.0, jmax_uev);
  std::cout << "unit_ns " << format_double(unit_ns) << "\n";
  int k = 1;
  for (const auto& s : seq.steps) {
    std::cout << "step " << k++ << " tau " << format_double(s.tau) << " ns "
              << format_double(duration_to_ns(s.tau, jmax_uev)) << "\n";
  }
  std::cout << "total tau " << format_double(seq.total_tau()) << " ns "
            << format_double(duration_to_ns(seq.total_tau(), jmax_uev)) << std::endl;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exchange-pulse synthesis and verification for double-dot "
               "three-spin qubits"};
  app.set_version_flag("--version", hqpulse::kVersion);
  app.require_subcommand(1);

  SynthesizeArgs sa;
  auto* syn = app.add_subcommand("synthesize", "Search a pulse sequence for a gate");
  syn->add_option("--gate", sa.gate, "hadamard|pi8|cnot|identity or a gate JSON file")
      ->required();
  syn->add_option("--topology", sa.topology, "single|A|B");
  syn->add_option("--out", sa.out, "output sequence file")->required();
  syn->add_option("--seed", sa.seed, "RNG seed");
  syn->add_option("--fmin", sa.fmin, "fidelity goal");
  syn->add_option("--lmax", sa.lmax, "leakage goal");
  syn->add_option("--max-steps", sa.max_steps, "step budget (0 = topology default)");
  syn->add_option("--tau-max", sa.tau_max, "per-step duration bound");
  syn->add_option("--j12", sa.j12, "frozen intradot coupling (J^max units)");
  syn->add_option("--coupling-mode", sa.coupling_mode, "continuous|binary");
  syn->add_option("--population", sa.population, "GA population size");
  syn->add_option("--generations", sa.generations, "GA generation budget per step count");
  syn->add_option("--simplex-period", sa.simplex_period, "generations between simplex polishes");
  syn->add_option("--simplex-iters", sa.simplex_iters, "simplex iteration budget");
  syn->add_option("--stall", sa.stall, "generations without improvement before growing");
  syn->add_option("--mutation-sigma", sa.mutation_sigma, "Gaussian tau mutation width");
  syn->add_option("--coupling-mutation-prob", sa.coupling_mutation_prob,
                  "per-coupling uniform redraw probability");
  syn->add_option("--coupling-creep-prob", sa.coupling_creep_prob,
                  "per-coupling Gaussian nudge probability");
  syn->add_option("--coupling-creep-sigma", sa.coupling_creep_sigma,
                  "Gaussian nudge width for couplings");
  syn->add_flag("--progress", sa.progress, "log gen,best_fitness,best_F,best_L to stderr");

  std::string verify_seq, verify_gate;
  double verify_fmin = 1.0 - 1e-4;
  double jmax_uev = 0.0;
  auto* ver = app.add_subcommand("verify", "Recompute fidelity of a sequence file");
  ver->add_option("sequence", verify_seq, "sequence JSON file")->required();
  ver->add_option("--gate", verify_gate, "target gate (defaults to the file's gate)");
  ver->add_option("--fmin", verify_fmin, "fidelity goal");
  ver->add_option("--jmax-uev", jmax_uev, "J^max in ueV for physical time");

  std::string params_path;
  bool oracle = false;
  auto* cpl = app.add_subcommand("couplings", "Effective couplings from Hubbard parameters");
  cpl->add_option("params", params_path, "parameter JSON file")->required();
  cpl->add_flag("--oracle", oracle, "compare against exact diagonalization");

  std::string scenario = "both-off", sweep_out;
  double eps_min = -2.0, eps_max = 2.0, sweep_j12 = 0.5;
  int points = 401;
  bool gap = false;
  auto* spc = app.add_subcommand("spectrum", "Detuning sweep of the 3x3 model");
  spc->add_option("--scenario", scenario, "both-off|t13|t23");
  spc->add_option("--eps-min", eps_min, "detuning start");
  spc->add_option("--eps-max", eps_max, "detuning end");
  spc->add_option("--points", points, "grid points");
  spc->add_option("--j12", sweep_j12, "intradot coupling");
  spc->add_option("--out", sweep_out, "CSV output file (stdout if omitted)");
  spc->add_flag("--gap", gap, "print the minimum gap between the two lowest branches");

  std::string times_seq;
  double times_jmax = 0.0;
  auto* tms = app.add_subcommand("times", "Physical times of a sequence");
  tms->add_option("sequence", times_seq, "sequence JSON file")->required();
  tms->add_option("--jmax-uev", times_jmax, "J^max in ueV")->required();

  try {
    app.parse(argc, argv);
    if (syn->parsed()) return run_synthesize(sa);
    if (ver->parsed())
      return run_verify(verify_seq, verify_gate, verify_fmin,
                        jmax_uev > 0.0 ? std::optional<double>(jmax_uev) : std::nullopt);
    if (cpl->parsed()) return run_couplings(params_path, oracle);
    if (spc->parsed())
      return run_spectrum(scenario, eps_min, eps_max, points, sweep_j12, sweep_out, gap);
    if (tms->parsed()) return run_times(times_seq, times_jmax);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const hqpulse::DegenerateChargeSector& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitUsage;
  }
  return kExitUsage;
}
