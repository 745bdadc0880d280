// qtsp: command-line front end for the TSP encodings, VMC solver and sweep harness.
//
// Exit codes: 0 success, 1 usage error, 2 runtime error.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include "qtsp/qtsp.hpp"

namespace {

struct InstanceOptions {
  int cities = 0;
  std::string path;

  void add(CLI::App* cmd) {
    auto* c = cmd->add_option("--cities", cities, "Generate a linear instance with this many cities");
    auto* p = cmd->add_option("--instance", path, "Instance JSON file");
    c->excludes(p);
  }

  qtsp::Instance resolve() const {
    if (!path.empty()) return qtsp::load_instance(path);
    if (cities > 0) return qtsp::linear_instance(cities);
    throw CLI::ValidationError("one of --cities or --instance is required");
  }
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("QTSP_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw CLI::ValidationError("QTSP_SEED must be an unsigned integer");
    }
  }
  return 0;
}

std::string format_tour(const qtsp::Tour& t) {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < t.size(); ++k) os << (k ? "," : "") << t[k];
  os << ')';
  return os.str();
}

// --target: "auto" (planted optimum when known), "none", or a number.
std::optional<double> resolve_target(const std::string& flag, const qtsp::Instance& inst) {
  if (flag == "auto") return qtsp::default_target(inst);
  if (flag == "none") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(flag, &used);
    if (used != flag.size()) throw std::invalid_argument(flag);
    return v;
  } catch (const std::exception&) {
    throw CLI::ValidationError("--target must be auto, none or a number");
  }
}

struct BudgetOptions {
  int steps = 2000;
  int patience = 300;
  double time_limit = 600.0;

  void add(CLI::App* cmd) {
    cmd->add_option("--steps", steps, "Maximum MC steps")->capture_default_str();
    cmd->add_option("--patience", patience, "Stop after this many steps without improvement")->capture_default_str();
    cmd->add_option("--time-limit", time_limit, "Wall-clock limit per run in seconds")->capture_default_str();
  }

  void apply(qtsp::VmcConfig& cfg) const {
    cfg.max_steps = steps;
    cfg.prune_no_improve_steps = patience;
    cfg.prune_wall_clock_s = time_limit;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Travelling-salesman ground states via variational Monte Carlo"};
  app.require_subcommand(1);
  app.set_version_flag("--version", qtsp::version_string());

  // gen
  auto* gen = app.add_subcommand("gen", "Write a linear instance as JSON");
  int gen_cities = 0;
  std::string gen_out;
  gen->add_option("--cities", gen_cities, "Number of cities")->required();
  gen->add_option("--out", gen_out, "Output path (stdout when omitted)");

  // exact
  auto* exact = app.add_subcommand("exact", "Brute-force optimum");
  InstanceOptions exact_inst;
  exact_inst.add(exact);

  // diag
  auto* diag = app.add_subcommand("diag", "Dense Hamiltonian ground state (N <= 5)");
  InstanceOptions diag_inst;
  diag_inst.add(diag);
  std::string diag_variant = "eq4";
  std::optional<double> diag_p, diag_p_prime;
  std::string diag_csv;
  diag->add_option("--variant", diag_variant, "eq2 (full penalty matrix) or eq4 (ring of two-body terms)")
      ->check(CLI::IsMember({"eq2", "eq4"}))
      ->capture_default_str();
  diag->add_option("--p", diag_p, "Diagonal penalty p");
  diag->add_option("--p-prime", diag_p_prime, "Two-body penalty p'");
  diag->add_option("--csv", diag_csv, "Also write the matrix as CSV");

  // solve
  auto* solve = app.add_subcommand("solve", "Single VMC run");
  InstanceOptions solve_inst;
  solve_inst.add(solve);
  BudgetOptions solve_budget;
  solve_budget.add(solve);
  std::string rep_flag = "qudit", net_flag;
  std::optional<std::uint64_t> solve_seed;
  std::optional<double> lr;
  std::optional<int> chains, swaps, swap_len, sample_size, hidden, channels, kernel;
  std::string target_flag = "auto", run_out, params_out;
  bool no_fix_first = false;
  solve->add_option("--rep", rep_flag, "qubit or qudit")->check(CLI::IsMember({"qubit", "qudit"}))->capture_default_str();
  solve->add_option("--net", net_flag, "rbm or cnn (defaults to the representation's pairing)")
      ->check(CLI::IsMember({"rbm", "cnn"}));
  solve->add_option("--seed", solve_seed, "Experiment seed (falls back to QTSP_SEED, then 0)");
  solve->add_option("--lr", lr, "Adam learning rate");
  solve->add_option("--chains", chains, "Number of Markov chains");
  solve->add_option("--swaps", swaps, "Swaps per proposal");
  solve->add_option("--max-swap-len", swap_len, "Maximum cyclic swap distance");
  solve->add_option("--sample-size", sample_size, "Recorded configurations per MC step");
  solve->add_option("--hidden", hidden, "RBM hidden units");
  solve->add_option("--channels", channels, "CNN channels");
  solve->add_option("--kernel", kernel, "CNN kernel size");
  solve->add_option("--target", target_flag, "auto, none or an energy")->capture_default_str();
  solve->add_option("--out", run_out, "Run log (JSONL)");
  solve->add_option("--params-out", params_out, "Final parameter checkpoint (JSON)");
  solve->add_flag("--free-first", no_fix_first, "Let the first tour position move");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Random hyperparameter search with pruning");
  InstanceOptions sweep_inst;
  sweep_inst.add(sweep_cmd);
  BudgetOptions sweep_budget;
  sweep_budget.add(sweep_cmd);
  std::string sweep_rep = "qudit", sweep_out, sweep_target = "auto";
  int trials = 10, jobs = 1;
  std::optional<std::uint64_t> sweep_seed;
  sweep_cmd->add_option("--rep", sweep_rep, "qubit or qudit")->check(CLI::IsMember({"qubit", "qudit"}))->capture_default_str();
  sweep_cmd->add_option("--trials", trials, "Number of trials")->capture_default_str();
  sweep_cmd->add_option("--jobs", jobs, "Trials run concurrently")->capture_default_str();
  sweep_cmd->add_option("--seed", sweep_seed, "Sweep seed (falls back to QTSP_SEED, then 0)");
  sweep_cmd->add_option("--target", sweep_target, "auto, none or an energy")->capture_default_str();
  sweep_cmd->add_option("--out", sweep_out, "Summary JSON (stdout when omitted)");

  // report
  auto* report = app.add_subcommand("report", "Convergence table from sweep summaries");
  std::vector<std::string> report_in;
  std::string report_out;
  report->add_option("summaries", report_in, "Sweep summary JSON files");
  report->add_option("--out", report_out, "Output CSV (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*gen) {
      const auto inst = qtsp::linear_instance(gen_cities);
      if (gen_out.empty())
        std::cout << qtsp::instance_to_json(inst).dump(2) << '\n';
      else
        qtsp::save_instance(inst, gen_out);
      return 0;
    }

    if (*exact) {
      const auto inst = exact_inst.resolve();
      const auto best = qtsp::brute_force_optimum(inst);
      std::cout << "tour " << format_tour(best.tour) << " length " << best.length << '\n';
      return 0;
    }

    if (*diag) {
      const auto inst = diag_inst.resolve();
      auto pen = qtsp::PenaltyConfig::defaults(inst);
      if (diag_p) pen.p = *diag_p;
      if (diag_p_prime) pen.p_prime = *diag_p_prime;
      pen = qtsp::PenaltyConfig::checked(inst, pen.p, pen.p_prime);
      const auto variant = diag_variant == "eq2" ? qtsp::HamiltonianVariant::eq2 : qtsp::HamiltonianVariant::eq4;
      const Eigen::MatrixXd h = qtsp::dense_hamiltonian(inst, variant, pen);
      if (!diag_csv.empty()) {
        std::ofstream out(diag_csv);
        if (!out) throw qtsp::Error("cannot write " + diag_csv);
        qtsp::write_hamiltonian_csv(out, h, inst.size());
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
      if (es.info() != Eigen::Success) throw qtsp::Error("eigensolver failed");
      const Eigen::VectorXd ground = es.eigenvectors().col(0);
      Eigen::Index arg = 0;
      ground.cwiseAbs().maxCoeff(&arg);
      std::cout.precision(12);
      std::cout << "dimension " << h.rows() << '\n'
                << "ground_energy " << es.eigenvalues()(0) << '\n'
                << "dominant_basis_state " << format_tour(qtsp::basis_state(static_cast<std::size_t>(arg), inst.size()))
                << " weight " << ground(arg) * ground(arg) << '\n';
      return 0;
    }

    if (*solve) {
      const auto inst = solve_inst.resolve();
      const int n = static_cast<int>(inst.size());
      qtsp::VmcConfig cfg;
      cfg.representation = qtsp::parse_representation(rep_flag);
      cfg.network.kind = net_flag.empty()
                             ? (cfg.representation == qtsp::Representation::qubit ? qtsp::NetworkKind::rbm
                                                                                   : qtsp::NetworkKind::cnn)
                             : qtsp::parse_network(net_flag);
      try {
        qtsp::check_pairing(cfg.representation, cfg.network.kind);
      } catch (const qtsp::InvalidConfig& e) {
        std::cerr << "error: " << e.what() << "\n\n" << solve->help();
        return 1;
      }
      cfg = qtsp::midpoint_config(qtsp::SearchSpace::defaults(n), n, cfg);
      solve_budget.apply(cfg);
      if (lr) cfg.learning_rate = *lr;
      if (chains) cfg.sampler.n_chains = *chains;
      if (swaps) cfg.sampler.n_swaps = *swaps;
      if (swap_len) cfg.sampler.max_swap_len = *swap_len;
      if (sample_size) cfg.sampler.sample_size = *sample_size;
      if (hidden) cfg.network.n_hidden = *hidden;
      if (channels) cfg.network.n_channels = *channels;
      if (kernel) cfg.network.kernel_size = *kernel;
      cfg.sampler.fix_first = !no_fix_first;

      const std::uint64_t seed = resolve_seed(solve_seed);
      qtsp::ExperimentSpec spec{inst, cfg, seed, resolve_target(target_flag, inst)};
      std::optional<qtsp::RunLogWriter> log;
      if (!run_out.empty()) {
        log.emplace(run_out);
        auto header_cfg = cfg;
        header_cfg.sampler.seed = qtsp::sampler_seed(seed);
        header_cfg.target_energy = spec.target_energy;
        log->header(header_cfg, inst.size(), seed);
      }
      qtsp::StepCallback cb;
      if (log) cb = [&log](const qtsp::StepStats& s) { log->step(s); };
      const auto res = qtsp::run_experiment(spec, cb);
      if (log) log->footer(res.record);
      if (!params_out.empty()) qtsp::nqs::save_params(res.final_params, params_out);

      std::cout << "reason " << qtsp::to_string(res.record.reason) << '\n'
                << "steps " << res.record.steps.size() << '\n'
                << "best_energy " << res.record.best_energy << '\n'
                << "best_tour " << format_tour(res.record.best_tour) << '\n'
                << "converged " << (res.converged ? "true" : "false") << '\n'
                << "total_time_s " << res.record.total_time_s << '\n';
      return 0;
    }

    if (*sweep_cmd) {
      const auto inst = sweep_inst.resolve();
      const int n = static_cast<int>(inst.size());
      qtsp::VmcConfig base;
      sweep_budget.apply(base);
      const auto rep = qtsp::parse_representation(sweep_rep);
      const auto summary = qtsp::sweep(inst, rep, qtsp::SearchSpace::defaults(n), trials, resolve_seed(sweep_seed),
                                       base, resolve_target(sweep_target, inst), jobs);
      const auto text = qtsp::to_json(summary).dump(2);
      if (sweep_out.empty()) {
        std::cout << text << '\n';
      } else {
        std::ofstream out(sweep_out);
        if (!out) throw qtsp::Error("cannot write " + sweep_out);
        out << text << '\n';
        std::cout << "converged " << summary.percent_converged() << "% of " << summary.n_trials() << " trials\n";
      }
      return 0;
    }

    if (*report) {
      std::vector<qtsp::SweepSummary> summaries;
      for (const auto& path : report_in) {
        std::ifstream in(path);
        if (!in) throw qtsp::Error("cannot open " + path);
        nlohmann::json j;
        try {
          in >> j;
        } catch (const nlohmann::json::exception& e) {
          throw qtsp::InvalidConfig("cannot parse " + path + ": " + e.what());
        }
        summaries.push_back(qtsp::sweep_summary_from_json(j));
      }
      const auto csv = qtsp::report_convergence(summaries);
      if (report_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(report_out);
        if (!out) throw qtsp::Error("cannot write " + report_out);
        out << csv;
      }
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
