#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtsp/ansatz.hpp"
#include "qtsp/errors.hpp"
#include "qtsp/instance.hpp"
#include "qtsp/nqs/checkpoint.hpp"
#include "qtsp/rng.hpp"
#include "qtsp/run_io.hpp"
#include "qtsp/vmc.hpp"

namespace qtsp {

struct ExperimentSpec {
  Instance instance;
  VmcConfig config;
  std::uint64_t seed = 0;
  // Convergence target; linear instances default to their planted optimum.
  std::optional<double> target_energy;
};

struct ExperimentResult {
  RunRecord record;
  bool converged = false;
  std::optional<double> target;
  nqs::NetworkParams final_params;
};

inline std::optional<double> default_target(const Instance& inst) {
  if (inst.is_planted_linear()) return planted_optimum(static_cast<int>(inst.size()));
  return std::nullopt;
}

// Seeds for the sampler and the parameter initialisation both derive from the
// experiment seed.
inline std::uint64_t sampler_seed(std::uint64_t seed) { return stream_seed(seed, 1); }
inline std::uint64_t init_seed(std::uint64_t seed) { return stream_seed(seed, 2); }

inline void check_pairing(Representation rep, NetworkKind kind) {
  if (rep == Representation::qubit && kind != NetworkKind::rbm)
    throw InvalidConfig("the qubit representation is paired with the rbm network");
  if (rep == Representation::qudit && kind != NetworkKind::cnn)
    throw InvalidConfig("the qudit representation is paired with the cnn network");
}

inline QubitRbmAnsatz make_rbm_ansatz(std::size_t n, const NetworkConfig& net, std::uint64_t seed) {
  const auto hidden = net.n_hidden > 0 ? net.n_hidden : static_cast<int>(2 * n);
  return QubitRbmAnsatz(n, nqs::init_rbm_params(static_cast<Eigen::Index>(n * n), hidden, net.init_scale, seed));
}

inline QuditCnnAnsatz make_cnn_ansatz(std::size_t n, const NetworkConfig& net, std::uint64_t seed) {
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(std::max(net.kernel_size, 1)), n);
  return QuditCnnAnsatz(n, nqs::init_cnn_params(k, static_cast<std::size_t>(std::max(net.n_channels, 1)),
                                                net.init_scale, seed));
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec, const StepCallback& on_step = {}) {
  const Instance& inst = spec.instance;
  VmcConfig cfg = spec.config;
  check_pairing(cfg.representation, cfg.network.kind);
  cfg.sampler.seed = sampler_seed(spec.seed);
  ExperimentResult out;
  out.target = spec.target_energy ? spec.target_energy : default_target(inst);
  if (!cfg.target_energy) cfg.target_energy = out.target;

  if (cfg.representation == Representation::qubit) {
    auto ansatz = make_rbm_ansatz(inst.size(), cfg.network, init_seed(spec.seed));
    out.record = train(inst, cfg, ansatz, on_step);
    out.final_params = ansatz.params();
  } else {
    auto ansatz = make_cnn_ansatz(inst.size(), cfg.network, init_seed(spec.seed));
    out.record = train(inst, cfg, ansatz, on_step);
    out.final_params = ansatz.params();
  }
  out.converged = out.target.has_value() && out.record.best_energy <= *out.target + kTargetTol;
  return out;
}

// ---------------------------------------------------------------------------
// Random hyperparameter search

struct SearchSpace {
  std::vector<int> hidden_multipliers;  // N_H = m * N
  std::vector<int> n_channels;          // F
  std::vector<int> kernel_sizes;        // K
  std::vector<int> n_chains;            // N_MC
  std::vector<int> n_swaps;             // N_S
  std::vector<int> max_swap_lens;       // l_S
  std::vector<int> sample_sizes;        // S
  double lr_min = 1e-3;                 // alpha, log-uniform
  double lr_max = 1e-1;

  static SearchSpace defaults(int n) {
    SearchSpace s;
    s.hidden_multipliers = {1, 2, 4};
    s.n_channels = {2, 4, 8};
    for (int k = 2; k <= std::min(6, n); ++k) s.kernel_sizes.push_back(k);
    if (s.kernel_sizes.empty()) s.kernel_sizes.push_back(n);
    s.n_chains = {4, 8, 16};
    s.n_swaps = {1, 2, 4};
    s.max_swap_lens = {std::min(2, n), std::max(1, n / 2), n};
    s.sample_sizes = {256, 512, 1024};
    return s;
  }

  void validate() const {
    for (const auto* v : {&hidden_multipliers, &n_channels, &kernel_sizes, &n_chains, &n_swaps, &max_swap_lens,
                          &sample_sizes})
      if (v->empty()) throw InvalidConfig("search space dimensions must be non-empty");
    if (!(lr_min > 0.0) || !(lr_max >= lr_min)) throw InvalidConfig("learning-rate range must satisfy 0 < min <= max");
  }
};

namespace detail {
template <class T>
T middle(const std::vector<T>& v) {
  return v[v.size() / 2];
}
template <class T>
T pick(const std::vector<T>& v, Rng& rng) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}
}  // namespace detail

// Writes the hyperparameters of a search-space point into `cfg`.
inline void apply_point(VmcConfig& cfg, int n, int hidden_mult, int channels, int kernel, int chains, int swaps,
                        int swap_len, int sample_size, double lr) {
  cfg.network.n_hidden = hidden_mult * n;
  cfg.network.n_channels = channels;
  cfg.network.kernel_size = std::min(kernel, n);
  cfg.sampler.n_chains = chains;
  cfg.sampler.n_swaps = swaps;
  cfg.sampler.max_swap_len = std::clamp(swap_len, 1, n);
  cfg.sampler.sample_size = sample_size;
  cfg.learning_rate = lr;
}

// Middle element of every range and the geometric mean of the learning-rate range.
inline VmcConfig midpoint_config(const SearchSpace& space, int n, VmcConfig base) {
  space.validate();
  using detail::middle;
  apply_point(base, n, middle(space.hidden_multipliers), middle(space.n_channels), middle(space.kernel_sizes),
              middle(space.n_chains), middle(space.n_swaps), middle(space.max_swap_lens), middle(space.sample_sizes),
              std::sqrt(space.lr_min * space.lr_max));
  return base;
}

inline VmcConfig sample_config(const SearchSpace& space, int n, VmcConfig base, Rng& rng) {
  using detail::pick;
  const int hidden = pick(space.hidden_multipliers, rng);
  const int channels = pick(space.n_channels, rng);
  const int kernel = pick(space.kernel_sizes, rng);
  const int chains = pick(space.n_chains, rng);
  const int swaps = pick(space.n_swaps, rng);
  const int swap_len = pick(space.max_swap_lens, rng);
  const int sample_size = pick(space.sample_sizes, rng);
  std::uniform_real_distribution<double> u(std::log(space.lr_min), std::log(space.lr_max));
  const double lr = std::exp(u(rng));
  apply_point(base, n, hidden, channels, kernel, chains, swaps, swap_len, sample_size, lr);
  return base;
}

inline std::optional<double> median(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct TrialResult {
  int index = 0;
  std::uint64_t seed = 0;
  VmcConfig config;
  double best_energy = 0.0;
  bool converged = false;
  std::optional<double> time_to_target_s;
  int steps = 0;
  Termination reason = Termination::max_steps;
};

struct SweepSummary {
  int n_cities = 0;
  Representation representation = Representation::qudit;
  std::uint64_t seed = 0;
  std::vector<TrialResult> trials;

  int n_trials() const { return static_cast<int>(trials.size()); }

  double percent_converged() const {
    if (trials.empty()) return 0.0;
    const auto c = std::count_if(trials.begin(), trials.end(), [](const TrialResult& t) { return t.converged; });
    return 100.0 * static_cast<double>(c) / static_cast<double>(trials.size());
  }

  std::optional<double> median_time_to_target() const {
    std::vector<double> t;
    for (const auto& tr : trials)
      if (tr.converged && tr.time_to_target_s) t.push_back(*tr.time_to_target_s);
    return median(std::move(t));
  }
};

// Trial i draws its hyperparameters from stream i of `seed` and runs with its
// own derived experiment seed. Up to `jobs` trials run concurrently; results
// are stored by trial index.
inline SweepSummary sweep(const Instance& inst, Representation rep, const SearchSpace& space, int n_trials,
                          std::uint64_t seed, const VmcConfig& base, std::optional<double> target = std::nullopt,
                          int jobs = 1) {
  if (n_trials < 1) throw InvalidConfig("n_trials must be at least 1");
  space.validate();
  const int n = static_cast<int>(inst.size());
  SweepSummary summary;
  summary.n_cities = n;
  summary.representation = rep;
  summary.seed = seed;
  summary.trials.resize(static_cast<std::size_t>(n_trials));

  std::vector<ExperimentSpec> specs;
  specs.reserve(static_cast<std::size_t>(n_trials));
  for (int t = 0; t < n_trials; ++t) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(t));
    VmcConfig cfg = sample_config(space, n, base, rng);
    cfg.representation = rep;
    cfg.network.kind = rep == Representation::qubit ? NetworkKind::rbm : NetworkKind::cnn;
    specs.push_back({inst, cfg, stream_seed(seed, 1'000'000ULL + static_cast<std::uint64_t>(t)), target});
  }

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < n_trials; t = next++) {
      const auto& spec = specs[static_cast<std::size_t>(t)];
      const auto res = run_experiment(spec);
      auto& tr = summary.trials[static_cast<std::size_t>(t)];
      tr.index = t;
      tr.seed = spec.seed;
      tr.config = spec.config;
      tr.best_energy = res.record.best_energy;
      tr.converged = res.converged;
      tr.time_to_target_s = res.converged ? res.record.time_to_target_s : std::nullopt;
      tr.steps = static_cast<int>(res.record.steps.size());
      tr.reason = res.record.reason;
    }
  };
  const int n_workers = std::clamp(jobs, 1, n_trials);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  return summary;
}

inline nlohmann::json to_json(const SweepSummary& s) {
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : s.trials) {
    nlohmann::json j = {{"index", t.index},
                        {"seed", t.seed},
                        {"config", to_json(t.config)},
                        {"best_energy", t.best_energy},
                        {"converged", t.converged},
                        {"steps", t.steps},
                        {"reason", to_string(t.reason)}};
    j["time_to_target_s"] = t.time_to_target_s ? nlohmann::json(*t.time_to_target_s) : nlohmann::json(nullptr);
    trials.push_back(std::move(j));
  }
  nlohmann::json j = {{"n_cities", s.n_cities},
                      {"representation", to_string(s.representation)},
                      {"seed", s.seed},
                      {"n_trials", s.n_trials()},
                      {"percent_converged", s.percent_converged()},
                      {"trials", std::move(trials)}};
  const auto med = s.median_time_to_target();
  j["median_time_to_target_s"] = med ? nlohmann::json(*med) : nlohmann::json(nullptr);
  return j;
}

// Reads back the fields the report needs; per-trial configs are not restored.
inline SweepSummary sweep_summary_from_json(const nlohmann::json& j) {
  try {
    SweepSummary s;
    s.n_cities = j.at("n_cities").get<int>();
    s.representation = parse_representation(j.at("representation").get<std::string>());
    s.seed = j.value("seed", std::uint64_t{0});
    for (const auto& tj : j.at("trials")) {
      TrialResult t;
      t.index = tj.value("index", 0);
      t.best_energy = tj.at("best_energy").get<double>();
      t.converged = tj.at("converged").get<bool>();
      if (tj.contains("time_to_target_s") && !tj["time_to_target_s"].is_null())
        t.time_to_target_s = tj["time_to_target_s"].get<double>();
      t.steps = tj.value("steps", 0);
      s.trials.push_back(std::move(t));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("malformed sweep summary: ") + e.what());
  }
}

inline constexpr const char* kReportHeader = "n_cities,representation,n_trials,percent_converged,median_time_s";

// One row per (N, representation), sorted; an empty median field means no
// trial converged.
inline std::string report_convergence(const std::vector<SweepSummary>& summaries) {
  std::map<std::pair<int, std::string>, std::vector<const SweepSummary*>> groups;
  for (const auto& s : summaries) groups[{s.n_cities, std::string(to_string(s.representation))}].push_back(&s);
  std::ostringstream out;
  out << kReportHeader << '\n';
  out.setf(std::ios::fixed);
  for (const auto& [key, group] : groups) {
    SweepSummary merged;
    for (const auto* s : group) merged.trials.insert(merged.trials.end(), s->trials.begin(), s->trials.end());
    out.precision(1);
    out << key.first << ',' << key.second << ',' << merged.n_trials() << ',' << merged.percent_converged() << ',';
    if (const auto med = merged.median_time_to_target()) {
      out.precision(6);
      out << *med;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace qtsp
