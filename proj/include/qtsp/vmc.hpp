#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "qtsp/ansatz.hpp"
#include "qtsp/encoding.hpp"
#include "qtsp/errors.hpp"
#include "qtsp/instance.hpp"
#include "qtsp/sampler.hpp"

namespace qtsp {

enum class Representation { qubit, qudit };
enum class NetworkKind { rbm, cnn };

inline std::string_view to_string(Representation r) { return r == Representation::qubit ? "qubit" : "qudit"; }
inline std::string_view to_string(NetworkKind k) { return k == NetworkKind::rbm ? "rbm" : "cnn"; }

inline Representation parse_representation(std::string_view s) {
  if (s == "qubit") return Representation::qubit;
  if (s == "qudit") return Representation::qudit;
  throw InvalidConfig("unknown representation '" + std::string(s) + "'");
}

inline NetworkKind parse_network(std::string_view s) {
  if (s == "rbm") return NetworkKind::rbm;
  if (s == "cnn") return NetworkKind::cnn;
  throw InvalidConfig("unknown network '" + std::string(s) + "'");
}

struct NetworkConfig {
  NetworkKind kind = NetworkKind::cnn;
  int n_hidden = 0;     // N_H; 0 means 2N
  int n_channels = 4;   // F
  int kernel_size = 4;  // K, clamped to N
  double init_scale = 0.01;
};

struct VmcConfig {
  Representation representation = Representation::qudit;
  NetworkConfig network;
  SamplerConfig sampler;
  double learning_rate = 1e-2;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int max_steps = 2000;
  int prune_no_improve_steps = 300;
  double prune_wall_clock_s = 600.0;
  std::optional<double> target_energy;

  void validate(std::size_t n) const {
    if (!(learning_rate >= 0.0)) throw InvalidConfig("learning rate must be non-negative");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
      throw InvalidConfig("Adam betas must lie in [0, 1)");
    if (max_steps < 0) throw InvalidConfig("max_steps must be non-negative");
    if (prune_no_improve_steps < 1) throw InvalidConfig("prune_no_improve_steps must be positive");
    sampler.validate(n);
  }
};

// ---------------------------------------------------------------------------
// Energy estimation

// Sampling never leaves the valid-tour manifold, so the local energy reduces to
// the diagonal element: the QUBO objective of the one-hot image (qubit) or the
// diagonal qudit energy (qudit). Both equal the tour length.
inline double local_energy(const Instance& inst, Representation rep, const QuditConfig& config) {
  if (!is_permutation_of_labels(config, inst.size()))
    throw InvalidTour("local energy requested for an invalid configuration");
  if (rep == Representation::qubit) return qubo_objective(inst, tour_to_onehot(config));
  return cyclic_length_unchecked(inst, config);
}

struct EnergyStats {
  double mean = 0.0;
  double std = 0.0;  // n-1 divisor
};

inline EnergyStats estimate_energy(std::span<const double> local_energies) {
  if (local_energies.empty()) throw InvalidConfig("cannot estimate energy of an empty sample");
  const auto count = static_cast<double>(local_energies.size());
  double mean = 0.0;
  for (double e : local_energies) mean += e;
  mean /= count;
  if (local_energies.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double e : local_energies) ss += (e - mean) * (e - mean);
  return {mean, std::sqrt(ss / (count - 1.0))};
}

inline EnergyStats estimate_energy(const Sample& sample, const Instance& inst, Representation rep) {
  std::vector<double> e;
  e.reserve(sample.configs.size());
  for (const auto& c : sample.configs) e.push_back(local_energy(inst, rep, c));
  return estimate_energy(e);
}

// g_k = 2 Re( <E conj(O_k)> - <E> <conj(O_k)> ), O_k = d log psi / d theta_k,
// evaluated as 2 <(E - <E>) Re O_k>. Averages use `weights` (normalised here)
// when given and the plain sample mean otherwise. Repeated configurations are
// merged so each distinct one is differentiated once.
template <class LogDerivatives>
std::vector<double> estimate_gradient(std::span<const QuditConfig> configs, std::span<const double> local_energies,
                                      std::size_t n_real_params, LogDerivatives&& log_derivatives,
                                      std::span<const double> weights = {}) {
  if (configs.size() != local_energies.size()) throw DimensionMismatch("one local energy per configuration required");
  if (!weights.empty() && weights.size() != configs.size()) throw DimensionMismatch("one weight per configuration required");
  if (configs.empty()) throw InvalidConfig("cannot estimate a gradient from an empty sample");

  double wsum = 0.0;
  for (std::size_t s = 0; s < configs.size(); ++s) wsum += weights.empty() ? 1.0 : weights[s];
  double mean_e = 0.0;
  for (std::size_t s = 0; s < configs.size(); ++s) mean_e += (weights.empty() ? 1.0 : weights[s]) * local_energies[s];
  mean_e /= wsum;

  std::map<QuditConfig, double> coeff;
  for (std::size_t s = 0; s < configs.size(); ++s) {
    const double w = (weights.empty() ? 1.0 : weights[s]) / wsum;
    coeff[configs[s]] += w * (local_energies[s] - mean_e);
  }

  std::vector<double> grad(n_real_params, 0.0);
  std::vector<std::complex<double>> o(n_real_params);
  for (const auto& [config, c] : coeff) {
    if (c == 0.0) continue;
    log_derivatives(config, std::span<std::complex<double>>(o));
    for (std::size_t k = 0; k < n_real_params; ++k) grad[k] += 2.0 * c * o[k].real();
  }
  return grad;
}

// ---------------------------------------------------------------------------
// Adam

struct AdamConfig {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  long step_count = 0;

  AdamState() = default;
  explicit AdamState(std::size_t n) : first_moment(n, 0.0), second_moment(n, 0.0) {}
};

// Bias-corrected Adam step applied in place to `params`.
inline void adam_update(AdamState& state, std::span<double> params, std::span<const double> grad,
                        const AdamConfig& cfg) {
  if (params.size() != grad.size() || state.first_moment.size() != grad.size() ||
      state.second_moment.size() != grad.size())
    throw DimensionMismatch("Adam state, parameters and gradient must have equal length");
  const long t = state.step_count + 1;
  for (std::size_t k = 0; k < grad.size(); ++k)
    if (!std::isfinite(grad[k])) throw NonFiniteGradient(t, k);
  state.step_count = t;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t k = 0; k < grad.size(); ++k) {
    const double g = grad[k];
    double& m = state.first_moment[k];
    double& v = state.second_moment[k];
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
    const double m_hat = m / bc1;
    const double v_hat = v / bc2;
    params[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

// ---------------------------------------------------------------------------
// Training

enum class Termination { max_steps, target_reached, no_improvement, time_limit };

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::max_steps: return "max-steps";
    case Termination::target_reached: return "target-reached";
    case Termination::no_improvement: return "no-improvement";
    case Termination::time_limit: return "time-limit";
  }
  return "unknown";
}

struct StepStats {
  int step = 0;
  double wall_clock_s = 0.0;
  double energy_mean = 0.0;
  double energy_std = 0.0;
  double acceptance_rate = 0.0;
  double best_energy_so_far = 0.0;
  Tour best_tour;
};

struct RunRecord {
  std::vector<StepStats> steps;
  Termination reason = Termination::max_steps;
  double total_time_s = 0.0;
  double best_energy = std::numeric_limits<double>::infinity();
  Tour best_tour;
  std::optional<double> time_to_target_s;
  std::vector<double> final_params;
};

inline constexpr double kImprovementTol = 1e-12;
inline constexpr double kTargetTol = 1e-9;

using StepCallback = std::function<void(const StepStats&)>;

// Sample -> estimate -> Adam update, repeated until a stopping rule fires. The
// best energy starts from the chains' initial states, so a run whose samples
// never beat them stops after exactly prune_no_improve_steps steps.
// `energy` maps a valid tour to its local energy.
template <TourAnsatz A, class EnergyFn>
  requires std::is_invocable_r_v<double, EnergyFn&, const QuditConfig&>
RunRecord train(const Instance& inst, const VmcConfig& cfg, A& ansatz, EnergyFn&& energy,
                const StepCallback& on_step = {}) {
  cfg.validate(inst.size());
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

  RunRecord rec;
  auto chains = init_chains(inst, cfg.sampler);
  for (const auto& ch : chains) {
    const double e = energy(ch.current);
    if (e < rec.best_energy - kImprovementTol) {
      rec.best_energy = e;
      rec.best_tour = ch.current;
    }
  }
  auto reached = [&] { return cfg.target_energy && rec.best_energy <= *cfg.target_energy + kTargetTol; };
  if (reached()) {
    rec.reason = Termination::target_reached;
    rec.time_to_target_s = elapsed();
    rec.total_time_s = rec.time_to_target_s.value();
    rec.final_params = ansatz.flat_params();
    return rec;
  }

  std::vector<double> params = ansatz.flat_params();
  AdamState adam(params.size());
  const AdamConfig adam_cfg{cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps};
  auto log_psi = [&](const QuditConfig& c) { return ansatz.log_psi(c); };
  auto log_derivatives = [&](const QuditConfig& c, std::span<std::complex<double>> out) {
    ansatz.log_derivatives(c, out);
  };

  int last_improvement = 0;
  rec.reason = Termination::max_steps;
  for (int step = 1; step <= cfg.max_steps; ++step) {
    const Sample sample = run_chains(chains, log_psi, cfg.sampler);
    std::vector<double> e_loc;
    e_loc.reserve(sample.configs.size());
    for (std::size_t s = 0; s < sample.configs.size(); ++s) {
      const double e = energy(sample.configs[s]);
      e_loc.push_back(e);
      if (e < rec.best_energy - kImprovementTol) {
        rec.best_energy = e;
        rec.best_tour = sample.configs[s];
        last_improvement = step;
      }
    }
    const EnergyStats stats = estimate_energy(e_loc);
    StepStats st{step, elapsed(), stats.mean, stats.std, sample.acceptance_rate, rec.best_energy, rec.best_tour};
    rec.steps.push_back(st);
    if (on_step) on_step(st);

    if (reached()) {
      rec.reason = Termination::target_reached;
      rec.time_to_target_s = st.wall_clock_s;
      break;
    }
    if (step - last_improvement >= cfg.prune_no_improve_steps) {
      rec.reason = Termination::no_improvement;
      break;
    }
    if (st.wall_clock_s >= cfg.prune_wall_clock_s) {
      rec.reason = Termination::time_limit;
      break;
    }

    const auto grad = estimate_gradient(std::span<const QuditConfig>(sample.configs), std::span<const double>(e_loc),
                                        params.size(), log_derivatives);
    try {
      adam_update(adam, params, grad, adam_cfg);
    } catch (const NonFiniteGradient& e) {
      throw NonFiniteGradient(step, e.index());
    }
    ansatz.set_flat_params(params);
  }
  rec.total_time_s = elapsed();
  rec.final_params = ansatz.flat_params();
  return rec;
}

template <TourAnsatz A>
RunRecord train(const Instance& inst, const VmcConfig& cfg, A& ansatz, const StepCallback& on_step = {}) {
  const Representation rep = cfg.representation;
  return train(inst, cfg, ansatz, [&inst, rep](const QuditConfig& c) { return local_energy(inst, rep, c); }, on_step);
}

}  // namespace qtsp
