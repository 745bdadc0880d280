#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qtsp/errors.hpp"
#include "qtsp/instance.hpp"
#include "qtsp/rng.hpp"

namespace qtsp {

struct SamplerConfig {
  int n_chains = 8;          // N_MC
  int n_swaps = 1;           // N_S, swaps composed into one proposal
  int max_swap_len = 0;      // l_S, cyclic position distance; 0 means N
  bool fix_first = true;     // keep city 1 pinned to position 1
  int sample_size = 512;     // S, recorded configurations per pass
  int warmup = -1;           // steps discarded per chain per pass; -1 means 10 N
  std::uint64_t seed = 0;

  int swap_len(std::size_t n) const { return max_swap_len > 0 ? max_swap_len : static_cast<int>(n); }
  int warmup_steps(std::size_t n) const { return warmup >= 0 ? warmup : 10 * static_cast<int>(n); }

  void validate(std::size_t n) const {
    if (n_chains < 1) throw InvalidConfig("n_chains must be positive");
    if (n_swaps < 1) throw InvalidConfig("n_swaps must be positive");
    if (swap_len(n) < 1 || swap_len(n) > static_cast<int>(n))
      throw InvalidConfig("max_swap_len must be in 1..N");
    if (sample_size < n_chains) throw InvalidConfig("sample_size must be at least n_chains");
  }
};

struct ChainState {
  QuditConfig current;
  std::complex<double> log_psi_current{0.0, 0.0};
  Rng rng;
  long n_accepted = 0;
  long n_proposed = 0;
};

// Chain c draws from stream c of the sampler seed.
inline std::vector<ChainState> init_chains(const Instance& inst, const SamplerConfig& cfg) {
  cfg.validate(inst.size());
  std::vector<ChainState> chains;
  chains.reserve(static_cast<std::size_t>(cfg.n_chains));
  for (int c = 0; c < cfg.n_chains; ++c) {
    ChainState st;
    st.rng = make_stream(cfg.seed, static_cast<std::uint64_t>(c));
    int start = 1;
    if (!cfg.fix_first) {
      std::uniform_int_distribution<int> pick(1, static_cast<int>(inst.size()));
      start = pick(st.rng);
    }
    st.current = farthest_city_tour(inst, start);
    chains.push_back(std::move(st));
  }
  return chains;
}

inline std::size_t cyclic_distance(std::size_t p, std::size_t q, std::size_t n) {
  const std::size_t d = p > q ? p - q : q - p;
  return std::min(d, n - d);
}

// N_S successive swaps. Each picks a first position uniformly, then a distinct
// second position uniformly among those within l_S of it around the ring.
// Position 1 is never picked when fix_first is set.
inline QuditConfig propose_swap(ChainState& state, const SamplerConfig& cfg) {
  QuditConfig next = state.current;
  const std::size_t n = next.size();
  const std::size_t lo = cfg.fix_first ? 1 : 0;
  if (n < lo + 2) return next;
  const auto ell = static_cast<std::size_t>(cfg.swap_len(n));
  for (int s = 0; s < cfg.n_swaps; ++s) {
    std::uniform_int_distribution<std::size_t> first(lo, n - 1);
    const std::size_t p = first(state.rng);
    std::size_t count = 0;
    for (std::size_t q = lo; q < n; ++q)
      if (q != p && cyclic_distance(p, q, n) <= ell) ++count;
    if (count == 0) continue;
    std::uniform_int_distribution<std::size_t> second(0, count - 1);
    std::size_t r = second(state.rng);
    for (std::size_t q = lo; q < n; ++q) {
      if (q == p || cyclic_distance(p, q, n) > ell) continue;
      if (r-- == 0) {
        std::swap(next[p], next[q]);
        break;
      }
    }
  }
  return next;
}

// Metropolis acceptance with probability min(1, |psi'/psi|^2). A proposal whose
// log-amplitude has a non-finite real part (psi' = 0 or NaN) is rejected.
template <class LogPsi>
bool mh_step(ChainState& state, const SamplerConfig& cfg, LogPsi&& log_psi) {
  QuditConfig proposal = propose_swap(state, cfg);
  const std::complex<double> lp = log_psi(proposal);
  ++state.n_proposed;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(state.rng);
  const double log_ratio = 2.0 * (lp.real() - state.log_psi_current.real());
  if (!std::isfinite(lp.real()) || std::isnan(log_ratio)) return false;
  if (log_ratio >= 0.0 || u < std::exp(log_ratio)) {
    state.current = std::move(proposal);
    state.log_psi_current = lp;
    ++state.n_accepted;
    return true;
  }
  return false;
}

struct Sample {
  std::vector<QuditConfig> configs;
  std::vector<std::complex<double>> log_psi;
  double acceptance_rate = 0.0;  // over all proposals made in this pass
};

// One sampling pass: refresh cached amplitudes, discard the warm-up prefix, then
// record sample_size configurations split across chains (the last chain takes
// the remainder). Configurations are merged in chain order.
template <class LogPsi>
Sample run_chains(std::vector<ChainState>& chains, LogPsi&& log_psi, const SamplerConfig& cfg) {
  if (chains.empty()) throw InvalidConfig("no chains to run");
  const std::size_t n = chains.front().current.size();
  const int n_chains = static_cast<int>(chains.size());
  const int per_chain = cfg.sample_size / n_chains;
  const int warmup = cfg.warmup_steps(n);

  Sample out;
  out.configs.reserve(static_cast<std::size_t>(cfg.sample_size));
  out.log_psi.reserve(static_cast<std::size_t>(cfg.sample_size));
  long accepted = 0, proposed = 0;
  for (int c = 0; c < n_chains; ++c) {
    ChainState& st = chains[static_cast<std::size_t>(c)];
    const long acc0 = st.n_accepted, prop0 = st.n_proposed;
    st.log_psi_current = log_psi(st.current);
    const int record = (c == n_chains - 1) ? cfg.sample_size - per_chain * (n_chains - 1) : per_chain;
    for (int k = 0; k < warmup; ++k) mh_step(st, cfg, log_psi);
    for (int k = 0; k < record; ++k) {
      mh_step(st, cfg, log_psi);
      out.configs.push_back(st.current);
      out.log_psi.push_back(st.log_psi_current);
    }
    accepted += st.n_accepted - acc0;
    proposed += st.n_proposed - prop0;
  }
  out.acceptance_rate = proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
  return out;
}

}  // namespace qtsp
