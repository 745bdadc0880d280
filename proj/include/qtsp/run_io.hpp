#pragma once

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "qtsp/errors.hpp"
#include "qtsp/vmc.hpp"

#ifndef QTSP_VERSION
#define QTSP_VERSION "0.0.0"
#endif

namespace qtsp {

inline std::string version_string() { return std::string("qtsp ") + QTSP_VERSION; }

inline nlohmann::json to_json(const SamplerConfig& s) {
  return {{"n_chains", s.n_chains},   {"n_swaps", s.n_swaps},         {"max_swap_len", s.max_swap_len},
          {"fix_first", s.fix_first}, {"sample_size", s.sample_size}, {"warmup", s.warmup},
          {"seed", s.seed}};
}

inline nlohmann::json to_json(const NetworkConfig& n) {
  return {{"kind", to_string(n.kind)},
          {"n_hidden", n.n_hidden},
          {"n_channels", n.n_channels},
          {"kernel_size", n.kernel_size},
          {"init_scale", n.init_scale}};
}

inline nlohmann::json to_json(const VmcConfig& c) {
  nlohmann::json j = {{"representation", to_string(c.representation)},
                      {"network", to_json(c.network)},
                      {"sampler", to_json(c.sampler)},
                      {"learning_rate", c.learning_rate},
                      {"adam_beta1", c.adam_beta1},
                      {"adam_beta2", c.adam_beta2},
                      {"adam_eps", c.adam_eps},
                      {"max_steps", c.max_steps},
                      {"prune_no_improve_steps", c.prune_no_improve_steps},
                      {"prune_wall_clock_s", c.prune_wall_clock_s}};
  j["target_energy"] = c.target_energy ? nlohmann::json(*c.target_energy) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json to_json(const StepStats& s) {
  return {{"type", "step"},
          {"step", s.step},
          {"wall_clock_s", s.wall_clock_s},
          {"energy_mean", s.energy_mean},
          {"energy_std", s.energy_std},
          {"acceptance_rate", s.acceptance_rate},
          {"best_energy_so_far", s.best_energy_so_far},
          {"best_tour", s.best_tour}};
}

inline nlohmann::json footer_json(const RunRecord& r) {
  nlohmann::json j = {{"type", "footer"},
                      {"reason", to_string(r.reason)},
                      {"total_time_s", r.total_time_s},
                      {"steps", r.steps.size()},
                      {"best_energy", r.best_energy},
                      {"best_tour", r.best_tour}};
  j["time_to_target_s"] = r.time_to_target_s ? nlohmann::json(*r.time_to_target_s) : nlohmann::json(nullptr);
  return j;
}

// Run log: a header line, one line per MC step, a footer line. Every line is
// flushed as written so the file can be followed while a run is in progress.
class RunLogWriter {
 public:
  explicit RunLogWriter(const std::string& path) : out_(path, std::ios::out | std::ios::trunc) {
    if (!out_) throw Error("cannot write " + path);
  }

  void header(const VmcConfig& cfg, std::size_t n_cities, std::uint64_t seed) {
    write({{"type", "header"},
           {"version", version_string()},
           {"n_cities", n_cities},
           {"seed", seed},
           {"config", to_json(cfg)}});
  }
  void step(const StepStats& s) { write(to_json(s)); }
  void footer(const RunRecord& r) { write(footer_json(r)); }

 private:
  void write(const nlohmann::json& j) { out_ << j.dump() << '\n' << std::flush; }
  std::ofstream out_;
};

}  // namespace qtsp
