#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtsp/errors.hpp"

namespace qtsp {

// City labels are 1-based throughout the public API: a tour over N cities is a
// sequence of labels in 1..N. The same type doubles as a qudit configuration,
// which may repeat labels; validity is a checked predicate, not an invariant.
using Tour = std::vector<int>;
using QuditConfig = Tour;

class Instance {
 public:
  Instance(std::size_t n_cities, std::vector<double> dist,
           std::optional<std::vector<double>> coords = std::nullopt)
      : n_(n_cities), dist_(std::move(dist)), coords_(std::move(coords)) {
    if (n_ < 2) throw InvalidInstance("instance needs at least 2 cities");
    if (dist_.size() != n_ * n_)
      throw InvalidInstance("distance matrix must be " + std::to_string(n_) + "x" +
                            std::to_string(n_));
    if (coords_ && coords_->size() != n_)
      throw InvalidInstance("coords length does not match n_cities");
    for (std::size_t i = 0; i < n_; ++i) {
      if (dist_[i * n_ + i] != 0.0) throw InvalidInstance("distance matrix diagonal must be zero");
      for (std::size_t j = 0; j < n_; ++j) {
        const double v = dist_[i * n_ + j];
        if (!std::isfinite(v) || v < 0.0)
          throw InvalidInstance("distances must be finite and non-negative");
        if (v != dist_[j * n_ + i]) throw InvalidInstance("distance matrix must be symmetric");
      }
    }
  }

  std::size_t size() const noexcept { return n_; }

  // Distance between 1-based city labels.
  double distance(int a, int b) const noexcept {
    return dist_[static_cast<std::size_t>(a - 1) * n_ + static_cast<std::size_t>(b - 1)];
  }

  const std::vector<double>& dist() const noexcept { return dist_; }
  const std::optional<std::vector<double>>& coords() const noexcept { return coords_; }

  double max_distance() const noexcept { return *std::max_element(dist_.begin(), dist_.end()); }

  // True for the planted layout x_i = i produced by linear_instance.
  bool is_planted_linear() const {
    if (!coords_) return false;
    for (std::size_t i = 0; i < n_; ++i)
      if ((*coords_)[i] != static_cast<double>(i + 1)) return false;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (dist_[i * n_ + j] != std::abs((*coords_)[i] - (*coords_)[j])) return false;
    return true;
  }

 private:
  std::size_t n_;
  std::vector<double> dist_;
  std::optional<std::vector<double>> coords_;
};

// Cities on a line at x_i = i, so the shortest tour has length 2(N-1).
inline Instance linear_instance(int n_cities) {
  if (n_cities < 2) throw InvalidInstance("linear instance needs n_cities >= 2");
  const auto n = static_cast<std::size_t>(n_cities);
  std::vector<double> coords(n);
  std::iota(coords.begin(), coords.end(), 1.0);
  std::vector<double> dist(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dist[i * n + j] = std::abs(coords[i] - coords[j]);
  return Instance(n, std::move(dist), std::move(coords));
}

inline double planted_optimum(int n_cities) {
  if (n_cities < 2) throw InvalidInstance("planted optimum needs n_cities >= 2");
  return 2.0 * (n_cities - 1);
}

inline bool is_permutation_of_labels(const QuditConfig& n, std::size_t n_cities) {
  if (n.size() != n_cities) return false;
  std::vector<char> seen(n_cities, 0);
  for (int v : n) {
    if (v < 1 || static_cast<std::size_t>(v) > n_cities) return false;
    if (seen[static_cast<std::size_t>(v - 1)]++) return false;
  }
  return true;
}

// Cyclic sum of consecutive distances with no validity check. Entries must be in 1..N.
inline double cyclic_length_unchecked(const Instance& inst, const QuditConfig& n) {
  double total = 0.0;
  const std::size_t len = n.size();
  for (std::size_t k = 0; k < len; ++k) total += inst.distance(n[k], n[(k + 1) % len]);
  return total;
}

inline double tour_length(const Instance& inst, const Tour& tour) {
  if (!is_permutation_of_labels(tour, inst.size()))
    throw InvalidTour("tour is not a permutation of 1..N");
  return cyclic_length_unchecked(inst, tour);
}

// Left rotation by k positions: rotate((a,b,c), 1) == (b,c,a).
inline Tour rotate(Tour t, std::size_t k) {
  if (!t.empty()) std::rotate(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(k % t.size()), t.end());
  return t;
}

inline Tour identity_tour(std::size_t n) {
  Tour t(n);
  std::iota(t.begin(), t.end(), 1);
  return t;
}

struct TourResult {
  Tour tour;
  double length = 0.0;
};

inline constexpr std::size_t kBruteForceMaxCities = 12;

// Exhaustive search over the (N-1)!/2 distinct cycles: city 1 is pinned first and
// only the orientation with tour[1] < tour[N-1] is scored.
inline TourResult brute_force_optimum(const Instance& inst) {
  const std::size_t n = inst.size();
  if (n > kBruteForceMaxCities)
    throw SizeLimit("brute force limited to " + std::to_string(kBruteForceMaxCities) + " cities");
  Tour tour = identity_tour(n);
  TourResult best{tour, cyclic_length_unchecked(inst, tour)};
  if (n <= 3) return best;
  while (std::next_permutation(tour.begin() + 1, tour.end())) {
    if (tour[1] > tour[n - 1]) continue;
    const double len = cyclic_length_unchecked(inst, tour);
    if (len < best.length) best = {tour, len};
  }
  return best;
}

// Greedy start tour: from the current city, always move to the unvisited city
// farthest from it, ties going to the smallest label.
inline Tour farthest_city_tour(const Instance& inst, int start_city) {
  const auto n = static_cast<int>(inst.size());
  if (start_city < 1 || start_city > n) throw InvalidTour("start city out of range");
  std::vector<char> visited(static_cast<std::size_t>(n) + 1, 0);
  Tour tour{start_city};
  visited[static_cast<std::size_t>(start_city)] = 1;
  int current = start_city;
  while (tour.size() < static_cast<std::size_t>(n)) {
    int next = 0;
    double best = -1.0;
    for (int c = 1; c <= n; ++c) {
      if (visited[static_cast<std::size_t>(c)]) continue;
      const double d = inst.distance(current, c);
      if (d > best) {
        best = d;
        next = c;
      }
    }
    tour.push_back(next);
    visited[static_cast<std::size_t>(next)] = 1;
    current = next;
  }
  return tour;
}

// ---------------------------------------------------------------------------
// JSON: {"n_cities": int, "coords": [float] | null, "dist": [[float]]}

inline nlohmann::json instance_to_json(const Instance& inst) {
  const std::size_t n = inst.size();
  nlohmann::json dist = nlohmann::json::array();
  for (std::size_t i = 0; i < n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < n; ++j) row.push_back(inst.dist()[i * n + j]);
    dist.push_back(std::move(row));
  }
  nlohmann::json j;
  j["n_cities"] = n;
  j["coords"] = inst.coords() ? nlohmann::json(*inst.coords()) : nlohmann::json(nullptr);
  j["dist"] = std::move(dist);
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
  try {
    const auto n = j.at("n_cities").get<long long>();
    if (n < 2) throw InvalidInstance("n_cities must be >= 2");
    const auto& rows = j.at("dist");
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(n))
      throw InvalidInstance("dist must have n_cities rows");
    std::vector<double> dist;
    dist.reserve(static_cast<std::size_t>(n * n));
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
        throw InvalidInstance("dist rows must have n_cities entries");
      for (const auto& v : row) dist.push_back(v.get<double>());
    }
    std::optional<std::vector<double>> coords;
    if (j.contains("coords") && !j["coords"].is_null()) coords = j["coords"].get<std::vector<double>>();
    return Instance(static_cast<std::size_t>(n), std::move(dist), std::move(coords));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInstance(std::string("malformed instance JSON: ") + e.what());
  }
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInstance("cannot open instance file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInstance("cannot parse " + path + ": " + e.what());
  }
  return instance_from_json(j);
}

inline void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << instance_to_json(inst).dump(2) << '\n';
}

}  // namespace qtsp
