#pragma once

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qtsp/errors.hpp"
#include "qtsp/instance.hpp"

namespace qtsp {

// ---------------------------------------------------------------------------
// Qubit (one-hot) picture

// z(i, a) == 1 iff city i+1 occupies tour position a+1. Stored city-major.
struct SpinConfig {
  std::size_t n = 0;
  std::vector<int> z;

  explicit SpinConfig(std::size_t n_cities) : n(n_cities), z(n_cities * n_cities, 0) {}

  int& operator()(std::size_t city, std::size_t pos) { return z[city * n + pos]; }
  int operator()(std::size_t city, std::size_t pos) const { return z[city * n + pos]; }

  // sigma = 2z - 1, same layout.
  std::vector<int> sigma() const {
    std::vector<int> s(z.size());
    std::transform(z.begin(), z.end(), s.begin(), [](int v) { return 2 * v - 1; });
    return s;
  }
};

// Coefficients multiplying the two constraint sums of the QUBO objective.
struct QuboPenalty {
  double position = 1.0;  // sum_a (sum_i z_ia - 1)^2
  double city = 1.0;      // sum_i (sum_a z_ia - 1)^2
};

inline SpinConfig tour_to_onehot(const Tour& tour) {
  if (!is_permutation_of_labels(tour, tour.size()) || tour.empty())
    throw InvalidTour("one-hot encoding needs a valid tour");
  SpinConfig s(tour.size());
  for (std::size_t a = 0; a < tour.size(); ++a) s(static_cast<std::size_t>(tour[a] - 1), a) = 1;
  return s;
}

inline Tour onehot_to_tour(const SpinConfig& s) {
  const std::size_t n = s.n;
  if (s.z.size() != n * n) throw DimensionMismatch("spin config is not N x N");
  Tour tour(n, 0);
  std::vector<int> row_sum(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    int col_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int v = s(i, a);
      if (v != 0 && v != 1) throw InvalidTour("spin config entries must be binary");
      if (v) {
        tour[a] = static_cast<int>(i + 1);
        ++col_sum;
        ++row_sum[i];
      }
    }
    if (col_sum != 1) throw InvalidTour("position " + std::to_string(a + 1) + " is not occupied exactly once");
  }
  for (std::size_t i = 0; i < n; ++i)
    if (row_sum[i] != 1) throw InvalidTour("city " + std::to_string(i + 1) + " is not visited exactly once");
  return tour;
}

// Distance term with cyclic position index plus the two squared constraint sums.
inline double qubo_objective(const Instance& inst, const SpinConfig& s, QuboPenalty pen = {}) {
  const std::size_t n = inst.size();
  if (s.n != n || s.z.size() != n * n) throw DimensionMismatch("spin config does not match instance size");
  double distance = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t next = (a + 1) % n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!s(i, a)) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (s(j, next)) distance += inst.dist()[i * n + j] * s(i, a) * s(j, next);
    }
  }
  double position_term = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    double sum = -1.0;
    for (std::size_t i = 0; i < n; ++i) sum += s(i, a);
    position_term += sum * sum;
  }
  double city_term = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = -1.0;
    for (std::size_t a = 0; a < n; ++a) sum += s(i, a);
    city_term += sum * sum;
  }
  return distance + pen.position * position_term + pen.city * city_term;
}

// Ising form of the QUBO objective, obtained by substituting z = (sigma + 1) / 2.
inline double ising_energy(const Instance& inst, std::span<const int> sigma, QuboPenalty pen = {}) {
  const std::size_t n = inst.size();
  if (sigma.size() != n * n) throw DimensionMismatch("sigma must have N^2 entries");
  SpinConfig s(n);
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    if (sigma[k] != 1 && sigma[k] != -1) throw InvalidConfig("spin entries must be -1 or +1");
    s.z[k] = (sigma[k] + 1) / 2;
  }
  return qubo_objective(inst, s, pen);
}

// ---------------------------------------------------------------------------
// Qudit picture

struct PenaltyConfig {
  double p = 0.0;        // diagonal penalty for invalid configurations
  double p_prime = 0.0;  // two-body penalty on each ring bond

  // Both penalties default to 10 * N * max d.
  static PenaltyConfig defaults(const Instance& inst) {
    const double v = 10.0 * static_cast<double>(inst.size()) * inst.max_distance();
    return {v, v};
  }

  static PenaltyConfig checked(const Instance& inst, double p, double p_prime) {
    const double dmax = inst.max_distance();
    if (!(p > dmax) || !(p_prime > dmax))
      throw InvalidConfig("penalties must exceed the largest distance " + std::to_string(dmax));
    return {p, p_prime};
  }
};

inline bool is_valid_tour(const QuditConfig& n) { return is_permutation_of_labels(n, n.size()); }

inline void check_levels(const Instance& inst, const QuditConfig& n) {
  if (n.size() != inst.size()) throw DimensionMismatch("qudit config length must equal N");
  for (int v : n)
    if (v < 1 || static_cast<std::size_t>(v) > inst.size())
      throw InvalidConfig("qudit level out of range 1..N");
}

inline double qudit_diagonal_energy(const Instance& inst, const QuditConfig& n, const PenaltyConfig& pen) {
  check_levels(inst, n);
  return is_valid_tour(n) ? cyclic_length_unchecked(inst, n) : pen.p;
}

// <i,j|D|l,m> = d_ij delta_il delta_jm + p' (2 - delta_il - delta_jm)
inline double twobody_element(const Instance& inst, int i, int j, int l, int m, const PenaltyConfig& pen) {
  const int dil = (i == l) ? 1 : 0;
  const int djm = (j == m) ? 1 : 0;
  return inst.distance(i, j) * dil * djm + pen.p_prime * (2 - dil - djm);
}

// <n| sum_k D^(k,k+1 mod N) |m>, each bond operator tensored with identity elsewhere.
inline double ring_hamiltonian_element(const Instance& inst, const QuditConfig& n, const QuditConfig& m,
                                       const PenaltyConfig& pen) {
  check_levels(inst, n);
  check_levels(inst, m);
  const std::size_t len = n.size();
  std::vector<std::size_t> diff;
  for (std::size_t s = 0; s < len; ++s)
    if (n[s] != m[s]) diff.push_back(s);
  if (diff.size() > 2) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    const std::size_t k1 = (k + 1) % len;
    const bool spectators_agree =
        std::all_of(diff.begin(), diff.end(), [&](std::size_t s) { return s == k || s == k1; });
    if (spectators_agree) total += twobody_element(inst, n[k], n[k1], m[k], m[k1], pen);
  }
  return total;
}

enum class HamiltonianVariant { eq2, eq4 };

inline constexpr std::size_t kDenseMaxCities = 5;

inline std::size_t int_pow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  while (exp--) r *= base;
  return r;
}

// Basis state at lexicographic index `index` over levels 1..N.
inline QuditConfig basis_state(std::size_t index, std::size_t n) {
  QuditConfig c(n);
  for (std::size_t s = n; s-- > 0;) {
    c[s] = static_cast<int>(index % n) + 1;
    index /= n;
  }
  return c;
}

inline std::size_t basis_index(const QuditConfig& c) {
  const std::size_t n = c.size();
  std::size_t index = 0;
  for (int v : c) index = index * n + static_cast<std::size_t>(v - 1);
  return index;
}

inline std::string basis_label(const QuditConfig& c) {
  std::string s;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k) s += '-';
    s += std::to_string(c[k]);
  }
  return s;
}

// Full N^N x N^N matrix in lexicographic basis order.
inline Eigen::MatrixXd dense_hamiltonian(const Instance& inst, HamiltonianVariant variant,
                                         const PenaltyConfig& pen) {
  const std::size_t n = inst.size();
  if (n > kDenseMaxCities)
    throw SizeLimit("dense Hamiltonian limited to " + std::to_string(kDenseMaxCities) + " cities");
  const std::size_t dim = int_pow(n, n);
  std::vector<QuditConfig> basis(dim);
  for (std::size_t k = 0; k < dim; ++k) basis[k] = basis_state(k, n);

  Eigen::MatrixXd h(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = r; c < dim; ++c) {
      double v = 0.0;
      if (variant == HamiltonianVariant::eq2)
        v = (r == c) ? qudit_diagonal_energy(inst, basis[r], pen) : pen.p;
      else
        v = ring_hamiltonian_element(inst, basis[r], basis[c], pen);
      h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
      h(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = v;
    }
  }
  return h;
}

// Row-major CSV; header and first column carry basis labels.
inline void write_hamiltonian_csv(std::ostream& out, const Eigen::MatrixXd& h, std::size_t n) {
  const auto dim = static_cast<std::size_t>(h.rows());
  out << "basis";
  for (std::size_t c = 0; c < dim; ++c) out << ',' << basis_label(basis_state(c, n));
  out << '\n';
  out.precision(17);
  for (std::size_t r = 0; r < dim; ++r) {
    out << basis_label(basis_state(r, n));
    for (std::size_t c = 0; c < dim; ++c)
      out << ',' << h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    out << '\n';
  }
}

inline constexpr std::size_t kValidSubspaceMaxCities = 8;

// Minimum diagonal energy over all N! valid configurations (no symmetry reduction).
inline TourResult exact_ground_valid_subspace(const Instance& inst) {
  const std::size_t n = inst.size();
  if (n > kValidSubspaceMaxCities)
    throw SizeLimit("valid-subspace enumeration limited to " + std::to_string(kValidSubspaceMaxCities) +
                    " cities");
  const PenaltyConfig pen = PenaltyConfig::defaults(inst);
  QuditConfig c = identity_tour(n);
  TourResult best{c, qudit_diagonal_energy(inst, c, pen)};
  while (std::next_permutation(c.begin(), c.end())) {
    const double e = qudit_diagonal_energy(inst, c, pen);
    if (e < best.length) best = {c, e};
  }
  return best;
}

}  // namespace qtsp
