#pragma once

// Test-only reference computations. Nothing here calls into the code paths it
// is used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "qtsp/qtsp.hpp"

namespace qtsp::oracle {

using cld = std::complex<long double>;

// psi = exp(sum_j a_j s_j) * prod_l 2 cosh(b_l + sum_j W_lj s_j), in long double.
inline cld rbm_psi_product(const nqs::RbmParams& p, const std::vector<int>& sigma) {
  cld lin = 0.0L;
  for (Eigen::Index j = 0; j < p.n_visible(); ++j)
    lin += cld(p.a(j).real(), p.a(j).imag()) * static_cast<long double>(sigma[static_cast<std::size_t>(j)]);
  cld psi = std::exp(lin);
  for (Eigen::Index l = 0; l < p.n_hidden(); ++l) {
    cld theta(p.b(l).real(), p.b(l).imag());
    for (Eigen::Index j = 0; j < p.n_visible(); ++j)
      theta += cld(p.W(l, j).real(), p.W(l, j).imag()) * static_cast<long double>(sigma[static_cast<std::size_t>(j)]);
    psi *= 2.0L * std::cosh(theta);
  }
  return psi;
}

// Literal 1-based transcription: O_if = g(sum_{k=1..K} W_kf n_{(i+k) mod N} + b_f),
// with index 0 read as N, g applied to real and imaginary parts separately.
inline cld cnn_log_psi_direct(const nqs::CnnParams& p, const std::vector<int>& n) {
  const std::size_t N = n.size(), K = p.kernel_size, F = p.n_channels;
  std::vector<std::vector<cld>> O(N + 1, std::vector<cld>(F));
  for (std::size_t i = 1; i <= N; ++i)
    for (std::size_t f = 0; f < F; ++f) {
      cld z(p.b[f].real(), p.b[f].imag());
      for (std::size_t k = 1; k <= K; ++k) {
        std::size_t idx = (i + k) % N;
        if (idx == 0) idx = N;
        const auto w = p.W[(k - 1) * F + f];
        z += cld(w.real(), w.imag()) * static_cast<long double>(n[idx - 1]);
      }
      O[i][f] = cld(std::max(0.0L, z.real()), std::max(0.0L, z.imag()));
    }
  cld out(p.dense_b.real(), p.dense_b.imag());
  for (std::size_t f = 0; f < F; ++f) {
    cld o = 0.0L;
    for (std::size_t i = 1; i <= N; ++i) o += O[i][f];
    out += cld(p.dense_w[f].real(), p.dense_w[f].imag()) * o;
  }
  return out;
}

// Central differences of a complex function of a real parameter vector.
inline std::vector<std::complex<double>> finite_difference(
    const std::function<std::complex<double>(const std::vector<double>&)>& f, std::vector<double> x, double h) {
  std::vector<std::complex<double>> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double x0 = x[k];
    x[k] = x0 + h;
    const auto fp = f(x);
    x[k] = x0 - h;
    const auto fm = f(x);
    x[k] = x0;
    g[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Largest componentwise relative error, skipping pairs where both are ~0.
inline double max_relative_error(const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b,
                                 double zero = 1e-9) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double scale = std::max(std::abs(a[k]), std::abs(b[k]));
    if (scale < zero) continue;
    worst = std::max(worst, std::abs(a[k] - b[k]) / scale);
  }
  return worst;
}

inline std::vector<Tour> all_permutations(std::size_t n) {
  std::vector<Tour> out;
  Tour t = identity_tour(n);
  do out.push_back(t);
  while (std::next_permutation(t.begin(), t.end()));
  return out;
}

// <H> = sum |psi|^2 E / sum |psi|^2 by full enumeration.
template <class LogPsi>
double exact_energy(const std::vector<Tour>& tours, const std::vector<double>& energies, LogPsi&& log_psi) {
  std::vector<double> lw;
  for (const auto& t : tours) lw.push_back(2.0 * log_psi(t).real());
  const double mx = *std::max_element(lw.begin(), lw.end());
  double num = 0.0, den = 0.0;
  for (std::size_t s = 0; s < tours.size(); ++s) {
    const double w = std::exp(lw[s] - mx);
    num += w * energies[s];
    den += w;
  }
  return num / den;
}

inline Instance random_instance(std::size_t n, std::mt19937_64& rng, bool integer_valued = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> ui(1, 100);
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = integer_valued ? ui(rng) : u(rng);
  return Instance(n, std::move(d));
}

inline Tour random_tour(std::size_t n, std::mt19937_64& rng) {
  Tour t = identity_tour(n);
  std::shuffle(t.begin(), t.end(), rng);
  return t;
}

// Upper 1% points of the chi-square distribution (scipy.stats.chi2.ppf(0.99, df)).
inline constexpr double kChi2Crit99_df23 = 41.638398118858476;

}  // namespace qtsp::oracle
