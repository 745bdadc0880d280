#pragma once

#include <complex>
#include <concepts>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qtsp/errors.hpp"
#include "qtsp/instance.hpp"
#include "qtsp/nqs/cnn.hpp"
#include "qtsp/nqs/rbm.hpp"

namespace qtsp {

using nqs::cd;

// A variational amplitude over tour configurations, parameterised by a flat
// vector of real components. log_derivatives writes d log psi / d theta_k for
// every real component k into `out` (length n_real_params()).
template <class A>
concept TourAnsatz = requires(const A& a, const QuditConfig& n, std::span<cd> out) {
  { a.log_psi(n) } -> std::convertible_to<cd>;
  { a.n_real_params() } -> std::convertible_to<std::size_t>;
  { a.flat_params() } -> std::same_as<std::vector<double>>;
  a.log_derivatives(n, out);
} && requires(A& a, std::span<const double> flat) { a.set_flat_params(flat); };

// Qubit representation: the tour is one-hot encoded into N^2 spins (city-major,
// index i*N + position) and fed to a complex RBM.
class QubitRbmAnsatz {
 public:
  QubitRbmAnsatz(std::size_t n_cities, nqs::RbmParams params) : n_(n_cities), params_(std::move(params)) {
    params_.check();
    if (params_.n_visible() != static_cast<Eigen::Index>(n_ * n_))
      throw DimensionMismatch("RBM visible layer must have N^2 units");
    refresh();
  }

  const nqs::RbmParams& params() const { return params_; }
  std::size_t n_real_params() const { return 2 * params_.n_complex(); }

  std::vector<double> flat_params() const {
    const auto c = params_.to_complex();
    std::vector<double> flat(2 * c.size());
    nqs::pack_complex(c, flat);
    return flat;
  }

  void set_flat_params(std::span<const double> flat) {
    std::vector<cd> c(params_.n_complex());
    nqs::unpack_complex(flat, c);
    params_.from_complex(c);
    refresh();
  }

  // Only N of the N^2 spins are +1, so theta = (b - W 1) + 2 sum_{up} W_col.
  cd log_psi(const QuditConfig& tour) const {
    Eigen::VectorXcd theta = theta_base_;
    cd linear = -a_sum_;
    for (std::size_t pos = 0; pos < n_; ++pos) {
      const auto j = visible_index(tour, pos);
      theta += 2.0 * params_.W.col(j);
      linear += 2.0 * params_.a(j);
    }
    cd out = linear;
    for (Eigen::Index l = 0; l < theta.size(); ++l) out += nqs::log_2cosh(theta(l));
    return out;
  }

  void log_derivatives(const QuditConfig& tour, std::span<cd> out) const {
    if (out.size() != n_real_params()) throw DimensionMismatch("derivative buffer has wrong length");
    const Eigen::Index nv = params_.n_visible(), nh = params_.n_hidden();
    std::vector<double> sigma(static_cast<std::size_t>(nv), -1.0);
    Eigen::VectorXcd theta = theta_base_;
    for (std::size_t pos = 0; pos < n_; ++pos) {
      const auto j = visible_index(tour, pos);
      sigma[static_cast<std::size_t>(j)] = 1.0;
      theta += 2.0 * params_.W.col(j);
    }
    const cd I(0.0, 1.0);
    std::size_t p = 0;
    auto put = [&](cd d) {
      out[2 * p] = d;
      out[2 * p + 1] = I * d;
      ++p;
    };
    for (Eigen::Index j = 0; j < nv; ++j) put(sigma[static_cast<std::size_t>(j)]);
    std::vector<cd> t(static_cast<std::size_t>(nh));
    for (Eigen::Index l = 0; l < nh; ++l) {
      t[static_cast<std::size_t>(l)] = nqs::tanh_stable(theta(l));
      put(t[static_cast<std::size_t>(l)]);
    }
    for (Eigen::Index l = 0; l < nh; ++l)
      for (Eigen::Index j = 0; j < nv; ++j) put(sigma[static_cast<std::size_t>(j)] * t[static_cast<std::size_t>(l)]);
  }

  std::vector<int> spins(const QuditConfig& tour) const {
    std::vector<int> s(n_ * n_, -1);
    for (std::size_t pos = 0; pos < n_; ++pos) s[static_cast<std::size_t>(visible_index(tour, pos))] = 1;
    return s;
  }

 private:
  Eigen::Index visible_index(const QuditConfig& tour, std::size_t pos) const {
    return static_cast<Eigen::Index>(static_cast<std::size_t>(tour[pos] - 1) * n_ + pos);
  }

  void refresh() {
    theta_base_ = params_.b - params_.W.rowwise().sum();
    a_sum_ = params_.a.sum();
  }

  std::size_t n_;
  nqs::RbmParams params_;
  Eigen::VectorXcd theta_base_;
  cd a_sum_{0.0, 0.0};
};

// Qudit representation: the raw levels n_i are the CNN input.
class QuditCnnAnsatz {
 public:
  QuditCnnAnsatz(std::size_t n_cities, nqs::CnnParams params) : n_(n_cities), params_(std::move(params)) {
    params_.check();
    if (params_.kernel_size > n_) throw DimensionMismatch("kernel size exceeds number of cities");
  }

  const nqs::CnnParams& params() const { return params_; }
  std::size_t n_real_params() const { return 2 * params_.n_complex(); }

  std::vector<double> flat_params() const {
    const auto c = params_.to_complex();
    std::vector<double> flat(2 * c.size());
    nqs::pack_complex(c, flat);
    return flat;
  }

  void set_flat_params(std::span<const double> flat) {
    std::vector<cd> c(params_.n_complex());
    nqs::unpack_complex(flat, c);
    params_.from_complex(c);
  }

  cd log_psi(const QuditConfig& n) const { return nqs::cnn_log_psi(params_, n); }

  void log_derivatives(const QuditConfig& n, std::span<cd> out) const {
    if (out.size() != n_real_params()) throw DimensionMismatch("derivative buffer has wrong length");
    const auto g = nqs::cnn_grad_log_psi(params_, n);
    const auto re = g.d_re.to_complex();
    const auto im = g.d_im.to_complex();
    for (std::size_t p = 0; p < re.size(); ++p) {
      out[2 * p] = re[p];
      out[2 * p + 1] = im[p];
    }
  }

 private:
  std::size_t n_;
  nqs::CnnParams params_;
};

static_assert(TourAnsatz<QubitRbmAnsatz>);
static_assert(TourAnsatz<QuditCnnAnsatz>);

}  // namespace qtsp
