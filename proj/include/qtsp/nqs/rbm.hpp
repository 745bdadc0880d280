#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qtsp/errors.hpp"
#include "qtsp/nqs/common.hpp"

namespace qtsp::nqs {

// Complex RBM: log psi(s) = sum_j a_j s_j + sum_l log(2 cosh(b_l + sum_j W_lj s_j)).
struct RbmParams {
  Eigen::VectorXcd a;  // visible bias, length n_visible
  Eigen::VectorXcd b;  // hidden bias, length n_hidden
  Eigen::MatrixXcd W;  // n_hidden x n_visible

  RbmParams() = default;
  RbmParams(Eigen::Index n_visible, Eigen::Index n_hidden)
      : a(Eigen::VectorXcd::Zero(n_visible)),
        b(Eigen::VectorXcd::Zero(n_hidden)),
        W(Eigen::MatrixXcd::Zero(n_hidden, n_visible)) {}

  Eigen::Index n_visible() const { return a.size(); }
  Eigen::Index n_hidden() const { return b.size(); }
  std::size_t n_complex() const { return static_cast<std::size_t>(a.size() + b.size() + W.size()); }

  void check() const {
    if (W.rows() != b.size() || W.cols() != a.size()) throw DimensionMismatch("RBM parameter shapes disagree");
  }

  // Order: a, b, then W row-major.
  std::vector<cd> to_complex() const {
    std::vector<cd> out;
    out.reserve(n_complex());
    for (Eigen::Index j = 0; j < a.size(); ++j) out.push_back(a(j));
    for (Eigen::Index l = 0; l < b.size(); ++l) out.push_back(b(l));
    for (Eigen::Index l = 0; l < W.rows(); ++l)
      for (Eigen::Index j = 0; j < W.cols(); ++j) out.push_back(W(l, j));
    return out;
  }

  void from_complex(std::span<const cd> in) {
    if (in.size() != n_complex()) throw DimensionMismatch("RBM parameter vector has wrong length");
    std::size_t p = 0;
    for (Eigen::Index j = 0; j < a.size(); ++j) a(j) = in[p++];
    for (Eigen::Index l = 0; l < b.size(); ++l) b(l) = in[p++];
    for (Eigen::Index l = 0; l < W.rows(); ++l)
      for (Eigen::Index j = 0; j < W.cols(); ++j) W(l, j) = in[p++];
  }
};

inline Eigen::VectorXcd rbm_theta(const RbmParams& params, std::span<const int> sigma) {
  params.check();
  if (static_cast<Eigen::Index>(sigma.size()) != params.n_visible())
    throw DimensionMismatch("spin vector length does not match RBM visible layer");
  Eigen::VectorXcd s(params.n_visible());
  for (Eigen::Index j = 0; j < s.size(); ++j) s(j) = static_cast<double>(sigma[static_cast<std::size_t>(j)]);
  return params.b + params.W * s;
}

inline cd rbm_log_psi(const RbmParams& params, std::span<const int> sigma) {
  const Eigen::VectorXcd theta = rbm_theta(params, sigma);
  cd out = 0.0;
  for (std::size_t j = 0; j < sigma.size(); ++j) out += params.a(static_cast<Eigen::Index>(j)) * static_cast<double>(sigma[j]);
  for (Eigen::Index l = 0; l < theta.size(); ++l) out += log_2cosh(theta(l));
  return out;
}

// Holomorphic derivatives of log psi, shaped like the parameters:
// d/da_j = s_j, d/db_l = tanh(theta_l), d/dW_lj = s_j tanh(theta_l).
inline RbmParams rbm_grad_log_psi(const RbmParams& params, std::span<const int> sigma) {
  const Eigen::VectorXcd theta = rbm_theta(params, sigma);
  RbmParams g(params.n_visible(), params.n_hidden());
  for (Eigen::Index j = 0; j < g.a.size(); ++j) g.a(j) = static_cast<double>(sigma[static_cast<std::size_t>(j)]);
  for (Eigen::Index l = 0; l < theta.size(); ++l) g.b(l) = tanh_stable(theta(l));
  g.W.noalias() = g.b * g.a.transpose();
  return g;
}

inline RbmParams init_rbm_params(Eigen::Index n_visible, Eigen::Index n_hidden, double scale, std::uint64_t seed) {
  RbmParams p(n_visible, n_hidden);
  const auto values = normal_complex(p.n_complex(), scale, seed);
  p.from_complex(values);
  return p;
}

}  // namespace qtsp::nqs
