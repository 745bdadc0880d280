#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qtsp/errors.hpp"
#include "qtsp/nqs/common.hpp"

namespace qtsp::nqs {

// Periodic 1-D convolution over raw qudit levels, split-complex ReLU, sum over
// positions, then a single-output dense layer that yields log psi directly:
//
//   z_if = b_f + sum_k W_kf n_{(i+k) mod N}
//   o_f  = sum_i relu(Re z_if) + i relu(Im z_if)
//   log psi = dense_b + sum_f dense_w_f o_f
struct CnnParams {
  std::size_t kernel_size = 0;  // K
  std::size_t n_channels = 0;   // F
  std::vector<cd> W;            // K x F, row-major (k * F + f)
  std::vector<cd> b;            // F
  std::vector<cd> dense_w;      // F
  cd dense_b = 0.0;

  CnnParams() = default;
  CnnParams(std::size_t k, std::size_t f)
      : kernel_size(k), n_channels(f), W(k * f), b(f), dense_w(f) {}

  cd& w(std::size_t k, std::size_t f) { return W[k * n_channels + f]; }
  cd w(std::size_t k, std::size_t f) const { return W[k * n_channels + f]; }

  std::size_t n_complex() const { return W.size() + b.size() + dense_w.size() + 1; }

  void check() const {
    if (n_channels < 1 || kernel_size < 1) throw DimensionMismatch("CNN needs K >= 1 and F >= 1");
    if (W.size() != kernel_size * n_channels || b.size() != n_channels || dense_w.size() != n_channels)
      throw DimensionMismatch("CNN parameter shapes disagree");
  }

  // Order: W, b, dense_w, dense_b.
  std::vector<cd> to_complex() const {
    std::vector<cd> out;
    out.reserve(n_complex());
    out.insert(out.end(), W.begin(), W.end());
    out.insert(out.end(), b.begin(), b.end());
    out.insert(out.end(), dense_w.begin(), dense_w.end());
    out.push_back(dense_b);
    return out;
  }

  void from_complex(std::span<const cd> in) {
    if (in.size() != n_complex()) throw DimensionMismatch("CNN parameter vector has wrong length");
    auto it = in.begin();
    for (auto& v : W) v = *it++;
    for (auto& v : b) v = *it++;
    for (auto& v : dense_w) v = *it++;
    dense_b = *it;
  }
};

// Derivatives of log psi with respect to the real parts (d_re) and the
// imaginary parts (d_im) of every parameter, each shaped like CnnParams.
struct CnnGradient {
  CnnParams d_re;
  CnnParams d_im;
};

namespace detail {

inline void check_cnn_input(const CnnParams& params, std::span<const int> n) {
  params.check();
  if (n.empty()) throw DimensionMismatch("empty qudit configuration");
  if (params.kernel_size > n.size()) throw DimensionMismatch("kernel size exceeds number of sites");
}

inline cd preactivation(const CnnParams& params, std::span<const int> n, std::size_t i, std::size_t f) {
  const std::size_t len = n.size();
  cd z = params.b[f];
  for (std::size_t k = 0; k < params.kernel_size; ++k) z += params.w(k, f) * static_cast<double>(n[(i + k) % len]);
  return z;
}

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace detail

inline cd cnn_log_psi(const CnnParams& params, std::span<const int> n) {
  detail::check_cnn_input(params, n);
  cd out = params.dense_b;
  for (std::size_t f = 0; f < params.n_channels; ++f) {
    double o_re = 0.0, o_im = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
      const cd z = detail::preactivation(params, n, i, f);
      o_re += detail::relu(z.real());
      o_im += detail::relu(z.imag());
    }
    out += params.dense_w[f] * cd(o_re, o_im);
  }
  return out;
}

// Manual backpropagation. ReLU is treated as piecewise linear with slope 0 at the kink.
inline CnnGradient cnn_grad_log_psi(const CnnParams& params, std::span<const int> n) {
  detail::check_cnn_input(params, n);
  const std::size_t K = params.kernel_size, F = params.n_channels, len = n.size();
  CnnGradient g{CnnParams(K, F), CnnParams(K, F)};
  const cd I(0.0, 1.0);
  for (std::size_t f = 0; f < F; ++f) {
    double o_re = 0.0, o_im = 0.0;
    // Sums of the inputs feeding active units, per kernel offset.
    std::vector<double> in_re(K, 0.0), in_im(K, 0.0);
    double active_re = 0.0, active_im = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      const cd z = detail::preactivation(params, n, i, f);
      if (z.real() > 0.0) {
        o_re += z.real();
        active_re += 1.0;
        for (std::size_t k = 0; k < K; ++k) in_re[k] += n[(i + k) % len];
      }
      if (z.imag() > 0.0) {
        o_im += z.imag();
        active_im += 1.0;
        for (std::size_t k = 0; k < K; ++k) in_im[k] += n[(i + k) % len];
      }
    }
    const cd wf = params.dense_w[f];
    // Re parts of W and b move Re z only; Im parts move Im z only.
    for (std::size_t k = 0; k < K; ++k) {
      g.d_re.w(k, f) = wf * in_re[k];
      g.d_im.w(k, f) = wf * I * in_im[k];
    }
    g.d_re.b[f] = wf * active_re;
    g.d_im.b[f] = wf * I * active_im;
    g.d_re.dense_w[f] = cd(o_re, o_im);
    g.d_im.dense_w[f] = I * cd(o_re, o_im);
  }
  g.d_re.dense_b = 1.0;
  g.d_im.dense_b = I;
  return g;
}

inline CnnParams init_cnn_params(std::size_t kernel_size, std::size_t n_channels, double scale, std::uint64_t seed) {
  CnnParams p(kernel_size, n_channels);
  p.check();
  const auto values = normal_complex(p.n_complex(), scale, seed);
  p.from_complex(values);
  return p;
}

}  // namespace qtsp::nqs
