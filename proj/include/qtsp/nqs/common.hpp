#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qtsp/errors.hpp"

namespace qtsp::nqs {

using cd = std::complex<double>;

// log(2 cosh z) without overflow: factor out e^{|Re z|} before taking the log.
inline cd log_2cosh(cd z) {
  if (z.real() >= 0.0) return z + std::log(1.0 + std::exp(-2.0 * z));
  return -z + std::log(1.0 + std::exp(2.0 * z));
}

inline cd tanh_stable(cd z) {
  if (z.real() >= 0.0) {
    const cd e = std::exp(-2.0 * z);
    return (1.0 - e) / (1.0 + e);
  }
  const cd e = std::exp(2.0 * z);
  return (e - 1.0) / (e + 1.0);
}

// Flattened real layout used by the optimiser: complex parameter p occupies
// slots 2p (real part) and 2p+1 (imaginary part).
inline void unpack_complex(std::span<const double> flat, std::span<cd> out) {
  if (flat.size() != 2 * out.size()) throw DimensionMismatch("flat parameter vector has wrong length");
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = {flat[2 * p], flat[2 * p + 1]};
}

inline void pack_complex(std::span<const cd> in, std::span<double> flat) {
  if (flat.size() != 2 * in.size()) throw DimensionMismatch("flat parameter vector has wrong length");
  for (std::size_t p = 0; p < in.size(); ++p) {
    flat[2 * p] = in[p].real();
    flat[2 * p + 1] = in[p].imag();
  }
}

// Zero-mean normal draws with standard deviation `scale` for the real and
// imaginary part of each of `count` complex parameters, in flat order.
inline std::vector<cd> normal_complex(std::size_t count, double scale, std::uint64_t seed) {
  if (!(scale >= 0.0)) throw InvalidConfig("initialisation scale must be non-negative");
  std::vector<cd> out(count);
  if (scale == 0.0) return out;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, scale);
  for (auto& v : out) {
    const double re = normal(gen);
    const double im = normal(gen);
    v = {re, im};
  }
  return out;
}

}  // namespace qtsp::nqs
