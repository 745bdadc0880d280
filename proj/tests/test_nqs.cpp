#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qtsp/ansatz.hpp"
#include "qtsp/nqs/checkpoint.hpp"

using namespace qtsp;
using namespace qtsp::nqs;

namespace {

std::vector<int> random_spins(std::size_t n, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  std::vector<int> s(n);
  for (auto& v : s) v = coin(rng) ? 1 : -1;
  return s;
}

std::vector<int> random_levels(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> lvl(1, static_cast<int>(n));
  std::vector<int> c(n);
  for (auto& v : c) v = lvl(rng);
  return c;
}

}  // namespace

TEST(Log2Cosh, MatchesDirectFormulaAndAvoidsOverflow) {
  for (double re : {-3.0, -0.5, 0.0, 0.7, 4.0})
    for (double im : {-2.0, 0.0, 1.3}) {
      const cd z(re, im);
      const cd direct = std::log(2.0 * std::cosh(z));
      // Compare exp of both to sidestep branch differences in the imaginary part.
      EXPECT_NEAR(std::abs(std::exp(log_2cosh(z)) - std::exp(direct)), 0.0, 1e-12 * std::abs(std::exp(direct)));
    }
  const cd big = log_2cosh(cd(800.0, 0.3));
  EXPECT_TRUE(std::isfinite(big.real()));
  EXPECT_NEAR(big.real(), 800.0, 1e-9);
  EXPECT_NEAR(log_2cosh(cd(-800.0, 0.0)).real(), 800.0, 1e-9);
  EXPECT_NEAR(tanh_stable(cd(900.0, 0.1)).real(), 1.0, 1e-12);
  EXPECT_NEAR(tanh_stable(cd(-900.0, 0.1)).real(), -1.0, 1e-12);
}

TEST(Rbm, ZeroParamsGiveNHiddenLog2) {
  const RbmParams p(4, 3);
  EXPECT_NEAR(rbm_log_psi(p, std::vector<int>{1, -1, 1, -1}).real(), 3.0 * std::log(2.0), 1e-15);
  EXPECT_NEAR(rbm_log_psi(p, std::vector<int>{1, -1, 1, -1}).imag(), 0.0, 1e-15);
}

TEST(Rbm, VisibleBiasOnly) {
  RbmParams p(1, 1);
  p.a(0) = 0.5;
  EXPECT_NEAR(rbm_log_psi(p, std::vector<int>{1}).real(), 0.5 + std::log(2.0), 1e-15);
}

TEST(Rbm, MatchesProductFormula) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = init_rbm_params(6, 4, 0.5, 100 + trial);
    const auto s = random_spins(6, rng);
    const oracle::cld psi = oracle::rbm_psi_product(p, s);
    const cd lp = rbm_log_psi(p, s);
    EXPECT_NEAR(lp.real(), static_cast<double>(std::log(std::abs(psi))), 1e-12);
    const cd phase = std::exp(cd(0.0, lp.imag()));
    const std::complex<double> want(static_cast<double>(psi.real() / std::abs(psi)),
                                    static_cast<double>(psi.imag() / std::abs(psi)));
    EXPECT_NEAR(std::abs(phase - want), 0.0, 1e-12);
  }
}

TEST(Rbm, DimensionChecks) {
  const RbmParams p(4, 2);
  EXPECT_THROW(rbm_log_psi(p, std::vector<int>{1, 1, 1}), DimensionMismatch);
  RbmParams bad(4, 2);
  bad.W.resize(3, 4);
  EXPECT_THROW(rbm_log_psi(bad, std::vector<int>{1, 1, 1, 1}), DimensionMismatch);
}

TEST(Rbm, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = init_rbm_params(9, 5, 0.3, 500 + trial);
    const auto s = random_spins(9, rng);
    const auto g = rbm_grad_log_psi(p, s).to_complex();
    const auto base = p.to_complex();
    std::vector<double> flat(2 * base.size());
    pack_complex(base, flat);
    auto f = [&](const std::vector<double>& x) {
      std::vector<cd> c(base.size());
      unpack_complex(x, c);
      RbmParams q = p;
      q.from_complex(c);
      return rbm_log_psi(q, s);
    };
    const auto fd = oracle::finite_difference(f, flat, 1e-6);
    std::vector<cd> analytic(flat.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      analytic[2 * k] = g[k];
      analytic[2 * k + 1] = cd(0.0, 1.0) * g[k];
    }
    EXPECT_LE(oracle::max_relative_error(analytic, fd), 1e-6);
  }
}

TEST(Cnn, ZeroParamsGiveDenseBias) {
  CnnParams p(2, 3);
  p.dense_b = cd(0.25, -0.5);
  EXPECT_EQ(cnn_log_psi(p, std::vector<int>{1, 2, 3}), cd(0.25, -0.5));
}

TEST(Cnn, HandComputedExample) {
  // K=1, F=1, W=1, b=0, dense_w=1: o = sum_i n_i.
  CnnParams p(1, 1);
  p.W[0] = 1.0;
  p.dense_w[0] = 1.0;
  EXPECT_EQ(cnn_log_psi(p, std::vector<int>{1, 2, 3}), cd(6.0, 0.0));
  // Negative weights are cut by the ReLU.
  p.W[0] = cd(-1.0, 2.0);
  EXPECT_EQ(cnn_log_psi(p, std::vector<int>{1, 2, 3}), cd(0.0, 12.0));
}

TEST(Cnn, MatchesDirectTranscription) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + trial % 6;
    const std::size_t k = 1 + trial % n;
    const auto p = init_cnn_params(k, 1 + trial % 4, 0.4, 900 + trial);
    const auto c = random_levels(n, rng);
    const oracle::cld want = oracle::cnn_log_psi_direct(p, c);
    const cd got = cnn_log_psi(p, c);
    EXPECT_NEAR(got.real(), static_cast<double>(want.real()), 1e-12);
    EXPECT_NEAR(got.imag(), static_cast<double>(want.imag()), 1e-12);
  }
}

TEST(Cnn, TranslationInvariant) {
  std::mt19937_64 rng(4);
  for (std::size_t n : {4u, 7u}) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto p = init_cnn_params(std::min<std::size_t>(3, n), 3, 0.5, 1000 + trial);
      const auto c = oracle::random_tour(n, rng);
      const cd ref = cnn_log_psi(p, c);
      for (std::size_t s = 0; s < n; ++s) EXPECT_NEAR(std::abs(cnn_log_psi(p, rotate(c, s)) - ref), 0.0, 1e-12);
    }
  }
}

TEST(Cnn, KernelLargerThanInputThrows) {
  const CnnParams p(4, 2);
  EXPECT_THROW(cnn_log_psi(p, std::vector<int>{1, 2, 3}), DimensionMismatch);
  EXPECT_THROW(init_cnn_params(0, 2, 0.1, 1), DimensionMismatch);
}

TEST(Cnn, GradientMatchesFiniteDifferencesAwayFromKinks) {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int trial = 0; checked < 100 && trial < 1000; ++trial) {
    const auto p = init_cnn_params(2, 3, 0.5, 2000 + trial);
    const auto c = random_levels(4, rng);
    // Skip points where a preactivation sits within the step of a kink.
    bool near_kink = false;
    for (std::size_t f = 0; f < 3; ++f)
      for (std::size_t i = 0; i < 4; ++i) {
        cd z = p.b[f];
        for (std::size_t k = 0; k < 2; ++k) z += p.w(k, f) * static_cast<double>(c[(i + k) % 4]);
        if (std::abs(z.real()) < 1e-3 || std::abs(z.imag()) < 1e-3) near_kink = true;
      }
    if (near_kink) continue;
    ++checked;
    const auto base = p.to_complex();
    std::vector<double> flat(2 * base.size());
    pack_complex(base, flat);
    auto f = [&](const std::vector<double>& x) {
      std::vector<cd> v(base.size());
      unpack_complex(x, v);
      CnnParams q = p;
      q.from_complex(v);
      return cnn_log_psi(q, c);
    };
    const auto fd = oracle::finite_difference(f, flat, 1e-6);
    const auto g = cnn_grad_log_psi(p, c);
    const auto re = g.d_re.to_complex(), im = g.d_im.to_complex();
    std::vector<cd> analytic(flat.size());
    for (std::size_t k = 0; k < re.size(); ++k) {
      analytic[2 * k] = re[k];
      analytic[2 * k + 1] = im[k];
    }
    EXPECT_LE(oracle::max_relative_error(analytic, fd), 1e-5);
  }
  EXPECT_EQ(checked, 100);
}

TEST(Init, ScaleAndDeterminism) {
  EXPECT_THROW(normal_complex(3, -1.0, 0), InvalidConfig);
  for (const auto& v : normal_complex(5, 0.0, 1)) EXPECT_EQ(v, cd(0.0, 0.0));
  EXPECT_EQ(normal_complex(10, 0.1, 7), normal_complex(10, 0.1, 7));
  EXPECT_NE(normal_complex(10, 0.1, 7), normal_complex(10, 0.1, 8));
  const auto big = normal_complex(20000, 0.5, 3);
  double ss = 0.0;
  for (const auto& v : big) ss += v.real() * v.real() + v.imag() * v.imag();
  EXPECT_NEAR(std::sqrt(ss / (2.0 * big.size())), 0.5, 0.01);
}

TEST(QubitAnsatz, FastPathMatchesGenericRbm) {
  std::mt19937_64 rng(6);
  for (std::size_t n : {3u, 5u, 8u}) {
    const auto p = init_rbm_params(static_cast<Eigen::Index>(n * n), 2 * n, 0.2, 77 + n);
    const QubitRbmAnsatz ansatz(n, p);
    for (int trial = 0; trial < 20; ++trial) {
      const auto t = oracle::random_tour(n, rng);
      const auto spins = tour_to_onehot(t).sigma();
      EXPECT_EQ(ansatz.spins(t), spins);
      EXPECT_NEAR(std::abs(ansatz.log_psi(t) - rbm_log_psi(p, spins)), 0.0, 1e-10);

      std::vector<cd> o(ansatz.n_real_params());
      ansatz.log_derivatives(t, o);
      const auto g = rbm_grad_log_psi(p, spins).to_complex();
      for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_NEAR(std::abs(o[2 * k] - g[k]), 0.0, 1e-10);
        EXPECT_NEAR(std::abs(o[2 * k + 1] - cd(0.0, 1.0) * g[k]), 0.0, 1e-10);
      }
    }
  }
  EXPECT_THROW(QubitRbmAnsatz(3, init_rbm_params(8, 2, 0.1, 1)), DimensionMismatch);
}

TEST(QubitAnsatz, FlatParamsRoundTrip) {
  QubitRbmAnsatz ansatz(4, init_rbm_params(16, 8, 0.1, 5));
  auto flat = ansatz.flat_params();
  EXPECT_EQ(flat.size(), ansatz.n_real_params());
  for (auto& v : flat) v *= 2.0;
  ansatz.set_flat_params(flat);
  EXPECT_EQ(ansatz.flat_params(), flat);
  // Cached theta must follow the new parameters.
  const Tour t{2, 1, 4, 3};
  EXPECT_NEAR(std::abs(ansatz.log_psi(t) - rbm_log_psi(ansatz.params(), ansatz.spins(t))), 0.0, 1e-12);
}

TEST(QuditAnsatz, DerivativesMatchGradientLayout) {
  const QuditCnnAnsatz ansatz(5, init_cnn_params(3, 2, 0.3, 9));
  std::vector<cd> o(ansatz.n_real_params());
  const Tour t{1, 3, 5, 2, 4};
  ansatz.log_derivatives(t, o);
  const auto g = cnn_grad_log_psi(ansatz.params(), t);
  EXPECT_EQ(o[0], g.d_re.W[0]);
  EXPECT_EQ(o[1], g.d_im.W[0]);
  EXPECT_EQ(o.back(), cd(0.0, 1.0));  // d/dIm(dense_b)
  std::vector<cd> wrong(3);
  EXPECT_THROW(ansatz.log_derivatives(t, wrong), DimensionMismatch);
  EXPECT_THROW(QuditCnnAnsatz(3, init_cnn_params(4, 2, 0.1, 1)), DimensionMismatch);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto rbm = init_rbm_params(9, 6, 0.37, 11);
  const auto cnn = init_cnn_params(3, 4, 1.3e-7, 12);
  save_params(rbm, (dir / "qtsp_rbm.json").string());
  save_params(cnn, (dir / "qtsp_cnn.json").string());
  const auto rbm_back = std::get<RbmParams>(load_params((dir / "qtsp_rbm.json").string()));
  const auto cnn_back = std::get<CnnParams>(load_params((dir / "qtsp_cnn.json").string()));
  EXPECT_EQ(rbm_back.to_complex(), rbm.to_complex());
  EXPECT_EQ(rbm_back.n_hidden(), 6);
  EXPECT_EQ(cnn_back.to_complex(), cnn.to_complex());
  EXPECT_EQ(cnn_back.kernel_size, 3u);
  std::filesystem::remove(dir / "qtsp_rbm.json");
  std::filesystem::remove(dir / "qtsp_cnn.json");
}

TEST(Checkpoint, RejectsMalformedInput) {
  auto j = params_to_json(init_cnn_params(2, 2, 0.1, 1));
  j["values"].erase(0);
  EXPECT_THROW(params_from_json(j), DimensionMismatch);
  EXPECT_THROW(params_from_json(nlohmann::json{{"kind", "mlp"}, {"shape", {}}, {"values", nlohmann::json::array()}}),
               InvalidConfig);
  EXPECT_THROW(params_from_json(nlohmann::json::object()), InvalidConfig);
}
