#include "tracelogdet/noise.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "tracelogdet/error.hpp"
#include "tracelogdet/estimators.hpp"
#include "tracelogdet/numeric.hpp"
#include "tracelogdet/parallel.hpp"
#include "tracelogdet/random.hpp"

namespace tracelogdet {

NoisyTraces perturb(const TracePowers& tp, const NoiseSpec& ns) {
  require(ns.eta >= 0.0 && ns.eta < 0.5, "eta must lie in [0, 0.5)");
  NoisyTraces out{tp, 0};
  if (ns.eta == 0.0) return out;
  Rng rng(derive_seed(ns.seed, 4));
  std::normal_distribution<double> draw(0.0, ns.eta);
  for (double& p : out.traces.p) {
    double eps = draw(rng);
    while (eps <= -1.0 + 1e-6) {
      ++out.truncated;
      eps = draw(rng);
    }
    p *= 1.0 + eps;
  }
  return out;
}

double noise_bias(int m, double eta) {
  require(m >= 1, "order m must be at least 1");
  if (eta == 0.0) return 0.0;
  return 0.5 * eta * eta * (1.0 - harmonic(static_cast<unsigned>(m)));
}

NoiseTheory theory(int m, double eta, std::optional<double> b_m) {
  require(m >= 2, "order m must be at least 2");
  WeightVector w = lagrange_weights(m);
  CompensatedSum sq;
  for (int j = 2; j <= m; ++j) sq.add(w.at(j) * w.at(j));
  NoiseTheory t;
  t.m = m;
  t.weight_norm = std::sqrt(sq.value());
  t.alpha = std::sqrt(sq.value() + double(m - 1) * double(m - 1));
  t.bias_noise = noise_bias(m, eta);
  if (b_m) {
    t.crossover_eta = std::abs(*b_m) / t.alpha;
    t.rmse_pred = std::hypot(*b_m, t.alpha * eta);
  }
  return t;
}

int optimal_order(const std::map<int, double>& bias_by_m, double eta) {
  require(!bias_by_m.empty(), "need at least one order");
  int best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (const auto& [m, b] : bias_by_m) {
    double err = std::hypot(b, theory(m, eta).alpha * eta);
    if (err < best_err) {
      best_err = err;
      best = m;
    }
  }
  return best;
}

WeightNormFit weight_norm_fit(std::span<const int> orders, std::span<const double> norms) {
  require(orders.size() == norms.size(), "orders and norms differ in length");
  require(orders.size() >= 2, "need at least two points");
  const auto count = static_cast<Eigen::Index>(orders.size());
  Eigen::MatrixXd A(count, 2);
  Eigen::VectorXd y(count), logw(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const double m = orders[static_cast<std::size_t>(i)];
    const double norm = norms[static_cast<std::size_t>(i)];
    require(m >= 1.0 && norm > 0.0, "orders and norms must be positive");
    logw[i] = std::log(norm);
    A(i, 0) = 1.0;
    A(i, 1) = -std::log(m);
    y[i] = logw[i] - m * std::log(2.0);
  }
  Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
  WeightNormFit fit;
  fit.c = std::exp(coef[0]);
  fit.a = coef[1];
  const double mean = logw.mean();
  double ss_res = 0.0, ss_tot = 0.0;
  for (Eigen::Index i = 0; i < count; ++i) {
    const double m = orders[static_cast<std::size_t>(i)];
    double pred = coef[0] + m * std::log(2.0) - coef[1] * std::log(m);
    ss_res += (logw[i] - pred) * (logw[i] - pred);
    ss_tot += (logw[i] - mean) * (logw[i] - mean);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

WeightNormFit weight_norm_fit(int m_lo, int m_hi) {
  require(m_lo >= 2 && m_hi > m_lo, "need at least two orders");
  require(m_hi <= 64, "orders above 64 are not supported");
  std::vector<int> orders;
  std::vector<double> norms;
  for (int m = m_lo; m <= m_hi; ++m) {
    orders.push_back(m);
    norms.push_back(theory(m, 0.0).weight_norm);
  }
  return weight_norm_fit(orders, norms);
}

NoiseStats monte_carlo(const Spectrum& s, int m, double eta, int trials, std::uint64_t seed,
                       unsigned threads) {
  require(trials >= 1, "need at least one trial");
  require(m >= 2, "order m must be at least 2");
  const double truth = exact_stats(s).kprime0;
  TracePowers tp = trace_powers(s, m);
  std::vector<double> est(static_cast<std::size_t>(trials));
  std::vector<int> cut(static_cast<std::size_t>(trials));
  parallel_for(
      est.size(),
      [&](std::size_t t) {
        NoisyTraces nt = perturb(tp, {eta, derive_seed(seed, 0, t)});
        est[t] = k0m_estimate(cumulants(normalize(nt.traces)), m).kprime0_hat;
        cut[t] = nt.truncated;
      },
      threads);

  NoiseStats st;
  st.trials = trials;
  CompensatedSum sum, dev2, err2;
  for (std::size_t t = 0; t < est.size(); ++t) {
    sum.add(est[t]);
    err2.add((est[t] - truth) * (est[t] - truth));
    st.truncated += cut[t];
  }
  st.mean = sum.value() / trials;
  for (double e : est) dev2.add((e - st.mean) * (e - st.mean));
  st.bias = st.mean - truth;
  st.sd = std::sqrt(dev2.value() / trials);
  st.rmse = std::sqrt(err2.value() / trials);
  return st;
}

}  // namespace tracelogdet
