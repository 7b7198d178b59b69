#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>

#include "tracelogdet/moments.hpp"
#include "tracelogdet/spectra.hpp"

namespace tracelogdet {

// Multiplicative i.i.d. Gaussian trace noise with relative std dev eta.
struct NoiseSpec {
  double eta = 0.0;
  std::uint64_t seed = 0;
};

struct NoisyTraces {
  TracePowers traces;
  int truncated = 0;  // draws with eps <= -1 + 1e-6 that were redrawn
};

NoisyTraces perturb(const TracePowers& tp, const NoiseSpec& ns);

struct NoiseTheory {
  int m = 0;
  double weight_norm = 0.0;  // l2 norm of w_2..w_m
  double alpha = 0.0;
  double bias_noise = 0.0;
  std::optional<double> crossover_eta;
  std::optional<double> rmse_pred;
};

NoiseTheory theory(int m, double eta, std::optional<double> b_m = std::nullopt);
double noise_bias(int m, double eta);
// argmin_m sqrt(b_m^2 + alpha_m^2 eta^2); the map is ordered so ties go to smaller m.
int optimal_order(const std::map<int, double>& bias_by_m, double eta);

struct WeightNormFit {
  double c = 0.0;
  double a = 0.0;
  double r2 = 0.0;  // on log ||w||
};

// Least squares of log||w|| = log c + m log 2 - a log m over m_lo..m_hi.
WeightNormFit weight_norm_fit(int m_lo, int m_hi);
// Same model fitted to arbitrary (m, norm) pairs.
WeightNormFit weight_norm_fit(std::span<const int> orders, std::span<const double> norms);

struct NoiseStats {
  int trials = 0;
  double mean = 0.0;
  double bias = 0.0;
  double sd = 0.0;  // population
  double rmse = 0.0;
  int truncated = 0;
};

// Trial t draws from derive_seed(seed, 0, t), so the result does not depend on
// the number of threads.
NoiseStats monte_carlo(const Spectrum& s, int m, double eta, int trials, std::uint64_t seed,
                       unsigned threads = 0);

}  // namespace tracelogdet
