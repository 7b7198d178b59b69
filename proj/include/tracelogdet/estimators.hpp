#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tracelogdet/moments.hpp"
#include "tracelogdet/numeric.hpp"

namespace tracelogdet {

// Derivative-at-zero weights of the Lagrange basis on nodes 0..m.
// w[j-1] multiplies K(j), j = 1..m; w0 multiplies K(0).
struct WeightVector {
  int m = 0;
  double w0 = 0.0;
  std::vector<double> w;

  double at(int j) const { return j == 0 ? w0 : w.at(static_cast<std::size_t>(j - 1)); }
};

struct ExactWeights {
  int m = 0;
  Rational w0;              // only filled when H_m fits in 64 bits
  bool w0_exact = false;
  std::vector<Rational> w;  // index j-1
};

WeightVector lagrange_weights(int m);
ExactWeights lagrange_weights_exact(int m);

enum class EstimateMethod { k0m, lognormal_closed, latane, boxcox };
std::string_view to_string(EstimateMethod m) noexcept;
EstimateMethod parse_method(std::string_view name);

struct EstimateReport {
  EstimateMethod method = EstimateMethod::k0m;
  int m = 0;
  double kprime0_hat = 0.0;
  double gm_over_am_hat = 1.0;
  std::optional<double> logdet_hat;
  std::optional<std::complex<double>> alpha;
};

// Fills logdet_hat = n (log am + kprime0_hat).
EstimateReport with_logdet(EstimateReport r, std::size_t n, double am);

EstimateReport k0m_estimate(const CumulantSamples& K, int m);

// Derivative-at-zero weights of the Lagrange basis on {0} plus arbitrary
// distinct positive nodes; result[j] multiplies K(nodes[j]). The weight of
// K(0) is minus their sum, and K(0) = 0 drops it.
std::vector<double> node_weights(std::span<const double> nodes);
double node_estimate(std::span<const double> nodes, std::span<const double> K);
EstimateReport lognormal_closed_form(double p1, double p2, std::size_t n);
EstimateReport latane_estimate(std::span<const double> central, int order);
EstimateReport transform_estimate(std::span<const double> G, std::complex<double> alpha, int m);
// Percent coefficient of variation across alpha in {-0.3, 0, +0.3}.
double cv_diagnostic(const NormalizedMoments& nm, int m);

}  // namespace tracelogdet
