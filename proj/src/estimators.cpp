#include "tracelogdet/estimators.hpp"

#include <cmath>

#include "tracelogdet/error.hpp"

namespace tracelogdet {

std::string_view to_string(EstimateMethod m) noexcept {
  switch (m) {
    case EstimateMethod::k0m: return "k0m";
    case EstimateMethod::lognormal_closed: return "lognormal_closed";
    case EstimateMethod::latane: return "latane";
    case EstimateMethod::boxcox: return "boxcox";
  }
  return "k0m";
}

EstimateMethod parse_method(std::string_view name) {
  for (auto m : {EstimateMethod::k0m, EstimateMethod::lognormal_closed, EstimateMethod::latane,
                 EstimateMethod::boxcox})
    if (to_string(m) == name) return m;
  fail(ErrorCode::invalid_argument, "unknown estimator '" + std::string(name) + "'");
}

ExactWeights lagrange_weights_exact(int m) {
  require(m >= 1 && m <= 64, "weight order must be in [1, 64]");
  ExactWeights ew;
  ew.m = m;
  for (int j = 1; j <= m; ++j) {
    auto c = static_cast<std::int64_t>(binomial(static_cast<unsigned>(m), static_cast<unsigned>(j)));
    Rational r(c, j);
    ew.w.push_back(j % 2 == 1 ? r : -r);
  }
  try {
    ew.w0 = -harmonic_exact(static_cast<unsigned>(m));
    ew.w0_exact = true;
  } catch (const Error&) {
    ew.w0_exact = false;
  }
  return ew;
}

WeightVector lagrange_weights(int m) {
  require(m >= 2 && m <= 64, "weight order must be in [2, 64]");
  WeightVector wv;
  wv.m = m;
  wv.w0 = -harmonic(static_cast<unsigned>(m));
  for (int j = 1; j <= m; ++j) {
    // long double keeps C(m, j) exact before the single rounding to double
    long double c = static_cast<long double>(binomial(static_cast<unsigned>(m), static_cast<unsigned>(j)));
    double v = static_cast<double>(c / j);
    wv.w.push_back(j % 2 == 1 ? v : -v);
  }
  return wv;
}

EstimateReport with_logdet(EstimateReport r, std::size_t n, double am) {
  r.logdet_hat = static_cast<double>(n) * (std::log(am) + r.kprime0_hat);
  return r;
}

namespace {

EstimateReport make_report(EstimateMethod method, int m, double kprime0) {
  EstimateReport r;
  r.method = method;
  r.m = m;
  r.kprime0_hat = kprime0;
  r.gm_over_am_hat = std::exp(kprime0);
  return r;
}

double weighted_sum(std::span<const double> samples, int m) {
  WeightVector wv = lagrange_weights(m);
  CompensatedSum s;
  for (int j = 2; j <= m; ++j) s.add(wv.at(j) * samples[static_cast<std::size_t>(j)]);
  return s.value();
}

}  // namespace

EstimateReport k0m_estimate(const CumulantSamples& K, int m) {
  require(m >= 2, "k0m needs m >= 2");
  require(m <= K.m(), "k0m order exceeds available cumulant samples");
  return make_report(EstimateMethod::k0m, m, weighted_sum(K.K, m));
}

std::vector<double> node_weights(std::span<const double> nodes) {
  require(!nodes.empty(), "need at least one node");
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    require(std::isfinite(nodes[j]) && nodes[j] > 0.0, "nodes must be positive");
    for (std::size_t i = 0; i < j; ++i) require(nodes[i] != nodes[j], "nodes must be distinct");
  }
  std::vector<double> w(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    long double num = 1.0L, den = nodes[j];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (i == j) continue;
      num *= -static_cast<long double>(nodes[i]);
      den *= static_cast<long double>(nodes[j]) - nodes[i];
    }
    w[j] = static_cast<double>(num / den);
  }
  return w;
}

double node_estimate(std::span<const double> nodes, std::span<const double> K) {
  require(K.size() == nodes.size(), "one sample per node");
  std::vector<double> w = node_weights(nodes);
  CompensatedSum s;
  for (std::size_t j = 0; j < w.size(); ++j) s.add(w[j] * K[j]);
  return s.value();
}

EstimateReport lognormal_closed_form(double p1, double p2, std::size_t n) {
  require(p1 > 0.0 && p2 > 0.0 && n >= 1, "lognormal closed form needs p1, p2 > 0");
  double kp = std::log(p1) - 0.5 * std::log(static_cast<double>(n) * p2);
  return make_report(EstimateMethod::lognormal_closed, 2, kp);
}

EstimateReport latane_estimate(std::span<const double> central, int order) {
  require(order >= 2, "Latane order must be >= 2");
  require(static_cast<std::size_t>(order - 1) <= central.size(), "not enough central moments");
  CompensatedSum s;
  for (int k = 2; k <= order; ++k) {
    double term = central[static_cast<std::size_t>(k - 2)] / k;
    s.add(k % 2 == 1 ? term : -term);
  }
  return make_report(EstimateMethod::latane, order, s.value());
}

EstimateReport transform_estimate(std::span<const double> G, std::complex<double> alpha, int m) {
  require(alpha != std::complex<double>(0.0, 0.0), "alpha must be nonzero");
  require(m >= 2 && static_cast<std::size_t>(m) < G.size(), "not enough transformed samples");
  require(G[0] == 0.0 && G[1] == 0.0, "transformed samples must vanish at 0 and 1");
  // f'(1) = 1 for every Box-Cox member, so the weighted sum is already K'(0).
  EstimateReport r = make_report(EstimateMethod::boxcox, m, weighted_sum(G, m));
  r.alpha = alpha;
  return r;
}

double cv_diagnostic(const NormalizedMoments& nm, int m) {
  require(m >= 2 && m <= nm.m(), "cv diagnostic order out of range");
  double est[3] = {
      transform_estimate(boxcox_samples(nm, {-0.3, 0.0}), {-0.3, 0.0}, m).kprime0_hat,
      k0m_estimate(cumulants(nm), m).kprime0_hat,
      transform_estimate(boxcox_samples(nm, {0.3, 0.0}), {0.3, 0.0}, m).kprime0_hat,
  };
  double mean = (est[0] + est[1] + est[2]) / 3.0;
  double var = 0.0;
  for (double e : est) var += (e - mean) * (e - mean);
  double sd = std::sqrt(var / 3.0);
  if (sd == 0.0) return 0.0;
  if (mean == 0.0) fail(ErrorCode::undefined, "coefficient of variation undefined at zero mean");
  return 100.0 * sd / std::abs(mean);
}

}  // namespace tracelogdet
