#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"

#include "tracelogdet/error.hpp"
#include "tracelogdet/estimators.hpp"
#include "tracelogdet/spectra.hpp"

using namespace tracelogdet;

namespace {

// Derivative at 0 of the Lagrange basis polynomial for node j on 0..m,
// evaluated directly from the product form.
long double basis_derivative(int j, int m) {
  long double total = 0;
  for (int skip = 0; skip <= m; ++skip) {
    if (skip == j) continue;
    long double term = 1.0L / (j - skip);
    for (int i = 0; i <= m; ++i) {
      if (i == j || i == skip) continue;
      term *= (0.0L - i) / (j - i);
    }
    total += term;
  }
  return total;
}

std::vector<double> lognormal_moments(double sigma, int m) {
  std::vector<double> M;
  for (int k = 1; k <= m; ++k) M.push_back(std::exp(sigma * sigma * k * (k - 1) / 2.0));
  return M;
}

}  // namespace

TEST_CASE("k0:4 weights are exact rationals") {
  ExactWeights w = lagrange_weights_exact(4);
  CHECK(w.w0 == Rational(-25, 12));
  CHECK(w.w[0] == Rational(4));
  CHECK(w.w[1] == Rational(-3));
  CHECK(w.w[2] == Rational(4, 3));
  CHECK(w.w[3] == Rational(-1, 4));
}

TEST_CASE("double weights agree with the product-form Lagrange derivative") {
  for (int m = 2; m <= 12; ++m) {
    WeightVector w = lagrange_weights(m);
    CHECK(w.w0 == doctest::Approx(static_cast<double>(basis_derivative(0, m))));
    for (int j = 1; j <= m; ++j)
      CHECK(w.at(j) == doctest::Approx(static_cast<double>(basis_derivative(j, m))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(lagrange_weights(1), Error);
  CHECK_THROWS_AS(lagrange_weights(65), Error);
}

TEST_CASE("weight identities") {
  for (int m = 1; m <= 20; ++m) {
    ExactWeights e = lagrange_weights_exact(m);
    Rational h, first, zero = e.w0;
    for (int j = 1; j <= m; ++j) {
      h = h + e.w[j - 1];
      first = first + Rational(j) * e.w[j - 1];
      zero = zero + e.w[j - 1];
    }
    CHECK(h == harmonic_exact(static_cast<unsigned>(m)));
    CHECK(first == Rational(1));
    CHECK(zero == Rational(0));
  }
}

TEST_CASE("general-node weights reduce to k0m on integer nodes") {
  for (int m = 2; m <= 8; ++m) {
    std::vector<double> nodes;
    for (int j = 1; j <= m; ++j) nodes.push_back(j);
    auto w = node_weights(nodes);
    WeightVector ref = lagrange_weights(m);
    for (int j = 1; j <= m; ++j) CHECK(w[j - 1] == doctest::Approx(ref.at(j)).epsilon(1e-12));
  }
  std::vector<double> nodes = {1.0, 2.0, 4.0};
  auto w = node_weights(nodes);
  CHECK(w[0] == doctest::Approx(8.0 / 3.0));
  CHECK(w[1] == doctest::Approx(-1.0));
  CHECK(w[2] == doctest::Approx(1.0 / 12.0));
  std::vector<double> dup = {1.0, 1.0};
  CHECK_THROWS_AS(node_weights(dup), Error);
}

TEST_CASE("k0m is exact for lognormal moments") {
  for (double sigma : {0.25, 0.5, 1.0}) {
    CumulantSamples K = cumulants(NormalizedMoments{1000, lognormal_moments(sigma, 8)});
    for (int m = 2; m <= 8; ++m) CHECK(k0m_estimate(K, m).kprime0_hat == doctest::Approx(-sigma * sigma / 2).epsilon(1e-10));
  }
}

TEST_CASE("lognormal closed form") {
  const double sigma = 0.5, n = 400, am = 3.0;
  // p1 = n am, p2 = n am^2 M2
  double M2 = std::exp(sigma * sigma);
  EstimateReport r = lognormal_closed_form(n * am, n * am * am * M2, 400);
  CHECK(r.kprime0_hat == doctest::Approx(-sigma * sigma / 2));
  CHECK(r.method == EstimateMethod::lognormal_closed);
}

TEST_CASE("k0m on small explicit spectrum") {
  // {1, 4}: M2 = 1.36; k0:2 = -K(2)/2
  CumulantSamples K = cumulants(NormalizedMoments{2, {1.0, 1.36}});
  EstimateReport r = k0m_estimate(K, 2);
  CHECK(r.kprime0_hat == doctest::Approx(-0.5 * std::log(1.36)));
  CHECK(r.gm_over_am_hat == doctest::Approx(std::exp(r.kprime0_hat)));
  EstimateReport d = with_logdet(r, 2, 2.5);
  CHECK(*d.logdet_hat == doctest::Approx(2 * (std::log(2.5) + r.kprime0_hat)));
  CHECK_THROWS_AS(k0m_estimate(K, 3), Error);
}

TEST_CASE("k0m relative errors on geometric spectra at n = 1024") {
  // kappa = 100 row, orders 2..8, 16, 32
  const double expected[] = {44.2, 19.2, 5.6, -2.5, -7.6, -10.8, -12.8, -14.1, -5.0};
  const int orders[] = {2, 3, 4, 5, 6, 7, 8, 16, 32};
  Spectrum s = generate(SpectrumFamily::geometric, 1024, 100.0);
  double truth = exact_stats(s).kprime0;
  CHECK(truth == doctest::Approx(-0.766673).epsilon(1e-6));
  CumulantSamples K = cumulants(normalize(trace_powers(s, 32)));
  for (int i = 0; i < 9; ++i) {
    double err = (k0m_estimate(K, orders[i]).kprime0_hat - truth) / std::abs(truth) * 100;
    CHECK(std::abs(err - expected[i]) <= 0.15);
  }
}

TEST_CASE("Latane series diverges while k0m stays accurate") {
  Spectrum s = generate(SpectrumFamily::geometric, 1024, 100.0);
  double truth = exact_stats(s).kprime0;
  NormalizedMoments nm = normalize(trace_powers(s, 12));
  auto mu = central_moments(nm, 12);
  double e4 = std::abs(latane_estimate(mu, 4).kprime0_hat - truth);
  double e12 = std::abs(latane_estimate(mu, 12).kprime0_hat - truth);
  CHECK(e12 > 1e3);
  CHECK(e12 > 100 * e4);
  CHECK(std::abs(k0m_estimate(cumulants(nm), 5).kprime0_hat - truth) < 0.05);
  // order 2 is -mu_2 / 2
  CHECK(latane_estimate(mu, 2).kprime0_hat == doctest::Approx(-mu[0] / 2));
}

TEST_CASE("complex Box-Cox transform on a two-point spectrum") {
  Spectrum s = generate(SpectrumFamily::two_point, 1024, 100.0);
  double truth = exact_stats(s).kprime0;
  NormalizedMoments nm = normalize(trace_powers(s, 4));
  std::complex<double> alpha(0.0, 1.3);
  EstimateReport r = transform_estimate(boxcox_samples(nm, alpha), alpha, 4);
  CHECK(std::abs((r.kprime0_hat - truth) / truth) <= 0.01);
  CHECK(r.alpha.has_value());
  // alpha = 1 differentiates M(t) itself: w_2 (M_2 - 1) at order 2
  EstimateReport lin = transform_estimate(boxcox_samples(nm, {1.0, 0.0}), {1.0, 0.0}, 2);
  CHECK(lin.kprime0_hat == doctest::Approx(-0.5 * (nm.at(2) - 1.0)));
}

TEST_CASE("coefficient-of-variation diagnostic") {
  auto cv = [](SpectrumFamily f, double kappa) {
    return cv_diagnostic(normalize(trace_powers(generate(f, 1024, kappa), 4)), 4);
  };
  CHECK(cv(SpectrumFamily::two_point, 10.0) > 20.0);
  CHECK(cv(SpectrumFamily::geometric, 10.0) < 10.0);
  CHECK(cv_diagnostic(NormalizedMoments{4, {1.0, 1.0, 1.0, 1.0}}, 4) == 0.0);
}

TEST_CASE("method names") {
  for (auto m : {EstimateMethod::k0m, EstimateMethod::lognormal_closed, EstimateMethod::latane,
                 EstimateMethod::boxcox})
    CHECK(parse_method(to_string(m)) == m);
  CHECK_THROWS_AS(parse_method("magic"), Error);
}

TEST_CASE("k0m is invariant under scaling of the spectrum") {
  Spectrum s = generate(SpectrumFamily::uniform, 500, 40.0);
  TracePowers tp = trace_powers(s, 8);
  for (double c : {1e-3, 7.0, 1e4}) {
    TracePowers scaled = tp;
    for (int k = 1; k <= 8; ++k) scaled.p[k - 1] *= std::pow(c, k);
    for (int m = 2; m <= 8; ++m) {
      double a = k0m_estimate(cumulants(normalize(tp)), m).kprime0_hat;
      double b = k0m_estimate(cumulants(normalize(scaled)), m).kprime0_hat;
      CHECK(std::abs(a - b) <= 1e-10);
    }
  }
}

TEST_CASE("small closed-form cases") {
  WeightVector w2 = lagrange_weights(2);
  CHECK(w2.w0 == -1.5);
  CHECK(w2.at(1) == 2.0);
  CHECK(w2.at(2) == -0.5);
  WeightVector w8 = lagrange_weights(8);
  CHECK(w8.at(2) == doctest::Approx(-14.0));
  CHECK(w8.at(8) == doctest::Approx(-0.125));
  CHECK(k0m_estimate(CumulantSamples{std::vector<double>(6, 0.0)}, 5).kprime0_hat == 0.0);

  EstimateReport one = with_logdet(lognormal_closed_form(4.0, 16.0, 1), 1, 4.0);
  CHECK(std::exp(*one.logdet_hat) == doctest::Approx(4.0));
  std::vector<double> mu = {0.2};
  CHECK(latane_estimate(mu, 2).kprime0_hat == doctest::Approx(-0.1));
  std::vector<double> zeros(5, 0.0);
  CHECK(latane_estimate(zeros, 6).kprime0_hat == 0.0);
}

TEST_CASE("Box-Cox estimate tends to k0m as alpha shrinks") {
  NormalizedMoments nm = normalize(trace_powers(generate(SpectrumFamily::geometric, 1024, 100.0), 6));
  double k0 = k0m_estimate(cumulants(nm), 6).kprime0_hat;
  for (std::complex<double> a : {std::complex<double>(1e-6, 0.0), std::complex<double>(0.0, 1e-6)})
    CHECK(std::abs(transform_estimate(boxcox_samples(nm, a), a, 6).kprime0_hat - k0) <= 1e-6);
  NormalizedMoments flat{8, {1.0, 1.0, 1.0, 1.0}};
  CHECK(transform_estimate(boxcox_samples(flat, {1.0, 0.0}), {1.0, 0.0}, 4).kprime0_hat == 0.0);
}
