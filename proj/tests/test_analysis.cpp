#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "tracelogdet/analysis.hpp"
#include "tracelogdet/error.hpp"
#include "tracelogdet/estimators.hpp"

using namespace tracelogdet;

namespace {

constexpr double pi = std::numbers::pi;

double moment(const std::vector<double>& x, const std::vector<double>& w, double t) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], t);
  return s;
}

// K(1..m) of a discrete measure, with K(0) = 0 in front.
std::vector<double> cumulant_samples(const std::vector<double>& x, const std::vector<double>& w, int m) {
  std::vector<double> K = {0.0};
  for (int k = 1; k <= m; ++k) K.push_back(std::log(moment(x, w, k)));
  return K;
}

}  // namespace

TEST_CASE("Taylor radius") {
  CHECK(taylor_radius(RadiusFamily::two_point, std::exp(pi)).radius == doctest::Approx(1.0).epsilon(1e-12));
  RadiusReport r = taylor_radius(RadiusFamily::two_point, 100.0, 0.5);
  CHECK(std::abs(r.radius - 0.682188) <= 1e-6);
  CHECK(r.safe_order == 0);
  CHECK(*r.p == 0.5);
  CHECK(std::abs(taylor_radius(RadiusFamily::two_point, std::exp(pi / 2)).radius - 2.0) <= 1e-9);
  CHECK(taylor_radius(RadiusFamily::log_uniform, std::exp(pi / 2)).safe_order == 4);
  for (double kappa : {5.0, 100.0, 1000.0}) {
    double a = taylor_radius(RadiusFamily::two_point, kappa).radius;
    double b = taylor_radius(RadiusFamily::log_uniform, kappa).radius;
    double c = taylor_radius(RadiusFamily::uniform, kappa).radius;
    CHECK(a < b);
    CHECK(b < c);
  }
  // an unequal weight moves the singularity off the imaginary axis
  CHECK(taylor_radius(RadiusFamily::two_point, 100.0, 0.1).radius > r.radius);
  CHECK_THROWS_AS(taylor_radius(RadiusFamily::uniform, 100.0, 0.5), Error);
  CHECK_THROWS_AS(taylor_radius(RadiusFamily::two_point, 1.0), Error);
  CHECK_THROWS_AS(taylor_radius(RadiusFamily::two_point, 10.0, 1.0), Error);
  CHECK(parse_radius_family("log-uniform") == RadiusFamily::log_uniform);
  CHECK(parse_radius_family(to_string(RadiusFamily::two_point)) == RadiusFamily::two_point);
}

TEST_CASE("saturation on two equal-weight eigenvalues") {
  std::vector<double> kappas = {1.0, 10.0, 1e3, 1e6, 1e8};
  std::vector<int> orders = {2, 3, 4, 5, 6, 7, 8};
  auto rows = saturation_scan(kappas, orders);
  CHECK(rows.size() == kappas.size() * orders.size());
  for (const auto& row : rows) {
    CHECK(std::abs(row.estimate) <= 10.0);
    if (row.kappa == 1.0) {
      CHECK(row.estimate == 0.0);
      CHECK(row.truth == 0.0);
    }
    if (row.m == 2 && row.kappa == 1e6) {
      CHECK(std::abs(row.estimate + 0.5 * std::log(2.0)) <= 1e-3);
      CHECK(row.truth <= -6.0);
    }
  }
  for (int m : orders) {
    int flagged = 0;
    for (const auto& row : rows)
      if (row.m == m && row.first_exceed) ++flagged;
    CHECK(flagged <= 1);
  }
  // matches the generic estimator fed exact cumulants
  std::vector<double> x = {2.0 / 101.0, 200.0 / 101.0}, w = {0.5, 0.5};
  std::vector<double> K = cumulant_samples(x, w, 4);
  std::vector<double> k100 = {100.0};
  std::vector<int> m4 = {4};
  auto one = saturation_scan(k100, m4);
  CHECK(one[0].estimate == doctest::Approx(k0m_estimate(CumulantSamples{K}, 4).kprime0_hat).epsilon(1e-12));
}

TEST_CASE("non-identifiable pair on five points") {
  std::vector<double> support = {0.1, 0.5, 1.0, 2.0, 10.0};
  std::vector<double> nodes = {2.0, 4.0};
  NonidentPair zero = nonidentifiable_pair(support, nodes, 0.0);
  CHECK(zero.w_plus == zero.w_minus);
  CHECK(zero.delta_logmean == 0.0);

  NonidentPair p = nonidentifiable_pair(support, nodes, std::numeric_limits<double>::infinity());
  CHECK(p.eps > 0.0);
  for (double t : {0.0, 1.0, 2.0, 4.0}) {
    double a = moment(support, p.w_plus, t), b = moment(support, p.w_minus, t);
    CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
  }
  CHECK(moment(support, p.w_plus, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(moment(support, p.w_plus, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < support.size(); ++i) {
    CHECK(p.w_plus[i] >= 0.0);
    CHECK(p.w_minus[i] >= 0.0);
  }
  CHECK(std::abs(p.delta_logmean) >= 0.01 * std::abs(p.base_logmean));
  // the same pair is invisible to an estimator that samples K at {1, 2, 4}
  std::vector<double> at = {1.0, 2.0, 4.0};
  std::vector<double> Kp = {0.0, std::log(moment(support, p.w_plus, 2)), std::log(moment(support, p.w_plus, 4))};
  std::vector<double> Km = {0.0, std::log(moment(support, p.w_minus, 2)), std::log(moment(support, p.w_minus, 4))};
  CHECK(std::abs(node_estimate(at, Kp) - node_estimate(at, Km)) <= 1e-12);

  NonidentPair small = nonidentifiable_pair(support, nodes, 0.1);
  CHECK(small.eps == 0.1);
  CHECK(std::abs(small.delta_logmean) < std::abs(p.delta_logmean));
}

TEST_CASE("non-identifiable pair covering every k0:4 node") {
  std::vector<double> support = {0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
  std::vector<double> nodes = {2.0, 3.0, 4.0};
  NonidentPair p = nonidentifiable_pair(support, nodes, std::numeric_limits<double>::infinity());
  double ep = k0m_estimate(CumulantSamples{cumulant_samples(support, p.w_plus, 4)}, 4).kprime0_hat;
  double em = k0m_estimate(CumulantSamples{cumulant_samples(support, p.w_minus, 4)}, 4).kprime0_hat;
  CHECK(std::abs(ep - em) <= 1e-12);
  CHECK(std::abs(p.delta_logmean) >= 0.01 * std::abs(p.base_logmean));
}

TEST_CASE("non-identifiable pair rejects bad input") {
  std::vector<double> nodes = {2.0, 4.0};
  std::vector<double> four = {0.1, 1.0, 2.0, 10.0};
  CHECK_THROWS_AS(nonidentifiable_pair(four, nodes, 0.1), Error);
  std::vector<double> above = {1.5, 2.0, 3.0, 4.0, 5.0};
  CHECK_THROWS_AS(nonidentifiable_pair(above, nodes, 0.1), Error);
  std::vector<double> dup = {0.1, 0.5, 0.5, 2.0, 10.0};
  CHECK_THROWS_AS(nonidentifiable_pair(dup, nodes, 0.1), Error);
  std::vector<double> ok = {0.1, 0.5, 1.0, 2.0, 10.0};
  CHECK_THROWS_AS(nonidentifiable_pair(ok, nodes, -1.0), Error);
}
