#include "tracelogdet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "tracelogdet/error.hpp"
#include "tracelogdet/estimators.hpp"
#include "tracelogdet/numeric.hpp"

namespace tracelogdet {

std::string_view to_string(RadiusFamily f) noexcept {
  switch (f) {
    case RadiusFamily::two_point: return "two_point";
    case RadiusFamily::log_uniform: return "log_uniform";
    case RadiusFamily::uniform: return "uniform";
  }
  return "two_point";
}

RadiusFamily parse_radius_family(std::string_view s) {
  if (s == "two_point" || s == "two-point") return RadiusFamily::two_point;
  if (s == "log_uniform" || s == "log-uniform") return RadiusFamily::log_uniform;
  if (s == "uniform") return RadiusFamily::uniform;
  fail(ErrorCode::invalid_argument, "unknown radius family '" + std::string(s) + "'");
}

RadiusReport taylor_radius(RadiusFamily family, double kappa, std::optional<double> p) {
  require(std::isfinite(kappa) && kappa > 1.0, "kappa must exceed 1");
  if (p) require(family == RadiusFamily::two_point, "weight p only applies to two-point spectra");
  RadiusReport r;
  r.family = family;
  r.kappa = kappa;
  const double lk = std::log(kappa);
  constexpr double pi = std::numbers::pi;
  switch (family) {
    case RadiusFamily::two_point: {
      double q = p.value_or(0.5);
      require(q > 0.0 && q < 1.0, "weight p must lie in (0, 1)");
      r.p = q;
      double odds = std::log((1.0 - q) / q);
      r.radius = std::sqrt(odds * odds + pi * pi) / lk;
      break;
    }
    case RadiusFamily::log_uniform:
      r.radius = 2.0 * pi / lk;
      break;
    case RadiusFamily::uniform:
      r.radius = std::hypot(1.0, 2.0 * pi / lk);
      break;
  }
  r.safe_order = std::max(0, static_cast<int>(std::floor(r.radius)));
  return r;
}

namespace {

// log E[X^k] for X uniform on {1, kappa} / AM.
double two_point_cumulant(double kappa, int k) {
  const double lk = std::log(kappa);
  double log_mk = k * lk + std::log1p(std::exp(-k * lk)) - std::log(2.0);
  double log_am = lk + std::log1p(std::exp(-lk)) - std::log(2.0);
  return log_mk - k * log_am;
}

}  // namespace

std::vector<SaturationRow> saturation_scan(std::span<const double> kappas,
                                           std::span<const int> orders) {
  std::vector<SaturationRow> rows;
  for (int m : orders) {
    require(m >= 2 && m <= 64, "orders must lie in [2, 64]");
    WeightVector w = lagrange_weights(m);
    bool exceeded = false;
    for (double kappa : kappas) {
      require(std::isfinite(kappa) && kappa >= 1.0, "kappa must be at least 1");
      SaturationRow row;
      row.kappa = kappa;
      row.m = m;
      CompensatedSum est;
      for (int j = 2; j <= m; ++j) est.add(w.at(j) * two_point_cumulant(kappa, j));
      row.estimate = est.value();
      row.truth = std::log(2.0) + 0.5 * std::log(kappa) - std::log1p(kappa);
      if (kappa == 1.0) row.estimate = row.truth = 0.0;
      double diff = row.estimate - row.truth;
      row.rel_error = row.truth == 0.0 ? (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                                       : diff / std::abs(row.truth);
      if (!exceeded && std::abs(row.rel_error) > 0.5) {
        row.first_exceed = true;
        exceeded = true;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

// Strictly positive weights with unit mass and unit mean: alternate between
// the affine constraint set and the floor until the projection stays above it.
Eigen::VectorXd mean_one_base(const Eigen::VectorXd& x) {
  const Eigen::Index S = x.size();
  Eigen::MatrixXd B(2, S);
  B.row(0).setOnes();
  B.row(1) = x.transpose();
  Eigen::Vector2d target(1.0, 1.0);
  Eigen::Matrix2d G = B * B.transpose();
  const double floor = 1e-3 / static_cast<double>(S);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(S, 1.0 / static_cast<double>(S));
  for (int it = 0; it < 10000; ++it) {
    w -= B.transpose() * G.ldlt().solve(B * w - target);
    if (w.minCoeff() >= floor) return w;
    w = w.cwiseMax(floor);
  }
  fail(ErrorCode::degenerate, "no strictly positive mean-one weights on this support");
}

}  // namespace

NonidentPair nonidentifiable_pair(std::span<const double> support, std::span<const double> nodes,
                                  double eps) {
  const std::size_t S = support.size();
  require(S >= nodes.size() + 3, "support needs at least three more points than there are nodes");
  require(!(eps < 0.0), "eps must be nonnegative");
  for (std::size_t i = 0; i < S; ++i) {
    require(std::isfinite(support[i]) && support[i] > 0.0, "support points must be positive");
    for (std::size_t j = 0; j < i; ++j) require(support[i] != support[j], "support points must be distinct");
  }
  for (double t : nodes) require(std::isfinite(t) && t > 0.0, "nodes must be positive");
  auto [xmin, xmax] = std::minmax_element(support.begin(), support.end());
  require(*xmin < 1.0 && *xmax > 1.0, "support must straddle the unit mean");

  Eigen::VectorXd x(static_cast<Eigen::Index>(S)), lx(static_cast<Eigen::Index>(S));
  for (std::size_t i = 0; i < S; ++i) {
    x[static_cast<Eigen::Index>(i)] = support[i];
    lx[static_cast<Eigen::Index>(i)] = std::log(support[i]);
  }
  // Constraint rows 1, x, x^t as unit-norm columns of A.
  const Eigen::Index rows = static_cast<Eigen::Index>(nodes.size()) + 2;
  Eigen::MatrixXd A(static_cast<Eigen::Index>(S), rows);
  A.col(0).setOnes();
  A.col(1) = x;
  for (std::size_t j = 0; j < nodes.size(); ++j)
    A.col(static_cast<Eigen::Index>(j) + 2) = x.array().pow(nodes[j]).matrix();
  for (Eigen::Index c = 0; c < rows; ++c) A.col(c).normalize();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(A.rows(), rows);

  // Project log x onto the null space; twice, to clean up rounding.
  Eigen::VectorXd v = lx;
  for (int pass = 0; pass < 2; ++pass) v -= Q * (Q.transpose() * v);
  if (v.norm() <= 1e-10 * lx.norm())
    fail(ErrorCode::degenerate, "null space is orthogonal to log x; try another support");
  v.normalize();

  NonidentPair out;
  out.support.assign(support.begin(), support.end());
  out.nodes.assign(nodes.begin(), nodes.end());
  Eigen::VectorXd w0 = mean_one_base(x);

  double eps_max = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) eps_max = std::min(eps_max, w0[i] / std::abs(v[i]));
  out.eps = std::min(eps, eps_max);

  Eigen::VectorXd wp = (w0 + out.eps * v).cwiseMax(0.0);
  Eigen::VectorXd wm = (w0 - out.eps * v).cwiseMax(0.0);
  out.base.assign(w0.data(), w0.data() + w0.size());
  out.direction.assign(v.data(), v.data() + v.size());
  out.w_plus.assign(wp.data(), wp.data() + wp.size());
  out.w_minus.assign(wm.data(), wm.data() + wm.size());
  CompensatedSum base, plus, minus;
  for (std::size_t i = 0; i < S; ++i) {
    double l = std::log(support[i]);
    base.add(out.base[i] * l);
    plus.add(out.w_plus[i] * l);
    minus.add(out.w_minus[i] * l);
  }
  out.base_logmean = base.value();
  out.delta_logmean = plus.value() - minus.value();
  return out;
}

}  // namespace tracelogdet
