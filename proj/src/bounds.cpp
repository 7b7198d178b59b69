#include "tracelogdet/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tracelogdet/error.hpp"

namespace tracelogdet {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::estimate_inside: return "estimate_inside";
    case Verdict::clipped_to_upper: return "clipped_to_upper";
    case Verdict::clipped_to_lower: return "clipped_to_lower";
    case Verdict::no_lower_bound: return "no_lower_bound";
  }
  return "estimate_inside";
}

Verdict parse_verdict(std::string_view s) {
  for (auto v : {Verdict::estimate_inside, Verdict::clipped_to_upper, Verdict::clipped_to_lower,
                 Verdict::no_lower_bound})
    if (to_string(v) == s) return v;
  fail(ErrorCode::invalid_argument, "unknown verdict '" + std::string(s) + "'");
}

void BoundsReport::add_upper(const std::string& label, double value) {
  upper[label] = value;
  U_best = std::min(U_best, value);
}

void BoundsReport::add_lower(const std::string& label, double value) {
  lower[label] = value;
  L_best = L_best ? std::max(*L_best, value) : value;
}

namespace {

double checked_M2(double M2) {
  require(std::isfinite(M2), "M2 must be finite");
  require(M2 >= 1.0 - 1e-12, "M2 < 1 is impossible for mean-normalized moments");
  return std::max(M2, 1.0);
}

}  // namespace

double rodin_upper(double M2, std::size_t n) {
  M2 = checked_M2(M2);
  require(n >= 1, "n must be positive");
  if (M2 == 1.0 || n == 1) return 1.0;
  const double dn = static_cast<double>(n);
  require(M2 <= dn * (1.0 + 1e-12), "M2 exceeds n: not the moments of n positive values");
  double d = std::sqrt((M2 - 1.0) / (dn - 1.0));
  d = std::min(d, 1.0);
  if (d == 1.0) return 0.0;
  double logU = (dn - 1.0) / dn * std::log1p(-d) + std::log1p((dn - 1.0) * d) / dn;
  return std::exp(logU);
}

double maclaurin_upper(const SymmetricMeans& sm, int m) {
  require(m >= 1 && m <= sm.m(), "Maclaurin order out of range");
  return std::exp(sm.log_e(m) / m);
}

double last_slope_upper(const SymmetricMeans& sm, int m) {
  require(m >= 1 && m <= sm.m(), "last-slope order out of range");
  require(static_cast<std::size_t>(m) < sm.n, "last-slope bound needs m < n");
  const double dn = static_cast<double>(sm.n);
  return std::exp((sm.log_e(m) + (dn - m) * sm.slope(m)) / dn);
}

double closed_form_upper(ClosedForm kind, const SymmetricMeans* sm, std::optional<double> M2,
                         std::size_t n, int m) {
  switch (kind) {
    case ClosedForm::rodin:
      require(M2.has_value(), "Rodin bound needs M2");
      return rodin_upper(*M2, n);
    case ClosedForm::maclaurin:
      require(sm != nullptr, "Maclaurin bound needs symmetric means");
      return maclaurin_upper(*sm, m);
    case ClosedForm::last_slope:
      require(sm != nullptr, "last-slope bound needs symmetric means");
      return last_slope_upper(*sm, m);
    case ClosedForm::combined:
      require(sm != nullptr && M2.has_value(), "combined bound needs M2 and symmetric means");
      return std::min({rodin_upper(*M2, n), maclaurin_upper(*sm, 4), last_slope_upper(*sm, 4)});
  }
  return 1.0;
}

double lower_k2_closed(double M2, double r) {
  M2 = checked_M2(M2);
  require(r > 0.0, "floor r must be positive");
  if (M2 == 1.0) return 1.0;
  if (r >= 1.0) fail(ErrorCode::infeasible, "floor r >= 1 is infeasible when M2 > 1");
  double v = M2 - 1.0;
  double w1 = v / ((r - 1.0) * (r - 1.0) + v);
  double x2 = (1.0 - w1 * r) / (1.0 - w1);
  return std::exp(w1 * std::log(r) + (1.0 - w1) * std::log(x2));
}

KTraceBound ktrace_bound(Sense sense, const NormalizedMoments& nm, int k, std::optional<double> r,
                         const SolveConfig& cfg) {
  require(k >= 1 && k <= nm.m(), "k-trace order out of range");
  KTraceBound out;
  if (sense == Sense::min) {
    require(k >= 2, "lower k-trace bound needs k >= 2");
    require(r.has_value() && *r > 0.0, "lower k-trace bound needs a floor r > 0");
  }
  const double M2 = k >= 2 ? nm.at(2) : 1.0;
  if (k == 1 || (k >= 2 && M2 - 1.0 <= 1e-14)) {
    out.witness.atoms = {{1.0, 1.0}};
    out.status = k == 1 ? SolveStatus::converged : SolveStatus::degenerate;
    return out;
  }
  if (k == 2) {
    if (sense == Sense::max) {
      const double dn = static_cast<double>(nm.n);
      double d = std::sqrt((M2 - 1.0) / (dn - 1.0));
      out.value = rodin_upper(M2, nm.n);
      out.witness.atoms = {{1.0 - d, (dn - 1.0) / dn}, {1.0 + (dn - 1.0) * d, 1.0 / dn}};
    } else {
      double v = M2 - 1.0;
      double w1 = v / ((*r - 1.0) * (*r - 1.0) + v);
      out.value = lower_k2_closed(M2, *r);
      out.witness.atoms = {{*r, w1}, {(1.0 - w1 * *r) / (1.0 - w1), 1.0 - w1}};
    }
    return out;
  }
  std::vector<double> moments(nm.M.begin(), nm.M.begin() + k);
  SolveConfig run = cfg;
  if (!run.support_cap) {
    // every normalized eigenvalue obeys x^k <= n M_k, so this cap never cuts
    // off the true spectrum
    const double root = std::pow(moments.back(), 1.0 / k);
    run.support_cap = root * std::max(1e3, std::pow(static_cast<double>(nm.n), 1.0 / k) * 1.01);
  }
  const std::optional<double> floor = sense == Sense::min ? r : std::nullopt;
  SolveResult res = solve(sense, moments, floor, run);
  if (res.status == SolveStatus::stalled) {
    // near-flat moment sequences converge slowly; one longer attempt
    run.max_iter *= 4;
    res = solve(sense, moments, floor, run);
  }
  if (res.status == SolveStatus::stalled)
    fail(ErrorCode::solver_stalled,
         "k-trace " + std::string(sense == Sense::max ? "upper" : "lower") + " bound (k=" +
             std::to_string(k) + ") did not converge within the iteration budget");
  out.value = std::exp(res.objective);
  out.witness = std::move(res.witness);
  out.status = res.status;
  return out;
}

Interval certified_interval(double p1, std::size_t n, double U, std::optional<double> L) {
  require(p1 > 0.0 && n >= 1 && U > 0.0, "interval needs p1 > 0, n >= 1, U > 0");
  if (L) require(*L > 0.0 && *L <= U * (1.0 + 1e-12), "need 0 < L <= U");
  const double dn = static_cast<double>(n);
  const double log_am = std::log(p1 / dn);
  Interval iv;
  iv.hi = dn * (log_am + std::log(U));
  iv.lo = L ? dn * (log_am + std::log(*L)) : -std::numeric_limits<double>::infinity();
  return iv;
}

GapResult gap_diagnostic(double logdet_hat, const Interval& iv) {
  GapResult g;
  g.width = iv.hi - iv.lo;
  g.clipped = logdet_hat;
  if (logdet_hat > iv.hi) {
    g.clipped = iv.hi;
    g.verdict = Verdict::clipped_to_upper;
  } else if (std::isinf(iv.lo)) {
    g.verdict = Verdict::no_lower_bound;
  } else if (logdet_hat < iv.lo) {
    g.clipped = iv.lo;
    g.verdict = Verdict::clipped_to_lower;
  } else {
    g.verdict = Verdict::estimate_inside;
  }
  return g;
}

GapResult gap_diagnostic(const EstimateReport& estimate, const Interval& iv) {
  require(estimate.logdet_hat.has_value(), "estimate carries no log-determinant");
  return gap_diagnostic(*estimate.logdet_hat, iv);
}

}  // namespace tracelogdet
