#include "tracelogdet/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>

#include "tracelogdet/analysis.hpp"
#include "tracelogdet/bounds.hpp"
#include "tracelogdet/error.hpp"
#include "tracelogdet/estimators.hpp"
#include "tracelogdet/noise.hpp"
#include "tracelogdet/spectra.hpp"

namespace tracelogdet {

std::string format_cell(const Cell& c) {
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  double v = std::get<double>(c);
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_csv(std::ostream& out, const Table& t) {
  auto line = [&](const auto& cells, auto&& fmt) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << fmt(cells[i]);
    out << '\n';
  };
  line(t.header, [](const std::string& s) { return s; });
  for (const auto& row : t.rows) line(row, [](const Cell& c) { return format_cell(c); });
}

namespace {

constexpr std::size_t kBenchN = 1024;
const std::vector<int> kTableOrders = {2, 3, 4, 5, 6, 7, 8, 16, 32};

Spectrum bench(SpectrumFamily f, double kappa, std::size_t n, std::uint64_t seed) {
  return generate(f, n, kappa, is_random(f) ? std::optional<std::uint64_t>(seed) : std::nullopt);
}

double rel_error_pct(double est, double truth) { return (est - truth) / std::abs(truth) * 100.0; }

// Relative k0m errors (%) for each order in `orders`.
std::vector<double> k0m_errors(const Spectrum& s, const std::vector<int>& orders) {
  int top = *std::max_element(orders.begin(), orders.end());
  CumulantSamples K = cumulants(normalize(trace_powers(s, top)));
  double truth = exact_stats(s).kprime0;
  std::vector<double> out;
  for (int m : orders) out.push_back(rel_error_pct(k0m_estimate(K, m).kprime0_hat, truth));
  return out;
}

Table k0m_errors_table() {
  Table t;
  t.header = {"kappa"};
  for (int m : kTableOrders) t.header.push_back("k0_" + std::to_string(m));
  for (double kappa : {2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0}) {
    std::vector<Cell> row{kappa};
    for (double e : k0m_errors(generate(SpectrumFamily::geometric, kBenchN, kappa), kTableOrders))
      row.emplace_back(e);
    t.rows.push_back(std::move(row));
  }
  return t;
}

// Orders whose |error| is within the table's rounding tolerance of the best
// are listed as ties.
Table optimal_m_table() {
  constexpr double tie_pp = 0.15;
  Table t;
  t.header = {"kappa", "m_star", "abs_error_pct", "ties"};
  for (double kappa : {2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0, 5000.0}) {
    auto err = k0m_errors(generate(SpectrumFamily::geometric, kBenchN, kappa), kTableOrders);
    std::size_t best = 0;
    for (std::size_t i = 1; i < err.size(); ++i)
      if (std::abs(err[i]) < std::abs(err[best])) best = i;
    std::string ties;
    for (std::size_t i = 0; i < err.size(); ++i) {
      if (i == best || std::abs(err[i]) > std::abs(err[best]) + tie_pp) continue;
      ties += (ties.empty() ? "" : " ") + std::to_string(kTableOrders[i]);
    }
    t.rows.push_back({kappa, static_cast<long long>(kTableOrders[best]), std::abs(err[best]), ties});
  }
  return t;
}

Table bounds_comparison_table(const ReproduceOptions& opt) {
  Table t;
  t.header = {"spectrum", "k0_4_error", "U2_gap", "U4_gap", "U8_gap", "LS_gap",
              "L2_gap", "L4_gap", "L8_gap"};
  SolveConfig cfg;
  cfg.threads = opt.threads;
  cfg.seed = opt.seed;
  for (SpectrumFamily f : {SpectrumFamily::geometric, SpectrumFamily::uniform, SpectrumFamily::lognormal,
                           SpectrumFamily::two_point, SpectrumFamily::bimodal, SpectrumFamily::clustered}) {
    Spectrum s = bench(f, 100.0, kBenchN, opt.seed);
    SpectrumStats st = exact_stats(s);
    const double truth = st.kprime0;
    NormalizedMoments nm = normalize(trace_powers(s, 8));
    const double r = s.eigenvalues.front() / st.am;
    auto upper_gap = [&](double U) { return (std::log(U) - truth) / std::abs(truth) * 100.0; };
    auto lower_gap = [&](double L) { return (truth - std::log(L)) / std::abs(truth) * 100.0; };

    SymmetricMeans sm;
    try {
      sm = newton_maclaurin(NormalizedMoments{nm.n, {nm.M.begin(), nm.M.begin() + 4}});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::cancellation) throw;
      sm = symmetric_means_exact(normalized_eigenvalues(s), 4);
    }
    std::vector<Cell> row{std::string(to_string(f)),
                          k0m_errors(s, {4}).front(),
                          upper_gap(rodin_upper(nm.at(2), nm.n)),
                          upper_gap(ktrace_bound(Sense::max, nm, 4, std::nullopt, cfg).value),
                          upper_gap(ktrace_bound(Sense::max, nm, 8, std::nullopt, cfg).value),
                          upper_gap(last_slope_upper(sm, 4)),
                          lower_gap(lower_k2_closed(nm.at(2), r)),
                          lower_gap(ktrace_bound(Sense::min, nm, 4, r, cfg).value),
                          lower_gap(ktrace_bound(Sense::min, nm, 8, r, cfg).value)};
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table alpha_table() {
  Table t;
  t.header = {"m", "weight_norm", "m_minus_1", "alpha", "sd_at_1pct"};
  for (int m = 2; m <= 8; ++m) {
    NoiseTheory th = theory(m, 0.01);
    t.rows.push_back({static_cast<long long>(m), th.weight_norm, static_cast<long long>(m - 1), th.alpha,
                      th.alpha * 0.01});
  }
  return t;
}

Table asymptotic_table() {
  WeightNormFit fit = weight_norm_fit(6, 20);
  const double c_theory = 2.0 / std::pow(std::numbers::pi, 0.25);
  const double coef20 = theory(20, 0.0).weight_norm * std::pow(20.0, 1.25) / std::pow(2.0, 20);
  Table t;
  t.header = {"parameter", "theoretical", "fitted", "relative_error"};
  t.rows.push_back({std::string("a"), 1.25, fit.a, (fit.a - 1.25) / 1.25});
  t.rows.push_back({std::string("c"), c_theory, fit.c, (fit.c - c_theory) / c_theory});
  t.rows.push_back({std::string("r2"), std::string(), fit.r2, std::string()});
  t.rows.push_back({std::string("coef_m20"), c_theory, coef20, (coef20 - c_theory) / c_theory});
  return t;
}

Table saturation_table() {
  std::vector<double> kappas;
  for (int i = 0; i <= 16; ++i) kappas.push_back(std::pow(10.0, 0.5 * i));
  std::vector<int> orders = {2, 3, 4, 5, 6, 7, 8};
  Table t;
  t.header = {"kappa", "m", "estimate", "truth", "rel_error", "first_exceed"};
  for (const SaturationRow& r : saturation_scan(kappas, orders))
    t.rows.push_back({r.kappa, static_cast<long long>(r.m), r.estimate, r.truth, r.rel_error,
                      static_cast<long long>(r.first_exceed)});
  return t;
}

Table radius_scan_table() {
  Table t;
  t.header = {"family", "kappa", "radius", "safe_order"};
  for (RadiusFamily f : {RadiusFamily::two_point, RadiusFamily::log_uniform, RadiusFamily::uniform})
    for (double kappa : {2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0, 5000.0, 10000.0}) {
      RadiusReport r = taylor_radius(f, kappa);
      t.rows.push_back({std::string(to_string(f)), kappa, r.radius, static_cast<long long>(r.safe_order)});
    }
  return t;
}

Table noise_crossover_table(const ReproduceOptions& opt) {
  const std::vector<int> orders = {2, 3, 4, 5, 6, 7, 8};
  const std::vector<double> etas = {0.0, 0.001, 0.005, 0.01, 0.02, 0.05};
  return noise_sweep(generate(SpectrumFamily::geometric, kBenchN, 100.0), orders, etas, opt.trials,
                     opt.seed, opt.threads);
}

// Median over kappa of |relative error| for the Box-Cox transform at alpha
// (alpha = 0 is the log itself).
double median_boxcox_error(SpectrumFamily f, double alpha, int m, std::uint64_t seed) {
  std::vector<double> errs;
  for (double kappa : {5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0}) {
    Spectrum s = bench(f, kappa, kBenchN, seed);
    NormalizedMoments nm = normalize(trace_powers(s, m));
    double est = alpha == 0.0
                     ? k0m_estimate(cumulants(nm), m).kprime0_hat
                     : transform_estimate(boxcox_samples(nm, {alpha, 0.0}), {alpha, 0.0}, m).kprime0_hat;
    errs.push_back(std::abs(rel_error_pct(est, exact_stats(s).kprime0)));
  }
  std::sort(errs.begin(), errs.end());
  return 0.5 * (errs[errs.size() / 2 - 1] + errs[errs.size() / 2]);
}

Table boxcox_sweep_table(const ReproduceOptions& opt) {
  Table t;
  t.header = {"spectrum", "m", "best_alpha", "best_err", "log_err"};
  for (SpectrumFamily f : {SpectrumFamily::geometric, SpectrumFamily::uniform, SpectrumFamily::lognormal,
                           SpectrumFamily::two_point, SpectrumFamily::bimodal, SpectrumFamily::clustered})
    for (int m : {4, 6}) {
      double best_alpha = 0.0, best = median_boxcox_error(f, 0.0, m, opt.seed);
      const double log_err = best;
      for (int i = -10; i <= 10; ++i) {
        if (i == 0) continue;
        double a = 0.1 * i;
        double e = median_boxcox_error(f, a, m, opt.seed);
        if (e < best) {
          best = e;
          best_alpha = a;
        }
      }
      t.rows.push_back({std::string(to_string(f)), static_cast<long long>(m), best_alpha, best, log_err});
    }
  return t;
}

}  // namespace

Table noise_sweep(const Spectrum& s, std::span<const int> orders, std::span<const double> etas,
                  int trials, std::uint64_t seed, unsigned threads) {
  require(!orders.empty() && !etas.empty(), "need at least one order and one noise level");
  const double truth = exact_stats(s).kprime0;
  CumulantSamples K = cumulants(normalize(trace_powers(s, *std::max_element(orders.begin(), orders.end()))));
  std::map<int, double> bias;
  for (int m : orders) bias[m] = k0m_estimate(K, m).kprime0_hat - truth;
  Table t;
  t.header = {"eta", "m", "b_m", "alpha", "crossover_eta", "b_noise", "rmse_pred",
              "mc_bias", "mc_sd", "mc_rmse", "truncated", "optimal"};
  for (double eta : etas) {
    int best = optimal_order(bias, eta);
    for (int m : orders) {
      NoiseTheory th = theory(m, eta, bias[m]);
      NoiseStats mc = monte_carlo(s, m, eta, trials, seed, threads);
      t.rows.push_back({eta, static_cast<long long>(m), bias[m], th.alpha, *th.crossover_eta,
                        th.bias_noise, *th.rmse_pred, mc.bias, mc.sd, mc.rmse,
                        static_cast<long long>(mc.truncated), static_cast<long long>(m == best)});
    }
  }
  return t;
}

const std::vector<std::string>& reproduce_targets() {
  static const std::vector<std::string> names = {
      "k0m-errors", "optimal-m",  "bounds-comparison", "alpha",        "asymptotic",
      "saturation", "radius-scan", "noise-crossover",  "boxcox-sweep"};
  return names;
}

Table reproduce(std::string_view target, const ReproduceOptions& opt) {
  if (target == "k0m-errors") return k0m_errors_table();
  if (target == "optimal-m") return optimal_m_table();
  if (target == "bounds-comparison") return bounds_comparison_table(opt);
  if (target == "alpha") return alpha_table();
  if (target == "asymptotic") return asymptotic_table();
  if (target == "saturation") return saturation_table();
  if (target == "radius-scan") return radius_scan_table();
  if (target == "noise-crossover") return noise_crossover_table(opt);
  if (target == "boxcox-sweep") return boxcox_sweep_table(opt);
  fail(ErrorCode::invalid_argument, "unknown reproduce target '" + std::string(target) + "'");
}

}  // namespace tracelogdet
