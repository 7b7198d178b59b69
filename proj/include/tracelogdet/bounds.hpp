#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "tracelogdet/estimators.hpp"
#include "tracelogdet/measure_solver.hpp"
#include "tracelogdet/moments.hpp"

namespace tracelogdet {

enum class ClosedForm { maclaurin, rodin, last_slope, combined };
enum class Verdict { estimate_inside, clipped_to_upper, clipped_to_lower, no_lower_bound };

std::string_view to_string(Verdict v) noexcept;
Verdict parse_verdict(std::string_view s);

// Bounds on GM/AM. Keys are labels such as "rodin", "maclaurin_4",
// "last_slope_4", "ktrace_4" (upper) and "k2_closed", "ktrace_4" (lower).
struct BoundsReport {
  std::map<std::string, double> upper;
  std::map<std::string, double> lower;
  double U_best = 1.0;
  std::optional<double> L_best;
  std::optional<double> floor_r;
  std::optional<std::pair<double, double>> logdet_interval;
  std::optional<Verdict> verdict;

  void add_upper(const std::string& label, double value);
  void add_lower(const std::string& label, double value);
};

// `m` selects the order for maclaurin and last_slope; combined uses m = 4.
double closed_form_upper(ClosedForm kind, const SymmetricMeans* sm, std::optional<double> M2,
                         std::size_t n, int m);
double rodin_upper(double M2, std::size_t n);
double maclaurin_upper(const SymmetricMeans& sm, int m);
double last_slope_upper(const SymmetricMeans& sm, int m);

double lower_k2_closed(double M2, double r);

struct KTraceBound {
  double value = 1.0;
  AtomicMeasure witness;
  SolveStatus status = SolveStatus::converged;
};

// k = 2 goes through the closed forms; larger k through the measure solver.
KTraceBound ktrace_bound(Sense sense, const NormalizedMoments& nm, int k,
                         std::optional<double> r, const SolveConfig& cfg = {});

struct Interval {
  double lo;  // -infinity when no lower bound is available
  double hi;
};

Interval certified_interval(double p1, std::size_t n, double U, std::optional<double> L);

struct GapResult {
  double clipped = 0.0;
  Verdict verdict = Verdict::estimate_inside;
  double width = 0.0;
};

// Works on the log-determinant scale.
GapResult gap_diagnostic(double logdet_hat, const Interval& iv);
GapResult gap_diagnostic(const EstimateReport& estimate, const Interval& iv);

}  // namespace tracelogdet
