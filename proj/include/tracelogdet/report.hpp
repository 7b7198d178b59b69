#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tracelogdet/bounds.hpp"
#include "tracelogdet/estimators.hpp"
#include "tracelogdet/moments.hpp"
#include "tracelogdet/spectra.hpp"

namespace tracelogdet {

struct InputDescriptor {
  std::string kind;  // "spectrum" or "traces"
  std::optional<std::string> family;
  std::optional<std::size_t> n;
  std::optional<double> kappa;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> path;

  friend bool operator==(const InputDescriptor&, const InputDescriptor&) = default;
};

InputDescriptor describe(const Spectrum& s);

struct PipelineOptions {
  int m = 4;                    // estimator order and closed-form order
  std::optional<int> k;         // k-trace order; defaults to m
  std::optional<double> floor;  // absolute lower bound on lambda_min
  bool spectrum_floor = false;  // use lambda_min of a known spectrum as the floor
  EstimateMethod method = EstimateMethod::k0m;
  std::complex<double> alpha{0.0, 1.3};  // boxcox only
  SolveConfig solver;
};

// What the pipeline knows about A. Eigenvalues are optional and only used as
// an exact fallback for symmetric means and as an oracle floor.
struct PipelineInput {
  InputDescriptor descriptor;
  TracePowers traces;
  std::optional<std::vector<double>> eigenvalues;
};

PipelineInput pipeline_input(const Spectrum& s, int order);
PipelineInput pipeline_input(TracePowers tp, std::string path);
// Trace order needed by the options (estimator, closed forms, k-trace).
int required_order(const PipelineOptions& opt);

struct EstimateStage {
  EstimateReport report;
  std::vector<std::string> warnings;
};

struct BoundsStage {
  BoundsReport report;
  Interval interval{};
  std::vector<std::string> warnings;
};

EstimateStage run_estimate(const PipelineInput& in, const PipelineOptions& opt);
BoundsStage run_bounds(const PipelineInput& in, const PipelineOptions& opt);

struct CertifiedReport {
  InputDescriptor input;
  int m = 0;
  int k = 0;
  EstimateReport estimate;
  BoundsReport bounds;
  double interval_lo = 0.0;  // -infinity when no lower bound
  double interval_hi = 0.0;
  double clipped_logdet = 0.0;
  Verdict verdict = Verdict::estimate_inside;
  std::vector<std::string> warnings;
};

CertifiedReport certify(const PipelineInput& in, const PipelineOptions& opt);

std::string estimate_to_json(const EstimateReport& r, int indent = 2);
std::string bounds_to_json(const BoundsReport& r, int indent = 2);
std::string report_to_json(const CertifiedReport& r, int indent = 2);
CertifiedReport report_from_json(const std::string& text);

}  // namespace tracelogdet
