#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace tracelogdet {

enum class RadiusFamily { two_point, log_uniform, uniform };
std::string_view to_string(RadiusFamily f) noexcept;
RadiusFamily parse_radius_family(std::string_view s);

struct RadiusReport {
  RadiusFamily family = RadiusFamily::two_point;
  double kappa = 0.0;
  std::optional<double> p;
  double radius = 0.0;
  int safe_order = 0;  // floor(radius)
};

RadiusReport taylor_radius(RadiusFamily family, double kappa, std::optional<double> p = std::nullopt);

struct SaturationRow {
  double kappa = 1.0;
  int m = 2;
  double estimate = 0.0;
  double truth = 0.0;
  double rel_error = 0.0;
  bool first_exceed = false;  // first kappa (per m) with |rel_error| > 0.5
};

// Two eigenvalues {1, kappa} with equal weight.
std::vector<SaturationRow> saturation_scan(std::span<const double> kappas, std::span<const int> orders);

struct NonidentPair {
  std::vector<double> support;
  std::vector<double> nodes;
  std::vector<double> base;
  std::vector<double> direction;  // unit null vector
  std::vector<double> w_plus;
  std::vector<double> w_minus;
  double eps = 0.0;
  double delta_logmean = 0.0;  // E_plus[log x] - E_minus[log x]
  double base_logmean = 0.0;
};

// eps larger than the feasible maximum is shrunk to it; pass infinity to ask
// for the largest admissible perturbation.
NonidentPair nonidentifiable_pair(std::span<const double> support, std::span<const double> nodes,
                                  double eps);

}  // namespace tracelogdet
