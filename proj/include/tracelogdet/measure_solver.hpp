#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace tracelogdet {

struct Atom {
  double x = 1.0;
  double w = 1.0;
};

struct AtomicMeasure {
  std::vector<Atom> atoms;

  double mass() const noexcept;
  double moment(int j) const noexcept;
  double mean_log() const noexcept;
};

struct SolveConfig {
  int restarts = 8;
  int max_iter = 500;
  double tol_feas = 1e-8;   // max_j |residual_j| / max(1, M_j)
  double tol_opt = 1e-9;
  std::uint64_t seed = 0;
  double atom_floor = 1e-12;
  // Upper end of the atom box. Defaults to M_k^{1/k} * 1e3.
  std::optional<double> support_cap;
  // 0 = automatic (see worker_count).
  unsigned threads = 0;
};

enum class Sense { max, min };
enum class SolveStatus { converged, degenerate, stalled };
std::string_view to_string(SolveStatus s) noexcept;

struct SolveResult {
  double objective = 0.0;  // integral of log x against the witness
  AtomicMeasure witness;
  SolveStatus status = SolveStatus::converged;
  double residual = 0.0;   // scaled, as tol_feas
  int best_restart = -1;
  int feasible_restarts = 0;
};

// Extremizes E[log X] over probability measures on (0, cap] with at most k+1
// atoms whose moments 1..k equal `moments` (moments[j-1] = M_j). For
// Sense::min one atom is pinned at the floor r and the rest live in [r, cap].
// Throws ErrorCode::infeasible when no restart meets tol_feas.
SolveResult solve(Sense sense, std::span<const double> moments,
                  std::optional<double> floor, const SolveConfig& cfg = {});

// max_j |sum_i w_i x_i^j - M_j|.
double moment_residual(const AtomicMeasure& mu, std::span<const double> moments);
double scaled_moment_residual(const AtomicMeasure& mu, std::span<const double> moments);

}  // namespace tracelogdet
