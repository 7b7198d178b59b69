#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tracelogdet {

// p[k-1] = tr(A^k) for k = 1..m.
struct TracePowers {
  std::size_t n = 0;
  std::vector<double> p;

  int m() const noexcept { return static_cast<int>(p.size()); }
  double at(int k) const { return p.at(static_cast<std::size_t>(k - 1)); }
  double am() const { return at(1) / static_cast<double>(n); }
};

// M[k-1] = E[X^k] for the mean-normalized eigenvalue X; M[0] == 1 exactly.
struct NormalizedMoments {
  std::size_t n = 0;
  std::vector<double> M;

  int m() const noexcept { return static_cast<int>(M.size()); }
  double at(int k) const { return k == 0 ? 1.0 : M.at(static_cast<std::size_t>(k - 1)); }
};

// K[k] = log E[X^k] for k = 0..m with K[0] = K[1] = 0.
struct CumulantSamples {
  std::vector<double> K;

  int m() const noexcept { return static_cast<int>(K.size()) - 1; }
};

// Log normalized elementary symmetric means. logE[k-1] = log(e_k / C(n,k)),
// slopes[k-1] = logE_k - logE_{k-1} with logE_0 = 0.
struct SymmetricMeans {
  std::size_t n = 0;
  std::vector<double> logE;
  std::vector<double> slopes;

  int m() const noexcept { return static_cast<int>(logE.size()); }
  double log_e(int k) const { return k == 0 ? 0.0 : logE.at(static_cast<std::size_t>(k - 1)); }
  double slope(int k) const { return slopes.at(static_cast<std::size_t>(k - 1)); }
};

NormalizedMoments normalize(const TracePowers& tp);
NormalizedMoments normalized_from_eigenvalues(std::span<const double> x, int m);
CumulantSamples cumulants(const NormalizedMoments& nm);

// Newton's identities from power sums q_1..q_m of n variables. Throws
// ErrorCode::cancellation when some e_k is nonpositive or the running error
// estimate exceeds 1e-6 relative.
SymmetricMeans newton_maclaurin(std::span<const double> q, std::size_t n);
SymmetricMeans newton_maclaurin(const NormalizedMoments& nm);
// Same quantities from explicit values through the positive product recurrence.
SymmetricMeans symmetric_means_exact(std::span<const double> x, int m);

// mu_2..mu_order of the normalized variable; result[k-2] = mu_k.
std::vector<double> central_moments(const NormalizedMoments& nm, int order);

// G(0..m) with G(k) = Re[(M_k^alpha - 1)/alpha].
std::vector<double> boxcox_samples(const NormalizedMoments& nm, std::complex<double> alpha);

void write_traces_csv(std::ostream& out, const TracePowers& tp);
TracePowers read_traces_csv(std::istream& in);

}  // namespace tracelogdet
