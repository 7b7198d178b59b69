#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracelogdet/moments.hpp"

namespace tracelogdet {

enum class SpectrumFamily { geometric, uniform, lognormal, two_point, bimodal, clustered, custom };

std::string_view to_string(SpectrumFamily f) noexcept;
SpectrumFamily parse_family(std::string_view name);
bool is_random(SpectrumFamily f) noexcept;

struct Spectrum {
  SpectrumFamily family = SpectrumFamily::custom;
  std::optional<std::uint64_t> seed;
  std::vector<double> eigenvalues;  // ascending, all > 0

  std::size_t n() const noexcept { return eigenvalues.size(); }
  double kappa() const noexcept { return eigenvalues.back() / eigenvalues.front(); }
};

// Sorts and validates an arbitrary positive eigenvalue list.
Spectrum make_custom(std::vector<double> eigenvalues);

struct SpectrumStats {
  double am = 0.0;
  double gm = 0.0;
  double kprime0 = 0.0;  // log(gm / am)
  double logdet = 0.0;
  double kappa = 0.0;
};

// Benchmark families on [1, kappa]. `seed` is required for lognormal and
// clustered and ignored otherwise.
Spectrum generate(SpectrumFamily family, std::size_t n, double kappa,
                  std::optional<std::uint64_t> seed = std::nullopt);

SpectrumStats exact_stats(const Spectrum& s);

// p_k = sum_i lambda_i^k for k = 1..m, compensated.
TracePowers trace_powers(const Spectrum& s, int m);

// Eigenvalues divided by their arithmetic mean.
std::vector<double> normalized_eigenvalues(const Spectrum& s);

std::string spectrum_to_json(const Spectrum& s, int indent = 2);
// Accepts the same layout; regenerates eigenvalues when they are absent.
Spectrum spectrum_from_json(std::string_view text);

}  // namespace tracelogdet
