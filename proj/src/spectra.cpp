#include "tracelogdet/spectra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "json.hpp"
#include "tracelogdet/error.hpp"
#include "tracelogdet/numeric.hpp"
#include "tracelogdet/random.hpp"

namespace tracelogdet {

namespace {

constexpr std::array<std::pair<SpectrumFamily, std::string_view>, 7> kFamilyNames{{
    {SpectrumFamily::geometric, "geometric"},
    {SpectrumFamily::uniform, "uniform"},
    {SpectrumFamily::lognormal, "lognormal"},
    {SpectrumFamily::two_point, "two_point"},
    {SpectrumFamily::bimodal, "bimodal"},
    {SpectrumFamily::clustered, "clustered"},
    {SpectrumFamily::custom, "custom"},
}};

// Maps log lambda affinely so the smallest value lands on 0 and the largest
// on log kappa. Pins the endpoints exactly.
void rescale_log_affine(std::vector<double>& v, double kappa) {
  std::sort(v.begin(), v.end());
  double lo = std::log(v.front()), hi = std::log(v.back());
  if (!(hi > lo)) fail(ErrorCode::degenerate, "random spectrum collapsed to a point");
  double target = std::log(kappa);
  for (double& x : v) x = std::exp((std::log(x) - lo) / (hi - lo) * target);
  v.front() = 1.0;
  v.back() = kappa;
}

}  // namespace

std::string_view to_string(SpectrumFamily f) noexcept {
  for (auto [fam, name] : kFamilyNames)
    if (fam == f) return name;
  return "custom";
}

SpectrumFamily parse_family(std::string_view name) {
  for (auto [fam, n] : kFamilyNames)
    if (n == name) return fam;
  if (name == "two-point") return SpectrumFamily::two_point;
  fail(ErrorCode::invalid_argument, "unknown spectrum family '" + std::string(name) + "'");
}

bool is_random(SpectrumFamily f) noexcept {
  return f == SpectrumFamily::lognormal || f == SpectrumFamily::clustered;
}

Spectrum make_custom(std::vector<double> eigenvalues) {
  require(!eigenvalues.empty(), "spectrum needs at least one eigenvalue");
  for (double v : eigenvalues)
    require(std::isfinite(v) && v > 0.0, "eigenvalues must be finite and positive");
  std::sort(eigenvalues.begin(), eigenvalues.end());
  Spectrum s;
  s.family = SpectrumFamily::custom;
  s.eigenvalues = std::move(eigenvalues);
  return s;
}

Spectrum generate(SpectrumFamily family, std::size_t n, double kappa,
                  std::optional<std::uint64_t> seed) {
  require(n >= 2, "n must be at least 2");
  require(std::isfinite(kappa) && kappa > 1.0, "kappa must be > 1");
  require(family != SpectrumFamily::custom, "custom spectra are built from explicit eigenvalues");
  if (is_random(family))
    require(seed.has_value(), std::string(to_string(family)) + " spectrum needs a seed");
  if (family == SpectrumFamily::clustered) require(n % 4 == 0, "clustered needs n divisible by 4");

  Spectrum s;
  s.family = family;
  if (is_random(family)) s.seed = seed;
  auto& v = s.eigenvalues;
  v.resize(n);
  const double last = static_cast<double>(n - 1);

  switch (family) {
    case SpectrumFamily::geometric:
      for (std::size_t i = 0; i < n; ++i) v[i] = std::pow(kappa, static_cast<double>(i) / last);
      v.back() = kappa;
      break;
    case SpectrumFamily::uniform:
      for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + (kappa - 1.0) * static_cast<double>(i) / last;
      break;
    case SpectrumFamily::two_point:
      std::fill(v.begin(), v.end(), 1.0);
      v.back() = kappa;
      break;
    case SpectrumFamily::bimodal:
      for (std::size_t i = 0; i < n; ++i) v[i] = i < n / 2 ? 1.0 : kappa;
      break;
    case SpectrumFamily::lognormal: {
      Rng rng(derive_seed(*seed, 1));
      std::normal_distribution<double> z(0.0, 0.25 * std::log(kappa));
      for (double& x : v) x = std::exp(z(rng));
      rescale_log_affine(v, kappa);
      break;
    }
    case SpectrumFamily::clustered: {
      Rng rng(derive_seed(*seed, 2));
      std::uniform_real_distribution<double> jitter(0.99, 1.01);
      for (std::size_t i = 0; i < n; ++i) {
        double center = std::pow(kappa, static_cast<double>(i / (n / 4)) / 3.0);
        v[i] = center * jitter(rng);
      }
      rescale_log_affine(v, kappa);
      break;
    }
    case SpectrumFamily::custom:
      break;
  }
  return s;
}

SpectrumStats exact_stats(const Spectrum& s) {
  require(!s.eigenvalues.empty(), "empty spectrum");
  CompensatedSum sum, logsum;
  for (double x : s.eigenvalues) {
    sum.add(x);
    logsum.add(std::log(x));
  }
  const double n = static_cast<double>(s.n());
  SpectrumStats st;
  st.am = sum.value() / n;
  st.logdet = logsum.value();
  double mean_log = st.logdet / n;
  st.gm = std::exp(mean_log);
  // log(gm/am) = E[log(x/am)], accumulated directly to avoid subtracting two
  // nearly equal logs for tight spectra
  CompensatedSum rel;
  for (double x : s.eigenvalues) rel.add(std::log(x / st.am));
  st.kprime0 = std::min(0.0, rel.value() / n);
  st.kappa = s.kappa();
  return st;
}

TracePowers trace_powers(const Spectrum& s, int m) {
  require(m >= 1, "trace order must be >= 1");
  const double lmax = s.eigenvalues.back();
  if (m * std::log(lmax) >= std::log(std::numeric_limits<double>::max()) - std::log(double(s.n())))
    fail(ErrorCode::overflow, "lambda_max^m exceeds double range");
  TracePowers tp;
  tp.n = s.n();
  tp.p.resize(static_cast<std::size_t>(m));
  std::vector<CompensatedSum> acc(static_cast<std::size_t>(m));
  for (double x : s.eigenvalues) {
    double xp = 1.0;
    for (int k = 0; k < m; ++k) {
      xp *= x;
      acc[static_cast<std::size_t>(k)].add(xp);
    }
  }
  for (int k = 0; k < m; ++k) tp.p[static_cast<std::size_t>(k)] = acc[static_cast<std::size_t>(k)].value();
  return tp;
}

std::vector<double> normalized_eigenvalues(const Spectrum& s) {
  double am = compensated_sum(s.eigenvalues) / static_cast<double>(s.n());
  std::vector<double> x(s.eigenvalues);
  for (double& v : x) v /= am;
  return x;
}

std::string spectrum_to_json(const Spectrum& s, int indent) {
  nlohmann::json j;
  j["family"] = to_string(s.family);
  j["n"] = s.n();
  j["kappa"] = s.kappa();
  j["seed"] = s.seed ? nlohmann::json(*s.seed) : nlohmann::json(nullptr);
  j["eigenvalues"] = s.eigenvalues;
  return j.dump(indent);
}

Spectrum spectrum_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::io, std::string("bad spectrum JSON: ") + e.what());
  }
  try {
    SpectrumFamily fam = parse_family(j.value("family", std::string("custom")));
    std::optional<std::uint64_t> seed;
    if (j.contains("seed") && !j["seed"].is_null()) seed = j["seed"].get<std::uint64_t>();
    if (j.contains("eigenvalues") && !j["eigenvalues"].is_null()) {
      Spectrum s = make_custom(j["eigenvalues"].get<std::vector<double>>());
      s.family = fam;
      s.seed = is_random(fam) ? seed : std::nullopt;
      if (j.contains("n")) require(j["n"].get<std::size_t>() == s.n(), "n does not match eigenvalue count");
      return s;
    }
    require(fam != SpectrumFamily::custom, "custom spectrum JSON needs eigenvalues");
    return generate(fam, j.at("n").get<std::size_t>(), j.at("kappa").get<double>(), seed);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::io, std::string("bad spectrum JSON: ") + e.what());
  }
}

}  // namespace tracelogdet
