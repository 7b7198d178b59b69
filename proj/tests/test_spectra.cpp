#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "tracelogdet/error.hpp"
#include "tracelogdet/random.hpp"
#include "tracelogdet/spectra.hpp"

using namespace tracelogdet;

namespace {

const SpectrumFamily kFamilies[] = {SpectrumFamily::geometric, SpectrumFamily::uniform,
                                    SpectrumFamily::lognormal, SpectrumFamily::two_point,
                                    SpectrumFamily::bimodal,   SpectrumFamily::clustered};

Spectrum make(SpectrumFamily f, std::size_t n, double kappa, std::uint64_t seed = 7) {
  return generate(f, n, kappa, is_random(f) ? std::optional<std::uint64_t>(seed) : std::nullopt);
}

}  // namespace

TEST_CASE("family formulas on small instances") {
  auto g = generate(SpectrumFamily::geometric, 3, 4.0).eigenvalues;
  CHECK(g[0] == doctest::Approx(1.0));
  CHECK(g[1] == doctest::Approx(2.0));
  CHECK(g[2] == doctest::Approx(4.0));
  auto u = generate(SpectrumFamily::uniform, 3, 3.0).eigenvalues;
  CHECK(u == std::vector<double>{1.0, 2.0, 3.0});
  auto t = generate(SpectrumFamily::two_point, 4, 10.0).eigenvalues;
  CHECK(t == std::vector<double>{1.0, 1.0, 1.0, 10.0});
  auto b = generate(SpectrumFamily::bimodal, 4, 10.0).eigenvalues;
  CHECK(b == std::vector<double>{1.0, 1.0, 10.0, 10.0});
}

TEST_CASE("generate rejects bad arguments") {
  CHECK_THROWS_AS(generate(SpectrumFamily::geometric, 1, 10.0), Error);
  CHECK_THROWS_AS(generate(SpectrumFamily::geometric, 8, 1.0), Error);
  CHECK_THROWS_AS(generate(SpectrumFamily::clustered, 10, 10.0, 1), Error);
  CHECK_THROWS_AS(generate(SpectrumFamily::lognormal, 8, 10.0), Error);
  CHECK_THROWS_AS(generate(SpectrumFamily::custom, 8, 10.0), Error);
  CHECK_THROWS_AS(make_custom({1.0, -2.0}), Error);
}

TEST_CASE("every family spans exactly [1, kappa] in ascending order") {
  for (SpectrumFamily f : kFamilies)
    for (double kappa : {5.0, 100.0, 1000.0}) {
      Spectrum s = make(f, 64, kappa);
      CAPTURE(to_string(f));
      CHECK(s.n() == 64);
      CHECK(s.eigenvalues.front() == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(s.eigenvalues.back() == doctest::Approx(kappa).epsilon(1e-9));
      CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
    }
}

TEST_CASE("random families are reproducible from their seed") {
  for (SpectrumFamily f : {SpectrumFamily::lognormal, SpectrumFamily::clustered}) {
    CHECK(make(f, 128, 50.0, 3).eigenvalues == make(f, 128, 50.0, 3).eigenvalues);
    CHECK(make(f, 128, 50.0, 3).eigenvalues != make(f, 128, 50.0, 4).eigenvalues);
    CHECK(make(f, 128, 50.0, 3).seed == 3u);
  }
  CHECK_FALSE(generate(SpectrumFamily::geometric, 8, 10.0, 5).seed.has_value());
}

TEST_CASE("clustered spectra sit within one percent of four levels") {
  Spectrum s = make(SpectrumFamily::clustered, 400, 1000.0);
  for (std::size_t i = 0; i < s.n(); ++i) {
    double level = std::pow(1000.0, static_cast<double>(i / 100) / 3.0);
    CHECK(std::abs(std::log(s.eigenvalues[i] / level)) < 0.05);
  }
}

TEST_CASE("exact statistics") {
  SpectrumStats st = exact_stats(make_custom({1.0, 2.0, 4.0}));
  CHECK(st.am == doctest::Approx(7.0 / 3.0));
  CHECK(st.gm == doctest::Approx(2.0));
  CHECK(st.logdet == doctest::Approx(std::log(8.0)));
  CHECK(st.kappa == doctest::Approx(4.0));

  SpectrumStats c = exact_stats(make_custom(std::vector<double>(10, 3.0)));
  CHECK(c.kprime0 == 0.0);
  CHECK(c.logdet == doctest::Approx(10.0 * std::log(3.0)));

  CHECK(exact_stats(make_custom({1.0, 4.0})).kprime0 == doctest::Approx(0.5 * std::log(0.64)));
}

TEST_CASE("exact statistics are self-consistent on generated spectra") {
  for (SpectrumFamily f : kFamilies) {
    Spectrum s = make(f, 256, 100.0);
    SpectrumStats st = exact_stats(s);
    CHECK(st.gm <= st.am);
    CHECK(st.kprime0 <= 0.0);
    double n = static_cast<double>(s.n());
    CHECK(st.logdet == doctest::Approx(n * (std::log(st.am) + st.kprime0)).epsilon(1e-10));
  }
  // geometric mean two ways: product in log space vs closed form of the grid
  Spectrum g = generate(SpectrumFamily::geometric, 1024, 100.0);
  CHECK(exact_stats(g).gm == doctest::Approx(10.0).epsilon(1e-10));
}

TEST_CASE("trace powers") {
  TracePowers tp = trace_powers(make_custom({1.0, 2.0, 3.0}), 3);
  CHECK(tp.n == 3);
  CHECK(tp.p == std::vector<double>{6.0, 14.0, 36.0});
  TracePowers c = trace_powers(make_custom(std::vector<double>(5, 2.0)), 2);
  CHECK(c.p == std::vector<double>{10.0, 20.0});
  TracePowers t = trace_powers(make_custom({1.0, 1.0, 1.0, 10.0}), 2);
  CHECK(t.p == std::vector<double>{13.0, 103.0});
  CHECK_THROWS_AS(trace_powers(make_custom({1.0, 1e200}), 2), Error);
  CHECK_THROWS_AS(trace_powers(make_custom({1.0, 2.0}), 0), Error);
}

TEST_CASE("scaling the spectrum by c scales p_k by c^k") {
  Rng rng(derive_seed(11, 0));
  std::uniform_real_distribution<double> draw(0.1, 10.0);
  Spectrum s = generate(SpectrumFamily::uniform, 50, 20.0);
  for (int trial = 0; trial < 5; ++trial) {
    double c = draw(rng);
    std::vector<double> scaled = s.eigenvalues;
    for (double& v : scaled) v *= c;
    TracePowers a = trace_powers(s, 6), b = trace_powers(make_custom(scaled), 6);
    for (int k = 1; k <= 6; ++k) CHECK(b.at(k) == doctest::Approx(a.at(k) * std::pow(c, k)).epsilon(1e-12));
  }
}

TEST_CASE("spectrum JSON round trip") {
  Spectrum s = make(SpectrumFamily::lognormal, 32, 50.0, 9);
  Spectrum back = spectrum_from_json(spectrum_to_json(s));
  CHECK(back.family == s.family);
  CHECK(back.seed == s.seed);
  CHECK(back.eigenvalues == s.eigenvalues);

  Spectrum regen = spectrum_from_json(R"({"family":"geometric","n":3,"kappa":4,"seed":null})");
  CHECK(regen.eigenvalues[1] == doctest::Approx(2.0));
  CHECK_THROWS_AS(spectrum_from_json("{not json"), Error);
  CHECK_THROWS_AS(spectrum_from_json(R"({"family":"custom","n":3,"kappa":4,"seed":null,"eigenvalues":[1,2]})"),
                  Error);
}

TEST_CASE("family names parse both spellings") {
  CHECK(parse_family("two-point") == SpectrumFamily::two_point);
  CHECK(parse_family("two_point") == SpectrumFamily::two_point);
  CHECK(to_string(SpectrumFamily::clustered) == "clustered");
  CHECK_THROWS_AS(parse_family("banana"), Error);
}
