#include <cmath>
#include <vector>

#include "doctest.h"

#include "tracelogdet/error.hpp"
#include "tracelogdet/numeric.hpp"
#include "tracelogdet/parallel.hpp"
#include "tracelogdet/random.hpp"

using namespace tracelogdet;

TEST_CASE("compensated sum recovers small terms lost by naive summation") {
  std::vector<double> v = {1.0, 1e100, 1.0, -1e100};
  CHECK(compensated_sum(v) == 2.0);
  CompensatedSum s;
  for (int i = 0; i < 10; ++i) s.add(0.1);
  CHECK(s.value() == doctest::Approx(1.0).epsilon(1e-16));
  CHECK(s.magnitude() == doctest::Approx(1.0));
}

TEST_CASE("rationals stay reduced with positive denominators") {
  Rational a(6, -4);
  CHECK(a.num == -3);
  CHECK(a.den == 2);
  CHECK(a + Rational(1, 2) == Rational(-1));
  CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
  CHECK(Rational(-1, 12).str() == "-1/12");
  CHECK(Rational(5).str() == "5");
  CHECK_THROWS_AS(Rational(1, 0), Error);
}

TEST_CASE("binomial coefficients") {
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(10, 0) == 1);
  CHECK(binomial(3, 5) == 0);
  CHECK(binomial(62, 31) == 465428353255261088ULL);
  CHECK_THROWS_AS(binomial(100, 50), Error);
}

TEST_CASE("harmonic numbers") {
  CHECK(harmonic(1) == 1.0);
  CHECK(harmonic(4) == doctest::Approx(25.0 / 12.0));
  CHECK(harmonic_exact(4) == Rational(25, 12));
  CHECK(harmonic_exact(8) == Rational(761, 280));
}

TEST_CASE("derived seeds separate streams and counters") {
  CHECK(derive_seed(1, 0, 0) == derive_seed(1, 0, 0));
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 1, 0));
  CHECK(derive_seed(1, 0, 0) != derive_seed(2, 0, 0));
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 4);
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(
                      10, [](std::size_t i) {
                        if (i == 7) fail(ErrorCode::degenerate, "boom");
                      },
                      3),
                  Error);
}
