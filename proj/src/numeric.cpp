#include "tracelogdet/numeric.hpp"

#include <cmath>
#include <numeric>

#include "tracelogdet/error.hpp"

namespace tracelogdet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::overflow: return "overflow";
    case ErrorCode::cancellation: return "cancellation";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::solver_stalled: return "solver_stalled";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::undefined: return "undefined";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

void CompensatedSum::add(double v) noexcept {
  double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v))
    comp_ += (sum_ - t) + v;
  else
    comp_ += (v - t) + sum_;
  sum_ = t;
  abs_sum_ += std::abs(v);
}

double compensated_sum(std::span<const double> values) noexcept {
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value();
}

namespace {

__extension__ using i128 = __int128;
__extension__ using u128 = unsigned __int128;

std::int64_t narrow(i128 v) {
  if (v > INT64_MAX || v < INT64_MIN) fail(ErrorCode::overflow, "rational overflow");
  return static_cast<std::int64_t>(v);
}

Rational reduce(i128 num, i128 den) {
  if (den == 0) fail(ErrorCode::invalid_argument, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num, b = den;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  Rational r;
  r.num = narrow(num);
  r.den = narrow(den);
  return r;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  *this = reduce(n, d);
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational operator+(const Rational& a, const Rational& b) {
  return reduce(static_cast<i128>(a.num) * b.den + static_cast<i128>(b.num) * a.den,
                static_cast<i128>(a.den) * b.den);
}

Rational operator*(const Rational& a, const Rational& b) {
  return reduce(static_cast<i128>(a.num) * b.num, static_cast<i128>(a.den) * b.den);
}

std::uint64_t binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  u128 c = 1;
  for (unsigned i = 1; i <= k; ++i) {
    // c * (n - k + i) / i stays integral at every step
    c = c * (n - k + i) / i;
    if (c > UINT64_MAX) fail(ErrorCode::overflow, "binomial coefficient exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(c);
}

double harmonic(unsigned m) noexcept {
  double h = 0.0;
  for (unsigned j = m; j >= 1; --j) h += 1.0 / j;
  return h;
}

Rational harmonic_exact(unsigned m) {
  Rational h(0);
  for (unsigned j = 1; j <= m; ++j) h = h + Rational(1, j);
  return h;
}

}  // namespace tracelogdet
