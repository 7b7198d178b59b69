#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tracelogdet {

// Neumaier's variant of compensated summation. Also tracks the sum of
// magnitudes so callers can estimate how much cancellation occurred.
class CompensatedSum {
 public:
  void add(double v) noexcept;
  double value() const noexcept { return sum_ + comp_; }
  double magnitude() const noexcept { return abs_sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
  double abs_sum_ = 0.0;
};

double compensated_sum(std::span<const double> values) noexcept;

// Reduced fraction with a positive denominator.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);

  double to_double() const noexcept {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  std::string str() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a) { return {-a.num, a.den}; }
  friend Rational operator*(const Rational& a, const Rational& b);
};

// Exact C(n, k); throws ErrorCode::overflow beyond 64-bit range.
std::uint64_t binomial(unsigned n, unsigned k);

double harmonic(unsigned m) noexcept;
// Exact H_m; overflows (ErrorCode::overflow) for m > 40 or so.
Rational harmonic_exact(unsigned m);

}  // namespace tracelogdet
