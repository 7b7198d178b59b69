#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tracelogdet/spectra.hpp"

namespace tracelogdet {

using Cell = std::variant<long long, double, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

// Floats with 6 significant digits.
void write_csv(std::ostream& out, const Table& t);
std::string format_cell(const Cell& c);

struct ReproduceOptions {
  std::uint64_t seed = 0;
  int trials = 1000;
  unsigned threads = 0;
};

// Noise theory next to Monte Carlo for every (eta, m) pair; the bias b_m is the
// exact-trace k0m error on `s`.
Table noise_sweep(const Spectrum& s, std::span<const int> orders, std::span<const double> etas,
                  int trials, std::uint64_t seed, unsigned threads = 0);

const std::vector<std::string>& reproduce_targets();
Table reproduce(std::string_view target, const ReproduceOptions& opt = {});

}  // namespace tracelogdet
