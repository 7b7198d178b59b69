#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "tracelogdet/error.hpp"
#include "tracelogdet/reproduce.hpp"

using namespace tracelogdet;

namespace {

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

bool same_cell(const std::string& a, const std::string& b) {
  if (a == b) return true;
  char* ea = nullptr;
  char* eb = nullptr;
  double x = std::strtod(a.c_str(), &ea), y = std::strtod(b.c_str(), &eb);
  if (*ea != '\0' || *eb != '\0' || a.empty() || b.empty()) return false;
  // six significant digits leave one unit of the last place to rounding
  return std::abs(x - y) <= 2e-6 * std::max(std::abs(x), std::abs(y)) + 1e-12;
}

}  // namespace

TEST_CASE("cell formatting") {
  CHECK(format_cell(Cell{42LL}) == "42");
  CHECK(format_cell(Cell{std::string("two_point")}) == "two_point");
  CHECK(format_cell(Cell{0.1234567891}) == "0.123457");
  CHECK(format_cell(Cell{std::nan("")}) == "nan");
  CHECK(format_cell(Cell{-HUGE_VAL}) == "-inf");
  Table t{{"a", "b"}, {{Cell{1LL}, Cell{2.5}}}};
  std::stringstream ss;
  write_csv(ss, t);
  CHECK(ss.str() == "a,b\n1,2.5\n");
}

TEST_CASE("unknown targets are rejected") {
  CHECK_THROWS_AS(reproduce("no-such-table"), Error);
}

TEST_CASE("reproduced tables match the golden files") {
  for (const std::string& name : reproduce_targets()) {
    CAPTURE(name);
    std::ifstream golden(std::string(TLD_GOLDEN_DIR) + "/" + name + ".csv");
    REQUIRE(golden.good());
    std::stringstream fresh;
    write_csv(fresh, reproduce(name));
    auto want = parse_csv(golden);
    auto got = parse_csv(fresh);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CAPTURE(i);
      REQUIRE(got[i].size() == want[i].size());
      for (std::size_t j = 0; j < got[i].size(); ++j) {
        CAPTURE(got[i][j]);
        CAPTURE(want[i][j]);
        CHECK(same_cell(got[i][j], want[i][j]));
      }
    }
  }
}
