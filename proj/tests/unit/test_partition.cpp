#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "mrp/errors.hpp"
#include "mrp/partition.hpp"

using namespace mrp;

namespace {

const StateSpace kE{0.0, 60.0};

void check_cell(const Cell& c, double low, double high, bool closed) {
  CHECK(c.low == doctest::Approx(low));
  CHECK(c.high == doctest::Approx(high));
  CHECK(c.closed_right == closed);
}

}  // namespace

TEST_CASE("uniform partitions") {
  const Partition unit = uniform_partition(kE, 18.0, 22.0, 1.0);
  REQUIRE(unit.cells.size() == 4);
  check_cell(unit.cells[0], 18, 19, false);
  check_cell(unit.cells[1], 19, 20, false);
  check_cell(unit.cells[2], 20, 21, false);
  check_cell(unit.cells[3], 21, 22, true);

  const Partition single = uniform_partition(kE, 18.0, 22.0, 4.0);
  REQUIRE(single.cells.size() == 1);
  check_cell(single.cells[0], 18, 22, true);

  const Partition uneven = uniform_partition(kE, 18.0, 22.0, 1.5);
  REQUIRE(uneven.cells.size() == 3);
  check_cell(uneven.cells[0], 18, 19.5, false);
  check_cell(uneven.cells[1], 19.5, 21, false);
  check_cell(uneven.cells[2], 21, 22, true);

  const Partition wide = uniform_partition(kE, 18.0, 22.0, 10.0);
  REQUIRE(wide.cells.size() == 1);
  check_cell(wide.cells[0], 18, 22, true);
}

TEST_CASE("partition preconditions") {
  CHECK_THROWS_AS(uniform_partition(kE, 0.0, 10.0, 1.0), DomainError);
  CHECK_THROWS_AS(uniform_partition(kE, 50.0, 60.0, 1.0), DomainError);
  CHECK_THROWS_AS(uniform_partition(kE, 10.0, 10.0, 1.0), DomainError);
  CHECK_THROWS_AS(uniform_partition(kE, 10.0, 20.0, 0.0), DomainError);
  CHECK_THROWS_AS(ball_partition(kE, 1.0, 2.0), DomainError);

  const Partition ball = ball_partition(kE, 20.0, 2.0);
  REQUIRE(ball.cells.size() == 1);
  check_cell(ball.cells[0], 18, 22, true);
}

TEST_CASE("locate") {
  const Partition p = uniform_partition(kE, 18.0, 22.0, 1.0);
  CHECK(locate(p, 20.0) == 2u);
  CHECK(locate(p, 22.0) == 3u);
  CHECK(locate(p, 18.0) == 0u);
  CHECK(locate(p, 19.999) == 1u);
  CHECK_FALSE(locate(p, 25.0).has_value());
  CHECK_FALSE(locate(p, 17.999).has_value());
}

TEST_CASE("every point of the region lies in exactly one cell") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_real_distribution<double> edge(1.0, 59.0);
    double a = edge(gen);
    double b = edge(gen);
    if (a > b) std::swap(a, b);
    if (b - a < 1e-3) continue;
    const double width = (b - a) * std::uniform_real_distribution<double>(0.05, 1.2)(gen);
    const Partition p = uniform_partition(kE, a, b, width);
    for (const Cell& c : p.cells) CHECK(c.diameter() <= width * (1 + 1e-12));
    std::uniform_real_distribution<double> point(a, b);
    for (int i = 0; i < 200; ++i) {
      const double x = i == 0 ? b : (i == 1 ? a : point(gen));
      int owners = 0;
      for (const Cell& c : p.cells) owners += c.contains(x);
      CHECK(owners == 1);
      const auto k = locate(p, x);
      REQUIRE(k.has_value());
      CHECK(p.cells[*k].contains(x));
    }
  }
}

TEST_CASE("cell horizon") {
  const ProcessSpec m = machine_model();
  CHECK(cell_horizon(m, Cell{18.0, 22.0, true}) == 1.0);
  CHECK(cell_horizon(m, Cell{40.0, 41.0, false}) == 1.0);

  ProcessSpec linear = machine_model();
  linear.censorship = [](double x) { return x; };
  CHECK(cell_horizon(linear, Cell{2.0, 3.0, false}) == 2.0);

  ProcessSpec decreasing = machine_model();
  decreasing.censorship = [](double x) { return 10.0 - x; };
  CHECK(cell_horizon(decreasing, Cell{2.0, 3.0, false}) == 7.0);

  ProcessSpec forever = machine_model();
  forever.censorship = [](double) { return std::numeric_limits<double>::infinity(); };
  CHECK(std::isinf(cell_horizon(forever, Cell{2.0, 3.0, false})));

  ProcessSpec broken = machine_model();
  broken.censorship = [](double x) { return x - 2.5; };
  CHECK_THROWS_AS(cell_horizon(broken, Cell{2.0, 3.0, false}), DomainError);
  CHECK_THROWS_AS(cell_horizon(m, Cell{-1.0, 3.0, false}), DomainError);
}

TEST_CASE("partition JSON") {
  const auto j = partition_to_json(uniform_partition(kE, 18.0, 22.0, 2.0));
  CHECK(j.dump() == "[[18.0,20.0],[20.0,22.0]]");
}
