#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mrp/errors.hpp"
#include "mrp/estimate.hpp"

using namespace mrp;

namespace {

CellData sojourns(std::vector<double> s, std::vector<bool> censored = {}) {
  CellData cd;
  cd.n_total = s.size();
  for (std::size_t i = 0; i < s.size(); ++i) {
    cd.observations.push_back({s[i], !censored.empty() && censored[i]});
  }
  return cd;
}

CumulativeEstimate from_cell_data(const CellData& cd, double t_max) {
  CumulativeEstimate ce;
  ce.lhat = nelson_aalen(cd).truncated(t_max);
  ce.variance = variance_estimate(cd).truncated(t_max);
  ce.visits = cd.visits();
  ce.horizon = 1.0;
  ce.t_max = t_max;
  return ce;
}

// Marks 10, 20, 30 visited uniformly, jump rate mark / 10 so state 20 has rate 2.
ProcessSpec three_state_model() {
  ProcessSpec spec = machine_model();
  spec.name = "three-state";
  spec.jump_rate = [](double x, double) { return x / 10.0; };
  spec.cumulative = [](double x, double t) { return x * t / 10.0; };
  spec.inverse_cumulative = nullptr;
  spec.kernel_sampler = [](double, Rng& rng) {
    const double u = rng.uniform_open();
    return u < 1.0 / 3.0 ? 10.0 : (u < 2.0 / 3.0 ? 20.0 : 30.0);
  };
  return spec;
}

const Cell kA{18.0, 22.0, true};

}  // namespace

TEST_CASE("Nelson-Aalen fixtures") {
  const CellData cd = sojourns({0.2, 0.5, 0.3});
  const StepFunction l = nelson_aalen(cd);
  CHECK(l(0.1) == 0.0);
  CHECK(l(0.2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(l(0.35) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(l(0.6) == doctest::Approx(11.0 / 6.0).epsilon(1e-15));
  CHECK(variance_estimate(cd)(0.6) == doctest::Approx(49.0 / 36.0).epsilon(1e-15));

  SUBCASE("censored sojourns stay at risk but never jump") {
    const StepFunction c = nelson_aalen(sojourns({0.2, 1.0}, {false, true}));
    REQUIRE(c.size() == 1);
    CHECK(c.increments()[0] == 0.5);
    CHECK(c(0.99) == 0.5);
  }
  SUBCASE("ties") {
    const StepFunction t = nelson_aalen(sojourns({0.2, 0.2, 0.4}));
    REQUIRE(t.size() == 2);
    CHECK(t.increments()[0] == doctest::Approx(2.0 / 3.0));
    CHECK(t.increments()[1] == 1.0);
  }
  SUBCASE("empty cell") {
    CHECK(nelson_aalen(sojourns({})).empty());
    CHECK(variance_estimate(sojourns({})).empty());
  }
}

TEST_CASE("confidence band") {
  const CumulativeEstimate ce = from_cell_data(sojourns({0.2, 0.5, 0.3}), 0.9);
  const double z = 1.959963984540054;
  const auto [lo, hi] = confidence_band(ce, 0.6, 0.95);
  CHECK(hi == doctest::Approx(11.0 / 6.0 + z * 7.0 / 6.0).epsilon(1e-12));
  CHECK(hi == doctest::Approx(4.119957981963396).epsilon(1e-12));
  CHECK(lo == 0.0);

  const auto [lo0, hi0] = confidence_band(ce, 0.1, 0.95);
  CHECK(lo0 == 0.0);
  CHECK(hi0 == 0.0);

  const auto [lo_small, hi_small] = confidence_band(ce, 0.35, 1e-9);
  CHECK(lo_small == doctest::Approx(5.0 / 6.0));
  CHECK(hi_small == doctest::Approx(5.0 / 6.0));

  CHECK_THROWS_AS(confidence_band(ce, 0.6, 1.0), DomainError);
  CHECK_THROWS_AS(confidence_band(ce, 0.6, 0.0), DomainError);
  CHECK_THROWS_AS(confidence_band(ce, 1.0, 0.95), DomainError);
}

TEST_CASE("estimate_cell") {
  const ProcessSpec m = machine_model();
  SUBCASE("machine model, typical visit fraction") {
    const Trajectory t = simulate_chain(m, 30.0, 400, Seed{4});
    const CumulativeEstimate ce = estimate_cell(t, kA, m, 0.9);
    CHECK(ce.nu_hat == doctest::Approx(static_cast<double>(ce.visits) / 400.0));
    CHECK(std::abs(ce.nu_hat - 0.735) < 0.15);
    CHECK(ce.threshold_passed);
    CHECK(ce.horizon == 1.0);
    for (double s : ce.lhat.times()) CHECK(s <= 0.9);
    CHECK(estimate_cell(t, kA, m, 0.8).t_max == 0.8);
    CHECK_THROWS_AS(estimate_cell(t, kA, m, 1.0), DomainError);
    CHECK_THROWS_AS(estimate_cell(t, kA, m, -0.1), DomainError);
  }
  SUBCASE("two visits out of 400 fail the threshold") {
    Trajectory t;
    t.marks.assign(401, 40.0);
    t.marks[10] = 20.0;
    t.marks[200] = 21.0;
    t.sojourns.assign(400, 0.3);
    t.censored.assign(400, false);
    const CumulativeEstimate ce = estimate_cell(t, kA, m, 0.9);
    CHECK(ce.visits == 2);
    CHECK(ce.nu_hat == doctest::Approx(0.005));
    CHECK_FALSE(ce.threshold_passed);
  }
  SUBCASE("empty trajectory") {
    const CumulativeEstimate ce = estimate_cell(Trajectory{{20.0}, {}, {}}, kA, m, 0.5);
    CHECK(ce.visits == 0);
    CHECK(ce.nu_hat == 0.0);
    CHECK_FALSE(ce.threshold_passed);
  }
}

TEST_CASE("global cumulative estimator") {
  const ProcessSpec m = machine_model();
  const Trajectory t = simulate_chain(m, 30.0, 2000, Seed{12});
  const Partition p = uniform_partition(m.state_space, 18.0, 22.0, 1.0);
  const GlobalCumulative gc = global_cumulative(t, p, m, 0.9);
  REQUIRE(gc.per_cell.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    const double x = p.cells[k].midpoint();
    if (gc.per_cell[k].threshold_passed) {
      CHECK(gc(x, 0.5) == gc.per_cell[k].lhat(0.5));
    } else {
      CHECK(gc(x, 0.5) == 0.0);
    }
  }
  CHECK(gc(40.0, 0.5) == 0.0);
  CHECK(gc(20.0, 0.0) == 0.0);
  CHECK_THROWS_AS(gc(20.0, 0.95), DomainError);
  CHECK_THROWS_AS(gc(20.0, -0.01), DomainError);

  ProcessSpec short_lived = m;
  short_lived.censorship = [](double x) { return x < 20.0 ? 0.5 : 1.0; };
  CHECK_THROWS_AS(global_cumulative(t, p, short_lived, 0.9), DomainError);
}

TEST_CASE("finite state chain: Nelson-Aalen recovers the cumulative rate") {
  const ProcessSpec spec = three_state_model();
  const Trajectory t = simulate_chain(spec, 20.0, 30000, Seed{77});
  const CellData cd = state_events(t, 20.0, 1.0);
  REQUIRE(cd.visits() > 8000);
  const StepFunction l = nelson_aalen(cd);
  const StepFunction v = variance_estimate(cd);
  for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double exact = 2.0 * s;
    CHECK(std::abs(l(s) - exact) < 4.0 * std::sqrt(v(s)));
  }
}

TEST_CASE("estimator properties on random cell data") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> time(0.001, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> s;
    std::vector<bool> c;
    const std::size_t m = 1 + gen() % 60;
    for (std::size_t i = 0; i < m; ++i) {
      const bool censored = gen() % 4 == 0;
      s.push_back(censored ? 1.0 : std::round(time(gen) * 40.0) / 40.0 + 0.001);
      c.push_back(censored);
    }
    const CellData cd = sojourns(s, c);
    const StepFunction l = nelson_aalen(cd);
    const StepFunction v = variance_estimate(cd);
    for (double j : l.increments()) {
      CHECK(j > 0.0);
      CHECK(j <= 1.0);
    }
    double prev = 0.0;
    for (int i = 0; i <= 100; ++i) {
      const double x = i / 100.0;
      CHECK(l(x) >= prev);
      CHECK(v(x) <= l(x) + 1e-15);
      prev = l(x);
    }
    // Nelson-Aalen never exceeds the harmonic sum of the sample size.
    double harmonic = 0.0;
    for (std::size_t k = 1; k <= m; ++k) harmonic += 1.0 / static_cast<double>(k);
    CHECK(l(1.0) <= harmonic + 1e-12);
  }
}

TEST_CASE("estimate CSV") {
  const CumulativeEstimate ce = from_cell_data(sojourns({0.2, 0.5, 0.3}), 0.9);
  std::ostringstream out;
  write_estimate_csv(out, ce, 4);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "time,estimate,variance,ci_low,ci_high");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
  CHECK_THROWS_AS(write_estimate_csv(out, ce, 1), DomainError);
}
