#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "combwalk/analysis.hpp"
#include "combwalk/engine.hpp"
#include "combwalk/rng.hpp"

using namespace combwalk;

namespace {

// Depth-first enumeration of every path with its exact weight, as a fraction of 4^n.
void enumerate(const BSpec& b, int left, Point p, uint64_t weight, std::map<Point, uint64_t>& out) {
  if (left == 0) {
    out[p] += weight;
    return;
  }
  if (b.contains(p.y)) {
    for (Point d : {Point{1, 0}, Point{-1, 0}, Point{0, 1}, Point{0, -1}}) {
      enumerate(b, left - 1, {p.x + d.x, p.y + d.y}, weight, out);
    }
  } else {
    enumerate(b, left - 1, {p.x, p.y + 1}, 2 * weight, out);
    enumerate(b, left - 1, {p.x, p.y - 1}, 2 * weight, out);
  }
}

std::vector<BSpec> small_zoo() {
  return {BSpec::finite({0}), BSpec::finite({1, -2}), BSpec::periodic(2, 2), BSpec::periodic(2, 3),
          BSpec::halfplane(), BSpec::all_levels(), BSpec::power_gap(2, 2), BSpec::finite({})};
}

}  // namespace

TEST_CASE("exact_distribution: hand-computed cases") {
  const ExactDist one = exact_distribution(BSpec::finite({0}), 1);
  CHECK(one.denominator == 4);
  for (Point p : {Point{1, 0}, Point{-1, 0}, Point{0, 1}, Point{0, -1}}) CHECK(one.probability(p) == 0.25);

  // From (0,0): back to the origin via x (2/16) or via y off B (2 * 1/4 * 1/2 = 4/16).
  const ExactDist two = exact_distribution(BSpec::finite({0}), 2);
  CHECK(two.probability({0, 0}) == 0.375);
  CHECK(two.probability({0, 2}) == 0.125);
  CHECK(two.probability({2, 0}) == 0.0625);
  CHECK(two.probability({1, 1}) == 0.0625);

  const ExactDist all = exact_distribution(BSpec::all_levels(), 2);
  CHECK(all.probability({0, 0}) == 0.25);
  CHECK(all.probability({1, 1}) == 0.125);

  const ExactDist zero = exact_distribution(BSpec::halfplane(), 0);
  CHECK(zero.probability({0, 0}) == 1.0);
}

TEST_CASE("exact_distribution matches path enumeration for n <= 6") {
  for (const BSpec& b : small_zoo()) {
    CAPTURE(b.describe());
    for (int n = 0; n <= 6; ++n) {
      std::map<Point, uint64_t> want;
      enumerate(b, n, {0, 0}, 1, want);
      const ExactDist d = exact_distribution(b, n);
      REQUIRE(d.numerators == want);
    }
  }
}

TEST_CASE("exact_distribution: mass, symmetry and support") {
  for (const BSpec& b : small_zoo()) {
    const ExactDist d = exact_distribution(b, 11);
    uint64_t mass = 0;
    for (const auto& [p, m] : d.numerators) {
      mass += m;
      CHECK(std::abs(p.x) + std::abs(p.y) <= 11);
      CHECK((p.x + p.y + 11) % 2 == 0);
      // x -> -x symmetry holds for every B
      CHECK(d.numerators.at({-p.x, p.y}) == m);
    }
    CHECK(mass == d.denominator);
  }
  const ExactDist s = exact_distribution(BSpec::periodic(2, 2), 9);
  for (const auto& [p, m] : s.numerators) CHECK(s.numerators.at({p.x, -p.y}) == m);
  CHECK_THROWS_AS(exact_distribution(BSpec::halfplane(), kExactMaxSteps + 1), std::invalid_argument);
  CHECK_THROWS_AS(exact_distribution(BSpec::halfplane(), -1), std::invalid_argument);
  CHECK_NOTHROW(exact_distribution(BSpec::halfplane(), kExactMaxSteps));
}

TEST_CASE("tv_distance") {
  const ExactDist d = exact_distribution(BSpec::finite({0}), 2);
  EmpiricalLaw same;
  same.n_steps = 2;
  for (const auto& [p, m] : d.numerators) {
    for (uint64_t k = 0; k < m; ++k) same.add(p);
  }
  CHECK(tv_distance(d, same) == 0.0);

  EmpiricalLaw far;
  far.n_steps = 2;
  far.add({7, 7});
  CHECK(tv_distance(d, far) == 1.0);

  EmpiricalLaw half;
  half.n_steps = 2;
  half.add({0, 0});
  // |3/8 - 1| over the hit point plus 5/8 over the rest, halved
  CHECK(tv_distance(d, half) == doctest::Approx(0.625));

  EmpiricalLaw wrong;
  wrong.n_steps = 3;
  wrong.add({0, 1});
  CHECK_THROWS_AS(tv_distance(d, wrong), std::invalid_argument);
  EmpiricalLaw empty;
  empty.n_steps = 2;
  CHECK_THROWS_AS(tv_distance(d, empty), std::invalid_argument);
}

TEST_CASE("ks_against: small exact case") {
  // 100 points at (i+0.5)/100 against U(0,1): the ECDF step straddles F by 1/200.
  std::vector<double> s;
  for (int i = 0; i < 100; ++i) s.push_back((i + 0.5) / 100.0);
  const KSResult r = ks_against(s, [](double x) { return std::clamp(x, 0.0, 1.0); }, "uniform");
  CHECK(r.statistic == doctest::Approx(0.005));
  CHECK(r.n_samples == 100);
  CHECK(r.reference == "uniform");

  std::vector<double> shifted;
  for (int i = 0; i < 100; ++i) shifted.push_back(i / 100.0);
  CHECK(ks_against(shifted, [](double x) { return x; }).statistic == doctest::Approx(0.01));
}

TEST_CASE("ks_against: inverse-cdf samples and degenerate samples") {
  RngStream rng(12);
  std::vector<double> e;
  for (int i = 0; i < 100'000; ++i) e.push_back(-std::log1p(-rng.uniform()));
  const auto expo = [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-x); };
  CHECK(ks_against(e, expo).statistic < 0.01);

  const std::vector<double> constant(500, std::log(2.0));
  // All mass at the median of Exp(1): the jump is 1 against F = 1/2.
  CHECK(ks_against(constant, expo).statistic == doctest::Approx(0.5));

  CHECK_THROWS_AS(ks_against(std::vector<double>(99, 1.0), expo), std::invalid_argument);
  CHECK_THROWS_AS(ks_against({}, expo), std::invalid_argument);
  std::vector<double> grid;
  for (int i = 0; i < 200; ++i) grid.push_back(i);
  CHECK_THROWS_AS(ks_against(grid, [](double x) { return std::cos(x) * 0.5 + 0.5; }), std::domain_error);
  CHECK_THROWS_AS(ks_against(grid, [](double x) { return x; }), std::domain_error);
}

TEST_CASE("ks_two_sample") {
  std::vector<double> a, b;
  for (int i = 0; i < 10; ++i) a.push_back(i);
  for (int i = 0; i < 10; ++i) b.push_back(i + 100);
  CHECK(ks_two_sample(a, b).statistic == 1.0);
  CHECK(ks_two_sample(a, a).statistic == 0.0);
  std::vector<double> c = {0, 1, 2, 3, 4, 100, 101, 102, 103, 104};
  CHECK(ks_two_sample(a, c).statistic == doctest::Approx(0.5));
  CHECK_THROWS_AS(ks_two_sample({}, a), std::invalid_argument);

  RngStream r1(1), r2(2);
  std::vector<double> x, y;
  for (int i = 0; i < 20'000; ++i) x.push_back(r1.normal());
  for (int i = 0; i < 30'000; ++i) y.push_back(r2.normal());
  CHECK(ks_two_sample(x, y).statistic < 0.02);
}

TEST_CASE("fit_exponent") {
  std::map<int64_t, double> v;
  for (int k = 10; k <= 18; ++k) v[int64_t{1} << k] = 3.0 * std::pow(std::ldexp(1.0, k), 0.375);
  const SlopeFit f = fit_exponent(v);
  CHECK(f.slope == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
  CHECK(f.std_error < 1e-10);

  // scaling every value leaves the slope alone
  std::map<int64_t, double> scaled;
  RngStream rng(4);
  for (auto& [n, x] : v) scaled[n] = 1e-3 * x * std::exp(0.1 * rng.normal());
  std::map<int64_t, double> noisy;
  for (auto& [n, x] : scaled) noisy[n] = x * 1e3;
  CHECK(fit_exponent(scaled).slope == doctest::Approx(fit_exponent(noisy).slope).epsilon(1e-12));

  // residuals are orthogonal to the regressor and to the constant
  const SlopeFit g = fit_exponent(noisy);
  double r_sum = 0.0, rx_sum = 0.0;
  for (const auto& [x, y] : g.points) {
    const double r = y - g.intercept - g.slope * x;
    r_sum += r;
    rx_sum += r * x;
  }
  CHECK(std::abs(r_sum) < 1e-9);
  CHECK(std::abs(rx_sum) < 1e-9);

  CHECK_THROWS_AS(fit_exponent({{10, 1.0}, {20, 2.0}, {40, 3.0}, {80, 4.0}}), std::invalid_argument);
  CHECK_NOTHROW(fit_exponent({{10, 1.0}, {100, 2.0}, {400, 3.0}, {1000, 4.0}}));
  CHECK_THROWS_AS(fit_exponent({{10, 1.0}, {100, 0.0}, {400, 3.0}, {1000, 4.0}}), std::invalid_argument);
}

TEST_CASE("chi_square and median") {
  const std::vector<int64_t> obs = {30, 20, 50};
  const std::vector<double> p = {0.25, 0.25, 0.5};
  const ChiSquareResult r = chi_square(obs, p);
  CHECK(r.statistic == doctest::Approx(25.0 / 25.0 + 25.0 / 25.0 + 0.0));
  CHECK(r.dof == 2);
  CHECK_THROWS_AS(chi_square(obs, std::vector<double>{0.5, 0.5}), std::invalid_argument);

  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK_THROWS_AS(median({}), std::invalid_argument);
}

TEST_CASE("envelope_diagnostics: targets, ratios and regime checks") {
  const EnvelopeReport hp = envelope_diagnostics({}, Regime::beta1, BSpec::halfplane());
  CHECK(hp.targets.at("c1_limsup") == doctest::Approx(1.0));
  CHECK(hp.targets.at("c2_limsup") == doctest::Approx(1.0));
  CHECK(hp.targets.at("c2_liminf") == doctest::Approx(-std::sqrt(2.0)));
  const EnvelopeReport fin = envelope_diagnostics({}, Regime::beta0, BSpec::finite({0}));
  CHECK(fin.targets.at("c1_limsup") == doctest::Approx(std::pow(2.0, 1.25) / std::pow(3.0, 0.75)));
  const EnvelopeReport mid = envelope_diagnostics({}, Regime::beta_mid, BSpec::power_gap(2, 2));
  CHECK(mid.targets.at("c1_exponent") == doctest::Approx(0.375));

  CHECK_THROWS_AS(envelope_diagnostics({}, Regime::beta0, BSpec::halfplane()), std::invalid_argument);
  CHECK_THROWS_AS(envelope_diagnostics({}, Regime::beta1, BSpec::power_gap(2, 2)), std::invalid_argument);
  CHECK_THROWS_AS(envelope_diagnostics({}, Regime::beta_mid, BSpec::finite({0})), std::invalid_argument);

  Checkpoint c;
  c.step = 10'000;
  c.x = 300;
  c.y = -150;
  c.m2 = 400;
  Checkpoint early;
  early.step = 8;
  const std::vector<Checkpoint> cps = {early, c};
  const EnvelopeReport rep = envelope_diagnostics(cps, Regime::beta1, BSpec::halfplane());
  REQUIRE(rep.rows.size() == 1);
  const double ll = std::log(std::log(1e4));
  CHECK(rep.rows[0].c1_ratio == doctest::Approx(300.0 / std::sqrt(1e4 * ll)));
  CHECK(rep.rows[0].c2_ratio == doctest::Approx(150.0 / std::sqrt(1e4 * ll)));
  CHECK(rep.rows[0].m2_lil == doctest::Approx(400.0 / std::sqrt(2e4 * ll)));
  CHECK(rep.rows[0].m2_chung == doctest::Approx(std::sqrt(8.0 * ll / (std::numbers::pi * std::numbers::pi * 1e4)) * 400));
  CHECK(rep.sup.c1_ratio == rep.rows[0].c1_ratio);

  const EnvelopeReport f2 = envelope_diagnostics(cps, Regime::beta0, BSpec::finite({0, 3}));
  CHECK(f2.rows[0].c1_ratio == doctest::Approx(300.0 / (std::sqrt(2.0) * 10.0 * std::pow(ll, 0.75))));
}

TEST_CASE("envelope ratios on a real trace are finite") {
  const WalkTrace t = simulate_markov(BSpec::finite({0}), 100'000, 9);
  const EnvelopeReport rep = envelope_diagnostics(t.checkpoints, Regime::beta0, BSpec::finite({0}));
  REQUIRE_FALSE(rep.rows.empty());
  for (const EnvelopeRow& r : rep.rows) {
    CHECK(std::isfinite(r.c1_ratio));
    CHECK(r.c1_ratio >= 0.0);
    CHECK(r.m2_chung >= 0.0);
  }
}

TEST_CASE("facts_diagnostics") {
  const WalkTrace t = simulate_markov(BSpec::halfplane(), 200'000, 21);
  const FactsReport f = facts_diagnostics(t, BSpec::halfplane());
  REQUIRE(f.max_local_time_lil.has_value());
  REQUIRE(f.m1_upper.has_value());
  CHECK(*f.max_local_time_lil > 0.0);
  CHECK(*f.max_local_time_lil < 3.0);
  CHECK(*f.m2_upper > 0.0);
  CHECK(*f.m2_upper < 3.0);
  CHECK(*f.m2_lower > 0.0);
  CHECK(*f.m1_upper < 3.0);
  REQUIRE(f.h_over_core_occupation.has_value());
  CHECK(*f.h_over_core_occupation > 0.0);

  const WalkTrace tiny = simulate_markov(BSpec::halfplane(), 10, 1);
  const FactsReport g = facts_diagnostics(tiny, BSpec::halfplane());
  CHECK_FALSE(g.max_local_time_lil.has_value());
  CHECK_FALSE(g.m1_upper.has_value());
}

TEST_CASE("iterated_reference_sample") {
  const auto a = iterated_reference_sample(20000, 10'000, 2.0, 33, 1);
  const auto b = iterated_reference_sample(20000, 10'000, 2.0, 33, 3);
  CHECK(a == b);
  double m = 0.0, v = 0.0;
  for (double x : a) m += x;
  m /= static_cast<double>(a.size());
  for (double x : a) v += (x - m) * (x - m);
  v /= static_cast<double>(a.size());
  // E[eta(0,1)] = sqrt(2/pi), so Var = size * sqrt(2/pi)
  CHECK(std::abs(m) < 0.04);
  CHECK(v == doctest::Approx(2.0 * std::sqrt(2.0 / std::numbers::pi)).epsilon(0.05));
  CHECK_THROWS_AS(iterated_reference_sample(0, 10, 1.0, 1), std::invalid_argument);
}
