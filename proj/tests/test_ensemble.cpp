#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "combwalk/ensemble.hpp"

using namespace combwalk;

namespace {

const std::vector<Observable> kAll = {Observable::final_position, Observable::v_fraction, Observable::d2,
                                      Observable::m1, Observable::m2, Observable::rescaled_c1,
                                      Observable::rescaled_c2, Observable::envelope_ratios};

}  // namespace

TEST_CASE("singleton ensemble equals the single trace") {
  const BSpec b = BSpec::power_gap(2, 2);
  for (EngineKind e : {EngineKind::markov, EngineKind::decomposed}) {
    const EnsembleSummary s = run_ensemble(b, 4096, 1, 17, e, kAll, 1);
    const WalkTrace t = simulate(e, LevelMask(b, mask_radius_for(4096)), 4096, split_seed(17, 0));
    REQUIRE(s.final_positions.size() == 1);
    CHECK(s.final_positions[0] == t.position);
    CHECK(s.samples.at("v_fraction")[0] == static_cast<double>(t.v_count) / 4096.0);
    CHECK(s.samples.at("d2")[0] == static_cast<double>(t.d2));
    CHECK(s.samples.at("m1")[0] == static_cast<double>(t.m1));
    CHECK(s.samples.at("m2")[0] == static_cast<double>(t.m2));
    // beta = 1/2 gives the N^{3/8} scale
    CHECK(s.samples.at("rescaled_c1")[0] == doctest::Approx(static_cast<double>(t.position.x) / std::pow(4096.0, 0.375)));
    CHECK(s.samples.at("rescaled_c2")[0] == doctest::Approx(static_cast<double>(t.position.y) / 64.0));
  }
}

TEST_CASE("same master seed gives identical summaries and bytes") {
  const BSpec b = BSpec::halfplane();
  const EnsembleSummary a = run_ensemble(b, 2000, 300, 5, EngineKind::markov, kAll, 1);
  const EnsembleSummary c = run_ensemble(b, 2000, 300, 5, EngineKind::markov, kAll, 1);
  CHECK(a == c);
  CHECK(a.to_json().dump() == c.to_json().dump());
  CHECK(a.to_csv() == c.to_csv());
  const EnsembleSummary other = run_ensemble(b, 2000, 300, 6, EngineKind::markov, kAll, 1);
  CHECK_FALSE(a == other);
}

TEST_CASE("results do not depend on the thread count") {
  const BSpec b = BSpec::periodic(2, 3);
  const EnsembleSummary one = run_ensemble(b, 3000, 101, 8, EngineKind::decomposed, kAll, 1);
  for (int threads : {2, 3, 8}) {
    const EnsembleSummary many = run_ensemble(b, 3000, 101, 8, EngineKind::decomposed, kAll, threads);
    CHECK(one.to_csv() == many.to_csv());
  }
}

TEST_CASE("replica i does not depend on n_replicas") {
  const BSpec b = BSpec::finite({0});
  const EnsembleSummary small = run_ensemble(b, 1000, 10, 3, EngineKind::markov, {Observable::final_position}, 2);
  const EnsembleSummary big = run_ensemble(b, 1000, 25, 3, EngineKind::markov, {Observable::final_position}, 3);
  for (size_t i = 0; i < 10; ++i) CHECK(small.final_positions[i] == big.final_positions[i]);
}

TEST_CASE("argument errors") {
  const BSpec b = BSpec::finite({0});
  CHECK_THROWS_AS(run_ensemble(b, 10, 5, 1, EngineKind::markov, {}), std::invalid_argument);
  CHECK_THROWS_AS(run_ensemble(b, 10, 0, 1, EngineKind::markov, kAll), std::invalid_argument);
  CHECK_THROWS_AS(run_ensemble(b, 0, 5, 1, EngineKind::markov, kAll), std::invalid_argument);
}

TEST_CASE("observable names round-trip") {
  for (Observable o : kAll) CHECK(observable_from_string(to_string(o)) == o);
  CHECK_THROWS_AS(observable_from_string("velocity"), std::invalid_argument);
}

TEST_CASE("only requested series are produced") {
  const EnsembleSummary s = run_ensemble(BSpec::halfplane(), 100, 4, 1, EngineKind::markov, {Observable::m2}, 1);
  CHECK(s.final_positions.empty());
  CHECK(s.samples.size() == 1);
  CHECK(s.samples.count("m2") == 1);
  CHECK(s.to_csv().rfind("replica,m2\n0,", 0) == 0);
}

TEST_CASE("envelope ratios are finite and nonnegative where they should be") {
  const EnsembleSummary s = run_ensemble(BSpec::halfplane(), 10'000, 50, 2, EngineKind::markov, {Observable::envelope_ratios}, 1);
  for (double v : s.samples.at("m2_chung")) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
  }
  for (double v : s.samples.at("c1_lil")) CHECK(std::isfinite(v));
}

TEST_CASE("map_indices keeps index order and rethrows") {
  const auto sq = map_indices(1000, 4, [](int64_t i) { return i * i; });
  for (int64_t i = 0; i < 1000; ++i) REQUIRE(sq[static_cast<size_t>(i)] == i * i);
  CHECK_THROWS_AS(map_indices(100, 3,
                              [](int64_t i) {
                                if (i == 57) throw std::runtime_error("boom");
                                return i;
                              }),
                  std::runtime_error);
  CHECK(resolve_threads(5) == 5);
  CHECK(resolve_threads(0) >= 1);
}
