#include "combwalk/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace combwalk {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

namespace {

const std::pair<Observable, const char*> kObservableNames[] = {
    {Observable::final_position, "final_position"}, {Observable::v_fraction, "v_fraction"},
    {Observable::d2, "d2"},
    {Observable::m1, "m1"},
    {Observable::m2, "m2"},
    {Observable::rescaled_c1, "rescaled_c1"},
    {Observable::rescaled_c2, "rescaled_c2"},
    {Observable::envelope_ratios, "envelope_ratios"},
};

}  // namespace

std::string to_string(Observable o) {
  for (const auto& [k, name] : kObservableNames) {
    if (k == o) return name;
  }
  return "?";
}

Observable observable_from_string(const std::string& s) {
  for (const auto& [k, name] : kObservableNames) {
    if (s == name) return k;
  }
  throw std::invalid_argument("unknown observable: " + s);
}

EnsembleSummary run_ensemble(const BSpec& b, int64_t n_steps, int64_t n_replicas, uint64_t master_seed,
                             EngineKind engine, const std::vector<Observable>& observables, int threads) {
  if (n_replicas < 1) throw std::invalid_argument("run_ensemble: n_replicas must be >= 1");
  if (n_steps < 1) throw std::invalid_argument("run_ensemble: n_steps must be >= 1");
  if (observables.empty()) throw std::invalid_argument("run_ensemble: empty observable set");

  auto has = [&](Observable o) { return std::find(observables.begin(), observables.end(), o) != observables.end(); };
  const ModelParams mp = derive_params(b);
  const LevelMask mask(b, mask_radius_for(n_steps));
  const auto n = static_cast<double>(n_steps);
  const double c1_scale = std::pow(n, (1.0 + mp.beta) / 4.0);
  const double lln = std::log(std::log(std::max(n, 16.0)));

  struct Row {
    Point pos;
    int64_t v = 0, d2 = 0, m1 = 0, m2 = 0;
  };
  const auto rows = map_indices(n_replicas, threads, [&](int64_t i) {
    const WalkTrace t = simulate(engine, mask, n_steps, split_seed(master_seed, static_cast<uint64_t>(i)));
    return Row{t.position, t.v_count, t.d2, t.m1, t.m2};
  });

  EnsembleSummary s;
  s.bspec = b.describe();
  s.n_steps = n_steps;
  s.n_replicas = n_replicas;
  s.master_seed = master_seed;
  s.engine = engine;
  s.observables = observables;
  auto series = [&](const std::string& name, auto f) {
    auto& v = s.samples[name];
    v.reserve(rows.size());
    for (const Row& r : rows) v.push_back(f(r));
  };
  if (has(Observable::final_position)) {
    for (const Row& r : rows) s.final_positions.push_back(r.pos);
  }
  if (has(Observable::v_fraction)) series("v_fraction", [&](const Row& r) { return static_cast<double>(r.v) / n; });
  if (has(Observable::d2)) series("d2", [](const Row& r) { return static_cast<double>(r.d2); });
  if (has(Observable::m1)) series("m1", [](const Row& r) { return static_cast<double>(r.m1); });
  if (has(Observable::m2)) series("m2", [](const Row& r) { return static_cast<double>(r.m2); });
  if (has(Observable::rescaled_c1)) {
    series("rescaled_c1", [&](const Row& r) { return static_cast<double>(r.pos.x) / c1_scale; });
  }
  if (has(Observable::rescaled_c2)) {
    series("rescaled_c2", [&](const Row& r) { return static_cast<double>(r.pos.y) / std::sqrt(n); });
  }
  if (has(Observable::envelope_ratios)) {
    const double lil = std::sqrt(n * lln);
    const double chung = std::sqrt(8.0 * lln / (std::numbers::pi * std::numbers::pi * n));
    series("c1_lil", [&](const Row& r) { return static_cast<double>(r.pos.x) / lil; });
    series("c2_lil", [&](const Row& r) { return static_cast<double>(r.pos.y) / lil; });
    series("m2_chung", [&](const Row& r) { return chung * static_cast<double>(r.m2); });
  }
  return s;
}

nlohmann::json EnsembleSummary::to_json() const {
  nlohmann::json j;
  j["bspec"] = bspec;
  j["n_steps"] = n_steps;
  j["n_replicas"] = n_replicas;
  j["master_seed"] = master_seed;
  j["engine"] = to_string(engine);
  auto& obs = j["observables"] = nlohmann::json::array();
  for (Observable o : observables) obs.push_back(to_string(o));
  if (!final_positions.empty()) {
    auto& fp = j["final_positions"] = nlohmann::json::array();
    for (const Point& p : final_positions) fp.push_back({p.x, p.y});
  }
  for (const auto& [name, v] : samples) j["samples"][name] = v;
  return j;
}

std::string EnsembleSummary::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "replica";
  if (!final_positions.empty()) os << ",x,y";
  for (const auto& [name, v] : samples) os << ',' << name;
  os << '\n';
  for (int64_t i = 0; i < n_replicas; ++i) {
    const auto k = static_cast<size_t>(i);
    os << i;
    if (!final_positions.empty()) os << ',' << final_positions[k].x << ',' << final_positions[k].y;
    for (const auto& [name, v] : samples) os << ',' << v[k];
    os << '\n';
  }
  return os.str();
}

}  // namespace combwalk
