#pragma once

#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "combwalk/bset.hpp"
#include "combwalk/engine.hpp"
#include "json.hpp"

namespace combwalk {

/// Resolves a requested worker count; 0 means hardware concurrency.
int resolve_threads(int requested);

/// Runs fn(i) for i in [0, n) on `threads` workers, storing results by index.
/// The output depends only on fn, never on the schedule.
template <class Fn>
auto map_indices(int64_t n, int threads, Fn fn) -> std::vector<decltype(fn(int64_t{}))> {
  using T = decltype(fn(int64_t{}));
  std::vector<T> out(static_cast<size_t>(n));
  const int workers = static_cast<int>(std::min<int64_t>(resolve_threads(threads), std::max<int64_t>(n, 1)));
  if (workers <= 1) {
    for (int64_t i = 0; i < n; ++i) out[static_cast<size_t>(i)] = fn(i);
    return out;
  }
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int64_t i = w; i < n; i += workers) out[static_cast<size_t>(i)] = fn(i);
      } catch (...) {
        std::lock_guard lk(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return out;
}

enum class Observable { final_position, v_fraction, d2, m1, m2, rescaled_c1, rescaled_c2, envelope_ratios };

std::string to_string(Observable o);
Observable observable_from_string(const std::string& s);

/// Per-experiment aggregate. Every sample vector is indexed by replica.
struct EnsembleSummary {
  std::string bspec;
  int64_t n_steps = 0;
  int64_t n_replicas = 0;
  uint64_t master_seed = 0;
  EngineKind engine = EngineKind::markov;
  std::vector<Observable> observables;
  std::vector<Point> final_positions;
  std::map<std::string, std::vector<double>> samples;

  nlohmann::json to_json() const;
  /// One row per replica: replica, then one column per sample series.
  std::string to_csv() const;

  bool operator==(const EnsembleSummary&) const = default;
};

/// Simulates n_replicas walks with seeds split_seed(master_seed, i).
///
/// rescaled_c1 divides C_1(N) by N^{(1+beta)/4} (beta from derive_params),
/// rescaled_c2 divides C_2(N) by N^{1/2}. envelope_ratios adds c1_lil and
/// c2_lil (C_i(N) / (N log log N)^{1/2}) and m2_chung ((8 log log N / (pi^2 N))^{1/2} M_2(N)).
EnsembleSummary run_ensemble(const BSpec& b, int64_t n_steps, int64_t n_replicas, uint64_t master_seed,
                             EngineKind engine, const std::vector<Observable>& observables,
                             int threads = 0);

}  // namespace combwalk
