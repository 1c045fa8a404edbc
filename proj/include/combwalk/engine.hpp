#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "combwalk/bset.hpp"
#include "combwalk/rng.hpp"

namespace combwalk {

struct Point {
  int64_t x = 0;
  int64_t y = 0;
  auto operator<=>(const Point&) const = default;
};

/// Visit counts of the vertical walk per level, over the contiguous range of
/// levels visited so far (a nearest-neighbour walk never skips a level, so the
/// table stays O(max |y|) in size).
class LocalTimeTable {
 public:
  void increment(int64_t level) {
    const int64_t i = level - offset_;
    if (i < 0 || i >= static_cast<int64_t>(counts_.size())) {
      grow_to(level);
      ++counts_[static_cast<size_t>(level - offset_)];
    } else {
      ++counts_[static_cast<size_t>(i)];
    }
  }

  int64_t at(int64_t level) const {
    const int64_t i = level - offset_;
    return i < 0 || i >= static_cast<int64_t>(counts_.size()) ? 0 : counts_[static_cast<size_t>(i)];
  }

  /// Nonzero entries as an ordered level -> count map.
  std::map<int64_t, int64_t> to_map() const;
  int64_t total() const;
  int64_t max_count() const;

 private:
  void grow_to(int64_t level);
  int64_t offset_ = 0;
  std::vector<int64_t> counts_;
};

/// Walk state after a step (path storage).
struct StepRecord {
  int64_t x = 0;
  int64_t y = 0;
  int64_t h_count = 0;
  int64_t v_count = 0;
  int64_t d2 = 0;
};

/// Tracker snapshot; taken at steps 1, 2, 4, ... and at the final step.
struct Checkpoint {
  int64_t step = 0;
  int64_t x = 0;
  int64_t y = 0;
  int64_t h_count = 0;
  int64_t v_count = 0;
  int64_t d2 = 0;
  int64_t m1 = 0;
  int64_t m2 = 0;
};

enum class EngineKind { markov, decomposed };

std::string to_string(EngineKind e);

/// One realized walk of length n_steps.
struct WalkTrace {
  EngineKind engine = EngineKind::markov;
  uint64_t seed = 0;
  int64_t n_steps = 0;
  Point position;        // C(n_steps)
  int64_t h_count = 0;   // H_N
  int64_t v_count = 0;   // V_N
  int64_t m1 = 0;        // max_k |C_1(k)|
  int64_t m2 = 0;        // max_k |C_2(k)|
  int64_t d2 = 0;        // sum over j in B of local_time2[j]
  LocalTimeTable local_time2;  // visits of the vertical walk at vertical times 1..V_N
  int64_t max_h_d2_gap = 0;    // max_{1<=i<=N} |H_i - D_2(V_i)|

  // Decomposition engine only.
  std::optional<int64_t> h_plus;  // H_N with the last geometric run counted in full
  int64_t runs = 0;               // geometric runs drawn so far
  int64_t max_coupling_gap = 0;   // max_{1<=i<=N} |H_i^+ - D_2(V_i)|
  std::vector<int64_t> geometric_draws;  // G_1, G_2, ... when recorded

  std::vector<StepRecord> path;  // path[k] is the state after step k; empty unless stored
  std::vector<Checkpoint> checkpoints;
};

struct SimOptions {
  bool store_path = false;
  int64_t path_cap = 100'000;
  bool record_draws = false;
};

class MemoryBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Radius of the precomputed membership table used for walks of n steps.
int64_t mask_radius_for(int64_t n_steps);

/// One transition of the chain on the comb-type lattice: uniform over the
/// 4 neighbours on a level of B, over the 2 vertical neighbours elsewhere.
Point markov_step(const BSpec& b, Point pos, RngStream& rng);

WalkTrace simulate_markov(const BSpec& b, int64_t n_steps, uint64_t seed, const SimOptions& opts = {});
WalkTrace simulate_markov(const LevelMask& mask, int64_t n_steps, uint64_t seed,
                          const SimOptions& opts = {});

/// Builds C(N) = (S_1(H_N), S_2(V_N)) from two independent simple walks and
/// i.i.d. Geometric(1/2) run lengths: every arrival of S_2 on a level of B
/// (and the origin, when 0 is in B) opens a run of G horizontal steps.
///
/// Substreams 0, 1 and 2 of the seed drive S_1, S_2 and the G's. A run cut off
/// by the step budget counts only its executed steps in h_count, and in full
/// in h_plus.
WalkTrace simulate_decomposed(const BSpec& b, int64_t n_steps, uint64_t seed,
                              const SimOptions& opts = {});
WalkTrace simulate_decomposed(const LevelMask& mask, int64_t n_steps, uint64_t seed,
                              const SimOptions& opts = {});

WalkTrace simulate(EngineKind engine, const LevelMask& mask, int64_t n_steps, uint64_t seed,
                   const SimOptions& opts = {});

/// CSV with columns step,x,y,h_count,v_count,d2. Uses the stored path when
/// present, otherwise the checkpoints.
std::string trace_csv(const WalkTrace& t);

}  // namespace combwalk
