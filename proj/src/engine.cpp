#include "combwalk/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace combwalk {

std::string to_string(EngineKind e) { return e == EngineKind::markov ? "markov" : "decomposed"; }

void LocalTimeTable::grow_to(int64_t level) {
  const auto size = static_cast<int64_t>(counts_.size());
  if (size == 0) {
    offset_ = level - 16;
    counts_.assign(33, 0);
    return;
  }
  const int64_t slack = std::max<int64_t>(16, size);
  const int64_t lo = std::min(offset_, level - slack);
  const int64_t hi = std::max(offset_ + size - 1, level + slack);
  std::vector<int64_t> grown(static_cast<size_t>(hi - lo + 1), 0);
  std::copy(counts_.begin(), counts_.end(), grown.begin() + (offset_ - lo));
  counts_ = std::move(grown);
  offset_ = lo;
}

std::map<int64_t, int64_t> LocalTimeTable::to_map() const {
  std::map<int64_t, int64_t> m;
  for (size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i] != 0) m.emplace(offset_ + static_cast<int64_t>(i), counts_[i]);
  }
  return m;
}

int64_t LocalTimeTable::total() const {
  int64_t s = 0;
  for (int64_t c : counts_) s += c;
  return s;
}

int64_t LocalTimeTable::max_count() const {
  return counts_.empty() ? 0 : *std::max_element(counts_.begin(), counts_.end());
}

int64_t mask_radius_for(int64_t n_steps) {
  return std::min<int64_t>(n_steps, 6 * static_cast<int64_t>(std::sqrt(static_cast<double>(n_steps))) + 64);
}

namespace {

// Running trackers shared by both engines.
class Tracker {
 public:
  Tracker(WalkTrace& t, const SimOptions& opts) : t_(t), store_(opts.store_path) {
    if (store_) {
      if (t.n_steps > opts.path_cap) {
        throw MemoryBudgetError("full path storage requested for " + std::to_string(t.n_steps) +
                                " steps; cap is " + std::to_string(opts.path_cap));
      }
      t.path.reserve(static_cast<size_t>(t.n_steps + 1));
      t.path.push_back({});
    }
  }

  void horizontal(int64_t dx) {
    x_ += dx;
    ++h_;
    m1_ = std::max(m1_, std::abs(x_));
  }

  void vertical(int64_t dy, bool lands_in_b) {
    y_ += dy;
    ++v_;
    t_.local_time2.increment(y_);
    if (lands_in_b) ++d2_;
    m2_ = std::max(m2_, std::abs(y_));
  }

  // Bookkeeping after step k.
  void end_step(int64_t k) {
    gap_ = std::max(gap_, std::abs(h_ - d2_));
    if (store_) t_.path.push_back({x_, y_, h_, v_, d2_});
    if (k == next_cp_ || k == t_.n_steps) {
      t_.checkpoints.push_back({k, x_, y_, h_, v_, d2_, m1_, m2_});
      if (k == next_cp_) next_cp_ *= 2;
    }
  }

  void finish() {
    t_.position = {x_, y_};
    t_.h_count = h_;
    t_.v_count = v_;
    t_.m1 = m1_;
    t_.m2 = m2_;
    t_.d2 = d2_;
    t_.max_h_d2_gap = gap_;
  }

  int64_t y() const { return y_; }
  int64_t d2() const { return d2_; }

 private:
  WalkTrace& t_;
  bool store_;
  int64_t x_ = 0, y_ = 0, h_ = 0, v_ = 0, d2_ = 0, m1_ = 0, m2_ = 0, gap_ = 0;
  int64_t next_cp_ = 1;
};

void check_steps(int64_t n_steps) {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
}

}  // namespace

Point markov_step(const BSpec& b, Point pos, RngStream& rng) {
  if (b.contains(pos.y)) {
    switch (rng.two_bits()) {
      case 0:
        return {pos.x + 1, pos.y};
      case 1:
        return {pos.x - 1, pos.y};
      case 2:
        return {pos.x, pos.y + 1};
      default:
        return {pos.x, pos.y - 1};
    }
  }
  return {pos.x, pos.y + (rng.bit() ? 1 : -1)};
}

WalkTrace simulate_markov(const BSpec& b, int64_t n_steps, uint64_t seed, const SimOptions& opts) {
  check_steps(n_steps);
  return simulate_markov(LevelMask(b, mask_radius_for(n_steps)), n_steps, seed, opts);
}

WalkTrace simulate_markov(const LevelMask& in_b, int64_t n_steps, uint64_t seed, const SimOptions& opts) {
  check_steps(n_steps);
  WalkTrace t;
  t.engine = EngineKind::markov;
  t.seed = seed;
  t.n_steps = n_steps;
  Tracker tr(t, opts);
  RngStream rng(seed);

  bool on_b = in_b(0);
  for (int64_t k = 1; k <= n_steps; ++k) {
    if (on_b) {
      switch (rng.two_bits()) {
        case 0:
          tr.horizontal(+1);
          break;
        case 1:
          tr.horizontal(-1);
          break;
        case 2:
          on_b = in_b(tr.y() + 1);
          tr.vertical(+1, on_b);
          break;
        default:
          on_b = in_b(tr.y() - 1);
          tr.vertical(-1, on_b);
          break;
      }
    } else {
      const int64_t dy = rng.bit() ? 1 : -1;
      on_b = in_b(tr.y() + dy);
      tr.vertical(dy, on_b);
    }
    tr.end_step(k);
  }
  tr.finish();
  return t;
}

WalkTrace simulate_decomposed(const BSpec& b, int64_t n_steps, uint64_t seed, const SimOptions& opts) {
  check_steps(n_steps);
  return simulate_decomposed(LevelMask(b, mask_radius_for(n_steps)), n_steps, seed, opts);
}

WalkTrace simulate_decomposed(const LevelMask& in_b, int64_t n_steps, uint64_t seed,
                              const SimOptions& opts) {
  check_steps(n_steps);
  WalkTrace t;
  t.engine = EngineKind::decomposed;
  t.seed = seed;
  t.n_steps = n_steps;
  Tracker tr(t, opts);
  const RngStream root(seed);
  RngStream horiz = root.substream(0);
  RngStream vert = root.substream(1);
  RngStream runs = root.substream(2);

  int64_t h_plus = 0;
  int64_t pending = 0;
  int64_t coupling_gap = 0;
  auto open_run = [&] {
    const int64_t g = runs.geometric_half();
    ++t.runs;
    h_plus += g;
    pending = g;
    if (opts.record_draws) t.geometric_draws.push_back(g);
  };

  if (in_b(0)) open_run();
  for (int64_t k = 1; k <= n_steps; ++k) {
    if (pending > 0) {
      tr.horizontal(horiz.bit() ? 1 : -1);
      --pending;
    } else {
      const int64_t dy = vert.bit() ? 1 : -1;
      const bool lands = in_b(tr.y() + dy);
      tr.vertical(dy, lands);
      if (lands) open_run();
    }
    coupling_gap = std::max(coupling_gap, std::abs(h_plus - tr.d2()));
    tr.end_step(k);
  }
  tr.finish();
  t.h_plus = h_plus;
  t.max_coupling_gap = coupling_gap;
  return t;
}

WalkTrace simulate(EngineKind engine, const LevelMask& mask, int64_t n_steps, uint64_t seed,
                   const SimOptions& opts) {
  return engine == EngineKind::markov ? simulate_markov(mask, n_steps, seed, opts)
                                      : simulate_decomposed(mask, n_steps, seed, opts);
}

std::string trace_csv(const WalkTrace& t) {
  std::ostringstream os;
  os << "step,x,y,h_count,v_count,d2\n";
  if (!t.path.empty()) {
    for (size_t k = 0; k < t.path.size(); ++k) {
      const auto& r = t.path[k];
      os << k << ',' << r.x << ',' << r.y << ',' << r.h_count << ',' << r.v_count << ',' << r.d2 << '\n';
    }
  } else {
    os << "0,0,0,0,0,0\n";
    for (const auto& c : t.checkpoints) {
      os << c.step << ',' << c.x << ',' << c.y << ',' << c.h_count << ',' << c.v_count << ',' << c.d2 << '\n';
    }
  }
  return os.str();
}

}  // namespace combwalk
