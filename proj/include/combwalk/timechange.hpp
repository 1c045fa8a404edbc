#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

namespace combwalk {

/// Wiener path sampled on a uniform grid t_k = k dt, k = 0..floor(T/dt).
///
/// cum_pos[k] = dt * #{i < k : W(t_i) >= 0}, the occupation of [0, inf) with
/// the indicator taken at the left end of each cell.
class BrownianPath {
 public:
  static BrownianPath generate(double horizon, double dt, uint64_t seed);
  /// Path through the given grid values; values[0] must be 0.
  static BrownianPath from_values(std::vector<double> values, double dt);

  double horizon() const { return horizon_; }
  double dt() const { return dt_; }
  size_t size() const { return values_.size(); }
  uint64_t seed() const { return seed_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> cum_pos() const { return cum_pos_; }

  /// Grid time of the last sample.
  double last_time() const { return static_cast<double>(values_.size() - 1) * dt_; }
  /// Linear interpolation of W; throws std::out_of_range outside [0, last_time()].
  double value_at(double t) const;

 private:
  BrownianPath() = default;
  void build_occupation();

  double horizon_ = 0.0;
  double dt_ = 0.0;
  uint64_t seed_ = 0;
  std::vector<double> values_;
  std::vector<double> cum_pos_;
};

/// A(t) = gamma1 * (time W >= 0) + gamma2 * (time W < 0) on a fixed path.
class TimeChange {
 public:
  TimeChange(double gamma1, double gamma2, const BrownianPath& path);

  double gamma1() const { return gamma1_; }
  double gamma2() const { return gamma2_; }
  const BrownianPath& path() const { return path_.get(); }

  /// A at grid index k.
  double a_at(size_t k) const {
    return gamma2_ * static_cast<double>(k) * path_.get().dt() + (gamma1_ - gamma2_) * path_.get().cum_pos()[k];
  }
  /// A at the final grid point.
  double a_max() const { return a_at(path_.get().size() - 1); }

 private:
  double gamma1_;
  double gamma2_;
  std::reference_wrapper<const BrownianPath> path_;
};

/// A(t) with t snapped to the nearest grid point. Throws std::out_of_range for t outside [0, T].
double a_of_t(const TimeChange& tc, double t);
/// alpha(t) = A(t) - t, same snapping as a_of_t.
double alpha_of_t(const TimeChange& tc, double t);
/// Monotone inverse of A: binary search over the grid, linear inside a cell
/// (A is linear on each cell). Throws std::out_of_range for s outside [0, A(T)].
double a_inverse(const TimeChange& tc, double s);

/// gamma1 * (visits to levels >= 0) + gamma2 * (visits to levels < 0).
/// Throws std::invalid_argument if the counts do not sum to n.
double a_hat(const std::map<int64_t, int64_t>& local_times, int64_t n, double gamma1, double gamma2);

/// Y(s) = W(A^{-1}(s)) on the given times, W linearly interpolated.
std::vector<double> sample_oscillating_bm(const TimeChange& tc, std::span<const double> times);

/// Standard normal CDF and upper tail, via erfc.
double normal_cdf(double x);
double normal_sf(double x);

/// P(A^{-1}(t) < v) = 1 - (2/pi) arcsin(sqrt((t - gamma2 v) / (v (gamma1 - gamma2))))
/// on t/gamma1 < v < t/gamma2. Requires gamma1 > gamma2 >= 1 and t > 0;
/// otherwise throws std::invalid_argument.
double cdf_a_inverse(double t, double v, double gamma1, double gamma2);
double density_a_inverse(double t, double v, double gamma1, double gamma2);

/// Law of t - A^{-1}(t), supported on (t(1 - 1/gamma2), t(1 - 1/gamma1)).
double cdf_t_minus_a_inverse(double t, double v, double gamma1, double gamma2);
double density_t_minus_a_inverse(double t, double v, double gamma1, double gamma2);

struct SeriesValue {
  double value = 0.0;
  double truncation_bound = 0.0;  // bound on the omitted tail of the series
};

inline constexpr int kDefaultSeriesTerms = 200;

/// P(sup_{s <= t} W(A^{-1}(s)) > y) by the Keilson-Wellner series
///   4 sqrt(g1) / (sqrt(g1) + sqrt(g2)) * sum_k r^k (1 - Phi((2k+1) sqrt(g1) y / sqrt(t))),
///   r = (sqrt(g2) - sqrt(g1)) / (sqrt(g1) + sqrt(g2)),
/// summed for k = 0..k_max.
SeriesValue kw_sup_tail(double y, double t, double gamma1, double gamma2, int k_max = kDefaultSeriesTerms);

}  // namespace combwalk
