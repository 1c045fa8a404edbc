#include "combwalk/timechange.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "combwalk/rng.hpp"

namespace combwalk {

namespace {

void require_ordered(double t, double gamma1, double gamma2) {
  if (!(gamma1 > gamma2) || !(gamma2 >= 1.0)) {
    throw std::invalid_argument("law requires gamma1 > gamma2 >= 1");
  }
  if (!(t > 0.0)) throw std::invalid_argument("law requires t > 0");
}

size_t snap(const BrownianPath& p, double t) {
  if (!(t >= 0.0) || t > p.horizon() + 1e-12) {
    throw std::out_of_range("time " + std::to_string(t) + " outside [0, " + std::to_string(p.horizon()) + "]");
  }
  const auto k = static_cast<size_t>(std::llround(t / p.dt()));
  return std::min(k, p.size() - 1);
}

}  // namespace

BrownianPath BrownianPath::generate(double horizon, double dt, uint64_t seed) {
  if (!(horizon > 0.0) || !(dt > 0.0)) throw std::invalid_argument("BrownianPath: horizon and dt must be positive");
  BrownianPath p;
  p.horizon_ = horizon;
  p.dt_ = dt;
  p.seed_ = seed;
  const auto steps = static_cast<size_t>(std::floor(horizon / dt + 1e-9));
  p.values_.resize(steps + 1);
  RngStream rng(seed);
  const double sd = std::sqrt(dt);
  p.values_[0] = 0.0;
  for (size_t k = 1; k <= steps; ++k) p.values_[k] = p.values_[k - 1] + sd * rng.normal();
  p.build_occupation();
  return p;
}

BrownianPath BrownianPath::from_values(std::vector<double> values, double dt) {
  if (values.empty() || values.front() != 0.0) throw std::invalid_argument("BrownianPath: values must start at 0");
  if (!(dt > 0.0)) throw std::invalid_argument("BrownianPath: dt must be positive");
  BrownianPath p;
  p.dt_ = dt;
  p.values_ = std::move(values);
  p.horizon_ = p.last_time();
  p.build_occupation();
  return p;
}

void BrownianPath::build_occupation() {
  cum_pos_.resize(values_.size());
  int64_t count = 0;
  cum_pos_[0] = 0.0;
  for (size_t k = 1; k < values_.size(); ++k) {
    if (values_[k - 1] >= 0.0) ++count;
    cum_pos_[k] = static_cast<double>(count) * dt_;
  }
}

double BrownianPath::value_at(double t) const {
  if (!(t >= 0.0) || t > last_time() + 1e-12) throw std::out_of_range("BrownianPath::value_at: t outside grid");
  const double u = t / dt_;
  const auto k = std::min(static_cast<size_t>(u), values_.size() - 1);
  if (k + 1 >= values_.size()) return values_.back();
  const double w = u - static_cast<double>(k);
  return values_[k] + w * (values_[k + 1] - values_[k]);
}

TimeChange::TimeChange(double gamma1, double gamma2, const BrownianPath& path)
    : gamma1_(gamma1), gamma2_(gamma2), path_(path) {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) throw std::invalid_argument("TimeChange: gammas must be positive");
}

double a_of_t(const TimeChange& tc, double t) { return tc.a_at(snap(tc.path(), t)); }

double alpha_of_t(const TimeChange& tc, double t) {
  const size_t k = snap(tc.path(), t);
  return tc.a_at(k) - static_cast<double>(k) * tc.path().dt();
}

double a_inverse(const TimeChange& tc, double s) {
  const double top = tc.a_max();
  if (!(s >= 0.0) || s > top * (1.0 + 1e-12)) {
    throw std::out_of_range("a_inverse: " + std::to_string(s) + " outside [0, A(T)=" + std::to_string(top) + "]");
  }
  const BrownianPath& p = tc.path();
  // Smallest grid index with A >= s.
  size_t lo = 0;
  size_t hi = p.size() - 1;
  if (s >= top) return p.last_time();
  while (lo < hi) {
    const size_t mid = lo + (hi - lo) / 2;
    if (tc.a_at(mid) >= s) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  if (lo == 0) return 0.0;
  const double a0 = tc.a_at(lo - 1);
  const double a1 = tc.a_at(lo);
  return (static_cast<double>(lo - 1) + (s - a0) / (a1 - a0)) * p.dt();
}

double a_hat(const std::map<int64_t, int64_t>& local_times, int64_t n, double gamma1, double gamma2) {
  int64_t nonneg = 0;
  int64_t neg = 0;
  for (const auto& [level, count] : local_times) (level >= 0 ? nonneg : neg) += count;
  if (nonneg + neg != n) {
    throw std::invalid_argument("a_hat: local times sum to " + std::to_string(nonneg + neg) + ", expected " +
                                std::to_string(n));
  }
  return gamma1 * static_cast<double>(nonneg) + gamma2 * static_cast<double>(neg);
}

std::vector<double> sample_oscillating_bm(const TimeChange& tc, std::span<const double> times) {
  std::vector<double> out;
  out.reserve(times.size());
  for (double s : times) out.push_back(tc.path().value_at(std::min(a_inverse(tc, s), tc.path().last_time())));
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double cdf_a_inverse(double t, double v, double gamma1, double gamma2) {
  require_ordered(t, gamma1, gamma2);
  if (v <= t / gamma1) return 0.0;
  if (v >= t / gamma2) return 1.0;
  const double arg = (t - v * gamma2) / (v * (gamma1 - gamma2));
  return 1.0 - 2.0 / std::numbers::pi * std::asin(std::sqrt(std::clamp(arg, 0.0, 1.0)));
}

double density_a_inverse(double t, double v, double gamma1, double gamma2) {
  require_ordered(t, gamma1, gamma2);
  if (v <= t / gamma1 || v >= t / gamma2) return 0.0;
  return t / (std::numbers::pi * v) / std::sqrt((v * gamma1 - t) * (t - gamma2 * v));
}

double cdf_t_minus_a_inverse(double t, double v, double gamma1, double gamma2) {
  return 1.0 - cdf_a_inverse(t, t - v, gamma1, gamma2);
}

double density_t_minus_a_inverse(double t, double v, double gamma1, double gamma2) {
  require_ordered(t, gamma1, gamma2);
  const double lo = t * (1.0 - 1.0 / gamma2);
  const double hi = t * (1.0 - 1.0 / gamma1);
  if (v <= lo || v >= hi) return 0.0;
  return t / (std::numbers::pi * (t - v)) /
         std::sqrt(((gamma1 - 1.0) * t - gamma1 * v) * (t * (1.0 - gamma2) + gamma2 * v));
}

SeriesValue kw_sup_tail(double y, double t, double gamma1, double gamma2, int k_max) {
  if (!(gamma1 >= 1.0) || !(gamma2 >= 1.0)) throw std::invalid_argument("kw_sup_tail: gammas must be >= 1");
  if (!(t > 0.0)) throw std::invalid_argument("kw_sup_tail: t must be positive");
  if (!(y >= 0.0)) throw std::invalid_argument("kw_sup_tail: y must be >= 0");
  if (k_max < 1) throw std::invalid_argument("kw_sup_tail: k_max must be >= 1");
  const double s1 = std::sqrt(gamma1);
  const double s2 = std::sqrt(gamma2);
  const double pre = 4.0 * s1 / (s1 + s2);
  const double ratio = (s2 - s1) / (s1 + s2);
  const double z = s1 * y / std::sqrt(t);
  double sum = 0.0;
  double rk = 1.0;
  for (int k = 0; k <= k_max; ++k) {
    sum += rk * normal_sf((2.0 * k + 1.0) * z);
    rk *= ratio;
  }
  SeriesValue out;
  out.value = std::clamp(pre * sum, 0.0, 1.0);
  // Omitted terms are bounded by the first omitted tail factor times a geometric series in |r|.
  const double ar = std::abs(ratio);
  out.truncation_bound = pre * normal_sf((2.0 * k_max + 3.0) * z) * std::abs(rk) / (1.0 - ar);
  return out;
}

}  // namespace combwalk
