#include "combwalk/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "combwalk/ensemble.hpp"
#include "combwalk/rng.hpp"

namespace combwalk {

double ExactDist::probability(Point p) const {
  const auto it = numerators.find(p);
  return it == numerators.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(denominator);
}

std::map<Point, double> ExactDist::pmf() const {
  std::map<Point, double> m;
  for (const auto& [p, num] : numerators) m.emplace(p, static_cast<double>(num) / static_cast<double>(denominator));
  return m;
}

ExactDist exact_distribution(const BSpec& b, int n) {
  if (n < 0 || n > kExactMaxSteps) {
    throw std::invalid_argument("exact_distribution: n must be in [0, " + std::to_string(kExactMaxSteps) + "]");
  }
  const int w = 2 * n + 1;
  auto idx = [&](int64_t x, int64_t y) { return static_cast<size_t>((y + n) * w + (x + n)); };
  std::vector<uint8_t> on_b(static_cast<size_t>(w));
  for (int y = -n; y <= n; ++y) on_b[static_cast<size_t>(y + n)] = b.contains(y) ? 1 : 0;

  // Numerators over 4^k after k steps.
  std::vector<uint64_t> cur(static_cast<size_t>(w) * w, 0), next(cur.size(), 0);
  cur[idx(0, 0)] = 1;
  for (int k = 0; k < n; ++k) {
    std::fill(next.begin(), next.end(), 0);
    for (int y = -k; y <= k; ++y) {
      for (int x = -k; x <= k; ++x) {
        const uint64_t m = cur[idx(x, y)];
        if (m == 0) continue;
        if (on_b[static_cast<size_t>(y + n)]) {
          next[idx(x + 1, y)] += m;
          next[idx(x - 1, y)] += m;
          next[idx(x, y + 1)] += m;
          next[idx(x, y - 1)] += m;
        } else {
          next[idx(x, y + 1)] += 2 * m;
          next[idx(x, y - 1)] += 2 * m;
        }
      }
    }
    std::swap(cur, next);
  }
  ExactDist d;
  d.n = n;
  d.denominator = uint64_t{1} << (2 * n);
  for (int y = -n; y <= n; ++y) {
    for (int x = -n; x <= n; ++x) {
      if (const uint64_t m = cur[idx(x, y)]; m != 0) d.numerators.emplace(Point{x, y}, m);
    }
  }
  return d;
}

double tv_distance(const ExactDist& exact, const EmpiricalLaw& empirical) {
  if (empirical.n_steps != exact.n) {
    throw std::invalid_argument("tv_distance: step-count mismatch (" + std::to_string(empirical.n_steps) + " vs " +
                                std::to_string(exact.n) + ")");
  }
  if (empirical.total == 0) throw std::invalid_argument("tv_distance: empty empirical law");
  const auto total = static_cast<double>(empirical.total);
  double sum = 0.0;
  for (const auto& [p, num] : exact.numerators) {
    const auto it = empirical.counts.find(p);
    const double q = it == empirical.counts.end() ? 0.0 : static_cast<double>(it->second) / total;
    sum += std::abs(exact.probability(p) - q);
  }
  for (const auto& [p, c] : empirical.counts) {
    if (!exact.numerators.contains(p)) sum += static_cast<double>(c) / total;
  }
  return 0.5 * sum;
}

KSResult ks_against(std::span<const double> samples, const std::function<double(double)>& cdf,
                    std::string reference) {
  if (samples.empty()) throw std::invalid_argument("ks_against: empty samples");
  if (samples.size() < kMinKsSamples) {
    throw std::invalid_argument("ks_against: need at least " + std::to_string(kMinKsSamples) + " samples");
  }
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const auto n = static_cast<double>(s.size());
  double d = 0.0;
  double prev_f = -1.0;
  size_t i = 0;
  while (i < s.size()) {
    size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    const double f = cdf(s[i]);
    if (!(f >= -1e-12 && f <= 1.0 + 1e-12) || f < prev_f - 1e-12) {
      throw std::domain_error("ks_against: reference cdf is not a nondecreasing [0,1] function");
    }
    prev_f = f;
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(j) / n - f)});
    i = j;
  }
  return {d, static_cast<int64_t>(s.size()), std::move(reference)};
}

KSResult ks_two_sample(std::span<const double> a, std::span<const double> b, std::string reference) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const auto nx = static_cast<double>(x.size());
  const auto ny = static_cast<double>(y.size());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return {d, static_cast<int64_t>(x.size()), std::move(reference)};
}

SlopeFit fit_exponent(const std::map<int64_t, double>& values) {
  SlopeFit f;
  for (const auto& [n, v] : values) {
    if (n <= 0 || !(v > 0.0)) throw std::invalid_argument("fit_exponent: n and values must be positive");
    f.points.emplace_back(std::log(static_cast<double>(n)), std::log(v));
  }
  const size_t m = f.points.size();
  const bool two_decades =
      m >= 4 && static_cast<double>(values.rbegin()->first) >= 100.0 * static_cast<double>(values.begin()->first);
  if (!(two_decades || m >= 6)) {
    throw std::invalid_argument("fit_exponent: need >= 4 points over two decades or >= 6 points");
  }
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : f.points) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : f.points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (const auto& [x, y] : f.points) {
    const double r = y - (f.intercept + f.slope * x);
    ssr += r * r;
  }
  f.std_error = std::sqrt(ssr / static_cast<double>(m - 2) / sxx);
  return f;
}

ChiSquareResult chi_square(std::span<const int64_t> observed, std::span<const double> probs) {
  if (observed.size() != probs.size() || observed.size() < 2) {
    throw std::invalid_argument("chi_square: need matching category counts (>= 2)");
  }
  double total = 0.0;
  for (int64_t o : observed) total += static_cast<double>(o);
  ChiSquareResult r;
  for (size_t i = 0; i < observed.size(); ++i) {
    const double e = total * probs[i];
    const double diff = static_cast<double>(observed[i]) - e;
    r.statistic += diff * diff / e;
  }
  r.dof = static_cast<int>(observed.size()) - 1;
  return r;
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty input");
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

namespace {

double loglog(double n) { return std::log(std::log(n)); }

}  // namespace

EnvelopeReport envelope_diagnostics(std::span<const Checkpoint> checkpoints, Regime regime, const BSpec& b) {
  const ModelParams mp = derive_params(b);
  const bool finite = b.is_finite();
  switch (regime) {
    case Regime::beta0:
      if (!finite) throw std::invalid_argument("envelope_diagnostics: beta0 regime needs a finite B");
      break;
    case Regime::beta1:
      if (finite || mp.beta < 1.0) throw std::invalid_argument("envelope_diagnostics: beta1 regime needs beta = 1");
      break;
    case Regime::beta_mid:
      if (finite || !(mp.beta > 0.0 && mp.beta < 1.0)) {
        throw std::invalid_argument("envelope_diagnostics: beta_mid regime needs 0 < beta < 1");
      }
      break;
  }
  EnvelopeReport rep;
  rep.regime = regime;
  const double pi = std::numbers::pi;
  rep.targets["m2_lil_limsup"] = 1.0;
  rep.targets["m2_chung_liminf"] = 1.0;
  double b_size = 1.0;
  switch (regime) {
    case Regime::beta1:
      rep.c1_normalizer = "(n loglog n)^(1/2)";
      rep.targets["c1_limsup"] = std::sqrt(2.0 * (1.0 - 1.0 / mp.gamma1));
      rep.targets["c2_limsup"] = std::sqrt(2.0 / mp.gamma1);
      rep.targets["c2_liminf"] = -std::sqrt(2.0 / mp.gamma2);
      break;
    case Regime::beta_mid:
      rep.c1_normalizer = "n^((1+beta)/4)";
      rep.targets["c1_exponent"] = (1.0 + mp.beta) / 4.0;
      break;
    case Regime::beta0:
      b_size = static_cast<double>(b.finite_levels()->size());
      rep.c1_normalizer = "sqrt(|B|) n^(1/4) (loglog n)^(3/4)";
      rep.targets["c1_limsup"] = std::pow(2.0, 1.25) / std::pow(3.0, 0.75);
      rep.targets["c2_limsup_2nloglogn"] = 1.0;
      break;
  }
  for (const Checkpoint& c : checkpoints) {
    if (c.step < 16) continue;
    const auto n = static_cast<double>(c.step);
    const double ll = loglog(n);
    EnvelopeRow r;
    r.n = c.step;
    const double ax = std::abs(static_cast<double>(c.x));
    switch (regime) {
      case Regime::beta1:
        r.c1_ratio = ax / std::sqrt(n * ll);
        break;
      case Regime::beta_mid:
        r.c1_ratio = ax / std::pow(n, (1.0 + mp.beta) / 4.0);
        break;
      case Regime::beta0:
        r.c1_ratio = ax / (std::sqrt(b_size) * std::pow(n, 0.25) * std::pow(ll, 0.75));
        break;
    }
    r.c2_ratio = std::abs(static_cast<double>(c.y)) / std::sqrt(n * ll);
    r.m2_lil = static_cast<double>(c.m2) / std::sqrt(2.0 * n * ll);
    r.m2_chung = std::sqrt(8.0 * ll / (pi * pi * n)) * static_cast<double>(c.m2);
    rep.sup.n = std::max(rep.sup.n, r.n);
    rep.sup.c1_ratio = std::max(rep.sup.c1_ratio, r.c1_ratio);
    rep.sup.c2_ratio = std::max(rep.sup.c2_ratio, r.c2_ratio);
    rep.sup.m2_lil = std::max(rep.sup.m2_lil, r.m2_lil);
    rep.sup.m2_chung = std::max(rep.sup.m2_chung, r.m2_chung);
    rep.rows.push_back(r);
  }
  return rep;
}

FactsReport facts_diagnostics(const WalkTrace& trace, const BSpec& b, double eps) {
  FactsReport f;
  const double pi = std::numbers::pi;
  const auto v = static_cast<double>(trace.v_count);
  const auto h = static_cast<double>(trace.h_count);
  if (v >= 16) {
    const double ll = loglog(v);
    f.max_local_time_lil = static_cast<double>(trace.local_time2.max_count()) / std::sqrt(2.0 * v * ll);
    f.m2_upper = static_cast<double>(trace.m2) / std::sqrt(2.0 * v * ll);
    f.m2_lower = static_cast<double>(trace.m2) / (pi * std::sqrt(v / (8.0 * ll)));
    const double core = std::sqrt(v) / std::pow(std::log(v), 1.0 + eps);
    const auto radius = static_cast<int64_t>(std::floor(core));
    int64_t min_lt = trace.local_time2.at(0);
    int64_t occ = 0;
    for (int64_t y = -radius; y <= radius; ++y) {
      min_lt = std::min(min_lt, trace.local_time2.at(y));
      if (b.contains(y)) occ += trace.local_time2.at(y);
    }
    f.min_local_time_core = static_cast<double>(min_lt) / core;
    if (occ > 0) f.h_over_core_occupation = h / static_cast<double>(occ);
  }
  if (h >= 16) {
    const double ll = loglog(h);
    f.m1_upper = static_cast<double>(trace.m1) / std::sqrt(2.0 * h * ll);
    f.m1_lower = static_cast<double>(trace.m1) / (pi * std::sqrt(h / (8.0 * ll)));
  }
  return f;
}

std::vector<double> iterated_reference_sample(int64_t n_samples, int64_t walk_steps, double size,
                                              uint64_t master_seed, int threads) {
  if (n_samples < 1 || walk_steps < 1) throw std::invalid_argument("iterated_reference_sample: bad sizes");
  const double root_n = std::sqrt(static_cast<double>(walk_steps));
  return map_indices(n_samples, threads, [&](int64_t i) {
    RngStream rng(split_seed(master_seed, static_cast<uint64_t>(i)));
    RngStream walk = rng.substream(0);
    int64_t s = 0;
    int64_t zeros = 0;
    int64_t left = walk_steps;
    while (left > 0) {
      uint64_t word = walk.next_u64();
      const int take = static_cast<int>(std::min<int64_t>(left, 64));
      for (int k = 0; k < take; ++k, word >>= 1) {
        s += (word & 1U) ? 1 : -1;
        zeros += s == 0 ? 1 : 0;
      }
      left -= take;
    }
    const double eta = static_cast<double>(zeros) / root_n;
    return std::sqrt(size * eta) * rng.substream(1).normal();
  });
}

}  // namespace combwalk
