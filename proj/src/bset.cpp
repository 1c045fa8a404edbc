#include "combwalk/bset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace combwalk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr int64_t kSaturated = std::numeric_limits<int64_t>::max();

// floor(k^alpha), saturating. Integral exponents use exact integer powers.
int64_t floor_pow(int64_t k, double alpha) {
  if (k <= 1) return k;
  const double ia = std::round(alpha);
  if (ia == alpha && ia <= 62.0) {
    int64_t r = 1;
    for (int i = 0; i < static_cast<int>(ia); ++i) {
      if (r > kSaturated / k) return kSaturated;
      r *= k;
    }
    return r;
  }
  const long double v = std::pow(static_cast<long double>(k), static_cast<long double>(alpha));
  if (v >= static_cast<long double>(kSaturated)) return kSaturated;
  return static_cast<int64_t>(std::floor(v));
}

// #{k >= 0 : floor(k^alpha) <= x} for x >= 0. floor(k^alpha) is strictly
// increasing in k when alpha > 1, so this is also the number of distinct values.
int64_t power_count_le(double alpha, int64_t x) {
  if (x < 0) return 0;
  auto k = static_cast<int64_t>(
      std::floor(std::pow(static_cast<long double>(x) + 1.0L, 1.0L / alpha)));
  while (floor_pow(k + 1, alpha) <= x) ++k;
  while (k > 0 && floor_pow(k, alpha) > x) --k;
  return k + 1;
}

bool is_power_floor(double alpha, int64_t m) {
  const int64_t k = power_count_le(alpha, m) - 1;
  return floor_pow(k, alpha) == m;
}

// Multiples of p in [a, b], 0 <= a.
int64_t multiples_in(int64_t p, int64_t a, int64_t b) {
  if (a > b) return 0;
  return b / p - (a == 0 ? -1 : (a - 1) / p);
}

struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
  bool ok = false;
};

Fit loglog_fit(const std::vector<std::pair<double, double>>& pts) {
  std::vector<std::pair<double, double>> lp;
  for (const auto& [n, c] : pts) {
    if (c > 0) lp.emplace_back(std::log(n), std::log(c));
  }
  Fit f;
  if (lp.size() < 2) return f;
  double mx = 0, my = 0;
  for (const auto& [x, y] : lp) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(lp.size());
  my /= static_cast<double>(lp.size());
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : lp) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.ok = true;
  return f;
}

std::optional<Regime> regime_for(double beta) {
  if (beta >= 1.0) return Regime::beta1;
  if (beta > 0.0) return Regime::beta_mid;
  return Regime::beta0;
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::beta1:
      return "beta1";
    case Regime::beta_mid:
      return "beta_mid";
    case Regime::beta0:
      return "beta0";
  }
  return "?";
}

BSpec BSpec::finite(std::vector<int64_t> levels) {
  std::sort(levels.begin(), levels.end());
  if (std::adjacent_find(levels.begin(), levels.end()) != levels.end()) {
    throw std::invalid_argument("finite B: duplicate level");
  }
  return BSpec(bkind::Finite{std::move(levels)});
}

BSpec BSpec::periodic(int64_t pos_period, int64_t neg_period) {
  if (pos_period < 1 || neg_period < 1) {
    throw std::invalid_argument("periodic B: periods must be >= 1");
  }
  return BSpec(bkind::Periodic{pos_period, neg_period});
}

BSpec BSpec::power_gap(double alpha_pos, double alpha_neg) {
  if (!(alpha_pos > 1.0) || !(alpha_neg > 1.0)) {
    throw std::invalid_argument("power_gap B: exponents must be > 1");
  }
  return BSpec(bkind::PowerGap{alpha_pos, alpha_neg});
}

BSpec BSpec::halfplane() { return BSpec(bkind::HalfPlane{}); }
BSpec BSpec::all_levels() { return BSpec(bkind::AllLevels{}); }

BSpec BSpec::set_union(BSpec lhs, BSpec rhs) {
  return BSpec(bkind::Union{std::make_shared<const BSpec>(std::move(lhs)),
                            std::make_shared<const BSpec>(std::move(rhs))});
}

BSpec BSpec::set_difference(BSpec lhs, BSpec rhs) {
  return BSpec(bkind::Difference{std::make_shared<const BSpec>(std::move(lhs)),
                                 std::make_shared<const BSpec>(std::move(rhs))});
}

bool BSpec::contains(int64_t y) const {
  return std::visit(
      overloaded{
          [y](const bkind::Finite& f) {
            return std::binary_search(f.levels.begin(), f.levels.end(), y);
          },
          [y](const bkind::Periodic& p) {
            return y >= 0 ? y % p.pos_period == 0 : (-y) % p.neg_period == 0;
          },
          [y](const bkind::PowerGap& g) {
            return y >= 0 ? is_power_floor(g.alpha_pos, y) : is_power_floor(g.alpha_neg, -y);
          },
          [y](const bkind::HalfPlane&) { return y >= 0; },
          [](const bkind::AllLevels&) { return true; },
          [y](const bkind::Union& u) { return u.lhs->contains(y) || u.rhs->contains(y); },
          [y](const bkind::Difference& d) { return d.lhs->contains(y) && !d.rhs->contains(y); },
      },
      *kind_);
}

int64_t BSpec::count_range(int64_t lo, int64_t hi) const {
  if (lo > hi) return 0;
  const int64_t pa = std::max<int64_t>(lo, 0);  // nonnegative part [pa, hi]
  const int64_t nb = std::min<int64_t>(hi, -1);  // negative part [lo, nb]
  return std::visit(
      overloaded{
          [&](const bkind::Finite& f) -> int64_t {
            return std::upper_bound(f.levels.begin(), f.levels.end(), hi) -
                   std::lower_bound(f.levels.begin(), f.levels.end(), lo);
          },
          [&](const bkind::Periodic& p) -> int64_t {
            return multiples_in(p.pos_period, pa, hi) + multiples_in(p.neg_period, -nb, -lo);
          },
          [&](const bkind::PowerGap& g) -> int64_t {
            int64_t c = 0;
            if (pa <= hi) c += power_count_le(g.alpha_pos, hi) - power_count_le(g.alpha_pos, pa - 1);
            if (lo <= nb) c += power_count_le(g.alpha_neg, -lo) - power_count_le(g.alpha_neg, -nb - 1);
            return c;
          },
          [&](const bkind::HalfPlane&) -> int64_t { return pa <= hi ? hi - pa + 1 : 0; },
          [&](const bkind::AllLevels&) -> int64_t { return hi - lo + 1; },
          [&](const auto&) -> int64_t {
            int64_t c = 0;
            for (int64_t y = lo; y <= hi; ++y) c += contains(y) ? 1 : 0;
            return c;
          },
      },
      *kind_);
}

bool BSpec::is_finite() const {
  return std::visit(overloaded{
                        [](const bkind::Finite&) { return true; },
                        [](const bkind::Union& u) { return u.lhs->is_finite() && u.rhs->is_finite(); },
                        [](const bkind::Difference& d) { return d.lhs->is_finite(); },
                        [](const auto&) { return false; },
                    },
                    *kind_);
}

std::optional<std::vector<int64_t>> BSpec::finite_levels() const {
  if (!is_finite()) return std::nullopt;
  return std::visit(
      overloaded{
          [](const bkind::Finite& f) -> std::vector<int64_t> { return f.levels; },
          [](const bkind::Union& u) -> std::vector<int64_t> {
            auto a = *u.lhs->finite_levels();
            auto b = *u.rhs->finite_levels();
            std::vector<int64_t> out;
            std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
            return out;
          },
          [](const bkind::Difference& d) -> std::vector<int64_t> {
            std::vector<int64_t> out;
            for (int64_t y : *d.lhs->finite_levels()) {
              if (!d.rhs->contains(y)) out.push_back(y);
            }
            return out;
          },
          [](const auto&) -> std::vector<int64_t> { return {}; },
      },
      *kind_);
}

std::string BSpec::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const bkind::Finite& f) {
                   os << "finite([";
                   for (size_t i = 0; i < f.levels.size(); ++i) os << (i ? "," : "") << f.levels[i];
                   os << "])";
                 },
                 [&](const bkind::Periodic& p) {
                   os << "periodic(L=" << p.pos_period << ",K=" << p.neg_period << ")";
                 },
                 [&](const bkind::PowerGap& g) {
                   os << "power_gap(" << g.alpha_pos << "," << g.alpha_neg << ")";
                 },
                 [&](const bkind::HalfPlane&) { os << "halfplane"; },
                 [&](const bkind::AllLevels&) { os << "all_levels"; },
                 [&](const bkind::Union& u) {
                   os << "union(" << u.lhs->describe() << "," << u.rhs->describe() << ")";
                 },
                 [&](const bkind::Difference& d) {
                   os << "difference(" << d.lhs->describe() << "," << d.rhs->describe() << ")";
                 },
             },
             *kind_);
  return os.str();
}

ModelParams derive_params(const BSpec& b, int64_t n_probe) {
  if (n_probe < 1) throw std::invalid_argument("derive_params: n_probe must be positive");
  ModelParams mp;
  const auto np = static_cast<double>(n_probe);
  mp.gamma1 = 1.0 + static_cast<double>(b.count_range(1, n_probe)) / np;
  mp.gamma2 = 1.0 + static_cast<double>(b.count_range(-n_probe, -1)) / np;

  std::vector<std::pair<double, double>> two, pos, neg;
  for (int e = 10; e <= 20; ++e) {
    const int64_t n = int64_t{1} << e;
    const auto dn = static_cast<double>(n);
    two.emplace_back(dn, static_cast<double>(b.count_window(n)));
    pos.emplace_back(dn, static_cast<double>(b.count_range(1, n)));
    neg.emplace_back(dn, static_cast<double>(b.count_range(-n, -1)));
  }
  const Fit f = loglog_fit(two);
  mp.degenerate_fit = !f.ok && std::all_of(two.begin(), two.end(), [](auto p) { return p.second == 0; });
  mp.beta = f.ok ? std::clamp(f.slope, 0.0, 1.0) : 0.0;
  if (f.ok) mp.c_beta = std::exp(f.intercept);
  if (const Fit fp = loglog_fit(pos); fp.ok) mp.beta_pos = fp.slope;
  if (const Fit fn = loglog_fit(neg); fn.ok) mp.beta_neg = fn.slope;

  auto closed = [&](double g1, double g2, double beta, std::optional<double> c) {
    mp.gamma1 = g1;
    mp.gamma2 = g2;
    mp.beta = beta;
    mp.c_beta = c;
    mp.closed_form = true;
    mp.regime = regime_for(beta);
  };
  std::visit(overloaded{
                 [&](const bkind::Finite& fl) {
                   closed(1.0, 1.0, 0.0,
                          fl.levels.empty() ? std::nullopt
                                            : std::optional<double>(static_cast<double>(fl.levels.size())));
                 },
                 [&](const bkind::Periodic& p) {
                   const auto L = static_cast<double>(p.pos_period);
                   const auto K = static_cast<double>(p.neg_period);
                   closed((L + 1) / L, (K + 1) / K, 1.0, 1 / L + 1 / K);
                   mp.tau = 1.0;
                 },
                 [&](const bkind::PowerGap& g) {
                   const double a = std::min(g.alpha_pos, g.alpha_neg);
                   closed(1.0, 1.0, 1.0 / a, g.alpha_pos == g.alpha_neg ? 2.0 : 1.0);
                 },
                 [&](const bkind::HalfPlane&) { closed(2.0, 1.0, 1.0, 1.0); },
                 [&](const bkind::AllLevels&) { closed(2.0, 2.0, 1.0, 2.0); },
                 [&](const auto&) {},
             },
             b.kind());
  if (!mp.closed_form && b.is_finite()) {
    // Finite composites are beta = 0 regardless of the numeric slope.
    mp.beta = 0.0;
    mp.regime = Regime::beta0;
    const auto lv = b.finite_levels();
    if (lv && !lv->empty()) mp.c_beta = static_cast<double>(lv->size());
  }
  return mp;
}

LevelMask::LevelMask(BSpec b, int64_t radius) : b_(std::move(b)), radius_(std::max<int64_t>(radius, 0)) {
  mask_.resize(static_cast<size_t>(2 * radius_ + 1));
  for (int64_t y = -radius_; y <= radius_; ++y) {
    mask_[static_cast<size_t>(y + radius_)] = b_.contains(y) ? 1 : 0;
  }
}

}  // namespace combwalk
