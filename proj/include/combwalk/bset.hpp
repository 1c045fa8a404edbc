#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace combwalk {

/// Scaling regime selected by the growth exponent of |B ∩ [-n, n]|.
enum class Regime { beta1, beta_mid, beta0 };

std::string to_string(Regime r);

class BSpec;

namespace bkind {

struct Finite {
  std::vector<int64_t> levels;  // strictly increasing
};
/// Levels j >= 0 with j = 0 (mod pos_period) and j < 0 with j = 0 (mod neg_period).
struct Periodic {
  int64_t pos_period;
  int64_t neg_period;
};
/// {[k^alpha_pos] : k >= 0} together with {-[k^alpha_neg] : k >= 0}.
struct PowerGap {
  double alpha_pos;
  double alpha_neg;
};
struct HalfPlane {};
struct AllLevels {};
struct Union {
  std::shared_ptr<const BSpec> lhs, rhs;
};
struct Difference {
  std::shared_ptr<const BSpec> lhs, rhs;
};

}  // namespace bkind

/// The set B of integer levels that keep their horizontal edges.
///
/// Immutable value type; copies share the underlying description.
class BSpec {
 public:
  using Kind = std::variant<bkind::Finite, bkind::Periodic, bkind::PowerGap,
                            bkind::HalfPlane, bkind::AllLevels, bkind::Union,
                            bkind::Difference>;

  /// Throws std::invalid_argument on duplicate levels.
  static BSpec finite(std::vector<int64_t> levels);
  /// Throws std::invalid_argument unless both periods are >= 1.
  static BSpec periodic(int64_t pos_period, int64_t neg_period);
  /// Throws std::invalid_argument unless both exponents are > 1.
  static BSpec power_gap(double alpha_pos, double alpha_neg);
  static BSpec halfplane();
  static BSpec all_levels();
  static BSpec set_union(BSpec lhs, BSpec rhs);
  static BSpec set_difference(BSpec lhs, BSpec rhs);

  bool contains(int64_t y) const;

  /// |B ∩ [lo, hi]|; zero when lo > hi.
  int64_t count_range(int64_t lo, int64_t hi) const;

  /// |B ∩ [-n, n]|.
  int64_t count_window(int64_t n) const { return count_range(-n, n); }

  /// True when B is known to be finite from its description alone.
  bool is_finite() const;

  /// Enumerated levels of a finite B (sorted); nullopt if not known finite.
  std::optional<std::vector<int64_t>> finite_levels() const;

  const Kind& kind() const { return *kind_; }
  std::string describe() const;

 private:
  explicit BSpec(Kind k) : kind_(std::make_shared<const Kind>(std::move(k))) {}
  std::shared_ptr<const Kind> kind_;
};

inline bool contains(const BSpec& b, int64_t y) { return b.contains(y); }
inline int64_t count_window(const BSpec& b, int64_t n) { return b.count_window(n); }

struct ModelParams {
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double beta = 0.0;
  std::optional<double> tau;     // reporting only
  std::optional<double> c_beta;  // |B_n| ~ c n^beta, reporting only
  bool closed_form = false;
  bool degenerate_fit = false;  // count_window vanished on every probe
  std::optional<double> beta_pos;  // one-sided diagnostics
  std::optional<double> beta_neg;
  std::optional<Regime> regime;  // unset for composite sets
};

inline constexpr int64_t kDefaultProbe = 1'000'000;

/// Densities give gamma1/gamma2; beta is an OLS log-log slope of count_window
/// over n = 2^10..2^20. Closed forms override the estimates for the
/// elementary kinds.
ModelParams derive_params(const BSpec& b, int64_t n_probe = kDefaultProbe);

/// Membership table over [-radius, radius] with fallback to BSpec::contains.
class LevelMask {
 public:
  LevelMask(BSpec b, int64_t radius);

  bool operator()(int64_t y) const {
    const auto i = static_cast<uint64_t>(y + radius_);
    return i < mask_.size() ? mask_[i] != 0 : b_.contains(y);
  }

  const BSpec& bspec() const { return b_; }

 private:
  BSpec b_;
  int64_t radius_;
  std::vector<uint8_t> mask_;
};

}  // namespace combwalk
