#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "combwalk/bset.hpp"
#include "combwalk/engine.hpp"

namespace combwalk {

/// Exact law of C(n) from (0,0). Every transition probability is 1/4 or 1/2,
/// so probabilities are held as integer numerators over 4^n.
struct ExactDist {
  int n = 0;
  uint64_t denominator = 1;
  std::map<Point, uint64_t> numerators;

  double probability(Point p) const;
  std::map<Point, double> pmf() const;
};

inline constexpr int kExactMaxSteps = 14;

/// Throws std::invalid_argument when n is negative or exceeds kExactMaxSteps.
ExactDist exact_distribution(const BSpec& b, int n);

/// Endpoint counts from an ensemble of walks of the same length.
struct EmpiricalLaw {
  int64_t n_steps = 0;
  uint64_t total = 0;
  std::map<Point, uint64_t> counts;

  void add(Point p) {
    ++counts[p];
    ++total;
  }
};

/// (1/2) sum |p - p_hat| over the union of supports. Throws std::invalid_argument
/// on a step-count mismatch or an empty empirical law.
double tv_distance(const ExactDist& exact, const EmpiricalLaw& empirical);

struct KSResult {
  double statistic = 0.0;
  int64_t n_samples = 0;
  std::string reference;
};

inline constexpr size_t kMinKsSamples = 100;

/// Exact one-sample Kolmogorov-Smirnov distance between the ECDF of samples and cdf.
/// Throws std::invalid_argument for fewer than kMinKsSamples samples and
/// std::domain_error when cdf is not a nondecreasing [0,1]-valued function on the samples.
KSResult ks_against(std::span<const double> samples, const std::function<double(double)>& cdf,
                    std::string reference = {});

/// Two-sample Kolmogorov-Smirnov distance.
KSResult ks_two_sample(std::span<const double> a, std::span<const double> b, std::string reference = {});

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
  std::vector<std::pair<double, double>> points;  // (log n, log value)
};

/// OLS slope of log value against log n. Needs at least 4 positive points
/// spanning two decades, or at least 6 points; throws std::invalid_argument otherwise.
SlopeFit fit_exponent(const std::map<int64_t, double>& values);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
};

/// Pearson statistic of observed counts against category probabilities.
ChiSquareResult chi_square(std::span<const int64_t> observed, std::span<const double> probs);

double median(std::vector<double> v);

struct EnvelopeRow {
  int64_t n = 0;
  double c1_ratio = 0.0;  // |C_1(n)| over the regime's normalizer
  double c2_ratio = 0.0;  // |C_2(n)| / (n log log n)^{1/2}
  double m2_lil = 0.0;    // M_2(n) / (2 n log log n)^{1/2}
  double m2_chung = 0.0;  // (8 log log n / (pi^2 n))^{1/2} M_2(n)
};

struct EnvelopeReport {
  Regime regime = Regime::beta1;
  std::string c1_normalizer;
  std::map<std::string, double> targets;  // limiting constants for inspection
  std::vector<EnvelopeRow> rows;          // checkpoints with n >= 16
  EnvelopeRow sup;                        // running maxima over rows
};

/// Normalized ratios along a trace's checkpoints. The c1 normalizer is
/// (n log log n)^{1/2} for beta1, n^{(1+beta)/4} for beta_mid and
/// sqrt(|B|) n^{1/4} (log log n)^{3/4} for beta0. Throws std::invalid_argument
/// when the regime does not match B.
EnvelopeReport envelope_diagnostics(std::span<const Checkpoint> checkpoints, Regime regime, const BSpec& b);

/// Ratios monitoring the almost-sure bounds on local time and maxima that hold
/// for every B; each is nullopt while its clock is too short for log log.
struct FactsReport {
  std::optional<double> max_local_time_lil;    // max_y xi_2(y,V) / (2 V log log V)^{1/2}
  std::optional<double> min_local_time_core;   // min_{|y|<=h} xi_2(y,V) / h, h = V^{1/2}/(log V)^{1+eps}
  std::optional<double> m2_upper;              // M_2 / (2 V log log V)^{1/2}
  std::optional<double> m2_lower;              // M_2 / (pi (V / (8 log log V))^{1/2})
  std::optional<double> m1_upper;              // M_1 / (2 H log log H)^{1/2}
  std::optional<double> m1_lower;              // M_1 / (pi (H / (8 log log H))^{1/2})
  std::optional<double> h_over_core_occupation;  // H / sum_{y in B, |y|<=h} xi_2(y,V)
};

FactsReport facts_diagnostics(const WalkTrace& trace, const BSpec& b, double eps = 0.1);

/// Samples of W_1(size * eta_2(0,1)) built independently of the comb walk: the
/// local time at zero of a fresh simple walk of walk_steps steps, divided by
/// sqrt(walk_steps), stands in for eta_2(0,1); W_1 is an independent normal.
std::vector<double> iterated_reference_sample(int64_t n_samples, int64_t walk_steps, double size,
                                              uint64_t master_seed, int threads = 0);

}  // namespace combwalk
