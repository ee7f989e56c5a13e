#pragma once

// Reproducible Monte Carlo estimates of validity, coverage and asymptotic
// normality. Replication i draws from its own generator seeded by
// replication_seed(master_seed, i), so aggregates do not depend on the
// thread count.

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "seqcert/core.hpp"
#include "seqcert/intervals.hpp"
#include "seqcert/pvalues.hpp"

namespace seqcert {

struct Iid {
  double theta;
};

/// Piecewise-constant success probability: entry (i, theta) applies from
/// trial index i (0-based) until the next entry. The first index is 0.
struct Drifting {
  std::vector<std::pair<Count, double>> schedule;
};

/// theta = low + (cap - low) * (successes among the last `window` trials)
/// / window. Stays within [low, cap].
struct PastDependent {
  Count window;
  double low;
  double cap;
};

using GeneratorSpec = std::variant<Iid, Drifting, PastDependent>;

void validate(const GeneratorSpec& spec);
/// Largest conditional success probability the generator can emit.
double generator_sup(const GeneratorSpec& spec);

class TrialGenerator {
 public:
  TrialGenerator(const GeneratorSpec& spec, std::uint64_t seed);

  int next();
  /// Conditional success probability used for the most recent trial.
  double last_probability() const { return last_p_; }
  /// Max conditional success probability emitted so far.
  double theta_max() const { return theta_max_; }
  Count emitted() const { return emitted_; }

 private:
  double probability() const;

  GeneratorSpec spec_;
  std::mt19937_64 rng_;
  Count emitted_ = 0;
  double last_p_ = 0.0;
  double theta_max_ = 0.0;
  std::size_t segment_ = 0;
  std::vector<std::uint8_t> ring_;
  Count window_ones_ = 0;
};

struct FixedN {
  Count n;
};
/// Stop at the first k with evidence >= threshold, or at max_n.
struct ThresholdLogT {
  double threshold;
  Count max_n;
};
/// Run to max_n and use the largest evidence seen along the way.
struct MaxOverRun {
  Count max_n;
};

using StoppingRule = std::variant<FixedN, ThresholdLogT, MaxOverRun>;

Count horizon(const StoppingRule& rule);

struct ReplicationPlan {
  Count reps = 0;
  std::uint64_t master_seed = 0;
  GeneratorSpec generator = Iid{0.5};
  StoppingRule rule = FixedN{100};
};

std::uint64_t replication_seed(std::uint64_t master_seed, Count index);

/// Evidence process tracked along each replication: log T_k for the
/// streaming engines, -log p of the fixed-n tests evaluated at each k.
enum class Evidence { PbrPoint, PbrClamped, TrainedSplit, Exact, ChernoffHoeffding };

struct EvidenceSpec {
  Evidence kind = Evidence::PbrClamped;
  /// Training fraction for TrainedSplit, applied to the rule's horizon.
  double lambda = 0.5;
};

std::string_view to_string(Evidence kind);
Evidence parse_evidence(std::string_view name);

struct RateEstimate {
  double rate = 0.0;
  double std_error = 0.0;
  Count hits = 0;
  Count reps = 0;
};

/// Fraction of replications rejecting phi at level a. The generator must
/// lie in the extended null for phi; PbrPoint further requires the point
/// null Iid{phi}.
RateEstimate run_validity(const ReplicationPlan& plan, double phi, const ConfidenceLevel& level,
                          const EvidenceSpec& evidence = {});

/// Fraction of replications whose one-sided interval [phi_a, 1] covers the
/// target: theta for Iid, the realized theta_max otherwise. Needs FixedN.
RateEstimate run_coverage(const ReplicationPlan& plan, TestKind kind,
                          const ConfidenceLevel& level);

struct NormalityReport {
  double sample_mean = 0.0;
  double sample_sd = 0.0;
  double ks_stat = 0.0;
  /// Limiting standard deviation the sample is compared against.
  double reference_sd = 0.0;
  Count reps = 0;
};

/// sqrt(n) (G_n - KL(theta|phi)) per replication, against N(0, sigma_G^2).
NormalityReport run_normality(const ReplicationPlan& plan, TestKind kind, double phi);

enum class GapKind { Pbr, Exact };

/// Centred and sqrt(n)-scaled log-p gap to CH, against its limiting normal.
/// Throws HypothesisViolated at the excluded parameter points.
NormalityReport run_gap_normality(const ReplicationPlan& plan, GapKind kind, double phi);

/// Kolmogorov-Smirnov distance between a sample and N(0, sd^2).
double ks_normal(std::vector<double> sample, double sd);
/// Pairwise summation.
double pairwise_sum(const double* values, std::size_t count);

}  // namespace seqcert
