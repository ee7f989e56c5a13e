#pragma once

// Streaming test supermartingales for the success probability of
// Bernoulli trials. Products are carried as log T_k; the factor applied
// to trial k+1 depends only on the state after trial k.

#include <optional>
#include <utility>
#include <variant>

#include "seqcert/core.hpp"

namespace seqcert {

/// The training sample is all zeros or all ones, so the frozen factor
/// would vanish on one outcome.
class DegenerateTraining : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Add-one estimate (S_k + 1) / (k + 2), as if two extra trials 0 and 1
/// preceded the sequence.
struct TildeTheta {
  Count k = 0;
  Count s_k = 0;
  double value = 0.5;

  static TildeTheta of(Count k, Count s_k);
  double log_value() const;
  double log_complement() const;
};

/// F(b) = (estimate/phi)^b ((1-estimate)/(1-phi))^(1-b).
double pbr_test_factor(double estimate, double phi, int outcome);
double log_pbr_test_factor(double estimate, double phi, int outcome);

struct PbrPoint {};
/// Factor 1 whenever the add-one estimate is below phi.
struct PbrClamped {};
/// Factor 1 for the first `training` trials, then a factor frozen from
/// the training frequency (or 1 if that frequency is below phi).
struct TrainedSplit {
  Count training = 1;
};

using FactorPolicy = std::variant<PbrPoint, PbrClamped, TrainedSplit>;

class SupermartingaleState {
 public:
  SupermartingaleState(double phi, FactorPolicy policy);

  double phi() const { return phi_; }
  const FactorPolicy& policy() const { return policy_; }
  Count trials() const { return k_; }
  Count successes() const { return s_k_; }
  double log_t() const { return log_t_; }
  double log_t_max() const { return log_t_max_; }

  TildeTheta tilde_theta() const { return TildeTheta::of(k_, s_k_); }
  /// Training frequency, once the training block is complete.
  std::optional<double> frozen_estimate() const;

  /// log of the factor the next trial would apply for outcome `bit`.
  double next_log_factor(int bit) const;
  /// E[F_{k+1}] when the next outcome is Bernoulli(theta).
  double expected_next_factor(double theta) const;

  void advance(int bit);

 private:
  double phi_;
  FactorPolicy policy_;
  Count k_ = 0;
  Count s_k_ = 0;
  double log_t_ = 0.0;
  double log_t_max_ = 0.0;
  Count training_successes_ = 0;
};

SupermartingaleState step(SupermartingaleState state, int outcome);

/// Runs a fresh PbrPoint engine over `seq`. Returns the streamed log T_n
/// and the closed form -log P0_PBR(theta_hat | phi); they agree up to
/// rounding.
std::pair<double, double> closed_form_check(const TrialSequence& seq, double phi);

/// m = floor(lambda n) clamped to [1, n-1].
Count training_count(Count n, double lambda);

/// Counts describing a split sample; theta_hat_prime is the frequency of
/// the n - m evaluation trials.
struct TrainedSplitState {
  double lambda;
  Count n;
  Count m;
  Count successes_training;
  Count successes_evaluation;
  double theta_hat_m;
  double theta_hat_prime;

  static TrainedSplitState from_sequence(const TrialSequence& seq, double lambda);
  static TrainedSplitState from_counts(Count n, Count m, Count successes_training,
                                       Count successes_evaluation);
  double theta_hat() const;
};

/// -log Q_lambda(phi); equals -log P_lambda whenever phi <= theta_hat_m.
double trained_log_q(const TrainedSplitState& split, double phi);

/// -log P_lambda for the training-split test.
LogPValue trained_lambda_log_p(const TrainedSplitState& split, double phi);
LogPValue trained_lambda_log_p(const TrialSequence& seq, double phi, double lambda);

}  // namespace seqcert
