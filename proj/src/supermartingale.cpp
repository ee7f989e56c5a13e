#include "seqcert/supermartingale.hpp"

#include <algorithm>
#include <cmath>

#include "seqcert/pvalues.hpp"

namespace seqcert {

namespace {

void check_bit(int bit) {
  if (bit != 0 && bit != 1) throw DomainError("trial outcome must be 0 or 1");
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void check_split(Count m, Count s_m) {
  if (s_m == 0 || s_m == m) {
    throw DegenerateTraining("training sample of " + std::to_string(m) +
                             " trials has frequency 0 or 1");
  }
}

// log F(b) for a training frequency s_m / m, computed from counts.
double log_trained_factor(Count m, Count s_m, double phi, int bit) {
  const double log_m = std::log(static_cast<double>(m));
  if (bit == 1) return std::log(static_cast<double>(s_m)) - log_m - std::log(phi);
  return std::log(static_cast<double>(m - s_m)) - log_m - std::log1p(-phi);
}

}  // namespace

TildeTheta TildeTheta::of(Count k, Count s_k) {
  if (s_k > k) throw DomainError("successes exceed trials");
  return {k, s_k, static_cast<double>(s_k + 1) / static_cast<double>(k + 2)};
}

double TildeTheta::log_value() const {
  return std::log(static_cast<double>(s_k + 1)) - std::log(static_cast<double>(k + 2));
}

double TildeTheta::log_complement() const {
  return std::log(static_cast<double>(k - s_k + 1)) - std::log(static_cast<double>(k + 2));
}

double log_pbr_test_factor(double estimate, double phi, int outcome) {
  require_open_probability(estimate, "estimate");
  require_open_probability(phi, "phi");
  check_bit(outcome);
  if (outcome == 1) return std::log(estimate) - std::log(phi);
  return std::log1p(-estimate) - std::log1p(-phi);
}

double pbr_test_factor(double estimate, double phi, int outcome) {
  require_open_probability(estimate, "estimate");
  require_open_probability(phi, "phi");
  check_bit(outcome);
  return outcome == 1 ? estimate / phi : (1.0 - estimate) / (1.0 - phi);
}

SupermartingaleState::SupermartingaleState(double phi, FactorPolicy policy)
    : phi_(require_open_probability(phi, "phi")), policy_(policy) {
  if (const auto* split = std::get_if<TrainedSplit>(&policy_); split && split->training == 0) {
    throw ConfigurationError("trained split needs at least one training trial");
  }
}

std::optional<double> SupermartingaleState::frozen_estimate() const {
  const auto* split = std::get_if<TrainedSplit>(&policy_);
  if (split == nullptr || k_ < split->training) return std::nullopt;
  return static_cast<double>(training_successes_) / static_cast<double>(split->training);
}

double SupermartingaleState::next_log_factor(int bit) const {
  check_bit(bit);
  return std::visit(
      Overloaded{
          [&](const PbrPoint&) {
            const auto est = tilde_theta();
            return bit == 1 ? est.log_value() - std::log(phi_)
                            : est.log_complement() - std::log1p(-phi_);
          },
          [&](const PbrClamped&) {
            const auto est = tilde_theta();
            if (est.value < phi_) return 0.0;
            return bit == 1 ? est.log_value() - std::log(phi_)
                            : est.log_complement() - std::log1p(-phi_);
          },
          [&](const TrainedSplit& split) {
            if (k_ < split.training) return 0.0;
            const Count m = split.training;
            const double frequency = static_cast<double>(training_successes_) / static_cast<double>(m);
            check_split(m, training_successes_);
            if (phi_ > frequency) return 0.0;
            return log_trained_factor(m, training_successes_, phi_, bit);
          },
      },
      policy_);
}

double SupermartingaleState::expected_next_factor(double theta) const {
  require_probability(theta, "theta");
  return theta * std::exp(next_log_factor(1)) + (1.0 - theta) * std::exp(next_log_factor(0));
}

void SupermartingaleState::advance(int bit) {
  log_t_ += next_log_factor(bit);
  log_t_max_ = std::max(log_t_max_, log_t_);
  ++k_;
  s_k_ += static_cast<Count>(bit);
  if (const auto* split = std::get_if<TrainedSplit>(&policy_); split && k_ == split->training) {
    training_successes_ = s_k_;
  }
}

SupermartingaleState step(SupermartingaleState state, int outcome) {
  state.advance(outcome);
  return state;
}

std::pair<double, double> closed_form_check(const TrialSequence& seq, double phi) {
  SupermartingaleState state(phi, PbrPoint{});
  for (auto b : seq.outcomes()) state.advance(b);
  if (seq.empty()) return {state.log_t(), 0.0};
  const Count n = seq.size();
  const Count k = seq.successes();
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double log_p0 = kd * std::log(phi) + (nd - kd) * std::log1p(-phi) + std::log1p(nd) +
                        log_binomial(n, k);
  return {state.log_t(), -log_p0};
}

Count training_count(Count n, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0, 1)");
  if (n < 2) throw DomainError("training split needs n >= 2");
  const auto m = static_cast<Count>(std::floor(lambda * static_cast<double>(n)));
  return std::clamp<Count>(m, 1, n - 1);
}

TrainedSplitState TrainedSplitState::from_counts(Count n, Count m, Count successes_training,
                                                 Count successes_evaluation) {
  if (n < 2 || m == 0 || m >= n) throw DomainError("training split needs 1 <= m <= n-1");
  if (successes_training > m || successes_evaluation > n - m) {
    throw DomainError("split success counts exceed their blocks");
  }
  TrainedSplitState s{};
  s.n = n;
  s.m = m;
  s.lambda = static_cast<double>(m) / static_cast<double>(n);
  s.successes_training = successes_training;
  s.successes_evaluation = successes_evaluation;
  s.theta_hat_m = static_cast<double>(successes_training) / static_cast<double>(m);
  s.theta_hat_prime = static_cast<double>(successes_evaluation) / static_cast<double>(n - m);
  return s;
}

TrainedSplitState TrainedSplitState::from_sequence(const TrialSequence& seq, double lambda) {
  const Count n = seq.size();
  const Count m = training_count(n, lambda);
  auto s = from_counts(n, m, seq.successes(m), seq.successes() - seq.successes(m));
  s.lambda = lambda;
  return s;
}

double TrainedSplitState::theta_hat() const {
  return static_cast<double>(successes_training + successes_evaluation) / static_cast<double>(n);
}

double trained_log_q(const TrainedSplitState& split, double phi) {
  require_open_probability(phi, "phi");
  check_split(split.m, split.successes_training);
  const double ones = static_cast<double>(split.successes_evaluation);
  const double zeros = static_cast<double>(split.n - split.m - split.successes_evaluation);
  return ones * log_trained_factor(split.m, split.successes_training, phi, 1) +
         zeros * log_trained_factor(split.m, split.successes_training, phi, 0);
}

LogPValue trained_lambda_log_p(const TrainedSplitState& split, double phi) {
  require_open_probability(phi, "phi");
  check_split(split.m, split.successes_training);
  if (phi > split.theta_hat_m) return LogPValue::from_neg_log(0.0);
  return LogPValue::from_neg_log(trained_log_q(split, phi));
}

LogPValue trained_lambda_log_p(const TrialSequence& seq, double phi, double lambda) {
  return trained_lambda_log_p(TrainedSplitState::from_sequence(seq, lambda), phi);
}

}  // namespace seqcert
