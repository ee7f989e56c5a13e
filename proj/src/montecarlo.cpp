#include "seqcert/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "seqcert/bounds.hpp"
#include "seqcert/parallel.hpp"
#include "seqcert/supermartingale.hpp"

namespace seqcert {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RateEstimate rate_of(const std::vector<std::uint8_t>& hits) {
  RateEstimate r;
  r.reps = hits.size();
  for (auto h : hits) r.hits += h;
  if (r.reps == 0) return r;
  const double reps = static_cast<double>(r.reps);
  r.rate = static_cast<double>(r.hits) / reps;
  r.std_error = std::sqrt(r.rate * (1.0 - r.rate) / reps);
  return r;
}

void require_reps(const ReplicationPlan& plan) {
  if (plan.reps == 0) throw ConfigurationError("plan needs at least one replication");
  validate(plan.generator);
}

// Evidence E_k after each trial. The streaming engines carry log T_k; the
// fixed-n tests are re-evaluated from (k, S_k) when asked.
class EvidenceTracker {
 public:
  EvidenceTracker(const EvidenceSpec& spec, double phi, Count horizon_n)
      : kind_(spec.kind), phi_(phi), engine_(phi, policy_for(spec, horizon_n)) {}

  void advance(int bit) {
    ++k_;
    s_ += static_cast<Count>(bit);
    if (streaming()) engine_.advance(bit);
  }

  double value() const {
    switch (kind_) {
      case Evidence::Exact:
        return k_ == 0 ? 0.0 : log_p_exact(k_, s_, phi_).value();
      case Evidence::ChernoffHoeffding:
        return k_ == 0 ? 0.0 : log_p_ch(k_, s_, phi_).value();
      default:
        return engine_.log_t();
    }
  }

 private:
  bool streaming() const {
    return kind_ == Evidence::PbrPoint || kind_ == Evidence::PbrClamped ||
           kind_ == Evidence::TrainedSplit;
  }

  static FactorPolicy policy_for(const EvidenceSpec& spec, Count horizon_n) {
    switch (spec.kind) {
      case Evidence::PbrPoint:
        return PbrPoint{};
      case Evidence::TrainedSplit:
        return TrainedSplit{training_count(horizon_n, spec.lambda)};
      default:
        return PbrClamped{};
    }
  }

  Evidence kind_;
  double phi_;
  SupermartingaleState engine_;
  Count k_ = 0;
  Count s_ = 0;
};

// Statistic used for the rejection decision under `rule`.
double run_stopped(const StoppingRule& rule, TrialGenerator& gen, EvidenceTracker& tracker) {
  return std::visit(
      Overloaded{
          [&](const FixedN& r) {
            for (Count i = 0; i < r.n; ++i) tracker.advance(gen.next());
            return tracker.value();
          },
          [&](const ThresholdLogT& r) {
            double e = tracker.value();
            for (Count i = 0; i < r.max_n && e < r.threshold; ++i) {
              tracker.advance(gen.next());
              e = tracker.value();
            }
            return e;
          },
          [&](const MaxOverRun& r) {
            double best = tracker.value();
            for (Count i = 0; i < r.max_n; ++i) {
              tracker.advance(gen.next());
              best = std::max(best, tracker.value());
            }
            return best;
          },
      },
      rule);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double iid_theta(const ReplicationPlan& plan, const char* who) {
  const auto* iid = std::get_if<Iid>(&plan.generator);
  if (iid == nullptr) throw ConfigurationError(std::string(who) + " needs an Iid generator");
  return iid->theta;
}

Count fixed_n(const ReplicationPlan& plan, const char* who) {
  const auto* fixed = std::get_if<FixedN>(&plan.rule);
  if (fixed == nullptr || fixed->n == 0) {
    throw ConfigurationError(std::string(who) + " needs a FixedN rule with n >= 1");
  }
  return fixed->n;
}

// Success counts of FixedN replications.
std::vector<Count> simulate_counts(const ReplicationPlan& plan, Count n,
                                   std::vector<double>* theta_max = nullptr) {
  std::vector<Count> counts(plan.reps);
  if (theta_max != nullptr) theta_max->assign(plan.reps, 0.0);
  parallel_for(plan.reps, [&](std::size_t i) {
    TrialGenerator gen(plan.generator, replication_seed(plan.master_seed, i));
    Count s = 0;
    for (Count j = 0; j < n; ++j) s += static_cast<Count>(gen.next());
    counts[i] = s;
    if (theta_max != nullptr) (*theta_max)[i] = gen.theta_max();
  });
  return counts;
}

NormalityReport summarize(std::vector<double> stats, double reference_sd) {
  NormalityReport rep;
  rep.reps = stats.size();
  rep.reference_sd = reference_sd;
  const double m = static_cast<double>(stats.size());
  rep.sample_mean = pairwise_sum(stats.data(), stats.size()) / m;
  std::vector<double> sq(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const double d = stats[i] - rep.sample_mean;
    sq[i] = d * d;
  }
  rep.sample_sd = stats.size() > 1 ? std::sqrt(pairwise_sum(sq.data(), sq.size()) / (m - 1.0)) : 0.0;
  rep.ks_stat = ks_normal(std::move(stats), reference_sd);
  return rep;
}

}  // namespace

void validate(const GeneratorSpec& spec) {
  std::visit(Overloaded{
                 [](const Iid& g) { require_open_probability(g.theta, "theta"); },
                 [](const Drifting& g) {
                   if (g.schedule.empty() || g.schedule.front().first != 0) {
                     throw ConfigurationError("drifting schedule must start at trial 0");
                   }
                   for (std::size_t i = 0; i < g.schedule.size(); ++i) {
                     require_open_probability(g.schedule[i].second, "theta");
                     if (i > 0 && g.schedule[i].first <= g.schedule[i - 1].first) {
                       throw ConfigurationError("drifting schedule indices must increase");
                     }
                   }
                 },
                 [](const PastDependent& g) {
                   if (g.window == 0) throw ConfigurationError("window must be positive");
                   require_open_probability(g.low, "low");
                   require_open_probability(g.cap, "cap");
                   if (g.low > g.cap) throw ConfigurationError("need low <= cap");
                 },
             },
             spec);
}

double generator_sup(const GeneratorSpec& spec) {
  return std::visit(Overloaded{
                        [](const Iid& g) { return g.theta; },
                        [](const Drifting& g) {
                          double m = 0.0;
                          for (const auto& e : g.schedule) m = std::max(m, e.second);
                          return m;
                        },
                        [](const PastDependent& g) { return g.cap; },
                    },
                    spec);
}

TrialGenerator::TrialGenerator(const GeneratorSpec& spec, std::uint64_t seed)
    : spec_(spec), rng_(seed) {
  validate(spec_);
  if (const auto* pd = std::get_if<PastDependent>(&spec_)) ring_.assign(pd->window, 0);
}

double TrialGenerator::probability() const {
  return std::visit(
      Overloaded{
          [](const Iid& g) { return g.theta; },
          [&](const Drifting& g) { return g.schedule[segment_].second; },
          [&](const PastDependent& g) {
            return g.low + (g.cap - g.low) * static_cast<double>(window_ones_) /
                               static_cast<double>(g.window);
          },
      },
      spec_);
}

int TrialGenerator::next() {
  if (const auto* d = std::get_if<Drifting>(&spec_)) {
    while (segment_ + 1 < d->schedule.size() && d->schedule[segment_ + 1].first <= emitted_) {
      ++segment_;
    }
  }
  last_p_ = probability();
  theta_max_ = std::max(theta_max_, last_p_);
  constexpr double kScale = 0x1.0p-53;
  const int bit = static_cast<double>(rng_() >> 11) * kScale < last_p_ ? 1 : 0;
  if (!ring_.empty()) {
    auto& slot = ring_[emitted_ % ring_.size()];
    window_ones_ += static_cast<Count>(bit) - slot;
    slot = static_cast<std::uint8_t>(bit);
  }
  ++emitted_;
  return bit;
}

Count horizon(const StoppingRule& rule) {
  return std::visit(Overloaded{
                        [](const FixedN& r) { return r.n; },
                        [](const ThresholdLogT& r) { return r.max_n; },
                        [](const MaxOverRun& r) { return r.max_n; },
                    },
                    rule);
}

std::uint64_t replication_seed(std::uint64_t master_seed, Count index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

std::string_view to_string(Evidence kind) {
  switch (kind) {
    case Evidence::PbrPoint:
      return "pbr-point";
    case Evidence::PbrClamped:
      return "pbr-clamped";
    case Evidence::TrainedSplit:
      return "trained";
    case Evidence::Exact:
      return "exact";
    case Evidence::ChernoffHoeffding:
      return "ch";
  }
  return "?";
}

Evidence parse_evidence(std::string_view name) {
  for (auto e : {Evidence::PbrPoint, Evidence::PbrClamped, Evidence::TrainedSplit,
                 Evidence::Exact, Evidence::ChernoffHoeffding}) {
    if (name == to_string(e)) return e;
  }
  throw DomainError("unknown evidence kind '" + std::string(name) + "'");
}

RateEstimate run_validity(const ReplicationPlan& plan, double phi, const ConfidenceLevel& level,
                          const EvidenceSpec& evidence) {
  require_reps(plan);
  require_open_probability(phi, "phi");
  if (generator_sup(plan.generator) > phi) {
    throw ConfigurationError("generator emits success probabilities above phi");
  }
  if (evidence.kind == Evidence::PbrPoint) {
    const auto* iid = std::get_if<Iid>(&plan.generator);
    if (iid == nullptr || iid->theta != phi) {
      throw ConfigurationError("pbr-point factors are only valid for the point null Iid{phi}");
    }
  }
  const Count n_max = horizon(plan.rule);
  if (n_max == 0) throw ConfigurationError("stopping rule horizon must be positive");
  const double alpha = level.alpha();
  std::vector<std::uint8_t> hits(plan.reps);
  parallel_for(plan.reps, [&](std::size_t i) {
    TrialGenerator gen(plan.generator, replication_seed(plan.master_seed, i));
    EvidenceTracker tracker(evidence, phi, n_max);
    hits[i] = run_stopped(plan.rule, gen, tracker) >= alpha ? 1 : 0;
  });
  return rate_of(hits);
}

RateEstimate run_coverage(const ReplicationPlan& plan, TestKind kind,
                          const ConfidenceLevel& level) {
  require_reps(plan);
  const Count n = fixed_n(plan, "coverage");
  const auto* iid = std::get_if<Iid>(&plan.generator);
  std::vector<double> theta_max;
  const auto counts = simulate_counts(plan, n, iid ? nullptr : &theta_max);

  // The endpoint depends on k only; invert once per distinct count.
  std::vector<Count> distinct(counts);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<double> endpoints(distinct.size());
  parallel_for(distinct.size(), [&](std::size_t j) {
    endpoints[j] = endpoint(kind, n, distinct[j], level).phi_endpoint;
  });
  std::map<Count, double> lookup;
  for (std::size_t j = 0; j < distinct.size(); ++j) lookup.emplace(distinct[j], endpoints[j]);

  std::vector<std::uint8_t> covered(plan.reps);
  for (std::size_t i = 0; i < plan.reps; ++i) {
    const double target = iid ? iid->theta : theta_max[i];
    covered[i] = target >= lookup.at(counts[i]) ? 1 : 0;
  }
  return rate_of(covered);
}

NormalityReport run_normality(const ReplicationPlan& plan, TestKind kind, double phi) {
  require_reps(plan);
  const double theta = iid_theta(plan, "normality");
  const Count n = fixed_n(plan, "normality");
  const auto params = gain_asymptotic_params(theta, phi);
  const auto counts = simulate_counts(plan, n);
  const double root_n = std::sqrt(static_cast<double>(n));
  std::vector<double> stats(counts.size());
  parallel_for(counts.size(), [&](std::size_t i) {
    const double gain = log_p(kind, n, counts[i], phi).gain(n);
    stats[i] = root_n * (gain - params.mean);
  });
  return summarize(std::move(stats), std::sqrt(params.var));
}

NormalityReport run_gap_normality(const ReplicationPlan& plan, GapKind kind, double phi) {
  require_reps(plan);
  const double theta = iid_theta(plan, "gap normality");
  const Count n = fixed_n(plan, "gap normality");
  const auto params = gap_asymptotic_params(theta, phi);
  if (kind == GapKind::Pbr && params.pbr_excluded) {
    throw HypothesisViolated("PBR gap limit excludes theta = 1/2");
  }
  if (kind == GapKind::Exact && params.exact_excluded) {
    throw HypothesisViolated("exact gap limit excludes phi = theta (2 theta - 1)");
  }
  const auto counts = simulate_counts(plan, n);
  const double nd = static_cast<double>(n);
  const double root_n = std::sqrt(nd);
  const double half_log_n = 0.5 * std::log(nd);
  std::vector<double> stats(counts.size());
  parallel_for(counts.size(), [&](std::size_t i) {
    if (kind == GapKind::Pbr) {
      const double gap = log_p_pbr(n, counts[i], phi).unclamped() - log_p_ch(n, counts[i], phi).unclamped();
      stats[i] = root_n * (gap + half_log_n - params.mean_pbr);
    } else {
      const double gap =
          log_p_exact(n, counts[i], phi).unclamped() - log_p_ch(n, counts[i], phi).unclamped();
      stats[i] = root_n * (gap - half_log_n - params.mean_exact);
    }
  });
  return summarize(std::move(stats),
                   std::sqrt(kind == GapKind::Pbr ? params.var_pbr : params.var_exact));
}

double ks_normal(std::vector<double> sample, double sd) {
  if (sample.empty()) return 0.0;
  if (!(sd > 0.0)) throw DomainError("reference sd must be positive");
  std::sort(sample.begin(), sample.end());
  const double m = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = normal_cdf(sample[i] / sd);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

double pairwise_sum(const double* values, std::size_t count) {
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += values[i];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, count - half);
}

}  // namespace seqcert
