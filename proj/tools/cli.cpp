#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

#include "seqcert/bounds.hpp"
#include "seqcert/intervals.hpp"
#include "seqcert/montecarlo.hpp"
#include "seqcert/pvalues.hpp"
#include "seqcert/supermartingale.hpp"
#include "seqcert/verification.hpp"

namespace seqcert::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check_flag(bool ok, const std::string& flag, const std::string& what) {
  if (!ok) throw DomainError(flag + " " + what);
}

void check_phi(double phi, const char* flag = "--phi") {
  check_flag(phi > 0.0 && phi < 1.0, flag, "must lie in (0, 1)");
}

void check_counts(Count n, Count k) {
  check_flag(n >= 1, "--n", "must be at least 1");
  check_flag(k <= n, "--successes", "must not exceed --n");
}

ConfidenceLevel level_from_flag(double a) {
  check_flag(a > 0.0 && a < 1.0, "--a", "must lie in (0, 1)");
  return ConfidenceLevel(a);
}

json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return nullptr;
  return x > 0 ? "inf" : "-inf";
}

// Writes to --out when given, otherwise to the command's stream.
void emit(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) {
    body(out);
    return;
  }
  std::ofstream file(path);
  if (!file) throw UsageError("cannot open " + path + " for writing");
  body(file);
}

std::string join_csv(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line += ',';
    line += fields[i];
  }
  return line;
}

TestKind kind_flag(const std::string& name) {
  try {
    return parse_test_kind(name);
  } catch (const DomainError&) {
    throw UsageError("unknown --test '" + name + "'");
  }
}

Count round_count(double x) { return static_cast<Count>(std::llround(x)); }

// ---------------------------------------------------------------------------
// pvalue

struct PvalueArgs {
  std::string test;
  bool all = false;
  Count n = 0;
  Count successes = 0;
  double phi = 0.5;
  std::string format = "csv";
};

int cmd_pvalue(const PvalueArgs& args, std::ostream& out) {
  check_counts(args.n, args.successes);
  check_phi(args.phi);
  std::vector<TestKind> kinds;
  if (args.all) {
    kinds = {TestKind::Exact, TestKind::ChernoffHoeffding, TestKind::PBR};
  } else if (!args.test.empty()) {
    kinds = {kind_flag(args.test)};
  } else {
    throw UsageError("pvalue needs --test or --all");
  }

  if (args.format == "json") {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = "pvalue";
    doc["inputs"] = {{"n", args.n}, {"successes", args.successes}, {"phi", args.phi}};
    json outputs = json::array();
    for (auto kind : kinds) {
      const auto lp = log_p(kind, args.n, args.successes, args.phi);
      const double p = lp.p();
      outputs.push_back({{"test", std::string(to_string(kind))},
                         {"neg_log_p", number(lp.value())},
                         {"neg_log_bound", number(lp.unclamped())},
                         {"p", p > 0.0 ? number(p) : json(nullptr)},
                         {"log10_p", number(lp.log10_p())}});
    }
    doc["outputs"] = outputs;
    out << doc.dump(2) << '\n';
    return kOk;
  }

  out << "test,n,successes,phi,neg_log_p,neg_log_bound,p,log10_p\n";
  for (auto kind : kinds) {
    const auto lp = log_p(kind, args.n, args.successes, args.phi);
    const double p = lp.p();
    out << join_csv({std::string(to_string(kind)), std::to_string(args.n),
                     std::to_string(args.successes), format_double(args.phi),
                     format_double(lp.value()), format_double(lp.unclamped()),
                     p > 0.0 ? format_double(p) : "", format_double(lp.log10_p())})
        << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// martingale

struct MartingaleArgs {
  double phi = 0.5;
  std::string policy = "point";
  double lambda = 0.5;
  std::string input;
  bool trajectory = false;
  std::string format = "csv";
};

int cmd_martingale(const MartingaleArgs& args, std::ostream& out) {
  check_phi(args.phi);
  TrialSequence seq;
  if (args.input == "-") {
    seq = parse_trials(std::cin);
  } else {
    std::ifstream file(args.input);
    if (!file) throw UsageError("cannot read " + args.input);
    seq = parse_trials(file);
  }

  FactorPolicy policy = PbrPoint{};
  if (args.policy == "clamped") {
    policy = PbrClamped{};
  } else if (args.policy == "trained") {
    check_flag(args.lambda > 0.0 && args.lambda < 1.0, "--lambda", "must lie in (0, 1)");
    check_flag(seq.size() >= 2, "--input", "needs at least 2 trials for the trained policy");
    policy = TrainedSplit{training_count(seq.size(), args.lambda)};
  } else if (args.policy != "point") {
    throw UsageError("unknown --policy '" + args.policy + "'");
  }

  SupermartingaleState state(args.phi, policy);
  if (args.trajectory) out << "k,outcome,successes,log_t,log_t_max\n";
  if (args.trajectory) out << "0,,0,0,0\n";
  for (Count i = 0; i < seq.size(); ++i) {
    const int bit = seq.outcome(i);
    state.advance(bit);
    if (args.trajectory) {
      out << join_csv({std::to_string(state.trials()), std::to_string(bit),
                       std::to_string(state.successes()), format_double(state.log_t()),
                       format_double(state.log_t_max())})
          << '\n';
    }
  }
  if (args.trajectory) return kOk;

  const double p_final = std::min(1.0, std::exp(-state.log_t()));
  const double p_max = std::min(1.0, std::exp(-state.log_t_max()));
  if (args.format == "json") {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = "martingale";
    doc["inputs"] = {{"phi", args.phi}, {"policy", args.policy}, {"n", seq.size()}};
    if (args.policy == "trained") doc["inputs"]["lambda"] = args.lambda;
    doc["outputs"] = {{"successes", seq.empty() ? 0 : seq.successes()},
                      {"log_t", number(state.log_t())},
                      {"log_t_max", number(state.log_t_max())},
                      {"p_final", number(p_final)},
                      {"p_max", number(p_max)}};
    out << doc.dump(2) << '\n';
    return kOk;
  }
  out << "policy,phi,n,successes,log_t,log_t_max,p_final,p_max\n";
  out << join_csv({args.policy, format_double(args.phi), std::to_string(seq.size()),
                   std::to_string(state.successes()), format_double(state.log_t()),
                   format_double(state.log_t_max()), format_double(p_final),
                   format_double(p_max)})
      << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// endpoint

struct EndpointArgs {
  std::string test = "exact";
  Count n = 0;
  Count successes = 0;
  double a = 0.01;
  double lambda = 0.5;
  std::optional<Count> training_successes;
  bool two_sided = false;
  std::string format = "csv";
};

int cmd_endpoint(const EndpointArgs& args, std::ostream& out) {
  check_counts(args.n, args.successes);
  const auto level = level_from_flag(args.a);
  const bool trained = args.test == "trained";

  if (args.two_sided) {
    if (trained) throw UsageError("--two-sided is not available for the trained test");
    const auto kind = kind_flag(args.test);
    const auto iv = two_sided(kind, args.n, args.successes, level);
    if (args.format == "json") {
      json doc;
      doc["schema_version"] = kSchemaVersion;
      doc["command"] = "endpoint";
      doc["inputs"] = {{"test", args.test}, {"n", args.n}, {"k", args.successes}, {"a", args.a}};
      doc["outputs"] = {{"lower", number(iv.lower)}, {"upper", number(iv.upper)}};
      out << doc.dump(2) << '\n';
      return kOk;
    }
    out << "test,n,k,a,lower,upper\n";
    out << join_csv({args.test, std::to_string(args.n), std::to_string(args.successes),
                     format_double(args.a), format_double(iv.lower), format_double(iv.upper)})
        << '\n';
    return kOk;
  }

  EndpointResult r;
  if (trained) {
    check_flag(args.lambda > 0.0 && args.lambda < 1.0, "--lambda", "must lie in (0, 1)");
    if (!args.training_successes) {
      throw UsageError("the trained test needs --training-successes");
    }
    check_flag(args.n >= 2, "--n", "must be at least 2 for the trained test");
    const Count m = training_count(args.n, args.lambda);
    const Count s_m = *args.training_successes;
    check_flag(s_m <= m, "--training-successes", "must not exceed the training count");
    check_flag(s_m <= args.successes && args.successes - s_m <= args.n - m, "--successes",
               "is inconsistent with --training-successes");
    r = endpoint(TrainedSplitState::from_counts(args.n, m, s_m, args.successes - s_m), level);
  } else {
    r = endpoint(kind_flag(args.test), args.n, args.successes, level);
  }
  const char* status = r.converged() ? "converged" : "no_rejection";

  if (args.format == "json") {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = "endpoint";
    doc["inputs"] = {{"test", args.test}, {"n", args.n}, {"k", args.successes}, {"a", args.a}};
    doc["outputs"] = {{"phi_endpoint", number(r.phi_endpoint)},
                      {"gamma", number(r.gamma)},
                      {"converged", r.converged()},
                      {"sigma_hat", number(r.sigma_hat)},
                      {"iterations", r.iterations},
                      {"bracket_width", number(r.bracket_width)},
                      {"status", status},
                      {"boundary", r.boundary}};
    out << doc.dump(2) << '\n';
    return kOk;
  }
  out << "test,n,k,a,phi_endpoint,gamma,converged,sigma_hat,iterations,bracket_width,status\n";
  out << join_csv({args.test, std::to_string(args.n), std::to_string(args.successes),
                   format_double(args.a), format_double(r.phi_endpoint), format_double(r.gamma),
                   r.converged() ? "1" : "0", format_double(r.sigma_hat),
                   std::to_string(r.iterations), format_double(r.bracket_width), status})
      << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// figure

std::vector<Count> endpoint_ns(Count max_n) {
  std::vector<Count> ns;
  for (Count decade = 10; decade <= max_n; decade *= 10) {
    for (Count m : {1, 2, 5}) {
      if (decade * m <= max_n) ns.push_back(decade * m);
    }
  }
  return ns;
}

Table figure_pvalues(const FigureOptions& o) {
  const Count n = o.n.value_or(100);
  const double theta = o.theta.value_or(0.5);
  check_flag(n >= 1, "--n", "must be at least 1");
  check_phi(theta, "--theta");
  const double nd = static_cast<double>(n);
  const Count k16 = round_count(binomial_quantile(0.16, n, theta) * nd);
  const Count k50 = round_count(binomial_quantile(0.5, n, theta) * nd);
  const Count k84 = round_count(binomial_quantile(0.84, n, theta) * nd);

  Table t;
  t.header = {"phi",         "ch_q16",         "ch_median",        "ch_q84",
              "kl",          "pbr_median_diff", "exact_median_diff", "ch_q16_minus_median",
              "ch_q84_minus_median"};
  for (int i = 1; i <= 99; ++i) {
    const double phi = i / 100.0;
    if (phi > theta + 1e-12) break;
    auto ch = [&](Count k) { return log_p_ch(n, k, phi).unclamped() / nd; };
    const double median = ch(k50);
    const double pbr = log_p_pbr(n, k50, phi).unclamped() / nd - median;
    const double exact = log_p_exact(n, k50, phi).unclamped() / nd - median;
    t.rows.push_back({phi, ch(k16), median, ch(k84), kl_bernoulli(theta, phi), pbr, exact,
                      ch(k16) - median, ch(k84) - median});
  }
  return t;
}

Table figure_gaps(const FigureOptions& o) {
  const double phi = o.phi.value_or(0.5);
  check_phi(phi);
  std::vector<Count> ns = {100, 1000, 10000};
  if (o.n) ns = {*o.n};
  for (Count n : ns) check_flag(n >= 2, "--n", "must be at least 2");

  Table t;
  t.header = {"theta_hat"};
  for (Count n : ns) {
    t.header.push_back("pbr_n" + std::to_string(n));
    t.header.push_back("exact_n" + std::to_string(n));
  }
  for (int i = 1; i <= 99; ++i) {
    const double theta_hat = i / 100.0;
    if (!(theta_hat > phi)) continue;
    std::vector<double> row = {theta_hat};
    for (Count n : ns) {
      const double nd = static_cast<double>(n);
      const Count k = round_count(theta_hat * nd);
      if (k == 0 || k >= n || !(static_cast<double>(k) / nd > phi)) {
        row.push_back(kNaN);
        row.push_back(kNaN);
        continue;
      }
      const auto gap = LogPGap::compute(n, k, phi);
      row.push_back(gap.gap_pbr / std::log(nd));
      row.push_back(gap.gap_exact / std::log(nd));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table figure_endpoints(const FigureOptions& o) {
  const double theta_hat = o.theta.value_or(0.5);
  check_phi(theta_hat, "--theta");
  const auto level = level_from_flag(o.a.value_or(0.01));
  Table t;
  t.header = {"n", "exact", "ch", "pbr"};
  for (Count n : endpoint_ns(o.n.value_or(1000000))) {
    const Count k = round_count(theta_hat * static_cast<double>(n));
    if (k == 0 || k >= n) continue;
    t.rows.push_back({static_cast<double>(n), endpoint(TestKind::Exact, n, k, level).phi_endpoint,
                      endpoint(TestKind::ChernoffHoeffding, n, k, level).phi_endpoint,
                      endpoint(TestKind::PBR, n, k, level).phi_endpoint});
  }
  return t;
}

Table figure_deviations(double default_a, const FigureOptions& o) {
  const double theta_hat = o.theta.value_or(0.5);
  check_phi(theta_hat, "--theta");
  const auto level = level_from_flag(o.a.value_or(default_a));
  const double alpha = level.alpha();
  const double v = theta_hat * (1.0 - theta_hat);
  const double overlay_exact =
      alpha > std::log(2.0) ? inverse_neg_log_normal_tail(alpha) : kNaN;
  Table t;
  t.header = {"n",          "gamma_exact", "gamma_ch",    "gamma_pbr",
              "asymptotic_exact", "asymptotic_ch", "asymptotic_pbr"};
  for (Count n : endpoint_ns(o.n.value_or(1000000))) {
    const double nd = static_cast<double>(n);
    const Count k = round_count(theta_hat * nd);
    if (k == 0 || k >= n) continue;
    const double pbr_arg = 2.0 * alpha + 0.5 * std::log(nd) - 0.5 * std::log(2.0 * std::numbers::pi * v);
    t.rows.push_back({nd, gamma_deviation(endpoint(TestKind::Exact, n, k, level)),
                      gamma_deviation(endpoint(TestKind::ChernoffHoeffding, n, k, level)),
                      gamma_deviation(endpoint(TestKind::PBR, n, k, level)), overlay_exact,
                      std::sqrt(2.0 * alpha), pbr_arg > 0.0 ? std::sqrt(pbr_arg) : kNaN});
  }
  return t;
}

// ---------------------------------------------------------------------------
// verify-bounds

struct VerifyArgs {
  std::string out;
  std::vector<Count> ns;
  std::vector<double> phis;
  std::vector<double> levels;
  double exclusion_sds = 3.0;
  bool no_endpoints = false;
};

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  BoundGrid grid = BoundGrid::standard();
  if (!args.ns.empty()) grid.ns = args.ns;
  if (!args.phis.empty()) grid.phis = args.phis;
  if (!args.levels.empty()) grid.levels = args.levels;
  if (args.no_endpoints) grid.levels.clear();
  check_flag(args.exclusion_sds >= 0.0, "--exclusion-sds", "must be non-negative");
  grid.exclusion_sds = args.exclusion_sds;
  for (Count n : grid.ns) check_flag(n >= 2, "--ns", "entries must be at least 2");
  for (double phi : grid.phis) check_phi(phi, "--phis");
  for (double a : grid.levels) check_flag(a > 0.0 && a < 1.0, "--levels", "entries must lie in (0, 1)");

  const auto report = verify_bounds(grid);
  emit(args.out, out, [&](std::ostream& os) {
    os << "check,n,k,phi,a,value,lo,hi,pass\n";
    for (const auto& r : report.records) {
      os << join_csv({r.check, std::to_string(r.n), std::to_string(r.k), format_double(r.phi),
                      format_double(r.a), format_double(r.value), format_double(r.lo),
                      format_double(r.hi), r.pass ? "1" : "0"})
         << '\n';
    }
  });
  err << report.records.size() << " containments checked, " << report.failures << " failed, "
      << report.skipped << " endpoint points outside theorem hypotheses\n";
  return report.failures == 0 ? kOk : kAssertion;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string experiment;
  Count reps = 10000;
  std::uint64_t seed = 1;
  std::string generator = "iid";
  double theta = 0.5;
  std::string schedule;
  Count window = 10;
  double low = 0.1;
  double cap = 0.5;
  std::string rule = "fixed";
  Count n = 100;
  std::optional<double> threshold;
  double phi = 0.5;
  double a = 0.05;
  std::string evidence = "pbr-clamped";
  std::string test = "pbr";
  std::string gap = "pbr";
  std::string out;
};

Drifting parse_schedule(const std::string& text) {
  Drifting d;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw UsageError("--schedule entries must be INDEX:THETA");
    try {
      d.schedule.emplace_back(std::stoull(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::logic_error&) {
      throw UsageError("--schedule entry '" + item + "' is not INDEX:THETA");
    }
  }
  if (d.schedule.empty()) throw UsageError("--schedule is empty");
  return d;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
  check_flag(args.reps >= 1, "--reps", "must be at least 1");
  check_flag(args.n >= 1, "--n", "must be at least 1");
  check_phi(args.phi);
  const auto level = level_from_flag(args.a);

  ReplicationPlan plan;
  plan.reps = args.reps;
  plan.master_seed = args.seed;
  json gen_echo = {{"kind", args.generator}};
  if (args.generator == "iid") {
    check_phi(args.theta, "--theta");
    plan.generator = Iid{args.theta};
    gen_echo["theta"] = args.theta;
  } else if (args.generator == "drifting") {
    auto d = parse_schedule(args.schedule);
    json entries = json::array();
    for (const auto& [i, th] : d.schedule) entries.push_back({i, th});
    gen_echo["schedule"] = entries;
    plan.generator = std::move(d);
  } else if (args.generator == "past") {
    plan.generator = PastDependent{args.window, args.low, args.cap};
    gen_echo.update({{"window", args.window}, {"low", args.low}, {"cap", args.cap}});
  } else {
    throw UsageError("unknown --generator '" + args.generator + "'");
  }
  try {
    validate(plan.generator);
  } catch (const ConfigurationError& e) {
    throw UsageError(e.what());
  }

  const double threshold = args.threshold.value_or(level.alpha());
  json rule_echo = {{"kind", args.rule}};
  if (args.rule == "fixed") {
    plan.rule = FixedN{args.n};
    rule_echo["n"] = args.n;
  } else if (args.rule == "threshold") {
    plan.rule = ThresholdLogT{threshold, args.n};
    rule_echo.update({{"threshold", threshold}, {"max_n", args.n}});
  } else if (args.rule == "max") {
    plan.rule = MaxOverRun{args.n};
    rule_echo["max_n"] = args.n;
  } else {
    throw UsageError("unknown --rule '" + args.rule + "'");
  }

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "simulate";
  json config = {{"experiment", args.experiment}, {"reps", args.reps}, {"seed", args.seed},
                 {"generator", gen_echo}, {"rule", rule_echo}, {"phi", args.phi}, {"a", args.a}};
  json estimates;
  json assertions = json::array();
  bool all_pass = true;
  auto assertion = [&](const std::string& name, bool pass, bool asserted) {
    assertions.push_back({{"name", name}, {"pass", pass}, {"asserted", asserted}});
    if (asserted && !pass) all_pass = false;
  };

  if (args.experiment == "validity") {
    EvidenceSpec ev{parse_evidence(args.evidence), 0.5};
    config["evidence"] = args.evidence;
    const auto r = run_validity(plan, args.phi, level, ev);
    estimates = {{"rejection_rate", r.rate}, {"stderr", r.std_error}, {"rejections", r.hits}};
    const bool supermartingale = ev.kind == Evidence::PbrPoint || ev.kind == Evidence::PbrClamped ||
                                 ev.kind == Evidence::TrainedSplit;
    const bool fixed_iid = args.rule == "fixed" && args.generator == "iid";
    assertion("rejection_rate <= a + 3 stderr", r.rate <= args.a + 3.0 * r.std_error,
              supermartingale || fixed_iid);
  } else if (args.experiment == "coverage") {
    check_flag(args.rule == "fixed", "--rule", "must be fixed for coverage");
    const auto kind = kind_flag(args.test);
    config["test"] = args.test;
    const auto r = run_coverage(plan, kind, level);
    estimates = {{"coverage", r.rate}, {"stderr", r.std_error}, {"covered", r.hits}};
    assertion("coverage >= 1 - a - 3 stderr", r.rate >= 1.0 - args.a - 3.0 * r.std_error, true);
  } else if (args.experiment == "normality" || args.experiment == "gap-normality") {
    check_flag(args.rule == "fixed", "--rule", "must be fixed for normality");
    check_flag(args.generator == "iid", "--generator", "must be iid for normality");
    check_flag(args.phi < args.theta, "--phi", "must be below --theta for normality");
    NormalityReport r;
    double tolerance;
    if (args.experiment == "normality") {
      config["test"] = args.test;
      r = run_normality(plan, kind_flag(args.test), args.phi);
      tolerance = 0.05;
    } else {
      config["gap"] = args.gap;
      if (args.gap != "pbr" && args.gap != "exact") throw UsageError("--gap must be pbr or exact");
      r = run_gap_normality(plan, args.gap == "pbr" ? GapKind::Pbr : GapKind::Exact, args.phi);
      tolerance = 0.10;
    }
    estimates = {{"sample_mean", r.sample_mean},
                 {"sample_sd", r.sample_sd},
                 {"reference_sd", r.reference_sd},
                 {"ks_stat", r.ks_stat}};
    const double rel = std::fabs(r.sample_sd / r.reference_sd - 1.0);
    estimates["sd_relative_error"] = rel;
    std::ostringstream name;
    name << "sample_sd within " << tolerance * 100 << "% of reference_sd";
    assertion(name.str(), rel <= tolerance, true);
    assertion("ks_stat < 0.02", r.ks_stat < 0.02, false);
  } else {
    throw UsageError("unknown --experiment '" + args.experiment + "'");
  }

  doc["config"] = config;
  doc["estimates"] = estimates;
  doc["assertions"] = assertions;
  doc["pass"] = all_pass;
  emit(args.out, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  return all_pass ? kOk : kAssertion;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

TrialSequence parse_trials(std::istream& in) {
  TrialSequence seq;
  std::string line;
  Count line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string token;
    while (tokens >> token) {
      if (token == "0" || token == "1") {
        seq.push_back(token[0] - '0');
      } else {
        throw InputError("line " + std::to_string(line_no) + ": invalid token '" + token +
                         "' (expected 0 or 1)");
      }
    }
  }
  return seq;
}

void Table::write_csv(std::ostream& out) const {
  out << join_csv(header) << '\n';
  for (const auto& row : rows) {
    std::vector<std::string> fields;
    fields.reserve(row.size());
    for (double x : row) fields.push_back(format_double(x));
    out << join_csv(fields) << '\n';
  }
}

Table figure_table(int id, const FigureOptions& options) {
  switch (id) {
    case 1:
      return figure_pvalues(options);
    case 2:
      return figure_gaps(options);
    case 3:
      return figure_endpoints(options);
    case 4:
      return figure_deviations(0.1, options);
    case 5:
      return figure_deviations(0.01, options);
    case 6:
      return figure_deviations(0.001, options);
    default:
      throw UsageError("unknown figure id " + std::to_string(id) + " (expected 1..6)");
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bernoulli tests, test supermartingales and confidence endpoints", "seqcert"};
  app.require_subcommand(1);
  std::function<int()> action;

  PvalueArgs pv;
  auto* pvalue = app.add_subcommand("pvalue", "-log p for the exact, CH and PBR tests");
  pvalue->add_option("--test", pv.test, "exact, ch or pbr");
  pvalue->add_flag("--all", pv.all, "emit all three tests");
  pvalue->add_option("--n", pv.n, "number of trials")->required();
  pvalue->add_option("--successes", pv.successes, "number of successes")->required();
  pvalue->add_option("--phi", pv.phi, "null parameter")->required();
  pvalue->add_option("--format", pv.format)->check(CLI::IsMember({"csv", "json"}));
  pvalue->callback([&] { action = [&] { return cmd_pvalue(pv, out); }; });

  MartingaleArgs mg;
  auto* martingale = app.add_subcommand("martingale", "stream a 0/1 file through a test supermartingale");
  martingale->add_option("--phi", mg.phi)->required();
  martingale->add_option("--policy", mg.policy, "point, clamped or trained");
  martingale->add_option("--lambda", mg.lambda, "training fraction for --policy trained");
  martingale->add_option("--input", mg.input, "file of 0/1 tokens, or - for stdin")->required();
  martingale->add_flag("--emit-trajectory", mg.trajectory, "one CSV row per trial");
  martingale->add_option("--format", mg.format)->check(CLI::IsMember({"csv", "json"}));
  martingale->callback([&] { action = [&] { return cmd_martingale(mg, out); }; });

  EndpointArgs ep;
  auto* endpoint_cmd = app.add_subcommand("endpoint", "lower confidence endpoint by test inversion");
  endpoint_cmd->add_option("--test", ep.test, "exact, ch, pbr or trained");
  endpoint_cmd->add_option("--n", ep.n)->required();
  endpoint_cmd->add_option("--successes", ep.successes)->required();
  endpoint_cmd->add_option("--a", ep.a, "significance level");
  endpoint_cmd->add_option("--lambda", ep.lambda, "training fraction for the trained test");
  endpoint_cmd->add_option("--training-successes", ep.training_successes,
                           "successes among the training trials");
  endpoint_cmd->add_flag("--two-sided", ep.two_sided, "two-sided interval at level a");
  endpoint_cmd->add_option("--format", ep.format)->check(CLI::IsMember({"csv", "json"}));
  endpoint_cmd->callback([&] { action = [&] { return cmd_endpoint(ep, out); }; });

  int fig_id = 0;
  std::string fig_out;
  FigureOptions fig;
  auto* figure = app.add_subcommand("figure", "plot data as CSV");
  figure->add_option("--id", fig_id, "figure 1..6")->required();
  figure->add_option("--out", fig_out, "output file (default stdout)");
  figure->add_option("--n", fig.n, "trials (figs 1-2) or largest n (figs 3-6)");
  figure->add_option("--theta", fig.theta);
  figure->add_option("--a", fig.a);
  figure->add_option("--phi", fig.phi);
  figure->callback([&] {
    action = [&] {
      const auto table = figure_table(fig_id, fig);
      emit(fig_out, out, [&](std::ostream& os) { table.write_csv(os); });
      return static_cast<int>(kOk);
    };
  });

  VerifyArgs vb;
  auto* verify = app.add_subcommand("verify-bounds", "check every interval oracle on a grid");
  verify->add_option("--out", vb.out, "output file (default stdout)");
  verify->add_option("--ns", vb.ns)->delimiter(',');
  verify->add_option("--phis", vb.phis)->delimiter(',');
  verify->add_option("--levels", vb.levels)->delimiter(',');
  verify->add_option("--exclusion-sds", vb.exclusion_sds);
  verify->add_flag("--no-endpoints", vb.no_endpoints);
  verify->callback([&] { action = [&] { return cmd_verify(vb, out, err); }; });

  SimulateArgs sm;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo validity, coverage or normality");
  simulate->add_option("--experiment", sm.experiment, "validity, coverage, normality or gap-normality")
      ->required();
  simulate->add_option("--reps", sm.reps);
  simulate->add_option("--seed", sm.seed);
  simulate->add_option("--generator", sm.generator, "iid, drifting or past");
  simulate->add_option("--theta", sm.theta);
  simulate->add_option("--schedule", sm.schedule, "INDEX:THETA,... for the drifting generator");
  simulate->add_option("--window", sm.window);
  simulate->add_option("--low", sm.low);
  simulate->add_option("--cap", sm.cap);
  simulate->add_option("--rule", sm.rule, "fixed, threshold or max");
  simulate->add_option("--n", sm.n, "trials, or the horizon for threshold/max");
  simulate->add_option("--threshold", sm.threshold, "evidence threshold (default -log a)");
  simulate->add_option("--phi", sm.phi);
  simulate->add_option("--a", sm.a);
  simulate->add_option("--evidence", sm.evidence, "pbr-point, pbr-clamped, trained, exact or ch");
  simulate->add_option("--test", sm.test, "exact, ch or pbr");
  simulate->add_option("--gap", sm.gap, "pbr or exact");
  simulate->add_option("--out", sm.out, "output file (default stdout)");
  simulate->callback([&] { action = [&] { return cmd_simulate(sm, out); }; });

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("seqcert");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigurationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const HypothesisViolated& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  }
}

}  // namespace seqcert::cli
