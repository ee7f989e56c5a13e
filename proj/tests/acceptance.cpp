// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "seqcert/bounds.hpp"
#include "seqcert/intervals.hpp"
#include "seqcert/montecarlo.hpp"
#include "seqcert/pvalues.hpp"
#include "seqcert/supermartingale.hpp"
#include "seqcert/verification.hpp"

using namespace seqcert;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome ordering() {
  long violations = 0;
  long checked = 0;
  for (Count n = 1; n <= 200; ++n) {
    for (Count k = 0; k <= n; ++k) {
      for (int j = 1; j <= 19; ++j) {
        const double phi = 0.05 * j;
        const double x = log_p_exact(n, k, phi).value();
        const double ch = log_p_ch(n, k, phi).value();
        const double pbr = log_p_pbr(n, k, phi).value();
        violations += (x < ch - 1e-10) + (ch < pbr - 1e-10);
        ++checked;
      }
    }
  }
  return {violations == 0, fmt("%ld triples, %ld violations", checked, violations)};
}

Outcome exact_brute_force() {
  double worst = 0.0;
  long checked = 0;
  for (unsigned n = 1; n <= 20; ++n) {
    for (unsigned k = 0; k <= n; ++k) {
      for (unsigned j = 1; j <= 9; ++j) {
        const double want = oracle::neg_log_upper_tail(n, k, j, 10);
        const double got = log_p_exact(n, k, j / 10.0).value();
        worst = std::max(worst, std::abs(got - want));
        ++checked;
      }
    }
  }
  return {worst <= 1e-12, fmt("%ld cases, max abs error %.3g", checked, worst)};
}

Outcome closed_form() {
  std::mt19937_64 rng(20261019);
  std::uniform_int_distribution<int> len(0, 500);
  std::uniform_real_distribution<double> unit(0.02, 0.98);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int n = len(rng);
    const double p = unit(rng);
    const double phi = unit(rng);
    std::bernoulli_distribution bit(p);
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = bit(rng);
    const auto [streamed, closed] = closed_form_check(TrialSequence(bits), phi);
    worst = std::max(worst, std::abs(streamed - closed));
  }
  return {worst <= 1e-10, fmt("1000 sequences, max abs difference %.3g", worst)};
}

Outcome containments() {
  const auto report = verify_bounds(BoundGrid::standard());
  return {report.failures == 0,
          fmt("%zu containments, %llu failures, %llu endpoint points outside hypotheses",
              report.records.size(), (unsigned long long)report.failures,
              (unsigned long long)report.skipped)};
}

std::size_t column(const cli::Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == name) return i;
  }
  throw std::runtime_error("missing column " + name);
}

Outcome figures() {
  bool pass = true;
  std::string detail;

  const auto fig2 = cli::figure_table(2);
  const auto th = column(fig2, "theta_hat");
  const auto pbr = column(fig2, "pbr_n10000");
  double worst2 = 0.0;
  int interior = 0;
  for (const auto& row : fig2.rows) {
    if (row[th] < 0.55 - 1e-12 || row[th] > 0.90 + 1e-12) continue;
    worst2 = std::max(worst2, std::abs(row[pbr] + 0.5));
    ++interior;
  }
  pass &= interior > 0 && worst2 <= 0.05;
  detail += fmt("fig2 max |gap+0.5| %.4f over %d interior points; ", worst2, interior);

  const auto fig3 = cli::figure_table(3);
  bool monotone = true;
  double last_dist = 0.0;
  for (std::size_t c = 1; c <= 3; ++c) {
    double prev = 1.0;
    for (const auto& row : fig3.rows) {
      const double d = std::abs(row[c] - 0.5);
      monotone &= d <= prev;
      prev = d;
    }
    last_dist = std::max(last_dist, prev);
  }
  pass &= monotone;
  detail += fmt("fig3 monotone %s, final distance %.4f; ", monotone ? "yes" : "no", last_dist);

  const auto fig1 = cli::figure_table(1);
  const auto med = column(fig1, "ch_median");
  const auto kl = column(fig1, "kl");
  double worst1 = 0.0;
  for (const auto& row : fig1.rows) worst1 = std::max(worst1, std::abs(row[med] - row[kl]));
  pass &= worst1 <= 1e-12;
  detail += fmt("fig1 max |median-KL| %.3g", worst1);
  return {pass, detail};
}

Outcome validity() {
  bool pass = true;
  std::string detail;
  for (double a : {0.05, 0.01}) {
    const ConfidenceLevel level(a);
    const std::vector<std::pair<const char*, StoppingRule>> rules = {
        {"threshold", ThresholdLogT{level.alpha(), 1000}}, {"max", MaxOverRun{1000}}};
    for (const auto& [name, rule] : rules) {
      const ReplicationPlan plan{100000, 7, Iid{0.5}, rule};
      const auto r = run_validity(plan, 0.5, level, {Evidence::PbrPoint, 0.5});
      const bool ok = r.rate <= a + 3 * r.std_error;
      pass &= ok;
      detail += fmt("a=%g %s rate %.5f (se %.5f); ", a, name, r.rate, r.std_error);
    }
  }
  return {pass, detail};
}

Outcome coverage() {
  bool pass = true;
  std::string detail;
  const ConfidenceLevel level(0.05);
  for (double theta : {0.3, 0.5, 0.8}) {
    const ReplicationPlan plan{100000, 11, Iid{theta}, FixedN{100}};
    const auto x = run_coverage(plan, TestKind::Exact, level);
    const auto ch = run_coverage(plan, TestKind::ChernoffHoeffding, level);
    const auto pb = run_coverage(plan, TestKind::PBR, level);
    for (const auto* r : {&x, &ch, &pb}) pass &= r->rate >= 0.95 - 3 * r->std_error;
    pass &= pb.rate >= ch.rate && ch.rate >= x.rate;
    detail += fmt("theta=%g exact %.4f ch %.4f pbr %.4f; ", theta, x.rate, ch.rate, pb.rate);
  }
  return {pass, detail};
}

Outcome normality() {
  bool pass = true;
  std::string detail;
  const ReplicationPlan plan{10000, 13, Iid{0.75}, FixedN{10000}};
  for (auto kind : {TestKind::Exact, TestKind::ChernoffHoeffding, TestKind::PBR}) {
    const auto r = run_normality(plan, kind, 0.25);
    pass &= std::abs(r.sample_sd / r.reference_sd - 1.0) <= 0.05;
    detail += fmt("gain %s sd %.4f/%.4f ks %.4f; ", std::string(to_string(kind)).c_str(),
                  r.sample_sd, r.reference_sd, r.ks_stat);
  }
  for (auto [kind, name] : {std::pair{GapKind::Pbr, "pbr"}, std::pair{GapKind::Exact, "exact"}}) {
    const auto r = run_gap_normality(plan, kind, 0.25);
    pass &= std::abs(r.sample_sd / r.reference_sd - 1.0) <= 0.10;
    detail += fmt("gap %s sd %.4f/%.4f ks %.4f; ", name, r.sample_sd, r.reference_sd, r.ks_stat);
  }
  return {pass, detail + "(ks reported only)"};
}

Outcome trained_endpoint() {
  // kappa = 0: both halves sit exactly at the overall frequency.
  const auto split = TrainedSplitState::from_counts(10000, 5000, 2500, 2500);
  const ConfidenceLevel level(0.01);
  const auto r = endpoint(split, level);
  const double target = std::sqrt(2 * level.alpha()) / std::sqrt(0.5);
  const double rel = std::abs(r.gamma / target - 1.0);
  return {r.converged() && rel <= 0.15,
          fmt("gamma %.5f vs %.5f (rel %.4f)", r.gamma, target, rel)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"ordering of the three p-values", ordering},
      {"exact tail against rational enumeration", exact_brute_force},
      {"streamed supermartingale against closed form", closed_form},
      {"bound and endpoint containments", containments},
      {"figure data", figures},
      {"validity under optional stopping", validity},
      {"coverage", coverage},
      {"asymptotic normality", normality},
      {"trained-split endpoint", trained_endpoint},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %zu: %s [%.1fs] %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
