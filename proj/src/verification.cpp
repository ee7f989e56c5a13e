#include "seqcert/verification.hpp"

#include <cmath>
#include <limits>

#include "seqcert/bounds.hpp"
#include "seqcert/intervals.hpp"
#include "seqcert/parallel.hpp"
#include "seqcert/pvalues.hpp"

namespace seqcert {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ContainmentRecord make(const char* check, Count n, Count k, double phi, double a, double value,
                       const BoundInterval& iv, double slack) {
  return {check, n, k, phi, a, value, iv.lo, iv.hi, iv.contains(value, slack)};
}

void sweep_h(Count n, std::vector<ContainmentRecord>& out) {
  for (Count k = 1; k < n; ++k) {
    out.push_back(make("hn", n, k, kNaN, kNaN, entropy_correction(n, k), hn_interval(n, k),
                       containment_slack(1.0)));
  }
}

void sweep_gaps(Count n, double phi, double exclusion_sds, std::vector<ContainmentRecord>& pbr,
                std::vector<ContainmentRecord>& x_ch, std::vector<ContainmentRecord>& x_pbr,
                std::vector<ContainmentRecord>& composed) {
  const double nd = static_cast<double>(n);
  const double radius = exclusion_sds * std::sqrt(phi * (1.0 - phi) / nd);
  for (Count k = 1; k < n; ++k) {
    const double t = static_cast<double>(k) / nd;
    if (!(t > phi)) continue;
    const auto gap = LogPGap::compute(n, k, phi);
    const double slack = containment_slack(gap.reference);
    pbr.push_back(make("pbr_minus_ch", n, k, phi, kNaN, gap.gap_pbr,
                       pbr_minus_ch_interval(n, k, phi), slack));
    if (t - phi < radius) continue;
    const auto x_pbr_iv = exact_minus_pbr_interval(n, k, phi);
    x_ch.push_back(make("exact_minus_ch", n, k, phi, kNaN, gap.gap_exact,
                        exact_minus_ch_interval(n, k, phi), slack));
    x_pbr.push_back(make("exact_minus_pbr", n, k, phi, kNaN, gap.gap_exact - gap.gap_pbr,
                         x_pbr_iv, slack));
    composed.push_back(make("exact_minus_ch_composed", n, k, phi, kNaN, gap.gap_exact,
                            x_pbr_iv + pbr_minus_ch_interval(n, k, phi), slack));
  }
}

void sweep_endpoints(Count n, TestKind kind, double a, std::vector<ContainmentRecord>& out,
                     Count& skipped) {
  const ConfidenceLevel level(a);
  const char* name = kind == TestKind::Exact               ? "endpoint_exact"
                     : kind == TestKind::ChernoffHoeffding ? "endpoint_ch"
                                                           : "endpoint_pbr";
  for (Count k = 1; k < n; ++k) {
    BoundInterval iv;
    try {
      iv = endpoint_theorem_interval(kind, n, k, level);
    } catch (const HypothesisViolated&) {
      ++skipped;
      continue;
    }
    const auto r = endpoint(kind, n, k, level);
    const double gamma = gamma_deviation(r);
    auto rec = make(name, n, k, kNaN, a, gamma, iv, containment_slack(1.0) * 10.0);
    rec.pass = rec.pass && r.converged();
    out.push_back(rec);
  }
}

}  // namespace

BoundGrid BoundGrid::standard() {
  BoundGrid g;
  g.ns = {10, 30, 100, 300, 1000, 10000};
  for (int i = 1; i <= 9; ++i) g.phis.push_back(i / 10.0);
  g.levels = {0.1, 0.01, 0.001};
  return g;
}

double containment_slack(double scale) { return 1e-10 + 1e-13 * std::fabs(scale); }

VerificationReport verify_bounds(const BoundGrid& grid) {
  for (Count n : grid.ns) {
    if (n < 2) throw DomainError("grid n must be at least 2");
  }
  for (double phi : grid.phis) require_open_probability(phi, "phi");
  for (double a : grid.levels) ConfidenceLevel{a};

  // One task per (n) for h_n, per (n, phi) for the gaps, and per
  // (kind, n, a) for endpoints; each writes only its own slots.
  const std::size_t nn = grid.ns.size();
  const std::size_t np = grid.phis.size();
  const std::size_t na = grid.levels.size();
  constexpr TestKind kinds[] = {TestKind::ChernoffHoeffding, TestKind::PBR, TestKind::Exact};

  std::vector<std::vector<ContainmentRecord>> h(nn);
  std::vector<std::vector<ContainmentRecord>> pbr(nn * np), xch(nn * np), xpbr(nn * np),
      comp(nn * np);
  std::vector<std::vector<ContainmentRecord>> ends(3 * nn * na);
  std::vector<Count> skipped(3 * nn * na, 0);

  const std::size_t gap_tasks = nn * np;
  const std::size_t end_tasks = 3 * nn * na;
  parallel_for(nn + gap_tasks + end_tasks, [&](std::size_t task) {
    if (task < nn) {
      sweep_h(grid.ns[task], h[task]);
      return;
    }
    task -= nn;
    if (task < gap_tasks) {
      const std::size_t i = task / np;
      const std::size_t j = task % np;
      sweep_gaps(grid.ns[i], grid.phis[j], grid.exclusion_sds, pbr[task], xch[task], xpbr[task],
                 comp[task]);
      return;
    }
    task -= gap_tasks;
    const std::size_t kind = task / (nn * na);
    const std::size_t rest = task % (nn * na);
    sweep_endpoints(grid.ns[rest / na], kinds[kind], grid.levels[rest % na], ends[task],
                    skipped[task]);
  });

  VerificationReport report;
  auto append = [&](const std::vector<std::vector<ContainmentRecord>>& parts) {
    for (const auto& part : parts) {
      for (const auto& r : part) {
        report.records.push_back(r);
        if (!r.pass) ++report.failures;
      }
    }
  };
  append(h);
  append(pbr);
  append(xch);
  append(xpbr);
  append(comp);
  append(ends);
  for (Count s : skipped) report.skipped += s;
  return report;
}

}  // namespace seqcert
