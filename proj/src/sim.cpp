#include "hdlrt/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <thread>

#include "hdlrt/special.hpp"

namespace hdlrt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Static contiguous split; fn(chunk_index, lo, hi). Chunk indices are stable,
// so per-chunk accumulators can be reduced in a deterministic order.
void parallel_chunks(long begin, long end, int workers,
                     const std::function<void(int, long, long)>& fn) {
  const long total = end - begin;
  if (total <= 0) return;
  int n_threads = std::max(1, workers);
  n_threads = static_cast<int>(std::min<long>(n_threads, total));
  const long chunk = (total + n_threads - 1) / n_threads;
  if (n_threads == 1) {
    fn(0, begin, end);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int w = 0; w < n_threads; ++w) {
    const long lo = begin + w * chunk;
    const long hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(fn, w, lo, hi);
  }
  for (auto& t : pool) t.join();
}

SymmetricMatrix build_cov(const AlternativeConstruction& c, long p) {
  const std::size_t pp = static_cast<std::size_t>(p);
  Matrix m(pp, pp);
  if (const auto* spike = std::get_if<DiagSpike>(&c)) {
    const long count = spike->count < 0 ? p / 2 : spike->count;
    if (count > p) throw DomainError("diag_spike count exceeds the dimension");
    for (std::size_t i = 0; i < pp; ++i)
      m(i, i) = static_cast<long>(i) < count ? spike->value : 1.0;
  } else if (const auto* eq = std::get_if<Equicorrelated>(&c)) {
    for (std::size_t i = 0; i < pp; ++i)
      for (std::size_t j = 0; j < pp; ++j) m(i, j) = eq->a + (i == j ? eq->b : 0.0);
  } else if (const auto* sc = std::get_if<ScaledIdentity>(&c)) {
    for (std::size_t i = 0; i < pp; ++i) m(i, i) = sc->c;
  } else if (const auto* bd = std::get_if<Banded>(&c)) {
    for (std::size_t i = 0; i < pp; ++i) {
      for (std::size_t j = 0; j < pp; ++j) {
        const long d = std::labs(static_cast<long>(i) - static_cast<long>(j));
        m(i, j) = d == 0 ? bd->diag : (d <= bd->bandwidth ? bd->off : 0.0);
      }
    }
  }
  return SymmetricMatrix(std::move(m));
}

std::vector<double> build_mean(const AlternativeConstruction& c, long p) {
  std::vector<double> mean(static_cast<std::size_t>(p), 0.0);
  if (const auto* eq = std::get_if<Equicorrelated>(&c)) {
    std::fill(mean.begin(), mean.end(), eq->mean_shift);
  } else if (const auto* bd = std::get_if<Banded>(&c)) {
    if (bd->half_mean) {
      for (long i = 0; i < p / 2; ++i) mean[static_cast<std::size_t>(i)] = *bd->half_mean;
    }
  }
  return mean;
}

}  // namespace

std::vector<LawSpec> AlternativeSpec::materialize(long p, std::size_t group_count) const {
  if (per_group.empty()) throw DomainError("alternative has no constructions");
  if (per_group.size() != 1 && per_group.size() != group_count) {
    throw DimensionMismatch("alternative must give one construction or one per group");
  }
  std::vector<LawSpec> laws;
  laws.reserve(group_count);
  for (std::size_t g = 0; g < group_count; ++g) {
    const AlternativeConstruction& c = per_group.size() == 1 ? per_group[0] : per_group[g];
    SymmetricMatrix cov = build_cov(c, p);
    CholeskyFactor::compute(cov);  // SPD check at construction
    laws.push_back({build_mean(c, p), std::move(cov)});
  }
  return laws;
}

DataMatrix sample_mvn(long n, std::span<const double> mean, const SymmetricMatrix& cov, Rng& rng) {
  if (mean.size() != cov.dim()) {
    throw DimensionMismatch("mean and covariance dimensions differ");
  }
  const CholeskyFactor chol = CholeskyFactor::compute(cov);
  const std::size_t p = cov.dim();
  Matrix out(static_cast<std::size_t>(n), p);
  std::vector<double> z(p);
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    for (auto& v : z) v = rng.normal();
    const Matrix& L = chol.lower();
    for (std::size_t j = 0; j < p; ++j) {
      double s = mean[j];
      for (std::size_t k = 0; k <= j; ++k) s += L(j, k) * z[k];
      out(i, j) = s;
    }
  }
  return DataMatrix(std::move(out));
}

namespace {

// Identity-covariance fast path shared by the Monte Carlo loops.
struct PreparedLaw {
  std::vector<double> mean;
  std::optional<CholeskyFactor> chol;  // absent for N(mean, I)
};

PreparedLaw prepare_law(const LawSpec& law) {
  const std::size_t p = law.cov.dim();
  bool is_identity = true;
  for (std::size_t i = 0; i < p && is_identity; ++i) {
    for (std::size_t j = 0; j < p && is_identity; ++j) {
      if (law.cov(i, j) != (i == j ? 1.0 : 0.0)) is_identity = false;
    }
  }
  PreparedLaw out{law.mean, std::nullopt};
  if (!is_identity) out.chol = CholeskyFactor::compute(law.cov);
  return out;
}

Matrix sample_rows(long n, const PreparedLaw& law, Rng& rng) {
  const std::size_t p = law.mean.size();
  Matrix out(static_cast<std::size_t>(n), p);
  std::vector<double> z(p);
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    auto row = out.row(i);
    if (!law.chol) {
      for (std::size_t j = 0; j < p; ++j) row[j] = law.mean[j] + rng.normal();
    } else {
      for (auto& v : z) v = rng.normal();
      const Matrix& L = law.chol->lower();
      for (std::size_t j = 0; j < p; ++j) {
        double s = law.mean[j];
        for (std::size_t k = 0; k <= j; ++k) s += L(j, k) * z[k];
        row[j] = s;
      }
    }
  }
  return out;
}

LogStatistic compute_statistic(TestKind kind, std::span<const long> sizes, long p,
                               std::span<const long> partition,
                               const std::vector<PreparedLaw>& laws, Rng& rng) {
  switch (kind) {
    case TestKind::sphericity:
      return stat_sphericity(DataMatrix(sample_rows(sizes[0], laws[0], rng)));
    case TestKind::block_independence: {
      BlockPartition parts(std::vector<long>(partition.begin(), partition.end()));
      return stat_block_independence(DataMatrix(sample_rows(sizes[0], laws[0], rng)), parts);
    }
    case TestKind::equal_distributions:
    case TestKind::equal_covariances: {
      std::vector<DataMatrix> groups;
      groups.reserve(sizes.size());
      for (std::size_t g = 0; g < sizes.size(); ++g) {
        groups.emplace_back(sample_rows(sizes[g], laws[g], rng));
      }
      GroupedSamples grouped(std::move(groups));
      return kind == TestKind::equal_distributions ? stat_equal_distributions(grouped)
                                                   : stat_equal_covariances(grouped);
    }
    case TestKind::specified: {
      // The null is N(0, I); whitening is the identity transform here.
      return stat_specified(DataMatrix(sample_rows(sizes[0], laws[0], rng)),
                            std::vector<double>(static_cast<std::size_t>(p), 0.0),
                            SymmetricMatrix::identity(static_cast<std::size_t>(p)));
    }
    case TestKind::complete_independence:
      return stat_complete_independence(DataMatrix(sample_rows(sizes[0], laws[0], rng)));
  }
  throw DomainError("unknown test kind");
}

struct DecisionRules {
  CltParams clt;
  ChiSquareParams chisq;
};

DecisionRules rules_for(const Scenario& s) {
  LogStatistic probe;
  probe.kind = s.kind;
  probe.p = s.p;
  probe.partition = s.partition;
  probe.group_sizes = s.sizes.size() > 1 ? s.sizes : std::vector<long>{};
  probe.n = 0;
  for (long ni : s.sizes) probe.n += ni;

  DecisionRules rules;
  switch (s.kind) {
    case TestKind::sphericity:
      rules.clt = clt_sphericity(probe.n, s.p);
      rules.chisq = chisq_sphericity(probe.n, s.p);
      break;
    case TestKind::block_independence: {
      BlockPartition parts(s.partition);
      rules.clt = clt_block_independence(probe.n, parts);
      rules.chisq = chisq_block_independence(probe.n, parts);
      break;
    }
    case TestKind::equal_distributions:
      rules.clt = clt_equal_distributions(s.sizes, s.p);
      rules.chisq = chisq_equal_distributions(s.sizes, s.p);
      break;
    case TestKind::equal_covariances:
      rules.clt = clt_equal_covariances(s.sizes, s.p);
      rules.chisq = chisq_equal_covariances(s.sizes, s.p, s.rho_convention);
      break;
    case TestKind::specified:
      rules.clt = clt_specified(probe.n, s.p);
      rules.chisq = chisq_specified(probe.n, s.p);
      break;
    case TestKind::complete_independence:
      rules.clt = clt_complete_independence(probe.n, s.p);
      rules.chisq = chisq_complete_independence(probe.n, s.p);
      break;
  }
  return rules;
}

void validate_scenario(const Scenario& s) {
  if (s.iterations < 1) throw DomainError("scenario needs iterations >= 1");
  if (!(s.alpha > 0.0) || !(s.alpha < 1.0)) {
    // alpha == 1 is allowed only as the degenerate always-reject rule.
    if (s.alpha != 1.0) throw DomainError("alpha must lie in (0, 1]");
  }
  if (s.sizes.empty()) throw DomainError("scenario needs at least one sample size");
  const bool grouped =
      s.kind == TestKind::equal_distributions || s.kind == TestKind::equal_covariances;
  if (grouped && s.sizes.size() < 2) {
    throw DomainError("k-sample scenarios need at least two group sizes");
  }
  if (!grouped && s.sizes.size() != 1) {
    throw DomainError("single-sample scenarios take exactly one size");
  }
  if (s.kind == TestKind::block_independence) {
    BlockPartition parts(s.partition);
    if (parts.total() != s.p) {
      throw PartitionMismatch("partition sums to " + std::to_string(parts.total()) +
                              " but p=" + std::to_string(s.p));
    }
  }
}

struct PhaseCounts {
  long reject_clt = 0;
  long reject_chisq = 0;
  long excluded = 0;
};

PhaseCounts run_phase(const Scenario& s, const DecisionRules& rules,
                      const std::vector<PreparedLaw>& laws, std::uint64_t phase, int workers) {
  const int n_threads = std::max(1, workers);
  std::vector<PhaseCounts> per_chunk(static_cast<std::size_t>(n_threads));

  parallel_chunks(0, s.iterations, n_threads, [&](int chunk_idx, long lo, long hi) {
    PhaseCounts counts;
    for (long iter = lo; iter < hi; ++iter) {
      Rng rng = Rng::for_stream(s.seed, phase, static_cast<std::uint64_t>(iter));
      double value;
      try {
        value = compute_statistic(s.kind, s.sizes, s.p, s.partition, laws, rng).value;
      } catch (const NotPositiveDefinite&) {
        ++counts.excluded;
        continue;
      }
      const double z = (value - rules.clt.center) / rules.clt.scale;
      if (normal_cdf(z) <= s.alpha) ++counts.reject_clt;
      const double chisq_stat = -rules.chisq.multiplier * value;
      if (chisq_stat >= 0.0 && rules.chisq.f > 0.0 &&
          chi_square_sf(chisq_stat, rules.chisq.f) <= s.alpha) {
        ++counts.reject_chisq;
      }
    }
    per_chunk[static_cast<std::size_t>(chunk_idx)] = counts;
  });

  PhaseCounts total;
  for (const PhaseCounts& c : per_chunk) {
    total.reject_clt += c.reject_clt;
    total.reject_chisq += c.reject_chisq;
    total.excluded += c.excluded;
  }
  return total;
}

std::string render_shape(const Scenario& s) {
  std::string shape = "n=";
  for (std::size_t i = 0; i < s.sizes.size(); ++i) {
    if (i) shape += "+";
    shape += std::to_string(s.sizes[i]);
  }
  shape += ",p=" + std::to_string(s.p);
  if (!s.partition.empty()) {
    shape += ",blocks=";
    for (std::size_t i = 0; i < s.partition.size(); ++i) {
      if (i) shape += "+";
      shape += std::to_string(s.partition[i]);
    }
  }
  return shape;
}

double proportion_stderr(double q, long n) {
  return std::sqrt(q * (1.0 - q) / static_cast<double>(n));
}

}  // namespace

SimulationReport run_scenario(const Scenario& scenario, int workers) {
  const auto start = std::chrono::steady_clock::now();
  validate_scenario(scenario);
  const DecisionRules rules = rules_for(scenario);

  std::vector<LawSpec> null_laws;
  for (std::size_t g = 0; g < scenario.sizes.size(); ++g) {
    null_laws.push_back({std::vector<double>(static_cast<std::size_t>(scenario.p), 0.0),
                         SymmetricMatrix::identity(static_cast<std::size_t>(scenario.p))});
  }
  std::vector<PreparedLaw> null_prepared;
  for (const LawSpec& law : null_laws) null_prepared.push_back(prepare_law(law));

  SimulationReport report;
  report.scenario_id = scenario.id;
  report.kind = scenario.kind;
  report.shape = render_shape(scenario);
  report.iterations = scenario.iterations;
  report.seed = scenario.seed;

  const PhaseCounts h0 = run_phase(scenario, rules, null_prepared, 0, workers);
  const long h0_kept = scenario.iterations - h0.excluded;
  report.size_clt = h0_kept > 0 ? static_cast<double>(h0.reject_clt) / h0_kept : kNaN;
  report.size_chisq = h0_kept > 0 ? static_cast<double>(h0.reject_chisq) / h0_kept : kNaN;
  report.stderr_size_clt = h0_kept > 0 ? proportion_stderr(report.size_clt, h0_kept) : kNaN;
  report.stderr_size_chisq = h0_kept > 0 ? proportion_stderr(report.size_chisq, h0_kept) : kNaN;
  report.excluded_count = h0.excluded;
  report.power_clt = kNaN;
  report.power_chisq = kNaN;
  report.stderr_power_clt = kNaN;
  report.stderr_power_chisq = kNaN;

  if (scenario.alternative) {
    std::vector<LawSpec> alt_laws =
        scenario.alternative->materialize(scenario.p, scenario.sizes.size());
    std::vector<PreparedLaw> alt_prepared;
    for (const LawSpec& law : alt_laws) alt_prepared.push_back(prepare_law(law));
    const PhaseCounts ha = run_phase(scenario, rules, alt_prepared, 1, workers);
    const long ha_kept = scenario.iterations - ha.excluded;
    report.power_clt = ha_kept > 0 ? static_cast<double>(ha.reject_clt) / ha_kept : kNaN;
    report.power_chisq = ha_kept > 0 ? static_cast<double>(ha.reject_chisq) / ha_kept : kNaN;
    report.stderr_power_clt = ha_kept > 0 ? proportion_stderr(report.power_clt, ha_kept) : kNaN;
    report.stderr_power_chisq =
        ha_kept > 0 ? proportion_stderr(report.power_chisq, ha_kept) : kNaN;
    report.excluded_count += ha.excluded;
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

LogStatistic sample_null_statistic(TestKind kind, std::span<const long> sizes, long p,
                                   std::span<const long> partition, Rng& rng) {
  std::vector<PreparedLaw> laws(sizes.size());
  for (auto& law : laws) {
    law.mean.assign(static_cast<std::size_t>(p), 0.0);
  }
  return compute_statistic(kind, sizes, p, partition, laws, rng);
}

StandardizedSamples export_standardized_samples(const Scenario& scenario, int workers) {
  validate_scenario(scenario);
  const DecisionRules rules = rules_for(scenario);

  std::vector<PreparedLaw> laws(scenario.sizes.size());
  for (auto& law : laws) law.mean.assign(static_cast<std::size_t>(scenario.p), 0.0);

  std::vector<double> clt(static_cast<std::size_t>(scenario.iterations), kNaN);
  std::vector<double> chisq(static_cast<std::size_t>(scenario.iterations), kNaN);
  parallel_chunks(0, scenario.iterations, std::max(1, workers), [&](int, long lo, long hi) {
    for (long iter = lo; iter < hi; ++iter) {
      Rng rng = Rng::for_stream(scenario.seed, 0, static_cast<std::uint64_t>(iter));
      try {
        const double value =
            compute_statistic(scenario.kind, scenario.sizes, scenario.p, scenario.partition, laws,
                              rng)
                .value;
        clt[static_cast<std::size_t>(iter)] = (value - rules.clt.center) / rules.clt.scale;
        chisq[static_cast<std::size_t>(iter)] = -rules.chisq.multiplier * value;
      } catch (const NotPositiveDefinite&) {
        // excluded; the NaN slot is dropped below
      }
    }
  });

  StandardizedSamples out;
  out.clt.reserve(clt.size());
  out.chisq.reserve(chisq.size());
  for (std::size_t i = 0; i < clt.size(); ++i) {
    if (!std::isnan(clt[i])) {
      out.clt.push_back(clt[i]);
      out.chisq.push_back(chisq[i]);
    }
  }
  return out;
}

MomentMcResult monte_carlo_moment_check(const MomentQuery& query, long iterations,
                                        std::uint64_t seed, int workers) {
  const double formula_log = log_moment(query);
  const int n_threads = std::max(1, workers);

  struct Acc {
    double sum = 0.0;
    double sum_sq = 0.0;
    long n = 0;
  };
  std::vector<Acc> per_chunk(static_cast<std::size_t>(n_threads));

  parallel_chunks(0, iterations, n_threads, [&](int chunk_idx, long lo, long hi) {
    Acc acc;
    for (long iter = lo; iter < hi; ++iter) {
      Rng rng = Rng::for_stream(seed, 2, static_cast<std::uint64_t>(iter));
      const LogStatistic stat = sample_null_statistic(
          query.kind, query.shape.sizes, query.shape.p, query.shape.partition, rng);
      const double x = std::exp(query.t * stat.value);
      acc.sum += x;
      acc.sum_sq += x * x;
      acc.n += 1;
    }
    per_chunk[static_cast<std::size_t>(chunk_idx)] = acc;
  });

  Acc total;
  for (const Acc& a : per_chunk) {
    total.sum += a.sum;
    total.sum_sq += a.sum_sq;
    total.n += a.n;
  }
  MomentMcResult out;
  out.formula = std::exp(formula_log);
  out.mc_mean = total.sum / static_cast<double>(total.n);
  const double var =
      (total.sum_sq - total.sum * total.sum / static_cast<double>(total.n)) /
      (static_cast<double>(total.n) - 1.0);
  out.mc_stderr = std::sqrt(std::max(0.0, var) / static_cast<double>(total.n));
  out.deviation_sigmas = std::abs(out.mc_mean - out.formula) / out.mc_stderr;
  return out;
}

std::string report_tsv_header() {
  return "scenario\tkind\tshape\tsize_clt\tsize_chisq\tpower_clt\tpower_chisq\tstderr\t"
         "excluded\tseed";
}

namespace {

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string report_tsv_row(const SimulationReport& r) {
  double max_stderr = 0.0;
  for (double s : {r.stderr_size_clt, r.stderr_size_chisq, r.stderr_power_clt,
                   r.stderr_power_chisq}) {
    if (!std::isnan(s)) max_stderr = std::max(max_stderr, s);
  }
  std::string row = r.scenario_id;
  row += "\t" + to_string(r.kind);
  row += "\t" + r.shape;
  row += "\t" + format_g17(r.size_clt);
  row += "\t" + format_g17(r.size_chisq);
  row += "\t" + format_g17(r.power_clt);
  row += "\t" + format_g17(r.power_chisq);
  row += "\t" + format_g17(max_stderr);
  row += "\t" + std::to_string(r.excluded_count);
  row += "\t" + std::to_string(r.seed);
  return row;
}

}  // namespace hdlrt
