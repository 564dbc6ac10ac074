#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hdlrt/approximations.hpp"
#include "hdlrt/lrt.hpp"
#include "hdlrt/moments.hpp"
#include "hdlrt/rng.hpp"

namespace hdlrt {

// One group's sampling law.
struct LawSpec {
  std::vector<double> mean;
  SymmetricMatrix cov;
};

// Structured alternative constructions. Sigma built by each:
//   DiagSpike:      diag(v, ..., v, 1, ..., 1) with `count` copies of v
//                   (count < 0 means floor(p/2))
//   Equicorrelated: a * J_p + b * I_p, optional constant mean shift
//   ScaledIdentity: c * I_p
//   Banded:         `diag` on the diagonal, `off` within the bandwidth;
//                   optional mean of `half_mean` on the first floor(p/2)
//                   coordinates
struct DiagSpike {
  double value = 1.0;
  long count = -1;
};
struct Equicorrelated {
  double a = 0.0;
  double b = 1.0;
  double mean_shift = 0.0;
};
struct ScaledIdentity {
  double c = 1.0;
};
struct Banded {
  double diag = 1.0;
  double off = 0.0;
  long bandwidth = 0;
  std::optional<double> half_mean;
};
using AlternativeConstruction = std::variant<DiagSpike, Equicorrelated, ScaledIdentity, Banded>;

struct AlternativeSpec {
  // One entry applied to every group, or exactly one entry per group.
  std::vector<AlternativeConstruction> per_group;

  // Build the per-group laws; every covariance is Cholesky-checked SPD.
  std::vector<LawSpec> materialize(long p, std::size_t group_count) const;
};

struct Scenario {
  std::string id;
  TestKind kind = TestKind::sphericity;
  std::vector<long> sizes;      // one entry for single-sample kinds
  long p = 0;
  std::vector<long> partition;  // block independence only
  std::optional<AlternativeSpec> alternative;
  double alpha = 0.05;
  long iterations = 10000;
  std::uint64_t seed = 1;
  RhoConvention rho_convention = RhoConvention::pooled;
};

struct SimulationReport {
  std::string scenario_id;
  TestKind kind = TestKind::sphericity;
  std::string shape;  // rendered shape, e.g. "n=100,p=60"
  double size_clt = 0.0;
  double size_chisq = 0.0;
  double power_clt = 0.0;    // NaN when the scenario has no alternative
  double power_chisq = 0.0;  // NaN likewise
  double stderr_size_clt = 0.0;
  double stderr_size_chisq = 0.0;
  double stderr_power_clt = 0.0;
  double stderr_power_chisq = 0.0;
  long excluded_count = 0;  // singular iterations, all phases
  long iterations = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

// n i.i.d. N_p(mean, cov) rows via the Cholesky factor of cov.
DataMatrix sample_mvn(long n, std::span<const double> mean, const SymmetricMatrix& cov, Rng& rng);

// Draw one null-hypothesis statistic for the given shape.
LogStatistic sample_null_statistic(TestKind kind, std::span<const long> sizes, long p,
                                   std::span<const long> partition, Rng& rng);

// Estimate size (and power, when an alternative is present) of both decision
// rules. Deterministic for a fixed seed regardless of `workers`.
SimulationReport run_scenario(const Scenario& scenario, int workers);

struct StandardizedSamples {
  std::vector<double> clt;    // (log T - center)/scale per iteration
  std::vector<double> chisq;  // the chi-square-form statistic per iteration
};

// Null-hypothesis sampling of the standardized statistic for histogram /
// distribution checks.
StandardizedSamples export_standardized_samples(const Scenario& scenario, int workers);

// Formula-vs-Monte-Carlo moment comparison: mean of T^t over `iterations`
// null draws against exp(log_moment).
struct MomentMcResult {
  double formula = 0.0;    // exp(log E T^t)
  double mc_mean = 0.0;    // Monte Carlo mean of T^t
  double mc_stderr = 0.0;  // standard error of that mean
  double deviation_sigmas = 0.0;
};
MomentMcResult monte_carlo_moment_check(const MomentQuery& query, long iterations,
                                        std::uint64_t seed, int workers);

std::string report_tsv_header();
std::string report_tsv_row(const SimulationReport& report);

}  // namespace hdlrt
