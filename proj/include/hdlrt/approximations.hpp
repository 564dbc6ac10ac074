#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdlrt/lrt.hpp"

namespace hdlrt {

// Center and scale normalizing a log statistic to an asymptotic N(0,1):
// (log T - center)/scale. The scale already includes any n or (n-k) factor
// the limit theorem puts next to sigma_n.
struct CltParams {
  double center = 0.0;
  double scale = 0.0;
  bool theorem_domain_ok = true;
};

// How the classical chi-square statistic is assembled from the log statistic.
enum class ChiSquareForm {
  sample_scaled_rho,     // -(n-1) rho log V_n
  minus_two_rho,         // -2 rho log Lambda_n (or log Lambda*_n)
  correlation_bartlett,  // -(n - 1 - (2p+5)/6) log |R_n|
};

struct ChiSquareParams {
  double rho = 1.0;        // Bartlett correction factor (1 for the correlation form)
  double f = 0.0;          // degrees of freedom (exact integer value)
  ChiSquareForm form = ChiSquareForm::minus_two_rho;
  double multiplier = 0.0; // M such that the chi-square statistic is -M * stored log value
};

// Which denominator the Box correction of the equal-covariances test uses.
// `pooled` is the closed form; `per_group` substitutes the mean group size
// for the pooled size, matching a convention some published size/power tables
// were computed under. Only the equal-covariances chi-square reads this.
enum class RhoConvention { pooled, per_group };

CltParams clt_sphericity(long n, long p);
ChiSquareParams chisq_sphericity(long n, long p);

// Sample count N; the CLT parameters use r evaluated at N-1.
CltParams clt_block_independence(long n_samples, const BlockPartition& partition);
ChiSquareParams chisq_block_independence(long n_samples, const BlockPartition& partition);

CltParams clt_equal_distributions(std::span<const long> sizes, long p);
ChiSquareParams chisq_equal_distributions(std::span<const long> sizes, long p);

CltParams clt_equal_covariances(std::span<const long> sizes, long p);
ChiSquareParams chisq_equal_covariances(std::span<const long> sizes, long p,
                                        RhoConvention convention = RhoConvention::pooled);

CltParams clt_specified(long n, long p);
ChiSquareParams chisq_specified(long n, long p);

// Default gate n >= p + 5; with allow_relaxed_domain the gate drops to
// n >= p + 2 (where the variance is still defined) and theorem_domain_ok is
// cleared so callers can warn.
CltParams clt_complete_independence(long n, long p, bool allow_relaxed_domain = false);
ChiSquareParams chisq_complete_independence(long n, long p);

struct CltSide {
  CltParams params;
  double z = 0.0;
  double p_value = 0.0;  // left tail: small statistics reject
};

struct ChiSquareSide {
  ChiSquareParams params;
  double statistic = 0.0;
  double p_value = 0.0;  // upper tail
};

struct TestOutcome {
  LogStatistic statistic;
  std::optional<CltSide> clt;  // absent when the theorem domain fails
  ChiSquareSide chisq;
  std::vector<std::string> warnings;
};

struct EvaluateOptions {
  bool force_domain = false;  // relax the complete-independence gate to n >= p+2
  RhoConvention rho_convention = RhoConvention::pooled;
};

// Fill both approximations for a computed statistic. Theorem-domain failures
// on the CLT side become warnings; the chi-square side is always reported
// (with a warning and no p-value in the degenerate f = 0 case).
TestOutcome evaluate(const LogStatistic& statistic, const EvaluateOptions& options = {});

}  // namespace hdlrt
