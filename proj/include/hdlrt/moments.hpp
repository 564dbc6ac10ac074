#pragma once

#include <span>
#include <vector>

#include "hdlrt/lrt.hpp"

namespace hdlrt {

// Shape of a null model: sizes is {n} for the single-sample kinds, the group
// sizes for the k-sample kinds; partition only for block independence (p is
// then its total).
struct MomentShape {
  std::vector<long> sizes;
  long p = 0;
  std::vector<long> partition;
};

struct MomentQuery {
  TestKind kind;
  MomentShape shape;
  double t = 0.0;  // exponent
};

// Exact finite-sample log moments log E[T^t] of each statistic under the
// null, from the closed Wishart-moment formulas. All return 0 at t = 0 and
// throw DomainError outside the open exponent domains.
double log_moment_sphericity(long n, long p, double h);
double log_moment_block_independence(long n_samples, const BlockPartition& partition, double t);
double log_moment_equal_distributions(std::span<const long> sizes, long p, double t);
double log_moment_equal_covariances(std::span<const long> sizes, long p, double h);
double log_moment_specified(long n, long p, double t);
double log_moment_complete_independence(long n, long p, double t);

double log_moment(const MomentQuery& query);

// One point of the deterministic moment-generating-function check:
// deviation = |log E exp{s (T - center)/scale} - s^2/2| with (center, scale)
// from the matching CLT parameters, evaluated exactly from the log moments.
struct MgfDeviation {
  MomentShape shape;
  double deviation = 0.0;
};

std::vector<MgfDeviation> mgf_convergence_check(TestKind kind,
                                                std::span<const MomentShape> shapes, double s);

}  // namespace hdlrt
