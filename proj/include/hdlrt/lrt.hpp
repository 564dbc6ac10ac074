#pragma once

#include <span>
#include <string>
#include <vector>

#include "hdlrt/linalg.hpp"

namespace hdlrt {

enum class TestKind {
  sphericity,             // covariance proportional to the identity
  block_independence,     // independence of k blocks of variates
  equal_distributions,    // k normal populations identical
  equal_covariances,      // k covariance matrices equal (Bartlett-modified)
  specified,              // mean zero and identity covariance
  complete_independence,  // correlation matrix equal to the identity
};

std::string to_string(TestKind kind);
TestKind test_kind_from_string(const std::string& name);

// Split (p_1, ..., p_k) of the variate range, k >= 2, every part >= 1.
class BlockPartition {
public:
  explicit BlockPartition(std::vector<long> sizes);

  std::span<const long> sizes() const { return sizes_; }
  std::size_t count() const { return sizes_.size(); }
  long total() const { return total_; }

private:
  std::vector<long> sizes_;
  long total_ = 0;
};

// k >= 2 samples sharing a common dimension p.
class GroupedSamples {
public:
  explicit GroupedSamples(std::vector<DataMatrix> groups);

  const std::vector<DataMatrix>& groups() const { return groups_; }
  std::size_t count() const { return groups_.size(); }
  std::size_t p() const { return groups_.front().p(); }
  std::vector<long> sizes() const;
  long total_size() const;

private:
  std::vector<DataMatrix> groups_;
};

// A log-scale test statistic, with the shape data the approximations need.
struct LogStatistic {
  TestKind kind;
  double value = 0.0;            // natural log of the statistic
  long n = 0;                    // sample count (total over groups)
  long p = 0;
  std::vector<long> partition;   // block_independence only
  std::vector<long> group_sizes; // k-sample kinds only
};

// log V_n = log|A| - p log(tr(A)/p), the sphericity LRT on the log scale.
LogStatistic stat_sphericity(const DataMatrix& data);

// log W_n = log|A| - sum_i log|A_ii| over the partition's diagonal blocks.
LogStatistic stat_block_independence(const DataMatrix& data, const BlockPartition& partition);

// log Lambda_n for identity of k normal populations.
LogStatistic stat_equal_distributions(const GroupedSamples& samples);

// log Lambda*_n, the Bartlett-modified statistic for equality of k covariances.
LogStatistic stat_equal_covariances(const GroupedSamples& samples);

// log Lambda_n for a fully specified mean and covariance. Data are whitened
// with the Cholesky factor of sigma0 before the statistic is formed.
LogStatistic stat_specified(const DataMatrix& data, std::span<const double> mu0,
                            const SymmetricMatrix& sigma0);

// log |R_n| of the sample correlation matrix.
LogStatistic stat_complete_independence(const DataMatrix& data);

}  // namespace hdlrt
