#include "hdlrt/lrt.hpp"

#include <cmath>
#include <utility>

namespace hdlrt {

std::string to_string(TestKind kind) {
  switch (kind) {
    case TestKind::sphericity: return "sphericity";
    case TestKind::block_independence: return "block_independence";
    case TestKind::equal_distributions: return "equal_distributions";
    case TestKind::equal_covariances: return "equal_covariances";
    case TestKind::specified: return "specified";
    case TestKind::complete_independence: return "complete_independence";
  }
  return "unknown";
}

TestKind test_kind_from_string(const std::string& name) {
  if (name == "sphericity") return TestKind::sphericity;
  if (name == "block_independence") return TestKind::block_independence;
  if (name == "equal_distributions") return TestKind::equal_distributions;
  if (name == "equal_covariances") return TestKind::equal_covariances;
  if (name == "specified") return TestKind::specified;
  if (name == "complete_independence") return TestKind::complete_independence;
  throw DomainError("unknown test kind '" + name + "'");
}

BlockPartition::BlockPartition(std::vector<long> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) {
    throw PartitionMismatch("a block partition needs at least two blocks, got " +
                            std::to_string(sizes_.size()));
  }
  for (long s : sizes_) {
    if (s < 1) throw PartitionMismatch("block sizes must be positive");
    total_ += s;
  }
}

GroupedSamples::GroupedSamples(std::vector<DataMatrix> groups) : groups_(std::move(groups)) {
  if (groups_.size() < 2) {
    throw InvalidData("grouped samples need at least two groups, got " +
                      std::to_string(groups_.size()));
  }
  const std::size_t p = groups_.front().p();
  for (const DataMatrix& g : groups_) {
    if (g.p() != p) {
      throw DimensionMismatch("all groups must share the same dimension");
    }
  }
}

std::vector<long> GroupedSamples::sizes() const {
  std::vector<long> s;
  s.reserve(groups_.size());
  for (const DataMatrix& g : groups_) s.push_back(static_cast<long>(g.n()));
  return s;
}

long GroupedSamples::total_size() const {
  long total = 0;
  for (const DataMatrix& g : groups_) total += static_cast<long>(g.n());
  return total;
}

LogStatistic stat_sphericity(const DataMatrix& data) {
  const long n = static_cast<long>(data.n());
  const long p = static_cast<long>(data.p());
  if (n < p + 1) {
    throw GroupTooSmall("sphericity statistic requires n >= p + 1 (got n=" + std::to_string(n) +
                        ", p=" + std::to_string(p) + ")");
  }
  MeanScatter ms = mean_and_scatter(data);
  const double value =
      logdet_spd(ms.scatter) - p * std::log(ms.scatter.trace() / static_cast<double>(p));
  return {TestKind::sphericity, value, n, p, {}, {}};
}

LogStatistic stat_block_independence(const DataMatrix& data, const BlockPartition& partition) {
  const long n = static_cast<long>(data.n());
  const long p = static_cast<long>(data.p());
  if (partition.total() != p) {
    throw PartitionMismatch("partition sums to " + std::to_string(partition.total()) +
                            " but data has p=" + std::to_string(p));
  }
  if (n < p + 1) {
    throw GroupTooSmall("block-independence statistic requires n >= p + 1");
  }
  MeanScatter ms = mean_and_scatter(data);
  double value = logdet_spd(ms.scatter);
  std::size_t offset = 0;
  for (long pi : partition.sizes()) {
    value -= logdet_spd(ms.scatter.block(offset, static_cast<std::size_t>(pi)));
    offset += static_cast<std::size_t>(pi);
  }
  std::vector<long> parts(partition.sizes().begin(), partition.sizes().end());
  return {TestKind::block_independence, value, n, p, std::move(parts), {}};
}

namespace {

// Within-group scatters plus group means, shared by the two k-sample tests.
struct GroupMoments {
  std::vector<MeanScatter> per_group;
  std::vector<long> sizes;
  long n = 0;
  long p = 0;
};

GroupMoments group_moments(const GroupedSamples& samples, const char* what) {
  GroupMoments gm;
  gm.p = static_cast<long>(samples.p());
  gm.sizes = samples.sizes();
  for (long ni : gm.sizes) {
    gm.n += ni;
    if (gm.p > ni) {
      throw GroupTooSmall(std::string(what) + " requires p <= min group size (got p=" +
                          std::to_string(gm.p) + ", group size " + std::to_string(ni) + ")");
    }
  }
  gm.per_group.reserve(samples.count());
  for (const DataMatrix& g : samples.groups()) gm.per_group.push_back(mean_and_scatter(g));
  return gm;
}

}  // namespace

LogStatistic stat_equal_distributions(const GroupedSamples& samples) {
  GroupMoments gm = group_moments(samples, "equal-distributions statistic");
  const long p = gm.p;
  const double n = static_cast<double>(gm.n);
  const std::size_t pp = static_cast<std::size_t>(p);

  std::vector<double> grand(pp, 0.0);
  for (std::size_t i = 0; i < gm.per_group.size(); ++i) {
    for (std::size_t j = 0; j < pp; ++j) grand[j] += gm.sizes[i] * gm.per_group[i].mean[j];
  }
  for (std::size_t j = 0; j < pp; ++j) grand[j] /= n;

  // A + B: between-group matrix plus pooled within-group scatter.
  Matrix total(pp, pp);
  for (std::size_t i = 0; i < gm.per_group.size(); ++i) {
    const double ni = static_cast<double>(gm.sizes[i]);
    const auto& mean = gm.per_group[i].mean;
    const auto& scat = gm.per_group[i].scatter;
    for (std::size_t a = 0; a < pp; ++a) {
      const double da = mean[a] - grand[a];
      for (std::size_t b = 0; b < pp; ++b) {
        total(a, b) += scat(a, b) + ni * da * (mean[b] - grand[b]);
      }
    }
  }

  double value = 0.0;
  for (std::size_t i = 0; i < gm.per_group.size(); ++i) {
    value += 0.5 * gm.sizes[i] * logdet_spd(gm.per_group[i].scatter);
  }
  value -= 0.5 * n * logdet_spd(make_symmetric_unchecked(std::move(total)));
  value += 0.5 * p * n * std::log(n);
  for (long ni : gm.sizes) value -= 0.5 * p * ni * std::log(static_cast<double>(ni));
  return {TestKind::equal_distributions, value, gm.n, p, {}, gm.sizes};
}

LogStatistic stat_equal_covariances(const GroupedSamples& samples) {
  GroupMoments gm = group_moments(samples, "equal-covariances statistic");
  const long p = gm.p;
  const long k = static_cast<long>(gm.per_group.size());
  const double nk = static_cast<double>(gm.n - k);
  const std::size_t pp = static_cast<std::size_t>(p);

  Matrix pooled(pp, pp);
  for (const MeanScatter& ms : gm.per_group) {
    for (std::size_t a = 0; a < pp; ++a)
      for (std::size_t b = 0; b < pp; ++b) pooled(a, b) += ms.scatter(a, b);
  }

  double value = 0.0;
  for (std::size_t i = 0; i < gm.per_group.size(); ++i) {
    value += 0.5 * (gm.sizes[i] - 1) * logdet_spd(gm.per_group[i].scatter);
  }
  value -= 0.5 * nk * logdet_spd(make_symmetric_unchecked(std::move(pooled)));
  value += 0.5 * nk * p * std::log(nk);
  for (long ni : gm.sizes) value -= 0.5 * (ni - 1) * p * std::log(static_cast<double>(ni - 1));
  return {TestKind::equal_covariances, value, gm.n, p, {}, gm.sizes};
}

LogStatistic stat_specified(const DataMatrix& data, std::span<const double> mu0,
                            const SymmetricMatrix& sigma0) {
  const long n = static_cast<long>(data.n());
  const long p = static_cast<long>(data.p());
  if (mu0.size() != data.p() || sigma0.dim() != data.p()) {
    throw DimensionMismatch("mu0/sigma0 dimension does not match the data");
  }
  if (n < p + 1) {
    throw GroupTooSmall("specified-value statistic requires n >= p + 1");
  }
  const CholeskyFactor chol = CholeskyFactor::compute(sigma0);

  Matrix whitened(data.n(), data.p());
  std::vector<double> row(data.p());
  for (std::size_t i = 0; i < data.n(); ++i) {
    auto src = data.row(i);
    for (std::size_t j = 0; j < data.p(); ++j) row[j] = src[j] - mu0[j];
    chol.solve_lower(row);
    for (std::size_t j = 0; j < data.p(); ++j) whitened(i, j) = row[j];
  }

  MeanScatter ms = mean_and_scatter(DataMatrix(std::move(whitened)));
  double mean_sq = 0.0;
  for (double m : ms.mean) mean_sq += m * m;
  const double nd = static_cast<double>(n);
  const double value = 0.5 * nd * p * (1.0 - std::log(nd)) + 0.5 * nd * logdet_spd(ms.scatter) -
                       0.5 * ms.scatter.trace() - 0.5 * nd * mean_sq;
  return {TestKind::specified, value, n, p, {}, {}};
}

LogStatistic stat_complete_independence(const DataMatrix& data) {
  const long n = static_cast<long>(data.n());
  const long p = static_cast<long>(data.p());
  if (n < p + 1) {
    throw GroupTooSmall("complete-independence statistic requires n >= p + 1");
  }
  const double value = logdet_spd(sample_correlation(data));
  return {TestKind::complete_independence, value, n, p, {}, {}};
}

}  // namespace hdlrt
