#include "hdlrt/approximations.hpp"

#include <cmath>
#include <limits>

#include "hdlrt/special.hpp"

namespace hdlrt {

namespace {

double r_squared(double p, double x) { return -log_one_minus_ratio(p, x); }

void require_shape(bool ok, const std::string& what) {
  if (!ok) throw TheoremDomainError(what);
}

double integer_half(long long numerator) {
  // All six degree-of-freedom formulas have an even numerator product.
  return static_cast<double>(numerator / 2) + 0.5 * static_cast<double>(numerator % 2);
}

}  // namespace

CltParams clt_sphericity(long n, long p) {
  require_shape(n > p + 1, "sphericity CLT requires n > p + 1 (got n=" + std::to_string(n) +
                               ", p=" + std::to_string(p) + ")");
  const double nd = n, pd = p;
  const double lr = log_one_minus_ratio(pd, nd - 1.0);
  const double center = -pd - (nd - pd - 1.5) * lr;
  const double sigma2 = -2.0 * (pd / (nd - 1.0) + lr);
  return {center, std::sqrt(sigma2), true};
}

ChiSquareParams chisq_sphericity(long n, long p) {
  const double nd = n, pd = p;
  const double rho = 1.0 - (2.0 * pd * pd + pd + 2.0) / (6.0 * (nd - 1.0) * pd);
  const double f = integer_half(static_cast<long long>(p - 1) * (p + 2));
  return {rho, f, ChiSquareForm::sample_scaled_rho, (nd - 1.0) * rho};
}

CltParams clt_block_independence(long n_samples, const BlockPartition& partition) {
  const long p = partition.total();
  require_shape(n_samples > p + 1, "block-independence CLT requires n > p + 1 (got n=" +
                                       std::to_string(n_samples) + ", p=" + std::to_string(p) +
                                       ")");
  const double m = static_cast<double>(n_samples) - 1.0;
  const double nd = n_samples, pd = p;
  double center = -r_squared(pd, m) * (pd - nd + 1.5);
  double sigma2 = 2.0 * r_squared(pd, m);
  for (long pi : partition.sizes()) {
    const double r2i = r_squared(static_cast<double>(pi), m);
    center += r2i * (static_cast<double>(pi) - nd + 1.5);
    sigma2 -= 2.0 * r2i;
  }
  return {center, std::sqrt(sigma2), true};
}

ChiSquareParams chisq_block_independence(long n_samples, const BlockPartition& partition) {
  const long p = partition.total();
  long long sum_sq = 0, sum_cube = 0;
  for (long pi : partition.sizes()) {
    sum_sq += static_cast<long long>(pi) * pi;
    sum_cube += static_cast<long long>(pi) * pi * pi;
  }
  const long long p2 = static_cast<long long>(p) * p - sum_sq;
  const long long p3 = static_cast<long long>(p) * p * p - sum_cube;
  const double rho =
      1.0 - (2.0 * static_cast<double>(p3) + 9.0 * static_cast<double>(p2)) /
                (6.0 * static_cast<double>(n_samples) * static_cast<double>(p2));
  const double f = integer_half(p2);
  // -2 rho log Lambda with log Lambda = (N/2) log W, applied to the stored log W.
  return {rho, f, ChiSquareForm::minus_two_rho, static_cast<double>(n_samples) * rho};
}

CltParams clt_equal_distributions(std::span<const long> sizes, long p) {
  double n = 0.0;
  for (long ni : sizes) {
    require_shape(ni > p + 1, "equal-distributions CLT requires every group size > p + 1");
    n += static_cast<double>(ni);
  }
  const double pd = p;
  const double k = static_cast<double>(sizes.size());
  double center = -2.0 * k * pd + n * r_squared(pd, n) * (2.0 * pd - 2.0 * n + 3.0);
  double sum_ratio2 = 0.0;
  for (long ni : sizes) {
    const double nid = ni;
    const double r2i = r_squared(pd, nid - 1.0);
    center += -pd / nid - nid * r2i * (2.0 * pd - 2.0 * nid + 3.0);
    sum_ratio2 += (nid / n) * (nid / n) * r2i;
  }
  center *= 0.25;
  const double sigma2 = 0.5 * (sum_ratio2 - r_squared(pd, n));
  return {center, n * std::sqrt(sigma2), true};
}

ChiSquareParams chisq_equal_distributions(std::span<const long> sizes, long p) {
  double n = 0.0;
  for (long ni : sizes) n += static_cast<double>(ni);
  const double k = static_cast<double>(sizes.size());
  const double pd = p;
  double harmonic = -1.0;
  for (long ni : sizes) harmonic += n / static_cast<double>(ni);
  const double rho =
      1.0 - (2.0 * pd * pd + 9.0 * pd + 11.0) / (6.0 * (k - 1.0) * (pd + 3.0) * n) * harmonic;
  const double f =
      integer_half(static_cast<long long>(p) * (static_cast<long long>(sizes.size()) - 1) * (p + 3));
  return {rho, f, ChiSquareForm::minus_two_rho, 2.0 * rho};
}

CltParams clt_equal_covariances(std::span<const long> sizes, long p) {
  double n = 0.0;
  for (long ni : sizes) {
    require_shape(ni > p + 1, "equal-covariances CLT requires every group size > p + 1");
    n += static_cast<double>(ni);
  }
  const double pd = p;
  const double k = static_cast<double>(sizes.size());
  const double nk = n - k;
  const double l_pooled = log_one_minus_ratio(pd, nk);
  double center = nk * (2.0 * n - 2.0 * pd - 2.0 * k - 1.0) * l_pooled;
  double sigma2 = l_pooled;
  for (long ni : sizes) {
    const double nid = ni;
    const double li = log_one_minus_ratio(pd, nid - 1.0);
    center -= (nid - 1.0) * (2.0 * nid - 2.0 * pd - 3.0) * li;
    sigma2 -= ((nid - 1.0) / nk) * ((nid - 1.0) / nk) * li;
  }
  center *= 0.25;
  sigma2 *= 0.5;
  return {center, nk * std::sqrt(sigma2), true};
}

ChiSquareParams chisq_equal_covariances(std::span<const long> sizes, long p,
                                        RhoConvention convention) {
  double n = 0.0;
  for (long ni : sizes) n += static_cast<double>(ni);
  const double k = static_cast<double>(sizes.size());
  const double pd = p;
  const double denom = (convention == RhoConvention::pooled ? n : n / k) - k;
  double sum = -1.0;
  for (long ni : sizes) sum += denom / (static_cast<double>(ni) - 1.0);
  const double rho =
      1.0 - (2.0 * pd * pd + 3.0 * pd - 1.0) / (6.0 * (pd + 1.0) * (k - 1.0) * denom) * sum;
  const double f =
      integer_half(static_cast<long long>(p) * (p + 1) * (static_cast<long long>(sizes.size()) - 1));
  return {rho, f, ChiSquareForm::minus_two_rho, 2.0 * rho};
}

CltParams clt_specified(long n, long p) {
  require_shape(n > p + 1, "specified-value CLT requires n > p + 1 (got n=" + std::to_string(n) +
                               ", p=" + std::to_string(p) + ")");
  const double nd = n, pd = p;
  const double lr = log_one_minus_ratio(pd, nd - 1.0);
  const double center = -0.25 * (nd * (2.0 * nd - 2.0 * pd - 3.0) * lr + 2.0 * (nd + 1.0) * pd);
  const double sigma2 = -0.5 * (pd / (nd - 1.0) + lr);
  return {center, nd * std::sqrt(sigma2), true};
}

ChiSquareParams chisq_specified(long n, long p) {
  const double nd = n, pd = p;
  const double rho = 1.0 - (2.0 * pd * pd + 9.0 * pd + 11.0) / (6.0 * nd * (pd + 3.0));
  const double f = integer_half(static_cast<long long>(p) * (p + 3));
  return {rho, f, ChiSquareForm::minus_two_rho, 2.0 * rho};
}

CltParams clt_complete_independence(long n, long p, bool allow_relaxed_domain) {
  bool domain_ok = n >= p + 5;
  if (!domain_ok) {
    if (!allow_relaxed_domain) {
      throw TheoremDomainError("complete-independence CLT requires n >= p + 5 (got n=" +
                               std::to_string(n) + ", p=" + std::to_string(p) + ")");
    }
    require_shape(n >= p + 2,
                  "complete-independence CLT variance requires n >= p + 2 even when relaxed");
  }
  const double nd = n, pd = p;
  const double lr = log_one_minus_ratio(pd, nd - 1.0);
  const double center = (pd - nd + 1.5) * lr - (nd - 2.0) / (nd - 1.0) * pd;
  const double sigma2 = -2.0 * (pd / (nd - 1.0) + lr);
  return {center, std::sqrt(sigma2), domain_ok};
}

ChiSquareParams chisq_complete_independence(long n, long p) {
  const double multiplier = static_cast<double>(n) - 1.0 - (2.0 * static_cast<double>(p) + 5.0) / 6.0;
  const double f = integer_half(static_cast<long long>(p) * (p - 1));
  return {1.0, f, ChiSquareForm::correlation_bartlett, multiplier};
}

namespace {

std::optional<CltParams> clt_params_for(const LogStatistic& s, const EvaluateOptions& options,
                                        std::vector<std::string>& warnings) {
  try {
    switch (s.kind) {
      case TestKind::sphericity:
        return clt_sphericity(s.n, s.p);
      case TestKind::block_independence: {
        if (s.n == s.p + 2) {
          warnings.push_back(
              "block-independence CLT assumes every block ratio stays strictly below one; "
              "n = p + 2 sits at the extreme admissible boundary");
        }
        return clt_block_independence(s.n, BlockPartition(s.partition));
      }
      case TestKind::equal_distributions:
        return clt_equal_distributions(s.group_sizes, s.p);
      case TestKind::equal_covariances:
        return clt_equal_covariances(s.group_sizes, s.p);
      case TestKind::specified:
        return clt_specified(s.n, s.p);
      case TestKind::complete_independence: {
        CltParams params = clt_complete_independence(s.n, s.p, options.force_domain);
        if (!params.theorem_domain_ok) {
          warnings.push_back("complete-independence CLT gate n >= p + 5 relaxed to n >= p + 2 "
                             "by force-domain; interpret with care");
        }
        return params;
      }
    }
  } catch (const TheoremDomainError& e) {
    warnings.push_back(e.what());
    return std::nullopt;
  }
  return std::nullopt;
}

ChiSquareParams chisq_params_for(const LogStatistic& s, const EvaluateOptions& options) {
  switch (s.kind) {
    case TestKind::sphericity:
      return chisq_sphericity(s.n, s.p);
    case TestKind::block_independence:
      return chisq_block_independence(s.n, BlockPartition(s.partition));
    case TestKind::equal_distributions:
      return chisq_equal_distributions(s.group_sizes, s.p);
    case TestKind::equal_covariances:
      return chisq_equal_covariances(s.group_sizes, s.p, options.rho_convention);
    case TestKind::specified:
      return chisq_specified(s.n, s.p);
    case TestKind::complete_independence:
      return chisq_complete_independence(s.n, s.p);
  }
  throw DomainError("unknown test kind");
}

}  // namespace

TestOutcome evaluate(const LogStatistic& statistic, const EvaluateOptions& options) {
  TestOutcome outcome;
  outcome.statistic = statistic;

  ChiSquareSide chisq;
  chisq.params = chisq_params_for(statistic, options);
  chisq.statistic = -chisq.params.multiplier * statistic.value;
  if (chisq.params.f <= 0.0) {
    chisq.p_value = std::numeric_limits<double>::quiet_NaN();
    outcome.warnings.push_back("chi-square approximation is vacuous (f = 0); no p-value");
  } else if (chisq.statistic < 0.0) {
    chisq.p_value = std::numeric_limits<double>::quiet_NaN();
    outcome.warnings.push_back(
        "chi-square statistic is negative (correction factor out of range); no p-value");
  } else {
    chisq.p_value = chi_square_sf(chisq.statistic, chisq.params.f);
  }
  outcome.chisq = chisq;

  if (auto params = clt_params_for(statistic, options, outcome.warnings)) {
    CltSide side;
    side.params = *params;
    side.z = (statistic.value - params->center) / params->scale;
    side.p_value = normal_cdf(side.z);
    outcome.clt = side;
  }
  return outcome;
}

}  // namespace hdlrt
