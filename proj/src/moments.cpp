#include "hdlrt/moments.hpp"

#include <cmath>
#include <string>

#include "hdlrt/approximations.hpp"
#include "hdlrt/special.hpp"

namespace hdlrt {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

double lmvg(long p, double a) { return log_multivariate_gamma(static_cast<int>(p), a); }

}  // namespace

double log_moment_sphericity(long n, long p, double h) {
  require(n > p, "sphericity moment requires n > p");
  require(h > -0.5, "sphericity moment requires exponent h > -1/2, got h=" + std::to_string(h));
  if (h == 0.0) return 0.0;
  const double m = static_cast<double>(n) - 1.0;
  const double pd = p;
  return pd * h * std::log(pd) + log_gamma(0.5 * m * pd) - log_gamma(0.5 * m * pd + pd * h) +
         lmvg(p, 0.5 * m + h) - lmvg(p, 0.5 * m);
}

double log_moment_block_independence(long n_samples, const BlockPartition& partition, double t) {
  const long p = partition.total();
  require(n_samples > p, "block-independence moment requires n > p");
  require(t > -0.5,
          "block-independence moment requires exponent t > -1/2, got t=" + std::to_string(t));
  if (t == 0.0) return 0.0;
  const double half = 0.5 * (static_cast<double>(n_samples) - 1.0);
  double v = lmvg(p, half + t) - lmvg(p, half);
  for (long pi : partition.sizes()) v += lmvg(pi, half) - lmvg(pi, half + t);
  return v;
}

double log_moment_equal_distributions(std::span<const long> sizes, long p, double t) {
  double n = 0.0;
  for (long ni : sizes) {
    require(ni > p, "equal-distributions moment requires every group size > p");
    require(t > static_cast<double>(p) / static_cast<double>(ni) - 1.0,
            "equal-distributions moment requires exponent t > max(p/n_i) - 1, got t=" +
                std::to_string(t));
    n += static_cast<double>(ni);
  }
  if (t == 0.0) return 0.0;
  const double pd = p;
  double v = lmvg(p, 0.5 * (n - 1.0)) - lmvg(p, 0.5 * (n * (1.0 + t) - 1.0));
  double size_terms = 0.5 * pd * n * std::log(n);
  for (long ni : sizes) {
    const double nid = ni;
    v += lmvg(p, 0.5 * (nid * (1.0 + t) - 1.0)) - lmvg(p, 0.5 * (nid - 1.0));
    size_terms -= 0.5 * pd * nid * std::log(nid);
  }
  return v + t * size_terms;
}

double log_moment_equal_covariances(std::span<const long> sizes, long p, double h) {
  double n = 0.0;
  for (long ni : sizes) {
    require(ni > p, "equal-covariances moment requires every group size > p");
    require(h > static_cast<double>(p - 1) / static_cast<double>(ni - 1) - 1.0,
            "equal-covariances moment requires exponent h > max((p-1)/(n_i-1)) - 1, got h=" +
                std::to_string(h));
    n += static_cast<double>(ni);
  }
  if (h == 0.0) return 0.0;
  const double pd = p;
  const double nk = n - static_cast<double>(sizes.size());
  double v = lmvg(p, 0.5 * nk) - lmvg(p, 0.5 * nk * (1.0 + h));
  double size_terms = 0.5 * nk * pd * std::log(nk);
  for (long ni : sizes) {
    const double nid = ni;
    v += lmvg(p, 0.5 * (nid - 1.0) * (1.0 + h)) - lmvg(p, 0.5 * (nid - 1.0));
    size_terms -= 0.5 * (nid - 1.0) * pd * std::log(nid - 1.0);
  }
  return v + h * size_terms;
}

double log_moment_specified(long n, long p, double t) {
  require(n > p, "specified-value moment requires n > p");
  require(t > static_cast<double>(p) / static_cast<double>(n) - 1.0,
          "specified-value moment requires exponent t > p/n - 1, got t=" + std::to_string(t));
  if (t == 0.0) return 0.0;
  const double nd = n, pd = p;
  return 0.5 * nd * pd * t * (std::log(2.0) + 1.0 - std::log(nd)) -
         0.5 * nd * pd * (1.0 + t) * std::log1p(t) + lmvg(p, 0.5 * (nd * (1.0 + t) - 1.0)) -
         lmvg(p, 0.5 * (nd - 1.0));
}

double log_moment_complete_independence(long n, long p, double t) {
  require(p >= 2, "complete-independence moment requires p >= 2");
  require(n >= p + 5, "complete-independence moment requires n >= p + 5");
  require(t >= -1.0,
          "complete-independence moment requires exponent t >= -1, got t=" + std::to_string(t));
  if (t == 0.0) return 0.0;
  const double half = 0.5 * (static_cast<double>(n) - 1.0);
  return static_cast<double>(p) * (log_gamma(half) - log_gamma(half + t)) +
         lmvg(p, half + t) - lmvg(p, half);
}

double log_moment(const MomentQuery& query) {
  const MomentShape& s = query.shape;
  switch (query.kind) {
    case TestKind::sphericity:
      return log_moment_sphericity(s.sizes.at(0), s.p, query.t);
    case TestKind::block_independence:
      return log_moment_block_independence(s.sizes.at(0), BlockPartition(s.partition), query.t);
    case TestKind::equal_distributions:
      return log_moment_equal_distributions(s.sizes, s.p, query.t);
    case TestKind::equal_covariances:
      return log_moment_equal_covariances(s.sizes, s.p, query.t);
    case TestKind::specified:
      return log_moment_specified(s.sizes.at(0), s.p, query.t);
    case TestKind::complete_independence:
      return log_moment_complete_independence(s.sizes.at(0), s.p, query.t);
  }
  throw DomainError("unknown test kind");
}

namespace {

CltParams clt_params_for_shape(TestKind kind, const MomentShape& s) {
  switch (kind) {
    case TestKind::sphericity:
      return clt_sphericity(s.sizes.at(0), s.p);
    case TestKind::block_independence:
      return clt_block_independence(s.sizes.at(0), BlockPartition(s.partition));
    case TestKind::equal_distributions:
      return clt_equal_distributions(s.sizes, s.p);
    case TestKind::equal_covariances:
      return clt_equal_covariances(s.sizes, s.p);
    case TestKind::specified:
      return clt_specified(s.sizes.at(0), s.p);
    case TestKind::complete_independence:
      return clt_complete_independence(s.sizes.at(0), s.p);
  }
  throw DomainError("unknown test kind");
}

}  // namespace

std::vector<MgfDeviation> mgf_convergence_check(TestKind kind,
                                                std::span<const MomentShape> shapes, double s) {
  std::vector<MgfDeviation> out;
  out.reserve(shapes.size());
  for (const MomentShape& shape : shapes) {
    const CltParams params = clt_params_for_shape(kind, shape);
    const double t = s / params.scale;
    const double lm = log_moment({kind, shape, t});
    out.push_back({shape, std::abs(lm - t * params.center - 0.5 * s * s)});
  }
  return out;
}

}  // namespace hdlrt
