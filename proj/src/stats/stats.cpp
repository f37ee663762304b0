#include "seedstm/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "seedstm/error.hpp"
#include "seedstm/parallel.hpp"
#include "seedstm/rng.hpp"

namespace seedstm::stats {

namespace {

constexpr double kYClamp = 1e-6;
constexpr double kIrlsTol = 1e-10;
constexpr int kIrlsCap = 100;

// Returns NaN instead of throwing when a side has zero variance, so the
// bootstrap can skip degenerate resamples cheaply.
double pearson_or_nan(const double* x, const double* y, size_t n) {
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0)
    return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

// Linear-interpolation empirical quantile on a sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw ComputeError("quantile of empty sample");
  if (sorted.size() == 1) return sorted[0];
  double h = q * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<size_t>(std::floor(h));
  auto hi = std::min(lo + 1, sorted.size() - 1);
  double w = h - static_cast<double>(lo);
  return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

double inv_logit(double eta) {
  if (eta >= 0.0) {
    double e = std::exp(-eta);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(eta);
  return e / (1.0 + e);
}

double two_sided_p(double t, double dof) {
  if (!std::isfinite(t)) return 0.0;
  boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

}  // namespace

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ComputeError("pearson: length mismatch");
  if (x.size() < 3) throw ComputeError("pearson: need at least 3 pairs");
  double r = pearson_or_nan(x.data(), y.data(), x.size());
  if (std::isnan(r))
    throw ComputeError("pearson: zero variance on one side");
  return r;
}

BootstrapResult bootstrap_ci(const std::vector<double>& x,
                             const std::vector<double>& y, int b,
                             std::pair<double, double> quantiles,
                             std::uint64_t rng_seed, int threads) {
  if (x.size() != y.size()) throw ComputeError("bootstrap: length mismatch");
  const size_t n = x.size();
  if (n < 3) throw ComputeError("bootstrap: need at least 3 observations");
  if (b < 1) throw ComputeError("bootstrap: B must be positive");

  std::vector<double> rs(static_cast<size_t>(b));
  parallel::parallel_for(static_cast<size_t>(b), threads, [&](size_t i) {
    rng::Stream stream(rng_seed, i);
    std::vector<double> rx(n), ry(n);
    for (size_t j = 0; j < n; ++j) {
      auto pick = static_cast<size_t>(stream.next_below(n));
      rx[j] = x[pick];
      ry[j] = y[pick];
    }
    rs[i] = pearson_or_nan(rx.data(), ry.data(), n);
  });

  std::vector<double> valid;
  valid.reserve(rs.size());
  double sum = 0.0;
  for (double r : rs)
    if (!std::isnan(r)) {
      valid.push_back(r);
      sum += r;
    }
  if (valid.empty())
    throw ComputeError("bootstrap: every resample was degenerate");

  std::sort(valid.begin(), valid.end());
  BootstrapResult out;
  out.b = b;
  out.quantiles = quantiles;
  out.mean_r = sum / static_cast<double>(valid.size());
  out.lower = quantile_sorted(valid, quantiles.first);
  out.upper = quantile_sorted(valid, quantiles.second);
  out.skipped = b - static_cast<int>(valid.size());
  return out;
}

GlmResult glm_quasibinomial(const std::vector<double>& y,
                            const std::vector<double>& x) {
  if (x.size() != y.size()) throw ComputeError("glm: length mismatch");
  const auto n = static_cast<int>(y.size());
  if (n < 3) throw ComputeError("glm: need at least 3 observations");

  GlmResult out;
  out.n = n;
  std::vector<double> yy(y);
  for (double& v : yy) {
    if (v < 0.0 || v > 1.0)
      throw InputError("glm: proportion outside [0,1]");
    double c = std::clamp(v, kYClamp, 1.0 - kYClamp);
    if (c != v) {
      v = c;
      ++out.clamped;
    }
  }

  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd resp(n);
  for (int i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = x[i];
    resp(i) = yy[static_cast<size_t>(i)];
  }

  Eigen::Vector2d coef = Eigen::Vector2d::Zero();
  Eigen::VectorXd mu = resp;  // standard IRLS start: fitted = observed
  Eigen::VectorXd eta(n);
  for (int i = 0; i < n; ++i)
    eta(i) = std::log(mu(i) / (1.0 - mu(i)));

  Eigen::Matrix2d xtwx = Eigen::Matrix2d::Zero();
  int iter = 0;
  for (; iter < kIrlsCap; ++iter) {
    Eigen::VectorXd w(n), z(n);
    for (int i = 0; i < n; ++i) {
      double m = std::clamp(mu(i), 1e-10, 1.0 - 1e-10);
      w(i) = m * (1.0 - m);
      z(i) = eta(i) + (resp(i) - m) / w(i);
    }
    xtwx = design.transpose() * w.asDiagonal() * design;
    Eigen::Vector2d xtwz = design.transpose() * (w.asDiagonal() * z);
    Eigen::Vector2d next = xtwx.ldlt().solve(xtwz);
    if (!next.allFinite())
      throw ComputeError("glm: IRLS produced non-finite coefficients at iteration " +
                         std::to_string(iter + 1));
    double delta = (next - coef).cwiseAbs().maxCoeff();
    double scale = std::max(1.0, coef.cwiseAbs().maxCoeff());
    coef = next;
    eta = design * coef;
    for (int i = 0; i < n; ++i) mu(i) = inv_logit(eta(i));
    if (iter > 0 && delta / scale < kIrlsTol) break;
  }
  if (iter == kIrlsCap)
    throw ComputeError("glm: IRLS did not converge within " +
                       std::to_string(kIrlsCap) + " iterations");
  out.iterations = iter + 1;

  double pearson_chi2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double m = std::clamp(mu(i), 1e-10, 1.0 - 1e-10);
    double resid = resp(i) - m;
    pearson_chi2 += resid * resid / (m * (1.0 - m));
  }
  const double dof = n - 2;
  out.dispersion = pearson_chi2 / dof;

  Eigen::Matrix2d cov = xtwx.inverse() * out.dispersion;
  out.intercept = coef(0);
  out.slope = coef(1);
  out.cov00 = cov(0, 0);
  out.cov01 = cov(0, 1);
  out.cov11 = cov(1, 1);
  out.se_intercept = std::sqrt(cov(0, 0));
  out.se_slope = std::sqrt(cov(1, 1));
  out.t_intercept =
      out.se_intercept > 0.0
          ? out.intercept / out.se_intercept
          : (out.intercept == 0.0 ? 0.0
                                  : std::numeric_limits<double>::infinity());
  out.t_slope = out.se_slope > 0.0
                    ? out.slope / out.se_slope
                    : (out.slope == 0.0
                           ? 0.0
                           : std::numeric_limits<double>::infinity());
  out.p_intercept =
      out.t_intercept == 0.0 ? 1.0 : two_sided_p(out.t_intercept, dof);
  out.p_slope = out.t_slope == 0.0 ? 1.0 : two_sided_p(out.t_slope, dof);
  return out;
}

std::vector<CurvePoint> fitted_curve(const GlmResult& glm,
                                     const std::vector<double>& grid) {
  boost::math::students_t dist(glm.n - 2);
  const double tq = boost::math::quantile(dist, 0.95);  // 90% two-sided
  std::vector<CurvePoint> out;
  out.reserve(grid.size());
  for (double gx : grid) {
    CurvePoint p;
    p.x = gx;
    double eta = glm.intercept + glm.slope * gx;
    double var = glm.cov00 + 2.0 * gx * glm.cov01 + gx * gx * glm.cov11;
    double se = std::sqrt(std::max(0.0, var));
    p.fit = inv_logit(eta);
    p.lower = inv_logit(eta - tq * se);
    p.upper = inv_logit(eta + tq * se);
    out.push_back(p);
  }
  return out;
}

StatsReport correlate(
    const std::vector<std::pair<std::string, double>>& similarity,
    const std::vector<std::pair<std::string, double>>& survey, int b,
    std::pair<double, double> quantiles, std::uint64_t rng_seed, int threads) {
  std::map<std::string, double> by_country;
  for (const auto& [country, value] : similarity) {
    if (!by_country.emplace(country, value).second)
      throw InputError("duplicate similarity row for country: " + country);
  }

  StatsReport report;
  std::map<std::string, double> matched_survey;
  for (const auto& [country, share] : survey) {
    if (!matched_survey.emplace(country, share).second)
      throw InputError("duplicate survey row for country: " + country);
    if (by_country.count(country) == 0)
      report.only_survey.push_back(country);
  }
  for (const auto& [country, value] : by_country) {
    auto it = matched_survey.find(country);
    if (it == matched_survey.end()) {
      report.only_similarity.push_back(country);
      continue;
    }
    report.used.push_back({country, value, it->second});
  }
  if (report.used.size() < 3)
    throw ComputeError("correlate: fewer than 3 matched countries");

  std::vector<double> sim, share;
  for (const auto& obs : report.used) {
    sim.push_back(obs.similarity);
    share.push_back(obs.conflict_share);
  }
  report.r = pearson(sim, share);
  report.boot = bootstrap_ci(sim, share, b, quantiles, rng_seed, threads);
  report.glm = glm_quasibinomial(share, sim);
  return report;
}

}  // namespace seedstm::stats
