#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace seedstm::stats {

struct CountryObservation {
  std::string country;
  double similarity = 0.0;     // within-country Left-Right similarity average
  double conflict_share = 0.0; // share perceiving strong partisan conflict
};

// Sample Pearson correlation. Needs >= 3 pairs and variance on both sides.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct BootstrapResult {
  int b = 0;  // requested resamples
  std::pair<double, double> quantiles{0.05, 0.95};
  double mean_r = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  int skipped = 0;  // degenerate (zero-variance) resamples, not imputed
};

// Resample pairs with replacement B times; correlation distribution summary.
// Stream-per-resample RNG keeps output independent of thread count.
BootstrapResult bootstrap_ci(const std::vector<double>& x,
                             const std::vector<double>& y, int b = 10000,
                             std::pair<double, double> quantiles = {0.05, 0.95},
                             std::uint64_t rng_seed = 0, int threads = 1);

struct GlmResult {
  double intercept = 0.0;
  double slope = 0.0;
  double se_intercept = 0.0;
  double se_slope = 0.0;
  double t_intercept = 0.0;
  double t_slope = 0.0;
  double p_intercept = 1.0;
  double p_slope = 1.0;
  double dispersion = 1.0;
  // Coefficient covariance (dispersion-scaled), for predictor-scale intervals.
  double cov00 = 0.0;
  double cov01 = 0.0;
  double cov11 = 0.0;
  int n = 0;
  int iterations = 0;
  int clamped = 0;  // endpoint proportions moved inside (0,1)
};

// Quasi-binomial GLM of proportions y on a single regressor x: logit link,
// binomial variance, Pearson dispersion, t-based inference on n-2 df.
GlmResult glm_quasibinomial(const std::vector<double>& y,
                            const std::vector<double>& x);

struct CurvePoint {
  double x = 0.0;
  double fit = 0.0;
  double lower = 0.0;  // 90% pointwise interval on the response scale
  double upper = 0.0;
};

std::vector<CurvePoint> fitted_curve(const GlmResult& glm,
                                     const std::vector<double>& grid);

struct StatsReport {
  std::vector<CountryObservation> used;  // country-matched, country ascending
  std::vector<std::string> only_similarity;  // countries excluded per side
  std::vector<std::string> only_survey;
  double r = 0.0;
  BootstrapResult boot;
  GlmResult glm;
};

// Joins the two input tables on country; unmatched rows are listed, not used.
StatsReport correlate(const std::vector<std::pair<std::string, double>>& similarity,
                      const std::vector<std::pair<std::string, double>>& survey,
                      int b, std::pair<double, double> quantiles,
                      std::uint64_t rng_seed, int threads = 1);

std::string write_stats_json(const StatsReport& report);
std::string write_curve_csv(const std::vector<CurvePoint>& curve);

}  // namespace seedstm::stats
