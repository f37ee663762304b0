#include <json.hpp>

#include "seedstm/io.hpp"
#include "seedstm/stats.hpp"

namespace seedstm::stats {

using nlohmann::json;

std::string write_stats_json(const StatsReport& report) {
  json j;
  j["pearson_r"] = report.r;

  json boot;
  boot["b"] = report.boot.b;
  boot["quantile_low"] = report.boot.quantiles.first;
  boot["quantile_high"] = report.boot.quantiles.second;
  boot["mean_r"] = report.boot.mean_r;
  boot["ci_lower"] = report.boot.lower;
  boot["ci_upper"] = report.boot.upper;
  boot["skipped_resamples"] = report.boot.skipped;
  j["bootstrap"] = boot;

  json glm;
  glm["family"] = "quasibinomial";
  glm["link"] = "logit";
  glm["n"] = report.glm.n;
  glm["iterations"] = report.glm.iterations;
  glm["clamped_proportions"] = report.glm.clamped;
  glm["dispersion"] = report.glm.dispersion;
  json coefs = json::array();
  coefs.push_back({{"term", "(Intercept)"},
                   {"estimate", report.glm.intercept},
                   {"std_error", report.glm.se_intercept},
                   {"t_value", report.glm.t_intercept},
                   {"p_value", report.glm.p_intercept}});
  coefs.push_back({{"term", "similarity"},
                   {"estimate", report.glm.slope},
                   {"std_error", report.glm.se_slope},
                   {"t_value", report.glm.t_slope},
                   {"p_value", report.glm.p_slope}});
  glm["coefficients"] = coefs;
  j["glm"] = glm;

  json used = json::array();
  for (const auto& obs : report.used)
    used.push_back({{"country", obs.country},
                    {"similarity", obs.similarity},
                    {"conflict_share", obs.conflict_share}});
  j["observations"] = used;
  j["excluded_only_similarity"] = report.only_similarity;
  j["excluded_only_survey"] = report.only_survey;
  return j.dump(2) + "\n";
}

std::string write_curve_csv(const std::vector<CurvePoint>& curve) {
  std::string out = "x,fit,lower,upper\n";
  for (const auto& p : curve) {
    out += io::fmt_double(p.x);
    out += ',';
    out += io::fmt_double(p.fit);
    out += ',';
    out += io::fmt_double(p.lower);
    out += ',';
    out += io::fmt_double(p.upper);
    out += '\n';
  }
  return out;
}

}  // namespace seedstm::stats
