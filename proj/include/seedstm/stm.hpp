#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "seedstm/corpus.hpp"
#include "seedstm/lexicon.hpp"

namespace seedstm::stm {

struct ModelConfig {
  double emtol = 1e-2;
  double seed_mass = 0.25;
  int max_iter = 100;
  double kappa_l1 = 0.01;
  uint64_t rng_seed = 42;
};

struct PrevalenceDesign {
  Eigen::MatrixXd X;               // D x P
  std::vector<std::string> terms;  // "(Intercept)", "left", "right", countries,
                                   // then "left:c"/"right:c" per country
};

// Dummy coding with (first country, Center) as the reference level.
// Throws when the matrix is rank-deficient (an empty country x pol_pos cell).
PrevalenceDesign build_design(const corpus::Corpus& corpus);
// One row of the same coding for a single document's labels.
Eigen::RowVectorXd design_row(const corpus::GroupLabel& group, int n_countries);

struct StmModel {
  ModelConfig config;
  int K = 0;  // topics including the residual (index K-1)
  int V = 0;
  int L = 0;  // content levels = 3 * countries
  std::vector<std::string> topic_names;  // lexicon order + "residual topic"
  std::vector<std::string> countries;
  std::vector<std::string> terms;

  std::vector<double> m;                         // V baseline log frequencies
  std::vector<std::vector<double>> kappa_topic;  // K x V
  std::vector<std::vector<double>> kappa_cov;    // L x V
  std::vector<std::vector<double>> kappa_inter;  // (L*K) x V, index l*K + k

  Eigen::MatrixXd gamma;   // P x (K-1)
  Eigen::MatrixXd sigma;   // (K-1) x (K-1)
  Eigen::MatrixXd lambda;  // D x (K-1) posterior modes
  Eigen::MatrixXd nu;      // D x (K-1) posterior variances (diagonal)
  Eigen::MatrixXd theta;   // D x K

  std::vector<double> bound_trace;
  std::string convergence_reason;  // "emtol" | "max_iter"
  std::vector<int> flagged_docs;   // inner optimizer hit its iteration cap
  uint64_t vocab_hash = 0;

  std::string level_name(int l) const;
  // softmax(m + kappa_topic[k] + kappa_cov[l] + kappa_inter[l*K+k])
  std::vector<double> beta(int level, int k) const;
};

// Initial topic-word distributions: seed_mass split evenly over each topic's
// seeds on top of a uniform floor; the residual topic is uniform.
std::vector<std::vector<double>> init_seeded(const corpus::Vocabulary& vocab,
                                             const lexicon::SeedLexicon& lexicon,
                                             double seed_mass);

struct EStepResult {
  Eigen::VectorXd lambda;  // K-1
  Eigen::VectorXd nu;      // K-1
  Eigen::MatrixXd phi;     // n_distinct x K, rows sum to 1
  double bound = 0.0;
  bool converged = true;
};

// Standalone E-step for one document against the fitted model (rebuilds the
// per-level beta and prior internally; fit() uses a cached variant).
EStepResult e_step(const corpus::DocumentVector& doc, const StmModel& model);

struct MStepStats {
  // Expected token counts per (level, topic, feature), plus posteriors.
  std::vector<std::vector<double>> counts;  // (L*K) x V
  Eigen::MatrixXd lambda;                   // D x (K-1)
  Eigen::MatrixXd nu;                       // D x (K-1)
};

// Updates gamma, sigma and the kappa blocks in place.
void m_step(StmModel& model, const PrevalenceDesign& design,
            const MStepStats& stats, int threads = 1);

StmModel fit(const corpus::Corpus& corpus, const lexicon::SeedLexicon& lexicon,
             const corpus::Vocabulary& vocab, const ModelConfig& config,
             int threads = 1);

struct EffectRow {
  std::string topic;
  std::string term;
  double estimate = 0.0;
  double std_error = 0.0;
  double t_value = 0.0;
  double p_value = 0.0;
  std::string signif;
};

struct EffectTable {
  std::vector<EffectRow> rows;  // topic-major, term order as in the design
};

// Per-topic OLS of theta on X with t-based two-sided p-values.
EffectTable estimate_effects(const StmModel& model, const PrevalenceDesign& X);
std::string write_effects_csv(const EffectTable& table);

std::string significance_stars(double p_value);

std::string write_model_json(const StmModel& model);
StmModel parse_model_json(const std::string& text);

}  // namespace seedstm::stm
