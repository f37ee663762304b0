#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "seedstm/corpus.hpp"
#include "seedstm/stm.hpp"

namespace seedstm::analytics {

// Jensen-Shannon divergence, log base 2 (so the range is [0,1]).
double js_divergence(const std::vector<double>& p, const std::vector<double>& q);

struct SimilarityMatrix {
  int topic = 0;
  std::vector<int> levels;  // ordered content-level subset
  Eigen::MatrixXd s;        // 1 - JSD, symmetric, unit diagonal
};

SimilarityMatrix similarity_matrix(const stm::StmModel& model, int topic,
                                   const std::vector<int>& levels);
// Convenience: all L levels in order, one matrix per topic.
std::vector<SimilarityMatrix> all_similarities(const stm::StmModel& model,
                                               int threads = 1);

struct BlockSummary {
  int topic = 0;
  double within_left = 0.0;
  double within_center = 0.0;
  double within_right = 0.0;
  double left_right = 0.0;
  double left_center = 0.0;
  double center_right = 0.0;
};

// Within blocks: unordered distinct-country pairs of one orientation.
// Cross blocks: all ordered country pairs, same-country included.
// Requires a matrix over all levels and at least two countries.
BlockSummary block_averages(const SimilarityMatrix& sim);

struct DimensionClass {
  int topic = 0;
  bool partisan = false;
  bool right_splinter = false;
  bool left_splinter = false;
};

DimensionClass classify_dimension(const BlockSummary& blocks);

struct SalienceTable {
  std::vector<std::string> topics;  // model topic order
  std::vector<std::string> groups;  // level names, level order
  Eigen::MatrixXd raw;              // K x L, NaN = empty group cell
  Eigen::MatrixXd normalized;       // row min-max; raw passed through when flat
  std::vector<bool> degenerate;     // per-row normalization flag
};

SalienceTable salience_table(const stm::StmModel& model,
                             const corpus::Corpus& corpus);

// Country-averaged Right-minus-Left probability of one feature.
double feature_diff(const stm::StmModel& model, int topic, int feature);

struct TopFeature {
  int feature = 0;
  std::string surface;
  corpus::FeatureKind kind = corpus::FeatureKind::unigram;
  double left_mean = 0.0;
  double right_mean = 0.0;
  double mean_prob = 0.0;  // (left_mean + right_mean) / 2
  double diff = 0.0;       // right_mean - left_mean
};

// Union of the top n features per side by country-averaged probability,
// ordered by diff ascending (ties by surface).
std::vector<TopFeature> top_features_by_side(const stm::StmModel& model,
                                             const corpus::Vocabulary& vocab,
                                             int topic, int n_per_side = 10);

struct RankedTopic {
  std::string topic;
  double similarity = 0.0;
};

struct PairRanking {
  std::string country_a;
  std::string country_b;
  std::vector<RankedTopic> top;
  std::vector<RankedTopic> bottom;
};

// Per unordered country pair within one side, topics ranked by similarity.
std::vector<PairRanking> pair_topic_rankings(
    const std::vector<SimilarityMatrix>& sims, const stm::StmModel& model,
    corpus::PolPos side, int n = 3);

struct WithinCountryLr {
  std::string country;
  std::vector<double> per_topic;  // model topic order
  double average = 0.0;
};

WithinCountryLr within_country_lr(const std::vector<SimilarityMatrix>& sims,
                                  const stm::StmModel& model, int country);

struct NetworkNode {
  std::string surface;
  double weight = 0.0;       // mean probability across the two levels
  double signed_diff = 0.0;  // beta(level_b) - beta(level_a)
};

struct NetworkEdge {
  std::string head;
  std::string child;
  double weight = 0.0;
  double signed_diff = 0.0;
};

struct Network {
  int topic = 0;
  int level_a = 0;
  int level_b = 0;
  std::vector<NetworkNode> nodes;  // surface ascending
  std::vector<NetworkEdge> edges;  // (head, child) ascending
};

// Nodes: unigram features in the union of the two levels' top_n features.
// Edges: vocabulary dep pairs whose both endpoints are nodes.
Network association_network(const stm::StmModel& model,
                            const corpus::Vocabulary& vocab, int topic,
                            int level_a, int level_b, int top_n);

// Plot-ready text artifacts.
std::string write_similarity_csv(const SimilarityMatrix& sim,
                                 const stm::StmModel& model);
std::string write_similarity_long_csv(const std::vector<SimilarityMatrix>& sims,
                                      const stm::StmModel& model);
std::string write_blocks_csv(const std::vector<BlockSummary>& blocks,
                             const std::vector<DimensionClass>& classes,
                             const stm::StmModel& model);
std::string write_salience_csv(const SalienceTable& table);
std::string write_feature_diff_csv(
    const std::vector<std::vector<TopFeature>>& per_topic,
    const stm::StmModel& model);
std::string write_pair_rankings_csv(const std::vector<PairRanking>& rankings,
                                    corpus::PolPos side);
std::string write_within_lr_csv(const std::vector<WithinCountryLr>& rows,
                                const stm::StmModel& model);
std::string write_within_lr_summary_csv(const std::vector<WithinCountryLr>& rows,
                                        const stm::StmModel& model);
std::string write_network_graphml(const Network& net,
                                  const stm::StmModel& model);
std::string write_network_edges_csv(const Network& net);

}  // namespace seedstm::analytics
