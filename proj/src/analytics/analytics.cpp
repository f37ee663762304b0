#include "seedstm/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_set>

#include "seedstm/error.hpp"
#include "seedstm/kernels.hpp"
#include "seedstm/parallel.hpp"

namespace seedstm::analytics {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// Matrices used by the block/ranking helpers must cover every content level
// in order, so level id doubles as the matrix position.
void require_full_levels(const SimilarityMatrix& sim, int L) {
  if (static_cast<int>(sim.levels.size()) != L)
    throw ComputeError("similarity matrix does not cover all content levels");
  for (int i = 0; i < L; ++i)
    if (sim.levels[i] != i)
      throw ComputeError("similarity matrix levels are not in level order");
}

std::vector<double> side_mean_beta(const stm::StmModel& model, int topic,
                                   corpus::PolPos side) {
  const int C = static_cast<int>(model.countries.size());
  std::vector<double> mean(model.V, 0.0);
  for (int j = 0; j < C; ++j) {
    auto b = model.beta(j * 3 + static_cast<int>(side), topic);
    kernels::axpy(mean.data(), 1.0, b.data(), model.V);
  }
  kernels::scale(mean.data(), 1.0 / static_cast<double>(C), model.V);
  return mean;
}

// Indices of the n largest entries, ties broken by vocabulary surface.
std::vector<int> top_indices(const std::vector<double>& values,
                             const corpus::Vocabulary& vocab, int n) {
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  n = std::min<int>(n, static_cast<int>(idx.size()));
  if (n < 0) n = 0;
  std::partial_sort(idx.begin(), idx.begin() + n, idx.end(),
                    [&](int a, int b) {
                      if (values[a] != values[b]) return values[a] > values[b];
                      return vocab.features[a].surface <
                             vocab.features[b].surface;
                    });
  idx.resize(n);
  return idx;
}

}  // namespace

double js_divergence(const std::vector<double>& p,
                     const std::vector<double>& q) {
  if (p.size() != q.size())
    throw ComputeError("js_divergence: length mismatch");
  const size_t n = p.size();
  std::vector<double> mid(n);
  kernels::average(mid.data(), p.data(), q.data(), n);
  double val = (0.5 * kernels::xlogx_sum(p.data(), n) +
                0.5 * kernels::xlogx_sum(q.data(), n) -
                kernels::xlogx_sum(mid.data(), n)) /
               kLn2;
  return std::clamp(val, 0.0, 1.0);
}

SimilarityMatrix similarity_matrix(const stm::StmModel& model, int topic,
                                   const std::vector<int>& levels) {
  SimilarityMatrix sim;
  sim.topic = topic;
  sim.levels = levels;
  const auto n = static_cast<Eigen::Index>(levels.size());
  sim.s.resize(n, n);
  std::vector<std::vector<double>> betas(levels.size());
  for (size_t i = 0; i < levels.size(); ++i)
    betas[i] = model.beta(levels[i], topic);
  for (Eigen::Index a = 0; a < n; ++a) {
    sim.s(a, a) = 1.0;
    for (Eigen::Index b = a + 1; b < n; ++b) {
      double v = 1.0 - js_divergence(betas[a], betas[b]);
      sim.s(a, b) = v;
      sim.s(b, a) = v;
    }
  }
  return sim;
}

std::vector<SimilarityMatrix> all_similarities(const stm::StmModel& model,
                                               int threads) {
  std::vector<int> levels(model.L);
  std::iota(levels.begin(), levels.end(), 0);
  std::vector<SimilarityMatrix> sims(model.K);
  parallel::parallel_for(model.K, threads, [&](size_t k) {
    sims[k] = similarity_matrix(model, static_cast<int>(k), levels);
  });
  return sims;
}

BlockSummary block_averages(const SimilarityMatrix& sim) {
  const int L = static_cast<int>(sim.levels.size());
  require_full_levels(sim, L);
  const int C = L / 3;
  if (C < 2)
    throw ComputeError("block averages need at least two countries");

  auto level = [](int country, corpus::PolPos g) {
    return country * 3 + static_cast<int>(g);
  };
  auto within = [&](corpus::PolPos g) {
    double sum = 0.0;
    int cnt = 0;
    for (int a = 0; a < C; ++a)
      for (int b = a + 1; b < C; ++b) {
        sum += sim.s(level(a, g), level(b, g));
        ++cnt;
      }
    return sum / cnt;
  };
  auto cross = [&](corpus::PolPos g1, corpus::PolPos g2) {
    double sum = 0.0;
    for (int a = 0; a < C; ++a)
      for (int b = 0; b < C; ++b) sum += sim.s(level(a, g1), level(b, g2));
    return sum / static_cast<double>(C) / static_cast<double>(C);
  };

  BlockSummary blocks;
  blocks.topic = sim.topic;
  blocks.within_left = within(corpus::PolPos::Left);
  blocks.within_center = within(corpus::PolPos::Center);
  blocks.within_right = within(corpus::PolPos::Right);
  blocks.left_right = cross(corpus::PolPos::Left, corpus::PolPos::Right);
  blocks.left_center = cross(corpus::PolPos::Left, corpus::PolPos::Center);
  blocks.center_right = cross(corpus::PolPos::Center, corpus::PolPos::Right);
  return blocks;
}

DimensionClass classify_dimension(const BlockSummary& blocks) {
  DimensionClass c;
  c.topic = blocks.topic;
  c.partisan = blocks.left_right < blocks.within_left &&
               blocks.left_right < blocks.within_right;
  c.right_splinter = blocks.within_right < blocks.left_right;
  c.left_splinter = blocks.within_left < blocks.left_right;
  return c;
}

SalienceTable salience_table(const stm::StmModel& model,
                             const corpus::Corpus& corpus) {
  const int K = model.K;
  const int L = model.L;
  SalienceTable table;
  table.topics = model.topic_names;
  for (int l = 0; l < L; ++l) table.groups.push_back(model.level_name(l));

  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(K, L);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(L);
  if (static_cast<Eigen::Index>(corpus.docs.size()) != model.theta.rows())
    throw ComputeError("salience: corpus/model document count mismatch");
  for (size_t d = 0; d < corpus.docs.size(); ++d) {
    int l = corpus.docs[d].group.content_level;
    counts(l) += 1.0;
    sums.col(l) += model.theta.row(static_cast<Eigen::Index>(d)).transpose();
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  table.raw.resize(K, L);
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k)
      table.raw(k, l) = counts(l) > 0.0 ? sums(k, l) / counts(l) : nan;

  table.normalized.resize(K, L);
  table.degenerate.assign(K, false);
  for (int k = 0; k < K; ++k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int l = 0; l < L; ++l) {
      double x = table.raw(k, l);
      if (std::isnan(x)) continue;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (!(hi > lo)) {
      table.degenerate[k] = true;
      table.normalized.row(k) = table.raw.row(k);
      continue;
    }
    for (int l = 0; l < L; ++l) {
      double x = table.raw(k, l);
      table.normalized(k, l) = std::isnan(x) ? nan : (x - lo) / (hi - lo);
    }
  }
  return table;
}

double feature_diff(const stm::StmModel& model, int topic, int feature) {
  const int C = static_cast<int>(model.countries.size());
  double right = 0.0, left = 0.0;
  for (int j = 0; j < C; ++j) {
    right += model.beta(j * 3 + 2, topic)[feature];
    left += model.beta(j * 3 + 0, topic)[feature];
  }
  return (right - left) / static_cast<double>(C);
}

std::vector<TopFeature> top_features_by_side(const stm::StmModel& model,
                                             const corpus::Vocabulary& vocab,
                                             int topic, int n_per_side) {
  auto left = side_mean_beta(model, topic, corpus::PolPos::Left);
  auto right = side_mean_beta(model, topic, corpus::PolPos::Right);

  std::set<int> chosen;
  for (int v : top_indices(left, vocab, n_per_side)) chosen.insert(v);
  for (int v : top_indices(right, vocab, n_per_side)) chosen.insert(v);

  std::vector<TopFeature> out;
  out.reserve(chosen.size());
  for (int v : chosen) {
    TopFeature f;
    f.feature = v;
    f.surface = vocab.features[v].surface;
    f.kind = vocab.features[v].kind;
    f.left_mean = left[v];
    f.right_mean = right[v];
    f.mean_prob = 0.5 * (left[v] + right[v]);
    f.diff = right[v] - left[v];
    out.push_back(std::move(f));
  }
  std::sort(out.begin(), out.end(), [](const TopFeature& a, const TopFeature& b) {
    if (a.diff != b.diff) return a.diff < b.diff;
    return a.surface < b.surface;
  });
  return out;
}

std::vector<PairRanking> pair_topic_rankings(
    const std::vector<SimilarityMatrix>& sims, const stm::StmModel& model,
    corpus::PolPos side, int n) {
  const int C = static_cast<int>(model.countries.size());
  const int K = model.K;
  if (static_cast<int>(sims.size()) != K)
    throw ComputeError("pair rankings need one similarity matrix per topic");
  for (const auto& sim : sims) require_full_levels(sim, model.L);
  n = std::clamp(n, 0, K);

  std::vector<PairRanking> out;
  for (int a = 0; a < C; ++a)
    for (int b = a + 1; b < C; ++b) {
      PairRanking pr;
      pr.country_a = model.countries[a];
      pr.country_b = model.countries[b];
      std::vector<RankedTopic> ranked(K);
      for (int k = 0; k < K; ++k)
        ranked[k] = {model.topic_names[k],
                     sims[k].s(a * 3 + static_cast<int>(side),
                               b * 3 + static_cast<int>(side))};
      auto desc = ranked;
      std::sort(desc.begin(), desc.end(),
                [](const RankedTopic& x, const RankedTopic& y) {
                  if (x.similarity != y.similarity)
                    return x.similarity > y.similarity;
                  return x.topic < y.topic;
                });
      auto asc = ranked;
      std::sort(asc.begin(), asc.end(),
                [](const RankedTopic& x, const RankedTopic& y) {
                  if (x.similarity != y.similarity)
                    return x.similarity < y.similarity;
                  return x.topic < y.topic;
                });
      pr.top.assign(desc.begin(), desc.begin() + n);
      pr.bottom.assign(asc.begin(), asc.begin() + n);
      out.push_back(std::move(pr));
    }
  return out;
}

WithinCountryLr within_country_lr(const std::vector<SimilarityMatrix>& sims,
                                  const stm::StmModel& model, int country) {
  if (static_cast<int>(sims.size()) != model.K)
    throw ComputeError("within_country_lr needs one matrix per topic");
  if (country < 0 || country >= static_cast<int>(model.countries.size()))
    throw ComputeError("country index out of range");
  WithinCountryLr row;
  row.country = model.countries[country];
  row.per_topic.resize(model.K);
  double sum = 0.0;
  for (int k = 0; k < model.K; ++k) {
    require_full_levels(sims[k], model.L);
    double v = sims[k].s(country * 3 + 0, country * 3 + 2);
    row.per_topic[k] = v;
    sum += v;
  }
  row.average = sum / static_cast<double>(model.K);
  return row;
}

Network association_network(const stm::StmModel& model,
                            const corpus::Vocabulary& vocab, int topic,
                            int level_a, int level_b, int top_n) {
  auto ba = model.beta(level_a, topic);
  auto bb = model.beta(level_b, topic);

  std::set<int> chosen;
  for (int v : top_indices(ba, vocab, top_n)) chosen.insert(v);
  for (int v : top_indices(bb, vocab, top_n)) chosen.insert(v);

  Network net;
  net.topic = topic;
  net.level_a = level_a;
  net.level_b = level_b;

  std::unordered_set<std::string> node_surfaces;
  for (int v : chosen) {
    if (vocab.features[v].kind != corpus::FeatureKind::unigram) continue;
    NetworkNode node;
    node.surface = vocab.features[v].surface;
    node.weight = 0.5 * (ba[v] + bb[v]);
    node.signed_diff = bb[v] - ba[v];
    node_surfaces.insert(node.surface);
    net.nodes.push_back(std::move(node));
  }
  std::sort(net.nodes.begin(), net.nodes.end(),
            [](const NetworkNode& a, const NetworkNode& b) {
              return a.surface < b.surface;
            });

  for (size_t v = 0; v < vocab.size(); ++v) {
    if (vocab.features[v].kind != corpus::FeatureKind::dep_pair) continue;
    const std::string& surface = vocab.features[v].surface;
    size_t sep = surface.find("->");
    std::string head = surface.substr(0, sep);
    std::string child = surface.substr(sep + 2);
    if (node_surfaces.count(head) == 0 || node_surfaces.count(child) == 0)
      continue;
    NetworkEdge edge;
    edge.head = head;
    edge.child = child;
    edge.weight = 0.5 * (ba[v] + bb[v]);
    edge.signed_diff = bb[v] - ba[v];
    net.edges.push_back(std::move(edge));
  }
  std::sort(net.edges.begin(), net.edges.end(),
            [](const NetworkEdge& a, const NetworkEdge& b) {
              if (a.head != b.head) return a.head < b.head;
              return a.child < b.child;
            });
  return net;
}

}  // namespace seedstm::analytics
