// Acceptance suite: one criterion per index, one [PASS]/[FAIL] line each.
// Run with no arguments for the full gauntlet or with a 1-based index to run
// a single criterion (the ctest registration does the latter).

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "seedstm/analytics.hpp"
#include "seedstm/config.hpp"
#include "seedstm/corpus.hpp"
#include "seedstm/error.hpp"
#include "seedstm/io.hpp"
#include "seedstm/lexicon.hpp"
#include "seedstm/rng.hpp"
#include "seedstm/stats.hpp"
#include "seedstm/stm.hpp"
#include "seedstm/synth.hpp"

namespace {

using namespace seedstm;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Failure {
  std::string detail;
};

void require(bool ok, const std::string& detail) {
  if (!ok) throw Failure{detail};
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string data_path(const char* name) {
  return std::string(SEEDSTM_DATA_DIR) + "/" + name;
}

struct Fixture {
  corpus::Corpus corpus;
  corpus::Vocabulary vocab;
  std::vector<corpus::RawRecord> records;
};

Fixture load_bundled_corpus() {
  Fixture f;
  f.records = corpus::read_records_jsonl(data_path("bios.jsonl"));
  auto counts = corpus::count_features(f.records, corpus::DepFallback::none, 2);
  f.vocab = corpus::build_vocabulary(counts, 5);
  f.corpus =
      corpus::build_corpus(f.records, f.vocab, corpus::DepFallback::none)
          .corpus;
  return f;
}

stm::ModelConfig fixture_model_config() {
  stm::ModelConfig cfg;
  cfg.max_iter = 40;
  cfg.rng_seed = 42;
  return cfg;  // emtol / seed_mass / kappa_l1 keep the published defaults
}

std::vector<double> random_simplex(rng::Stream& rng, size_t n) {
  std::vector<double> x(n);
  double sum = 0.0;
  for (auto& v : x) {
    v = -std::log(1.0 - rng.next_double());
    sum += v;
  }
  for (auto& v : x) v /= sum;
  return x;
}

double js_reference(const std::vector<double>& p, const std::vector<double>& q) {
  double total = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) total += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0.0) total += 0.5 * q[i] * std::log2(q[i] / m);
  }
  return total;
}

std::string sh_quote(const std::string& s) { return "'" + s + "'"; }

// ---------------------------------------------------------------------------
// 1. Seed-mass identity on a 500-feature vocabulary.
void criterion_seed_mass() {
  auto start = Clock::now();
  const int V = 500;
  corpus::Vocabulary vocab;
  for (int v = 0; v < V; ++v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "w%04d", v);
    vocab.features.push_back({corpus::FeatureKind::unigram, buf});
    vocab.counts.push_back(1000 + V - v);
  }
  vocab.rebuild_index();

  lexicon::SeedLexicon lex;
  int next = 0;
  for (int s_k : {7, 12, 1}) {
    lexicon::LexiconTopic t;
    t.name = "topic " + std::to_string(lex.topics.size());
    for (int s = 0; s < s_k; ++s, ++next)
      t.seeds.push_back({vocab.features[next], 0.1, 10.0});
    lex.topics.push_back(std::move(t));
  }

  const double seed_mass = 0.25;
  auto beta0 = stm::init_seeded(vocab, lex, seed_mass);
  require(beta0.size() == 4, "expected 3 seeded topics plus residual");

  for (size_t k = 0; k < lex.topics.size(); ++k) {
    double on_seeds = 0.0;
    for (const auto& seed : lex.topics[k].seeds) {
      int v = vocab.find(seed.feature.kind, seed.feature.surface);
      on_seeds += beta0[k][static_cast<size_t>(v)];
    }
    double s_k = static_cast<double>(lex.topics[k].seeds.size());
    double expect = seed_mass + s_k * (1.0 - seed_mass) / V;
    require(std::abs(on_seeds - expect) <= 1e-12,
            "seed mass off for topic " + std::to_string(k) + ": got " +
                std::to_string(on_seeds) + " want " + std::to_string(expect));
  }
  for (double p : beta0.back())
    require(std::abs(p - 1.0 / V) <= 1e-12, "residual topic is not uniform");

  double elapsed = seconds_since(start);
  require(elapsed < 1.0,
          "took " + std::to_string(elapsed) + " s (limit 1 s)");
}

// ---------------------------------------------------------------------------
// 2. Simplex suite after fitting the bundled corpus with the bundled lexicon.
void criterion_simplex() {
  auto start = Clock::now();
  auto fixture = load_bundled_corpus();
  require(fixture.vocab.size() == 200,
          "bundled vocabulary has " + std::to_string(fixture.vocab.size()) +
              " features, expected 200");
  require(fixture.corpus.docs.size() == 2000,
          "bundled corpus has " + std::to_string(fixture.corpus.docs.size()) +
              " docs, expected 2000");
  require(fixture.corpus.countries.size() == 2, "expected two countries");

  auto lex = lexicon::parse_lexicon_json(
      io::read_text_file(data_path("lexicon_planted.json")));
  require(lex.topics.size() == 5, "bundled lexicon should hold 5 topics");

  auto model =
      stm::fit(fixture.corpus, lex, fixture.vocab, fixture_model_config(), 2);
  require(model.K == 6, "expected K = 5 + residual");
  require(model.V == 200, "expected V = 200");
  require(model.L == 6, "expected 6 content levels");

  for (Eigen::Index d = 0; d < model.theta.rows(); ++d) {
    double sum = model.theta.row(d).sum();
    require(std::abs(sum - 1.0) <= 1e-8,
            "theta row " + std::to_string(d) + " sums to " +
                std::to_string(sum));
  }
  for (int l = 0; l < model.L; ++l)
    for (int k = 0; k < model.K; ++k) {
      auto b = model.beta(l, k);
      double sum = std::accumulate(b.begin(), b.end(), 0.0);
      require(std::abs(sum - 1.0) <= 1e-8,
              "beta(" + std::to_string(l) + "," + std::to_string(k) +
                  ") sums to " + std::to_string(sum));
    }

  double elapsed = seconds_since(start);
  require(elapsed < 120.0,
          "took " + std::to_string(elapsed) + " s (limit 120 s)");
}

// ---------------------------------------------------------------------------
// 3. Bound trace behavior and emtol stopping.
void criterion_bound() {
  auto fixture = load_bundled_corpus();
  auto lex = lexicon::parse_lexicon_json(
      io::read_text_file(data_path("lexicon_planted.json")));

  auto cfg = fixture_model_config();  // emtol = 1e-2
  auto model = stm::fit(fixture.corpus, lex, fixture.vocab, cfg, 2);
  const auto& trace = model.bound_trace;
  require(trace.size() >= 2, "trace too short to evaluate convergence");
  for (size_t i = 1; i < trace.size(); ++i) {
    double slack = 1e-4 * std::abs(trace[i - 1]);
    require(trace[i] >= trace[i - 1] - slack,
            "bound decreased at iteration " + std::to_string(i + 1) + ": " +
                std::to_string(trace[i - 1]) + " -> " +
                std::to_string(trace[i]));
  }
  require(model.convergence_reason == "emtol",
          "run did not stop on emtol (reason: " + model.convergence_reason +
              ")");
  double last = trace.back(), prev = trace[trace.size() - 2];
  double rel = std::abs(last - prev) / std::max(std::abs(prev), 1e-12);
  require(rel < 1e-2, "final relative change " + std::to_string(rel) +
                          " is not below emtol");

  auto tight = cfg;
  tight.emtol = 1e-4;
  auto model_tight = stm::fit(fixture.corpus, lex, fixture.vocab, tight, 2);
  require(model_tight.bound_trace.size() > trace.size(),
          "emtol=1e-4 ran " + std::to_string(model_tight.bound_trace.size()) +
              " iterations vs " + std::to_string(trace.size()) +
              " at 1e-2; expected strictly more");
}

// ---------------------------------------------------------------------------
// 4. Planted-topic recovery from a corpus generated with known parameters.
void criterion_planted_recovery() {
  auto start = Clock::now();
  auto records = synth::make_bios({});
  auto counts = corpus::count_features(records, corpus::DepFallback::none, 2);
  auto vocab = corpus::build_vocabulary(counts, 5);
  auto corpus =
      corpus::build_corpus(records, vocab, corpus::DepFallback::none).corpus;

  auto lex = synth::planted_lexicon();
  auto model = stm::fit(corpus, lex, vocab, fixture_model_config(), 2);

  auto truth = synth::planted_beta_on_vocab(vocab);
  require(truth.size() == 5, "expected 5 planted topics");
  for (const auto& row : truth) {
    double sum = std::accumulate(row.begin(), row.end(), 0.0);
    require(std::abs(sum - 1.0) <= 1e-12,
            "planted beta row does not cover the vocabulary");
  }

  // Level-averaged recovered distributions for the five seeded topics.
  std::vector<std::vector<double>> recovered(5,
                                             std::vector<double>(model.V, 0.0));
  for (int k = 0; k < 5; ++k)
    for (int l = 0; l < model.L; ++l) {
      auto b = model.beta(l, k);
      for (int v = 0; v < model.V; ++v)
        recovered[k][static_cast<size_t>(v)] +=
            b[static_cast<size_t>(v)] / model.L;
    }

  auto tv = [&](const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0.0;
    for (size_t v = 0; v < p.size(); ++v) s += std::abs(p[v] - q[v]);
    return 0.5 * s;
  };
  std::vector<int> perm{0, 1, 2, 3, 4};
  double best = std::numeric_limits<double>::infinity();
  do {
    double mean = 0.0;
    for (int k = 0; k < 5; ++k) mean += tv(truth[k], recovered[perm[k]]) / 5.0;
    best = std::min(best, mean);
  } while (std::next_permutation(perm.begin(), perm.end()));
  require(best <= 0.15, "mean total-variation distance after matching is " +
                            std::to_string(best) + " (limit 0.15)");

  // Sign recovery for every planted nonzero prevalence coefficient.
  auto design = stm::build_design(corpus);
  auto effects = stm::estimate_effects(model, design);
  const auto& u = synth::universe();
  struct Want {
    std::string topic;
    std::string term;
    double sign;
  };
  std::vector<Want> wants;
  for (int k = 0; k < synth::kPlantedTopics; ++k) {
    if (synth::planted_left_effect()[k] != 0.0)
      wants.push_back({u.topics[k].name, "left",
                       synth::planted_left_effect()[k] > 0 ? 1.0 : -1.0});
    if (synth::planted_right_effect()[k] != 0.0)
      wants.push_back({u.topics[k].name, "right",
                       synth::planted_right_effect()[k] > 0 ? 1.0 : -1.0});
  }
  require(wants.size() == 4, "fixture should plant four nonzero effects");
  for (const auto& want : wants) {
    bool found = false;
    for (const auto& row : effects.rows) {
      if (row.topic != want.topic || row.term != want.term) continue;
      found = true;
      require(row.estimate * want.sign > 0.0,
              want.topic + "/" + want.term + " has the wrong sign: " +
                  std::to_string(row.estimate));
      require(std::abs(row.t_value) > 2.0,
              want.topic + "/" + want.term + " has |t| = " +
                  std::to_string(std::abs(row.t_value)) + " (need > 2)");
    }
    require(found, "no effect row for " + want.topic + "/" + want.term);
  }

  double elapsed = seconds_since(start);
  require(elapsed < 300.0,
          "took " + std::to_string(elapsed) + " s (limit 300 s)");
}

// ---------------------------------------------------------------------------
// 5. Jensen-Shannon oracle and metric properties.
void criterion_js_oracle() {
  rng::Stream rng(1234, 0);
  for (int trial = 0; trial < 100; ++trial) {
    size_t n = 2 + rng.next_below(49);  // V in {2..50}
    auto p = random_simplex(rng, n);
    auto q = random_simplex(rng, n);
    double got = analytics::js_divergence(p, q);
    require(std::abs(got - js_reference(p, q)) <= 1e-12,
            "divergence off by more than 1e-12 at trial " +
                std::to_string(trial));
    require(std::abs(got - analytics::js_divergence(q, p)) <= 1e-15,
            "asymmetry beyond 1e-15 at trial " + std::to_string(trial));
    require(analytics::js_divergence(p, p) == 0.0, "JSD(P,P) != 0");
  }

  std::vector<double> a{0.3, 0.7, 0.0, 0.0, 0.0};
  std::vector<double> b{0.0, 0.0, 0.2, 0.5, 0.3};
  require(std::abs(analytics::js_divergence(a, b) - 1.0) <= 1e-12,
          "disjoint supports should give divergence 1");

  for (int trial = 0; trial < 1000; ++trial) {
    size_t n = 2 + rng.next_below(12);
    auto p = random_simplex(rng, n);
    auto q = random_simplex(rng, n);
    auto r = random_simplex(rng, n);
    double pq = std::sqrt(analytics::js_divergence(p, q));
    double pr = std::sqrt(analytics::js_divergence(p, r));
    double rq = std::sqrt(analytics::js_divergence(r, q));
    require(pq <= pr + rq + 1e-12,
            "sqrt(JSD) triangle inequality failed at triple " +
                std::to_string(trial));
  }
}

// ---------------------------------------------------------------------------
// 6. Block averages and dimension classification against brute force.
void criterion_blocks_oracle() {
  rng::Stream rng(77, 0);
  const int C = 8, L = 3 * C;
  for (int trial = 0; trial < 50; ++trial) {
    analytics::SimilarityMatrix sim;
    sim.topic = trial;
    sim.levels.resize(L);
    std::iota(sim.levels.begin(), sim.levels.end(), 0);
    sim.s.resize(L, L);
    for (int x = 0; x < L; ++x) {
      sim.s(x, x) = 1.0;
      for (int y = x + 1; y < L; ++y) {
        double v = rng.next_double();
        sim.s(x, y) = v;
        sim.s(y, x) = v;
      }
    }

    auto blocks = analytics::block_averages(sim);
    // Brute force with the same accumulation order: exact equality expected.
    auto within = [&](int g) {
      double sum = 0.0;
      int cnt = 0;
      for (int p = 0; p < C; ++p)
        for (int q = p + 1; q < C; ++q) {
          sum += sim.s(p * 3 + g, q * 3 + g);
          ++cnt;
        }
      return sum / cnt;
    };
    auto cross = [&](int g1, int g2) {
      double sum = 0.0;
      for (int p = 0; p < C; ++p)
        for (int q = 0; q < C; ++q) sum += sim.s(p * 3 + g1, q * 3 + g2);
      return sum / static_cast<double>(C) / static_cast<double>(C);
    };
    require(blocks.within_left == within(0), "within_left mismatch");
    require(blocks.within_center == within(1), "within_center mismatch");
    require(blocks.within_right == within(2), "within_right mismatch");
    require(blocks.left_right == cross(0, 2), "left_right mismatch");
    require(blocks.left_center == cross(0, 1), "left_center mismatch");
    require(blocks.center_right == cross(1, 2), "center_right mismatch");

    auto cls = analytics::classify_dimension(blocks);
    bool partisan = blocks.left_right < blocks.within_left &&
                    blocks.left_right < blocks.within_right;
    bool right_sp = blocks.within_right < blocks.left_right;
    bool left_sp = blocks.within_left < blocks.left_right;
    require(cls.partisan == partisan, "partisan flag disagrees");
    require(cls.right_splinter == right_sp, "right_splinter flag disagrees");
    require(cls.left_splinter == left_sp, "left_splinter flag disagrees");
    require(!(cls.partisan && (cls.right_splinter || cls.left_splinter)),
            "partisan co-occurred with a splinter flag");
  }
}

// ---------------------------------------------------------------------------
// 7. Lexicon determinism, exclusivity, and threshold recheck.
void criterion_lexicon_determinism() {
  auto fixture = load_bundled_corpus();
  auto sentences =
      lexicon::read_annotated_tsv(data_path("manifesto_mini.tsv"));

  lexicon::LexiconConfig cfg;
  cfg.min_sentences = 500;  // bundled annotated corpus is intentionally small

  lexicon::LexiconReport report;
  auto lex1 = lexicon::build_lexicon(sentences, fixture.vocab, cfg, &report, 1);
  auto lex2 = lexicon::build_lexicon(sentences, fixture.vocab, cfg, nullptr, 1);
  auto lex4 = lexicon::build_lexicon(sentences, fixture.vocab, cfg, nullptr, 4);
  std::string j1 = lexicon::write_lexicon_json(lex1);
  require(j1 == lexicon::write_lexicon_json(lex2),
          "lexicon differs between identical runs");
  require(j1 == lexicon::write_lexicon_json(lex4),
          "lexicon differs between 1 and 4 worker threads");

  std::set<std::pair<int, std::string>> seen;
  for (const auto& topic : lex1.topics)
    for (const auto& seed : topic.seeds)
      require(seen.insert({static_cast<int>(seed.feature.kind),
                           seed.feature.surface})
                  .second,
              "feature " + seed.feature.surface +
                  " appears under more than one topic");

  // Recheck every surviving seed against the three thresholds using
  // independently recomputed statistics.
  std::map<std::string, lexicon::ConsolidatedTopic> agg;
  for (const auto& s : sentences) {
    std::string name = lexicon::consolidate_label(s.raw_label);
    if (name.empty()) continue;
    auto& topic = agg[name];
    topic.name = name;
    topic.domain = s.domain;
    ++topic.sentence_count;
  }
  std::vector<lexicon::ConsolidatedTopic> consolidated;
  for (auto& [_, t] : agg) consolidated.push_back(t);
  auto kept = lexicon::filter_topics(consolidated, cfg.min_sentences);
  auto stats = lexicon::compute_topic_stats(sentences, kept, fixture.vocab, 2);

  for (const auto& topic : lex1.topics) {
    require(static_cast<int64_t>(topic.seeds.size()) >= cfg.min_seeds,
            "topic " + topic.name + " kept fewer than min_seeds seeds");
    const lexicon::TopicStats* ts = nullptr;
    for (const auto& cand : stats.topics)
      if (cand.name == topic.name) ts = &cand;
    require(ts != nullptr, "no recomputed stats for topic " + topic.name);
    for (const auto& seed : topic.seeds) {
      const lexicon::TopicStats::Entry* entry = nullptr;
      for (const auto& e : ts->ranked)
        if (e.feature == seed.feature) entry = &e;
      require(entry != nullptr,
              "seed " + seed.feature.surface + " missing from stats");
      require(entry->tfidf >= cfg.tfidf_min,
              "seed " + seed.feature.surface + " fails tfidf_min");
      require(entry->ref_total >= cfg.min_count_each,
              "seed " + seed.feature.surface + " fails ref_total");
      require(entry->target_total >= cfg.min_count_each,
              "seed " + seed.feature.surface + " fails target_total");
    }
  }
}

// ---------------------------------------------------------------------------
// 8. Effects regression coverage and exact intercept-only means.
void criterion_effects_regression() {
  // Balanced 2-country x 3-position corpus purely for its design matrix.
  corpus::Corpus c;
  c.countries = {"aland", "bland"};
  const int D = 300;
  for (int d = 0; d < D; ++d) {
    corpus::DocumentVector doc;
    doc.doc_id = "d" + std::to_string(d);
    doc.counts = {{0, 1}, {1, 1}};
    doc.group.country = d % 2;
    doc.group.pol_pos = static_cast<corpus::PolPos>((d / 2) % 3);
    doc.group.content_level =
        doc.group.country * 3 + static_cast<int>(doc.group.pol_pos);
    c.docs.push_back(std::move(doc));
  }
  auto design = stm::build_design(c);
  const int P = static_cast<int>(design.X.cols());
  const int K = 2;

  std::vector<std::vector<int>> hits(
      static_cast<size_t>(K), std::vector<int>(static_cast<size_t>(P), 0));
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    rng::Stream rng(4000 + trial, 0);
    Eigen::MatrixXd b_true(P, K);
    for (int p = 0; p < P; ++p)
      for (int k = 0; k < K; ++k)
        b_true(p, k) = 2.0 * rng.next_double() - 1.0;

    stm::StmModel model;
    model.K = K;
    model.countries = c.countries;
    model.topic_names = {"T0", "residual topic"};
    model.theta = design.X * b_true;
    for (Eigen::Index i = 0; i < model.theta.rows(); ++i)
      for (int k = 0; k < K; ++k)
        model.theta(i, k) += 0.01 * rng.next_gaussian();

    auto table = stm::estimate_effects(model, design);
    require(table.rows.size() == static_cast<size_t>(K * P),
            "unexpected effect table size");
    for (int k = 0; k < K; ++k)
      for (int p = 0; p < P; ++p) {
        const auto& row = table.rows[static_cast<size_t>(k * P + p)];
        require(row.term == design.terms[static_cast<size_t>(p)],
                "term order mismatch in effect table");
        if (std::abs(row.estimate - b_true(p, k)) <= 3.0 * row.std_error)
          ++hits[static_cast<size_t>(k)][static_cast<size_t>(p)];
      }
  }
  for (int k = 0; k < K; ++k)
    for (int p = 0; p < P; ++p)
      require(hits[static_cast<size_t>(k)][static_cast<size_t>(p)] >= 95,
              "coverage for topic " + std::to_string(k) + ", term " +
                  design.terms[static_cast<size_t>(p)] + " is " +
                  std::to_string(hits[static_cast<size_t>(k)]
                                     [static_cast<size_t>(p)]) +
                  "/100 (need >= 95)");

  // Intercept-only design: estimates are exactly the per-topic means.
  stm::PrevalenceDesign ones;
  ones.X = Eigen::MatrixXd::Ones(D, 1);
  ones.terms = {"(Intercept)"};
  stm::StmModel model;
  model.K = K;
  model.countries = {"aland"};
  model.topic_names = {"T0", "residual topic"};
  model.theta.resize(D, K);
  rng::Stream rng(9, 0);
  for (int d = 0; d < D; ++d) {
    double u = rng.next_double();
    model.theta(d, 0) = u;
    model.theta(d, 1) = 1.0 - u;
  }
  auto table = stm::estimate_effects(model, ones);
  require(table.rows.size() == 2, "intercept-only table should have 2 rows");
  for (int k = 0; k < K; ++k) {
    double mean = model.theta.col(k).mean();
    require(std::abs(table.rows[static_cast<size_t>(k)].estimate - mean) <=
                1e-12,
            "intercept-only estimate is not the topic mean");
  }
}

// ---------------------------------------------------------------------------
// 9. Stats oracles: pearson, quasi-binomial GLM, bootstrap.
void criterion_stats_oracle() {
  rng::Stream rng(31337, 0);

  // Pearson vs the covariance formula on 1,000 random vectors.
  for (int trial = 0; trial < 1000; ++trial) {
    size_t n = 3 + rng.next_below(58);
    std::vector<double> x(n), y(n);
    for (size_t i = 0; i < n; ++i) {
      x[i] = rng.next_gaussian();
      y[i] = 0.3 * x[i] + rng.next_gaussian();
    }
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      syy += (y[i] - my) * (y[i] - my);
      sxy += (x[i] - mx) * (y[i] - my);
    }
    double expect = sxy / std::sqrt(sxx * syy);
    require(std::abs(stats::pearson(x, y) - expect) <= 1e-12,
            "pearson off at trial " + std::to_string(trial));
  }

  // Quasi-binomial GLM vs an IRLS oracle written independently (closed-form
  // 2x2 solve, its own convergence rule).
  const int n = 60;
  std::vector<double> gx(n), gy(n);
  for (int i = 0; i < n; ++i) {
    gx[i] = -2.0 + 4.0 * static_cast<double>(i) / (n - 1);
    double p = 1.0 / (1.0 + std::exp(-(0.3 + 1.2 * gx[i])));
    gy[i] = std::clamp(p + 0.02 * rng.next_gaussian(), 0.01, 0.99);
  }
  auto glm = stats::glm_quasibinomial(gy, gx);

  double a = 0.0, b = 0.0;
  for (int iter = 0; iter < 500; ++iter) {
    double s_w = 0.0, s_wx = 0.0, s_wxx = 0.0, s_wz = 0.0, s_wxz = 0.0;
    for (int i = 0; i < n; ++i) {
      double eta = a + b * gx[i];
      double mu = 1.0 / (1.0 + std::exp(-eta));
      mu = std::clamp(mu, 1e-10, 1.0 - 1e-10);
      double w = mu * (1.0 - mu);
      double z = eta + (gy[i] - mu) / w;
      s_w += w;
      s_wx += w * gx[i];
      s_wxx += w * gx[i] * gx[i];
      s_wz += w * z;
      s_wxz += w * gx[i] * z;
    }
    double det = s_w * s_wxx - s_wx * s_wx;
    double na = (s_wxx * s_wz - s_wx * s_wxz) / det;
    double nb = (s_w * s_wxz - s_wx * s_wz) / det;
    double delta = std::max(std::abs(na - a), std::abs(nb - b));
    a = na;
    b = nb;
    if (delta < 1e-12) break;
  }
  double chi2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double mu = 1.0 / (1.0 + std::exp(-(a + b * gx[i])));
    chi2 += (gy[i] - mu) * (gy[i] - mu) / (mu * (1.0 - mu));
  }
  double disp = chi2 / (n - 2);
  require(std::abs(glm.intercept - a) <= 1e-3,
          "GLM intercept differs from the IRLS oracle by " +
              std::to_string(std::abs(glm.intercept - a)));
  require(std::abs(glm.slope - b) <= 1e-3,
          "GLM slope differs from the IRLS oracle by " +
              std::to_string(std::abs(glm.slope - b)));
  require(std::abs(glm.dispersion - disp) <= 0.05 * disp,
          "GLM dispersion " + std::to_string(glm.dispersion) +
              " is more than 5% from " + std::to_string(disp));

  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(-3.0 + 0.06 * i);
  for (const auto& pt : stats::fitted_curve(glm, grid)) {
    require(pt.fit > 0.0 && pt.fit < 1.0, "fitted value outside (0,1)");
    require(pt.lower > 0.0 && pt.upper < 1.0, "interval outside (0,1)");
    require(pt.lower <= pt.fit && pt.fit <= pt.upper,
            "interval does not bracket the fit");
  }

  // Bootstrap: bit-reproducible under any thread count; CI contains the
  // plug-in r on a well-conditioned 50-point sample.
  std::vector<double> bx(50), by(50);
  for (int i = 0; i < 50; ++i) {
    bx[i] = rng.next_gaussian();
    by[i] = 0.8 * bx[i] + 0.4 * rng.next_gaussian();
  }
  auto boot1 = stats::bootstrap_ci(bx, by, 2000, {0.05, 0.95}, 99, 1);
  auto boot7 = stats::bootstrap_ci(bx, by, 2000, {0.05, 0.95}, 99, 7);
  require(boot1.mean_r == boot7.mean_r && boot1.lower == boot7.lower &&
              boot1.upper == boot7.upper && boot1.skipped == boot7.skipped,
          "bootstrap output depends on the thread count");
  double r = stats::pearson(bx, by);
  require(boot1.lower <= r && r <= boot1.upper,
          "plug-in r " + std::to_string(r) + " outside the bootstrap CI [" +
              std::to_string(boot1.lower) + ", " +
              std::to_string(boot1.upper) + "]");
}

// ---------------------------------------------------------------------------
// 10. End-to-end pipeline through the CLI plus independent recomputation.
void criterion_end_to_end() {
  auto start = Clock::now();
  const std::string root = fs::path(SEEDSTM_DATA_DIR).parent_path().string();
  const std::string outdir =
      (fs::temp_directory_path() / "seedstm_acceptance_out").string();
  fs::remove_all(outdir);
  fs::create_directories(outdir);
  const std::string log = outdir + "/pipeline.log";

  auto run = [&](const std::string& args) {
    std::string cmd = "cd " + sh_quote(root) + " && SEEDSTM_OUTPUT_DIR=" +
                      sh_quote(outdir) + " " + sh_quote(SEEDSTM_CLI_PATH) +
                      " --config data/fixture_config.toml " + args + " >> " +
                      sh_quote(log) + " 2>&1";
    int rc = std::system(cmd.c_str());
    if (rc != 0) {
      std::string tail;
      try {
        tail = io::read_text_file(log);
        if (tail.size() > 600) tail = tail.substr(tail.size() - 600);
      } catch (...) {
      }
      require(false, "command `" + args + "` exited with " +
                         std::to_string(rc) + "\n" + tail);
    }
  };

  run("build-lexicon");
  run("fit");
  run("analyze");
  run("correlate --similarity data/table4_similarity.csv");

  // Schema spot checks on each output family.
  auto model_json = nlohmann::json::parse(
      io::read_text_file(outdir + "/model.json"));
  require(model_json["k"].get<int>() == 7,
          "fitted model should have 6 lexicon topics + residual");
  auto stats_json =
      nlohmann::json::parse(io::read_text_file(outdir + "/stats.json"));
  for (const char* key :
       {"pearson_r", "bootstrap", "glm", "observations"})
    require(stats_json.contains(key),
            std::string("stats.json lacks key ") + key);
  require(stats_json["observations"].size() >= 3,
          "fewer than 3 matched countries in stats.json");
  std::string effects = io::read_text_file(outdir + "/effects.csv");
  require(effects.rfind("topic,term,estimate,std_error,t_value,p_value,"
                        "signif\n",
                        0) == 0,
          "effects.csv header mismatch");
  bool saw_graphml = false;
  for (const auto& entry : fs::directory_iterator(outdir)) {
    if (entry.path().extension() == ".graphml") {
      std::string g = io::read_text_file(entry.path().string());
      require(g.find("<graphml") != std::string::npos &&
                  g.find("</graphml>") != std::string::npos,
              "malformed GraphML in " + entry.path().filename().string());
      saw_graphml = true;
    }
  }
  require(saw_graphml, "no GraphML outputs were produced");

  // Independent recomputation of every analytics table from the exported
  // beta/theta matrices.
  std::string cmd = "cd " + sh_quote(root) + " && python3 " +
                    sh_quote(SEEDSTM_RECOMPUTE_PY) + " " + sh_quote(outdir) +
                    " --top-n 15 >> " + sh_quote(log) + " 2>&1";
  int rc = std::system(cmd.c_str());
  if (rc != 0) {
    std::string tail;
    try {
      tail = io::read_text_file(log);
      if (tail.size() > 600) tail = tail.substr(tail.size() - 600);
    } catch (...) {
    }
    require(false,
            "analytics recomputation script exited with " +
                std::to_string(rc) + "\n" + tail);
  }

  double elapsed = seconds_since(start);
  require(elapsed < 600.0,
          "took " + std::to_string(elapsed) + " s (limit 600 s)");
}

// ---------------------------------------------------------------------------
// 11. Published parameter defaults, asserted literally.
void criterion_defaults() {
  stm::ModelConfig mc;
  require(mc.seed_mass == 0.25, "seed_mass default is not 0.25");
  require(mc.emtol == 1e-2, "emtol default is not 1e-2");

  lexicon::LexiconConfig lc;
  require(lc.per_topic == 100, "per_topic default is not 100");
  require(lc.tfidf_min == 5.0, "tfidf_min default is not 5");
  require(lc.min_count_each == 50, "min_count_each default is not 50");
  require(lc.min_seeds == 3, "min_seeds default is not 3");
  require(lc.min_sentences == 5000, "min_sentences default is not 5000");

  config::PipelineConfig pc;
  require(pc.b == 10000, "bootstrap B default is not 10000");
  require(pc.quantiles.first == 0.05 && pc.quantiles.second == 0.95,
          "bootstrap quantile defaults are not (0.05, 0.95)");
  require(pc.per_topic == 100 && pc.tfidf_min == 5.0 &&
              pc.min_count_each == 50 && pc.min_seeds == 3 &&
              pc.min_sentences == 5000,
          "pipeline lexicon defaults drifted from published values");
  require(pc.seed_mass == 0.25 && pc.emtol == 1e-2,
          "pipeline model defaults drifted from published values");
}

struct Criterion {
  const char* name;
  void (*fn)();
};

const std::array<Criterion, 11> kCriteria = {{
    {"seed-mass identity", criterion_seed_mass},
    {"simplex suite", criterion_simplex},
    {"bound behavior", criterion_bound},
    {"planted-topic recovery", criterion_planted_recovery},
    {"JS oracle", criterion_js_oracle},
    {"block/classification oracle", criterion_blocks_oracle},
    {"lexicon determinism + exclusivity", criterion_lexicon_determinism},
    {"effects regression", criterion_effects_regression},
    {"stats oracle", criterion_stats_oracle},
    {"end-to-end pipeline", criterion_end_to_end},
    {"parameter defaults audit", criterion_defaults},
}};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
    if (only < 1 || only > static_cast<int>(kCriteria.size())) {
      std::cerr << "usage: " << argv[0] << " [1-" << kCriteria.size()
                << "]\n";
      return 2;
    }
  }

  int failures = 0;
  for (size_t i = 0; i < kCriteria.size(); ++i) {
    int idx = static_cast<int>(i) + 1;
    if (only != 0 && idx != only) continue;
    try {
      kCriteria[i].fn();
      std::cout << "[PASS] criterion " << idx << ": " << kCriteria[i].name
                << "\n";
    } catch (const Failure& f) {
      std::cout << "[FAIL] criterion " << idx << ": " << kCriteria[i].name
                << " — " << f.detail << "\n";
      ++failures;
    } catch (const std::exception& e) {
      std::cout << "[FAIL] criterion " << idx << ": " << kCriteria[i].name
                << " — unexpected exception: " << e.what() << "\n";
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}
