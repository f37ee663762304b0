#include "seedstm/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "seedstm/error.hpp"
#include "seedstm/parallel.hpp"
#include "seedstm/strings.hpp"

namespace seedstm::lexicon {

namespace {

using corpus::Feature;
using corpus::FeatureKind;

std::string feat_key(FeatureKind kind, const std::string& surface) {
  std::string key(1, kind == FeatureKind::unigram ? 'u' : 'd');
  key += surface;
  return key;
}

Feature key_to_feature(const std::string& key) {
  return {key[0] == 'u' ? FeatureKind::unigram : FeatureKind::dep_pair,
          key.substr(1)};
}

// Unigrams plus adjacent-bigram pairs for one sentence, multiset as a map.
std::map<std::string, int64_t> sentence_features(const std::string& text) {
  std::map<std::string, int64_t> out;
  auto tokens = corpus::tokenize_ordered(text);
  for (const auto& t : tokens) ++out[feat_key(FeatureKind::unigram, t)];
  for (size_t i = 0; i + 1 < tokens.size(); ++i)
    ++out[feat_key(FeatureKind::dep_pair, tokens[i] + "->" + tokens[i + 1])];
  return out;
}

bool rank_before(const TopicStats::Entry& a, const TopicStats::Entry& b) {
  if (a.rf != b.rf) return a.rf > b.rf;
  if (a.count != b.count) return a.count > b.count;
  return a.feature.surface < b.feature.surface;
}

}  // namespace

std::string consolidate_label(const std::string& raw_label) {
  std::string s = raw_label;
  while (!s.empty() &&
         (s.back() == '+' || s.back() == '-' ||
          std::isspace(static_cast<unsigned char>(s.back()))))
    s.pop_back();
  if (strings::ends_with_ci(s, ": general"))
    s.resize(s.size() - std::string(": general").size());
  size_t dot = s.find('.');
  if (dot != std::string::npos) s.resize(dot);
  return strings::trim(s);
}

std::vector<ConsolidatedTopic> filter_topics(
    const std::vector<ConsolidatedTopic>& consolidated, int64_t min_sentences) {
  std::vector<ConsolidatedTopic> out;
  for (const auto& t : consolidated)
    if (t.sentence_count >= min_sentences) out.push_back(t);
  if (out.empty())
    throw ComputeError("no topics survive min_sentences=" +
                       std::to_string(min_sentences));
  return out;
}

TopicFeatureStats compute_topic_stats(
    const std::vector<AnnotatedSentence>& sentences,
    const std::vector<ConsolidatedTopic>& topics,
    const corpus::Vocabulary& target_vocab, int threads) {
  std::unordered_map<std::string, size_t> topic_index;
  for (size_t i = 0; i < topics.size(); ++i) topic_index[topics[i].name] = i;
  const size_t T = topics.size();

  struct Partial {
    std::vector<std::map<std::string, int64_t>> per_topic;
    std::map<std::string, int64_t> ref_total;
  };
  std::vector<std::map<std::string, int64_t>> per_topic(T);
  std::map<std::string, int64_t> ref_total;

  parallel::ordered_block_reduce<Partial>(
      sentences.size(), threads, 512,
      [&](size_t lo, size_t hi, Partial& part) {
        part.per_topic.resize(T);
        for (size_t i = lo; i < hi; ++i) {
          auto feats = sentence_features(sentences[i].text);
          for (const auto& [k, c] : feats) part.ref_total[k] += c;
          auto it = topic_index.find(consolidate_label(sentences[i].raw_label));
          if (it == topic_index.end()) continue;
          auto& bucket = part.per_topic[it->second];
          for (const auto& [k, c] : feats) bucket[k] += c;
        }
      },
      [&](Partial& part) {
        for (const auto& [k, c] : part.ref_total) ref_total[k] += c;
        for (size_t t = 0; t < T; ++t)
          for (const auto& [k, c] : part.per_topic[t]) per_topic[t][k] += c;
      });

  // Document frequency with each topic's aggregated text as one document.
  std::map<std::string, int64_t> df;
  for (size_t t = 0; t < T; ++t)
    for (const auto& [k, c] : per_topic[t]) ++df[k];

  TopicFeatureStats stats;
  stats.topics.resize(T);
  for (size_t t = 0; t < T; ++t) {
    TopicStats& ts = stats.topics[t];
    ts.name = topics[t].name;
    ts.domain = topics[t].domain;
    ts.sentence_count = topics[t].sentence_count;
    int64_t total = 0;
    for (const auto& [k, c] : per_topic[t]) total += c;
    ts.total_feature_count = total;
    ts.ranked.reserve(per_topic[t].size());
    for (const auto& [k, c] : per_topic[t]) {
      TopicStats::Entry e;
      e.feature = key_to_feature(k);
      e.count = c;
      e.rf = static_cast<double>(c) / static_cast<double>(total);
      e.tfidf = static_cast<double>(c) *
                std::log(static_cast<double>(T) / static_cast<double>(df[k]));
      e.ref_total = ref_total[k];
      int idx = target_vocab.find(e.feature.kind, e.feature.surface);
      e.target_total = idx < 0 ? 0 : target_vocab.counts[idx];
      ts.ranked.push_back(std::move(e));
    }
    std::sort(ts.ranked.begin(), ts.ranked.end(), rank_before);
  }
  return stats;
}

SeedLexicon assign_seeds(const TopicFeatureStats& stats, int64_t per_topic) {
  const size_t T = stats.topics.size();
  SeedLexicon lex;
  lex.topics.resize(T);
  for (size_t t = 0; t < T; ++t) {
    lex.topics[t].name = stats.topics[t].name;
    lex.topics[t].domain = stats.topics[t].domain;
  }

  std::unordered_set<std::string> claimed;
  std::vector<size_t> pos(T, 0);
  std::vector<bool> active(T, true);
  size_t n_active = T;
  while (n_active > 0) {
    for (size_t t = 0; t < T; ++t) {
      if (!active[t]) continue;
      if (static_cast<int64_t>(lex.topics[t].seeds.size()) >= per_topic) {
        active[t] = false;
        --n_active;
        continue;
      }
      const auto& ranked = stats.topics[t].ranked;
      size_t& p = pos[t];
      while (p < ranked.size() &&
             claimed.count(feat_key(ranked[p].feature.kind,
                                    ranked[p].feature.surface)) > 0)
        ++p;
      if (p >= ranked.size()) {
        active[t] = false;
        --n_active;
        continue;
      }
      const auto& e = ranked[p];
      claimed.insert(feat_key(e.feature.kind, e.feature.surface));
      lex.topics[t].seeds.push_back({e.feature, e.rf, e.tfidf});
      ++p;
    }
  }
  for (const auto& t : lex.topics)
    lex.total_features += static_cast<int64_t>(t.seeds.size());
  return lex;
}

SeedLexicon finalize_lexicon(const SeedLexicon& candidates,
                             const TopicFeatureStats& stats, double tfidf_min,
                             int64_t min_count_each, int64_t min_seeds) {
  std::unordered_map<std::string, const TopicStats*> by_name;
  for (const auto& ts : stats.topics) by_name[ts.name] = &ts;

  SeedLexicon out;
  for (const auto& topic : candidates.topics) {
    auto it = by_name.find(topic.name);
    if (it == by_name.end())
      throw ComputeError("candidate topic missing from stats: " + topic.name);
    std::unordered_map<std::string, const TopicStats::Entry*> entries;
    for (const auto& e : it->second->ranked)
      entries[feat_key(e.feature.kind, e.feature.surface)] = &e;

    LexiconTopic kept;
    kept.name = topic.name;
    kept.domain = topic.domain;
    for (const auto& seed : topic.seeds) {
      const auto* e =
          entries.at(feat_key(seed.feature.kind, seed.feature.surface));
      if (e->tfidf < tfidf_min) continue;
      if (e->ref_total < min_count_each || e->target_total < min_count_each)
        continue;
      kept.seeds.push_back(seed);
    }
    if (static_cast<int64_t>(kept.seeds.size()) >= min_seeds)
      out.topics.push_back(std::move(kept));
  }
  if (out.topics.empty()) throw ComputeError("all topics dropped");
  for (const auto& t : out.topics)
    out.total_features += static_cast<int64_t>(t.seeds.size());
  return out;
}

SeedLexicon build_lexicon(const std::vector<AnnotatedSentence>& sentences,
                          const corpus::Vocabulary& target_vocab,
                          const LexiconConfig& config, LexiconReport* report,
                          int threads) {
  struct Agg {
    std::set<std::string> domains;
    int64_t count = 0;
  };
  std::map<std::string, Agg> by_name;
  int64_t excluded = 0;
  for (const auto& s : sentences) {
    std::string name = consolidate_label(s.raw_label);
    if (name.empty()) {
      ++excluded;
      continue;
    }
    Agg& a = by_name[name];
    a.domains.insert(s.domain);
    ++a.count;
  }
  std::vector<ConsolidatedTopic> consolidated;
  consolidated.reserve(by_name.size());
  for (const auto& [name, agg] : by_name)
    consolidated.push_back(
        {name, agg.domains.empty() ? "" : *agg.domains.begin(), agg.count});

  auto surviving = filter_topics(consolidated, config.min_sentences);
  auto stats = compute_topic_stats(sentences, surviving, target_vocab, threads);
  auto candidates = assign_seeds(stats, config.per_topic);
  auto lex = finalize_lexicon(candidates, stats, config.tfidf_min,
                              config.min_count_each, config.min_seeds);
  if (report != nullptr) {
    report->sentences_total = static_cast<int64_t>(sentences.size());
    report->sentences_excluded = excluded;
    report->topics_before_filter = static_cast<int64_t>(consolidated.size());
    report->topics_after_filter = static_cast<int64_t>(surviving.size());
    for (const auto& t : lex.topics)
      report->final_seed_counts[t.name] = static_cast<int64_t>(t.seeds.size());
  }
  return lex;
}

}  // namespace seedstm::lexicon
