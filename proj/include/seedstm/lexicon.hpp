#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "seedstm/corpus.hpp"

namespace seedstm::lexicon {

struct AnnotatedSentence {
  std::string text;
  std::string raw_label;
  std::string domain;
};

struct ConsolidatedTopic {
  std::string name;
  std::string domain;
  int64_t sentence_count = 0;
};

// Per-topic feature statistics, ranked by (rf desc, count desc, surface asc).
struct TopicStats {
  std::string name;
  std::string domain;
  int64_t sentence_count = 0;
  int64_t total_feature_count = 0;  // rf denominator

  struct Entry {
    corpus::Feature feature;
    int64_t count = 0;        // occurrences inside this topic
    double rf = 0.0;
    double tfidf = 0.0;
    int64_t ref_total = 0;     // occurrences across the whole annotated corpus
    int64_t target_total = 0;  // occurrences in the target corpus vocabulary
  };
  std::vector<Entry> ranked;
};

struct TopicFeatureStats {
  std::vector<TopicStats> topics;  // topic name ascending
};

struct Seed {
  corpus::Feature feature;
  double rf = 0.0;
  double tfidf = 0.0;
};

struct LexiconTopic {
  std::string name;
  std::string domain;
  std::vector<Seed> seeds;
};

struct SeedLexicon {
  std::vector<LexiconTopic> topics;  // topic name ascending
  int64_t total_features = 0;
};

struct LexiconConfig {
  int64_t min_sentences = 5000;
  int64_t per_topic = 100;
  double tfidf_min = 5.0;
  int64_t min_count_each = 50;
  int64_t min_seeds = 3;
};

struct LexiconReport {
  int64_t sentences_total = 0;
  int64_t sentences_excluded = 0;  // empty label after consolidation
  int64_t topics_before_filter = 0;
  int64_t topics_after_filter = 0;
  std::map<std::string, int64_t> final_seed_counts;
};

// Strip trailing +/- runs, a case-insensitive ": general" suffix, anything
// from the first "." onward, then trim. Empty result = excluded sentence.
std::string consolidate_label(const std::string& raw_label);

std::vector<ConsolidatedTopic> filter_topics(
    const std::vector<ConsolidatedTopic>& consolidated, int64_t min_sentences);

// Sentence features are unigrams plus adjacent-bigram pairs, matching the
// target corpus extraction. rf is the within-topic count share; tfidf uses
// topic-as-document counts with natural-log IDF.
TopicFeatureStats compute_topic_stats(
    const std::vector<AnnotatedSentence>& sentences,
    const std::vector<ConsolidatedTopic>& topics,
    const corpus::Vocabulary& target_vocab, int threads = 1);

// Round-robin exclusive assignment: topics visited in name order, each visit
// claims the topic's highest-ranked unclaimed feature, until every topic has
// per_topic candidates or runs out.
SeedLexicon assign_seeds(const TopicFeatureStats& stats, int64_t per_topic);

SeedLexicon finalize_lexicon(const SeedLexicon& candidates,
                             const TopicFeatureStats& stats, double tfidf_min,
                             int64_t min_count_each, int64_t min_seeds);

// Full pipeline: consolidate -> filter -> stats -> assign -> finalize.
SeedLexicon build_lexicon(const std::vector<AnnotatedSentence>& sentences,
                          const corpus::Vocabulary& target_vocab,
                          const LexiconConfig& config, LexiconReport* report,
                          int threads = 1);

std::vector<AnnotatedSentence> read_annotated_tsv(const std::string& path);

std::string write_lexicon_json(const SeedLexicon& lexicon);
SeedLexicon parse_lexicon_json(const std::string& text);
std::string write_seed_report_csv(const SeedLexicon& lexicon);

}  // namespace seedstm::lexicon
