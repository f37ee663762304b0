#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace seedstm::corpus {

enum class FeatureKind { unigram, dep_pair };
enum class PolPos { Left = 0, Center = 1, Right = 2 };
enum class DepFallback { bigram, none };

const std::string& kind_name(FeatureKind k);
FeatureKind parse_kind(std::string_view s);
const std::string& pol_pos_name(PolPos p);        // "Left" / "Center" / "Right"
const std::string& pol_pos_term(PolPos p);        // "left" / "center" / "right"

struct Feature {
  FeatureKind kind;
  std::string surface;
  bool operator==(const Feature&) const = default;
};

struct RawRecord {
  std::string doc_id;
  std::string text;
  std::string country;
  double lr_score = 0.0;
  bool has_dep_pairs = false;       // field present in the input record
  std::vector<std::string> dep_pairs;
};

struct Vocabulary {
  std::vector<Feature> features;    // dense indices 0..V-1
  std::vector<int64_t> counts;

  std::size_t size() const { return features.size(); }
  // -1 when absent.
  int find(FeatureKind kind, std::string_view surface) const;
  void rebuild_index();

 private:
  std::unordered_map<std::string, int> index_;  // key: kind tag + surface
};

struct GroupLabel {
  int country = 0;                  // index into Corpus::countries
  PolPos pol_pos = PolPos::Center;
  int content_level = 0;            // country * 3 + pol_pos
};

struct DocumentVector {
  std::string doc_id;
  std::vector<std::pair<int, int64_t>> counts;  // (feature index, count), index asc
  GroupLabel group;
};

struct Corpus {
  std::vector<DocumentVector> docs;
  std::vector<std::string> countries;  // sorted ascending; index 0 = reference
  int levels() const { return static_cast<int>(countries.size()) * 3; }
  std::string level_name(int l) const;  // "pol_pos:country", e.g. "left:france"
};

struct DropReport {
  int64_t kept = 0;
  int64_t too_short = 0;      // fewer than 2 distinct in-vocabulary features
  int64_t bad_lr_score = 0;   // lr_score outside [0,10]
  int64_t malformed_dep_pairs = 0;  // skipped pair strings (warnings, not drops)
  std::vector<std::string> rejected_ids;  // ids dropped for bad_lr_score
};

// Lowercased, ASCII-punctuation-stripped, whitespace-split tokens in text
// order; no stemming. Tokens that strip to nothing are omitted.
std::vector<std::string> tokenize_ordered(std::string_view text);
// Multiset view of the same tokens.
std::map<std::string, int64_t> tokenize(std::string_view text);

// Dep-pair surfaces for one record: passthrough of normalized precomputed
// pairs when the field is present, otherwise adjacent-bigram fallback (or
// nothing). Malformed pair strings are skipped and counted.
std::vector<std::string> derive_dep_pairs(const RawRecord& rec,
                                          DepFallback fallback,
                                          const std::vector<std::string>& tokens,
                                          int64_t* malformed);

PolPos discretize_lr(double score);  // throws InputError outside [0,10]

struct FeatureCounts {
  std::map<std::string, int64_t> unigrams;
  std::map<std::string, int64_t> dep_pairs;
  int64_t malformed_dep_pairs = 0;
};

FeatureCounts count_features(const std::vector<RawRecord>& records,
                             DepFallback fallback, int threads = 1);

// Features with count >= min_count, ordered by (count desc, surface asc).
Vocabulary build_vocabulary(const FeatureCounts& counts, int64_t min_count);

struct BuildResult {
  Corpus corpus;
  DropReport report;
};

BuildResult build_corpus(const std::vector<RawRecord>& records,
                         const Vocabulary& vocab, DepFallback fallback);

// Input readers. JSONL: one object per line with doc_id, text, country,
// lr_score, optional dep_pairs array. TSV: header row with the same column
// names, dep_pairs comma-joined (empty cell = absent).
std::vector<RawRecord> read_records_jsonl(const std::string& path);
std::vector<RawRecord> read_records_tsv(const std::string& path);
std::vector<RawRecord> read_records(const std::string& path);  // by extension

// Artifact serialization (all 0-based indices, tab-separated, header row).
std::string write_vocabulary_tsv(const Vocabulary& vocab);
Vocabulary parse_vocabulary_tsv(const std::string& text);
std::string write_doc_triplets(const Corpus& corpus);
std::string write_doc_metadata(const Corpus& corpus);
Corpus parse_corpus_artifacts(const std::string& triplets_text,
                              const std::string& metadata_text);

}  // namespace seedstm::corpus
