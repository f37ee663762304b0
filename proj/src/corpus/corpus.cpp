#include "seedstm/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <unordered_set>

#include "seedstm/error.hpp"
#include "seedstm/parallel.hpp"
#include "seedstm/strings.hpp"

namespace seedstm::corpus {

namespace {

const std::string kKindNames[] = {"unigram", "dep_pair"};
const std::string kPolNames[] = {"Left", "Center", "Right"};
const std::string kPolTerms[] = {"left", "center", "right"};

bool is_ascii_space(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return u < 128 && std::isspace(u);
}

bool is_ascii_punct(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return u < 128 && std::ispunct(u);
}

std::string vocab_key(FeatureKind kind, std::string_view surface) {
  std::string key(1, kind == FeatureKind::unigram ? 'u' : 'd');
  key += surface;
  return key;
}

// Normalize one precomputed dep-pair string; empty result = malformed.
std::string normalize_pair(std::string_view raw) {
  std::string s = strings::lower(strings::trim(raw));
  size_t first = s.find("->");
  if (first == std::string::npos) return "";
  if (s.find("->", first + 2) != std::string::npos) return "";
  std::string head = strings::trim(s.substr(0, first));
  std::string child = strings::trim(s.substr(first + 2));
  if (head.empty() || child.empty()) return "";
  return head + "->" + child;
}

}  // namespace

const std::string& kind_name(FeatureKind k) {
  return kKindNames[static_cast<int>(k)];
}

FeatureKind parse_kind(std::string_view s) {
  if (s == "unigram") return FeatureKind::unigram;
  if (s == "dep_pair") return FeatureKind::dep_pair;
  throw InputError("unknown feature kind: " + std::string(s));
}

const std::string& pol_pos_name(PolPos p) {
  return kPolNames[static_cast<int>(p)];
}

const std::string& pol_pos_term(PolPos p) {
  return kPolTerms[static_cast<int>(p)];
}

int Vocabulary::find(FeatureKind kind, std::string_view surface) const {
  auto it = index_.find(vocab_key(kind, surface));
  return it == index_.end() ? -1 : it->second;
}

void Vocabulary::rebuild_index() {
  index_.clear();
  index_.reserve(features.size());
  for (size_t v = 0; v < features.size(); ++v)
    index_.emplace(vocab_key(features[v].kind, features[v].surface),
                   static_cast<int>(v));
}

std::string Corpus::level_name(int l) const {
  return pol_pos_term(static_cast<PolPos>(l % 3)) + ":" + countries[l / 3];
}

std::vector<std::string> tokenize_ordered(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  };
  for (char c : text) {
    if (is_ascii_space(c)) {
      flush();
    } else if (is_ascii_punct(c)) {
      // stripped in place: "father!" -> "father"
    } else {
      unsigned char u = static_cast<unsigned char>(c);
      cur += u < 128 ? static_cast<char>(std::tolower(u)) : c;
    }
  }
  flush();
  return out;
}

std::map<std::string, int64_t> tokenize(std::string_view text) {
  std::map<std::string, int64_t> counts;
  for (auto& tok : tokenize_ordered(text)) ++counts[tok];
  return counts;
}

std::vector<std::string> derive_dep_pairs(const RawRecord& rec,
                                          DepFallback fallback,
                                          const std::vector<std::string>& tokens,
                                          int64_t* malformed) {
  std::vector<std::string> out;
  if (rec.has_dep_pairs) {
    out.reserve(rec.dep_pairs.size());
    for (const auto& raw : rec.dep_pairs) {
      std::string norm = normalize_pair(raw);
      if (norm.empty()) {
        if (malformed != nullptr) ++*malformed;
        continue;
      }
      out.push_back(std::move(norm));
    }
    return out;
  }
  if (fallback == DepFallback::bigram && tokens.size() >= 2) {
    out.reserve(tokens.size() - 1);
    for (size_t i = 0; i + 1 < tokens.size(); ++i)
      out.push_back(tokens[i] + "->" + tokens[i + 1]);
  }
  return out;
}

PolPos discretize_lr(double score) {
  if (!(score >= 0.0 && score <= 10.0))
    throw InputError("lr_score outside [0,10]: " + std::to_string(score));
  if (score < 10.0 / 3.0) return PolPos::Left;
  if (score < 20.0 / 3.0) return PolPos::Center;
  return PolPos::Right;
}

FeatureCounts count_features(const std::vector<RawRecord>& records,
                             DepFallback fallback, int threads) {
  FeatureCounts total;
  // Integer counts merge associatively, but we keep the ordered reduce so
  // the code path matches the rest of the pipeline.
  parallel::ordered_block_reduce<FeatureCounts>(
      records.size(), threads, 256,
      [&](size_t lo, size_t hi, FeatureCounts& part) {
        for (size_t i = lo; i < hi; ++i) {
          const RawRecord& rec = records[i];
          auto tokens = tokenize_ordered(rec.text);
          for (const auto& t : tokens) ++part.unigrams[t];
          for (auto& p :
               derive_dep_pairs(rec, fallback, tokens, &part.malformed_dep_pairs))
            ++part.dep_pairs[p];
        }
      },
      [&](FeatureCounts& part) {
        for (auto& [k, v] : part.unigrams) total.unigrams[k] += v;
        for (auto& [k, v] : part.dep_pairs) total.dep_pairs[k] += v;
        total.malformed_dep_pairs += part.malformed_dep_pairs;
      });
  return total;
}

Vocabulary build_vocabulary(const FeatureCounts& counts, int64_t min_count) {
  if (min_count < 1)
    throw InputError("min_count must be positive");
  struct Row {
    FeatureKind kind;
    const std::string* surface;
    int64_t count;
  };
  std::vector<Row> rows;
  for (const auto& [s, c] : counts.unigrams)
    if (c >= min_count) rows.push_back({FeatureKind::unigram, &s, c});
  for (const auto& [s, c] : counts.dep_pairs)
    if (c >= min_count) rows.push_back({FeatureKind::dep_pair, &s, c});
  if (rows.empty())
    throw InputError("empty vocabulary: no feature reaches min_count=" +
                     std::to_string(min_count));
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.count != b.count) return a.count > b.count;
    return *a.surface < *b.surface;
  });
  Vocabulary vocab;
  vocab.features.reserve(rows.size());
  vocab.counts.reserve(rows.size());
  for (const Row& r : rows) {
    vocab.features.push_back({r.kind, *r.surface});
    vocab.counts.push_back(r.count);
  }
  vocab.rebuild_index();
  return vocab;
}

BuildResult build_corpus(const std::vector<RawRecord>& records,
                         const Vocabulary& vocab, DepFallback fallback) {
  BuildResult res;
  std::unordered_set<std::string> seen_ids;
  seen_ids.reserve(records.size());

  struct Pending {
    std::string doc_id;
    std::string country;
    PolPos pol;
    std::vector<std::pair<int, int64_t>> counts;
  };
  std::vector<Pending> kept;

  for (const RawRecord& rec : records) {
    if (!seen_ids.insert(rec.doc_id).second)
      throw InputError("duplicate doc_id: " + rec.doc_id);
    if (!(rec.lr_score >= 0.0 && rec.lr_score <= 10.0)) {
      ++res.report.bad_lr_score;
      res.report.rejected_ids.push_back(rec.doc_id);
      continue;
    }
    auto tokens = tokenize_ordered(rec.text);
    std::map<int, int64_t> feats;
    for (const auto& t : tokens) {
      int v = vocab.find(FeatureKind::unigram, t);
      if (v >= 0) ++feats[v];
    }
    for (auto& p : derive_dep_pairs(rec, fallback, tokens,
                                    &res.report.malformed_dep_pairs)) {
      int v = vocab.find(FeatureKind::dep_pair, p);
      if (v >= 0) ++feats[v];
    }
    if (feats.size() < 2) {
      ++res.report.too_short;
      continue;
    }
    Pending p;
    p.doc_id = rec.doc_id;
    p.country = rec.country;
    p.pol = discretize_lr(rec.lr_score);
    p.counts.assign(feats.begin(), feats.end());
    kept.push_back(std::move(p));
  }

  std::set<std::string> country_set;
  for (const Pending& p : kept) country_set.insert(p.country);
  res.corpus.countries.assign(country_set.begin(), country_set.end());

  std::unordered_map<std::string, int> country_index;
  for (size_t i = 0; i < res.corpus.countries.size(); ++i)
    country_index[res.corpus.countries[i]] = static_cast<int>(i);

  res.corpus.docs.reserve(kept.size());
  for (Pending& p : kept) {
    DocumentVector d;
    d.doc_id = std::move(p.doc_id);
    d.counts = std::move(p.counts);
    d.group.country = country_index[p.country];
    d.group.pol_pos = p.pol;
    d.group.content_level = d.group.country * 3 + static_cast<int>(p.pol);
    res.corpus.docs.push_back(std::move(d));
  }
  res.report.kept = static_cast<int64_t>(res.corpus.docs.size());
  return res;
}

}  // namespace seedstm::corpus
