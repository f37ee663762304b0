#include "seedstm/synth.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "seedstm/rng.hpp"

namespace seedstm::synth {

namespace {

Universe make_universe() {
  Universe u;
  u.countries = {"arcadia", "bravia"};
  u.topics = {
      {"Environmental Protection",
       "welfare and quality of life",
       {"Environmental Protection +", "Environmental Protection -",
        "Environmental Protection: General"},
       {"climate", "carbon", "green", "renewable", "pollution", "emissions",
        "nature", "planet", "sustainability", "biodiversity"},
       {{"climate", "change"}, {"renewable", "energy"}}},
      {"European Union",
       "external relations",
       {"European Union: General +", "European Union -", "European Union"},
       {"europe", "union", "euro", "brussels", "integration", "treaty",
        "enlargement", "schengen", "erasmus", "federalism"},
       {{"european", "union"}, {"european", "integration"}}},
      {"Equality",
       "welfare and quality of life",
       {"Equality: General", "Equality +", "Equality. Positive"},
       {"equality", "rights", "women", "gender", "justice", "minorities",
        "discrimination", "feminism", "solidarity", "inclusion"},
       {{"human", "rights"}, {"equal", "pay"}}},
      {"Market Economy",
       "economy",
       {"Market Economy +", "Market Economy: General",
        "Market Economy. Orthodoxy"},
       {"market", "economy", "business", "tax", "enterprise", "competition",
        "trade", "growth", "innovation", "deregulation"},
       {{"free", "market"}, {"economic", "growth"}}},
      {"National Way of Life",
       "fabric of society",
       {"National Way of Life +", "National Way of Life -",
        "National Way of Life: General"},
       {"nation", "identity", "tradition", "culture", "borders",
        "sovereignty", "heritage", "patriotism", "homeland", "flag"},
       {{"common", "sense"}, {"national", "identity"}}},
      {"Law and Order",
       "fabric of society",
       {"Law and Order +", "Law and Order: General", "Law and Order. Positive"},
       {"law", "order", "police", "security", "crime", "safety", "courts",
        "prison", "penalty", "reform"},
       {{"law", "order"}, {"public", "safety"}}},
  };
  // Weight order: sixth-topic words and pair partners get the most mass so
  // every lexicon seed clears the per-corpus count thresholds.
  u.shared = {
      "law",         "order",       "police",      "security",   "crime",
      "safety",      "courts",      "prison",      "penalty",    "reform",
      "change",      "energy",      "european",    "human",      "equal",
      "pay",         "free",        "economic",    "common",     "sense",
      "national",    "media",       "social",      "good",       "vibes",
      "dog",         "lover",       "coffee",      "addict",     "proud",
      "parent",      "sports",      "fan",         "music",      "book",
      "worm",        "food",        "blogger",     "world",      "peace",
      "love",        "life",        "people",      "politics",   "father",
      "mother",      "husband",     "wife",        "views",      "opinions",
      "retweets",    "endorsements", "dreamer",    "thinker",    "writer",
      "reader",      "teacher",     "student",     "doctor",     "engineer",
      "artist",      "musician",    "traveler",    "foodie",     "tea",
      "wine",        "beer",        "cat",         "runner",     "cyclist",
      "gamer",       "geek",        "nerd",        "history",    "science",
      "tech",        "digital",     "news",        "truth",      "freedom",
      "liberty",     "democracy",   "hope",        "future",     "community",
      "local",       "global",      "citizen",     "voter",      "activist",
      "volunteer",   "believer",    "optimist",    "realist",    "skeptic",
      "humanist",    "atheist",     "christian",   "muslim",     "jewish",
      "secular",     "spiritual",   "mindful",     "yoga",       "fitness",
      "health",      "mental",      "happy",       "kind",       "honest",
      "curious",     "creative",    "passionate",  "humble",     "bold",
      "brave",       "loyal",       "funny",       "sarcastic",  "ironic",
      "retired",     "working",     "living",      "learning",   "teaching",
      "building",    "making",      "thinking",    "questioning", "resisting",
  };
  u.generic_pairs = {"social->media",   "good->vibes",   "dog->lover",
                     "coffee->addict",  "proud->parent", "sports->fan",
                     "music->lover",    "book->worm",    "food->blogger",
                     "law->order"};
  u.manifesto_filler = {
      "policy",   "government", "must",      "support",    "ensure",
      "citizens", "programme",  "measures",  "propose",    "commit",
      "strengthen", "protect",  "promote",   "reduce",     "increase",
      "invest",   "develop",    "improve",   "guarantee",  "provide",
      "establish", "maintain",  "expand",    "review",     "deliver",
      "modernise", "fair",      "strong",    "new",        "public",
  };
  assert(u.shared.size() == 130);
  assert(u.manifesto_filler.size() == 30);
  return u;
}

// One row of the planted beta: mass over the fixed universe feature order
// (50 exclusives, 130 shared, 10 favored pairs, 10 generic pairs).
struct FeatureTable {
  std::vector<corpus::Feature> features;
  std::vector<std::vector<double>> beta;  // kPlantedTopics x F
};

const FeatureTable& feature_table() {
  static const FeatureTable table = [] {
    const Universe& u = universe();
    FeatureTable t;
    for (int k = 0; k < kPlantedTopics; ++k)
      for (const auto& w : u.topics[k].exclusive)
        t.features.push_back({corpus::FeatureKind::unigram, w});
    for (const auto& w : u.shared)
      t.features.push_back({corpus::FeatureKind::unigram, w});
    std::vector<size_t> pair_pos(kPlantedTopics);
    for (int k = 0; k < kPlantedTopics; ++k) {
      pair_pos[k] = t.features.size();
      for (const auto& [a, b] : u.topics[k].pairs)
        t.features.push_back({corpus::FeatureKind::dep_pair, a + "->" + b});
    }
    size_t generic_pos = t.features.size();
    for (const auto& p : u.generic_pairs)
      t.features.push_back({corpus::FeatureKind::dep_pair, p});

    // Zipf-ish shared weights; the front of the list is the heaviest.
    std::vector<double> shared_w(u.shared.size());
    double shared_z = 0.0;
    for (size_t i = 0; i < shared_w.size(); ++i) {
      shared_w[i] = 1.0 / (8.0 + static_cast<double>(i));
      shared_z += shared_w[i];
    }

    t.beta.assign(kPlantedTopics, std::vector<double>(t.features.size(), 0.0));
    for (int k = 0; k < kPlantedTopics; ++k) {
      auto& row = t.beta[k];
      for (int i = 0; i < 10; ++i)
        row[static_cast<size_t>(k) * 10 + i] = kSeedFraction / 10.0;
      for (size_t i = 0; i < shared_w.size(); ++i)
        row[50 + i] = 0.50 * shared_w[i] / shared_z;
      row[pair_pos[k]] = 0.02;
      row[pair_pos[k] + 1] = 0.02;
      for (size_t i = 0; i < u.generic_pairs.size(); ++i)
        row[generic_pos + i] = 0.06 / static_cast<double>(u.generic_pairs.size());
    }
    return t;
  }();
  return table;
}

size_t sample_index(const std::vector<double>& cum, double usample) {
  auto it = std::lower_bound(cum.begin(), cum.end(), usample * cum.back());
  return std::min(static_cast<size_t>(it - cum.begin()), cum.size() - 1);
}

}  // namespace

const Universe& universe() {
  static const Universe u = make_universe();
  return u;
}

const std::array<double, kPlantedTopics>& planted_base() {
  static const std::array<double, kPlantedTopics> v = {0.2, 0.0, 0.2, 0.0,
                                                       -0.2};
  return v;
}

const std::array<double, kPlantedTopics>& planted_left_effect() {
  static const std::array<double, kPlantedTopics> v = {0.5, 0.0, -0.5, 0.0,
                                                       0.0};
  return v;
}

const std::array<double, kPlantedTopics>& planted_right_effect() {
  static const std::array<double, kPlantedTopics> v = {-0.5, 0.0, 0.5, 0.0,
                                                       0.0};
  return v;
}

std::vector<corpus::RawRecord> make_bios(const BiosSpec& spec) {
  const Universe& u = universe();
  const FeatureTable& table = feature_table();

  std::vector<std::vector<double>> cum(kPlantedTopics);
  for (int k = 0; k < kPlantedTopics; ++k) {
    cum[k].resize(table.features.size());
    double acc = 0.0;
    for (size_t i = 0; i < table.features.size(); ++i) {
      acc += table.beta[k][i];
      cum[k][i] = acc;
    }
  }

  std::vector<corpus::RawRecord> records;
  records.reserve(static_cast<size_t>(spec.docs));
  for (int d = 0; d < spec.docs; ++d) {
    rng::Stream stream(spec.seed, static_cast<std::uint64_t>(d));
    corpus::RawRecord rec;
    char id[16];
    std::snprintf(id, sizeof(id), "bio-%05d", d);
    rec.doc_id = id;
    rec.country = u.countries[static_cast<size_t>(d % 2)];
    int pos = (d / 2) % 3;  // 0 Left, 1 Center, 2 Right
    double su = stream.next_double();
    rec.lr_score = pos == 0 ? 1.0 + 2.0 * su
                            : pos == 1 ? 4.0 + 2.0 * su : 7.5 + 2.0 * su;

    double left = pos == 0 ? 1.0 : 0.0;
    double right = pos == 2 ? 1.0 : 0.0;
    std::array<double, kPlantedTopics> eta;
    double emax = -1e300;
    for (int k = 0; k < kPlantedTopics; ++k) {
      eta[k] = planted_base()[k] + left * planted_left_effect()[k] +
               right * planted_right_effect()[k] +
               spec.noise_sd * stream.next_gaussian();
      emax = std::max(emax, eta[k]);
    }
    std::array<double, kPlantedTopics> theta_cum;
    double z = 0.0;
    for (int k = 0; k < kPlantedTopics; ++k) {
      z += std::exp(eta[k] - emax);
      theta_cum[k] = z;
    }

    int len = 10 + static_cast<int>(stream.next_below(11));
    std::vector<std::string> words;
    rec.has_dep_pairs = true;
    for (int t = 0; t < len; ++t) {
      double tz = stream.next_double() * z;
      int k = 0;
      while (k + 1 < kPlantedTopics && theta_cum[k] < tz) ++k;
      size_t f = sample_index(cum[k], stream.next_double());
      if (table.features[f].kind == corpus::FeatureKind::unigram)
        words.push_back(table.features[f].surface);
      else
        rec.dep_pairs.push_back(table.features[f].surface);
    }
    if (words.empty()) words.push_back(u.shared[0]);
    words[0][0] = static_cast<char>(std::toupper(words[0][0]));
    std::string text;
    for (size_t i = 0; i < words.size(); ++i) {
      if (i) text += ' ';
      text += words[i];
    }
    text += '.';
    rec.text = text;
    records.push_back(std::move(rec));
  }
  return records;
}

std::string make_manifesto_tsv(const ManifestoSpec& spec) {
  const Universe& u = universe();
  std::string out = "text\traw_label\tdomain\n";
  for (int i = 0; i < spec.sentences; ++i) {
    rng::Stream stream(spec.seed, static_cast<std::uint64_t>(i));
    const auto& topic = u.topics[static_cast<size_t>(i % 6)];
    int len = 8 + static_cast<int>(stream.next_below(7));
    std::vector<std::string> words(static_cast<size_t>(len));
    for (auto& w : words) {
      if (stream.next_double() < 0.55)
        w = topic.exclusive[stream.next_below(topic.exclusive.size())];
      else
        w = u.manifesto_filler[stream.next_below(u.manifesto_filler.size())];
    }
    if (stream.next_double() < 0.30) {
      const auto& [a, b] = topic.pairs[stream.next_below(topic.pairs.size())];
      auto at = static_cast<size_t>(stream.next_below(words.size() - 1));
      words[at] = a;
      words[at + 1] = b;
    }
    words[0][0] = static_cast<char>(std::toupper(words[0][0]));
    for (size_t w = 0; w < words.size(); ++w) {
      out += w ? " " : "";
      out += words[w];
    }
    out += ".\t";
    out += topic.raw_labels[static_cast<size_t>(i / 6) % topic.raw_labels.size()];
    out += '\t';
    out += topic.domain;
    out += '\n';
  }
  return out;
}

std::vector<std::vector<double>> planted_beta_on_vocab(
    const corpus::Vocabulary& vocab) {
  const FeatureTable& table = feature_table();
  std::vector<std::vector<double>> out(
      kPlantedTopics, std::vector<double>(vocab.size(), 0.0));
  for (size_t f = 0; f < table.features.size(); ++f) {
    int v = vocab.find(table.features[f].kind, table.features[f].surface);
    if (v < 0) continue;
    for (int k = 0; k < kPlantedTopics; ++k)
      out[k][static_cast<size_t>(v)] = table.beta[k][f];
  }
  return out;
}

lexicon::SeedLexicon planted_lexicon() {
  const Universe& u = universe();
  lexicon::SeedLexicon lex;
  for (int k = 0; k < kPlantedTopics; ++k) {
    lexicon::LexiconTopic topic;
    topic.name = u.topics[k].name;
    topic.domain = u.topics[k].domain;
    for (const auto& w : u.topics[k].exclusive)
      topic.seeds.push_back(
          {{corpus::FeatureKind::unigram, w}, kSeedFraction / 10.0, 10.0});
    lex.topics.push_back(std::move(topic));
  }
  std::sort(lex.topics.begin(), lex.topics.end(),
            [](const lexicon::LexiconTopic& a, const lexicon::LexiconTopic& b) {
              return a.name < b.name;
            });
  for (const auto& t : lex.topics)
    lex.total_features += static_cast<int64_t>(t.seeds.size());
  return lex;
}

std::string table4_similarity_csv() {
  return "country,similarity\n"
         "belgium,0.9379\n"
         "france,0.9077\n"
         "germany,0.8866\n"
         "italy,0.9254\n"
         "netherlands,0.9084\n"
         "poland,0.8971\n"
         "slovenia,0.9590\n"
         "spain,0.8870\n";
}

std::string survey_demo_csv() {
  return "country,conflict_share\n"
         "france,0.44\n"
         "germany,0.58\n"
         "italy,0.34\n"
         "netherlands,0.43\n"
         "poland,0.49\n"
         "spain,0.55\n"
         "utopia,0.50\n";
}

}  // namespace seedstm::synth
