#pragma once

// Synthetic fixture universe: a small planted world with known parameters so
// recovery can be checked against ground truth. The bios side plants five
// topics; the annotated side adds a sixth whose words are ordinary bios
// vocabulary, exercising the lexicon path end to end.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "seedstm/corpus.hpp"
#include "seedstm/lexicon.hpp"

namespace seedstm::synth {

struct UniverseTopic {
  std::string name;    // consolidated label
  std::string domain;
  std::vector<std::string> raw_labels;  // decorated variants, cycled
  std::vector<std::string> exclusive;   // 10 unigrams, disjoint across topics
  std::vector<std::pair<std::string, std::string>> pairs;  // favored bigrams
};

struct Universe {
  std::vector<UniverseTopic> topics;  // 6; indices 0..4 are planted in bios
  std::vector<std::string> shared;    // bios filler unigrams, weight order
  std::vector<std::string> generic_pairs;     // "a->b", all bios groups
  std::vector<std::string> manifesto_filler;  // annotated-corpus-only words
  std::vector<std::string> countries;         // fixture country codes
};

const Universe& universe();

// Planted generative parameters (bios side, topics 0..4).
constexpr int kPlantedTopics = 5;
constexpr double kSeedFraction = 0.40;  // beta mass on the 10 exclusives
const std::array<double, kPlantedTopics>& planted_base();
const std::array<double, kPlantedTopics>& planted_left_effect();
const std::array<double, kPlantedTopics>& planted_right_effect();

struct BiosSpec {
  int docs = 2000;
  std::uint64_t seed = 2024;
  double noise_sd = 0.5;  // sd of the eta perturbation
};

std::vector<corpus::RawRecord> make_bios(const BiosSpec& spec);

struct ManifestoSpec {
  int sentences = 8000;
  std::uint64_t seed = 7;
};

std::string make_manifesto_tsv(const ManifestoSpec& spec);

// Planted topic-word distributions mapped onto a fitted vocabulary
// (kPlantedTopics rows; features outside the universe get probability 0).
std::vector<std::vector<double>> planted_beta_on_vocab(
    const corpus::Vocabulary& vocab);

// Seed lexicon holding exactly the planted topics' exclusive unigrams.
lexicon::SeedLexicon planted_lexicon();

// Published per-country similarity column and a synthetic survey share table
// (six-country overlap plus one unmatched row).
std::string table4_similarity_csv();
std::string survey_demo_csv();

}  // namespace seedstm::synth
