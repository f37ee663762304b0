#pragma once

#include <cstdint>
#include <string>
#include <utility>

namespace seedstm::config {

// One configuration object for the whole pipeline. Defaults are the
// published parameter values; everything is overridable from the config
// file and (for the common knobs) from CLI flags.
struct PipelineConfig {
  // [paths]
  std::string corpus_path;
  std::string annotated_path;
  std::string output_dir = "out";
  std::string lexicon_path;     // default: <output_dir>/lexicon.json
  std::string model_path;       // default: <output_dir>/model.json
  std::string similarity_path;  // default: <output_dir>/within_lr_summary.csv
  std::string survey_path;

  // [corpus]
  int min_count = 5;
  std::string fallback = "bigram";  // "bigram" | "none"

  // [lexicon]
  int per_topic = 100;
  double tfidf_min = 5.0;
  int min_count_each = 50;
  int min_seeds = 3;
  int min_sentences = 5000;

  // [stm]
  double emtol = 1e-2;
  double seed_mass = 0.25;
  int max_iter = 100;
  double kappa_l1 = 0.01;
  std::uint64_t rng_seed = 42;

  // [analytics]
  int top_n = 30;

  // [stats]
  int b = 10000;
  std::pair<double, double> quantiles{0.05, 0.95};

  std::string lexicon_file() const;
  std::string model_file() const;
  std::string similarity_file() const;
};

// TOML-subset: [section] headers, key = value with numbers, booleans,
// quoted strings and short numeric arrays; '#' comments. Unknown keys fail.
// `base` carries pre-set defaults (e.g. an output dir from the environment).
PipelineConfig parse_config(const std::string& text,
                            const PipelineConfig& base = {});
PipelineConfig load_config(const std::string& path,
                           const PipelineConfig& base = {});

// Throws InputError when a value is outside its documented domain.
void validate(const PipelineConfig& cfg);

}  // namespace seedstm::config
