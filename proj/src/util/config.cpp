#include "seedstm/config.hpp"

#include <cstdlib>
#include <limits>

#include "seedstm/error.hpp"
#include "seedstm/io.hpp"
#include "seedstm/strings.hpp"

namespace seedstm::config {

namespace {

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  return dir.back() == '/' ? dir + name : dir + "/" + name;
}

double parse_number(const std::string& raw, const std::string& where) {
  const char* s = raw.c_str();
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0')
    throw InputError("config: bad number for " + where + ": " + raw);
  return v;
}

int parse_int(const std::string& raw, const std::string& where) {
  double v = parse_number(raw, where);
  auto i = static_cast<long long>(v);
  if (static_cast<double>(i) != v)
    throw InputError("config: expected integer for " + where + ": " + raw);
  if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max())
    throw InputError("config: integer out of range for " + where);
  return static_cast<int>(i);
}

std::uint64_t parse_u64(const std::string& raw, const std::string& where) {
  const char* s = raw.c_str();
  char* end = nullptr;
  unsigned long long v = std::strtoull(s, &end, 10);
  if (end == s || *end != '\0')
    throw InputError("config: bad unsigned integer for " + where + ": " + raw);
  return v;
}

std::string parse_string(const std::string& raw, const std::string& where) {
  if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"')
    throw InputError("config: expected quoted string for " + where + ": " + raw);
  return raw.substr(1, raw.size() - 2);
}

std::pair<double, double> parse_pair(const std::string& raw,
                                     const std::string& where) {
  if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']')
    throw InputError("config: expected [a, b] for " + where + ": " + raw);
  auto parts = strings::split(raw.substr(1, raw.size() - 2), ',');
  if (parts.size() != 2)
    throw InputError("config: expected exactly two values for " + where);
  return {parse_number(strings::trim(parts[0]), where),
          parse_number(strings::trim(parts[1]), where)};
}

// Drops a trailing '#' comment, respecting double-quoted strings.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '"') in_string = !in_string;
    if (c == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

}  // namespace

std::string PipelineConfig::lexicon_file() const {
  return lexicon_path.empty() ? join_path(output_dir, "lexicon.json")
                              : lexicon_path;
}

std::string PipelineConfig::model_file() const {
  return model_path.empty() ? join_path(output_dir, "model.json") : model_path;
}

std::string PipelineConfig::similarity_file() const {
  return similarity_path.empty()
             ? join_path(output_dir, "within_lr_summary.csv")
             : similarity_path;
}

PipelineConfig parse_config(const std::string& text,
                            const PipelineConfig& base) {
  PipelineConfig cfg = base;
  std::string section;
  size_t lineno = 0;
  for (const auto& raw_line : strings::split(text, '\n')) {
    ++lineno;
    std::string line = strings::trim(strip_comment(raw_line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw InputError("config: malformed section header at line " +
                         std::to_string(lineno));
      section = strings::trim(line.substr(1, line.size() - 2));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError("config: expected key = value at line " +
                       std::to_string(lineno));
    std::string key = strings::trim(line.substr(0, eq));
    std::string value = strings::trim(line.substr(eq + 1));
    std::string where = section.empty() ? key : section + "." + key;

    if (section == "paths") {
      if (key == "corpus") cfg.corpus_path = parse_string(value, where);
      else if (key == "annotated") cfg.annotated_path = parse_string(value, where);
      else if (key == "output_dir") cfg.output_dir = parse_string(value, where);
      else if (key == "lexicon") cfg.lexicon_path = parse_string(value, where);
      else if (key == "model") cfg.model_path = parse_string(value, where);
      else if (key == "similarity") cfg.similarity_path = parse_string(value, where);
      else if (key == "survey") cfg.survey_path = parse_string(value, where);
      else throw InputError("config: unknown key " + where);
    } else if (section == "corpus") {
      if (key == "min_count") cfg.min_count = parse_int(value, where);
      else if (key == "fallback") cfg.fallback = parse_string(value, where);
      else throw InputError("config: unknown key " + where);
    } else if (section == "lexicon") {
      if (key == "per_topic") cfg.per_topic = parse_int(value, where);
      else if (key == "tfidf_min") cfg.tfidf_min = parse_number(value, where);
      else if (key == "min_count_each") cfg.min_count_each = parse_int(value, where);
      else if (key == "min_seeds") cfg.min_seeds = parse_int(value, where);
      else if (key == "min_sentences") cfg.min_sentences = parse_int(value, where);
      else throw InputError("config: unknown key " + where);
    } else if (section == "stm") {
      if (key == "emtol") cfg.emtol = parse_number(value, where);
      else if (key == "seed_mass") cfg.seed_mass = parse_number(value, where);
      else if (key == "max_iter") cfg.max_iter = parse_int(value, where);
      else if (key == "kappa_l1") cfg.kappa_l1 = parse_number(value, where);
      else if (key == "rng_seed") cfg.rng_seed = parse_u64(value, where);
      else throw InputError("config: unknown key " + where);
    } else if (section == "analytics") {
      if (key == "top_n") cfg.top_n = parse_int(value, where);
      else throw InputError("config: unknown key " + where);
    } else if (section == "stats") {
      if (key == "b") cfg.b = parse_int(value, where);
      else if (key == "quantiles") cfg.quantiles = parse_pair(value, where);
      else throw InputError("config: unknown key " + where);
    } else {
      throw InputError("config: unknown section [" + section + "]");
    }
  }
  validate(cfg);
  return cfg;
}

PipelineConfig load_config(const std::string& path,
                           const PipelineConfig& base) {
  return parse_config(io::read_text_file(path), base);
}

void validate(const PipelineConfig& cfg) {
  auto fail = [](const std::string& msg) { throw InputError("config: " + msg); };
  if (cfg.min_count < 1) fail("min_count must be >= 1");
  if (cfg.fallback != "bigram" && cfg.fallback != "none")
    fail("fallback must be \"bigram\" or \"none\"");
  if (cfg.per_topic < 1) fail("per_topic must be >= 1");
  if (cfg.tfidf_min <= 0.0) fail("tfidf_min must be positive");
  if (cfg.min_count_each < 1) fail("min_count_each must be >= 1");
  if (cfg.min_seeds < 1) fail("min_seeds must be >= 1");
  if (cfg.min_sentences < 1) fail("min_sentences must be >= 1");
  if (!(cfg.emtol > 0.0)) fail("emtol must be positive (inf allowed)");
  if (!(cfg.seed_mass > 0.0) || cfg.seed_mass >= 1.0)
    fail("seed_mass must lie in (0, 1)");
  if (cfg.max_iter < 1) fail("max_iter must be >= 1");
  if (cfg.kappa_l1 < 0.0) fail("kappa_l1 must be >= 0");
  if (cfg.top_n < 1) fail("top_n must be >= 1");
  if (cfg.b < 1) fail("b must be >= 1");
  if (!(cfg.quantiles.first >= 0.0) || !(cfg.quantiles.second <= 1.0) ||
      !(cfg.quantiles.first < cfg.quantiles.second))
    fail("quantiles must satisfy 0 <= low < high <= 1");
}

}  // namespace seedstm::config
