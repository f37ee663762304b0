#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "seedstm/analytics.hpp"
#include "seedstm/config.hpp"
#include "seedstm/corpus.hpp"
#include "seedstm/error.hpp"
#include "seedstm/io.hpp"
#include "seedstm/kernels.hpp"
#include "seedstm/lexicon.hpp"
#include "seedstm/stats.hpp"
#include "seedstm/stm.hpp"
#include "seedstm/strings.hpp"

namespace {

using namespace seedstm;

constexpr const char* kOutputDirEnv = "SEEDSTM_OUTPUT_DIR";

std::string slug(const std::string& name) {
  std::string out;
  bool pending = false;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      if (pending && !out.empty()) out += '_';
      pending = false;
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      pending = true;
    }
  }
  return out.empty() ? "topic" : out;
}

std::string out_path(const config::PipelineConfig& cfg, const std::string& name) {
  const std::string& dir = cfg.output_dir;
  if (dir.empty()) return name;
  return dir.back() == '/' ? dir + name : dir + "/" + name;
}

corpus::DepFallback fallback_mode(const config::PipelineConfig& cfg) {
  return cfg.fallback == "bigram" ? corpus::DepFallback::bigram
                                  : corpus::DepFallback::none;
}

struct LoadedCorpus {
  corpus::Corpus corpus;
  corpus::Vocabulary vocab;
  corpus::DropReport report;
};

LoadedCorpus load_corpus(const config::PipelineConfig& cfg, int threads) {
  if (cfg.corpus_path.empty())
    throw InputError("no corpus path configured ([paths] corpus)");
  auto records = corpus::read_records(cfg.corpus_path);
  auto counts = corpus::count_features(records, fallback_mode(cfg), threads);
  LoadedCorpus out;
  out.vocab = corpus::build_vocabulary(counts, cfg.min_count);
  auto built = corpus::build_corpus(records, out.vocab, fallback_mode(cfg));
  out.corpus = std::move(built.corpus);
  out.report = std::move(built.report);
  return out;
}

void print_drop_report(const corpus::DropReport& report) {
  std::cout << "documents kept: " << report.kept
            << " (too short: " << report.too_short
            << ", bad lr_score: " << report.bad_lr_score << ")\n";
  if (report.malformed_dep_pairs > 0)
    std::cout << "warning: skipped " << report.malformed_dep_pairs
              << " malformed dep-pair strings\n";
}

int cmd_build_lexicon(const config::PipelineConfig& cfg, int threads) {
  if (cfg.annotated_path.empty())
    throw InputError("no annotated corpus path configured ([paths] annotated)");
  auto sentences = lexicon::read_annotated_tsv(cfg.annotated_path);
  auto loaded = load_corpus(cfg, threads);

  lexicon::LexiconConfig lc;
  lc.min_sentences = cfg.min_sentences;
  lc.per_topic = cfg.per_topic;
  lc.tfidf_min = cfg.tfidf_min;
  lc.min_count_each = cfg.min_count_each;
  lc.min_seeds = cfg.min_seeds;

  lexicon::LexiconReport report;
  auto lex = lexicon::build_lexicon(sentences, loaded.vocab, lc, &report, threads);

  io::ensure_dir(cfg.output_dir);
  io::write_text_file(cfg.lexicon_file(), lexicon::write_lexicon_json(lex));
  io::write_text_file(out_path(cfg, "seed_report.csv"),
                      lexicon::write_seed_report_csv(lex));

  std::cout << lex.topics.size() << " topics, " << lex.total_features
            << " features\n";
  std::cout << "sentences: " << report.sentences_total << " ("
            << report.sentences_excluded << " excluded by label)\n";
  std::cout << "topics past min_sentences: " << report.topics_after_filter
            << " of " << report.topics_before_filter << "\n";
  std::cout << "wrote " << cfg.lexicon_file() << "\n";
  return 0;
}

int cmd_fit(const config::PipelineConfig& cfg, int threads) {
  auto lex = lexicon::parse_lexicon_json(io::read_text_file(cfg.lexicon_file()));
  auto loaded = load_corpus(cfg, threads);
  print_drop_report(loaded.report);

  stm::ModelConfig mc;
  mc.emtol = cfg.emtol;
  mc.seed_mass = cfg.seed_mass;
  mc.max_iter = cfg.max_iter;
  mc.kappa_l1 = cfg.kappa_l1;
  mc.rng_seed = cfg.rng_seed;

  std::cout << "fitting: D=" << loaded.corpus.docs.size()
            << " V=" << loaded.vocab.size()
            << " K=" << lex.topics.size() + 1
            << " levels=" << loaded.corpus.levels()
            << " kernels=" << kernels::active_backend() << "\n";
  auto model = stm::fit(loaded.corpus, lex, loaded.vocab, mc, threads);

  std::string trace = "iteration,bound,rel_change\n";
  for (size_t i = 0; i < model.bound_trace.size(); ++i) {
    double rel = i == 0 ? 0.0
                        : std::fabs(model.bound_trace[i] - model.bound_trace[i - 1]) /
                              std::max(std::fabs(model.bound_trace[i - 1]), 1e-12);
    trace += std::to_string(i + 1);
    trace += ',';
    trace += io::fmt_double(model.bound_trace[i]);
    trace += ',';
    trace += io::fmt_double(rel);
    trace += '\n';
    std::cout << "iter " << (i + 1) << " bound " << io::fmt_double(model.bound_trace[i])
              << "\n";
  }
  io::ensure_dir(cfg.output_dir);
  io::write_text_file(out_path(cfg, "bound_trace.csv"), trace);
  io::write_text_file(cfg.model_file(), stm::write_model_json(model));
  std::cout << "converged: " << model.convergence_reason << " after "
            << model.bound_trace.size() << " iterations\n";
  if (!model.flagged_docs.empty())
    std::cout << "warning: " << model.flagged_docs.size()
              << " documents hit the inner optimizer cap\n";
  std::cout << "wrote " << cfg.model_file() << "\n";
  return 0;
}

std::string beta_tsv(const stm::StmModel& model) {
  std::string out = "# level topic beta[v] for v in 0..V-1\n";
  for (int l = 0; l < model.L; ++l)
    for (int k = 0; k < model.K; ++k) {
      auto b = model.beta(l, k);
      out += std::to_string(l);
      out += '\t';
      out += std::to_string(k);
      for (double p : b) {
        out += '\t';
        out += io::fmt_double(p);
      }
      out += '\n';
    }
  return out;
}

std::string theta_tsv(const stm::StmModel& model) {
  std::string out = "# doc theta[k] for k in 0..K-1\n";
  for (Eigen::Index d = 0; d < model.theta.rows(); ++d) {
    out += std::to_string(d);
    for (Eigen::Index k = 0; k < model.theta.cols(); ++k) {
      out += '\t';
      out += io::fmt_double(model.theta(d, k));
    }
    out += '\n';
  }
  return out;
}

int cmd_analyze(const config::PipelineConfig& cfg, int threads) {
  if (!io::file_exists(cfg.model_file()))
    throw InputError("model file not found: " + cfg.model_file());
  auto model = stm::parse_model_json(io::read_text_file(cfg.model_file()));
  auto loaded = load_corpus(cfg, threads);

  uint64_t vocab_hash = io::fnv1a(corpus::write_vocabulary_tsv(loaded.vocab));
  if (vocab_hash != model.vocab_hash)
    throw InputError("model was fitted against a different vocabulary (hash "
                     "mismatch; re-run fit)");
  if (static_cast<Eigen::Index>(loaded.corpus.docs.size()) != model.theta.rows())
    throw InputError("corpus/model document count mismatch");

  io::ensure_dir(cfg.output_dir);
  auto put = [&](const std::string& name, const std::string& content) {
    io::write_text_file(out_path(cfg, name), content);
  };

  // Recomputation inputs: raw posteriors plus the document/vocab tables.
  put("vocabulary.tsv", corpus::write_vocabulary_tsv(loaded.vocab));
  put("doc_triplets.tsv", corpus::write_doc_triplets(loaded.corpus));
  put("doc_metadata.tsv", corpus::write_doc_metadata(loaded.corpus));
  put("beta.tsv", beta_tsv(model));
  put("theta.tsv", theta_tsv(model));

  auto design = stm::build_design(loaded.corpus);
  put("effects.csv", stm::write_effects_csv(stm::estimate_effects(model, design)));

  auto sims = analytics::all_similarities(model, threads);
  put("similarity_long.csv", analytics::write_similarity_long_csv(sims, model));
  for (const auto& sim : sims)
    put("similarity_" + slug(model.topic_names[sim.topic]) + ".csv",
        analytics::write_similarity_csv(sim, model));

  std::vector<analytics::BlockSummary> blocks;
  std::vector<analytics::DimensionClass> classes;
  if (model.countries.size() >= 2) {
    for (const auto& sim : sims) {
      blocks.push_back(analytics::block_averages(sim));
      classes.push_back(analytics::classify_dimension(blocks.back()));
    }
    put("blocks.csv", analytics::write_blocks_csv(blocks, classes, model));
  } else {
    std::cout << "warning: single-country corpus, skipping block averages\n";
  }

  put("salience.csv",
      analytics::write_salience_csv(analytics::salience_table(model, loaded.corpus)));

  std::vector<std::vector<analytics::TopFeature>> diffs;
  diffs.reserve(static_cast<size_t>(model.K));
  for (int k = 0; k < model.K; ++k)
    diffs.push_back(analytics::top_features_by_side(model, loaded.vocab, k));
  put("feature_diff.csv", analytics::write_feature_diff_csv(diffs, model));

  if (model.countries.size() >= 2) {
    put("pair_rankings_left.csv",
        analytics::write_pair_rankings_csv(
            analytics::pair_topic_rankings(sims, model, corpus::PolPos::Left),
            corpus::PolPos::Left));
    put("pair_rankings_right.csv",
        analytics::write_pair_rankings_csv(
            analytics::pair_topic_rankings(sims, model, corpus::PolPos::Right),
            corpus::PolPos::Right));
  }

  std::vector<analytics::WithinCountryLr> within;
  for (size_t c = 0; c < model.countries.size(); ++c)
    within.push_back(
        analytics::within_country_lr(sims, model, static_cast<int>(c)));
  put("within_lr.csv", analytics::write_within_lr_csv(within, model));
  put("within_lr_summary.csv",
      analytics::write_within_lr_summary_csv(within, model));

  bool have_pairs = false;
  for (const auto& f : loaded.vocab.features)
    if (f.kind == corpus::FeatureKind::dep_pair) have_pairs = true;
  if (!have_pairs)
    std::cout << "warning: vocabulary has no dep-pair features; association "
                 "networks will have empty edge sets\n";
  for (int k = 0; k < model.K; ++k)
    for (size_t c = 0; c < model.countries.size(); ++c) {
      int level_left = static_cast<int>(c) * 3 + 0;
      int level_right = static_cast<int>(c) * 3 + 2;
      auto net = analytics::association_network(model, loaded.vocab, k,
                                                level_left, level_right,
                                                cfg.top_n);
      std::string base =
          "network_" + slug(model.topic_names[k]) + "_" + model.countries[c];
      put(base + ".graphml", analytics::write_network_graphml(net, model));
      put(base + "_edges.csv", analytics::write_network_edges_csv(net));
    }

  std::cout << "analytics written to " << cfg.output_dir << " ("
            << model.K << " topics, " << model.L << " levels)\n";
  return 0;
}

std::vector<std::pair<std::string, double>> read_keyed_column(
    const std::string& path, const std::vector<std::string>& value_names) {
  std::string text = io::read_text_file(path);
  std::vector<std::pair<std::string, double>> out;
  int country_col = -1, value_col = -1;
  size_t start = 0;
  size_t line_no = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    size_t advance = end == text.size() ? 0 : end + 1;
    ++line_no;
    if (!strings::trim(line).empty()) {
      auto cells = io::csv_split(line);
      if (country_col < 0) {
        for (size_t i = 0; i < cells.size(); ++i) {
          std::string h = strings::lower(strings::trim(cells[i]));
          if (h == "country") country_col = static_cast<int>(i);
          for (const auto& name : value_names)
            if (h == name) value_col = static_cast<int>(i);
        }
        if (country_col < 0 || value_col < 0)
          throw InputError(path + ": need columns country and " +
                           value_names.front());
      } else {
        if (static_cast<int>(cells.size()) <= std::max(country_col, value_col))
          throw InputError(path + ":" + std::to_string(line_no) + ": short row");
        const std::string& raw = cells[static_cast<size_t>(value_col)];
        char* endp = nullptr;
        double v = std::strtod(raw.c_str(), &endp);
        if (endp == raw.c_str() || *endp != '\0')
          throw InputError(path + ":" + std::to_string(line_no) +
                           ": bad number: " + raw);
        out.emplace_back(
            strings::lower(strings::trim(cells[static_cast<size_t>(country_col)])),
            v);
      }
    }
    if (advance == 0) break;
    start = advance;
  }
  if (country_col < 0) throw InputError(path + ": empty file");
  return out;
}

int cmd_correlate(const config::PipelineConfig& cfg,
                  const std::string& similarity_path,
                  const std::string& survey_path, int threads) {
  std::string sim_path =
      similarity_path.empty() ? cfg.similarity_file() : similarity_path;
  std::string survey = survey_path.empty() ? cfg.survey_path : survey_path;
  if (survey.empty())
    throw InputError("no survey path configured ([paths] survey or --survey)");

  auto sim_rows =
      read_keyed_column(sim_path, {"similarity", "average_similarity"});
  auto survey_rows = read_keyed_column(survey, {"conflict_share"});

  auto report = stats::correlate(sim_rows, survey_rows, cfg.b, cfg.quantiles,
                                 cfg.rng_seed, threads);

  double lo = report.used.front().similarity, hi = lo;
  for (const auto& obs : report.used) {
    lo = std::min(lo, obs.similarity);
    hi = std::max(hi, obs.similarity);
  }
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i)
    grid.push_back(lo + (hi - lo) * static_cast<double>(i) / 100.0);
  auto curve = stats::fitted_curve(report.glm, grid);

  io::ensure_dir(cfg.output_dir);
  io::write_text_file(out_path(cfg, "stats.json"),
                      stats::write_stats_json(report));
  io::write_text_file(out_path(cfg, "curve.csv"), stats::write_curve_csv(curve));

  std::cout << "matched countries: " << report.used.size() << "\n";
  for (const auto& c : report.only_similarity)
    std::cout << "excluded (similarity only): " << c << "\n";
  for (const auto& c : report.only_survey)
    std::cout << "excluded (survey only): " << c << "\n";
  std::cout << "pearson r = " << io::fmt_double(report.r) << "\n";
  std::cout << "bootstrap mean r = " << io::fmt_double(report.boot.mean_r)
            << " [" << io::fmt_double(report.boot.lower) << ", "
            << io::fmt_double(report.boot.upper) << "] (skipped "
            << report.boot.skipped << ")\n";
  std::cout << "glm slope = " << io::fmt_double(report.glm.slope)
            << " (Pr(>|t|) = " << io::fmt_double(report.glm.p_slope) << ")\n";
  std::cout << "wrote " << out_path(cfg, "stats.json") << "\n";
  return 0;
}

int cmd_report(const config::PipelineConfig& cfg) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(cfg.output_dir))
    throw InputError("output directory not found: " + cfg.output_dir);
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(cfg.output_dir)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (name == "report.tar") continue;
    for (const char* ext : {".csv", ".json", ".tsv", ".graphml"})
      if (strings::ends_with_ci(name, ext)) {
        names.push_back(name);
        break;
      }
  }
  std::sort(names.begin(), names.end());
  if (names.empty()) throw InputError("no artifacts to archive in " + cfg.output_dir);
  io::TarWriter tar;
  for (const auto& name : names)
    tar.add_file(name, io::read_text_file(out_path(cfg, name)));
  io::write_text_file(out_path(cfg, "report.tar"), tar.finish());
  std::cout << "archived " << names.size() << " files into "
            << out_path(cfg, "report.tar") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seeded structural topic modeling of political self-descriptions"};
  app.require_subcommand(1);

  std::string config_path;
  int threads = 0;
  std::optional<uint64_t> rng_seed;
  app.add_option("--config", config_path, "pipeline config file (TOML subset)");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  app.add_option("--rng-seed", rng_seed, "override the configured RNG seed");

  auto* sub_lexicon = app.add_subcommand("build-lexicon",
                                         "build the exclusive seed lexicon");
  std::optional<int> per_topic, min_count_each, min_seeds, min_sentences;
  std::optional<double> tfidf_min;
  sub_lexicon->add_option("--per-topic", per_topic, "candidate seeds per topic");
  sub_lexicon->add_option("--tfidf-min", tfidf_min, "minimum seed tf-idf");
  sub_lexicon->add_option("--min-count-each", min_count_each,
                          "minimum seed count in each corpus");
  sub_lexicon->add_option("--min-seeds", min_seeds,
                          "minimum surviving seeds per topic");
  sub_lexicon->add_option("--min-sentences", min_sentences,
                          "minimum annotated sentences per topic");

  auto* sub_fit = app.add_subcommand("fit", "fit the seeded topic model");
  std::optional<double> emtol, seed_mass, kappa_l1;
  std::optional<int> max_iter;
  bool k_from_lexicon = true;
  sub_fit->add_option("--emtol", emtol, "EM relative-change stopping tolerance");
  sub_fit->add_option("--seed-mass", seed_mass, "initial mass on seed features");
  sub_fit->add_option("--max-iter", max_iter, "EM iteration cap");
  sub_fit->add_option("--kappa-l1", kappa_l1, "L1 penalty on content deviations");
  sub_fit->add_flag("--k-from-lexicon", k_from_lexicon,
                    "topic count = lexicon topics + residual (always on)");

  auto* sub_analyze = app.add_subcommand("analyze", "export all analytics");
  std::optional<int> top_n;
  sub_analyze->add_option("--top-n", top_n,
                          "features per side in association networks");

  auto* sub_correlate =
      app.add_subcommand("correlate", "survey correlation statistics");
  std::string similarity_path, survey_path;
  std::optional<int> boot_b;
  sub_correlate->add_option("--similarity", similarity_path,
                            "per-country similarity CSV");
  sub_correlate->add_option("--survey", survey_path,
                            "per-country conflict-share CSV");
  sub_correlate->add_option("--b", boot_b, "bootstrap resamples");

  auto* sub_report =
      app.add_subcommand("report", "archive output artifacts into report.tar");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    config::PipelineConfig base;
    config::PipelineConfig cfg =
        config_path.empty() ? base : config::load_config(config_path, base);
    if (const char* env = std::getenv(kOutputDirEnv); env && *env)
      cfg.output_dir = env;

    if (rng_seed) cfg.rng_seed = *rng_seed;
    if (per_topic) cfg.per_topic = *per_topic;
    if (tfidf_min) cfg.tfidf_min = *tfidf_min;
    if (min_count_each) cfg.min_count_each = *min_count_each;
    if (min_seeds) cfg.min_seeds = *min_seeds;
    if (min_sentences) cfg.min_sentences = *min_sentences;
    if (emtol) cfg.emtol = *emtol;
    if (seed_mass) cfg.seed_mass = *seed_mass;
    if (max_iter) cfg.max_iter = *max_iter;
    if (kappa_l1) cfg.kappa_l1 = *kappa_l1;
    if (top_n) cfg.top_n = *top_n;
    if (boot_b) cfg.b = *boot_b;
    config::validate(cfg);
    if (!k_from_lexicon)
      throw InputError("--k-from-lexicon=false is not supported: the topic "
                       "count always comes from the lexicon plus a residual");

    if (sub_lexicon->parsed()) return cmd_build_lexicon(cfg, threads);
    if (sub_fit->parsed()) return cmd_fit(cfg, threads);
    if (sub_analyze->parsed()) return cmd_analyze(cfg, threads);
    if (sub_correlate->parsed())
      return cmd_correlate(cfg, similarity_path, survey_path, threads);
    if (sub_report->parsed()) return cmd_report(cfg);
    throw InputError("no subcommand given");
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ComputeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
