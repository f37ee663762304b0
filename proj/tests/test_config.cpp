#include <doctest.h>

#include <limits>
#include <string>
#include <vector>

#include "seedstm/config.hpp"
#include "seedstm/error.hpp"
#include "seedstm/io.hpp"

using namespace seedstm;

TEST_CASE("parse_config reads every section") {
  const std::string text = R"(
# pipeline settings
[paths]
corpus = "data/bios.jsonl"
annotated = "data/manifesto.tsv"
output_dir = "scratch"
lexicon = "lex.json"
model = "m.json"
similarity = "sim.csv"
survey = "survey.csv"

[corpus]
min_count = 7
fallback = "none"

[lexicon]
per_topic = 40
tfidf_min = 2.5
min_count_each = 9
min_seeds = 2
min_sentences = 100

[stm]
emtol = 1e-3
seed_mass = 0.5
max_iter = 25
kappa_l1 = 0.125
rng_seed = 99

[analytics]
top_n = 12

[stats]
b = 500
quantiles = [0.1, 0.9]
)";
  auto cfg = config::parse_config(text);
  CHECK(cfg.corpus_path == "data/bios.jsonl");
  CHECK(cfg.annotated_path == "data/manifesto.tsv");
  CHECK(cfg.output_dir == "scratch");
  CHECK(cfg.lexicon_path == "lex.json");
  CHECK(cfg.model_path == "m.json");
  CHECK(cfg.similarity_path == "sim.csv");
  CHECK(cfg.survey_path == "survey.csv");
  CHECK(cfg.min_count == 7);
  CHECK(cfg.fallback == "none");
  CHECK(cfg.per_topic == 40);
  CHECK(cfg.tfidf_min == doctest::Approx(2.5));
  CHECK(cfg.min_count_each == 9);
  CHECK(cfg.min_seeds == 2);
  CHECK(cfg.min_sentences == 100);
  CHECK(cfg.emtol == doctest::Approx(1e-3));
  CHECK(cfg.seed_mass == doctest::Approx(0.5));
  CHECK(cfg.max_iter == 25);
  CHECK(cfg.kappa_l1 == doctest::Approx(0.125));
  CHECK(cfg.rng_seed == 99);
  CHECK(cfg.top_n == 12);
  CHECK(cfg.b == 500);
  CHECK(cfg.quantiles.first == doctest::Approx(0.1));
  CHECK(cfg.quantiles.second == doctest::Approx(0.9));
}

TEST_CASE("parse_config leaves unset keys at their defaults") {
  auto cfg = config::parse_config("[corpus]\nmin_count = 2\n");
  CHECK(cfg.min_count == 2);
  CHECK(cfg.fallback == "bigram");
  CHECK(cfg.output_dir == "out");
  CHECK(cfg.emtol == doctest::Approx(1e-2));
  CHECK(cfg.b == 10000);
}

TEST_CASE("parse_config respects a base config") {
  config::PipelineConfig base;
  base.output_dir = "from_env";
  base.rng_seed = 7;

  auto untouched = config::parse_config("[corpus]\nmin_count = 3\n", base);
  CHECK(untouched.output_dir == "from_env");
  CHECK(untouched.rng_seed == 7);

  auto overridden =
      config::parse_config("[paths]\noutput_dir = \"explicit\"\n", base);
  CHECK(overridden.output_dir == "explicit");
}

TEST_CASE("parse_config rejects unknown keys and sections") {
  CHECK_THROWS_AS(config::parse_config("[corpus]\nmincount = 5\n"),
                  InputError);
  CHECK_THROWS_AS(config::parse_config("[nope]\nx = 1\n"), InputError);
  CHECK_THROWS_AS(config::parse_config("min_count = 5\n"), InputError);
}

TEST_CASE("parse_config rejects malformed values") {
  CHECK_THROWS_AS(config::parse_config("[corpus]\nmin_count = \n"),
                  InputError);
  CHECK_THROWS_AS(config::parse_config("[corpus]\nmin_count = five\n"),
                  InputError);
  CHECK_THROWS_AS(config::parse_config("[paths]\ncorpus = unquoted\n"),
                  InputError);
  CHECK_THROWS_AS(config::parse_config("[stats]\nquantiles = [0.1]\n"),
                  InputError);
}

TEST_CASE("derived paths anchor on the output dir unless set") {
  config::PipelineConfig cfg;
  cfg.output_dir = "run1";
  CHECK(cfg.lexicon_file() == "run1/lexicon.json");
  CHECK(cfg.model_file() == "run1/model.json");
  CHECK(cfg.similarity_file() == "run1/within_lr_summary.csv");
  cfg.lexicon_path = "elsewhere.json";
  CHECK(cfg.lexicon_file() == "elsewhere.json");
}

TEST_CASE("validate guards each documented domain") {
  config::PipelineConfig good;
  CHECK_NOTHROW(config::validate(good));

  auto expect_throw = [](auto mutate) {
    config::PipelineConfig cfg;
    mutate(cfg);
    CHECK_THROWS_AS(config::validate(cfg), InputError);
  };
  expect_throw([](auto& c) { c.min_count = 0; });
  expect_throw([](auto& c) { c.fallback = "trigram"; });
  expect_throw([](auto& c) { c.per_topic = 0; });
  expect_throw([](auto& c) { c.tfidf_min = 0.0; });
  expect_throw([](auto& c) { c.min_count_each = 0; });
  expect_throw([](auto& c) { c.min_seeds = 0; });
  expect_throw([](auto& c) { c.min_sentences = 0; });
  expect_throw([](auto& c) { c.emtol = 0.0; });
  expect_throw([](auto& c) { c.emtol = -1.0; });
  expect_throw([](auto& c) { c.seed_mass = 1.0; });
  expect_throw([](auto& c) { c.seed_mass = 0.0; });
  expect_throw([](auto& c) { c.seed_mass = -0.1; });
  expect_throw([](auto& c) { c.max_iter = 0; });
  expect_throw([](auto& c) { c.kappa_l1 = -0.5; });
  expect_throw([](auto& c) { c.top_n = 0; });
  expect_throw([](auto& c) { c.b = 0; });
  expect_throw([](auto& c) { c.quantiles = {0.9, 0.1}; });
  expect_throw([](auto& c) { c.quantiles = {-0.1, 0.9}; });
  expect_throw([](auto& c) { c.quantiles = {0.1, 1.5}; });

  // An infinite emtol is explicitly allowed (single-iteration fits).
  config::PipelineConfig inf_tol;
  inf_tol.emtol = std::numeric_limits<double>::infinity();
  CHECK_NOTHROW(config::validate(inf_tol));
}

TEST_CASE("csv_field quotes only when needed") {
  CHECK(io::csv_field("plain") == "plain");
  CHECK(io::csv_field("with,comma") == "\"with,comma\"");
  CHECK(io::csv_field("with \"quote\"") == "\"with \"\"quote\"\"\"");
  CHECK(io::csv_field("line\nbreak") == "\"line\nbreak\"");
  CHECK(io::csv_field("") == "");
}

TEST_CASE("csv_split inverts csv_field rows") {
  std::vector<std::string> fields = {"a", "b,c", "d \"e\"", "", "f\ng"};
  std::string line;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += io::csv_field(fields[i]);
  }
  CHECK(io::csv_split(line) == fields);
  CHECK(io::csv_split("x,y\r") == std::vector<std::string>{"x", "y"});
  CHECK(io::csv_split("") == std::vector<std::string>{""});
}

TEST_CASE("fmt_double round-trips and is stable") {
  for (double x : {0.0, 1.0, -1.5, 0.1, 1e-300, 1e300, 3.141592653589793,
                   -0.9924518953131142}) {
    std::string s = io::fmt_double(x);
    CHECK(std::stod(s) == x);
    CHECK(io::fmt_double(x) == s);
  }
}

TEST_CASE("tar writer produces a parseable deterministic archive") {
  io::TarWriter w;
  w.add_file("dir/a.txt", "hello\n");
  w.add_file("b.csv", std::string(1000, 'x'));
  std::string tar = w.finish();

  io::TarWriter w2;
  w2.add_file("dir/a.txt", "hello\n");
  w2.add_file("b.csv", std::string(1000, 'x'));
  CHECK(tar == w2.finish());

  // ustar layout: 512-byte blocks, sizes in octal at offset 124.
  CHECK(tar.size() % 512 == 0);
  CHECK(tar.substr(0, 9) == std::string("dir/a.txt"));
  CHECK(tar.substr(257, 5) == "ustar");
  long size1 = std::stol(tar.substr(124, 11), nullptr, 8);
  CHECK(size1 == 6);
  CHECK(tar.substr(512, 6) == "hello\n");
  // Second header follows the padded first payload.
  size_t hdr2 = 512 + 512;  // 6 bytes padded to one block
  CHECK(tar.substr(hdr2, 5) == std::string("b.csv"));
  long size2 = std::stol(tar.substr(hdr2 + 124, 11), nullptr, 8);
  CHECK(size2 == 1000);
  // Archive ends with two zero blocks.
  CHECK(tar.substr(tar.size() - 1024) == std::string(1024, '\0'));
}
