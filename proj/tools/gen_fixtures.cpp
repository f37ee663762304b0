// Regenerates the bundled synthetic fixtures under data/. The outputs are
// committed; this exists so they can be rebuilt and audited.

#include <json.hpp>

#include <iostream>
#include <string>

#include "seedstm/corpus.hpp"
#include "seedstm/error.hpp"
#include "seedstm/io.hpp"
#include "seedstm/lexicon.hpp"
#include "seedstm/synth.hpp"

using namespace seedstm;
using nlohmann::json;

namespace {

std::string bios_jsonl(const std::vector<corpus::RawRecord>& records) {
  std::string out;
  for (const auto& rec : records) {
    json j;
    j["doc_id"] = rec.doc_id;
    j["text"] = rec.text;
    j["country"] = rec.country;
    j["lr_score"] = rec.lr_score;
    j["dep_pairs"] = rec.dep_pairs;
    out += j.dump();
    out += '\n';
  }
  return out;
}

constexpr const char* kFixtureConfig =
    "# Settings for the bundled synthetic fixtures (paths relative to the\n"
    "# repository root). Values not set here keep the published defaults.\n"
    "\n"
    "[paths]\n"
    "corpus = \"data/bios.jsonl\"\n"
    "annotated = \"data/manifesto_mini.tsv\"\n"
    "output_dir = \"out\"\n"
    "survey = \"data/survey_demo.csv\"\n"
    "\n"
    "[corpus]\n"
    "min_count = 5\n"
    "fallback = \"none\"   # the fixture records carry explicit dep pairs\n"
    "\n"
    "[lexicon]\n"
    "min_sentences = 500  # the bundled annotated corpus is small\n"
    "\n"
    "[stm]\n"
    "max_iter = 40\n"
    "rng_seed = 42\n"
    "\n"
    "[analytics]\n"
    "top_n = 15\n";

}  // namespace

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "data";
  try {
    io::ensure_dir(dir);

    auto records = synth::make_bios({});
    auto counts = corpus::count_features(records, corpus::DepFallback::none);
    auto vocab = corpus::build_vocabulary(counts, 5);
    if (vocab.size() != 200)
      throw ComputeError("fixture invariant broken: expected V=200, got " +
                         std::to_string(vocab.size()));
    auto built = corpus::build_corpus(records, vocab, corpus::DepFallback::none);
    if (built.corpus.docs.size() != records.size())
      throw ComputeError("fixture invariant broken: dropped documents");

    std::string manifesto = synth::make_manifesto_tsv({});

    io::write_text_file(dir + "/bios.jsonl", bios_jsonl(records));
    io::write_text_file(dir + "/manifesto_mini.tsv", manifesto);
    io::write_text_file(dir + "/lexicon_planted.json",
                        lexicon::write_lexicon_json(synth::planted_lexicon()));
    io::write_text_file(dir + "/table4_similarity.csv",
                        synth::table4_similarity_csv());
    io::write_text_file(dir + "/survey_demo.csv", synth::survey_demo_csv());
    io::write_text_file(dir + "/fixture_config.toml", kFixtureConfig);

    std::cout << "fixtures written to " << dir << "/ (D=" << records.size()
              << ", V=" << vocab.size() << ")\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
