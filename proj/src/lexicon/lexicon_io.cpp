#include <json.hpp>

#include <unordered_map>

#include "seedstm/error.hpp"
#include "seedstm/io.hpp"
#include "seedstm/lexicon.hpp"
#include "seedstm/strings.hpp"

namespace seedstm::lexicon {

using nlohmann::json;

std::vector<AnnotatedSentence> read_annotated_tsv(const std::string& path) {
  std::string text = io::read_text_file(path);
  std::vector<AnnotatedSentence> out;
  size_t start = 0, line_no = 0;
  std::unordered_map<std::string, size_t> col;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t advance = end == text.size() ? 0 : end + 1;
    ++line_no;
    if (!line.empty()) {
      auto cells = strings::split(line, '\t');
      if (col.empty()) {
        for (size_t i = 0; i < cells.size(); ++i)
          col[strings::trim(cells[i])] = i;
        for (const char* req : {"text", "raw_label", "domain"})
          if (col.find(req) == col.end())
            throw InputError(path + ": missing column: " + std::string(req));
      } else {
        if (cells.size() < col.size())
          throw InputError(path + ":" + std::to_string(line_no) +
                           ": short row");
        out.push_back(
            {cells[col["text"]], cells[col["raw_label"]], cells[col["domain"]]});
      }
    }
    if (advance == 0) break;
    start = advance;
  }
  if (col.empty()) throw InputError(path + ": empty annotated corpus");
  return out;
}

std::string write_lexicon_json(const SeedLexicon& lexicon) {
  json arr = json::array();
  for (const auto& topic : lexicon.topics) {
    json seeds = json::array();
    for (const auto& s : topic.seeds)
      seeds.push_back({{"surface", s.feature.surface},
                       {"kind", corpus::kind_name(s.feature.kind)},
                       {"rf", s.rf},
                       {"tfidf", s.tfidf}});
    arr.push_back(
        {{"topic", topic.name}, {"domain", topic.domain}, {"seeds", seeds}});
  }
  return arr.dump(2) + "\n";
}

SeedLexicon parse_lexicon_json(const std::string& text) {
  json arr;
  try {
    arr = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid lexicon JSON: ") + e.what());
  }
  if (!arr.is_array()) throw InputError("lexicon JSON must be an array");
  SeedLexicon lex;
  try {
    for (const auto& jt : arr) {
      LexiconTopic topic;
      topic.name = jt.at("topic").get<std::string>();
      topic.domain = jt.at("domain").get<std::string>();
      for (const auto& js : jt.at("seeds")) {
        Seed s;
        s.feature.surface = js.at("surface").get<std::string>();
        s.feature.kind = corpus::parse_kind(js.at("kind").get<std::string>());
        s.rf = js.at("rf").get<double>();
        s.tfidf = js.at("tfidf").get<double>();
        topic.seeds.push_back(std::move(s));
      }
      lex.topics.push_back(std::move(topic));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("bad lexicon JSON: ") + e.what());
  }
  for (const auto& t : lex.topics)
    lex.total_features += static_cast<int64_t>(t.seeds.size());
  return lex;
}

std::string write_seed_report_csv(const SeedLexicon& lexicon) {
  std::string out = "topic,surface,rf\n";
  for (const auto& topic : lexicon.topics)
    for (const auto& s : topic.seeds) {
      out += io::csv_field(topic.name);
      out += ',';
      out += io::csv_field(s.feature.surface);
      out += ',';
      out += io::fmt_double(s.rf);
      out += '\n';
    }
  return out;
}

}  // namespace seedstm::lexicon
