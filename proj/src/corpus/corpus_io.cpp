#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

#include "seedstm/corpus.hpp"
#include "seedstm/error.hpp"
#include "seedstm/io.hpp"
#include "seedstm/strings.hpp"

namespace seedstm::corpus {

namespace {

using nlohmann::json;

int64_t parse_int(const std::string& s, const char* what) {
  try {
    size_t pos = 0;
    int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError(std::string("bad integer for ") + what + ": " + s);
  }
}

double parse_double(const std::string& s, const char* what) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError(std::string("bad number for ") + what + ": " + s);
  }
}

void validate_record(const RawRecord& rec, size_t line_no) {
  if (rec.doc_id.empty())
    throw InputError("empty doc_id at line " + std::to_string(line_no));
  if (rec.country.empty())
    throw InputError("empty country at line " + std::to_string(line_no));
}

std::vector<std::string> nonempty_lines(const std::string& text,
                                        std::vector<size_t>* line_nos) {
  std::vector<std::string> out;
  size_t start = 0, n = 1;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) {
      out.push_back(std::move(line));
      if (line_nos != nullptr) line_nos->push_back(n);
    }
    if (end == text.size()) break;
    start = end + 1;
    ++n;
  }
  return out;
}

}  // namespace

std::vector<RawRecord> read_records_jsonl(const std::string& path) {
  std::string text = io::read_text_file(path);
  std::vector<size_t> line_nos;
  auto lines = nonempty_lines(text, &line_nos);
  std::vector<RawRecord> out;
  out.reserve(lines.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::exception& e) {
      throw InputError(path + ":" + std::to_string(line_nos[i]) +
                       ": invalid JSON: " + e.what());
    }
    RawRecord rec;
    try {
      rec.doc_id = j.at("doc_id").get<std::string>();
      rec.text = j.at("text").get<std::string>();
      rec.country = strings::lower(strings::trim(j.at("country").get<std::string>()));
      rec.lr_score = j.at("lr_score").get<double>();
      if (j.contains("dep_pairs") && !j["dep_pairs"].is_null()) {
        rec.has_dep_pairs = true;
        rec.dep_pairs = j["dep_pairs"].get<std::vector<std::string>>();
      }
    } catch (const json::exception& e) {
      throw InputError(path + ":" + std::to_string(line_nos[i]) +
                       ": bad record: " + e.what());
    }
    validate_record(rec, line_nos[i]);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<RawRecord> read_records_tsv(const std::string& path) {
  std::string text = io::read_text_file(path);
  std::vector<size_t> line_nos;
  auto lines = nonempty_lines(text, &line_nos);
  if (lines.empty()) throw InputError(path + ": empty records file");

  auto header = strings::split(lines[0], '\t');
  std::unordered_map<std::string, size_t> col;
  for (size_t i = 0; i < header.size(); ++i) col[strings::trim(header[i])] = i;
  for (const char* req : {"doc_id", "text", "country", "lr_score"})
    if (col.find(req) == col.end())
      throw InputError(path + ": missing column: " + std::string(req));
  bool has_dep_col = col.count("dep_pairs") > 0;

  std::vector<RawRecord> out;
  out.reserve(lines.size() - 1);
  for (size_t i = 1; i < lines.size(); ++i) {
    auto cells = strings::split(lines[i], '\t');
    if (cells.size() < header.size())
      throw InputError(path + ":" + std::to_string(line_nos[i]) +
                       ": expected " + std::to_string(header.size()) +
                       " columns, got " + std::to_string(cells.size()));
    RawRecord rec;
    rec.doc_id = cells[col["doc_id"]];
    rec.text = cells[col["text"]];
    rec.country = strings::lower(strings::trim(cells[col["country"]]));
    rec.lr_score = parse_double(cells[col["lr_score"]], "lr_score");
    if (has_dep_col) {
      const std::string& cell = cells[col["dep_pairs"]];
      if (!cell.empty()) {
        rec.has_dep_pairs = true;
        rec.dep_pairs = strings::split(cell, ',');
      }
    }
    validate_record(rec, line_nos[i]);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<RawRecord> read_records(const std::string& path) {
  if (strings::ends_with_ci(path, ".jsonl")) return read_records_jsonl(path);
  if (strings::ends_with_ci(path, ".tsv")) return read_records_tsv(path);
  throw InputError("records file must end in .jsonl or .tsv: " + path);
}

std::string write_vocabulary_tsv(const Vocabulary& vocab) {
  std::string out = "index\tkind\tsurface\tcount\n";
  for (size_t v = 0; v < vocab.size(); ++v) {
    out += std::to_string(v);
    out += '\t';
    out += kind_name(vocab.features[v].kind);
    out += '\t';
    out += vocab.features[v].surface;
    out += '\t';
    out += std::to_string(vocab.counts[v]);
    out += '\n';
  }
  return out;
}

Vocabulary parse_vocabulary_tsv(const std::string& text) {
  auto lines = nonempty_lines(text, nullptr);
  if (lines.empty() || lines[0] != "index\tkind\tsurface\tcount")
    throw InputError("bad vocabulary TSV header");
  Vocabulary vocab;
  for (size_t i = 1; i < lines.size(); ++i) {
    auto cells = strings::split(lines[i], '\t');
    if (cells.size() != 4)
      throw InputError("bad vocabulary TSV row: " + lines[i]);
    if (parse_int(cells[0], "index") != static_cast<int64_t>(i - 1))
      throw InputError("non-dense vocabulary index at row " + std::to_string(i));
    vocab.features.push_back({parse_kind(cells[1]), cells[2]});
    vocab.counts.push_back(parse_int(cells[3], "count"));
  }
  vocab.rebuild_index();
  return vocab;
}

std::string write_doc_triplets(const Corpus& corpus) {
  std::string out = "doc_index\tfeature_index\tcount\n";
  for (size_t d = 0; d < corpus.docs.size(); ++d)
    for (const auto& [v, c] : corpus.docs[d].counts) {
      out += std::to_string(d);
      out += '\t';
      out += std::to_string(v);
      out += '\t';
      out += std::to_string(c);
      out += '\n';
    }
  return out;
}

std::string write_doc_metadata(const Corpus& corpus) {
  std::string out = "doc_index\tdoc_id\tcountry\tpol_pos\tcontent_level\n";
  for (size_t d = 0; d < corpus.docs.size(); ++d) {
    const DocumentVector& doc = corpus.docs[d];
    out += std::to_string(d);
    out += '\t';
    out += doc.doc_id;
    out += '\t';
    out += corpus.countries[doc.group.country];
    out += '\t';
    out += pol_pos_name(doc.group.pol_pos);
    out += '\t';
    out += std::to_string(doc.group.content_level);
    out += '\n';
  }
  return out;
}

Corpus parse_corpus_artifacts(const std::string& triplets_text,
                              const std::string& metadata_text) {
  auto meta_lines = nonempty_lines(metadata_text, nullptr);
  if (meta_lines.empty() ||
      meta_lines[0] != "doc_index\tdoc_id\tcountry\tpol_pos\tcontent_level")
    throw InputError("bad doc metadata header");

  Corpus corpus;
  std::set<std::string> country_set;
  struct Meta {
    std::string doc_id, country;
    PolPos pol;
  };
  std::vector<Meta> metas;
  for (size_t i = 1; i < meta_lines.size(); ++i) {
    auto cells = strings::split(meta_lines[i], '\t');
    if (cells.size() != 5) throw InputError("bad metadata row: " + meta_lines[i]);
    if (parse_int(cells[0], "doc_index") != static_cast<int64_t>(i - 1))
      throw InputError("non-dense doc_index at metadata row " +
                       std::to_string(i));
    Meta m;
    m.doc_id = cells[1];
    m.country = cells[2];
    if (cells[3] == "Left")
      m.pol = PolPos::Left;
    else if (cells[3] == "Center")
      m.pol = PolPos::Center;
    else if (cells[3] == "Right")
      m.pol = PolPos::Right;
    else
      throw InputError("bad pol_pos: " + cells[3]);
    country_set.insert(m.country);
    metas.push_back(std::move(m));
  }
  corpus.countries.assign(country_set.begin(), country_set.end());
  std::unordered_map<std::string, int> cindex;
  for (size_t i = 0; i < corpus.countries.size(); ++i)
    cindex[corpus.countries[i]] = static_cast<int>(i);

  corpus.docs.resize(metas.size());
  for (size_t d = 0; d < metas.size(); ++d) {
    DocumentVector& doc = corpus.docs[d];
    doc.doc_id = metas[d].doc_id;
    doc.group.country = cindex[metas[d].country];
    doc.group.pol_pos = metas[d].pol;
    doc.group.content_level =
        doc.group.country * 3 + static_cast<int>(metas[d].pol);
  }

  auto trip_lines = nonempty_lines(triplets_text, nullptr);
  if (trip_lines.empty() || trip_lines[0] != "doc_index\tfeature_index\tcount")
    throw InputError("bad triplets header");
  for (size_t i = 1; i < trip_lines.size(); ++i) {
    auto cells = strings::split(trip_lines[i], '\t');
    if (cells.size() != 3) throw InputError("bad triplet row: " + trip_lines[i]);
    int64_t d = parse_int(cells[0], "doc_index");
    int64_t v = parse_int(cells[1], "feature_index");
    int64_t c = parse_int(cells[2], "count");
    if (d < 0 || d >= static_cast<int64_t>(corpus.docs.size()))
      throw InputError("triplet doc_index out of range: " + cells[0]);
    if (v < 0 || c <= 0) throw InputError("bad triplet row: " + trip_lines[i]);
    corpus.docs[d].counts.emplace_back(static_cast<int>(v), c);
  }
  for (auto& doc : corpus.docs)
    std::sort(doc.counts.begin(), doc.counts.end());
  return corpus;
}

}  // namespace seedstm::corpus
