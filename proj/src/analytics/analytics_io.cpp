#include <cmath>
#include <sstream>

#include "seedstm/analytics.hpp"
#include "seedstm/io.hpp"

namespace seedstm::analytics {

namespace {

std::string num(double x) { return io::fmt_double(x); }

// NaN marks an empty group cell; render it as an empty field.
std::string num_or_empty(double x) {
  return std::isnan(x) ? std::string() : io::fmt_double(x);
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string ranked_list(const std::vector<RankedTopic>& items) {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) out += "; ";
    out += items[i].topic + " (" + num(items[i].similarity) + ")";
  }
  return out;
}

}  // namespace

std::string write_similarity_csv(const SimilarityMatrix& sim,
                                 const stm::StmModel& model) {
  std::ostringstream out;
  out << "level";
  for (int l : sim.levels) out << ',' << io::csv_field(model.level_name(l));
  out << '\n';
  for (size_t a = 0; a < sim.levels.size(); ++a) {
    out << io::csv_field(model.level_name(sim.levels[a]));
    for (size_t b = 0; b < sim.levels.size(); ++b)
      out << ','
          << num(sim.s(static_cast<Eigen::Index>(a),
                       static_cast<Eigen::Index>(b)));
    out << '\n';
  }
  return out.str();
}

std::string write_similarity_long_csv(const std::vector<SimilarityMatrix>& sims,
                                      const stm::StmModel& model) {
  std::ostringstream out;
  out << "topic,level_a,level_b,similarity\n";
  for (const auto& sim : sims) {
    const std::string& topic = model.topic_names[sim.topic];
    for (size_t a = 0; a < sim.levels.size(); ++a)
      for (size_t b = 0; b < sim.levels.size(); ++b)
        out << io::csv_field(topic) << ','
            << io::csv_field(model.level_name(sim.levels[a])) << ','
            << io::csv_field(model.level_name(sim.levels[b])) << ','
            << num(sim.s(static_cast<Eigen::Index>(a),
                         static_cast<Eigen::Index>(b)))
            << '\n';
  }
  return out.str();
}

std::string write_blocks_csv(const std::vector<BlockSummary>& blocks,
                             const std::vector<DimensionClass>& classes,
                             const stm::StmModel& model) {
  std::ostringstream out;
  out << "topic,within_left,within_center,within_right,left_right,left_center,"
         "center_right,partisan,right_splinter,left_splinter\n";
  for (size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    const auto& c = classes[i];
    out << io::csv_field(model.topic_names[b.topic]) << ','
        << num(b.within_left) << ',' << num(b.within_center) << ','
        << num(b.within_right) << ',' << num(b.left_right) << ','
        << num(b.left_center) << ',' << num(b.center_right) << ','
        << (c.partisan ? 1 : 0) << ',' << (c.right_splinter ? 1 : 0) << ','
        << (c.left_splinter ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string write_salience_csv(const SalienceTable& table) {
  std::ostringstream out;
  out << "topic,group,raw,normalized,degenerate_row\n";
  for (size_t k = 0; k < table.topics.size(); ++k)
    for (size_t l = 0; l < table.groups.size(); ++l)
      out << io::csv_field(table.topics[k]) << ','
          << io::csv_field(table.groups[l]) << ','
          << num_or_empty(table.raw(static_cast<Eigen::Index>(k),
                                    static_cast<Eigen::Index>(l)))
          << ','
          << num_or_empty(table.normalized(static_cast<Eigen::Index>(k),
                                           static_cast<Eigen::Index>(l)))
          << ',' << (table.degenerate[k] ? 1 : 0) << '\n';
  return out.str();
}

std::string write_feature_diff_csv(
    const std::vector<std::vector<TopFeature>>& per_topic,
    const stm::StmModel& model) {
  std::ostringstream out;
  out << "topic,feature,kind,left_mean,right_mean,mean_prob,diff\n";
  for (size_t k = 0; k < per_topic.size(); ++k)
    for (const auto& f : per_topic[k])
      out << io::csv_field(model.topic_names[k]) << ','
          << io::csv_field(f.surface) << ',' << corpus::kind_name(f.kind)
          << ',' << num(f.left_mean) << ',' << num(f.right_mean) << ','
          << num(f.mean_prob) << ',' << num(f.diff) << '\n';
  return out.str();
}

std::string write_pair_rankings_csv(const std::vector<PairRanking>& rankings,
                                    corpus::PolPos side) {
  std::ostringstream out;
  out << "side,country_a,country_b,rank,top_topic,top_similarity,bottom_topic,"
         "bottom_similarity\n";
  const std::string side_term = corpus::pol_pos_term(side);
  for (const auto& pr : rankings)
    for (size_t r = 0; r < pr.top.size(); ++r)
      out << side_term << ',' << io::csv_field(pr.country_a) << ','
          << io::csv_field(pr.country_b) << ',' << (r + 1) << ','
          << io::csv_field(pr.top[r].topic) << ',' << num(pr.top[r].similarity)
          << ',' << io::csv_field(pr.bottom[r].topic) << ','
          << num(pr.bottom[r].similarity) << '\n';
  return out.str();
}

std::string write_within_lr_csv(const std::vector<WithinCountryLr>& rows,
                                const stm::StmModel& model) {
  std::ostringstream out;
  out << "country,topic,similarity\n";
  for (const auto& row : rows)
    for (size_t k = 0; k < row.per_topic.size(); ++k)
      out << io::csv_field(row.country) << ','
          << io::csv_field(model.topic_names[k]) << ',' << num(row.per_topic[k])
          << '\n';
  return out.str();
}

std::string write_within_lr_summary_csv(const std::vector<WithinCountryLr>& rows,
                                        const stm::StmModel& model) {
  // One row per country, sorted by average similarity: the most divided
  // public first. Carries the three most and least aligned topics.
  auto sorted = rows;
  std::sort(sorted.begin(), sorted.end(),
            [](const WithinCountryLr& a, const WithinCountryLr& b) {
              if (a.average != b.average) return a.average < b.average;
              return a.country < b.country;
            });
  std::ostringstream out;
  out << "country,average_similarity,top_topics,bottom_topics\n";
  for (const auto& row : sorted) {
    std::vector<RankedTopic> ranked(row.per_topic.size());
    for (size_t k = 0; k < row.per_topic.size(); ++k)
      ranked[k] = {model.topic_names[k], row.per_topic[k]};
    auto desc = ranked;
    std::sort(desc.begin(), desc.end(),
              [](const RankedTopic& x, const RankedTopic& y) {
                if (x.similarity != y.similarity)
                  return x.similarity > y.similarity;
                return x.topic < y.topic;
              });
    auto asc = ranked;
    std::sort(asc.begin(), asc.end(),
              [](const RankedTopic& x, const RankedTopic& y) {
                if (x.similarity != y.similarity)
                  return x.similarity < y.similarity;
                return x.topic < y.topic;
              });
    size_t n = std::min<size_t>(3, ranked.size());
    desc.resize(n);
    asc.resize(n);
    out << io::csv_field(row.country) << ',' << num(row.average) << ','
        << io::csv_field(ranked_list(desc)) << ','
        << io::csv_field(ranked_list(asc)) << '\n';
  }
  return out.str();
}

std::string write_network_graphml(const Network& net,
                                  const stm::StmModel& model) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"nw\" for=\"node\" attr.name=\"weight\" "
         "attr.type=\"double\"/>\n"
      << "  <key id=\"nd\" for=\"node\" attr.name=\"signed_diff\" "
         "attr.type=\"double\"/>\n"
      << "  <key id=\"ew\" for=\"edge\" attr.name=\"weight\" "
         "attr.type=\"double\"/>\n"
      << "  <key id=\"ed\" for=\"edge\" attr.name=\"signed_diff\" "
         "attr.type=\"double\"/>\n"
      << "  <graph id=\"" << xml_escape(model.topic_names[net.topic]) << '|'
      << xml_escape(model.level_name(net.level_a)) << '|'
      << xml_escape(model.level_name(net.level_b))
      << "\" edgedefault=\"directed\">\n";
  for (const auto& node : net.nodes)
    out << "    <node id=\"" << xml_escape(node.surface) << "\">"
        << "<data key=\"nw\">" << num(node.weight) << "</data>"
        << "<data key=\"nd\">" << num(node.signed_diff) << "</data>"
        << "</node>\n";
  for (const auto& edge : net.edges)
    out << "    <edge source=\"" << xml_escape(edge.head) << "\" target=\""
        << xml_escape(edge.child) << "\">"
        << "<data key=\"ew\">" << num(edge.weight) << "</data>"
        << "<data key=\"ed\">" << num(edge.signed_diff) << "</data>"
        << "</edge>\n";
  out << "  </graph>\n</graphml>\n";
  return out.str();
}

std::string write_network_edges_csv(const Network& net) {
  std::ostringstream out;
  out << "head,child,weight,signed_diff\n";
  for (const auto& edge : net.edges)
    out << io::csv_field(edge.head) << ',' << io::csv_field(edge.child) << ','
        << num(edge.weight) << ',' << num(edge.signed_diff) << '\n';
  return out.str();
}

}  // namespace seedstm::analytics
