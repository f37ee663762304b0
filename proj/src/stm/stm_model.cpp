#include <cmath>
#include <stdexcept>

#include "seedstm/error.hpp"
#include "seedstm/kernels.hpp"
#include "seedstm/stm.hpp"

namespace seedstm::stm {

std::string StmModel::level_name(int l) const {
  return corpus::pol_pos_term(static_cast<corpus::PolPos>(l % 3)) + ":" +
         countries[l / 3];
}

std::vector<double> StmModel::beta(int level, int k) const {
  if (level < 0 || level >= L)
    throw std::out_of_range("content level out of range: " +
                            std::to_string(level));
  if (k < 0 || k >= K)
    throw std::out_of_range("topic out of range: " + std::to_string(k));
  std::vector<double> out(V);
  kernels::add4(out.data(), m.data(), kappa_topic[k].data(),
                kappa_cov[level].data(), kappa_inter[level * K + k].data(), V);
  kernels::softmax_inplace(out.data(), V);
  return out;
}

std::vector<std::vector<double>> init_seeded(const corpus::Vocabulary& vocab,
                                             const lexicon::SeedLexicon& lexicon,
                                             double seed_mass) {
  if (!(seed_mass > 0.0 && seed_mass < 1.0))
    throw InputError("seed_mass must lie in (0,1)");
  const size_t V = vocab.size();
  const size_t K = lexicon.topics.size() + 1;  // + residual
  std::vector<std::vector<double>> beta0(K);

  for (size_t k = 0; k < lexicon.topics.size(); ++k) {
    const auto& topic = lexicon.topics[k];
    if (topic.seeds.empty())
      throw InputError("lexicon topic has no seeds: " + topic.name);
    const double floor = (1.0 - seed_mass) / static_cast<double>(V);
    beta0[k].assign(V, floor);
    const double boost =
        seed_mass / static_cast<double>(topic.seeds.size());
    for (const auto& seed : topic.seeds) {
      int v = vocab.find(seed.feature.kind, seed.feature.surface);
      if (v < 0)
        throw InputError("seed missing from vocabulary: " +
                         seed.feature.surface + " (topic " + topic.name + ")");
      beta0[k][v] += boost;
    }
  }
  beta0[K - 1].assign(V, 1.0 / static_cast<double>(V));
  return beta0;
}

std::string significance_stars(double p_value) {
  if (p_value < 0.001) return "***";
  if (p_value < 0.01) return "**";
  if (p_value < 0.1) return ".";
  return "";
}

}  // namespace seedstm::stm
