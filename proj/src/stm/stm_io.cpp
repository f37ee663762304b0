#include <json.hpp>

#include "seedstm/error.hpp"
#include "seedstm/stm.hpp"

namespace seedstm::stm {

namespace {

using nlohmann::json;

json mat_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd mat_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(rows, rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != m.cols())
      throw InputError("ragged matrix in model JSON");
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

json block_to_json(const std::vector<std::vector<double>>& b) {
  json rows = json::array();
  for (const auto& r : b) rows.push_back(r);
  return rows;
}

std::vector<std::vector<double>> block_from_json(const json& j) {
  std::vector<std::vector<double>> out;
  out.reserve(j.size());
  for (const auto& row : j) out.push_back(row.get<std::vector<double>>());
  return out;
}

}  // namespace

std::string write_model_json(const StmModel& model) {
  json j;
  j["config"] = {{"emtol", model.config.emtol},
                 {"seed_mass", model.config.seed_mass},
                 {"max_iter", model.config.max_iter},
                 {"kappa_l1", model.config.kappa_l1},
                 {"rng_seed", model.config.rng_seed}};
  j["k"] = model.K;
  j["v"] = model.V;
  j["l"] = model.L;
  j["topic_names"] = model.topic_names;
  j["countries"] = model.countries;
  j["terms"] = model.terms;
  j["vocab_hash"] = model.vocab_hash;
  j["m"] = model.m;
  j["kappa_topic"] = block_to_json(model.kappa_topic);
  j["kappa_cov"] = block_to_json(model.kappa_cov);
  j["kappa_inter"] = block_to_json(model.kappa_inter);
  j["gamma"] = mat_to_json(model.gamma);
  j["sigma"] = mat_to_json(model.sigma);
  j["lambda"] = mat_to_json(model.lambda);
  j["nu"] = mat_to_json(model.nu);
  j["theta"] = mat_to_json(model.theta);
  j["bound_trace"] = model.bound_trace;
  j["convergence_reason"] = model.convergence_reason;
  j["flagged_docs"] = model.flagged_docs;
  return j.dump(1) + "\n";
}

StmModel parse_model_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid model JSON: ") + e.what());
  }
  StmModel model;
  try {
    const auto& c = j.at("config");
    model.config.emtol = c.at("emtol").get<double>();
    model.config.seed_mass = c.at("seed_mass").get<double>();
    model.config.max_iter = c.at("max_iter").get<int>();
    model.config.kappa_l1 = c.at("kappa_l1").get<double>();
    model.config.rng_seed = c.at("rng_seed").get<uint64_t>();
    model.K = j.at("k").get<int>();
    model.V = j.at("v").get<int>();
    model.L = j.at("l").get<int>();
    model.topic_names = j.at("topic_names").get<std::vector<std::string>>();
    model.countries = j.at("countries").get<std::vector<std::string>>();
    model.terms = j.at("terms").get<std::vector<std::string>>();
    model.vocab_hash = j.at("vocab_hash").get<uint64_t>();
    model.m = j.at("m").get<std::vector<double>>();
    model.kappa_topic = block_from_json(j.at("kappa_topic"));
    model.kappa_cov = block_from_json(j.at("kappa_cov"));
    model.kappa_inter = block_from_json(j.at("kappa_inter"));
    model.gamma = mat_from_json(j.at("gamma"));
    model.sigma = mat_from_json(j.at("sigma"));
    model.lambda = mat_from_json(j.at("lambda"));
    model.nu = mat_from_json(j.at("nu"));
    model.theta = mat_from_json(j.at("theta"));
    model.bound_trace = j.at("bound_trace").get<std::vector<double>>();
    model.convergence_reason = j.at("convergence_reason").get<std::string>();
    model.flagged_docs = j.at("flagged_docs").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad model JSON: ") + e.what());
  }
  const size_t lk = static_cast<size_t>(model.L) * model.K;
  if (model.kappa_topic.size() != static_cast<size_t>(model.K) ||
      model.kappa_cov.size() != static_cast<size_t>(model.L) ||
      model.kappa_inter.size() != lk ||
      model.m.size() != static_cast<size_t>(model.V))
    throw InputError("model JSON dimensions are inconsistent");
  for (const auto& row : model.kappa_topic)
    if (row.size() != static_cast<size_t>(model.V))
      throw InputError("model JSON kappa_topic width mismatch");
  return model;
}

}  // namespace seedstm::stm
