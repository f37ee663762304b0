#include <boost/math/distributions/students_t.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "seedstm/error.hpp"
#include "seedstm/io.hpp"
#include "seedstm/stm.hpp"

namespace seedstm::stm {

EffectTable estimate_effects(const StmModel& model,
                             const PrevalenceDesign& design) {
  const Eigen::Index D = design.X.rows();
  const Eigen::Index P = design.X.cols();
  if (D <= P)
    throw ComputeError("effects regression needs more documents than terms: D=" +
                       std::to_string(D) + ", P=" + std::to_string(P));
  if (model.theta.rows() != D)
    throw ComputeError("theta/design row mismatch");

  Eigen::MatrixXd xtx = design.X.transpose() * design.X;
  Eigen::MatrixXd xtx_inv =
      xtx.ldlt().solve(Eigen::MatrixXd::Identity(P, P));
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.X);
  Eigen::MatrixXd coef = qr.solve(model.theta);  // P x K

  const double dof = static_cast<double>(D - P);
  boost::math::students_t tdist(dof);

  EffectTable table;
  table.rows.reserve(static_cast<size_t>(model.K) * P);
  for (int k = 0; k < model.K; ++k) {
    Eigen::VectorXd resid = model.theta.col(k) - design.X * coef.col(k);
    double s2 = resid.squaredNorm() / dof;
    for (Eigen::Index p = 0; p < P; ++p) {
      EffectRow row;
      row.topic = model.topic_names[k];
      row.term = design.terms[p];
      row.estimate = coef(p, k);
      double var = s2 * xtx_inv(p, p);
      row.std_error = var > 0.0 ? std::sqrt(var) : 0.0;
      if (row.std_error > 0.0) {
        row.t_value = row.estimate / row.std_error;
        row.p_value =
            2.0 * boost::math::cdf(boost::math::complement(
                      tdist, std::abs(row.t_value)));
      } else {
        // Degenerate fit (zero residual variance): exact effect.
        row.t_value = row.estimate == 0.0
                          ? 0.0
                          : std::copysign(
                                std::numeric_limits<double>::infinity(),
                                row.estimate);
        row.p_value = row.estimate == 0.0 ? 1.0 : 0.0;
      }
      row.signif = significance_stars(row.p_value);
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

std::string write_effects_csv(const EffectTable& table) {
  std::string out = "topic,term,estimate,std_error,t_value,p_value,signif\n";
  for (const auto& r : table.rows) {
    out += io::csv_field(r.topic);
    out += ',';
    out += io::csv_field(r.term);
    out += ',';
    out += io::fmt_double(r.estimate);
    out += ',';
    out += io::fmt_double(r.std_error);
    out += ',';
    out += io::fmt_double(r.t_value);
    out += ',';
    out += io::fmt_double(r.p_value);
    out += ',';
    out += r.signif;
    out += '\n';
  }
  return out;
}

}  // namespace seedstm::stm
