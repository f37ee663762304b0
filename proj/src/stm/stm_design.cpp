#include <Eigen/QR>

#include "seedstm/error.hpp"
#include "seedstm/stm.hpp"

namespace seedstm::stm {

Eigen::RowVectorXd design_row(const corpus::GroupLabel& group,
                              int n_countries) {
  const int C = n_countries;
  const int P = 3 * C;
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(P);
  row(0) = 1.0;
  bool left = group.pol_pos == corpus::PolPos::Left;
  bool right = group.pol_pos == corpus::PolPos::Right;
  if (left) row(1) = 1.0;
  if (right) row(2) = 1.0;
  int j = group.country;
  if (j > 0) {
    row(2 + j) = 1.0;
    int base = C + 2 + 2 * (j - 1);
    if (left) row(base) = 1.0;
    if (right) row(base + 1) = 1.0;
  }
  return row;
}

PrevalenceDesign build_design(const corpus::Corpus& corpus) {
  const int C = static_cast<int>(corpus.countries.size());
  if (C < 1) throw InputError("corpus has no countries");
  const int P = 3 * C;
  const auto D = static_cast<Eigen::Index>(corpus.docs.size());

  PrevalenceDesign design;
  design.terms.reserve(P);
  design.terms.push_back("(Intercept)");
  design.terms.push_back("left");
  design.terms.push_back("right");
  for (int j = 1; j < C; ++j) design.terms.push_back(corpus.countries[j]);
  for (int j = 1; j < C; ++j) {
    design.terms.push_back("left:" + corpus.countries[j]);
    design.terms.push_back("right:" + corpus.countries[j]);
  }

  design.X.resize(D, P);
  for (Eigen::Index d = 0; d < D; ++d)
    design.X.row(d) = design_row(corpus.docs[d].group, C);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.X);
  if (qr.rank() < P)
    throw InputError(
        "design matrix rank " + std::to_string(qr.rank()) + " < " +
        std::to_string(P) +
        ": every country x pol_pos cell must contain at least one document");
  return design;
}

}  // namespace seedstm::stm
