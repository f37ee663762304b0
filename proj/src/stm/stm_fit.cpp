#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>

#include "seedstm/error.hpp"
#include "seedstm/io.hpp"
#include "seedstm/kernels.hpp"
#include "seedstm/parallel.hpp"
#include "seedstm/stm.hpp"

namespace seedstm::stm {

namespace {

constexpr double kATiny = 1e-300;   // floor for per-token likelihoods
constexpr int kMaxInner = 500;      // per-document optimizer cap
constexpr double kKappaTol = 1e-9;  // coordinate-descent stopping change
constexpr int kKappaSweeps = 200;

// f(eta) = sum_v c_v log(sum_k theta_k beta_{k,v}) - (eta-mu)' Sinv (eta-mu)/2
// with theta = softmax([eta; 0]); the last topic is the reference coordinate.
struct DocProblem {
  const std::vector<std::pair<int, int64_t>>* counts = nullptr;
  const double* beta = nullptr;  // K x V row-major, the document's level
  int K = 0;
  int V = 0;
  double N = 0.0;
  const Eigen::VectorXd* mu = nullptr;
  const Eigen::MatrixXd* sigma_inv = nullptr;

  void theta_of(const Eigen::VectorXd& eta, std::vector<double>& theta) const {
    theta.resize(K);
    for (int k = 0; k + 1 < K; ++k) theta[k] = eta(k);
    theta[K - 1] = 0.0;
    kernels::softmax_inplace(theta.data(), K);
  }

  double eval(const Eigen::VectorXd& eta, Eigen::VectorXd& grad,
              std::vector<double>& theta, std::vector<double>& expected) const {
    theta_of(eta, theta);
    expected.assign(K, 0.0);
    double ll = 0.0;
    for (const auto& [v, c] : *counts) {
      double a = 0.0;
      for (int k = 0; k < K; ++k) a += theta[k] * beta[k * V + v];
      a = std::max(a, kATiny);
      const double cv = static_cast<double>(c);
      ll += cv * std::log(a);
      const double w = cv / a;
      for (int k = 0; k < K; ++k) expected[k] += w * theta[k] * beta[k * V + v];
    }
    Eigen::VectorXd diff = eta - *mu;
    Eigen::VectorXd pg = *sigma_inv * diff;
    for (int k = 0; k + 1 < K; ++k)
      grad(k) = expected[k] - theta[k] * N - pg(k);
    return ll - 0.5 * diff.dot(pg);
  }

  // Hessian of f at eta plus token responsibilities (phi rows sum to 1).
  void curvature(const Eigen::VectorXd& eta, Eigen::MatrixXd& hess,
                 Eigen::MatrixXd* phi, std::vector<double>& theta,
                 std::vector<double>& expected) const {
    theta_of(eta, theta);
    const int n = K - 1;
    expected.assign(K, 0.0);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    if (phi != nullptr) phi->resize(static_cast<Eigen::Index>(counts->size()), K);
    std::vector<double> r(K);
    for (size_t i = 0; i < counts->size(); ++i) {
      const auto& [v, c] = (*counts)[i];
      double a = 0.0;
      for (int k = 0; k < K; ++k) a += theta[k] * beta[k * V + v];
      a = std::max(a, kATiny);
      const double cv = static_cast<double>(c);
      for (int k = 0; k < K; ++k) {
        r[k] = theta[k] * beta[k * V + v] / a;
        expected[k] += cv * r[k];
        if (phi != nullptr) (*phi)(i, k) = r[k];
      }
      for (int a1 = 0; a1 < n; ++a1)
        for (int a2 = 0; a2 <= a1; ++a2) s(a1, a2) += cv * r[a1] * r[a2];
    }
    hess.resize(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        double h = N * theta[i] * theta[j] - (i == j ? s(i, i) : s(i, j));
        if (i == j) h += expected[i] - N * theta[i];
        h -= (*sigma_inv)(i, j);
        hess(i, j) = h;
        hess(j, i) = h;
      }
    }
  }
};

struct OptOutcome {
  Eigen::VectorXd eta;
  double f = 0.0;
  bool converged = false;
};

// BFGS ascent with Armijo backtracking; gradient tolerance scales with the
// document's token count.
OptOutcome maximize(const DocProblem& prob, Eigen::VectorXd eta) {
  const int n = prob.K - 1;
  const double gtol = 1e-8 * std::max(1.0, prob.N);
  std::vector<double> theta, expected;
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g(n), gn(n);
  double f = prob.eval(eta, g, theta, expected);

  OptOutcome out;
  for (int it = 0; it < kMaxInner; ++it) {
    if (g.lpNorm<Eigen::Infinity>() < gtol) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd d = hinv * g;
    double dg = d.dot(g);
    if (!(dg > 0.0) || !d.allFinite()) {
      hinv.setIdentity();
      d = g;
      dg = g.squaredNorm();
      if (!(dg > 0.0)) {
        out.converged = true;
        break;
      }
    }
    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd enew;
    double fn = 0.0;
    for (int ls = 0; ls < 60; ++ls) {
      enew = eta + step * d;
      fn = prob.eval(enew, gn, theta, expected);
      if (std::isfinite(fn) && fn >= f + 1e-4 * step * dg) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No ascent step found; treat the current iterate as the mode.
      out.converged = g.lpNorm<Eigen::Infinity>() < 1e3 * gtol;
      break;
    }
    Eigen::VectorXd s = enew - eta;
    Eigen::VectorXd y = g - gn;  // minimization-form gradient difference
    double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
      hinv = (eye - (s * y.transpose()) / sy) * hinv *
                 (eye - (y * s.transpose()) / sy) +
             (s * s.transpose()) / sy;
    }
    eta = std::move(enew);
    f = fn;
    g = gn;
  }
  out.eta = std::move(eta);
  out.f = f;
  return out;
}

struct LaplaceParts {
  Eigen::VectorXd nu;
  double logdet_neg_hess = 0.0;
};

// Invert the negative Hessian; escalating ridge keeps a near-singular
// curvature matrix usable.
LaplaceParts laplace_at_mode(const Eigen::MatrixXd& hess) {
  const Eigen::Index n = hess.rows();
  Eigen::MatrixXd neg = -hess;
  LaplaceParts parts;
  for (double ridge = 0.0; ridge <= 1e-2;
       ridge = ridge == 0.0 ? 1e-10 : ridge * 10.0) {
    Eigen::MatrixXd work = neg + ridge * Eigen::MatrixXd::Identity(n, n);
    Eigen::LLT<Eigen::MatrixXd> llt(work);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
      parts.nu = inv.diagonal();
      parts.logdet_neg_hess =
          2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
      return parts;
    }
  }
  // Last resort: diagonal approximation.
  parts.nu.resize(n);
  parts.logdet_neg_hess = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = std::max(neg(i, i), 1e-8);
    parts.nu(i) = 1.0 / d;
    parts.logdet_neg_hess += std::log(d);
  }
  return parts;
}

struct PriorCache {
  Eigen::MatrixXd sigma_inv;
  double logdet_sigma = 0.0;
};

PriorCache invert_sigma(const Eigen::MatrixXd& sigma) {
  const Eigen::Index n = sigma.rows();
  for (double ridge = 0.0; ridge <= 1e-2;
       ridge = ridge == 0.0 ? 1e-10 : ridge * 10.0) {
    Eigen::MatrixXd work = sigma + ridge * Eigen::MatrixXd::Identity(n, n);
    Eigen::LLT<Eigen::MatrixXd> llt(work);
    if (llt.info() == Eigen::Success) {
      PriorCache cache;
      cache.sigma_inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
      cache.logdet_sigma =
          2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
      return cache;
    }
  }
  throw ComputeError("topic covariance is not positive definite");
}

std::vector<double> baseline_log_frequency(const corpus::Corpus& corpus,
                                           int V) {
  std::vector<int64_t> cnt(V, 0);
  int64_t total = 0;
  for (const auto& doc : corpus.docs)
    for (const auto& [v, c] : doc.counts) {
      if (v < 0 || v >= V)
        throw ComputeError("document feature index out of vocabulary range");
      cnt[v] += c;
      total += c;
    }
  if (total <= 0) throw ComputeError("corpus has no tokens");
  std::vector<double> m(V);
  const double tot = static_cast<double>(total);
  for (int v = 0; v < V; ++v)
    m[v] = cnt[v] > 0 ? std::log(static_cast<double>(cnt[v]) / tot)
                      : std::log(0.5 / tot);
  return m;
}

// One penalized Poisson coordinate: Newton step with soft thresholding.
// cells are linear-predictor slots sharing this coefficient.
void update_coordinate(double& coef, const int* cells, int n_cells,
                       std::vector<double>& lp, const std::vector<double>& cnt,
                       double alpha, double& max_delta) {
  double g = 0.0, h = 0.0;
  for (int i = 0; i < n_cells; ++i) {
    double mu = std::exp(lp[cells[i]]);
    g += mu - cnt[cells[i]];
    h += mu;
  }
  if (h < 1e-12) return;
  double z = coef - g / h;
  double t = alpha / h;
  double next = z > t ? z - t : (z < -t ? z + t : 0.0);
  double delta = std::clamp(next - coef, -10.0, 10.0);
  next = std::clamp(coef + delta, -30.0, 30.0);
  delta = next - coef;
  if (delta == 0.0) return;
  for (int i = 0; i < n_cells; ++i) lp[cells[i]] += delta;
  coef = next;
  max_delta = std::max(max_delta, std::abs(delta));
}

void update_kappa(StmModel& model, const std::vector<std::vector<double>>& counts,
                  int threads) {
  const int K = model.K;
  const int L = model.L;
  const int V = model.V;
  const int cells = L * K;
  const double alpha = model.config.kappa_l1;

  std::vector<double> offset(cells);
  std::vector<char> active(cells, 0);
  for (int j = 0; j < cells; ++j) {
    double n = kernels::sum(counts[j].data(), V);
    if (n > 1e-12) {
      active[j] = 1;
      offset[j] = std::log(n);
    }
  }

  // Cell index lists per coordinate.
  std::vector<std::vector<int>> topic_cells(K), cov_cells(L);
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k) {
      int j = l * K + k;
      if (!active[j]) continue;
      topic_cells[k].push_back(j);
      cov_cells[l].push_back(j);
    }

  parallel::parallel_for(V, threads, [&](size_t vi) {
    const int v = static_cast<int>(vi);
    std::vector<double> cnt(cells, 0.0), lp(cells, 0.0);
    for (int j = 0; j < cells; ++j) {
      if (!active[j]) continue;
      cnt[j] = counts[j][v];
      int k = j % K, l = j / K;
      lp[j] = offset[j] + model.m[v] + model.kappa_topic[k][v] +
              model.kappa_cov[l][v] + model.kappa_inter[j][v];
    }
    for (int sweep = 0; sweep < kKappaSweeps; ++sweep) {
      double max_delta = 0.0;
      for (int k = 0; k < K; ++k)
        if (!topic_cells[k].empty())
          update_coordinate(model.kappa_topic[k][v], topic_cells[k].data(),
                            static_cast<int>(topic_cells[k].size()), lp, cnt,
                            alpha, max_delta);
      if (L > 1) {
        for (int l = 0; l < L; ++l)
          if (!cov_cells[l].empty())
            update_coordinate(model.kappa_cov[l][v], cov_cells[l].data(),
                              static_cast<int>(cov_cells[l].size()), lp, cnt,
                              alpha, max_delta);
        for (int j = 0; j < cells; ++j)
          if (active[j])
            update_coordinate(model.kappa_inter[j][v], &j, 1, lp, cnt, alpha,
                              max_delta);
      }
      if (max_delta < kKappaTol) break;
    }
  });
}

std::vector<std::vector<double>> reconstruct_beta_levels(const StmModel& model) {
  std::vector<std::vector<double>> out(model.L);
  for (int l = 0; l < model.L; ++l) {
    out[l].resize(static_cast<size_t>(model.K) * model.V);
    for (int k = 0; k < model.K; ++k) {
      double* row = out[l].data() + static_cast<size_t>(k) * model.V;
      kernels::add4(row, model.m.data(), model.kappa_topic[k].data(),
                    model.kappa_cov[l].data(),
                    model.kappa_inter[l * model.K + k].data(), model.V);
      kernels::softmax_inplace(row, model.V);
    }
  }
  return out;
}

}  // namespace

EStepResult e_step(const corpus::DocumentVector& doc, const StmModel& model) {
  const int K = model.K;
  const int n = K - 1;
  const int level = doc.group.content_level;
  if (level < 0 || level >= model.L)
    throw ComputeError("document content level out of range");

  std::vector<double> beta(static_cast<size_t>(K) * model.V);
  for (int k = 0; k < K; ++k) {
    auto row = model.beta(level, k);
    std::copy(row.begin(), row.end(), beta.begin() + static_cast<size_t>(k) * model.V);
  }

  Eigen::RowVectorXd x =
      design_row(doc.group, static_cast<int>(model.countries.size()));
  Eigen::VectorXd mu = (x * model.gamma).transpose();
  PriorCache prior = invert_sigma(model.sigma);

  DocProblem prob;
  prob.counts = &doc.counts;
  prob.beta = beta.data();
  prob.K = K;
  prob.V = model.V;
  double N = 0.0;
  for (const auto& [v, c] : doc.counts) {
    if (v < 0 || v >= model.V)
      throw ComputeError("document feature index out of vocabulary range");
    N += static_cast<double>(c);
  }
  prob.N = N;
  prob.mu = &mu;
  prob.sigma_inv = &prior.sigma_inv;

  OptOutcome opt = maximize(prob, mu);

  Eigen::MatrixXd hess;
  Eigen::MatrixXd phi;
  std::vector<double> theta, expected;
  prob.curvature(opt.eta, hess, &phi, theta, expected);
  LaplaceParts parts = laplace_at_mode(hess);

  EStepResult res;
  res.lambda = opt.eta;
  res.nu = parts.nu;
  res.phi = std::move(phi);
  res.bound = opt.f - 0.5 * prior.logdet_sigma - 0.5 * parts.logdet_neg_hess;
  res.converged = opt.converged;
  (void)n;
  return res;
}

void m_step(StmModel& model, const PrevalenceDesign& design,
            const MStepStats& stats, int threads) {
  const Eigen::Index D = design.X.rows();
  const Eigen::Index P = design.X.cols();
  if (D < P) throw ComputeError("m_step: fewer documents than design columns");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.X);
  if (qr.rank() < P) throw ComputeError("m_step: singular design matrix");
  model.gamma = qr.solve(stats.lambda);

  Eigen::MatrixXd resid = stats.lambda - design.X * model.gamma;
  Eigen::MatrixXd s = resid.transpose() * resid;
  s.diagonal() += stats.nu.colwise().sum().transpose();
  s /= static_cast<double>(D);
  model.sigma = 0.5 * (s + s.transpose());

  update_kappa(model, stats.counts, threads);
}

StmModel fit(const corpus::Corpus& corpus, const lexicon::SeedLexicon& lexicon,
             const corpus::Vocabulary& vocab, const ModelConfig& config,
             int threads) {
  if (corpus.docs.empty()) throw InputError("empty corpus");
  if (!(config.emtol > 0.0)) throw InputError("emtol must be positive");
  if (config.max_iter < 1) throw InputError("max_iter must be at least 1");

  StmModel model;
  model.config = config;
  model.V = static_cast<int>(vocab.size());
  model.K = static_cast<int>(lexicon.topics.size()) + 1;
  model.countries = corpus.countries;
  model.L = corpus.levels();
  for (const auto& t : lexicon.topics) model.topic_names.push_back(t.name);
  model.topic_names.push_back("residual topic");
  model.vocab_hash = io::fnv1a(corpus::write_vocabulary_tsv(vocab));

  const int K = model.K;
  const int V = model.V;
  const int L = model.L;
  const auto D = static_cast<Eigen::Index>(corpus.docs.size());
  const int n = K - 1;

  model.m = baseline_log_frequency(corpus, V);
  auto beta0 = init_seeded(vocab, lexicon, config.seed_mass);
  model.kappa_topic.assign(K, std::vector<double>(V, 0.0));
  for (int k = 0; k < K; ++k)
    for (int v = 0; v < V; ++v)
      model.kappa_topic[k][v] = std::log(beta0[k][v]) - model.m[v];
  model.kappa_cov.assign(L, std::vector<double>(V, 0.0));
  model.kappa_inter.assign(static_cast<size_t>(L) * K,
                           std::vector<double>(V, 0.0));

  PrevalenceDesign design = build_design(corpus);
  model.terms = design.terms;
  const Eigen::Index P = design.X.cols();
  if (D <= P)
    throw InputError("corpus too small for the prevalence design: D=" +
                     std::to_string(D) + ", P=" + std::to_string(P));

  model.gamma = Eigen::MatrixXd::Zero(P, n);
  model.sigma = Eigen::MatrixXd::Identity(n, n);
  model.lambda = Eigen::MatrixXd::Zero(D, n);
  model.nu = Eigen::MatrixXd::Zero(D, n);
  model.theta = Eigen::MatrixXd::Zero(D, K);

  struct BlockPartial {
    double bound = 0.0;
    std::vector<std::vector<double>> counts;
    std::vector<int> flagged;
  };

  double prev_bound = 0.0;
  for (int iter = 1; iter <= config.max_iter; ++iter) {
    auto beta_levels = reconstruct_beta_levels(model);
    PriorCache prior = invert_sigma(model.sigma);
    Eigen::MatrixXd mu_all = design.X * model.gamma;

    double bound = 0.0;
    MStepStats stats;
    stats.counts.assign(static_cast<size_t>(L) * K,
                        std::vector<double>(V, 0.0));
    std::vector<int> flagged;

    parallel::ordered_block_reduce<BlockPartial>(
        corpus.docs.size(), threads, 64,
        [&](size_t lo, size_t hi, BlockPartial& part) {
          part.counts.assign(static_cast<size_t>(L) * K,
                             std::vector<double>(V, 0.0));
          std::vector<double> theta, expected;
          Eigen::MatrixXd hess, phi;
          for (size_t di = lo; di < hi; ++di) {
            const auto d = static_cast<Eigen::Index>(di);
            const auto& doc = corpus.docs[di];
            const int level = doc.group.content_level;

            DocProblem prob;
            prob.counts = &doc.counts;
            prob.beta = beta_levels[level].data();
            prob.K = K;
            prob.V = V;
            double N = 0.0;
            for (const auto& [v, c] : doc.counts) N += static_cast<double>(c);
            prob.N = N;
            Eigen::VectorXd mu = mu_all.row(d).transpose();
            prob.mu = &mu;
            prob.sigma_inv = &prior.sigma_inv;

            Eigen::VectorXd eta0 =
                iter == 1 ? mu : Eigen::VectorXd(model.lambda.row(d).transpose());
            OptOutcome opt = maximize(prob, std::move(eta0));
            if (!opt.converged) part.flagged.push_back(static_cast<int>(di));

            prob.curvature(opt.eta, hess, &phi, theta, expected);
            LaplaceParts parts = laplace_at_mode(hess);
            if (!std::isfinite(opt.f) || !parts.nu.allFinite())
              throw ComputeError("non-finite E-step result at iteration " +
                                 std::to_string(iter));

            model.lambda.row(d) = opt.eta.transpose();
            model.nu.row(d) = parts.nu.transpose();
            for (int k = 0; k < K; ++k) model.theta(d, k) = theta[k];

            part.bound +=
                opt.f - 0.5 * prior.logdet_sigma - 0.5 * parts.logdet_neg_hess;
            for (size_t i = 0; i < doc.counts.size(); ++i) {
              const auto& [v, c] = doc.counts[i];
              const double cv = static_cast<double>(c);
              for (int k = 0; k < K; ++k)
                part.counts[static_cast<size_t>(level) * K + k][v] +=
                    cv * phi(static_cast<Eigen::Index>(i), k);
            }
          }
        },
        [&](BlockPartial& part) {
          bound += part.bound;
          for (size_t j = 0; j < stats.counts.size(); ++j)
            kernels::axpy(stats.counts[j].data(), 1.0, part.counts[j].data(), V);
          flagged.insert(flagged.end(), part.flagged.begin(),
                         part.flagged.end());
        });

    if (!std::isfinite(bound))
      throw ComputeError("non-finite bound at iteration " +
                         std::to_string(iter));
    model.bound_trace.push_back(bound);
    model.flagged_docs = std::move(flagged);

    bool converged = false;
    if (std::isinf(config.emtol)) {
      converged = true;  // immediate-convergence convention
    } else if (iter >= 2) {
      double rel = std::abs(bound - prev_bound) /
                   std::max(std::abs(prev_bound), 1e-12);
      converged = rel < config.emtol;
    }
    prev_bound = bound;

    if (converged) {
      model.convergence_reason = "emtol";
      break;
    }
    if (iter == config.max_iter) {
      model.convergence_reason = "max_iter";
      break;
    }

    stats.lambda = model.lambda;
    stats.nu = model.nu;
    m_step(model, design, stats, threads);
  }
  return model;
}

}  // namespace seedstm::stm
