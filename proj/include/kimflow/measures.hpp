#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "kimflow/common.hpp"
#include "kimflow/rng.hpp"

namespace kimflow {

enum class Family { gaussian, gaussian_mixture, perturbed_slc };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::gaussian_mixture: return "mixture";
    case Family::perturbed_slc: return "perturbed";
  }
  return "?";
}

inline Family family_from_name(const std::string& s) {
  if (s == "gaussian") return Family::gaussian;
  if (s == "mixture") return Family::gaussian_mixture;
  if (s == "perturbed") return Family::perturbed_slc;
  throw DomainError("unknown family '" + s +
                    "' (gaussian, mixture, perturbed)");
}

struct SampleResult {
  Eigen::MatrixXd points;   // n x d, one draw per row
  bool approximate = false;  // true for MCMC draws
};

struct McmcOptions {
  int burnin = 2000;
  int thin = 20;
  double step = 0.0;  // 0 selects 0.1 / lambda_max(quadratic part)
};

// Scratch buffers for the allocation-free score path used inside ODE loops.
struct ScoreWorkspace {
  Eigen::VectorXd logits;  // K
  Eigen::VectorXd resp;    // K
  Eigen::VectorXd mbar;    // d
};

// Shared-covariance Gaussian mixture / single Gaussian / log-concave base
// with Lipschitz perturbation. Instances are immutable after construction;
// derived quantities (Cholesky, inverse, per-component linear forms) are
// precomputed once so density/score evaluations stay cheap.
class TargetMeasure {
 public:
  static TargetMeasure gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
    TargetMeasure m;
    m.family_ = Family::gaussian;
    m.init_mixture(std::move(mean), Eigen::VectorXd::Ones(1), std::move(cov));
    return m;
  }

  // means: d x K (one column per component); weights: K, nonnegative, sum 1.
  static TargetMeasure mixture(Eigen::MatrixXd means, Eigen::VectorXd weights,
                               Eigen::MatrixXd cov) {
    TargetMeasure m;
    m.family_ = Family::gaussian_mixture;
    m.init_mixture(std::move(means), std::move(weights), std::move(cov));
    return m;
  }

  // mu ~ exp(-V - H) with V(x) = x'Ax/2 and H a log-sum-exp tilt built from
  // the given means/weights (H(x) = log sum_k w_k exp(m_k'Ax - m_k'Am_k/2)).
  static TargetMeasure perturbed_tilt(Eigen::MatrixXd A,
                                      Eigen::MatrixXd tilt_means,
                                      Eigen::VectorXd tilt_weights) {
    TargetMeasure m;
    m.family_ = Family::perturbed_slc;
    m.init_quad(std::move(A));
    if (tilt_means.rows() != m.d_)
      throw DomainError("perturbed_tilt: tilt means dimension mismatch");
    m.check_weights(tilt_weights);
    m.tilt_means_ = std::move(tilt_means);
    m.tilt_weights_ = std::move(tilt_weights);
    m.tilt_lin_ = m.quad_ * m.tilt_means_;  // d x K, columns A m_k
    const int K = static_cast<int>(m.tilt_weights_.size());
    m.tilt_const_.resize(K);
    for (int k = 0; k < K; ++k)
      m.tilt_const_[k] = std::log(m.tilt_weights_[k]) -
                         0.5 * m.tilt_means_.col(k).dot(m.tilt_lin_.col(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.quad_);
    double max_norm = 0.0;
    for (int k = 0; k < K; ++k)
      max_norm = std::max(max_norm, m.tilt_means_.col(k).norm());
    m.lipschitz_ = es.eigenvalues().maxCoeff() * max_norm;
    return m;
  }

  // mu ~ exp(-V - H) with externally supplied H. The gradient is optional
  // (central differences otherwise); lipschitz_L must bound ||grad H||.
  static TargetMeasure perturbed_callable(
      Eigen::MatrixXd A, std::function<double(const Eigen::VectorXd&)> H,
      std::optional<std::function<Eigen::VectorXd(const Eigen::VectorXd&)>>
          grad_H,
      double lipschitz_L) {
    if (!(lipschitz_L >= 0))
      throw DomainError("perturbed_callable: Lipschitz constant must be >= 0");
    TargetMeasure m;
    m.family_ = Family::perturbed_slc;
    m.init_quad(std::move(A));
    m.h_fun_ = std::move(H);
    m.h_grad_ = std::move(grad_H);
    m.lipschitz_ = lipschitz_L;
    return m;
  }

  Family family() const { return family_; }
  int dim() const { return d_; }
  int components() const {
    return family_ == Family::perturbed_slc
               ? static_cast<int>(tilt_weights_.size())
               : static_cast<int>(weights_.size());
  }

  const Eigen::MatrixXd& means() const { return means_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  const Eigen::MatrixXd& cov_inv() const { return cov_inv_; }

  // Quadratic part of the potential: Sigma^{-1} for Gaussian families
  // (centered at quad_center), A for the perturbed family (centered at 0).
  const Eigen::MatrixXd& quad_matrix() const {
    return family_ == Family::perturbed_slc ? quad_ : cov_inv_;
  }
  Eigen::VectorXd quad_center() const {
    if (family_ == Family::gaussian) return means_.col(0);
    return Eigen::VectorXd::Zero(d_);
  }

  // Declared/derived bound on ||grad H|| for the perturbed family, or the
  // mixture tilt bound lambda_max(Sigma^{-1}) * max_k ||m_k|| otherwise.
  double lipschitz_L() const {
    if (family_ == Family::gaussian) return 0.0;
    if (family_ == Family::perturbed_slc) return lipschitz_;
    double max_norm = 0.0;
    for (int k = 0; k < means_.cols(); ++k)
      max_norm = std::max(max_norm, means_.col(k).norm());
    return cov_inv_eigs_.maxCoeff() * max_norm;
  }

  // log mu(x); exactly normalized for Gaussian families, and the raw
  // -V(x) - H(x) (no normalizing constant) for the perturbed family.
  double log_density(const Eigen::VectorXd& x) const {
    check_dim(x);
    if (family_ == Family::perturbed_slc)
      return -0.5 * x.dot(quad_ * x) - h_value(x);
    const double shared = log_norm_ - 0.5 * x.dot(cov_inv_ * x);
    return shared + logsumexp_logits(x);
  }

  Eigen::VectorXd score(const Eigen::VectorXd& x) const {
    ScoreWorkspace ws;
    Eigen::VectorXd out(d_);
    score_into(x, out, ws);
    return out;
  }

  void score_into(const Eigen::VectorXd& x, Eigen::VectorXd& out,
                  ScoreWorkspace& ws) const {
    check_dim(x);
    if (family_ == Family::perturbed_slc) {
      out.noalias() = -(quad_ * x);
      out -= h_gradient(x);
      return;
    }
    const int K = static_cast<int>(weights_.size());
    if (K == 1) {
      out.noalias() = cov_inv_ * (means_.col(0) - x);
      return;
    }
    responsibilities(x, ws);
    ws.mbar.noalias() = means_ * ws.resp;
    ws.mbar -= x;
    out.noalias() = cov_inv_ * ws.mbar;
  }

  // For Gaussian families: -Sigma^{-1} + Sigma^{-1} Cov_r[m] Sigma^{-1},
  // the responsibility-weighted component-mean covariance pushed through
  // the shared precision. Perturbed: -A - hess H (tilt analytic, callable
  // by differencing the gradient).
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const {
    check_dim(x);
    if (family_ == Family::perturbed_slc) return -quad_ - h_hessian(x);
    const int K = static_cast<int>(weights_.size());
    if (K == 1) return -cov_inv_;
    ScoreWorkspace ws;
    responsibilities(x, ws);
    Eigen::VectorXd mbar = means_ * ws.resp;
    Eigen::MatrixXd cov_m = Eigen::MatrixXd::Zero(d_, d_);
    for (int k = 0; k < K; ++k) {
      Eigen::VectorXd dm = means_.col(k) - mbar;
      cov_m.noalias() += ws.resp[k] * dm * dm.transpose();
    }
    return -cov_inv_ + cov_inv_ * cov_m * cov_inv_;
  }

  // Exact sampler (Gaussian families only). Component choice consumes one
  // uniform, the Gaussian part d normals, in that order; draw_coupled()
  // reuses the same transform for common-random-number couplings.
  SampleResult sample(SamplerSeed seed, int n) const {
    if (family_ == Family::perturbed_slc)
      throw UnsupportedError(
          "exact sampling is not available for the perturbed family; "
          "use sample_mcmc");
    if (n < 0) throw DomainError("sample: n must be >= 0");
    Rng rng(seed);
    SampleResult out;
    out.points.resize(n, d_);
    Eigen::VectorXd z(d_), x(d_);
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform();
      rng.normal_vec_into(z);
      draw_coupled_into(u, z, x);
      out.points.row(i) = x;
    }
    return out;
  }

  // Deterministic transform (u, z) -> draw: inverse-CDF component pick on
  // the weight ladder, then mean_k + chol(Sigma) z.
  Eigen::VectorXd draw_coupled(double u, const Eigen::VectorXd& z) const {
    Eigen::VectorXd x(d_);
    draw_coupled_into(u, z, x);
    return x;
  }

  void draw_coupled_into(double u, const Eigen::VectorXd& z,
                         Eigen::VectorXd& x) const {
    if (family_ == Family::perturbed_slc)
      throw UnsupportedError("draw_coupled requires an exactly samplable family");
    int k = 0;
    const int K = static_cast<int>(weights_.size());
    double acc = weights_[0];
    while (k + 1 < K && u >= acc) acc += weights_[++k];
    x.noalias() = cov_chol_ * z;
    x += means_.col(k);
  }

  // Unadjusted Langevin chain; draws are tagged approximate.
  SampleResult sample_mcmc(SamplerSeed seed, int n, McmcOptions opt) const {
    if (n < 0) throw DomainError("sample_mcmc: n must be >= 0");
    if (opt.thin < 1 || opt.burnin < 0)
      throw DomainError("sample_mcmc: bad burnin/thin");
    double step = opt.step;
    if (step <= 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(quad_matrix());
      step = 0.1 / es.eigenvalues().maxCoeff();
    }
    Rng rng(seed);
    Eigen::VectorXd x = quad_center();
    Eigen::VectorXd xi(d_), s(d_);
    ScoreWorkspace ws;
    const double noise = std::sqrt(2.0 * step);
    SampleResult out;
    out.approximate = true;
    out.points.resize(n, d_);
    const long total = opt.burnin + static_cast<long>(n) * opt.thin;
    int written = 0;
    for (long it = 0; it < total && written < n; ++it) {
      score_into(x, s, ws);
      rng.normal_vec_into(xi);
      x += step * s + noise * xi;
      if (!x.allFinite())
        throw DivergenceError("sample_mcmc: chain left finite range", 0.0);
      if (it >= opt.burnin && (it - opt.burnin) % opt.thin == opt.thin - 1)
        out.points.row(written++) = x;
    }
    return out;
  }

  // Split log mu(x) = -(x-c)'P(x-c)/2 + residual(x) + const used by the
  // importance-sampling evolved-score estimator: P/c from quad_matrix and
  // quad_center, residual below (identically 0 for a single Gaussian).
  double log_residual(const Eigen::VectorXd& x) const {
    check_dim(x);
    switch (family_) {
      case Family::gaussian:
        return 0.0;
      case Family::gaussian_mixture:
        return logsumexp_logits(x);
      case Family::perturbed_slc:
        return -h_value(x);
    }
    return 0.0;
  }

  // Max finite-difference gradient norm of H over seeded probe points;
  // sanity companion to the declared Lipschitz constant.
  double probe_perturbation_gradient(int n_probes, SamplerSeed seed) const {
    if (family_ != Family::perturbed_slc)
      throw UnsupportedError("probe_perturbation_gradient: perturbed family only");
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < n_probes; ++i) {
      Eigen::VectorXd x = 2.0 * rng.normal_vec(d_);
      worst = std::max(worst, h_gradient(x).norm());
    }
    return worst;
  }

 private:
  TargetMeasure() = default;

  void init_mixture(Eigen::MatrixXd means, Eigen::VectorXd weights,
                    Eigen::MatrixXd cov) {
    if (means.size() == 0) throw DomainError("measure: empty means");
    d_ = static_cast<int>(means.rows());
    if (cov.rows() != d_ || cov.cols() != d_)
      throw DomainError("measure: covariance shape mismatch");
    if (means.cols() != weights.size())
      throw DomainError("measure: means/weights count mismatch");
    check_weights(weights);
    means_ = std::move(means);
    weights_ = std::move(weights);
    cov_ = std::move(cov);
    if (!cov_.isApprox(cov_.transpose(), 1e-12))
      throw DomainError("measure: covariance not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(cov_);
    if (llt.info() != Eigen::Success)
      throw DomainError("measure: covariance not positive definite");
    cov_chol_ = llt.matrixL();
    cov_inv_ = llt.solve(Eigen::MatrixXd::Identity(d_, d_));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov_inv_);
    cov_inv_eigs_ = es.eigenvalues();
    double logdet = 0.0;
    for (int i = 0; i < d_; ++i) logdet += 2.0 * std::log(cov_chol_(i, i));
    log_norm_ = -0.5 * d_ * std::log(2.0 * M_PI) - 0.5 * logdet;
    lin_ = cov_inv_ * means_;
    const int K = static_cast<int>(weights_.size());
    comp_const_.resize(K);
    for (int k = 0; k < K; ++k)
      comp_const_[k] = (weights_[k] > 0 ? std::log(weights_[k]) : -kInf) -
                       0.5 * means_.col(k).dot(lin_.col(k));
  }

  void init_quad(Eigen::MatrixXd A) {
    d_ = static_cast<int>(A.rows());
    if (A.cols() != d_ || d_ == 0) throw DomainError("measure: bad quadratic matrix");
    if (!A.isApprox(A.transpose(), 1e-12))
      throw DomainError("measure: quadratic matrix not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
      throw DomainError("measure: quadratic matrix not positive definite");
    quad_ = std::move(A);
  }

  void check_weights(const Eigen::VectorXd& w) const {
    if (w.size() == 0) throw DomainError("measure: empty weights");
    if (w.minCoeff() < 0) throw DomainError("measure: negative weight");
    if (std::abs(w.sum() - 1.0) > 1e-9)
      throw DomainError("measure: weights must sum to 1");
  }

  void check_dim(const Eigen::VectorXd& x) const {
    if (x.size() != d_) throw DomainError("measure: point dimension mismatch");
  }

  // Logits of the shared-covariance mixture with the common quadratic term
  // dropped (it cancels in both softmax and log-sum-exp + shared part).
  void responsibilities(const Eigen::VectorXd& x, ScoreWorkspace& ws) const {
    const int K = static_cast<int>(weights_.size());
    ws.logits.resize(K);
    ws.resp.resize(K);
    ws.logits.noalias() = lin_.transpose() * x;
    ws.logits += comp_const_;
    const double m = ws.logits.maxCoeff();
    double z = 0.0;
    for (int k = 0; k < K; ++k) {
      ws.resp[k] = std::exp(ws.logits[k] - m);
      z += ws.resp[k];
    }
    ws.resp /= z;
  }

  double logsumexp_logits(const Eigen::VectorXd& x) const {
    Eigen::VectorXd logits = lin_.transpose() * x + comp_const_;
    const double m = logits.maxCoeff();
    double z = 0.0;
    for (int k = 0; k < logits.size(); ++k) z += std::exp(logits[k] - m);
    return m + std::log(z);
  }

  double h_value(const Eigen::VectorXd& x) const {
    if (h_fun_) return (*h_fun_)(x);
    Eigen::VectorXd logits = tilt_lin_.transpose() * x + tilt_const_;
    const double m = logits.maxCoeff();
    double z = 0.0;
    for (int k = 0; k < logits.size(); ++k) z += std::exp(logits[k] - m);
    return m + std::log(z);
  }

  Eigen::VectorXd h_gradient(const Eigen::VectorXd& x) const {
    if (h_grad_) return (*h_grad_)(x);
    if (h_fun_) {  // central differences
      Eigen::VectorXd g(d_), e = x;
      for (int i = 0; i < d_; ++i) {
        const double h = 1e-6 * (1.0 + std::abs(x[i]));
        e[i] = x[i] + h;
        const double up = (*h_fun_)(e);
        e[i] = x[i] - h;
        const double dn = (*h_fun_)(e);
        e[i] = x[i];
        g[i] = (up - dn) / (2.0 * h);
      }
      return g;
    }
    Eigen::VectorXd logits = tilt_lin_.transpose() * x + tilt_const_;
    const double m = logits.maxCoeff();
    Eigen::VectorXd r(logits.size());
    double z = 0.0;
    for (int k = 0; k < logits.size(); ++k) {
      r[k] = std::exp(logits[k] - m);
      z += r[k];
    }
    r /= z;
    return tilt_lin_ * r;  // A * sum_k r_k m_k
  }

  Eigen::MatrixXd h_hessian(const Eigen::VectorXd& x) const {
    if (!h_fun_) {
      Eigen::VectorXd logits = tilt_lin_.transpose() * x + tilt_const_;
      const double m = logits.maxCoeff();
      Eigen::VectorXd r(logits.size());
      double z = 0.0;
      for (int k = 0; k < logits.size(); ++k) {
        r[k] = std::exp(logits[k] - m);
        z += r[k];
      }
      r /= z;
      Eigen::VectorXd gbar = tilt_lin_ * r;
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(d_, d_);
      for (int k = 0; k < logits.size(); ++k) {
        Eigen::VectorXd dg = tilt_lin_.col(k) - gbar;
        hess.noalias() += r[k] * dg * dg.transpose();
      }
      return hess;
    }
    Eigen::MatrixXd hess(d_, d_);
    Eigen::VectorXd e = x;
    for (int i = 0; i < d_; ++i) {
      const double h = 1e-5 * (1.0 + std::abs(x[i]));
      e[i] = x[i] + h;
      Eigen::VectorXd up = h_gradient(e);
      e[i] = x[i] - h;
      Eigen::VectorXd dn = h_gradient(e);
      e[i] = x[i];
      hess.col(i) = (up - dn) / (2.0 * h);
    }
    return 0.5 * (hess + hess.transpose());
  }

  Family family_ = Family::gaussian;
  int d_ = 0;

  // Gaussian / mixture state
  Eigen::MatrixXd means_;       // d x K
  Eigen::VectorXd weights_;     // K
  Eigen::MatrixXd cov_;         // d x d shared covariance
  Eigen::MatrixXd cov_chol_;    // lower Cholesky of cov
  Eigen::MatrixXd cov_inv_;
  Eigen::VectorXd cov_inv_eigs_;
  Eigen::MatrixXd lin_;         // Sigma^{-1} * means
  Eigen::VectorXd comp_const_;  // log w_k - m_k' Sigma^{-1} m_k / 2
  double log_norm_ = 0.0;

  // Perturbed state
  Eigen::MatrixXd quad_;  // A
  Eigen::MatrixXd tilt_means_;
  Eigen::VectorXd tilt_weights_;
  Eigen::MatrixXd tilt_lin_;  // A * tilt_means
  Eigen::VectorXd tilt_const_;
  std::optional<std::function<double(const Eigen::VectorXd&)>> h_fun_;
  std::optional<std::function<Eigen::VectorXd(const Eigen::VectorXd&)>> h_grad_;
  double lipschitz_ = 0.0;
};

struct LipschitzBound {
  double alpha;  // lambda_min(Sigma^{-1})
  double beta;   // lambda_max(Sigma^{-1})
  double L;      // beta * max_k ||m_k||
};

// (alpha, beta, L) for a shared-covariance mixture viewed as a Lipschitz
// perturbation of its Gaussian base: ||grad H|| <= beta * max_k ||m_k||.
inline LipschitzBound mixture_lipschitz_bound(const TargetMeasure& m) {
  if (m.family() == Family::perturbed_slc)
    throw UnsupportedError("mixture_lipschitz_bound: Gaussian families only");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.cov_inv());
  LipschitzBound out;
  out.alpha = es.eigenvalues().minCoeff();
  out.beta = es.eigenvalues().maxCoeff();
  double max_norm = 0.0;
  for (int k = 0; k < m.means().cols(); ++k)
    max_norm = std::max(max_norm, m.means().col(k).norm());
  out.L = out.beta * max_norm;
  return out;
}

}  // namespace kimflow
