#pragma once

#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "kimflow/common.hpp"
#include "kimflow/measures.hpp"
#include "kimflow/rng.hpp"

namespace kimflow {

// Noising channel: X_t = e^{-t} X_0 + sqrt(1 - e^{-2t}) Z. A mixture stays a
// mixture with means e^{-t} m_k and covariance e^{-2t} Sigma + (1-e^{-2t}) I,
// weights untouched. The covariance is formed as I + e^{-2t}(Sigma - I) so a
// standard-Gaussian base stays exactly standard in floating point.
struct EvolvedMeasure {
  double t = 0.0;
  TargetMeasure law;
};

inline EvolvedMeasure ou_evolve(const TargetMeasure& m, double t) {
  if (!(t >= 0)) throw DomainError("ou_evolve: t must be >= 0");
  if (m.family() == Family::perturbed_slc)
    throw UnsupportedError(
        "ou_evolve: exact evolution needs a Gaussian family; use "
        "evolved_score_generic for the perturbed family");
  if (t == 0.0) return {0.0, m};
  const double decay = std::exp(-t);
  const double decay2 = decay * decay;
  const int d = m.dim();
  Eigen::MatrixXd cov =
      Eigen::MatrixXd::Identity(d, d) + decay2 * (m.cov() - Eigen::MatrixXd::Identity(d, d));
  Eigen::MatrixXd means = decay * m.means();
  if (m.family() == Family::gaussian)
    return {t, TargetMeasure::gaussian(means.col(0), std::move(cov))};
  return {t, TargetMeasure::mixture(std::move(means), m.weights(), std::move(cov))};
}

inline Eigen::VectorXd evolved_score(const TargetMeasure& m, double t,
                                     const Eigen::VectorXd& y) {
  return ou_evolve(m, t).law.score(y);
}

// --------------------------------------------------------------------------
// Self-normalized importance-sampling estimator of the evolved score via the
// posterior-mean identity
//   grad log (mu Q_t)(y) = (e^{-t} E[X | Y_t = y] - y) / (1 - e^{-2t}).
// Proposal: the exact OU posterior of the measure's Gaussian base (quadratic
// part of the potential); weights are exp(log_residual), so they are constant
// when the target is the base Gaussian itself.
// --------------------------------------------------------------------------

struct IsScoreEstimate {
  Eigen::VectorXd value;
  double se = 0.0;    // norm of the component-wise standard errors
  double ess = 0.0;   // effective sample size of the weights
  bool low_ess = false;
};

inline IsScoreEstimate evolved_score_generic(const TargetMeasure& m, double t,
                                             const Eigen::VectorXd& y, int n,
                                             SamplerSeed seed) {
  if (!(t > 0)) throw DomainError("evolved_score_generic: t must be > 0");
  if (n < 2) throw DomainError("evolved_score_generic: n must be >= 2");
  if (y.size() != m.dim())
    throw DomainError("evolved_score_generic: dimension mismatch");
  const int d = m.dim();
  const double decay = std::exp(-t);
  const double var = -std::expm1(-2.0 * t);  // 1 - e^{-2t}
  const double kappa = decay * decay / var;

  // Posterior of the Gaussian base: precision P + kappa I, linear term
  // P c + (e^{-t}/var) y.
  Eigen::MatrixXd prec = m.quad_matrix();
  prec.diagonal().array() += kappa;
  Eigen::LLT<Eigen::MatrixXd> llt(prec);
  if (llt.info() != Eigen::Success)
    throw DomainError("evolved_score_generic: posterior precision not SPD");
  Eigen::VectorXd lin = m.quad_matrix() * m.quad_center() + (decay / var) * y;
  Eigen::VectorXd prop_mean = llt.solve(lin);
  // Draw x = mean + U^{-1} z with U the upper Cholesky factor of prec.
  Eigen::MatrixXd upper = llt.matrixU();

  Rng rng(seed);
  Eigen::MatrixXd xs(n, d);
  Eigen::VectorXd logw(n);
  Eigen::VectorXd z(d), x(d);
  for (int i = 0; i < n; ++i) {
    rng.normal_vec_into(z);
    x = upper.triangularView<Eigen::Upper>().solve(z);
    x += prop_mean;
    xs.row(i) = x;
    logw[i] = m.log_residual(x);
  }
  const double shift = logw.maxCoeff();
  Eigen::VectorXd w = (logw.array() - shift).exp();
  const double wsum = w.sum();
  Eigen::VectorXd post_mean = xs.transpose() * w / wsum;

  IsScoreEstimate out;
  out.ess = wsum * wsum / w.squaredNorm();
  out.low_ess = out.ess < 50.0;
  out.value = (decay * post_mean - y) / var;
  // Delta-method variance of the self-normalized mean, per component.
  double var_sum = 0.0;
  for (int j = 0; j < d; ++j) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double dev = xs(i, j) - post_mean[j];
      acc += w[i] * w[i] * dev * dev;
    }
    var_sum += acc / (wsum * wsum);
  }
  out.se = decay / var * std::sqrt(var_sum);
  return out;
}

// --------------------------------------------------------------------------
// Curvature profiles theta with  I + hess log(mu Q_u)  <=  theta_u I.
// --------------------------------------------------------------------------

struct ThetaProfile {
  enum class Kind { slc, perturbed, convexity_profile };
  Kind kind = Kind::slc;
  double alpha = 1.0;  // slc/perturbed: strong convexity; profile: kappa drop
  double L = 0.0;      // perturbed only: Lipschitz bound on grad H
  double ghat0 = 0.0;  // convexity_profile only: ghat'(0)

  static ThetaProfile slc(double alpha) {
    if (!(alpha > 0)) throw DomainError("slc profile: alpha must be > 0");
    return {Kind::slc, alpha, 0.0, 0.0};
  }
  static ThetaProfile perturbed(double alpha, double L) {
    if (!(alpha > 0)) throw DomainError("perturbed profile: alpha must be > 0");
    if (!(L >= 0)) throw DomainError("perturbed profile: L must be >= 0");
    return {Kind::perturbed, alpha, L, 0.0};
  }
  static ThetaProfile convexity_profile(double alpha, double ghat0) {
    if (!(alpha > -1))
      throw DomainError("convexity profile: alpha must be > -1");
    if (!(ghat0 >= 0))
      throw DomainError("convexity profile: ghat'(0) must be >= 0");
    return {Kind::convexity_profile, alpha, 0.0, ghat0};
  }
};

// theta_u for the given profile. The perturbed profile with L > 0 diverges
// as u -> 0 (the 1/sqrt(e^{2u}-1) term); that evaluation returns +infinity.
inline double theta(const ThetaProfile& p, double u) {
  if (!(u >= 0)) throw DomainError("theta: u must be >= 0");
  switch (p.kind) {
    case ThetaProfile::Kind::slc: {
      const double den = p.alpha * std::expm1(2.0 * u) + 1.0;
      return (1.0 - p.alpha) / den;
    }
    case ThetaProfile::Kind::perturbed: {
      const double b = std::expm1(2.0 * u);  // e^{2u} - 1
      const double den = p.alpha * b + 1.0;
      double v = (1.0 - p.alpha) / den;
      if (p.L == 0.0) return v;  // identical to slc by construction
      if (u == 0.0) return kInf;
      const double e2u = b + 1.0;
      v += e2u * p.L * p.L / (den * den);
      v += 2.0 * p.L * e2u / (std::pow(den, 1.5) * std::sqrt(b));
      return v;
    }
    case ThetaProfile::Kind::convexity_profile: {
      const double em = std::exp(-2.0 * u);
      const double c = 1.0 + (1.0 - em) * p.alpha;
      return -(em / c) * (p.alpha - p.ghat0 / c);
    }
  }
  return 0.0;
}

// Worst-case violation max_probes [ lambda_max(I + hess log q_t) - theta_t ];
// <= 0 means the profile certificate holds at every probe.
inline double theta_empirical_check(const TargetMeasure& m,
                                    const ThetaProfile& p, double t,
                                    const Eigen::MatrixXd& probes) {
  const EvolvedMeasure ev = ou_evolve(m, t);
  const double bound = theta(p, t);
  double worst = -kInf;
  for (int i = 0; i < probes.rows(); ++i) {
    Eigen::VectorXd y = probes.row(i);
    Eigen::MatrixXd h = ev.law.hessian(y);
    h.diagonal().array() += 1.0;  // I + hess log q_t
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    worst = std::max(worst, es.eigenvalues().maxCoeff() - bound);
  }
  return worst;
}

}  // namespace kimflow
