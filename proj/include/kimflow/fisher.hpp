#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "kimflow/bounds.hpp"
#include "kimflow/common.hpp"
#include "kimflow/measures.hpp"
#include "kimflow/ou.hpp"

namespace kimflow {

namespace detail {
inline SamplerSeed substream(SamplerSeed s, std::uint64_t k) {
  return {s.seed, splitmix64(s.stream ^ splitmix64(k ^ 0x6b696d666c6f77ull))};
}

inline void require_finite_score(const Eigen::VectorXd& v,
                                 const Eigen::VectorXd& x, const char* who) {
  if (v.allFinite()) return;
  std::ostringstream os;
  os << who << ": non-finite score at probe point [" << x.transpose() << "]";
  throw DomainError(os.str());
}
}  // namespace detail

struct FiEstimate {
  double value = 0.0;
  double se = 0.0;
  int n = 0;
};

// Monte Carlo relative Fisher information E_nu ||score_nu - score_mu||^2.
// nu must be exactly samplable unless MCMC options are supplied.
inline FiEstimate fi(const TargetMeasure& nu, const TargetMeasure& mu, int n,
                     SamplerSeed seed,
                     std::optional<McmcOptions> mcmc = std::nullopt) {
  if (nu.dim() != mu.dim()) throw DomainError("fi: dimension mismatch");
  if (n < 2) throw DomainError("fi: n must be >= 2");
  const SampleResult draws =
      mcmc ? nu.sample_mcmc(seed, n, *mcmc) : nu.sample(seed, n);
  ScoreWorkspace ws_nu, ws_mu;
  Eigen::VectorXd x(nu.dim()), s_nu(nu.dim()), s_mu(nu.dim());
  std::vector<double> vals(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    x = draws.points.row(i);
    nu.score_into(x, s_nu, ws_nu);
    mu.score_into(x, s_mu, ws_mu);
    detail::require_finite_score(s_nu, x, "fi(nu)");
    detail::require_finite_score(s_mu, x, "fi(mu)");
    vals[static_cast<std::size_t>(i)] = (s_nu - s_mu).squaredNorm();
  }
  const MeanSe ms = mean_with_se(vals);
  return {ms.mean, ms.se, n};
}

// FI(g1 || g2) for Gaussians: with A = S2^{-1} - S1^{-1} and
// c = S1^{-1} m1 - S2^{-1} m2, the score difference is the affine map
// A x + c, and integrating its squared norm over g1 gives
// ||A m1 + c||^2 + tr(A S1 A').
inline double fi_gaussian_closed(const TargetMeasure& g1,
                                 const TargetMeasure& g2) {
  if (g1.family() != Family::gaussian || g2.family() != Family::gaussian)
    throw UnsupportedError("fi_gaussian_closed: both measures must be Gaussian");
  if (g1.dim() != g2.dim())
    throw DomainError("fi_gaussian_closed: dimension mismatch");
  const Eigen::MatrixXd A = g2.cov_inv() - g1.cov_inv();
  const Eigen::VectorXd c =
      g1.cov_inv() * g1.means().col(0) - g2.cov_inv() * g2.means().col(0);
  const Eigen::VectorXd mean_term = A * g1.means().col(0) + c;
  return mean_term.squaredNorm() + (A * g1.cov() * A.transpose()).trace();
}

// Deterministic FI for 1-d targets with normalized densities, by Simpson
// integration of ||score_nu - score_mu||^2 nu over a window wide enough
// that the discarded tail is far below the tolerance. Score differences of
// the supported families grow at most linearly, so fourteen standard
// deviations of margin is plenty.
inline double fi_quadrature_1d(const TargetMeasure& nu,
                               const TargetMeasure& mu,
                               const QuadratureSpec& q = {}) {
  if (nu.dim() != 1 || mu.dim() != 1)
    throw UnsupportedError("fi_quadrature_1d: 1-d targets only");
  if (nu.family() == Family::perturbed_slc)
    throw UnsupportedError(
        "fi_quadrature_1d: nu must have a normalized density");
  const double sd = std::sqrt(nu.cov()(0, 0));
  const double lo = nu.means().row(0).minCoeff() - 14.0 * sd;
  const double hi = nu.means().row(0).maxCoeff() + 14.0 * sd;
  ScoreWorkspace ws_nu, ws_mu;
  Eigen::VectorXd s_nu(1), s_mu(1), x(1);
  return integrate_to_tol(
      [&](double t) {
        x[0] = t;
        nu.score_into(x, s_nu, ws_nu);
        mu.score_into(x, s_mu, ws_mu);
        const double diff = s_nu[0] - s_mu[0];
        return diff * diff * std::exp(nu.log_density(x));
      },
      lo, hi, q);
}

struct FiInfEstimate {
  double value = 0.0;      // refined max of ||score diff||^2
  double unrefined = 0.0;  // max over the raw draws, before ascent
  int n = 0;
};

// Lower-bound estimate of the essential sup of ||score_nu - score_mu||^2:
// max over nu-draws, each refined by a few steps of hill climbing on a
// finite-difference gradient (step 0.05 * max(||x||, 1) along the gradient
// direction, kept only when the objective improves).
inline FiInfEstimate fi_inf(const TargetMeasure& nu, const TargetMeasure& mu,
                            int n, int refine_steps, SamplerSeed seed) {
  if (nu.dim() != mu.dim()) throw DomainError("fi_inf: dimension mismatch");
  if (n < 1) throw DomainError("fi_inf: n must be >= 1");
  const int d = nu.dim();
  ScoreWorkspace ws_nu, ws_mu;
  Eigen::VectorXd s_nu(d), s_mu(d);
  auto objective = [&](const Eigen::VectorXd& x) {
    nu.score_into(x, s_nu, ws_nu);
    mu.score_into(x, s_mu, ws_mu);
    return (s_nu - s_mu).squaredNorm();
  };
  const SampleResult draws = nu.sample(seed, n);
  FiInfEstimate out;
  out.n = n;
  const double h = 1e-4;
  Eigen::VectorXd x(d), g(d), e(d), cand(d);
  for (int i = 0; i < n; ++i) {
    x = draws.points.row(i);
    double f = objective(x);
    out.unrefined = std::max(out.unrefined, f);
    for (int step = 0; step < refine_steps; ++step) {
      e = x;
      for (int j = 0; j < d; ++j) {
        e[j] = x[j] + h;
        const double up = objective(e);
        e[j] = x[j] - h;
        const double dn = objective(e);
        e[j] = x[j];
        g[j] = (up - dn) / (2.0 * h);
      }
      const double gn = g.norm();
      if (gn == 0.0) break;
      cand = x + (0.05 * std::max(x.norm(), 1.0) / gn) * g;
      const double fc = objective(cand);
      if (fc <= f) break;  // ascent stalled; keep the best point found
      x = cand;
      f = fc;
    }
    out.value = std::max(out.value, f);
  }
  return out;
}

struct DecayCurve {
  std::vector<double> times;
  std::vector<double> fi;        // FI(q_t^nu || q_t^mu) estimates
  std::vector<double> se;
  std::vector<double> envelope;  // e^{4 Phi(t) - 2t} * base_fi
  double base_fi = 0.0;          // FI(nu || mu) anchor at t = 0
  double base_se = 0.0;
};

// Evolve-then-sample decay curve with its Gronwall envelope.
inline DecayCurve fi_decay_curve(const TargetMeasure& nu,
                                 const TargetMeasure& mu,
                                 const ThetaProfile& profile,
                                 const std::vector<double>& times, int n,
                                 SamplerSeed seed) {
  DecayCurve out;
  const FiEstimate base = fi(nu, mu, n, detail::substream(seed, 0));
  out.base_fi = base.value;
  out.base_se = base.se;
  out.times = times;
  out.fi.reserve(times.size());
  out.se.reserve(times.size());
  out.envelope.reserve(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double t = times[j];
    if (!(t >= 0)) throw DomainError("fi_decay_curve: times must be >= 0");
    const FiEstimate est =
        t == 0.0 ? fi(nu, mu, n, detail::substream(seed, 0))
                 : fi(ou_evolve(nu, t).law, ou_evolve(mu, t).law, n,
                      detail::substream(seed, j + 1));
    out.fi.push_back(est.value);
    out.se.push_back(est.se);
    out.envelope.push_back(gronwall_envelope(profile, t) * base.value);
  }
  return out;
}

// Squared Bures-Wasserstein distance parts: W2^2 = ||m1 - m2||^2 +
// tr(S1 + S2 - 2 (S2^{1/2} S1 S2^{1/2})^{1/2}); returns W2 itself.
inline double w2_gaussian(const TargetMeasure& g1, const TargetMeasure& g2) {
  if (g1.family() != Family::gaussian || g2.family() != Family::gaussian)
    throw UnsupportedError("w2_gaussian: both measures must be Gaussian");
  if (g1.dim() != g2.dim()) throw DomainError("w2_gaussian: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(g2.cov());
  const Eigen::MatrixXd root2 =
      es2.eigenvectors() *
      es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
      es2.eigenvectors().transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esm(root2 * g1.cov() * root2);
  const double cross = esm.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  const double sq = (g1.means().col(0) - g2.means().col(0)).squaredNorm() +
                    g1.cov().trace() + g2.cov().trace() - 2.0 * cross;
  return std::sqrt(std::max(sq, 0.0));
}

// Standard KL(nu || mu) between Gaussians (integral of log(nu/mu) dnu).
inline double kl_gaussian(const TargetMeasure& nu, const TargetMeasure& mu) {
  if (nu.family() != Family::gaussian || mu.family() != Family::gaussian)
    throw UnsupportedError("kl_gaussian: both measures must be Gaussian");
  if (nu.dim() != mu.dim()) throw DomainError("kl_gaussian: dimension mismatch");
  const int d = nu.dim();
  const Eigen::VectorXd dm = mu.means().col(0) - nu.means().col(0);
  const double trace_term = (mu.cov_inv() * nu.cov()).trace();
  const double quad_term = dm.dot(mu.cov_inv() * dm);
  const double logdet = std::log(mu.cov().determinant()) -
                        std::log(nu.cov().determinant());
  return 0.5 * (trace_term + quad_term - d + logdet);
}

}  // namespace kimflow
