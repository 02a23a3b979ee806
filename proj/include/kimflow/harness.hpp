#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kimflow/bounds.hpp"
#include "kimflow/common.hpp"
#include "kimflow/config.hpp"
#include "kimflow/fisher.hpp"
#include "kimflow/flow.hpp"
#include "kimflow/measures.hpp"
#include "kimflow/ou.hpp"
#include "kimflow/report.hpp"
#include "kimflow/rng.hpp"

namespace kimflow {

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  std::uint64_t config_hash = 0;

  std::optional<TargetMeasure> mu, nu;
  std::optional<ThetaProfile> profile;  // explicit override; else derived
  FlowConfig flow;

  int n = 10000;           // coupled-flow sample count
  int fi_n = 200000;       // Monte Carlo FI draws (fallback route only)
  int refine_steps = 8;    // hill-climb steps for the sup-FI probe
  int probes = 200;        // curvature-check probe count
  double probe_radius = 4.0;
  double theta_tol = 1e-8;
  std::vector<double> times;

  // constants_table grid
  double T_grid = 20.0;
  double lsi_s = 1.0;
  double gap_tol = 1e-5;
  std::vector<double> alphas{0.5, 1.0, 2.0};
  std::vector<double> Ls{0.0, 0.3, 1.0};
  std::vector<double> lhat_L{0.1, 10.0};
  std::vector<double> lhat_R{0.1, 10.0};
  double lhat_alpha = 1.0;
};

namespace detail {

// Relative fp guard on inequality checks whose two sides can be equal in
// exact arithmetic; keeps saturated cases from failing on the last ulp.
constexpr double kFpGuard = 1e-12;

inline bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.array() == b.array()).all();
}

inline bool measures_identical(const TargetMeasure& a, const TargetMeasure& b) {
  if (a.family() != b.family() || a.dim() != b.dim()) return false;
  if (a.family() == Family::perturbed_slc) return false;  // callables opaque
  if (a.components() != b.components()) return false;
  return same_matrix(a.means(), b.means()) &&
         (a.weights().array() == b.weights().array()).all() &&
         same_matrix(a.cov(), b.cov());
}

// Uniform draws from the centered ball: direction from a normalized
// Gaussian, radius via the d-th root of a uniform.
inline Eigen::MatrixXd ball_probes(int n, int d, double radius,
                                   SamplerSeed seed) {
  Rng rng(seed);
  Eigen::MatrixXd out(n, d);
  Eigen::VectorXd z(d);
  for (int i = 0; i < n; ++i) {
    rng.normal_vec_into(z);
    const double r = radius * std::pow(rng.uniform(), 1.0 / d);
    const double nz = z.norm();
    out.row(i) = nz > 0 ? Eigen::VectorXd(r / nz * z)
                        : Eigen::VectorXd(Eigen::VectorXd::Zero(d));
  }
  return out;
}

}  // namespace detail

// Conservative curvature certificate for a target, by family: Gaussians are
// strongly log-concave with the inverse of their largest covariance
// eigenvalue; shared-covariance mixtures are Lipschitz tilts of their
// Gaussian base; explicit tilts carry their own quadratic form and
// Lipschitz constant.
inline ThetaProfile auto_profile(const TargetMeasure& m) {
  switch (m.family()) {
    case Family::gaussian: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.cov());
      return ThetaProfile::slc(1.0 / es.eigenvalues().maxCoeff());
    }
    case Family::gaussian_mixture: {
      const LipschitzBound lb = mixture_lipschitz_bound(m);
      return ThetaProfile::perturbed(lb.alpha, lb.L);
    }
    case Family::perturbed_slc: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.quad_matrix());
      return ThetaProfile::perturbed(es.eigenvalues().minCoeff(),
                                     m.lipschitz_L());
    }
  }
  throw UnsupportedError("auto_profile: unknown family");
}

// --------------------------------------------------------------------------
// config -> ExperimentConfig
// --------------------------------------------------------------------------

namespace detail {

inline Eigen::MatrixXd parse_sym_matrix(const ConfigMap& cm,
                                        const std::string& sec,
                                        const std::string& key,
                                        Eigen::Index d) {
  if (!cm.has(sec, key)) return Eigen::MatrixXd::Identity(d, d);
  if (trim(cm.get_string(sec, key)) == "identity")
    return Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd m = cm.get_matrix(sec, key);
  if (m.rows() == 1 && m.cols() == 1 && d > 1)
    return m(0, 0) * Eigen::MatrixXd::Identity(d, d);
  if (m.rows() != d || m.cols() != d)
    throw ConfigError("[" + sec + "] " + key + ": expected a " +
                      std::to_string(d) + "x" + std::to_string(d) +
                      " matrix, a scalar, or 'identity'");
  return m;
}

inline TargetMeasure parse_measure(const ConfigMap& cm,
                                   const std::string& sec) {
  const Family fam = family_from_name(cm.get_string(sec, "family"));
  switch (fam) {
    case Family::gaussian: {
      const Eigen::VectorXd mean = cm.get_vector(sec, "mean");
      return TargetMeasure::gaussian(
          mean, parse_sym_matrix(cm, sec, "cov", mean.size()));
    }
    case Family::gaussian_mixture: {
      const Eigen::MatrixXd means = cm.get_matrix(sec, "means");
      const Eigen::VectorXd weights = cm.get_vector(sec, "weights");
      return TargetMeasure::mixture(
          means, weights, parse_sym_matrix(cm, sec, "cov", means.rows()));
    }
    case Family::perturbed_slc: {
      const Eigen::MatrixXd tilt_means = cm.get_matrix(sec, "tilt_means");
      const Eigen::VectorXd tilt_weights = cm.get_vector(sec, "tilt_weights");
      return TargetMeasure::perturbed_tilt(
          parse_sym_matrix(cm, sec, "quad", tilt_means.rows()), tilt_means,
          tilt_weights);
    }
  }
  throw ConfigError("[" + sec + "]: unknown family");
}

inline std::optional<ThetaProfile> parse_profile(const ConfigMap& cm) {
  if (!cm.has_section("profile")) return std::nullopt;
  const std::string kind = cm.get_string("profile", "kind");
  if (kind == "auto") return std::nullopt;
  if (kind == "slc")
    return ThetaProfile::slc(cm.get_double("profile", "alpha"));
  if (kind == "perturbed")
    return ThetaProfile::perturbed(cm.get_double("profile", "alpha"),
                                   cm.get_double("profile", "L"));
  if (kind == "convexity_profile")
    return ThetaProfile::convexity_profile(cm.get_double("profile", "alpha"),
                                           cm.get_double("profile", "ghat0"));
  throw ConfigError(
      "[profile] kind: expected auto, slc, perturbed, or convexity_profile");
}

inline FlowConfig parse_flow(const ConfigMap& cm) {
  FlowConfig f;
  f.T = cm.get_double_or("flow", "T", f.T);
  f.steps = cm.get_int_or("flow", "steps", f.steps);
  if (cm.has("flow", "scheme"))
    f.scheme = scheme_from_name(cm.get_string("flow", "scheme"));
  if (cm.has("flow", "schedule"))
    f.schedule = schedule_from_name(cm.get_string("flow", "schedule"));
  if (cm.has("flow", "init"))
    f.init = init_from_name(cm.get_string("flow", "init"));
  f.threads = cm.get_int_or("flow", "threads", f.threads);
  return f;
}

inline std::vector<double> parse_times(const ConfigMap& cm,
                                       std::vector<double> fallback,
                                       bool strictly_positive) {
  std::vector<double> out;
  if (cm.has("run", "times")) {
    const Eigen::VectorXd v = cm.get_vector("run", "times");
    out.assign(v.data(), v.data() + v.size());
  } else {
    out = std::move(fallback);
  }
  double prev = -kInf;
  for (double t : out) {
    if (strictly_positive ? !(t > 0) : !(t >= 0))
      throw ConfigError("[run] times: entries must be " +
                        std::string(strictly_positive ? "> 0" : ">= 0"));
    if (!(t > prev))
      throw ConfigError("[run] times: entries must be strictly increasing");
    prev = t;
  }
  if (out.empty()) throw ConfigError("[run] times: empty grid");
  return out;
}

inline std::vector<double> parse_list(const ConfigMap& cm,
                                      const std::string& key,
                                      std::vector<double> fallback) {
  if (!cm.has("run", key)) return fallback;
  const Eigen::VectorXd v = cm.get_vector("run", key);
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace detail

inline ExperimentConfig parse_experiment(const ConfigMap& cm) {
  ExperimentConfig cfg;
  cfg.experiment = cm.get_string("", "experiment");
  const bool stability = cfg.experiment == "stability_l2" ||
                         cfg.experiment == "stability_linf";
  const bool decay = cfg.experiment == "fi_decay";
  const bool theta = cfg.experiment == "theta_check";
  const bool constants = cfg.experiment == "constants_table";
  if (!stability && !decay && !theta && !constants)
    throw ConfigError(
        "experiment: expected stability_l2, stability_linf, fi_decay, "
        "theta_check, or constants_table (got '" +
        cfg.experiment + "')");

  cfg.seed = cm.get_u64_or("run", "seed", cfg.seed);
  cfg.stream = cm.get_u64_or("run", "stream", cfg.stream);

  if (!constants) {
    cfg.mu = detail::parse_measure(cm, "target.mu");
    if (stability || decay) {
      cfg.nu = detail::parse_measure(cm, "target.nu");
      if (cfg.nu->dim() != cfg.mu->dim())
        throw ConfigError("target.mu and target.nu dimensions differ");
    }
    cfg.profile = detail::parse_profile(cm);
  }

  if (stability) {
    cfg.flow = detail::parse_flow(cm);
    cfg.n = cm.get_int_or("run", "n", cfg.n);
    cfg.fi_n = cm.get_int_or("run", "fi_n", cfg.fi_n);
    cfg.refine_steps = cm.get_int_or("run", "refine_steps", cfg.refine_steps);
    if (cfg.n < 2) throw ConfigError("[run] n: need at least 2 samples");
  } else if (decay) {
    cfg.n = cm.get_int_or("run", "n", cfg.n);
    cfg.times = detail::parse_times(
        cm, {0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0}, false);
    if (cfg.n < 2) throw ConfigError("[run] n: need at least 2 samples");
  } else if (theta) {
    cfg.probes = cm.get_int_or("run", "probes", cfg.probes);
    cfg.probe_radius = cm.get_double_or("run", "probe_radius", cfg.probe_radius);
    cfg.theta_tol = cm.get_double_or("run", "tol", cfg.theta_tol);
    cfg.times = detail::parse_times(
        cm, {0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 4.0, 8.0}, true);
    if (cfg.probes < 1) throw ConfigError("[run] probes: need at least 1");
  } else {
    cfg.T_grid = cm.get_double_or("run", "T", cfg.T_grid);
    cfg.lsi_s = cm.get_double_or("run", "lsi_s", cfg.lsi_s);
    cfg.gap_tol = cm.get_double_or("run", "gap_tol", cfg.gap_tol);
    cfg.alphas = detail::parse_list(cm, "alphas", cfg.alphas);
    cfg.Ls = detail::parse_list(cm, "Ls", cfg.Ls);
    cfg.lhat_L = detail::parse_list(cm, "lhat_L", cfg.lhat_L);
    cfg.lhat_R = detail::parse_list(cm, "lhat_R", cfg.lhat_R);
    cfg.lhat_alpha = cm.get_double_or("run", "lhat_alpha", cfg.lhat_alpha);
    if (cfg.lhat_L.size() != cfg.lhat_R.size())
      throw ConfigError("[run] lhat_L and lhat_R must pair up");
  }

  cm.require_consumed();
  return cfg;
}

// --------------------------------------------------------------------------
// experiment runners
// --------------------------------------------------------------------------

namespace detail {

inline Provenance provenance_for(const ExperimentConfig& cfg) {
  Provenance p;
  p.experiment = cfg.experiment;
  p.config_hash = cfg.config_hash;
  p.seed = cfg.seed;
  p.stream = cfg.stream;
  return p;
}

// Exact sup of the squared score difference when it is structurally
// bounded: equal-covariance Gaussian pairs have a constant difference;
// equal-covariance mixture pairs keep it inside the convex hulls of their
// component means. Unequal covariances make it grow linearly, so refuse.
inline std::pair<double, std::string> fi_sup_certified(
    const TargetMeasure& nu, const TargetMeasure& mu) {
  if (nu.family() == Family::perturbed_slc ||
      mu.family() == Family::perturbed_slc)
    throw UnsupportedError(
        "sup-FI bound: needs mixture or Gaussian targets whose score "
        "difference is certifiably bounded");
  if (!same_matrix(nu.cov(), mu.cov()))
    throw UnsupportedError(
        "sup-FI bound: covariances differ, so the score difference grows "
        "linearly and its essential sup is infinite; the L-infinity bound "
        "does not apply to this pair");
  if (nu.components() == 1 && mu.components() == 1) {
    const Eigen::VectorXd diff =
        nu.cov_inv() * (nu.means().col(0) - mu.means().col(0));
    return {diff.squaredNorm(), "constant_shift"};
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(nu.cov_inv());
  const double gamma_max = es.eigenvalues().maxCoeff();
  double diam = 0.0;
  for (int j = 0; j < nu.means().cols(); ++j)
    for (int k = 0; k < mu.means().cols(); ++k)
      diam = std::max(diam, (nu.means().col(j) - mu.means().col(k)).norm());
  const double s = gamma_max * diam;
  return {s * s, "hull_diameter"};
}

}  // namespace detail

inline StabilityReport run_stability(const ExperimentConfig& cfg) {
  const TargetMeasure& mu = *cfg.mu;
  const TargetMeasure& nu = *cfg.nu;
  const bool linf = cfg.experiment == "stability_linf";
  const SamplerSeed root{cfg.seed, cfg.stream};

  StabilityReport r;
  r.prov = detail::provenance_for(cfg);
  r.metric = linf ? "linf" : "l2";
  r.mu_family = family_name(mu.family());
  r.nu_family = family_name(nu.family());
  r.dim = mu.dim();
  r.T = cfg.flow.T;
  r.steps = cfg.flow.steps;
  r.scheme = scheme_name(cfg.flow.scheme);
  r.schedule = schedule_name(cfg.flow.schedule);
  r.init = init_name(cfg.flow.init);
  r.n = cfg.n;

  const ThetaProfile profile =
      cfg.profile ? *cfg.profile : auto_profile(mu);
  r.profile = profile_info(profile);
  r.constant = linf ? eta_inf(profile) : lambda_inf(profile);
  r.degenerate = detail::measures_identical(mu, nu);

  if (r.degenerate) {
    r.fi = 0.0;
    r.fi_se = 0.0;
    r.fi_method = "identical";
  } else if (linf) {
    const auto [sup, method] = detail::fi_sup_certified(nu, mu);
    r.fi = sup;
    r.fi_se = 0.0;
    r.fi_method = method;
    r.fi_inf_probe =
        fi_inf(nu, mu, cfg.fi_n, cfg.refine_steps, detail::substream(root, 3))
            .value;
  } else if (mu.family() == Family::gaussian &&
             nu.family() == Family::gaussian) {
    r.fi = fi_gaussian_closed(nu, mu);
    r.fi_se = 0.0;
    r.fi_method = "gaussian_closed";
  } else if (mu.dim() == 1 && mu.family() != Family::perturbed_slc &&
             nu.family() != Family::perturbed_slc) {
    QuadratureSpec q;
    q.rel_tol = 1e-9;
    r.fi = fi_quadrature_1d(nu, mu, q);
    r.fi_se = 0.0;
    r.fi_method = "quadrature";
  } else {
    const FiEstimate est = fi(nu, mu, cfg.fi_n, detail::substream(root, 2));
    r.fi = est.value;
    r.fi_se = est.se;
    r.fi_method = "monte_carlo";
  }
  r.bound = r.constant * std::sqrt(r.fi);

  const CoupledResult cd =
      coupled_distance(mu, nu, cfg.flow, cfg.n, detail::substream(root, 1));
  r.empirical_l2 = cd.l2;
  r.empirical_l2_se = cd.l2_se;
  r.empirical_linf = cd.linf;

  if (mu.family() == Family::gaussian && nu.family() == Family::gaussian)
    r.w2_reference = w2_gaussian(mu, nu);

  const double empirical = linf ? r.empirical_linf : r.empirical_l2;
  if (!r.degenerate && r.bound == 0.0 && empirical <= 1e-14)
    r.degenerate = true;  // representations differ, measure does not

  if (r.degenerate) {
    r.slack = std::numeric_limits<double>::quiet_NaN();
    r.pass = true;
    return r;
  }

  r.slack = empirical / r.bound;
  const double rel_emp =
      (!linf && empirical > 0) ? r.empirical_l2_se / empirical : 0.0;
  const double rel_fi = (r.fi_se > 0 && r.fi > 0) ? 0.5 * r.fi_se / r.fi : 0.0;
  const double rel = std::sqrt(rel_emp * rel_emp + rel_fi * rel_fi);
  r.pass =
      empirical <= r.bound * (1.0 + 3.0 * rel) * (1.0 + detail::kFpGuard);
  return r;
}

inline DecayReport run_decay(const ExperimentConfig& cfg) {
  const TargetMeasure& mu = *cfg.mu;
  const TargetMeasure& nu = *cfg.nu;
  const ThetaProfile profile = cfg.profile ? *cfg.profile : auto_profile(mu);
  const SamplerSeed root{cfg.seed, cfg.stream};

  DecayReport r;
  r.prov = detail::provenance_for(cfg);
  r.mu_family = family_name(mu.family());
  r.nu_family = family_name(nu.family());
  r.dim = mu.dim();
  r.n = cfg.n;
  r.profile = profile_info(profile);

  const DecayCurve curve = fi_decay_curve(nu, mu, profile, cfg.times, cfg.n, root);
  r.times = curve.times;
  r.fi = curve.fi;
  r.se = curve.se;
  r.envelope = curve.envelope;
  r.base_fi = curve.base_fi;
  r.base_se = curve.base_se;

  r.envelope_ok = true;
  r.monotone_ok = true;
  for (std::size_t j = 0; j < r.times.size(); ++j) {
    if (r.fi[j] > r.envelope[j] * (1.0 + detail::kFpGuard) + 3.0 * r.se[j])
      r.envelope_ok = false;
    if (j &&
        r.fi[j] > r.fi[j - 1] * (1.0 + detail::kFpGuard) +
                      3.0 * (r.se[j] + r.se[j - 1]))
      r.monotone_ok = false;
  }
  r.pass = r.envelope_ok && r.monotone_ok;
  return r;
}

inline ThetaReport run_theta_check(const ExperimentConfig& cfg) {
  const TargetMeasure& mu = *cfg.mu;
  const ThetaProfile profile = cfg.profile ? *cfg.profile : auto_profile(mu);
  const SamplerSeed root{cfg.seed, cfg.stream};

  ThetaReport r;
  r.prov = detail::provenance_for(cfg);
  r.family = family_name(mu.family());
  r.dim = mu.dim();
  r.components = mu.components();
  r.profile = profile_info(profile);
  r.probes = cfg.probes;
  r.probe_radius = cfg.probe_radius;
  r.tol = cfg.theta_tol;
  r.times = cfg.times;

  const Eigen::MatrixXd probes = detail::ball_probes(
      cfg.probes, mu.dim(), cfg.probe_radius, detail::substream(root, 1));
  r.worst = -kInf;
  r.violation.reserve(r.times.size());
  for (double t : r.times) {
    const double v = theta_empirical_check(mu, profile, t, probes);
    r.violation.push_back(v);
    r.worst = std::max(r.worst, v);
  }
  r.pass = r.worst <= r.tol;
  return r;
}

inline ConstantsReport run_constants(const ExperimentConfig& cfg) {
  ConstantsReport r;
  r.prov = detail::provenance_for(cfg);
  r.T = cfg.T_grid;
  r.lsi_s = cfg.lsi_s;
  r.gap_tol = cfg.gap_tol;
  r.max_rel_gap = 0.0;
  r.eta_matches = true;

  for (double a : cfg.alphas) {
    for (double L : cfg.Ls) {
      const ThetaProfile p =
          L == 0.0 ? ThetaProfile::slc(a) : ThetaProfile::perturbed(a, L);
      ConstantsRow row;
      row.kind = profile_info(p).kind;
      row.alpha = a;
      row.L = L;
      row.ghat0 = 0.0;
      row.lambda_inf = lambda_inf(p);
      row.eta_inf = eta_inf(p);
      row.lambda_T = lambda_T(p, cfg.T_grid);
      row.lambda_T_exact = lambda_T_exact(p, cfg.T_grid);
      row.rel_gap = std::abs(row.lambda_T - row.lambda_inf) / row.lambda_inf;
      row.lsi = lsi_constant(p, cfg.lsi_s);
      r.max_rel_gap = std::max(r.max_rel_gap, row.rel_gap);
      if (std::abs(row.eta_inf - row.lambda_inf) >
          1e-14 * std::max(1.0, row.lambda_inf))
        r.eta_matches = false;
      r.rows.push_back(row);
    }
  }

  for (std::size_t i = 0; i < cfg.lhat_L.size(); ++i) {
    const double L_V = cfg.lhat_L[i];
    const double R_V = cfg.lhat_R[i];
    const ProfileParams pp = ProfileParams::derive(cfg.lhat_alpha, L_V, R_V);
    LhatRow row;
    row.L_V = L_V;
    row.R_V = R_V;
    row.alpha_V = cfg.lhat_alpha;
    row.lhat_value = pp.lhat_value;
    row.ratio_small =
        L_V > 0 ? pp.lhat_value / (L_V / 2.0)
                : std::numeric_limits<double>::quiet_NaN();
    row.ratio_large =
        L_V > 0 && R_V > 0
            ? pp.lhat_value / (L_V * L_V * R_V * R_V / 4.0)
            : std::numeric_limits<double>::quiet_NaN();
    row.lambda_inf = lambda_inf(pp.to_theta_profile());
    r.lhat_rows.push_back(row);
  }

  r.pass = r.max_rel_gap <= r.gap_tol && r.eta_matches;
  return r;
}

// Runs the configured experiment, writes its report pair unless out_dir is
// empty, and reports the verdict.
inline bool run_experiment(const ExperimentConfig& cfg,
                           const std::string& out_dir) {
  if (cfg.experiment == "stability_l2" || cfg.experiment == "stability_linf") {
    const StabilityReport r = run_stability(cfg);
    if (!out_dir.empty()) write_report_files(r, out_dir);
    return r.pass;
  }
  if (cfg.experiment == "fi_decay") {
    const DecayReport r = run_decay(cfg);
    if (!out_dir.empty()) write_report_files(r, out_dir);
    return r.pass;
  }
  if (cfg.experiment == "theta_check") {
    const ThetaReport r = run_theta_check(cfg);
    if (!out_dir.empty()) write_report_files(r, out_dir);
    return r.pass;
  }
  if (cfg.experiment == "constants_table") {
    const ConstantsReport r = run_constants(cfg);
    if (!out_dir.empty()) write_report_files(r, out_dir);
    return r.pass;
  }
  throw ConfigError("unknown experiment '" + cfg.experiment + "'");
}

// --------------------------------------------------------------------------
// built-in presets (mirrored as files under configs/)
// --------------------------------------------------------------------------

inline const std::map<std::string, std::string>& presets() {
  static const std::map<std::string, std::string> table = {
      {"l2_tight_d1", R"(# standard normal vs unit shift, the saturated case
experiment = stability_l2

[target.mu]
family = gaussian
mean = 0

[target.nu]
family = gaussian
mean = 1

[flow]
T = 10
steps = 400
scheme = rk4
schedule = uniform_t
init = shared_gamma

[run]
n = 10000
seed = 17
)"},
      {"l2_tight_d3", R"(# unit shift in three dimensions
experiment = stability_l2

[target.mu]
family = gaussian
mean = 0, 0, 0

[target.nu]
family = gaussian
mean = 0.6, 0, 0.8

[flow]
T = 10
steps = 400
scheme = rk4
schedule = uniform_t
init = shared_gamma

[run]
n = 10000
seed = 17
)"},
      {"l2_scale", R"(# variance mismatch: strict-inequality regime
experiment = stability_l2

[target.mu]
family = gaussian
mean = 0

[target.nu]
family = gaussian
mean = 0
cov = 4

[flow]
T = 10
steps = 100
scheme = rk4
schedule = uniform_t
init = shared_gamma

[run]
n = 100000
seed = 23
)"},
      {"l2_mixture_pair", R"(# nearby two-component mixtures
experiment = stability_l2

[target.mu]
family = mixture
means = -0.5, 0.5
weights = 0.5, 0.5

[target.nu]
family = mixture
means = -0.6, 0.6
weights = 0.5, 0.5

[flow]
T = 10
steps = 400
scheme = rk4
schedule = uniform_t
init = shared_gamma

[run]
n = 10000
seed = 29
)"},
      {"linf_shift", R"(# sup-norm flavor of the unit shift
experiment = stability_linf

[target.mu]
family = gaussian
mean = 0, 0, 0

[target.nu]
family = gaussian
mean = 0.6, 0, 0.8

[flow]
T = 10
steps = 400
scheme = rk4
schedule = uniform_t
init = shared_gamma

[run]
n = 2000
seed = 31
fi_n = 20000
refine_steps = 8
)"},
      {"fi_decay_shift", R"(# Fisher information decay along the noising path
experiment = fi_decay

[target.mu]
family = gaussian
mean = 0

[target.nu]
family = gaussian
mean = 1

[run]
n = 5000
seed = 37
times = 0, 0.25, 0.5, 0.75, 1, 1.5, 2, 3, 4, 6
)"},
      {"theta_mixtures", R"(# curvature certificate on a 2-d three-component mixture
experiment = theta_check

[target.mu]
family = mixture
means = 0.8, -0.6, 0.1; -0.3, 0.5, -0.9
weights = 0.5, 0.3, 0.2
cov = 1.2, -0.3; -0.3, 0.9

[run]
probes = 200
probe_radius = 4
tol = 1e-8
seed = 41
times = 0.1, 0.25, 0.5, 1, 1.5, 2, 4, 8
)"},
      {"theta_mixtures_smoke", R"(# quick curvature check used by the CLI smoke test
experiment = theta_check

[target.mu]
family = mixture
means = -0.5, 0.5
weights = 0.5, 0.5

[run]
probes = 25
probe_radius = 4
tol = 1e-8
seed = 7
times = 0.25, 1, 4
)"},
      {"constants_grid", R"(# bound constants across the (alpha, L) grid
experiment = constants_table

[run]
alphas = 0.5, 1, 2
Ls = 0, 0.3, 1
T = 20
lsi_s = 1
gap_tol = 1e-5
lhat_L = 0.1, 10
lhat_R = 0.1, 10
lhat_alpha = 1
)"},
  };
  return table;
}

inline const std::string& preset_text(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end()) {
    std::string known;
    for (const auto& [k, v] : presets()) known += (known.empty() ? "" : ", ") + k;
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
  }
  return it->second;
}

}  // namespace kimflow
