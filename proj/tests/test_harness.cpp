#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "kimflow/harness.hpp"
#include "oracles.hpp"

using kimflow::ConfigMap;
using kimflow::ExperimentConfig;
using kimflow::TargetMeasure;
using kimflow::parse_experiment;

namespace {

ExperimentConfig from_ini(const std::string& text) {
  return parse_experiment(ConfigMap::from_ini_text(text));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path fresh_dir(const std::string& tag) {
  const std::filesystem::path p =
      std::filesystem::temp_directory_path() / ("kimflow_test_" + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

const std::string kShiftStability =
    "experiment = stability_l2\n"
    "[target.mu]\n"
    "family = gaussian\n"
    "mean = 0\n"
    "[target.nu]\n"
    "family = gaussian\n"
    "mean = 1\n"
    "[flow]\n"
    "steps = 100\n"
    "[run]\n"
    "seed = 5\n"
    "n = 200\n";

}  // namespace

TEST_CASE("ini parsing handles sections, comments, and matrices") {
  const ConfigMap cm = ConfigMap::from_ini_text(
      "# top comment\n"
      "experiment = theta_check\n"
      "[target.mu]\n"
      "family = mixture\n"
      "means = -1, 1; 0.5, -0.5\n"
      "weights = 0.4, 0.6\n"
      "cov = 1.2, -0.3; -0.3, 0.9\n"
      "\n"
      "[run]   # trailing comment\n"
      "probes = 25\n"
      "tol = 1e-8\n");
  CHECK(cm.get_string("", "experiment") == "theta_check");
  const Eigen::MatrixXd means = cm.get_matrix("target.mu", "means");
  REQUIRE(means.rows() == 2);
  REQUIRE(means.cols() == 2);
  CHECK(means(0, 0) == -1.0);
  CHECK(means(1, 1) == -0.5);
  CHECK(cm.get_vector("target.mu", "weights").size() == 2);
  CHECK(cm.get_int("run", "probes") == 25);
  CHECK(cm.get_double("run", "tol") == 1e-8);
  CHECK(cm.has_section("target.mu"));
  CHECK_FALSE(cm.has_section("target.nu"));
}

TEST_CASE("ini errors carry line numbers") {
  try {
    ConfigMap::from_ini_text("experiment = x\n[run]\nbroken line\n");
    FAIL("expected a parse error");
  } catch (const kimflow::ConfigError& e) {
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }
  try {
    ConfigMap::from_ini_text("[run]\nseed = 1\nseed = 2\n");
    FAIL("expected a duplicate-key error");
  } catch (const kimflow::ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("seed") != std::string::npos);
    CHECK(msg.find("lines 2 and 3") != std::string::npos);
  }
}

TEST_CASE("typed accessors validate their conversions") {
  const ConfigMap cm = ConfigMap::from_ini_text(
      "[a]\n"
      "num = 1.5\n"
      "flag = true\n"
      "text = hello\n"
      "ragged = 1, 2; 3\n"
      "big = 12345678901\n");
  CHECK(cm.get_double("a", "num") == 1.5);
  CHECK(cm.get_bool_or("a", "flag", false));
  CHECK(cm.get_bool_or("a", "missing", true));
  CHECK(cm.get_string_or("a", "missing", "dflt") == "dflt");
  CHECK(cm.get_double_or("a", "missing", 2.5) == 2.5);
  CHECK_THROWS_AS(cm.get_double("a", "text"), kimflow::ConfigError);
  CHECK_THROWS_AS(cm.get_int("a", "num"), kimflow::ConfigError);
  CHECK_THROWS_AS(cm.get_int("a", "big"), kimflow::ConfigError);
  CHECK(cm.get_u64("a", "big") == 12345678901ull);
  CHECK_THROWS_AS(cm.get_matrix("a", "ragged"), kimflow::ConfigError);
  CHECK_THROWS_AS(cm.get_string("a", "nope"), kimflow::ConfigError);
  CHECK_THROWS_AS(cm.get_string("b", "num"), kimflow::ConfigError);
}

TEST_CASE("unconsumed keys are reported as likely typos") {
  const ConfigMap cm = ConfigMap::from_ini_text(
      "experiment = constants_table\n[run]\nseeed = 3\n");
  try {
    parse_experiment(cm);
    FAIL("expected an unused-key error");
  } catch (const kimflow::ConfigError& e) {
    CHECK(std::string(e.what()).find("seeed") != std::string::npos);
  }
}

TEST_CASE("json configs parse to the same experiment") {
  const ExperimentConfig a = from_ini(
      "experiment = stability_l2\n"
      "[target.mu]\n"
      "family = gaussian\n"
      "mean = 0, 0\n"
      "cov = identity\n"
      "[target.nu]\n"
      "family = mixture\n"
      "means = -0.5, 0.5; 0, 0\n"
      "weights = 0.5, 0.5\n"
      "[flow]\n"
      "T = 8\n"
      "steps = 50\n"
      "scheme = heun\n"
      "init = exact_qT\n"
      "[run]\n"
      "seed = 11\n"
      "n = 64\n");
  const ExperimentConfig b = parse_experiment(ConfigMap::from_json_text(R"({
    "experiment": "stability_l2",
    "target.mu": {"family": "gaussian", "mean": [0, 0], "cov": "identity"},
    "target.nu": {
      "family": "mixture",
      "means": [[-0.5, 0.5], [0, 0]],
      "weights": [0.5, 0.5]
    },
    "flow": {"T": 8, "steps": 50, "scheme": "heun", "init": "exact_qT"},
    "run": {"seed": 11, "n": 64}
  })"));
  CHECK(a.experiment == b.experiment);
  CHECK(a.seed == b.seed);
  CHECK(a.n == b.n);
  CHECK(a.flow.T == b.flow.T);
  CHECK(a.flow.steps == b.flow.steps);
  CHECK(a.flow.scheme == b.flow.scheme);
  CHECK(a.flow.init == b.flow.init);
  CHECK(kimflow::detail::same_matrix(a.mu->means(), b.mu->means()));
  CHECK(kimflow::detail::same_matrix(a.nu->means(), b.nu->means()));
  CHECK(kimflow::detail::same_matrix(a.nu->cov(), b.nu->cov()));
}

TEST_CASE("embedded presets mirror the shipped config files") {
  namespace fs = std::filesystem;
  const fs::path root = fs::path(KIMFLOW_SOURCE_DIR) / "configs";
  std::size_t seen = 0;
  for (const auto& [name, text] : kimflow::presets()) {
    const fs::path file = root / (name + ".ini");
    REQUIRE(fs::exists(file));
    CHECK(slurp(file) == text);
    ++seen;
    // Every preset must also parse cleanly.
    CHECK(parse_experiment(ConfigMap::from_ini_text(text)).experiment !=
          "");
  }
  CHECK(seen == 9);
  CHECK_THROWS_AS(kimflow::preset_text("nope"), kimflow::ConfigError);
}

TEST_CASE("experiment tags and grids are validated") {
  CHECK_THROWS_AS(from_ini("experiment = what\n"), kimflow::ConfigError);
  CHECK_THROWS_AS(
      from_ini("experiment = stability_l2\n"
               "[target.mu]\nfamily = gaussian\nmean = 0\n"
               "[target.nu]\nfamily = gaussian\nmean = 0, 0\n"),
      kimflow::ConfigError);
  // Theta grids must be strictly positive and increasing.
  CHECK_THROWS_AS(
      from_ini("experiment = theta_check\n"
               "[target.mu]\nfamily = gaussian\nmean = 0\n"
               "[run]\ntimes = 0, 1\n"),
      kimflow::ConfigError);
  CHECK_THROWS_AS(
      from_ini("experiment = fi_decay\n"
               "[target.mu]\nfamily = gaussian\nmean = 0\n"
               "[target.nu]\nfamily = gaussian\nmean = 1\n"
               "[run]\ntimes = 1, 1\n"),
      kimflow::ConfigError);
  const ExperimentConfig decay = from_ini(
      "experiment = fi_decay\n"
      "[target.mu]\nfamily = gaussian\nmean = 0\n"
      "[target.nu]\nfamily = gaussian\nmean = 1\n");
  CHECK(decay.times.size() == 10);
  CHECK(decay.times.front() == 0.0);
  const ExperimentConfig theta = from_ini(
      "experiment = theta_check\n"
      "[target.mu]\nfamily = gaussian\nmean = 0\n");
  CHECK(theta.times.size() == 8);
  CHECK(theta.times.front() > 0.0);
}

TEST_CASE("scalar covariance shorthand expands to a scaled identity") {
  const ExperimentConfig cfg = from_ini(
      "experiment = theta_check\n"
      "[target.mu]\n"
      "family = gaussian\n"
      "mean = 0, 0, 0\n"
      "cov = 4\n");
  CHECK(kimflow::detail::same_matrix(
      cfg.mu->cov(), 4.0 * Eigen::MatrixXd::Identity(3, 3)));
}

TEST_CASE("profile selection covers every family") {
  using kimflow::ThetaProfile;
  Eigen::MatrixXd cov(2, 2);
  cov << 4.0, 0.0,
         0.0, 2.0;
  const ThetaProfile pg = kimflow::auto_profile(
      TargetMeasure::gaussian(Eigen::VectorXd::Zero(2), cov));
  CHECK(pg.kind == ThetaProfile::Kind::slc);
  CHECK(pg.alpha == Catch::Approx(0.25).epsilon(1e-12));

  Eigen::MatrixXd means(1, 2);
  means << -2.0, 2.0;
  Eigen::VectorXd w(2);
  w << 0.5, 0.5;
  const ThetaProfile pm = kimflow::auto_profile(TargetMeasure::mixture(
      means, w, Eigen::MatrixXd::Identity(1, 1)));
  CHECK(pm.kind == ThetaProfile::Kind::perturbed);
  CHECK(pm.alpha == 1.0);
  CHECK(pm.L == 2.0);

  Eigen::MatrixXd tm(1, 1);
  tm << 1.5;
  const ThetaProfile pp = kimflow::auto_profile(TargetMeasure::perturbed_tilt(
      2.0 * Eigen::MatrixXd::Identity(1, 1), tm, Eigen::VectorXd::Ones(1)));
  CHECK(pp.kind == ThetaProfile::Kind::perturbed);
  CHECK(pp.alpha == 2.0);
  CHECK(pp.L == 3.0);
}

TEST_CASE("probe clouds stay inside their ball and reseed exactly") {
  const Eigen::MatrixXd a = kimflow::detail::ball_probes(200, 3, 4.0, {7, 7});
  const Eigen::MatrixXd b = kimflow::detail::ball_probes(200, 3, 4.0, {7, 7});
  CHECK(a == b);
  for (int i = 0; i < a.rows(); ++i) CHECK(a.row(i).norm() <= 4.0);
  // Not degenerate: points spread over the ball, not its surface.
  double min_norm = 1e9;
  for (int i = 0; i < a.rows(); ++i)
    min_norm = std::min(min_norm, a.row(i).norm());
  CHECK(min_norm < 2.0);
}

TEST_CASE("identical targets degenerate gracefully") {
  const ExperimentConfig cfg = from_ini(
      "experiment = stability_l2\n"
      "[target.mu]\nfamily = gaussian\nmean = 0.5\n"
      "[target.nu]\nfamily = gaussian\nmean = 0.5\n"
      "[flow]\nsteps = 40\n"
      "[run]\nn = 50\n");
  const kimflow::StabilityReport r = kimflow::run_stability(cfg);
  CHECK(r.degenerate);
  CHECK(r.pass);
  CHECK(std::isnan(r.slack));
  CHECK(r.fi_method == "identical");
  CHECK(r.empirical_l2 == 0.0);
  CHECK(r.empirical_linf == 0.0);
}

TEST_CASE("shift stability run wires the closed-form pieces together") {
  const kimflow::StabilityReport r =
      kimflow::run_stability(from_ini(kShiftStability));
  CHECK(r.metric == "l2");
  CHECK(r.fi_method == "gaussian_closed");
  CHECK(r.fi == 1.0);
  CHECK(r.constant == 1.0);
  CHECK(r.bound == 1.0);
  CHECK(r.w2_reference == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(r.slack == Catch::Approx(1.0 - std::exp(-10.0)).epsilon(1e-6));
  CHECK(r.pass);
  CHECK(r.profile.kind == "slc");
  CHECK(r.profile.alpha == 1.0);
}

TEST_CASE("one-dimensional mixture pairs take the quadrature route") {
  const kimflow::StabilityReport r = kimflow::run_stability(from_ini(
      "experiment = stability_l2\n"
      "[target.mu]\n"
      "family = mixture\nmeans = -0.5, 0.5\nweights = 0.5, 0.5\n"
      "[target.nu]\n"
      "family = mixture\nmeans = -0.6, 0.6\nweights = 0.5, 0.5\n"
      "[flow]\nsteps = 100\n"
      "[run]\nseed = 3\nn = 500\n"));
  CHECK(r.fi_method == "quadrature");
  CHECK(r.fi_se == 0.0);
  CHECK(r.fi > 0.0);
  CHECK(r.pass);
  CHECK(r.slack < 1.0);
}

TEST_CASE("sup-norm runs certify or refuse") {
  const kimflow::StabilityReport shift = kimflow::run_stability(from_ini(
      "experiment = stability_linf\n"
      "[target.mu]\nfamily = gaussian\nmean = 0, 0\n"
      "[target.nu]\nfamily = gaussian\nmean = 0.6, -0.8\n"
      "[flow]\nsteps = 100\n"
      "[run]\nseed = 9\nn = 100\nfi_n = 2000\nrefine_steps = 4\n"));
  CHECK(shift.metric == "linf");
  CHECK(shift.fi_method == "constant_shift");
  CHECK(shift.fi == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(shift.fi_inf_probe ==
        Catch::Approx(1.0).epsilon(1e-9));  // every draw hits the constant
  CHECK(shift.pass);

  const kimflow::StabilityReport mix = kimflow::run_stability(from_ini(
      "experiment = stability_linf\n"
      "[target.mu]\n"
      "family = mixture\nmeans = -1, 1\nweights = 0.5, 0.5\n"
      "[target.nu]\n"
      "family = mixture\nmeans = -1.2, 1.2\nweights = 0.5, 0.5\n"
      "[flow]\nsteps = 80\n"
      "[run]\nseed = 9\nn = 100\nfi_n = 2000\nrefine_steps = 4\n"));
  CHECK(mix.fi_method == "hull_diameter");
  CHECK(mix.fi == Catch::Approx(2.2 * 2.2).epsilon(1e-12));
  CHECK(mix.fi_inf_probe <= mix.fi * (1.0 + 1e-9));
  CHECK(mix.pass);

  CHECK_THROWS_AS(kimflow::run_stability(from_ini(
                      "experiment = stability_linf\n"
                      "[target.mu]\nfamily = gaussian\nmean = 0\n"
                      "[target.nu]\nfamily = gaussian\nmean = 0\ncov = 4\n"
                      "[run]\nn = 50\n")),
                  kimflow::UnsupportedError);
}

TEST_CASE("empirical transport distance dominates the gaussian optimum") {
  // The terminal-law coupling realizes a coupling of (mu, nu), so its L2
  // cost can only sit above the exact gaussian transport distance.
  const char* pairs[] = {
      "[target.mu]\nfamily = gaussian\nmean = 0, 0\n"
      "[target.nu]\nfamily = gaussian\nmean = 0.6, -0.8\n",
      "[target.mu]\nfamily = gaussian\nmean = 0\n"
      "[target.nu]\nfamily = gaussian\nmean = 0\ncov = 4\n",
      "[target.mu]\nfamily = gaussian\nmean = 0.3, -0.2\ncov = 1.5, 0.2; 0.2, 0.7\n"
      "[target.nu]\nfamily = gaussian\nmean = -0.4, 0.5\ncov = 0.9, -0.1; -0.1, 1.3\n"};
  for (const char* pair : pairs) {
    const kimflow::StabilityReport r = kimflow::run_stability(from_ini(
        std::string("experiment = stability_l2\n") + pair +
        "[flow]\nsteps = 150\ninit = exact_qT\n"
        "[run]\nseed = 41\nn = 4000\n"));
    REQUIRE(std::isfinite(r.w2_reference));
    CHECK(r.empirical_l2 >=
          r.w2_reference - 3.0 * r.empirical_l2_se - 1e-9);
  }
}

TEST_CASE("decay run flags the exact exponential as within its envelope") {
  const kimflow::DecayReport r = kimflow::run_decay(from_ini(
      "experiment = fi_decay\n"
      "[target.mu]\nfamily = gaussian\nmean = 0\n"
      "[target.nu]\nfamily = gaussian\nmean = 1\n"
      "[run]\nseed = 13\nn = 400\ntimes = 0, 0.5, 1, 2\n"));
  REQUIRE(r.times.size() == 4);
  CHECK(r.envelope_ok);
  CHECK(r.monotone_ok);
  CHECK(r.pass);
  CHECK(r.base_fi == Catch::Approx(1.0).margin(1e-12));
  for (std::size_t j = 0; j < r.times.size(); ++j)
    CHECK(r.fi[j] == Catch::Approx(std::exp(-2.0 * r.times[j])).margin(1e-9));
}

TEST_CASE("curvature run is exact on the fixed point") {
  const kimflow::ThetaReport r = kimflow::run_theta_check(from_ini(
      "experiment = theta_check\n"
      "[target.mu]\nfamily = gaussian\nmean = 0, 0\n"
      "[profile]\nkind = slc\nalpha = 1\n"
      "[run]\nseed = 21\nprobes = 40\n"));
  REQUIRE(r.times.size() == 8);
  CHECK(r.worst == 0.0);
  for (double v : r.violation) CHECK(v == 0.0);
  CHECK(r.pass);
}

TEST_CASE("curvature run certifies a mixture profile within tolerance") {
  const kimflow::ThetaReport r = kimflow::run_theta_check(from_ini(
      "experiment = theta_check\n"
      "[target.mu]\n"
      "family = mixture\nmeans = -0.8, 0.6\nweights = 0.5, 0.5\n"
      "[run]\nseed = 22\nprobes = 100\n"));
  CHECK(r.worst <= r.tol);
  CHECK(r.pass);
}

TEST_CASE("constants run reproduces the closed-form grid") {
  const kimflow::ConstantsReport r = kimflow::run_constants(from_ini(
      "experiment = constants_table\n"
      "[run]\nalphas = 0.5, 1, 2\nLs = 0, 0.3\n"));
  REQUIRE(r.rows.size() == 6);
  REQUIRE(r.lhat_rows.size() == 2);
  CHECK(r.pass);
  CHECK(r.eta_matches);
  CHECK(r.max_rel_gap <= r.gap_tol);
  for (const kimflow::ConstantsRow& row : r.rows) {
    if (row.L == 0.0) {
      CHECK(row.kind == "slc");
      CHECK(row.lambda_inf == Catch::Approx(1.0 / row.alpha).epsilon(1e-14));
    } else {
      CHECK(row.kind == "perturbed");
    }
    CHECK(row.eta_inf == row.lambda_inf);
    CHECK(row.lambda_T_exact <= row.lambda_T * (1.0 + 1e-9));
  }
  CHECK(r.lhat_rows[0].ratio_small == Catch::Approx(1.0).margin(0.05));
  CHECK(r.lhat_rows[1].ratio_large == Catch::Approx(1.0).margin(0.15));
}

TEST_CASE("stability reports round-trip through json exactly") {
  kimflow::StabilityReport r = kimflow::run_stability(from_ini(kShiftStability));
  const nlohmann::json j = kimflow::to_json(r);
  const std::string once = kimflow::json_text(j);
  const nlohmann::json back =
      kimflow::to_json(kimflow::stability_from_json(nlohmann::json::parse(once)));
  CHECK(kimflow::json_text(back) == once);
  // Non-finite fields serialize as null and come back as NaN.
  r.slack = std::numeric_limits<double>::quiet_NaN();
  const nlohmann::json jn = kimflow::to_json(r);
  CHECK(jn["verdict"]["slack"].is_null());
  CHECK(std::isnan(kimflow::stability_from_json(jn).slack));
  CHECK(kimflow::json_text(kimflow::to_json(
            kimflow::stability_from_json(jn))) == kimflow::json_text(jn));
}

TEST_CASE("decay, theta, and constants reports round-trip through json") {
  const kimflow::DecayReport d = kimflow::run_decay(from_ini(
      "experiment = fi_decay\n"
      "[target.mu]\nfamily = gaussian\nmean = 0\n"
      "[target.nu]\nfamily = gaussian\nmean = 1\n"
      "[run]\nseed = 13\nn = 100\ntimes = 0, 1\n"));
  const std::string dj = kimflow::json_text(kimflow::to_json(d));
  CHECK(kimflow::json_text(kimflow::to_json(
            kimflow::decay_from_json(nlohmann::json::parse(dj)))) == dj);

  const kimflow::ThetaReport t = kimflow::run_theta_check(from_ini(
      "experiment = theta_check\n"
      "[target.mu]\nfamily = gaussian\nmean = 0\n"
      "[run]\nseed = 2\nprobes = 10\ntimes = 0.5, 1\n"));
  const std::string tj = kimflow::json_text(kimflow::to_json(t));
  CHECK(kimflow::json_text(kimflow::to_json(
            kimflow::theta_from_json(nlohmann::json::parse(tj)))) == tj);

  const kimflow::ConstantsReport c = kimflow::run_constants(from_ini(
      "experiment = constants_table\n"
      "[run]\nalphas = 1\nLs = 0, 1\nlhat_L = 0.1\nlhat_R = 0.1\n"));
  const std::string cj = kimflow::json_text(kimflow::to_json(c));
  CHECK(kimflow::json_text(kimflow::to_json(
            kimflow::constants_from_json(nlohmann::json::parse(cj)))) == cj);
}

TEST_CASE("csv projections expose the headline numbers") {
  const kimflow::StabilityReport r =
      kimflow::run_stability(from_ini(kShiftStability));
  const std::string csv = kimflow::to_csv(r);
  CHECK(csv.find("quantity,estimate,se,bound") == 0);
  CHECK(csv.find("l2,") != std::string::npos);
  CHECK(csv.find("linf,") != std::string::npos);

  const kimflow::ConstantsReport c = kimflow::run_constants(from_ini(
      "experiment = constants_table\n"
      "[run]\nalphas = 1\nLs = 0\nlhat_L = 0.1\nlhat_R = 0.1\n"));
  CHECK(kimflow::to_csv(c).find(
            "kind,alpha,L,ghat0,lambda_inf,eta_inf,lambda_T") == 0);
  CHECK(kimflow::lhat_csv(c).find("L_V,R_V,alpha_V,lhat") == 0);
}

TEST_CASE("experiment files are byte-identical across reruns") {
  const std::string text =
      "experiment = stability_l2\n"
      "[target.mu]\n"
      "family = mixture\nmeans = -0.5, 0.5\nweights = 0.5, 0.5\n"
      "[target.nu]\n"
      "family = mixture\nmeans = -0.6, 0.6\nweights = 0.5, 0.5\n"
      "[flow]\nsteps = 60\n"
      "[run]\nseed = 29\nn = 300\n";
  ExperimentConfig cfg = from_ini(text);
  cfg.config_hash = kimflow::fnv1a64(text);
  const auto d1 = fresh_dir("rerun_a");
  const auto d2 = fresh_dir("rerun_b");
  CHECK(kimflow::run_experiment(cfg, d1.string()));
  CHECK(kimflow::run_experiment(cfg, d2.string()));
  for (const char* f : {"stability_l2.json", "stability_l2.csv"}) {
    CHECK(slurp(d1 / f) == slurp(d2 / f));
    CHECK(slurp(d1 / f).size() > 0);
  }
  // A different seed must actually change the sampled numbers.
  ExperimentConfig other = cfg;
  other.seed = 31;
  const auto d3 = fresh_dir("rerun_c");
  CHECK(kimflow::run_experiment(other, d3.string()));
  CHECK(slurp(d1 / "stability_l2.json") != slurp(d3 / "stability_l2.json"));
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
  std::filesystem::remove_all(d3);
}

TEST_CASE("hash function matches the reference vectors") {
  CHECK(kimflow::fnv1a64("") == 14695981039346656037ull);
  CHECK(kimflow::fnv1a64("a") == 12638187200555641996ull);
  CHECK(kimflow::fnv1a64("hello") != kimflow::fnv1a64("hellp"));
}
