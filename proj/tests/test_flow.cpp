#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "kimflow/flow.hpp"
#include "oracles.hpp"

using kimflow::FlowConfig;
using kimflow::InitMode;
using kimflow::Rng;
using kimflow::Scheme;
using kimflow::Schedule;
using kimflow::TargetMeasure;
using kimflow::flow_grid;
using kimflow::integrate;

namespace {

TargetMeasure scale_target(double var) {
  Eigen::MatrixXd c(1, 1);
  c << var;
  return TargetMeasure::gaussian(Eigen::VectorXd::Zero(1), c);
}

TargetMeasure std_gaussian(int d) {
  return TargetMeasure::gaussian(Eigen::VectorXd::Zero(d),
                                 Eigen::MatrixXd::Identity(d, d));
}

// Terminal coefficient of the centered-gaussian flow: the transport map is
// linear, x -> x * sd / sqrt(1 + (var - 1) e^{-2T}).
double scale_map_coeff(double var, double T) {
  return std::sqrt(var) / std::sqrt(1.0 + (var - 1.0) * std::exp(-2.0 * T));
}

double order_fit(const TargetMeasure& mu, Scheme s, double T,
                 const std::vector<int>& steps) {
  Eigen::VectorXd x0(1);
  x0 << 1.0;
  const double want = scale_map_coeff(mu.cov()(0, 0), T);
  std::vector<double> errs;
  for (int n : steps) {
    FlowConfig cfg;
    cfg.T = T;
    cfg.steps = n;
    cfg.scheme = s;
    errs.push_back(std::abs(integrate(mu, x0, cfg).terminal()[0] - want));
  }
  return std::log2(errs.front() / errs.back()) /
         static_cast<double>(steps.size() - 1);
}

}  // namespace

TEST_CASE("uniform grid is the arithmetic ladder") {
  FlowConfig cfg;
  cfg.T = 5.0;
  cfg.steps = 10;
  const std::vector<double> t = flow_grid(cfg);
  REQUIRE(t.size() == 11);
  for (int j = 0; j <= 10; ++j)
    CHECK(t[static_cast<std::size_t>(j)] == Catch::Approx(0.5 * j).epsilon(1e-15));
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 5.0);
}

TEST_CASE("tail-refined grid shrinks steps toward the endpoint") {
  FlowConfig cfg;
  cfg.T = 10.0;
  cfg.steps = 100;
  cfg.schedule = Schedule::geometric_tail;
  const std::vector<double> t = flow_grid(cfg);
  REQUIRE(t.size() == 101);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 10.0);
  double sum = 0.0;
  double prev_w = kimflow::kInf;
  for (std::size_t j = 1; j < t.size(); ++j) {
    const double w = t[j] - t[j - 1];
    CHECK(w > 0.0);
    CHECK(w < prev_w);
    prev_w = w;
    sum += w;
  }
  CHECK(sum == Catch::Approx(10.0).epsilon(1e-12));
  const double first = t[1] - t[0];
  const double last = t[100] - t[99];
  CHECK(first / last == Catch::Approx(64.0).epsilon(1e-9));
}

TEST_CASE("grid construction validates its inputs") {
  FlowConfig cfg;
  cfg.steps = 0;
  CHECK_THROWS_AS(flow_grid(cfg), kimflow::DomainError);
  cfg.steps = 10;
  cfg.T = -1.0;
  CHECK_THROWS_AS(flow_grid(cfg), kimflow::DomainError);
  cfg.T = 4.0;
  cfg.steps = 1;
  cfg.schedule = Schedule::geometric_tail;
  const std::vector<double> t = flow_grid(cfg);
  CHECK(t == std::vector<double>{0.0, 4.0});
}

TEST_CASE("enum names round-trip") {
  using namespace kimflow;
  for (Scheme s : {Scheme::rk4, Scheme::heun, Scheme::euler})
    CHECK(scheme_from_name(scheme_name(s)) == s);
  for (Schedule s : {Schedule::uniform_t, Schedule::geometric_tail})
    CHECK(schedule_from_name(schedule_name(s)) == s);
  for (InitMode m : {InitMode::shared_gamma, InitMode::exact_qT})
    CHECK(init_from_name(init_name(m)) == m);
  CHECK_THROWS_AS(scheme_from_name("rk5"), kimflow::DomainError);
  CHECK_THROWS_AS(schedule_from_name("log"), kimflow::DomainError);
  CHECK_THROWS_AS(init_from_name("cold"), kimflow::DomainError);
}

TEST_CASE("score table reproduces the evolved scores") {
  Eigen::MatrixXd means(2, 3);
  means << -1.0, 0.4, 1.3,
            0.7, -0.2, 0.9;
  Eigen::VectorXd w(3);
  w << 0.3, 0.45, 0.25;
  Eigen::MatrixXd cov(2, 2);
  cov << 1.1, 0.2,
         0.2, 0.8;
  const TargetMeasure m = TargetMeasure::mixture(means, w, cov);
  const double T = 6.0;
  const std::vector<double> stage_times = {0.0, 1.5, 3.0, 5.9, 6.0};
  const kimflow::EvolvedScoreTable table(m, T, stage_times);
  REQUIRE(table.stages() == stage_times.size());
  kimflow::EvolvedScoreTable::Workspace ws;
  Rng rng({81, 0});
  Eigen::VectorXd got(2);
  for (std::size_t s = 0; s < stage_times.size(); ++s) {
    const TargetMeasure law = kimflow::ou_evolve(m, T - stage_times[s]).law;
    for (int i = 0; i < 4; ++i) {
      const Eigen::VectorXd y = 2.0 * rng.normal_vec(2);
      table.score(s, y, got, ws);
      CHECK((got - law.score(y)).norm() < 1e-12);
    }
  }
}

TEST_CASE("score table rejects the perturbed family") {
  Eigen::MatrixXd m(1, 1);
  m << 1.0;
  const TargetMeasure p = TargetMeasure::perturbed_tilt(
      Eigen::MatrixXd::Identity(1, 1), m, Eigen::VectorXd::Ones(1));
  CHECK_THROWS_AS(kimflow::EvolvedScoreTable(p, 5.0, {0.0, 1.0}),
                  kimflow::UnsupportedError);
}

TEST_CASE("standard gaussian flow is the identity, bit for bit") {
  const TargetMeasure g = std_gaussian(2);
  Eigen::VectorXd x0(2);
  x0 << 0.7, -1.9;
  for (Scheme s : {Scheme::euler, Scheme::heun, Scheme::rk4}) {
    FlowConfig cfg;
    cfg.steps = 50;
    cfg.scheme = s;
    const kimflow::Trajectory tr = integrate(g, x0, cfg);
    REQUIRE(tr.states.rows() == 51);
    for (int i = 0; i <= 50; ++i) {
      CHECK(tr.states(i, 0) == x0[0]);
      CHECK(tr.states(i, 1) == x0[1]);
    }
  }
}

TEST_CASE("terminal map hits the exact linear coefficient") {
  const TargetMeasure mu = scale_target(4.0);
  Eigen::VectorXd x0(1);
  x0 << 1.0;
  FlowConfig cfg;
  cfg.T = 10.0;
  cfg.steps = 400;
  const double want = scale_map_coeff(4.0, 10.0);
  CHECK(std::abs(integrate(mu, x0, cfg).terminal()[0] - want) < 1e-8);
  cfg.schedule = Schedule::geometric_tail;
  CHECK(std::abs(integrate(mu, x0, cfg).terminal()[0] - want) < 1e-8);
  // The map is linear, so a different start just rescales.
  Eigen::VectorXd y0(1);
  y0 << -2.5;
  cfg.schedule = Schedule::uniform_t;
  CHECK(integrate(mu, y0, cfg).terminal()[0] ==
        Catch::Approx(-2.5 * want).epsilon(1e-8));
}

TEST_CASE("integrator orders match their schemes") {
  const TargetMeasure mu = scale_target(4.0);
  CHECK(order_fit(mu, Scheme::euler, 2.0, {64, 128, 256}) ==
        Catch::Approx(1.0).margin(0.15));
  CHECK(order_fit(mu, Scheme::heun, 2.0, {32, 64, 128}) ==
        Catch::Approx(2.0).margin(0.3));
  CHECK(order_fit(mu, Scheme::rk4, 2.0, {16, 32, 64}) ==
        Catch::Approx(4.0).margin(0.3));
}

TEST_CASE("integrate validates dimensions") {
  const TargetMeasure g = std_gaussian(2);
  Eigen::VectorXd x0(3);
  x0.setZero();
  FlowConfig cfg;
  CHECK_THROWS_AS(integrate(g, x0, cfg), kimflow::DomainError);
}

TEST_CASE("batched flow map equals the scalar route on every thread count") {
  Eigen::MatrixXd means(2, 2);
  means << -0.8, 0.9,
            0.3, -0.5;
  Eigen::VectorXd w(2);
  w << 0.4, 0.6;
  const TargetMeasure m =
      TargetMeasure::mixture(means, w, Eigen::MatrixXd::Identity(2, 2));
  Rng rng({91, 0});
  Eigen::MatrixXd pts(7, 2);
  for (int i = 0; i < 7; ++i) pts.row(i) = rng.normal_vec(2);
  FlowConfig cfg;
  cfg.steps = 60;
  const Eigen::MatrixXd one = kimflow::flow_map_batch(m, cfg, pts);
  for (int i = 0; i < 7; ++i) {
    const Eigen::VectorXd x0 = pts.row(i);
    CHECK((one.row(i).transpose() - integrate(m, x0, cfg).terminal()).norm() ==
          0.0);
  }
  FlowConfig threaded = cfg;
  threaded.threads = 3;
  CHECK(kimflow::flow_map_batch(m, threaded, pts) == one);
}

TEST_CASE("coupled flows of the same target collapse to zero") {
  Eigen::MatrixXd means(1, 2);
  means << -1.0, 1.2;
  Eigen::VectorXd w(2);
  w << 0.45, 0.55;
  const TargetMeasure m =
      TargetMeasure::mixture(means, w, Eigen::MatrixXd::Identity(1, 1));
  FlowConfig cfg;
  cfg.steps = 40;
  for (InitMode init : {InitMode::shared_gamma, InitMode::exact_qT}) {
    cfg.init = init;
    const kimflow::CoupledResult r =
        kimflow::coupled_distance(m, m, cfg, 32, {23, 0});
    CHECK(r.l2 == 0.0);
    CHECK(r.linf == 0.0);
    CHECK(r.l2_se == 0.0);
    CHECK(r.per_point.maxCoeff() == 0.0);
  }
}

TEST_CASE("shift pair under shared noise lands at the damped offset") {
  // nu = N(m, I) against the standard gaussian: the nu-drift is the
  // state-free e^{-(T-t)} m, so every coupled pair ends exactly
  // (1 - e^{-T}) ||m|| apart when both flows start at the same draw.
  Eigen::VectorXd m(2);
  m << 0.6, -0.8;
  const TargetMeasure nu =
      TargetMeasure::gaussian(m, Eigen::MatrixXd::Identity(2, 2));
  const TargetMeasure mu = std_gaussian(2);
  FlowConfig cfg;
  cfg.T = 10.0;
  cfg.steps = 200;
  const double want = (1.0 - std::exp(-10.0)) * m.norm();
  const kimflow::CoupledResult r =
      kimflow::coupled_distance(mu, nu, cfg, 64, {27, 0});
  CHECK(r.l2 == Catch::Approx(want).epsilon(1e-8));
  CHECK(r.linf == Catch::Approx(want).epsilon(1e-8));
  CHECK(r.l2_se < 1e-12);
  CHECK(r.per_point.maxCoeff() - r.per_point.minCoeff() < 1e-12);
}

TEST_CASE("shift pair under terminal-law coupling recovers the full offset") {
  // Starting each flow from its own evolved law through common random
  // numbers shifts the nu-start by e^{-T} m, and the flow adds the rest:
  // the coupled terminal distance is exactly ||m||.
  Eigen::VectorXd m(2);
  m << 0.6, -0.8;
  const TargetMeasure nu =
      TargetMeasure::gaussian(m, Eigen::MatrixXd::Identity(2, 2));
  const TargetMeasure mu = std_gaussian(2);
  FlowConfig cfg;
  cfg.T = 10.0;
  cfg.steps = 200;
  cfg.init = InitMode::exact_qT;
  const kimflow::CoupledResult r =
      kimflow::coupled_distance(mu, nu, cfg, 64, {27, 0});
  CHECK(r.l2 == Catch::Approx(1.0).epsilon(1e-8));
  CHECK(r.linf == Catch::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("coupled distances are deterministic and validated") {
  const TargetMeasure mu = std_gaussian(1);
  const TargetMeasure nu = scale_target(4.0);
  FlowConfig cfg;
  cfg.steps = 30;
  const kimflow::CoupledResult a = kimflow::coupled_distance(mu, nu, cfg, 16, {31, 2});
  const kimflow::CoupledResult b = kimflow::coupled_distance(mu, nu, cfg, 16, {31, 2});
  CHECK(a.l2 == b.l2);
  CHECK(a.per_point == b.per_point);
  CHECK_THROWS_AS(kimflow::coupled_distance(mu, std_gaussian(2), cfg, 8, {1, 0}),
                  kimflow::DomainError);
  CHECK_THROWS_AS(kimflow::coupled_distance(mu, nu, cfg, 0, {1, 0}),
                  kimflow::DomainError);
}
