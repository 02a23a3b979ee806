#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "kimflow/common.hpp"
#include "kimflow/measures.hpp"
#include "kimflow/ou.hpp"
#include "kimflow/rng.hpp"

namespace kimflow {

enum class Scheme { rk4, heun, euler };
enum class Schedule { uniform_t, geometric_tail };
enum class InitMode { shared_gamma, exact_qT };

struct FlowConfig {
  double T = 10.0;
  int steps = 400;
  Scheme scheme = Scheme::rk4;
  Schedule schedule = Schedule::uniform_t;
  InitMode init = InitMode::shared_gamma;
  int threads = 1;
};

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::rk4: return "rk4";
    case Scheme::heun: return "heun";
    case Scheme::euler: return "euler";
  }
  return "?";
}

inline Scheme scheme_from_name(const std::string& s) {
  if (s == "rk4") return Scheme::rk4;
  if (s == "heun") return Scheme::heun;
  if (s == "euler") return Scheme::euler;
  throw DomainError("unknown scheme '" + s + "' (rk4, heun, euler)");
}

inline const char* schedule_name(Schedule s) {
  switch (s) {
    case Schedule::uniform_t: return "uniform_t";
    case Schedule::geometric_tail: return "geometric_tail";
  }
  return "?";
}

inline Schedule schedule_from_name(const std::string& s) {
  if (s == "uniform_t") return Schedule::uniform_t;
  if (s == "geometric_tail") return Schedule::geometric_tail;
  throw DomainError("unknown schedule '" + s +
                    "' (uniform_t, geometric_tail)");
}

inline const char* init_name(InitMode m) {
  switch (m) {
    case InitMode::shared_gamma: return "shared_gamma";
    case InitMode::exact_qT: return "exact_qT";
  }
  return "?";
}

inline InitMode init_from_name(const std::string& s) {
  if (s == "shared_gamma") return InitMode::shared_gamma;
  if (s == "exact_qT") return InitMode::exact_qT;
  throw DomainError("unknown init mode '" + s + "' (shared_gamma, exact_qT)");
}

// Node grid on [0, T]. geometric_tail shrinks the step widths geometrically
// toward t = T (last step 1/64 of the first) to spend effort where the
// evolved score approaches the raw target score.
inline std::vector<double> flow_grid(const FlowConfig& cfg) {
  if (!(cfg.T >= 0)) throw DomainError("flow: T must be >= 0");
  if (cfg.steps < 1) throw DomainError("flow: steps must be >= 1");
  const int N = cfg.steps;
  std::vector<double> t(static_cast<std::size_t>(N) + 1);
  if (cfg.schedule == Schedule::uniform_t || N == 1) {
    for (int j = 0; j <= N; ++j) t[static_cast<std::size_t>(j)] = cfg.T * j / N;
  } else {
    const double ratio = std::pow(1.0 / 64.0, 1.0 / (N - 1));
    std::vector<double> w(static_cast<std::size_t>(N));
    double sum = 0.0;
    double cur = 1.0;
    for (int j = 0; j < N; ++j, cur *= ratio) {
      w[static_cast<std::size_t>(j)] = cur;
      sum += cur;
    }
    t[0] = 0.0;
    double acc = 0.0;
    for (int j = 0; j < N; ++j) {
      acc += w[static_cast<std::size_t>(j)] / sum * cfg.T;
      t[static_cast<std::size_t>(j) + 1] = acc;
    }
  }
  t.back() = cfg.T;  // exact endpoint regardless of accumulation
  return t;
}

// Evolved scores of an exactly evolvable target, precomputed on the stage
// grid an integrator needs (nodes plus rk4 midpoints). Evaluation is
// allocation-free given a workspace, which is what the inner loops hit.
class EvolvedScoreTable {
 public:
  struct Workspace {
    Eigen::VectorXd logits, resp, mbar;
  };

  EvolvedScoreTable(const TargetMeasure& m, double T,
                    const std::vector<double>& stage_times) {
    if (m.family() == Family::perturbed_slc)
      throw UnsupportedError(
          "flow integration needs exactly evolvable targets (Gaussian or "
          "Gaussian mixture)");
    d_ = m.dim();
    K_ = m.components();
    entries_.reserve(stage_times.size());
    for (double t : stage_times) {
      const double u = std::max(T - t, 0.0);
      const TargetMeasure ev = ou_evolve(m, u).law;
      Entry e;
      e.cov_inv = ev.cov_inv();
      e.means = ev.means();
      e.lin = e.cov_inv * e.means;
      e.comp_const.resize(K_);
      for (int k = 0; k < K_; ++k)
        e.comp_const[k] =
            (ev.weights()[k] > 0 ? std::log(ev.weights()[k]) : -kInf) -
            0.5 * e.means.col(k).dot(e.lin.col(k));
      entries_.push_back(std::move(e));
    }
  }

  int dim() const { return d_; }
  std::size_t stages() const { return entries_.size(); }

  void score(std::size_t stage, const Eigen::VectorXd& y, Eigen::VectorXd& out,
             Workspace& ws) const {
    const Entry& e = entries_[stage];
    if (K_ == 1) {
      out.noalias() = e.lin.col(0);
      out.noalias() -= e.cov_inv * y;
      return;
    }
    ws.logits.resize(K_);
    ws.resp.resize(K_);
    ws.logits.noalias() = e.lin.transpose() * y;
    ws.logits += e.comp_const;
    const double m = ws.logits.maxCoeff();
    double z = 0.0;
    for (int k = 0; k < K_; ++k) {
      ws.resp[k] = std::exp(ws.logits[k] - m);
      z += ws.resp[k];
    }
    ws.resp /= z;
    ws.mbar.noalias() = e.means * ws.resp;
    ws.mbar -= y;
    out.noalias() = e.cov_inv * ws.mbar;
  }

 private:
  struct Entry {
    Eigen::MatrixXd cov_inv;
    Eigen::MatrixXd means;
    Eigen::MatrixXd lin;
    Eigen::VectorXd comp_const;
  };
  std::vector<Entry> entries_;
  int d_ = 0;
  int K_ = 0;
};

namespace detail {

// Stage layout: node j sits at stage index node_stage(j); rk4 midpoints of
// step i (if present) at mid_stage(i).
struct StageGrid {
  std::vector<double> nodes;
  std::vector<double> stage_times;
  bool has_mid = false;

  explicit StageGrid(const FlowConfig& cfg) : nodes(flow_grid(cfg)) {
    has_mid = cfg.scheme == Scheme::rk4;
    stage_times = nodes;
    if (has_mid)
      for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
        stage_times.push_back(0.5 * (nodes[i] + nodes[i + 1]));
  }
  std::size_t node_stage(std::size_t j) const { return j; }
  std::size_t mid_stage(std::size_t i) const { return nodes.size() + i; }
};

struct StepBuffers {
  Eigen::VectorXd k1, k2, k3, k4, tmp;
  EvolvedScoreTable::Workspace ws;
  explicit StepBuffers(int d) : k1(d), k2(d), k3(d), k4(d), tmp(d) {}
};

// One integrator step x -> x_next in place. Drift b(t, x) = x + score(t, x).
inline void advance(const EvolvedScoreTable& table, const StageGrid& grid,
                    Scheme scheme, std::size_t i, Eigen::VectorXd& x,
                    StepBuffers& b) {
  const double h = grid.nodes[i + 1] - grid.nodes[i];
  switch (scheme) {
    case Scheme::euler: {
      table.score(grid.node_stage(i), x, b.k1, b.ws);
      b.k1 += x;
      x += h * b.k1;
      return;
    }
    case Scheme::heun: {
      table.score(grid.node_stage(i), x, b.k1, b.ws);
      b.k1 += x;
      b.tmp = x + h * b.k1;
      table.score(grid.node_stage(i + 1), b.tmp, b.k2, b.ws);
      b.k2 += b.tmp;
      x += 0.5 * h * (b.k1 + b.k2);
      return;
    }
    case Scheme::rk4: {
      table.score(grid.node_stage(i), x, b.k1, b.ws);
      b.k1 += x;
      b.tmp = x + 0.5 * h * b.k1;
      table.score(grid.mid_stage(i), b.tmp, b.k2, b.ws);
      b.k2 += b.tmp;
      b.tmp = x + 0.5 * h * b.k2;
      table.score(grid.mid_stage(i), b.tmp, b.k3, b.ws);
      b.k3 += b.tmp;
      b.tmp = x + h * b.k3;
      table.score(grid.node_stage(i + 1), b.tmp, b.k4, b.ws);
      b.k4 += b.tmp;
      x += h / 6.0 * (b.k1 + 2.0 * b.k2 + 2.0 * b.k3 + b.k4);
      return;
    }
  }
}

}  // namespace detail

struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd states;  // (steps+1) x d
  Eigen::VectorXd terminal() const { return states.row(states.rows() - 1); }
};

// Integrate one point through the reverse-time transport ODE
//   dx/dt = x + score of (mu evolved to time T - t) at x,   t in [0, T].
inline Trajectory integrate(const TargetMeasure& mu, const Eigen::VectorXd& x0,
                            const FlowConfig& cfg) {
  if (x0.size() != mu.dim()) throw DomainError("integrate: dimension mismatch");
  const detail::StageGrid grid(cfg);
  const EvolvedScoreTable table(mu, cfg.T, grid.stage_times);
  detail::StepBuffers buf(mu.dim());
  Trajectory out;
  out.times = grid.nodes;
  out.states.resize(static_cast<Eigen::Index>(grid.nodes.size()), mu.dim());
  Eigen::VectorXd x = x0;
  out.states.row(0) = x;
  for (std::size_t i = 0; i + 1 < grid.nodes.size(); ++i) {
    detail::advance(table, grid, cfg.scheme, i, x, buf);
    if (!x.allFinite())
      throw DivergenceError("integrate: state left finite range",
                            grid.nodes[i + 1]);
    out.states.row(static_cast<Eigen::Index>(i) + 1) = x;
  }
  return out;
}

namespace detail {
template <typename Fn>
inline void parallel_for(int n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int workers = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) fn(i);
    });
  for (auto& th : pool) th.join();
}
}  // namespace detail

// Push a batch of initial points through the flow; row i of the result is
// the terminal state of row i of `points` (order preserved under threading).
inline Eigen::MatrixXd flow_map_batch(const TargetMeasure& mu,
                                      const FlowConfig& cfg,
                                      const Eigen::MatrixXd& points) {
  if (points.cols() != mu.dim())
    throw DomainError("flow_map_batch: dimension mismatch");
  const detail::StageGrid grid(cfg);
  const EvolvedScoreTable table(mu, cfg.T, grid.stage_times);
  Eigen::MatrixXd out(points.rows(), points.cols());
  const int n = static_cast<int>(points.rows());
  std::exception_ptr failure;
  detail::parallel_for(n, cfg.threads, [&](int i) {
    try {
      detail::StepBuffers buf(mu.dim());
      Eigen::VectorXd x = points.row(i);
      for (std::size_t s = 0; s + 1 < grid.nodes.size(); ++s) {
        detail::advance(table, grid, cfg.scheme, s, x, buf);
        if (!x.allFinite())
          throw DivergenceError("flow_map_batch: state left finite range",
                                grid.nodes[s + 1], i);
      }
      out.row(i) = x;
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);
  return out;
}

struct CoupledResult {
  double l2 = 0.0;     // sqrt(mean squared terminal distance)
  double l2_se = 0.0;  // delta-method standard error of l2
  double linf = 0.0;   // max terminal distance
  Eigen::VectorXd per_point;
};

// Drive the same initial randomness through both targets' flows and measure
// terminal displacements. shared_gamma starts both flows at a common
// standard-normal draw; exact_qT pushes one (uniform, normal vector) pair
// through each target's evolved-law transform (common random numbers).
inline CoupledResult coupled_distance(const TargetMeasure& mu,
                                      const TargetMeasure& nu,
                                      const FlowConfig& cfg, int n,
                                      SamplerSeed seed) {
  if (mu.dim() != nu.dim())
    throw DomainError("coupled_distance: dimension mismatch");
  if (n < 1) throw DomainError("coupled_distance: n must be >= 1");
  const int d = mu.dim();
  Eigen::MatrixXd x0(n, d), y0(n, d);
  Rng rng(seed);
  Eigen::VectorXd z(d), p(d);
  if (cfg.init == InitMode::shared_gamma) {
    for (int i = 0; i < n; ++i) {
      rng.normal_vec_into(z);
      x0.row(i) = z;
      y0.row(i) = z;
    }
  } else {
    const TargetMeasure mu_T = ou_evolve(mu, cfg.T).law;
    const TargetMeasure nu_T = ou_evolve(nu, cfg.T).law;
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform();
      rng.normal_vec_into(z);
      mu_T.draw_coupled_into(u, z, p);
      x0.row(i) = p;
      nu_T.draw_coupled_into(u, z, p);
      y0.row(i) = p;
    }
  }
  const Eigen::MatrixXd xT = flow_map_batch(mu, cfg, x0);
  const Eigen::MatrixXd yT = flow_map_batch(nu, cfg, y0);

  CoupledResult out;
  out.per_point.resize(n);
  std::vector<double> sq(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double dist = (xT.row(i) - yT.row(i)).norm();
    out.per_point[i] = dist;
    sq[static_cast<std::size_t>(i)] = dist * dist;
    out.linf = std::max(out.linf, dist);
  }
  const MeanSe ms = mean_with_se(sq);
  out.l2 = std::sqrt(ms.mean);
  out.l2_se = out.l2 > 0 ? ms.se / (2.0 * out.l2) : 0.0;
  return out;
}

}  // namespace kimflow
