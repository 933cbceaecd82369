#include "tvnet/optimizers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "tvnet/errors.hpp"
#include "tvnet/kernels.hpp"
#include "tvnet/rng.hpp"

namespace tvnet {

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::DSGD: return "dsgd";
    case Algorithm::DSGT: return "dsgt";
    case Algorithm::MCDSGT: return "mcdsgt";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view text) {
  std::string key;
  for (char c : text)
    if (c != '-' && c != '_') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (key == "dsgd") return Algorithm::DSGD;
  if (key == "dsgt") return Algorithm::DSGT;
  if (key == "mcdsgt") return Algorithm::MCDSGT;
  throw ConfigError("unknown algorithm '" + std::string(text) + "' (expected dsgd, dsgt or mcdsgt)");
}

Metrics metrics(const Matrix& X, const Problem& problem) {
  const Vector mean = column_means(X);
  Vector g(mean.size());
  problem.grad(mean, g);
  return {kernels::sum_sq(g.data(), g.size()), problem.value(mean),
          consensus_distance_sq(X) / static_cast<double>(X.rows())};
}

namespace {

void validate(const Problem& problem, const WeightSchedule& weights, const AlgoConfig& cfg, std::span<const double> x0) {
  if (weights.n() != problem.nodes())
    throw ShapeError("weight schedule has " + std::to_string(weights.n()) + " nodes, problem has " +
                     std::to_string(problem.nodes()));
  if (!(cfg.gamma >= 0.0) || !std::isfinite(cfg.gamma)) throw OutOfRange("step size must be finite and nonnegative");
  if (cfg.R < 1) throw OutOfRange("R must be at least 1");
  if (cfg.K < 0) throw OutOfRange("K must be nonnegative");
  if (cfg.record_every < 1) throw OutOfRange("record cadence must be at least 1");
  if (!x0.empty() && x0.size() != problem.dim()) throw ShapeError("initial point has wrong dimension");
}

Matrix initial_iterates(const Problem& problem, std::span<const double> x0) {
  const auto n = static_cast<std::size_t>(problem.nodes());
  if (x0.empty()) return Matrix(n, problem.dim());
  return replicate_rows(x0, n);
}

// Each node averages `R` oracle calls at its own row of X. Streams are keyed
// by (node, per-node query index), so results do not depend on call order.
void accumulate_gradients(const Problem& problem, const Matrix& X, int R, std::uint64_t seed, long first_query,
                          Matrix& out) {
  const std::size_t d = X.cols();
  Vector sample(d);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    auto acc = out.row(i);
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int r = 0; r < R; ++r) {
      Rng rng = make_stream(seed, i, static_cast<std::uint64_t>(first_query + r));
      problem.sample_grad(static_cast<int>(i), X.row(i), rng, sample);
      kernels::axpy(1.0, sample.data(), acc.data(), d);
    }
    if (R > 1)
      for (double& v : acc) v /= R;
  }
}

class Runner {
 public:
  Runner(const Problem& problem, const WeightSchedule& weights, const AlgoConfig& cfg, const StateObserver& observer)
      : problem_(problem), weights_(weights), cfg_(cfg), observer_(observer) {}

  void observe() {
    if (observer_) observer_(s_);
  }

  void gossip(Matrix& z, int rounds) {
    for (int r = 0; r < rounds; ++r) {
      gossip_round(weights_.at(s_.comm_rounds), z, scratch_);
      ++s_.comm_rounds;
      observe();
    }
  }

  void sample(int R) {
    accumulate_gradients(problem_, s_.X, R, cfg_.seed, s_.grad_queries, s_.Gacc);
    s_.grad_queries += R;
    observe();
  }

  void check_finite() {
    if (!all_finite(s_.X) || (s_.H.rows() > 0 && !all_finite(s_.H))) throw DivergenceError(s_.k, cfg_.gamma);
  }

  void maybe_record() {
    if (s_.k % cfg_.record_every != 0 && s_.k != cfg_.K) return;
    const Metrics m = metrics(s_.X, problem_);
    if (!std::isfinite(m.grad_norm_sq) || !std::isfinite(m.loss)) throw DivergenceError(s_.k, cfg_.gamma);
    record_.rows.push_back({s_.k, s_.grad_queries, s_.comm_rounds, m.grad_norm_sq, m.loss, m.consensus_err});
  }

  NodeStates s_;
  RunRecord record_;
  Matrix scratch_;

 private:
  const Problem& problem_;
  const WeightSchedule& weights_;
  const AlgoConfig& cfg_;
  const StateObserver& observer_;
};

double max_abs_diff(const Vector& a, const Vector& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
  return worst;
}

RunRecord tracking_run(const Problem& problem, const WeightSchedule& weights, const AlgoConfig& cfg,
                       std::span<const double> x0, const StateObserver& observer) {
  validate(problem, weights, cfg, x0);
  Runner run(problem, weights, cfg, observer);
  NodeStates& s = run.s_;
  const int R = cfg.R;
  const std::size_t n = static_cast<std::size_t>(problem.nodes()), d = problem.dim();

  s.X = initial_iterates(problem, x0);
  s.Gacc = Matrix(n, d);
  s.H = Matrix(n, d);
  run.observe();

  run.sample(R);
  if (cfg.init == TrackerInit::ExactAverage) {
    s.H = replicate_rows(column_means(s.Gacc), n);
    run.observe();
  } else {
    s.H = s.Gacc;
    run.observe();
    run.gossip(s.H, R);
  }
  // The accumulator is reset to the initial tracker so that the first
  // correction term is G^1 - H^0.
  s.Gacc = s.H;
  run.observe();

  Matrix previous(n, d);
  run.record_.tracking_residual.reserve(static_cast<std::size_t>(cfg.K));
  run.record_.mean_recursion_residual.reserve(static_cast<std::size_t>(cfg.K));
  for (long k = 0; k < cfg.K; ++k) {
    const Vector x_mean = column_means(s.X);
    const Vector h_mean = column_means(s.H);

    for (std::size_t i = 0; i < n; ++i) kernels::axpy(-cfg.gamma, s.H.row(i).data(), s.X.row(i).data(), d);
    run.observe();
    run.gossip(s.X, R);

    previous = s.Gacc;
    run.sample(R);

    for (std::size_t i = 0; i < n; ++i) {
      kernels::axpy(1.0, s.Gacc.row(i).data(), s.H.row(i).data(), d);
      kernels::axpy(-1.0, previous.row(i).data(), s.H.row(i).data(), d);
    }
    run.observe();
    run.gossip(s.H, R);

    s.k = k + 1;
    run.check_finite();

    Vector predicted(d);
    for (std::size_t j = 0; j < d; ++j) predicted[j] = x_mean[j] - cfg.gamma * h_mean[j];
    run.record_.mean_recursion_residual.push_back(max_abs_diff(column_means(s.X), predicted));
    run.record_.tracking_residual.push_back(max_abs_diff(column_means(s.H), column_means(s.Gacc)));
    run.maybe_record();
  }
  run.record_.final_state = std::move(s);
  return std::move(run.record_);
}

}  // namespace

RunRecord mc_dsgt_run(const Problem& problem, const WeightSchedule& weights, const AlgoConfig& cfg,
                      std::span<const double> x0, const StateObserver& observer) {
  if (cfg.algo != Algorithm::MCDSGT) throw ConfigError("mc_dsgt_run needs algo = mcdsgt");
  return tracking_run(problem, weights, cfg, x0, observer);
}

RunRecord dsgt_run(const Problem& problem, const WeightSchedule& weights, const AlgoConfig& cfg,
                   std::span<const double> x0, const StateObserver& observer) {
  if (cfg.algo != Algorithm::DSGT) throw ConfigError("dsgt_run needs algo = dsgt");
  AlgoConfig single = cfg;
  single.R = 1;
  return tracking_run(problem, weights, single, x0, observer);
}

RunRecord dsgd_run(const Problem& problem, const WeightSchedule& weights, const AlgoConfig& cfg,
                   std::span<const double> x0, const StateObserver& observer) {
  if (cfg.algo != Algorithm::DSGD) throw ConfigError("dsgd_run needs algo = dsgd");
  validate(problem, weights, cfg, x0);
  Runner run(problem, weights, cfg, observer);
  NodeStates& s = run.s_;
  const std::size_t n = static_cast<std::size_t>(problem.nodes()), d = problem.dim();
  s.X = initial_iterates(problem, x0);
  s.Gacc = Matrix(n, d);
  run.observe();

  for (long k = 0; k < cfg.K; ++k) {
    run.sample(1);
    for (std::size_t i = 0; i < n; ++i) kernels::axpy(-cfg.gamma, s.Gacc.row(i).data(), s.X.row(i).data(), d);
    run.observe();
    run.gossip(s.X, 1);
    s.k = k + 1;
    run.check_finite();
    run.maybe_record();
  }
  run.record_.final_state = std::move(s);
  return std::move(run.record_);
}

RunRecord run_algorithm(const Problem& problem, const WeightSchedule& weights, const AlgoConfig& cfg,
                        std::span<const double> x0, const StateObserver& observer) {
  switch (cfg.algo) {
    case Algorithm::DSGD: return dsgd_run(problem, weights, cfg, x0, observer);
    case Algorithm::DSGT: return dsgt_run(problem, weights, cfg, x0, observer);
    case Algorithm::MCDSGT: return mc_dsgt_run(problem, weights, cfg, x0, observer);
  }
  throw ConfigError("unknown algorithm");
}

double auto_gamma(double L, double Delta, double sigma, double rho, int R, long K) {
  if (!(L > 0.0) || !(Delta > 0.0) || !(sigma >= 0.0) || R < 1 || K < 0)
    throw OutOfRange("auto step size needs L, Delta > 0, sigma >= 0, R >= 1, K >= 0");
  if (!(rho >= 0.0 && rho < 1.0)) throw OutOfRange("rho must lie in [0, 1)");
  const double r2 = rho * rho, one_m = 1.0 - r2, one_p = 1.0 + r2;
  double gamma = std::min(1.0 / (2.0 * L), one_m / (24.0 * one_p * L));
  if (rho > 0.0) {
    gamma = std::min(gamma, one_m * one_m / (9.0 * r2 * one_p * L));
    gamma = std::min(gamma, one_m / (5.0 * rho * std::sqrt(one_p) * L));
    if (sigma > 0.0) {
      const double num = one_m * one_m * one_m * R * Delta;
      const double den = 108.0 * r2 * one_p * one_p * L * L * sigma * sigma * static_cast<double>(K + 1);
      gamma = std::min(gamma, std::cbrt(num / den));
    }
  }
  return gamma;
}

int auto_R(double beta, int n, double L, double Delta, double T, double sigma) {
  if (!(beta >= 0.0 && beta < 1.0)) throw OutOfRange("beta must lie in [0, 1)");
  if (beta == 0.0) return 1;
  if (n < 1 || !(L > 0.0) || !(Delta > 0.0) || !(T > 0.0) || !(sigma > 0.0))
    throw OutOfRange("auto R needs n, L, Delta, T, sigma > 0");
  const double gap = 1.0 - beta;
  const double log_arg = 0.75 * std::log(n) + 0.25 * std::log(L) + 0.25 * std::log(Delta) - 0.25 * std::log(T) -
                         0.5 * std::log(gap) - 0.5 * std::log(sigma);
  const double rounds = std::ceil(std::max(std::log(2.0), log_arg) / gap);
  if (!(rounds < static_cast<double>(std::numeric_limits<int>::max()))) throw OutOfRange("auto R overflows");
  return std::max(1, static_cast<int>(rounds));
}

}  // namespace tvnet
