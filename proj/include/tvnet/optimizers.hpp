#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "tvnet/gossip.hpp"
#include "tvnet/matrix.hpp"
#include "tvnet/problems.hpp"

namespace tvnet {

enum class Algorithm { DSGD, DSGT, MCDSGT };

const char* to_string(Algorithm a);
// Accepts "dsgd", "dsgt", "mcdsgt" (case-insensitive, '-' ignored).
Algorithm parse_algorithm(std::string_view text);

enum class TrackerInit {
  ExactAverage,   // h_i^0 = exact network average of the accumulated gradients
  Decentralized,  // h^0 = R gossip rounds applied to the local accumulated gradients
};

struct AlgoConfig {
  Algorithm algo = Algorithm::MCDSGT;
  double gamma = 0.0;
  int R = 1;
  long K = 0;
  std::uint64_t seed = 0;
  long record_every = 1;
  TrackerInit init = TrackerInit::ExactAverage;
};

// Stacked per-node state, one row per node.
struct NodeStates {
  Matrix X;
  Matrix H;     // trackers; empty for DSGD
  Matrix Gacc;  // most recent accumulated stochastic gradients
  long k = 0;
  long grad_queries = 0;  // per node
  long comm_rounds = 0;   // per node; also the index of the next gossip matrix
};

struct RunRow {
  long k;
  long grad_queries;
  long comm_rounds;
  double grad_norm_sq;
  double loss;
  double consensus_err;
};

struct RunRecord {
  std::vector<RunRow> rows;
  // One entry per outer round for the tracking algorithms: max over
  // coordinates of |mean(H) - mean(Gacc)| and of
  // |mean(X^{k+1}) - (mean(X^k) - gamma mean(H^k))|.
  std::vector<double> tracking_residual;
  std::vector<double> mean_recursion_residual;
  NodeStates final_state;
};

// Invoked after every mutation of the node state (including each single
// gossip round), e.g. to trace information progress.
using StateObserver = std::function<void(const NodeStates&)>;

struct Metrics {
  double grad_norm_sq;
  double loss;
  double consensus_err;  // ||Pi X||_F^2 / n
};

// Evaluated at the row mean of X with exact gradients.
Metrics metrics(const Matrix& X, const Problem& problem);

// `x0` defaults to the origin. Throws DivergenceError on a non-finite iterate.
RunRecord mc_dsgt_run(const Problem& problem, const WeightSchedule& weights, const AlgoConfig& cfg,
                      std::span<const double> x0 = {}, const StateObserver& observer = {});
// mc_dsgt_run with R = 1.
RunRecord dsgt_run(const Problem& problem, const WeightSchedule& weights, const AlgoConfig& cfg,
                   std::span<const double> x0 = {}, const StateObserver& observer = {});
// X <- W (X - gamma G) with single-sample gradients.
RunRecord dsgd_run(const Problem& problem, const WeightSchedule& weights, const AlgoConfig& cfg,
                   std::span<const double> x0 = {}, const StateObserver& observer = {});
// Dispatch on cfg.algo.
RunRecord run_algorithm(const Problem& problem, const WeightSchedule& weights, const AlgoConfig& cfg,
                        std::span<const double> x0 = {}, const StateObserver& observer = {});

// Step-size rule of the MC-DSGT convergence bound; rho = beta^R. Terms
// that involve 1/rho or 1/sigma are skipped when those vanish.
double auto_gamma(double L, double Delta, double sigma, double rho, int R, long K);

// Consensus rounds of the MC-DSGT convergence bound; at least 1, and 1 when beta = 0.
int auto_R(double beta, int n, double L, double Delta, double T, double sigma);

}  // namespace tvnet
