#pragma once

// Independent reference computations used by the tests. None of these call
// into the code paths they are used to check.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tvnet/matrix.hpp"
#include "tvnet/topology.hpp"

namespace oracle {

// First r >= 1 at which a message leaving `from` at round t0 reaches `to`,
// simulated with boolean adjacency-matrix products over graph_at().
std::optional<long> first_arrival(const tvnet::TopologySequence& seq, const tvnet::NodeSet& from,
                                  const tvnet::NodeSet& to, long t0, long cap);

// min over t0 in [0, window), max over the two directions.
std::optional<long> distance(const tvnet::TopologySequence& seq, const tvnet::NodeSet& a, const tvnet::NodeSet& b,
                             long window, long cap);

// max over ordered pairs of singleton distances.
std::optional<long> diameter(const tvnet::TopologySequence& seq, long window, long cap);

// ||W - 11^T/n||_2 by power iteration on (W - J)^T (W - J).
double spectral_gap_norm(const tvnet::Matrix& w, int iterations = 20000);

tvnet::Matrix product(const tvnet::Matrix& a, const tvnet::Matrix& b);

// sum_i ||x_i - xbar||^2 with xbar computed in long double.
double naive_consensus_sq(const tvnet::Matrix& x);

// sqrt(e) * integral_{-inf}^z exp(-t^2/2) dt by composite Simpson.
double phi_quadrature(double z);

// Chain function h written directly from its definition (sum over links).
double chain_h(std::span<const double> x);

// Central differences with step h.
std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f, std::span<const double> x,
                                double h = 1e-5);

// max_k |a_k - b_k| / max(1, |b_k|)
double rel_error(std::span<const double> a, std::span<const double> b);

}  // namespace oracle
