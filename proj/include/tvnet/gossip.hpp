#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "tvnet/matrix.hpp"
#include "tvnet/topology.hpp"

namespace tvnet {

// Doubly stochastic gossip matrix together with the connectivity bound it
// was constructed to satisfy: ||W - 11^T/n||_2 <= claimed_beta.
struct WeightMatrix {
  Matrix entries;
  double claimed_beta = 0.0;

  int n() const noexcept { return static_cast<int>(entries.rows()); }
};

// L = D - A of an undirected graph (self loops excluded).
Matrix laplacian(const Graph& g);

// W = I - (delta/n) L(S_{n,C}); claimed beta = 1 - delta |C| / n.
WeightMatrix weight_from_sun(int n, const NodeSet& centers, double delta);

// Same rule for an arbitrary undirected graph; claimed beta is measured.
WeightMatrix weight_from_graph(const Graph& g, double delta);

// W = beta I + (1 - beta)/n 11^T.
WeightMatrix mixing_matrix_uniform(int n, double beta);

// ||W - 11^T/n||_2 via a symmetric eigendecomposition (or an SVD when W is
// not symmetric).
double connectivity_measure(const Matrix& w);

struct WeightReport {
  bool sparsity_ok = false;    // zero outside the graph's neighborhoods
  bool stochastic_ok = false;  // row and column sums within tol of 1
  bool spectral_ok = false;    // measured_beta <= beta + tol
  double measured_beta = 0.0;
  double max_row_error = 0.0;
  double max_col_error = 0.0;

  bool ok() const noexcept { return sparsity_ok && stochastic_ok && spectral_ok; }
};

WeightReport verify_weight(const Matrix& w, const Graph& g, double beta, double tol);

// One gossip round z <- W z. `scratch` is resized as needed.
void gossip_round(const WeightMatrix& w, Matrix& z, Matrix& scratch);

// W_{last} ... W_{first} Z, applied in list order.
Matrix multi_consensus(const Matrix& z, std::span<const WeightMatrix> rounds);

// Round-indexed source of gossip matrices. Periodic sequences are
// materialized once; random sequences are built on demand, so a schedule must
// not be shared between threads.
class WeightSchedule {
 public:
  // W^t = I - (delta/n) L(G^t) for every graph of the sequence.
  static WeightSchedule from_sequence(const TopologySequence& seq, double delta = 1.0);
  static WeightSchedule from_construction(const SunSequenceConstruction& c);
  static WeightSchedule periodic(std::vector<WeightMatrix> matrices);

  int n() const noexcept { return n_; }
  // Upper bound on the claimed beta of every matrix the schedule produces.
  double beta() const noexcept { return beta_; }
  long period() const noexcept { return static_cast<long>(cache_.size()); }

  const WeightMatrix& at(long t) const;

 private:
  WeightSchedule() = default;

  int n_ = 0;
  double beta_ = 0.0;
  std::vector<WeightMatrix> cache_;
  std::function<WeightMatrix(long)> generate_;
  mutable WeightMatrix scratch_;
  mutable long scratch_round_ = -1;
};

// Rows of space-separated reals, 17 significant digits.
void write_matrix(std::ostream& os, const Matrix& m);

}  // namespace tvnet
