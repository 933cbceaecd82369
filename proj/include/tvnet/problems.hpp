#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tvnet/matrix.hpp"
#include "tvnet/rng.hpp"

namespace tvnet {

// Labelled samples with dense features, stored row-major.
struct Dataset {
  std::size_t dim = 0;
  std::vector<double> features;  // size() * dim
  std::vector<int> labels;       // each -1 or +1

  std::size_t size() const noexcept { return labels.size(); }
  std::span<const double> row(std::size_t j) const { return {features.data() + j * dim, dim}; }
  void push_back(std::span<const double> h, int y);
  std::size_t count_label(int y) const;
};

// Raw label value -> +1/-1. Samples whose raw label is absent are dropped.
using RelabelMap = std::map<double, int>;

// "2:+1,4:-1"
RelabelMap parse_relabel(const std::string& text);

struct LibsvmOptions {
  const RelabelMap* relabel = nullptr;
  std::size_t min_dim = 0;
};

// Sparse "label idx:val ..." records with 1-based indices. Blank lines and
// '#' comments are skipped. Without a relabel map the raw label must be +1
// or -1. Throws ParseError naming the offending line.
Dataset parse_libsvm(std::istream& in, const LibsvmOptions& opts = {});
Dataset load_libsvm(const std::string& path, const LibsvmOptions& opts = {});

// Divide every column by its maximum absolute value (all-zero columns kept).
void scale_max_abs(Dataset& data);

// Two Gaussian clusters N(+-separation u, I) with u a seeded unit vector;
// labels alternate +1, -1 so the classes are balanced.
Dataset synthetic_dataset(std::size_t n_samples, std::size_t dim, std::uint64_t seed, double separation);

// Equal-size shards; the first n/2 nodes hold a `skew` fraction of positive
// samples and the rest the mirrored mix. Leftover samples are dropped.
std::vector<Dataset> partition_heterogeneous(const Dataset& data, int n, double skew, std::uint64_t seed);

// Non-convex regularized logistic loss on one shard:
//   (1/m) sum_j ln(1 + exp(-y_j <h_j, x>)) + rho sum_k x_k^2 / (1 + x_k^2)
double logreg_value(std::span<const double> x, const Dataset& shard, double rho);
void logreg_grad(std::span<const double> x, const Dataset& shard, double rho, std::span<double> out);
// Average over the listed samples (duplicates allowed) plus the regularizer.
void logreg_grad_batch(std::span<const double> x, const Dataset& shard, std::span<const std::size_t> idx,
                       double rho, std::span<double> out);

// Smooth objective f = (1/n) sum_i f_i split over n nodes, with a stochastic
// first-order oracle per node.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual int nodes() const = 0;
  virtual std::size_t dim() const = 0;
  virtual double local_value(int node, std::span<const double> x) const = 0;
  virtual void local_grad(int node, std::span<const double> x, std::span<double> out) const = 0;
  // One oracle call; unbiased for local_grad.
  virtual void sample_grad(int node, std::span<const double> x, Rng& rng, std::span<double> out) const = 0;

  double value(std::span<const double> x) const;
  void grad(std::span<const double> x, std::span<double> out) const;
};

class LogisticProblem final : public Problem {
 public:
  // batch_size == 0 selects full-batch (exact) gradients.
  LogisticProblem(std::vector<Dataset> shards, double rho, std::size_t batch_size);

  int nodes() const override { return static_cast<int>(shards_.size()); }
  std::size_t dim() const override { return dim_; }
  double local_value(int node, std::span<const double> x) const override;
  void local_grad(int node, std::span<const double> x, std::span<double> out) const override;
  void sample_grad(int node, std::span<const double> x, Rng& rng, std::span<double> out) const override;

  const Dataset& shard(int node) const { return shards_[static_cast<std::size_t>(node)]; }
  double rho() const noexcept { return rho_; }
  std::size_t batch_size() const noexcept { return batch_; }

  // max_i lambda_max(H_i^T H_i) / (4 m_i) + 2 rho.
  double smoothness_estimate() const;
  // max over nodes of the mean squared oracle deviation at x over `draws` calls.
  double estimate_sigma2(std::span<const double> x, int draws, std::uint64_t seed) const;

 private:
  std::vector<Dataset> shards_;
  double rho_;
  std::size_t batch_;
  std::size_t dim_;
};

}  // namespace tvnet
