#include "tvnet/problems.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "tvnet/errors.hpp"
#include "tvnet/kernels.hpp"

namespace tvnet {

void Dataset::push_back(std::span<const double> h, int y) {
  if (dim == 0 && labels.empty()) dim = h.size();
  if (h.size() != dim) throw ShapeError("feature vector has wrong dimension");
  features.insert(features.end(), h.begin(), h.end());
  labels.push_back(y);
}

std::size_t Dataset::count_label(int y) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), y));
}

void scale_max_abs(Dataset& data) {
  std::vector<double> scale(data.dim, 0.0);
  for (std::size_t j = 0; j < data.size(); ++j)
    for (std::size_t k = 0; k < data.dim; ++k) scale[k] = std::max(scale[k], std::abs(data.features[j * data.dim + k]));
  for (std::size_t j = 0; j < data.size(); ++j)
    for (std::size_t k = 0; k < data.dim; ++k)
      if (scale[k] > 0.0) data.features[j * data.dim + k] /= scale[k];
}

Dataset synthetic_dataset(std::size_t n_samples, std::size_t dim, std::uint64_t seed, double separation) {
  if (n_samples < 2 || dim < 1) throw ConfigError("synthetic data needs at least 2 samples and dimension 1");
  Rng rng(stream_seed(seed, 0x51u));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> u(dim);
  double norm = 0.0;
  do {
    for (double& v : u) v = normal(rng);
    norm = std::sqrt(kernels::scalar_table().sum_sq(u.data(), dim));
  } while (norm == 0.0);
  for (double& v : u) v /= norm;

  Dataset data;
  data.dim = dim;
  data.features.resize(n_samples * dim);
  data.labels.resize(n_samples);
  for (std::size_t j = 0; j < n_samples; ++j) {
    const int y = (j % 2 == 0) ? 1 : -1;
    data.labels[j] = y;
    for (std::size_t k = 0; k < dim; ++k) data.features[j * dim + k] = y * separation * u[k] + normal(rng);
  }
  return data;
}

std::vector<Dataset> partition_heterogeneous(const Dataset& data, int n, double skew, std::uint64_t seed) {
  if (n < 2 || n % 2 != 0) throw ConfigError("heterogeneous partition needs an even node count, got " + std::to_string(n));
  if (!(skew >= 0.5 && skew <= 1.0)) throw OutOfRange("skew must lie in [0.5, 1], got " + std::to_string(skew));
  std::vector<std::size_t> pos, neg;
  for (std::size_t j = 0; j < data.size(); ++j) (data.labels[j] > 0 ? pos : neg).push_back(j);

  // With equal shard size s each half of the network needs (n/2) s samples
  // of each class in total, whatever the skew.
  const std::size_t half = static_cast<std::size_t>(n / 2);
  const std::size_t s = std::min({pos.size() / half, neg.size() / half, data.size() / static_cast<std::size_t>(n)});
  if (s == 0)
    throw InfeasiblePartition("classes too small for " + std::to_string(n) + " shards (" + std::to_string(pos.size()) +
                              " positive, " + std::to_string(neg.size()) + " negative)");
  const std::size_t major = static_cast<std::size_t>(std::lround(skew * static_cast<double>(s)));
  const std::size_t minor = s - major;

  Rng rng(stream_seed(seed, 0x9a7u));
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);

  std::vector<Dataset> shards(static_cast<std::size_t>(n));
  std::size_t next_pos = 0, next_neg = 0;
  for (int i = 0; i < n; ++i) {
    Dataset& shard = shards[static_cast<std::size_t>(i)];
    shard.dim = data.dim;
    const bool positive_heavy = i < n / 2;
    const std::size_t take_pos = positive_heavy ? major : minor;
    const std::size_t take_neg = s - take_pos;
    for (std::size_t c = 0; c < take_pos; ++c) shard.push_back(data.row(pos[next_pos++]), 1);
    for (std::size_t c = 0; c < take_neg; ++c) shard.push_back(data.row(neg[next_neg++]), -1);
  }
  return shards;
}

namespace {

// ln(1 + e^t) without overflow.
double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

void add_regularizer_grad(std::span<const double> x, double rho, std::span<double> out) {
  if (rho == 0.0) return;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double q = 1.0 + x[k] * x[k];
    out[k] += rho * 2.0 * x[k] / (q * q);
  }
}

double regularizer(std::span<const double> x) {
  double r = 0.0;
  for (double v : x) r += v * v / (1.0 + v * v);
  return r;
}

// out += scale * (-y h) sigmoid(-y <h, x>)
void accumulate_sample(std::span<const double> x, const Dataset& shard, std::size_t j, double scale,
                       std::span<double> out) {
  const auto h = shard.row(j);
  const double y = shard.labels[j];
  const double margin = y * kernels::dot(h.data(), x.data(), x.size());
  kernels::axpy(-scale * y * sigmoid(-margin), h.data(), out.data(), out.size());
}

}  // namespace

double logreg_value(std::span<const double> x, const Dataset& shard, double rho) {
  if (shard.size() == 0) throw ConfigError("empty shard");
  double loss = 0.0;
  for (std::size_t j = 0; j < shard.size(); ++j) {
    const auto h = shard.row(j);
    loss += softplus(-shard.labels[j] * kernels::dot(h.data(), x.data(), x.size()));
  }
  return loss / static_cast<double>(shard.size()) + rho * regularizer(x);
}

void logreg_grad(std::span<const double> x, const Dataset& shard, double rho, std::span<double> out) {
  if (shard.size() == 0) throw ConfigError("empty shard");
  std::fill(out.begin(), out.end(), 0.0);
  const double scale = 1.0 / static_cast<double>(shard.size());
  for (std::size_t j = 0; j < shard.size(); ++j) accumulate_sample(x, shard, j, scale, out);
  add_regularizer_grad(x, rho, out);
}

void logreg_grad_batch(std::span<const double> x, const Dataset& shard, std::span<const std::size_t> idx, double rho,
                       std::span<double> out) {
  if (idx.empty()) throw ConfigError("empty minibatch");
  std::fill(out.begin(), out.end(), 0.0);
  const double scale = 1.0 / static_cast<double>(idx.size());
  for (std::size_t j : idx) accumulate_sample(x, shard, j, scale, out);
  add_regularizer_grad(x, rho, out);
}

double Problem::value(std::span<const double> x) const {
  double total = 0.0;
  for (int i = 0; i < nodes(); ++i) total += local_value(i, x);
  return total / nodes();
}

void Problem::grad(std::span<const double> x, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> g(dim());
  for (int i = 0; i < nodes(); ++i) {
    local_grad(i, x, g);
    kernels::axpy(1.0, g.data(), out.data(), out.size());
  }
  for (double& v : out) v /= nodes();
}

LogisticProblem::LogisticProblem(std::vector<Dataset> shards, double rho, std::size_t batch_size)
    : shards_(std::move(shards)), rho_(rho), batch_(batch_size), dim_(0) {
  if (shards_.empty()) throw ConfigError("problem needs at least one node");
  if (rho_ < 0.0) throw OutOfRange("regularization weight must be nonnegative");
  dim_ = shards_.front().dim;
  for (const auto& s : shards_) {
    if (s.size() == 0) throw ConfigError("every node needs a nonempty shard");
    if (s.dim != dim_) throw ShapeError("shards disagree on feature dimension");
  }
}

double LogisticProblem::local_value(int node, std::span<const double> x) const {
  return logreg_value(x, shard(node), rho_);
}

void LogisticProblem::local_grad(int node, std::span<const double> x, std::span<double> out) const {
  logreg_grad(x, shard(node), rho_, out);
}

void LogisticProblem::sample_grad(int node, std::span<const double> x, Rng& rng, std::span<double> out) const {
  if (batch_ == 0) {
    local_grad(node, x, out);
    return;
  }
  const Dataset& s = shard(node);
  std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
  std::vector<std::size_t> idx(batch_);
  for (auto& j : idx) j = pick(rng);
  logreg_grad_batch(x, s, idx, rho_, out);
}

double LogisticProblem::smoothness_estimate() const {
  double best = 0.0;
  for (const auto& s : shards_) {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> h(
        s.features.data(), static_cast<Eigen::Index>(s.size()), static_cast<Eigen::Index>(s.dim));
    const Eigen::MatrixXd gram = h.transpose() * h;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    best = std::max(best, eig.eigenvalues().maxCoeff() / (4.0 * static_cast<double>(s.size())));
  }
  return best + 2.0 * rho_;
}

double LogisticProblem::estimate_sigma2(std::span<const double> x, int draws, std::uint64_t seed) const {
  std::vector<double> exact(dim_), sample(dim_);
  double worst = 0.0;
  for (int i = 0; i < nodes(); ++i) {
    local_grad(i, x, exact);
    double total = 0.0;
    for (int r = 0; r < draws; ++r) {
      Rng rng = make_stream(stream_seed(seed, 0x5197u), static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(r));
      sample_grad(i, x, rng, sample);
      for (std::size_t k = 0; k < dim_; ++k) {
        const double e = sample[k] - exact[k];
        total += e * e;
      }
    }
    worst = std::max(worst, total / draws);
  }
  return worst;
}

}  // namespace tvnet
