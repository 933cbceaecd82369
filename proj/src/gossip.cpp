#include "tvnet/gossip.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "tvnet/errors.hpp"
#include "tvnet/kernels.hpp"

namespace tvnet {

Matrix laplacian(const Graph& g) {
  const int n = g.n();
  Matrix l(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && g.adjacent(i, j)) {
        l(i, j) = -1.0;
        l(i, i) += 1.0;
      }
  return l;
}

namespace {

// I - (delta/n) L(g).
Matrix laplacian_rule(const Graph& g, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw OutOfRange("delta must lie in (0, 1], got " + std::to_string(delta));
  const int n = g.n();
  Matrix w = laplacian(g);
  const double scale = delta / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double& v = w(i, j);
      v = (i == j ? 1.0 : 0.0) - scale * v;
    }
  return w;
}

}  // namespace

WeightMatrix weight_from_graph(const Graph& g, double delta) {
  WeightMatrix w{laplacian_rule(g, delta), 0.0};
  w.claimed_beta = connectivity_measure(w.entries);
  return w;
}

WeightMatrix weight_from_sun(int n, const NodeSet& centers, double delta) {
  WeightMatrix w{laplacian_rule(sun_graph(n, centers), delta), 0.0};
  // Laplacian spectrum of S_{n,C} with |C| = k is {0, k, n}.
  w.claimed_beta = 1.0 - delta * static_cast<double>(centers.size()) / n;
  return w;
}

WeightMatrix mixing_matrix_uniform(int n, double beta) {
  if (n < 1) throw ConfigError("n must be positive");
  if (!(beta >= 0.0 && beta < 1.0)) throw OutOfRange("beta must lie in [0, 1), got " + std::to_string(beta));
  WeightMatrix w;
  w.entries = Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(n), (1.0 - beta) / n);
  for (int i = 0; i < n; ++i) w.entries(i, i) += beta;
  w.claimed_beta = beta;
  return w;
}

double connectivity_measure(const Matrix& w) {
  if (w.rows() != w.cols()) throw ShapeError("weight matrix must be square");
  const Eigen::Index n = static_cast<Eigen::Index>(w.rows());
  Eigen::MatrixXd m(n, n);
  const double avg = 1.0 / static_cast<double>(n);
  bool symmetric = true;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = w(i, j) - avg;
      if (w(i, j) != w(j, i)) symmetric = false;
    }
  if (symmetric) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

WeightReport verify_weight(const Matrix& w, const Graph& g, double beta, double tol) {
  WeightReport r;
  const int n = g.n();
  if (w.rows() != static_cast<std::size_t>(n) || w.cols() != static_cast<std::size_t>(n))
    throw ShapeError("weight matrix and graph disagree on n");
  r.sparsity_ok = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && !g.adjacent(i, j) && w(i, j) != 0.0) r.sparsity_ok = false;
  for (int i = 0; i < n; ++i) {
    double row = 0.0, col = 0.0;
    for (int j = 0; j < n; ++j) {
      row += w(i, j);
      col += w(j, i);
    }
    r.max_row_error = std::max(r.max_row_error, std::abs(row - 1.0));
    r.max_col_error = std::max(r.max_col_error, std::abs(col - 1.0));
  }
  r.stochastic_ok = r.max_row_error <= tol && r.max_col_error <= tol;
  r.measured_beta = connectivity_measure(w);
  r.spectral_ok = r.measured_beta <= beta + tol;
  return r;
}

void gossip_round(const WeightMatrix& w, Matrix& z, Matrix& scratch) {
  if (w.entries.rows() != z.rows()) throw ShapeError("gossip matrix and state disagree on n");
  if (scratch.rows() != z.rows() || scratch.cols() != z.cols()) scratch = Matrix(z.rows(), z.cols());
  kernels::gossip_apply(w.entries.data(), z.rows(), z.data(), z.cols(), scratch.data());
  std::swap(z, scratch);
}

Matrix multi_consensus(const Matrix& z, std::span<const WeightMatrix> rounds) {
  for (const auto& w : rounds)
    if (w.entries.rows() != z.rows() || w.entries.cols() != z.rows())
      throw ShapeError("multi-consensus: matrix of size " + std::to_string(w.entries.rows()) +
                       " does not match " + std::to_string(z.rows()) + " nodes");
  Matrix out = z;
  Matrix scratch(z.rows(), z.cols());
  for (const auto& w : rounds) gossip_round(w, out, scratch);
  return out;
}

WeightSchedule WeightSchedule::from_sequence(const TopologySequence& seq, double delta) {
  WeightSchedule s;
  s.n_ = seq.n();
  auto build = [seq, delta](long t) {
    if (auto c = seq.centers_at(t)) return weight_from_sun(seq.n(), *c, delta);
    return weight_from_graph(seq.graph_at(t), delta);
  };
  if (seq.period() > 0) {
    for (long t = 0; t < seq.period(); ++t) s.cache_.push_back(build(t));
    for (const auto& w : s.cache_) s.beta_ = std::max(s.beta_, w.claimed_beta);
  } else {
    s.generate_ = build;
    s.beta_ = 1.0 - delta * seq.center_size() / seq.n();
  }
  return s;
}

WeightSchedule WeightSchedule::from_construction(const SunSequenceConstruction& c) {
  if (c.uniform_weights) return periodic({mixing_matrix_uniform(c.n, c.beta)});
  std::vector<WeightMatrix> ws;
  for (const auto& centers : c.center_sets) ws.push_back(weight_from_sun(c.n, centers, c.delta));
  return periodic(std::move(ws));
}

WeightSchedule WeightSchedule::periodic(std::vector<WeightMatrix> matrices) {
  if (matrices.empty()) throw ConfigError("schedule needs at least one matrix");
  WeightSchedule s;
  s.n_ = matrices.front().n();
  for (const auto& w : matrices) {
    if (w.n() != s.n_) throw ShapeError("schedule matrices disagree on n");
    s.beta_ = std::max(s.beta_, w.claimed_beta);
  }
  s.cache_ = std::move(matrices);
  return s;
}

const WeightMatrix& WeightSchedule::at(long t) const {
  if (!cache_.empty()) return cache_[static_cast<std::size_t>(t % period())];
  if (scratch_round_ != t) {
    scratch_ = generate_(t);
    scratch_round_ = t;
  }
  return scratch_;
}

void write_matrix(std::ostream& os, const Matrix& m) {
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << m(i, j);
    }
    os << '\n';
  }
  os.precision(old);
}

}  // namespace tvnet
