#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tvnet/errors.hpp"
#include "tvnet/gossip.hpp"

using namespace tvnet;

namespace {

std::vector<double> sorted_eigenvalues(const Matrix& m) {
  Eigen::MatrixXd a(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a(i, j) = m(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(v.begin(), v.end());
  return v;
}

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

NodeSet random_centers(int n, std::mt19937_64& rng) {
  NodeSet c;
  for (int i = 0; i < n; ++i)
    if (rng() % 3 == 0) c.push_back(i);
  if (c.empty()) c.push_back(static_cast<int>(rng() % n));
  return c;
}

}  // namespace

TEST_CASE("Laplacian spectra") {
  const auto sun = sorted_eigenvalues(laplacian(sun_graph(8, {0, 1})));
  const std::vector<double> expected{0, 2, 2, 2, 2, 2, 8, 8};
  for (std::size_t i = 0; i < 8; ++i) CHECK(sun[i] == doctest::Approx(expected[i]).epsilon(1e-12));

  const auto k4 = sorted_eigenvalues(laplacian(complete_graph(4)));
  CHECK(k4[0] == doctest::Approx(0.0).epsilon(1e-12));
  for (int i = 1; i < 4; ++i) CHECK(k4[static_cast<std::size_t>(i)] == doctest::Approx(4.0));

  const Matrix p = laplacian(Graph::from_edges(2, {{0, 1}}));
  CHECK(p(0, 0) == 1.0);
  CHECK(p(0, 1) == -1.0);
  CHECK(p(1, 0) == -1.0);
  CHECK(p(1, 1) == 1.0);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 10);
    const NodeSet c = random_centers(n, rng);
    const Matrix l = laplacian(sun_graph(n, c));
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (int j = 0; j < n; ++j) s += l(i, j);
      CHECK(s == 0.0);
    }
    // 0, k with multiplicity n-k-1, n with multiplicity k
    const auto ev = sorted_eigenvalues(l);
    const int k = static_cast<int>(c.size());
    std::vector<double> want(1, 0.0);
    if (k < n) {
      want.insert(want.end(), static_cast<std::size_t>(n - k - 1), static_cast<double>(k));
      want.insert(want.end(), static_cast<std::size_t>(k), static_cast<double>(n));
    } else {
      want.insert(want.end(), static_cast<std::size_t>(n - 1), static_cast<double>(n));
    }
    for (int i = 0; i < n; ++i)
      CHECK(ev[static_cast<std::size_t>(i)] == doctest::Approx(want[static_cast<std::size_t>(i)]).epsilon(1e-10));
  }
}

TEST_CASE("sun weight matrices") {
  const WeightMatrix w = weight_from_sun(8, {0, 1}, 1.0);
  CHECK(w.claimed_beta == doctest::Approx(0.75));
  CHECK(std::abs(connectivity_measure(w.entries) - 0.75) < 1e-10);
  CHECK(std::abs(oracle::spectral_gap_norm(w.entries) - 0.75) < 1e-9);
  const auto ev = sorted_eigenvalues(w.entries);
  CHECK(ev[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(0.0).epsilon(1e-12));
  for (int i = 2; i < 7; ++i) CHECK(ev[static_cast<std::size_t>(i)] == doctest::Approx(0.75));
  CHECK(ev[7] == doctest::Approx(1.0));

  const WeightMatrix two = weight_from_sun(2, {0}, 1.0);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(two.entries(i, j) == 0.5);
  CHECK(connectivity_measure(two.entries) < 1e-12);

  const WeightMatrix full = weight_from_sun(4, all_nodes(4), 1.0);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(full.entries(i, j) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(connectivity_measure(full.entries) < 1e-12);

  CHECK_THROWS_AS(weight_from_sun(4, {0}, 0.0), OutOfRange);
  CHECK_THROWS_AS(weight_from_sun(4, {0}, 1.5), OutOfRange);
}

TEST_CASE("sun weight matrices: symmetric, PSD, measured beta equals the claim") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 15);
    const NodeSet c = random_centers(n, rng);
    const double delta = u(rng);
    const WeightMatrix w = weight_from_sun(n, c, delta);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) CHECK(w.entries(i, j) == w.entries(j, i));
    CHECK(sorted_eigenvalues(w.entries).front() >= -1e-12);
    const double claimed = 1.0 - delta * static_cast<double>(c.size()) / n;
    CHECK(w.claimed_beta == doctest::Approx(claimed).epsilon(1e-15));
    // With |C| >= n - 1 the eigenvalue k of L has no eigenvector left and
    // the claim is only an upper bound.
    if (static_cast<int>(c.size()) <= n - 2) {
      CHECK(std::abs(connectivity_measure(w.entries) - claimed) < 1e-10);
      CHECK(std::abs(oracle::spectral_gap_norm(w.entries) - claimed) < 1e-8);
    } else {
      CHECK(connectivity_measure(w.entries) <= claimed + 1e-10);
    }
    const WeightReport rep = verify_weight(w.entries, sun_graph(n, c), w.claimed_beta, 1e-10);
    CHECK(rep.ok());
  }
}

TEST_CASE("uniform mixing matrices") {
  const WeightMatrix a = mixing_matrix_uniform(3, 0.0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(a.entries(i, j) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  const WeightMatrix b = mixing_matrix_uniform(2, 0.5);
  CHECK(b.entries(0, 0) == 0.75);
  CHECK(b.entries(0, 1) == 0.25);
  CHECK(std::abs(connectivity_measure(b.entries) - 0.5) < 1e-12);
  const WeightMatrix c = mixing_matrix_uniform(4, 0.9);
  const WeightReport rep = verify_weight(c.entries, complete_graph(4), 0.9, 1e-12);
  CHECK(rep.stochastic_ok);
  CHECK(std::abs(rep.measured_beta - 0.9) < 1e-12);
  CHECK(std::abs(oracle::spectral_gap_norm(c.entries) - 0.9) < 1e-9);
}

TEST_CASE("connectivity measure and verifier edge cases") {
  CHECK(connectivity_measure(Matrix::identity(2)) == doctest::Approx(1.0));
  Matrix j(5, 5, 0.2);
  CHECK(connectivity_measure(j) < 1e-12);
  CHECK(verify_weight(j, complete_graph(5), 0.0, 1e-12).ok());

  const WeightReport id = verify_weight(Matrix::identity(4), sun_graph(4, {0}), 0.5, 1e-10);
  CHECK(id.sparsity_ok);
  CHECK(id.stochastic_ok);
  CHECK_FALSE(id.spectral_ok);
  CHECK(id.measured_beta == doctest::Approx(1.0));

  // Full weights on a star violate its sparsity.
  CHECK_FALSE(verify_weight(j, sun_graph(5, {0}), 0.0, 1e-12).sparsity_ok);
  Matrix skew = Matrix::identity(3);
  skew(0, 1) = 0.1;
  CHECK_FALSE(verify_weight(skew, complete_graph(3), 1.0, 1e-12).stochastic_ok);

  // A non-symmetric doubly stochastic matrix (cyclic permutation).
  Matrix perm(3, 3);
  perm(0, 1) = perm(1, 2) = perm(2, 0) = 1.0;
  CHECK(connectivity_measure(perm) == doctest::Approx(1.0));
  CHECK(std::abs(oracle::spectral_gap_norm(perm) - 1.0) < 1e-9);
}

TEST_CASE("construction schedules satisfy the weight contract") {
  const auto c = build_sun_sequence(8, 0.75, {0}, {7});
  const auto s = WeightSchedule::from_construction(c);
  REQUIRE(s.period() >= 1);
  for (long t = 0; t < s.period(); ++t) {
    const WeightReport rep = verify_weight(s.at(t).entries, c.sequence.graph_at(t), 0.75, 1e-10);
    CHECK(rep.ok());
    CHECK(rep.measured_beta <= 0.75 + 1e-10);
  }
  CHECK(s.at(s.period() + 1).entries == s.at(1 % s.period()).entries);
}

TEST_CASE("random-sun schedules follow their topology") {
  const auto seq = TopologySequence::random_sun(10, 2, 77);
  const auto s = WeightSchedule::from_sequence(seq);
  CHECK(s.beta() == doctest::Approx(0.8));
  for (long t : {0L, 1L, 5L, 2L, 100L}) {
    const WeightMatrix& w = s.at(t);
    CHECK(verify_weight(w.entries, seq.graph_at(t), 0.8, 1e-10).ok());
  }
}

TEST_CASE("multi-consensus") {
  std::mt19937_64 rng(4);
  const Matrix z = random_matrix(6, 4, rng);

  SUBCASE("averaging matrix") {
    WeightMatrix avg{Matrix(6, 6, 1.0 / 6), 0.0};
    const Matrix out = multi_consensus(z, std::span<const WeightMatrix>(&avg, 1));
    const Vector m = column_means(z);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t k = 0; k < 4; ++k) CHECK(out(i, k) == doctest::Approx(m[k]).epsilon(1e-14));
  }
  SUBCASE("consensus is a fixed point") {
    const Matrix same = replicate_rows(std::vector<double>{1.5, -2.0, 0.25, 3.0}, 6);
    std::vector<WeightMatrix> ws{weight_from_sun(6, {1}, 1.0), weight_from_sun(6, {2, 3}, 0.5)};
    const Matrix out = multi_consensus(same, ws);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t k = 0; k < 4; ++k) CHECK(out(i, k) == doctest::Approx(same(i, k)).epsilon(1e-15));
  }
  SUBCASE("matches dense products in round order, preserves means") {
    std::vector<WeightMatrix> ws{weight_from_sun(6, {0}, 1.0), weight_from_sun(6, {4, 5}, 0.7),
                                 weight_from_sun(6, {2}, 0.3)};
    const Matrix out = multi_consensus(z, ws);
    const Matrix expect = oracle::product(ws[2].entries, oracle::product(ws[1].entries, oracle::product(ws[0].entries, z)));
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t k = 0; k < 4; ++k) CHECK(out(i, k) == doctest::Approx(expect(i, k)).epsilon(1e-13));
    const Vector a = column_means(z), b = column_means(out);
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-12 * std::max(1.0, std::abs(a[k])));
  }
  SUBCASE("shape mismatch") {
    std::vector<WeightMatrix> ws{weight_from_sun(5, {0}, 1.0)};
    CHECK_THROWS_AS(multi_consensus(z, ws), ShapeError);
  }
}

TEST_CASE("product contraction over construction sequences") {
  const auto c = build_sun_sequence(16, 0.75, {0, 1}, {14, 15});
  const auto s = WeightSchedule::from_construction(c);
  for (long t1 : {0L, 1L, 2L}) {
    Matrix prod = Matrix::identity(16);
    for (long t = t1; t < t1 + 6; ++t) {
      prod = oracle::product(s.at(t).entries, prod);
      const double bound = std::pow(0.75, static_cast<double>(t - t1 + 1));
      CHECK(oracle::spectral_gap_norm(prod, 3000) <= bound + 1e-9);
    }
  }
}

TEST_CASE("matrix dump uses 17 significant digits") {
  Matrix m(1, 2);
  m(0, 0) = 0.1;
  m(0, 1) = -1.0 / 3.0;
  std::ostringstream os;
  write_matrix(os, m);
  CHECK(os.str() == "0.10000000000000001 -0.33333333333333331\n");
}
