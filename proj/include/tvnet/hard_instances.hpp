#pragma once

#include <span>
#include <vector>

#include "tvnet/matrix.hpp"
#include "tvnet/problems.hpp"
#include "tvnet/rng.hpp"
#include "tvnet/topology.hpp"

namespace tvnet::zero_chain {

// Constants of the base chain function h: sup-gap per coordinate,
// smoothness, and sup-norm gradient bound.
inline constexpr double kGapPerCoordinate = 12.0;
inline constexpr double kSmoothness = 152.0;
inline constexpr double kGradientBound = 23.0;

// Index (1-based) of the last nonzero coordinate; 0 for the zero vector.
// Exact comparison: subnormals count as nonzero.
int prog(std::span<const double> x);
// Maximum over the rows.
int prog(const Matrix& rows);

struct ChainComponents {
  double psi;
  double dpsi;
  double phi;
  double dphi;
};

// psi(z) = exp(1 - (2z-1)^-2) for z > 1/2, else 0;
// phi(z) = sqrt(e) * integral_{-inf}^z exp(-t^2/2) dt.
ChainComponents chain_components(double z);

enum class ChainVariant {
  H,   // full chain
  H1,  // head and even links, doubled
  H2,  // odd links, doubled
  L1,  // H1 with prefactor n / ceil(n/4) in place of 2
  L2,  // H2 with prefactor n / ceil(n/4) in place of 2
};

const char* to_string(ChainVariant v);

// Value of the chosen chain function at x; writes the exact gradient into
// `grad` (same length as x). `n` only matters for L1/L2.
double chain_value_grad(std::span<const double> x, ChainVariant variant, int n, std::span<double> grad);

// Coordinates past prog(x) are scaled by Z/p with one Z ~ Bernoulli(p) per
// call; the rest pass through.
void bernoulli_masked_oracle(std::span<const double> x, std::span<const double> exact_grad, double p, Rng& rng,
                             std::span<double> out);

// Homogeneous instance with a Bernoulli-masked oracle: every node holds
// f_i(x) = L lambda^2 h(x / lambda) / l0.
struct Instance1Spec {
  double L = 0, Delta = 0, sigma = 0;
  int n = 0;
  long T = 0;
  double lambda = 0;
  int d = 0;
  double p = 1;
};

// Throws InstanceTooSmall when the chain would be shorter than 2.
Instance1Spec make_instance1(double L, double Delta, int n, long T, double sigma);

class Instance1Problem final : public Problem {
 public:
  explicit Instance1Problem(Instance1Spec spec);
  int nodes() const override { return spec_.n; }
  std::size_t dim() const override { return static_cast<std::size_t>(spec_.d); }
  double local_value(int node, std::span<const double> x) const override;
  void local_grad(int node, std::span<const double> x, std::span<double> out) const override;
  void sample_grad(int node, std::span<const double> x, Rng& rng, std::span<double> out) const override;
  const Instance1Spec& spec() const noexcept { return spec_; }

 private:
  Instance1Spec spec_;
};

// Split instance: the first ceil(n/4) nodes hold the L1 part, the last
// ceil(n/4) the L2 part, the rest zero. Gossip runs over the sun-graph
// sequence that separates the two groups.
struct Instance2Spec {
  double L = 0, Delta = 0, beta = 0;
  int n = 0;
  long T = 0;
  NodeSet group_a;  // I1
  NodeSet group_b;  // I2
  SunSequenceConstruction construction;
  long distance = 0;          // measured effective distance between the groups
  double distance_const = 0;  // C with distance = 1 / (C (1 - beta))
  int d = 0;
  double lambda = 0;
};

// Throws InstanceTooSmall when T is below the group distance, ConfigError
// when n < 4.
Instance2Spec make_instance2(double L, double Delta, int n, double beta, long T);

class Instance2Problem final : public Problem {
 public:
  explicit Instance2Problem(Instance2Spec spec);
  int nodes() const override { return spec_.n; }
  std::size_t dim() const override { return static_cast<std::size_t>(spec_.d); }
  double local_value(int node, std::span<const double> x) const override;
  void local_grad(int node, std::span<const double> x, std::span<double> out) const override;
  // Exact gradients.
  void sample_grad(int node, std::span<const double> x, Rng& rng, std::span<double> out) const override;
  const Instance2Spec& spec() const noexcept { return spec_; }

 private:
  enum class Role { A, B, Idle };
  Role role(int node) const;
  Instance2Spec spec_;
};

struct ProgressionRow {
  long comm_rounds;
  int max_prog;
  long bound;  // floor(comm_rounds / distance) + 1
};

struct ProgressionReport {
  long distance = 0;
  std::vector<ProgressionRow> rows;
  std::vector<long> violations;  // comm_rounds values where max_prog > bound
  bool ok() const noexcept { return violations.empty(); }
};

// `max_prog[t]` is the largest prog over every vector held by any node while
// t communication rounds had completed.
ProgressionReport audit_progression(std::span<const int> max_prog, long distance);
ProgressionReport audit_progression(std::span<const int> max_prog, const TopologySequence& seq,
                                    const NodeSet& group_a, const NodeSet& group_b);

}  // namespace tvnet::zero_chain
