#include "tvnet/hard_instances.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tvnet/errors.hpp"

namespace tvnet::zero_chain {

int prog(std::span<const double> x) {
  for (std::size_t j = x.size(); j > 0; --j)
    if (x[j - 1] != 0.0) return static_cast<int>(j);
  return 0;
}

int prog(const Matrix& rows) {
  int best = 0;
  for (std::size_t i = 0; i < rows.rows(); ++i) best = std::max(best, prog(rows.row(i)));
  return best;
}

ChainComponents chain_components(double z) {
  ChainComponents c{};
  if (z > 0.5) {
    const double s = 2.0 * z - 1.0;
    c.psi = std::exp(1.0 - 1.0 / (s * s));
    c.dpsi = c.psi * 4.0 / (s * s * s);
  }
  const double sqrt_e = std::exp(0.5);
  // sqrt(e) * sqrt(2 pi) * Phi(z), with Phi(z) = erfc(-z / sqrt 2) / 2.
  c.phi = sqrt_e * std::sqrt(2.0 * std::numbers::pi) * 0.5 * std::erfc(-z / std::numbers::sqrt2);
  c.dphi = sqrt_e * std::exp(-0.5 * z * z);
  return c;
}

const char* to_string(ChainVariant v) {
  switch (v) {
    case ChainVariant::H: return "h";
    case ChainVariant::H1: return "h1";
    case ChainVariant::H2: return "h2";
    case ChainVariant::L1: return "l1";
    case ChainVariant::L2: return "l2";
  }
  return "?";
}

namespace {

struct Weights {
  double head;
  double even;  // links j = 2, 4, ... (1-based first coordinate of the link)
  double odd;
};

Weights weights_for(ChainVariant v, int n) {
  const double split = n > 0 ? static_cast<double>(n) / ((n + 3) / 4) : 0.0;
  switch (v) {
    case ChainVariant::H: return {1.0, 1.0, 1.0};
    case ChainVariant::H1: return {2.0, 2.0, 0.0};
    case ChainVariant::H2: return {0.0, 0.0, 2.0};
    case ChainVariant::L1:
      if (n < 1) throw ConfigError("split chain variants need n >= 1");
      return {split, split, 0.0};
    case ChainVariant::L2:
      if (n < 1) throw ConfigError("split chain variants need n >= 1");
      return {0.0, 0.0, split};
  }
  return {};
}

}  // namespace

double chain_value_grad(std::span<const double> x, ChainVariant variant, int n, std::span<double> grad) {
  if (grad.size() != x.size()) throw ShapeError("gradient buffer has wrong length");
  std::fill(grad.begin(), grad.end(), 0.0);
  if (x.empty()) return 0.0;
  const Weights w = weights_for(variant, n);
  double value = 0.0;

  if (w.head != 0.0) {
    // psi(1) = 1
    const ChainComponents c = chain_components(x[0]);
    value -= w.head * c.phi;
    grad[0] -= w.head * c.dphi;
  }
  for (std::size_t j = 0; j + 1 < x.size(); ++j) {
    // 0-based j is the 1-based link j + 1.
    const double coef = ((j + 1) % 2 == 0) ? w.even : w.odd;
    if (coef == 0.0) continue;
    const ChainComponents pos = chain_components(x[j]);
    const ChainComponents neg = chain_components(-x[j]);
    const ChainComponents next_pos = chain_components(x[j + 1]);
    const ChainComponents next_neg = chain_components(-x[j + 1]);
    value += coef * (neg.psi * next_neg.phi - pos.psi * next_pos.phi);
    grad[j] += coef * (-neg.dpsi * next_neg.phi - pos.dpsi * next_pos.phi);
    grad[j + 1] += coef * (-neg.psi * next_neg.dphi - pos.psi * next_pos.dphi);
  }
  return value;
}

void bernoulli_masked_oracle(std::span<const double> x, std::span<const double> exact_grad, double p, Rng& rng,
                             std::span<double> out) {
  if (!(p > 0.0 && p <= 1.0)) throw OutOfRange("Bernoulli parameter must lie in (0, 1]");
  const std::size_t frontier = static_cast<std::size_t>(prog(x));
  std::bernoulli_distribution coin(p);
  const double scale = coin(rng) ? 1.0 / p : 0.0;
  for (std::size_t j = 0; j < exact_grad.size(); ++j) out[j] = j < frontier ? exact_grad[j] : exact_grad[j] * scale;
}

Instance1Spec make_instance1(double L, double Delta, int n, long T, double sigma) {
  if (!(L > 0 && Delta > 0 && sigma > 0) || n < 1 || T < 1) throw ConfigError("instance parameters must be positive");
  const double l0 = kSmoothness, d0 = kGapPerCoordinate, g = kGradientBound;
  Instance1Spec s;
  s.L = L;
  s.Delta = Delta;
  s.n = n;
  s.T = T;
  s.sigma = sigma;
  const double chain = 3.0 * L * Delta * n * static_cast<double>(T) * g * g / (sigma * sigma * l0 * d0);
  s.d = static_cast<int>(std::floor(std::sqrt(chain)));
  if (s.d < 2) {
    const double t_min = 4.0 * sigma * sigma * l0 * d0 / (3.0 * L * Delta * n * g * g);
    throw InstanceTooSmall("chain length " + std::to_string(s.d) + " < 2; need T >= " + std::to_string(std::ceil(t_min)));
  }
  s.lambda = (l0 / L) * std::pow(Delta * L * sigma * sigma / (3.0 * n * static_cast<double>(T) * l0 * d0 * g * g), 0.25);
  s.p = std::min(L * L * s.lambda * s.lambda * g * g / (l0 * l0 * sigma * sigma), 1.0);
  const double budget = l0 * Delta / (L * d0);
  if (s.d * s.lambda * s.lambda > budget * (1.0 + 1e-12))
    throw ConfigError("instance violates the function-gap budget");
  return s;
}

Instance1Problem::Instance1Problem(Instance1Spec spec) : spec_(spec) {}

double Instance1Problem::local_value(int, std::span<const double> x) const {
  std::vector<double> scaled(x.size()), g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) scaled[j] = x[j] / spec_.lambda;
  return spec_.L * spec_.lambda * spec_.lambda * chain_value_grad(scaled, ChainVariant::H, 0, g) / kSmoothness;
}

void Instance1Problem::local_grad(int, std::span<const double> x, std::span<double> out) const {
  std::vector<double> scaled(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) scaled[j] = x[j] / spec_.lambda;
  chain_value_grad(scaled, ChainVariant::H, 0, out);
  const double scale = spec_.L * spec_.lambda / kSmoothness;
  for (double& v : out) v *= scale;
}

void Instance1Problem::sample_grad(int node, std::span<const double> x, Rng& rng, std::span<double> out) const {
  std::vector<double> exact(x.size());
  local_grad(node, x, exact);
  bernoulli_masked_oracle(x, exact, spec_.p, rng, out);
}

Instance2Spec make_instance2(double L, double Delta, int n, double beta, long T) {
  if (n < 4) throw ConfigError("split instance needs n >= 4 so the node groups are nonempty and disjoint");
  if (!(L > 0 && Delta > 0)) throw ConfigError("instance parameters must be positive");
  Instance2Spec s;
  s.L = L;
  s.Delta = Delta;
  s.n = n;
  s.beta = beta;
  s.T = T;
  const int q = (n + 3) / 4;
  for (int i = 0; i < q; ++i) s.group_a.push_back(i);
  for (int i = n - q; i < n; ++i) s.group_b.push_back(i);
  s.construction = build_sun_sequence(n, beta, s.group_a, s.group_b);
  const Rounds dist = effective_distance(s.construction.sequence, s.group_a, s.group_b);
  if (!dist) throw ConfigError("node groups are unreachable over the constructed sequence");
  s.distance = *dist;
  s.distance_const = 1.0 / (static_cast<double>(s.distance) * (1.0 - beta));
  if (T < s.distance)
    throw InstanceTooSmall("T = " + std::to_string(T) + " is below the group distance " + std::to_string(s.distance));
  s.d = static_cast<int>(T / s.distance) + 2;
  const double l0 = kSmoothness, d0 = kGapPerCoordinate;
  s.lambda = (l0 / L) * std::sqrt(2.0 * Delta * L * static_cast<double>(s.distance) / (3.0 * static_cast<double>(T) * l0 * d0));
  if (s.d * s.lambda * s.lambda > 2.0 * l0 * Delta / (L * d0) * (1.0 + 1e-12))
    throw ConfigError("instance violates the function-gap budget");
  return s;
}

Instance2Problem::Instance2Problem(Instance2Spec spec) : spec_(std::move(spec)) {}

Instance2Problem::Role Instance2Problem::role(int node) const {
  if (std::binary_search(spec_.group_a.begin(), spec_.group_a.end(), node)) return Role::A;
  if (std::binary_search(spec_.group_b.begin(), spec_.group_b.end(), node)) return Role::B;
  return Role::Idle;
}

double Instance2Problem::local_value(int node, std::span<const double> x) const {
  const Role r = role(node);
  if (r == Role::Idle) return 0.0;
  std::vector<double> scaled(x.size()), g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) scaled[j] = x[j] / spec_.lambda;
  const double v = chain_value_grad(scaled, r == Role::A ? ChainVariant::L1 : ChainVariant::L2, spec_.n, g);
  return spec_.L * spec_.lambda * spec_.lambda * v / (2.0 * kSmoothness);
}

void Instance2Problem::local_grad(int node, std::span<const double> x, std::span<double> out) const {
  const Role r = role(node);
  if (r == Role::Idle) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  std::vector<double> scaled(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) scaled[j] = x[j] / spec_.lambda;
  chain_value_grad(scaled, r == Role::A ? ChainVariant::L1 : ChainVariant::L2, spec_.n, out);
  const double scale = spec_.L * spec_.lambda / (2.0 * kSmoothness);
  for (double& v : out) v *= scale;
}

void Instance2Problem::sample_grad(int node, std::span<const double> x, Rng&, std::span<double> out) const {
  local_grad(node, x, out);
}

ProgressionReport audit_progression(std::span<const int> max_prog, long distance) {
  if (distance < 1) throw ConfigError("distance must be at least one round");
  ProgressionReport report;
  report.distance = distance;
  report.rows.reserve(max_prog.size());
  for (std::size_t t = 0; t < max_prog.size(); ++t) {
    const long rounds = static_cast<long>(t);
    const ProgressionRow row{rounds, max_prog[t], rounds / distance + 1};
    if (row.max_prog > row.bound) report.violations.push_back(rounds);
    report.rows.push_back(row);
  }
  return report;
}

ProgressionReport audit_progression(std::span<const int> max_prog, const TopologySequence& seq, const NodeSet& group_a,
                                    const NodeSet& group_b) {
  const Rounds dist = effective_distance(seq, group_a, group_b);
  if (!dist) throw ConfigError("node groups are unreachable over the sequence");
  return audit_progression(max_prog, *dist);
}

}  // namespace tvnet::zero_chain
