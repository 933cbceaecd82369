#include "tvnet/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

#include "tvnet/errors.hpp"
#include "tvnet/rng.hpp"

namespace tvnet {

NodeSet make_node_set(std::vector<int> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

NodeSet all_nodes(int n) {
  NodeSet s(static_cast<std::size_t>(n));
  std::iota(s.begin(), s.end(), 0);
  return s;
}

NodeSet parse_node_set(const std::string& text) {
  std::vector<int> nodes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      const auto dash = item.find('-');
      if (dash != std::string::npos && dash > 0) {
        const int lo = std::stoi(item.substr(0, dash));
        const int hi = std::stoi(item.substr(dash + 1));
        if (lo < 1 || hi < lo) throw ConfigError("bad node range '" + item + "'");
        for (int v = lo; v <= hi; ++v) nodes.push_back(v - 1);
      } else {
        const int v = std::stoi(item);
        if (v < 1) throw ConfigError("node indices are 1-based, got '" + item + "'");
        nodes.push_back(v - 1);
      }
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const ConfigError*>(&e) != nullptr) throw;
      throw ConfigError("cannot parse node '" + item + "'");
    }
  }
  return make_node_set(std::move(nodes));
}

std::string format_node_set(const NodeSet& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s[i] + 1);
  }
  return out;
}

Graph::Graph(int n) : n_(n), adj_(static_cast<std::size_t>(n) * n, 0) {
  for (int i = 0; i < n; ++i) adj_[static_cast<std::size_t>(i) * n + i] = 1;
}

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  Graph g(n);
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) throw ShapeError("edge endpoint outside [0, n)");
    g.connect(i, j);
  }
  return g;
}

void Graph::connect(int i, int j) {
  adj_[static_cast<std::size_t>(i) * n_ + j] = 1;
  adj_[static_cast<std::size_t>(j) * n_ + i] = 1;
}

NodeSet Graph::neighbors(int i) const {
  NodeSet out;
  for (int j = 0; j < n_; ++j)
    if (adjacent(i, j)) out.push_back(j);
  return out;
}

namespace {

void check_centers(int n, const NodeSet& centers) {
  if (n < 2) throw ConfigError("sun graph needs n >= 2");
  if (centers.empty()) throw InvalidCenterSet("center set is empty");
  for (int c : centers)
    if (c < 0 || c >= n) throw InvalidCenterSet("center " + std::to_string(c + 1) + " outside [1, n]");
}

void check_groups(int n, const NodeSet& a, const NodeSet& b) {
  if (a.empty() || b.empty()) throw InvalidNodeSets("node sets must be nonempty");
  for (const NodeSet* s : {&a, &b})
    for (int v : *s)
      if (v < 0 || v >= n) throw InvalidNodeSets("node " + std::to_string(v + 1) + " outside [1, n]");
  NodeSet common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  if (!common.empty()) throw InvalidNodeSets("node sets must be disjoint");
}

// N_{S_{n,C}}(reach): everything when reach touches C, otherwise reach + C.
void expand_sun(const NodeSet& centers, std::vector<char>& reach) {
  const bool touches = std::any_of(centers.begin(), centers.end(), [&](int c) { return reach[c] != 0; });
  if (touches) {
    std::fill(reach.begin(), reach.end(), 1);
  } else {
    for (int c : centers) reach[c] = 1;
  }
}

void expand_graph(const Graph& g, std::vector<char>& reach) {
  std::vector<char> next(reach);
  for (int i = 0; i < g.n(); ++i) {
    if (!reach[i]) continue;
    for (int j = 0; j < g.n(); ++j)
      if (g.adjacent(i, j)) next[j] = 1;
  }
  reach.swap(next);
}

NodeSet random_centers(int n, int size, std::uint64_t seed, long t) {
  Rng rng(stream_seed(seed, 0x5u, static_cast<std::uint64_t>(t)));
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  // Partial Fisher-Yates: the first `size` entries are a uniform subset.
  for (int i = 0; i < size; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(static_cast<std::size_t>(size));
  return make_node_set(std::move(pool));
}

}  // namespace

Graph sun_graph(int n, const NodeSet& centers) {
  check_centers(n, centers);
  Graph g(n);
  for (int c : centers)
    for (int j = 0; j < n; ++j) g.connect(c, j);
  return g;
}

Graph complete_graph(int n) { return sun_graph(n, all_nodes(n)); }

NodeSet neighborhood(const Graph& g, const NodeSet& nodes) {
  std::vector<char> reach(static_cast<std::size_t>(g.n()), 0);
  for (int v : nodes) reach[v] = 1;
  expand_graph(g, reach);
  NodeSet out;
  for (int j = 0; j < g.n(); ++j)
    if (reach[j]) out.push_back(j);
  return out;
}

TopologySequence TopologySequence::fixed(Graph g) {
  TopologySequence s;
  s.n_ = g.n();
  s.kind_ = SequenceKind::Static;
  s.graphs_.push_back(std::move(g));
  return s;
}

TopologySequence TopologySequence::fixed_sun(int n, NodeSet centers) {
  TopologySequence s = fixed(sun_graph(n, centers));
  s.centers_.push_back(std::move(centers));
  s.center_size_ = static_cast<int>(s.centers_.front().size());
  return s;
}

TopologySequence TopologySequence::sun_cycle(int n, std::vector<NodeSet> centers) {
  if (centers.empty()) throw InvalidCenterSet("sun cycle needs at least one center set");
  TopologySequence s;
  s.n_ = n;
  s.kind_ = SequenceKind::SunCycle;
  for (auto& c : centers) {
    c = make_node_set(std::move(c));
    s.graphs_.push_back(sun_graph(n, c));
  }
  s.centers_ = std::move(centers);
  s.center_size_ = static_cast<int>(s.centers_.front().size());
  return s;
}

TopologySequence TopologySequence::random_sun(int n, int center_size, std::uint64_t seed) {
  if (n < 2) throw ConfigError("sun graph needs n >= 2");
  if (center_size < 1 || center_size > n)
    throw InvalidCenterSet("center size must lie in [1, n], got " + std::to_string(center_size));
  TopologySequence s;
  s.n_ = n;
  s.kind_ = SequenceKind::RandomSun;
  s.center_size_ = center_size;
  s.seed_ = seed;
  return s;
}

std::optional<NodeSet> TopologySequence::centers_at(long t) const {
  if (kind_ == SequenceKind::RandomSun) return random_centers(n_, center_size_, seed_, t);
  if (centers_.empty()) return std::nullopt;
  return centers_[static_cast<std::size_t>(t % period())];
}

Graph TopologySequence::graph_at(long t) const {
  if (kind_ == SequenceKind::RandomSun) return sun_graph(n_, random_centers(n_, center_size_, seed_, t));
  return graphs_[static_cast<std::size_t>(t % period())];
}

void TopologySequence::expand(long t, std::vector<char>& reach) const {
  if (kind_ == SequenceKind::RandomSun) {
    expand_sun(random_centers(n_, center_size_, seed_, t), reach);
  } else if (!centers_.empty()) {
    expand_sun(centers_[static_cast<std::size_t>(t % period())], reach);
  } else {
    expand_graph(graphs_[static_cast<std::size_t>(t % period())], reach);
  }
}

std::string TopologySequence::export_centers(long rounds) const {
  std::string out;
  for (long t = 0; t < rounds; ++t) {
    auto c = centers_at(t);
    out += std::to_string(t) + ": " + (c ? format_node_set(*c) : std::string("-")) + "\n";
  }
  return out;
}

namespace {

struct Limits {
  long cap;
  long window;
};

Limits resolve(const TopologySequence& seq, const DistanceOptions& opts) {
  const long p = seq.period();
  Limits lim{};
  lim.cap = opts.cap > 0 ? opts.cap : 4L * seq.n() * std::max(p, 1L);
  lim.window = opts.start_window > 0 ? opts.start_window : (p > 0 ? p : seq.n());
  return lim;
}

// First round R (1-based) at which each node is reached from `source` when
// communication starts at round t; -1 if not reached within the cap.
std::vector<long> first_hits(const TopologySequence& seq, const NodeSet& source, long t, long cap,
                             ExpansionOrder order) {
  const int n = seq.n();
  std::vector<long> hit(static_cast<std::size_t>(n), -1);
  int remaining = n;
  if (order == ExpansionOrder::Forward) {
    std::vector<char> reach(static_cast<std::size_t>(n), 0);
    for (int v : source) reach[v] = 1;
    for (long r = 1; r <= cap && remaining > 0; ++r) {
      seq.expand(t + r - 1, reach);
      for (int j = 0; j < n; ++j)
        if (reach[j] && hit[j] < 0) {
          hit[j] = r;
          --remaining;
        }
    }
    return hit;
  }
  for (long r = 1; r <= cap && remaining > 0; ++r) {
    std::vector<char> reach(static_cast<std::size_t>(n), 0);
    for (int v : source) reach[v] = 1;
    for (long s = t + r - 1; s >= t; --s) seq.expand(s, reach);
    for (int j = 0; j < n; ++j)
      if (reach[j] && hit[j] < 0) {
        hit[j] = r;
        --remaining;
      }
  }
  return hit;
}

long directional(const TopologySequence& seq, const NodeSet& from, const NodeSet& to, const Limits& lim,
                 ExpansionOrder order) {
  long best = -1;
  for (long t = 0; t < lim.window; ++t) {
    const auto hit = first_hits(seq, from, t, best > 0 ? std::min(best, lim.cap) : lim.cap, order);
    for (int j : to)
      if (hit[j] > 0 && (best < 0 || hit[j] < best)) best = hit[j];
    if (best == 1) break;
  }
  return best;
}

}  // namespace

Rounds effective_distance(const TopologySequence& seq, const NodeSet& from, const NodeSet& to,
                          const DistanceOptions& opts) {
  check_groups(seq.n(), from, to);
  const Limits lim = resolve(seq, opts);
  const long ab = directional(seq, from, to, lim, opts.order);
  const long ba = directional(seq, to, from, lim, opts.order);
  if (ab < 0 || ba < 0) return std::nullopt;
  return std::max(ab, ba);
}

Rounds effective_diameter(const TopologySequence& seq, const DistanceOptions& opts) {
  const int n = seq.n();
  if (n < 2) throw ConfigError("effective diameter needs n >= 2");
  const Limits lim = resolve(seq, opts);
  // best[i][j]: min over start rounds of the first round i's message reaches j.
  std::vector<long> best(static_cast<std::size_t>(n) * n, -1);
  for (int i = 0; i < n; ++i) {
    for (long t = 0; t < lim.window; ++t) {
      const auto hit = first_hits(seq, NodeSet{i}, t, lim.cap, opts.order);
      for (int j = 0; j < n; ++j) {
        long& b = best[static_cast<std::size_t>(i) * n + j];
        if (hit[j] > 0 && (b < 0 || hit[j] < b)) b = hit[j];
      }
    }
  }
  long diameter = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const long ij = best[static_cast<std::size_t>(i) * n + j];
      const long ji = best[static_cast<std::size_t>(j) * n + i];
      if (ij < 0 || ji < 0) return std::nullopt;
      diameter = std::max({diameter, ij, ji});
    }
  return diameter;
}

Rounds bfs_distance(const Graph& g, const NodeSet& from, const NodeSet& to) {
  std::vector<long> dist(static_cast<std::size_t>(g.n()), -1);
  std::deque<int> queue;
  for (int v : from) {
    dist[v] = 0;
    queue.push_back(v);
  }
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v = 0; v < g.n(); ++v)
      if (g.adjacent(u, v) && dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
  }
  long best = -1;
  for (int v : to)
    if (dist[v] >= 0 && (best < 0 || dist[v] < best)) best = dist[v];
  if (best < 0) return std::nullopt;
  return best;
}

SunSequenceConstruction build_sun_sequence(int n, double beta, const NodeSet& group_a, const NodeSet& group_b) {
  if (n < 2) throw ConfigError("construction needs n >= 2");
  const double beta_max = 1.0 - 1.0 / n;
  if (!(beta >= 0.0) || beta > beta_max + 1e-12)
    throw OutOfRange("beta must lie in [0, 1 - 1/n] = [0, " + std::to_string(beta_max) + "], got " +
                     std::to_string(beta));
  const NodeSet a = make_node_set(group_a);
  const NodeSet b = make_node_set(group_b);
  check_groups(n, a, b);

  SunSequenceConstruction c;
  c.n = n;
  c.beta = beta;
  c.group_a = a;
  c.group_b = b;

  // n (1 - beta), snapped to an integer when within rounding noise of one.
  double mass = n * (1.0 - beta);
  if (std::abs(mass - std::round(mass)) <= 1e-9 * std::max(1.0, mass)) mass = std::round(mass);
  c.k = std::clamp(static_cast<int>(std::ceil(mass)), 1, n);
  c.delta = mass / c.k;

  const int outside = n - static_cast<int>(a.size() + b.size());
  if (outside == 0 || c.k == n) {
    c.uniform_weights = true;
    c.center_sets = {all_nodes(n)};
    c.sequence = TopologySequence::fixed_sun(n, all_nodes(n));
    c.predicted_distance = 1;
    return c;
  }

  NodeSet rest;
  for (int v = 0; v < n; ++v)
    if (!std::binary_search(a.begin(), a.end(), v) && !std::binary_search(b.begin(), b.end(), v))
      rest.push_back(v);

  const int p = outside / c.k;
  if (p == 0) {
    // Fewer than k free nodes: any k-subset meets one of the groups, which
    // puts the groups one round apart.
    NodeSet centers(rest);
    for (int v = 0; v < n && static_cast<int>(centers.size()) < c.k; ++v)
      if (!std::binary_search(rest.begin(), rest.end(), v)) centers.push_back(v);
    c.center_sets = {make_node_set(std::move(centers))};
  } else {
    for (int q = 0; q < p; ++q)
      c.center_sets.emplace_back(rest.begin() + q * c.k, rest.begin() + (q + 1) * c.k);
  }
  c.sequence = TopologySequence::sun_cycle(n, c.center_sets);
  c.predicted_distance = p + 1;
  return c;
}

}  // namespace tvnet
