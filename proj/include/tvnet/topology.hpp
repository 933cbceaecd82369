#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tvnet {

// Sorted list of distinct 0-based node indices. Text interfaces use 1-based
// indices; conversion happens at the edges (parse_node_set / format_node_set).
using NodeSet = std::vector<int>;

NodeSet make_node_set(std::vector<int> nodes);
NodeSet all_nodes(int n);
// "1,3,5" or "1-4" ranges, 1-based.
NodeSet parse_node_set(const std::string& text);
std::string format_node_set(const NodeSet& s);

// Undirected graph on n nodes. neighbors(i) always contains i.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n);

  static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges);

  int n() const noexcept { return n_; }
  bool adjacent(int i, int j) const { return adj_[static_cast<std::size_t>(i) * n_ + j] != 0; }
  NodeSet neighbors(int i) const;
  bool operator==(const Graph&) const = default;

  void connect(int i, int j);

 private:
  int n_ = 0;
  std::vector<std::uint8_t> adj_;
};

// S_{n,C}: centers adjacent to everyone, non-centers adjacent to the centers.
Graph sun_graph(int n, const NodeSet& centers);

Graph complete_graph(int n);

// Union of the neighborhoods of the nodes in `nodes`.
NodeSet neighborhood(const Graph& g, const NodeSet& nodes);

enum class SequenceKind { Static, SunCycle, RandomSun };

// Graph at round t of a (possibly periodic) communication schedule.
class TopologySequence {
 public:
  static TopologySequence fixed(Graph g);
  static TopologySequence fixed_sun(int n, NodeSet centers);
  static TopologySequence sun_cycle(int n, std::vector<NodeSet> centers);
  // Center set at round t is a uniformly random subset of size `center_size`
  // drawn from a stream keyed by (seed, t).
  static TopologySequence random_sun(int n, int center_size, std::uint64_t seed);

  int n() const noexcept { return n_; }
  SequenceKind kind() const noexcept { return kind_; }
  // 0 for aperiodic (random) sequences.
  long period() const noexcept { return static_cast<long>(graphs_.size()); }
  int center_size() const noexcept { return center_size_; }

  Graph graph_at(long t) const;
  // Center set of the sun graph at round t; nullopt for plain static graphs.
  std::optional<NodeSet> centers_at(long t) const;

  // Neighborhood of `reach` in the graph of round t, as a membership mask.
  void expand(long t, std::vector<char>& reach) const;

  // One line per round, "t: c1,c2,...", 1-based centers.
  std::string export_centers(long rounds) const;

 private:
  TopologySequence() = default;

  int n_ = 0;
  SequenceKind kind_ = SequenceKind::Static;
  std::vector<Graph> graphs_;
  std::vector<NodeSet> centers_;
  int center_size_ = 0;
  std::uint64_t seed_ = 0;
};

enum class ExpansionOrder {
  // Expand with G^t first, then G^{t+1}, ... (message propagation).
  Forward,
  // N_{G^t}(N_{G^{t+1}}(... N_{G^{t+R-1}}(I) ...)), innermost latest.
  Nested,
};

struct DistanceOptions {
  ExpansionOrder order = ExpansionOrder::Forward;
  // Maximum rounds to simulate; 0 selects 4 * n * max(period, 1).
  long cap = 0;
  // Start rounds t in [0, start_window) to minimize over; 0 selects the
  // period (or n for aperiodic sequences).
  long start_window = 0;
};

// Effective distance in rounds; nullopt means unreachable within the cap.
using Rounds = std::optional<long>;

Rounds effective_distance(const TopologySequence& seq, const NodeSet& from, const NodeSet& to,
                          const DistanceOptions& opts = {});

Rounds effective_diameter(const TopologySequence& seq, const DistanceOptions& opts = {});

// Graph distance by breadth-first search, for static graphs.
Rounds bfs_distance(const Graph& g, const NodeSet& from, const NodeSet& to);

// Sun-graph sequence with connectivity beta and a prescribed distance
// between two disjoint node groups.
struct SunSequenceConstruction {
  int n = 0;
  double beta = 0.0;
  NodeSet group_a;
  NodeSet group_b;
  int k = 0;           // ceil(n (1 - beta))
  double delta = 1.0;  // n (1 - beta) / k
  // True when every round is the complete graph with weights
  // beta I + (1 - beta)/n 11^T (degenerate cases).
  bool uniform_weights = false;
  std::vector<NodeSet> center_sets;
  TopologySequence sequence = TopologySequence::fixed(complete_graph(2));
  long predicted_distance = 1;
};

// Throws OutOfRange unless 0 <= beta <= 1 - 1/n, InvalidNodeSets unless the
// groups are nonempty, disjoint and inside [0, n).
SunSequenceConstruction build_sun_sequence(int n, double beta, const NodeSet& group_a,
                                           const NodeSet& group_b);

}  // namespace tvnet
