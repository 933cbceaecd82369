#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tvnet/errors.hpp"
#include "tvnet/topology.hpp"

using namespace tvnet;

namespace {

NodeSet one_based(std::initializer_list<int> nodes) {
  NodeSet s;
  for (int v : nodes) s.push_back(v - 1);
  return s;
}

}  // namespace

TEST_CASE("sun graph neighborhoods") {
  SUBCASE("star") {
    const Graph g = sun_graph(8, one_based({1}));
    CHECK(g.neighbors(0) == all_nodes(8));
    for (int i = 1; i < 8; ++i) CHECK(g.neighbors(i) == NodeSet{0, i});
  }
  SUBCASE("all centers is complete") { CHECK(sun_graph(8, all_nodes(8)) == complete_graph(8)); }
  SUBCASE("two centers") {
    const Graph g = sun_graph(4, one_based({1, 2}));
    CHECK(g.neighbors(2) == one_based({1, 2, 3}));
    CHECK(g.neighbors(3) == one_based({1, 2, 4}));
    CHECK(g.neighbors(0) == all_nodes(4));
    CHECK(g.neighbors(1) == all_nodes(4));
  }
  SUBCASE("invariants") {
    const Graph g = sun_graph(9, one_based({2, 5}));
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) {
        if (i == j) CHECK(g.adjacent(i, j));
        CHECK(g.adjacent(i, j) == g.adjacent(j, i));
      }
  }
  CHECK_THROWS_AS(sun_graph(4, {}), InvalidCenterSet);
  CHECK_THROWS_AS(sun_graph(4, {4}), InvalidCenterSet);
}

TEST_CASE("node-set text round trip") {
  CHECK(parse_node_set("1,3,5-7") == NodeSet{0, 2, 4, 5, 6});
  CHECK(format_node_set(NodeSet{0, 2, 4}) == "1,3,5");
  CHECK_THROWS_AS(parse_node_set("0"), ConfigError);
  CHECK_THROWS_AS(parse_node_set("a"), ConfigError);
}

TEST_CASE("neighborhood") {
  const Graph star = sun_graph(8, one_based({1}));
  CHECK(neighborhood(star, one_based({3})) == one_based({1, 3}));
  CHECK(neighborhood(star, one_based({1})) == all_nodes(8));
  CHECK(neighborhood(sun_graph(8, one_based({1, 2})), one_based({3, 4})) == one_based({1, 2, 3, 4}));

  std::mt19937_64 rng(3);
  const Graph g = sun_graph(10, one_based({4, 7}));
  for (int trial = 0; trial < 200; ++trial) {
    NodeSet small, big;
    for (int i = 0; i < 10; ++i) {
      const unsigned r = rng() % 3;
      if (r == 0) small.push_back(i);
      if (r <= 1) big.push_back(i);
    }
    const NodeSet a = neighborhood(g, small), b = neighborhood(g, big);
    for (int v : small) CHECK(std::binary_search(a.begin(), a.end(), v));
    for (int v : a) CHECK(std::binary_search(b.begin(), b.end(), v));
  }
}

TEST_CASE("effective distance on static graphs") {
  CHECK(effective_distance(TopologySequence::fixed(complete_graph(5)), {0}, {1}) == 1);
  const Graph path = Graph::from_edges(3, {{0, 1}, {1, 2}});
  CHECK(effective_distance(TopologySequence::fixed(path), {0}, {2}) == 2);
  CHECK(effective_diameter(TopologySequence::fixed(complete_graph(6))) == 1);
  CHECK(effective_diameter(TopologySequence::fixed(sun_graph(8, {0}))) == 2);

  SUBCASE("matches breadth-first search on random graphs") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 60; ++trial) {
      const int n = 3 + static_cast<int>(rng() % 8);
      std::vector<std::pair<int, int>> edges;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (rng() % 4 == 0) edges.emplace_back(i, j);
      const Graph g = Graph::from_edges(n, edges);
      const auto seq = TopologySequence::fixed(g);
      const NodeSet a{0}, b{n - 1};
      CHECK(effective_distance(seq, a, b) == bfs_distance(g, a, b));
    }
  }
  SUBCASE("disconnected") {
    const Graph g = Graph::from_edges(4, {{0, 1}, {2, 3}});
    CHECK_FALSE(effective_distance(TopologySequence::fixed(g), {0}, {3}).has_value());
    CHECK_FALSE(effective_diameter(TopologySequence::fixed(g)).has_value());
  }
}

TEST_CASE("effective distance and diameter match brute-force reachability") {
  SUBCASE("cycling single centers") {
    std::vector<NodeSet> centers;
    for (int c = 0; c < 6; ++c) centers.push_back({c});
    const auto seq = TopologySequence::sun_cycle(8, centers);
    const auto expected = oracle::diameter(seq, seq.period(), 4 * 8 * seq.period());
    REQUIRE(expected.has_value());
    CHECK(effective_diameter(seq) == expected);
  }
  SUBCASE("random sun cycles, both expansion orders") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
      const int n = 4 + static_cast<int>(rng() % 6);
      const int period = 1 + static_cast<int>(rng() % 4);
      std::vector<NodeSet> centers;
      for (int p = 0; p < period; ++p) {
        NodeSet c;
        for (int i = 0; i < n; ++i)
          if (rng() % 4 == 0) c.push_back(i);
        if (c.empty()) c.push_back(static_cast<int>(rng() % n));
        centers.push_back(c);
      }
      const auto seq = TopologySequence::sun_cycle(n, centers);
      const NodeSet a{0}, b{n - 1};
      const auto expected = oracle::distance(seq, a, b, period, 4L * n * period);
      CHECK(effective_distance(seq, a, b) == expected);
      DistanceOptions nested;
      nested.order = ExpansionOrder::Nested;
      CHECK(effective_distance(seq, a, b, nested) == expected);
    }
  }
  SUBCASE("random sun sequence over a window") {
    const auto seq = TopologySequence::random_sun(7, 1, 42);
    DistanceOptions opts;
    opts.start_window = 5;
    opts.cap = 60;
    CHECK(effective_distance(seq, {0}, {6}, opts) == oracle::distance(seq, {0}, {6}, 5, 60));
  }
}

TEST_CASE("random sun sequences are reproducible") {
  const auto a = TopologySequence::random_sun(16, 3, 5), b = TopologySequence::random_sun(16, 3, 5);
  const auto c = TopologySequence::random_sun(16, 3, 6);
  bool differs = false;
  for (long t = 0; t < 50; ++t) {
    const auto ca = a.centers_at(t);
    REQUIRE(ca.has_value());
    CHECK(ca->size() == 3u);
    CHECK(ca == b.centers_at(t));
    differs = differs || ca != c.centers_at(t);
  }
  CHECK(differs);
  CHECK(a.period() == 0);
}

TEST_CASE("center export format") {
  const auto seq = TopologySequence::sun_cycle(5, {{0}, {1, 2}});
  CHECK(seq.export_centers(3) == "0: 1\n1: 2,3\n2: 1\n");
}

TEST_CASE("sun-sequence construction examples") {
  SUBCASE("n=8, beta=1/2") {
    const auto c = build_sun_sequence(8, 0.5, one_based({1}), one_based({8}));
    CHECK(c.k == 4);
    CHECK(c.delta == doctest::Approx(1.0));
    CHECK(c.center_sets.size() == 1u);
    CHECK(c.center_sets[0] == one_based({2, 3, 4, 5}));
    CHECK(c.predicted_distance == 2);
    CHECK(effective_distance(c.sequence, c.group_a, c.group_b) == 2);
  }
  SUBCASE("n=8, beta=7/8") {
    const auto c = build_sun_sequence(8, 7.0 / 8.0, one_based({1}), one_based({8}));
    CHECK(c.k == 1);
    CHECK(c.center_sets.size() == 6u);
    CHECK(c.predicted_distance == 7);
    CHECK(effective_distance(c.sequence, c.group_a, c.group_b) == 7);
    CHECK(oracle::distance(c.sequence, c.group_a, c.group_b, 6, 200) == 7);
  }
  SUBCASE("groups cover every node") {
    const auto c = build_sun_sequence(4, 0.0, one_based({1}), one_based({2, 3, 4}));
    CHECK(c.uniform_weights);
    CHECK(c.predicted_distance == 1);
    CHECK(effective_distance(c.sequence, c.group_a, c.group_b) == 1);
  }
  SUBCASE("too few free nodes for one center set") {
    const auto c = build_sun_sequence(4, 0.25, one_based({1}), one_based({4}));
    CHECK(c.k == 3);
    CHECK(effective_distance(c.sequence, c.group_a, c.group_b) == c.predicted_distance);
  }
  CHECK_THROWS_AS(build_sun_sequence(8, 0.99, {0}, {7}), OutOfRange);
  CHECK_THROWS_AS(build_sun_sequence(8, -0.1, {0}, {7}), OutOfRange);
  CHECK_THROWS_AS(build_sun_sequence(8, 0.5, {0, 1}, {1}), InvalidNodeSets);
  CHECK_THROWS_AS(build_sun_sequence(8, 0.5, {}, {1}), InvalidNodeSets);
}

TEST_CASE("sun-sequence distance formula and sandwich bounds") {
  for (int n : {4, 5, 6, 8, 10, 12}) {
    for (int kk = 1; kk < n; ++kk) {
      const double beta = 1.0 - static_cast<double>(kk) / n;
      for (int a = 1; a <= n / 3; ++a)
        for (int b = 1; a + b < n && b <= n / 3; ++b) {
          NodeSet ga, gb;
          for (int i = 0; i < a; ++i) ga.push_back(i);
          for (int i = n - b; i < n; ++i) gb.push_back(i);
          const auto c = build_sun_sequence(n, beta, ga, gb);
          const auto measured = effective_distance(c.sequence, ga, gb);
          REQUIRE(measured.has_value());
          const long free = n - a - b;
          if (!c.uniform_weights && free >= c.k) {
            CHECK(*measured == free / c.k + 1);
            DistanceOptions nested;
            nested.order = ExpansionOrder::Nested;
            CHECK(effective_distance(c.sequence, ga, gb, nested) == measured);
          }
          const double gap = 1.0 - beta;
          CHECK(static_cast<double>(free) / (2.0 * n * gap) + 1.0 <= *measured + 1.0 + 1e-9);
          CHECK(static_cast<double>(*measured) <= static_cast<double>(free) / (n * gap) + 1.0 + 1e-9);
        }
    }
  }
}
