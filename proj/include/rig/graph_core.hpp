#ifndef RIG_GRAPH_CORE_HPP
#define RIG_GRAPH_CORE_HPP

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

#include <rig/rng.hpp>
#include <rig/weights.hpp>

namespace rig {

constexpr int kUnreachable = std::numeric_limits<int>::max();

using Edge = std::pair<int, int>;  // (black index, white index)

// Vertex ids in traversals: black i is i, white j is n + j.
struct BipartiteGraph {
    std::vector<double> x;
    std::vector<double> y;
    double z = 1.0;
    std::vector<std::vector<int>> black_adj;
    std::vector<std::vector<int>> white_adj;

    static BipartiteGraph from_edges(std::vector<double> x, std::vector<double> y, double z,
                                     const std::vector<Edge>& edges);

    int n() const { return static_cast<int>(x.size()); }
    int m() const { return static_cast<int>(y.size()); }
    long edge_count() const;
    std::vector<Edge> edges() const;
    bool has_edge(int b, int w) const;
    std::vector<int> neighbours(int v) const;
};

struct SimpleGraph {
    std::vector<std::vector<int>> adj;

    int size() const { return static_cast<int>(adj.size()); }
    long edge_count() const;
    bool has_edge(int a, int b) const;
};

double edge_probability(double x, double y, double z);

BipartiteGraph sample_direct(const std::vector<double>& x, const std::vector<double>& y, double z, Rng& rng);
BipartiteGraph sample_direct(const std::vector<double>& x, const std::vector<double>& y, double z,
                             std::uint64_t seed);
// Draws i.i.d. weights from the pair's laws, then the graph with z = sqrt(mn).
BipartiteGraph sample_direct(const CriticalPair& pair, std::uint64_t seed);

SimpleGraph intersection_graph(const BipartiteGraph& g);

struct ComponentRecord {
    std::vector<int> blacks;
    std::vector<int> whites;
    double x_mass = 0.0;
    double y_mass = 0.0;
    long edges = 0;
    long surplus = 0;
    int diameter_bound = 0;

    bool nontrivial() const { return edges > 0; }
};

struct ComponentDecomposition {
    std::vector<ComponentRecord> components;
    std::vector<int> black_component;
    std::vector<int> white_component;
};

ComponentDecomposition components(const BipartiteGraph& g);

std::vector<int> bfs_distances(const BipartiteGraph& g, int source);
std::vector<int> bfs_distances(const SimpleGraph& g, int source);
int graph_distance(const BipartiteGraph& g, int u, int v);
// Exact diameter of the component containing vertex v (BFS from every member).
int component_diameter(const BipartiteGraph& g, const ComponentRecord& c);

struct IsometryReport {
    long pairs_checked = 0;
    long violations = 0;
    bool ok() const { return violations == 0; }
};

// Checks d_gr(b_i, b_j) = 2 d_RIG(i, j) for all black pairs in a common component.
IsometryReport isometry_check(const BipartiteGraph& b, const SimpleGraph& rig);

struct ClusteringConfig {
    WeightSpec b = WeightSpec::point_mass(1.0, 'b');
    WeightSpec w = WeightSpec::point_mass(1.0, 'w');
    long n = 1000;
    long m = 1000;
    double z = 0.0;  // 0 means sqrt(mn)
    int graphs = 20;
    long triples = 100000;
    std::uint64_t seed = 1;
};

struct ClusteringEstimate {
    bool defined = false;
    double estimate = 0.0;
    double standard_error = 0.0;
    long triples = 0;
    double exact_ratio = 0.0;  // closed / open wedges pooled over the sampled graphs
    double wedges = 0.0;
};

// Closed and total ordered wedge counts (v1 ~ v2, v1 ~ v3, v2 != v3).
std::pair<double, double> wedge_counts(const SimpleGraph& g);
// CL = P(V2 ~ V3 | V1 ~ V2, V1 ~ V3) over uniform distinct triples, by wedge sampling.
ClusteringEstimate clustering_estimate(const ClusteringConfig& cfg);

void write_graph_dump(std::ostream& os, const BipartiteGraph& g);
BipartiteGraph read_graph_dump(std::istream& is);

}  // namespace rig

#endif
