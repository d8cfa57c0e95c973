#ifndef RIG_LIFO_EXPLORER_HPP
#define RIG_LIFO_EXPLORER_HPP

#include <cstdint>
#include <vector>

#include <json.hpp>

#include <rig/graph_core.hpp>
#include <rig/rng.hpp>

namespace rig {

struct ClockSet {
    std::vector<double> black;
    std::vector<double> white;
};

// Black clocks Exp(x_i / z), white clocks Exp(y_j / z); exact ties are re-drawn.
ClockSet sample_clocks(const std::vector<double>& x, const std::vector<double>& y, double z, Rng& rng);

struct QueueEntry {
    int white = -1;
    double remaining = 0.0;
};

enum class StepKind { Root, Interrupt, Completion };

struct StepRecord {
    int k = 0;
    StepKind kind = StepKind::Root;
    int v = -1;  // black vertex appointed at this step, if any
    int u = -1;  // white at the head of the queue, if any
    double tau_b = 0.0;
    double tau_w = 0.0;
    std::vector<QueueEntry> queue;  // head first, after the step
};

struct SurplusCandidate {
    int step = 0;
    int black = -1;
    int white = -1;
    double remaining = 0.0;  // y_j(k)
};

// Rooted ordered forest; parent -1 marks a root, children in birth order.
struct Forest {
    std::vector<int> parent;
    std::vector<std::vector<int>> children;
    std::vector<int> roots;

    int size() const { return static_cast<int>(parent.size()); }
    std::vector<int> depths() const;  // roots have depth 1
    bool operator==(const Forest& o) const = default;
};

// Vertex ids in `forest`: black i is i, white j is n + j.
struct ExplorationRecord {
    int n = 0;
    int m = 0;
    double z = 1.0;
    std::vector<double> x;
    std::vector<double> y;
    ClockSet clocks;
    int steps_taken = 0;
    std::vector<StepRecord> steps;
    std::vector<int> black_order;  // V_k in appointment order
    std::vector<double> interval_lo;
    std::vector<double> interval_hi;
    std::vector<std::vector<int>> offspring;
    std::vector<double> delta_bi;
    Forest forest;
    std::vector<SurplusCandidate> candidates;
};

struct ExploreOptions {
    bool record_queue = true;
};

ExplorationRecord explore(const std::vector<double>& x, const std::vector<double>& y, double z,
                          const ClockSet& clocks, const ExploreOptions& opts = {});

// Genealogy of a generic LIFO queue; arrivals must be strictly increasing.
Forest generic_lifo_genealogy(const std::vector<double>& arrivals, const std::vector<double>& services);

// b is the parent of b' iff b is the grandparent of b' in the bipartite forest.
Forest black_forest(const ExplorationRecord& rec);

std::vector<Edge> sample_surplus_direct(const ExplorationRecord& rec, double z, Rng& rng);
std::vector<Edge> sample_surplus_direct(const ExplorationRecord& rec, double z, std::uint64_t seed);

std::vector<Edge> forest_edges(const ExplorationRecord& rec);
BipartiteGraph assemble_graph(const ExplorationRecord& rec, const std::vector<Edge>& surplus);

nlohmann::json trace_json(const ExplorationRecord& rec);

}  // namespace rig

#endif
