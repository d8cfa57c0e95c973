#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <rig/graph_core.hpp>
#include <rig/lifo_explorer.hpp>
#include <rig/stats.hpp>

using namespace rig;

namespace {

// Hand-built clocks reproducing the second figure with unit weights and z = 1. Blacks arrive
// in the order b2 < b4 < b5 < b1 < b3 < b6; whites w4, w5 fall in I(b2), w1 in I(b4),
// w3 in I(b3), w2 in I(b6).
struct FigureTwo {
    std::vector<double> x = std::vector<double>(6, 1.0);
    std::vector<double> y = std::vector<double>(5, 1.0);
    ClockSet clocks{{2.7, 1.0, 3.5, 1.5, 2.0, 6.0}, {1.5, 5.5, 4.5, 0.3, 0.7}};
};

int white(int j) { return 6 + j - 1; }  // 1-based white label to forest id when n = 6

// Edge set of a bipartite graph on n = m = k as a bitmask over (b, w) pairs.
unsigned edge_mask(const BipartiteGraph& g) {
    unsigned mask = 0;
    for (const auto& [b, w] : g.edges()) mask |= 1u << (b * g.m() + w);
    return mask;
}

double tv_against_product(const std::vector<double>& x, const std::vector<double>& y, double z, int runs,
                          std::uint64_t seed) {
    const int n = static_cast<int>(x.size()), m = static_cast<int>(y.size());
    const int outcomes = 1 << (n * m);
    std::vector<double> exact(outcomes, 1.0), empirical(outcomes, 0.0);
    for (int mask = 0; mask < outcomes; ++mask)
        for (int b = 0; b < n; ++b)
            for (int w = 0; w < m; ++w) {
                double p = edge_probability(x[b], y[w], z);
                exact[mask] *= (mask >> (b * m + w)) & 1 ? p : 1.0 - p;
            }
    Rng rng = make_rng(seed);
    for (int r = 0; r < runs; ++r) {
        ClockSet c = sample_clocks(x, y, z, rng);
        ExplorationRecord rec = explore(x, y, z, c, ExploreOptions{false});
        empirical[edge_mask(assemble_graph(rec, sample_surplus_direct(rec, z, rng)))] += 1.0 / runs;
    }
    return total_variation(empirical, exact);
}

}  // namespace

TEST_CASE("single pair") {
    ExplorationRecord rec = explore({1.0}, {2.0}, 1.0, ClockSet{{0.3}, {0.5}});
    CHECK(rec.steps_taken == 2);
    CHECK(rec.forest.parent[1] == 0);
    CHECK(rec.forest.roots == std::vector<int>{0});
    CHECK(rec.delta_bi[0] == 2.0);
    CHECK(rec.interval_lo[0] == 0.0);
    CHECK(rec.interval_hi[0] == 1.0);
}

TEST_CASE("second figure: forest, queue after step two, black forest") {
    FigureTwo f;
    ExplorationRecord rec = explore(f.x, f.y, 1.0, f.clocks);
    CHECK(rec.black_order == std::vector<int>{1, 3, 4, 0, 2, 5});
    // Parents (0-based blacks, whites offset by n = 6).
    CHECK(rec.forest.parent[white(4)] == 1);
    CHECK(rec.forest.parent[white(5)] == 1);
    CHECK(rec.forest.parent[3] == white(4));
    CHECK(rec.forest.parent[0] == white(4));
    CHECK(rec.forest.parent[white(1)] == 3);
    CHECK(rec.forest.parent[4] == white(1));
    CHECK(rec.forest.parent[2] == white(5));
    CHECK(rec.forest.parent[white(3)] == 2);
    CHECK(rec.forest.parent[white(2)] == 5);
    CHECK(rec.forest.children[white(4)] == std::vector<int>{3, 0});  // b4 is the first child
    CHECK(rec.forest.roots == std::vector<int>{1, 5});

    const StepRecord& step2 = rec.steps[1];
    CHECK(step2.k == 2);
    CHECK(step2.v == 3);
    CHECK(step2.u == 3);  // w4
    REQUIRE(step2.queue.size() == 3);
    CHECK(step2.queue[0].white == 0);
    CHECK(step2.queue[0].remaining == 1.0);
    CHECK(step2.queue[1].white == 3);
    CHECK(step2.queue[1].remaining == doctest::Approx(1.0 - (1.5 - 1.0)));
    CHECK(step2.queue[2].white == 4);
    CHECK(step2.queue[2].remaining == 1.0);

    BipartiteGraph g = assemble_graph(rec, {});
    std::vector<Edge> expected{{1, 3}, {1, 4}, {0, 3}, {3, 3}, {3, 0}, {4, 0}, {2, 4}, {2, 2}, {5, 1}};
    std::sort(expected.begin(), expected.end());
    CHECK(g.edges() == expected);

    Forest fb = black_forest(rec);
    CHECK(fb.parent == std::vector<int>{1, -1, 1, 1, 3, -1});
    CHECK(fb.children[1] == std::vector<int>{3, 0, 2});

    std::vector<int> order = rec.black_order;
    std::vector<double> arrivals, services;
    for (int v : order) {
        arrivals.push_back(f.clocks.black[v]);
        services.push_back(rec.delta_bi[v]);
    }
    Forest q = generic_lifo_genealogy(arrivals, services);
    for (std::size_t a = 0; a < order.size(); ++a) {
        int p = q.parent[a];
        CHECK(fb.parent[order[a]] == (p < 0 ? -1 : order[p]));
    }
}

TEST_CASE("whites beyond the total black weight stay isolated") {
    std::vector<double> x{1.0, 2.0, 0.5};
    ExplorationRecord rec = explore(x, {1.0, 1.0}, 1.0, ClockSet{{0.2, 0.4, 0.9}, {3.6, 9.0}});
    CHECK(rec.forest.roots.size() == 5);
    for (double d : rec.delta_bi) CHECK(d == 0.0);
    CHECK(rec.steps_taken == 3);
}

TEST_CASE("generic LIFO genealogy") {
    // First figure: five clients.
    Forest f = generic_lifo_genealogy({0.0, 1.0, 1.5, 4.0, 10.0}, {5.0, 1.0, 0.5, 1.0, 1.0});
    CHECK(f.parent == std::vector<int>{-1, 0, 1, 0, -1});
    CHECK(f.roots == std::vector<int>{0, 4});
    CHECK(f.children[0] == std::vector<int>{1, 3});

    Forest zero = generic_lifo_genealogy({0.0, 1.0, 2.0}, {0.0, 0.0, 0.0});
    CHECK(zero.parent == std::vector<int>{-1, -1, -1});

    Forest nested = generic_lifo_genealogy({0.0, 1.0, 2.0, 3.0}, {10.0, 10.0, 10.0, 10.0});
    CHECK(nested.parent == std::vector<int>{-1, 0, 1, 2});

    CHECK_THROWS_AS(generic_lifo_genealogy({1.0, 1.0}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(generic_lifo_genealogy({1.0}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("black forest of a cherry") {
    ExplorationRecord rec = explore({1.0, 1.0}, {1.0}, 1.0, ClockSet{{0.1, 0.5}, {0.5}});
    Forest fb = black_forest(rec);
    CHECK(fb.parent == std::vector<int>{-1, 0});

    ExplorationRecord childless = explore({1.0, 1.0}, {1.0, 1.0}, 1.0, ClockSet{{0.1, 5.0}, {7.0, 8.0}});
    CHECK(black_forest(childless).parent == std::vector<int>{-1, -1});
}

TEST_CASE("surplus candidates and direct sampling") {
    ExplorationRecord lone = explore({1.0}, {1.0}, 1.0, ClockSet{{0.1}, {0.5}});
    CHECK(lone.candidates.empty());
    CHECK(sample_surplus_direct(lone, 1.0, 3).empty());

    // b2 arrives while its parent w1 has y - 0.5 = ln 2 left: the candidate (V_k, U_k).
    const double y = 0.5 + std::log(2.0);
    ExplorationRecord rec = explore({1.0, 1.0}, {y}, 1.0, ClockSet{{1.0, 1.5}, {0.5}});
    REQUIRE(rec.candidates.size() == 1);
    CHECK(rec.candidates[0].black == 1);
    CHECK(rec.candidates[0].white == 0);
    CHECK(rec.candidates[0].remaining == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(rec.forest.parent[1] == 2);
    long hits = 0;
    for (std::uint64_t s = 0; s < 100000; ++s) {
        auto e = sample_surplus_direct(rec, 1.0, s);
        hits += static_cast<long>(e.size());
        if (!e.empty()) CHECK(assemble_graph(rec, e).edge_count() == assemble_graph(rec, {}).edge_count());
    }
    CHECK(std::fabs(hits / 1e5 - 0.5) <= 0.01);
}

TEST_CASE("structural properties on random instances") {
    Rng rng = make_rng(77);
    for (int inst = 0; inst < 300; ++inst) {
        std::uniform_int_distribution<int> size(1, 40);
        int n = size(rng), m = size(rng);
        std::vector<double> x(n), y(m);
        for (auto& v : x) v = 0.2 + 2.0 * uniform_open(rng);
        for (auto& v : y) v = 0.2 + 2.0 * uniform_open(rng);
        double z = std::sqrt(n * m) * (0.3 + uniform_open(rng));
        ClockSet c = sample_clocks(x, y, z, rng);
        ExplorationRecord rec = explore(x, y, z, c);
        CHECK(rec.steps_taken <= n + m);

        std::vector<int> perm = rec.black_order;
        std::sort(perm.begin(), perm.end());
        std::vector<int> ident(n);
        std::iota(ident.begin(), ident.end(), 0);
        CHECK(perm == ident);

        // Intervals tile (0, sum x] in appointment order.
        double edge = 0.0;
        for (int v : rec.black_order) {
            CHECK(rec.interval_lo[v] == edge);
            edge = rec.interval_hi[v];
            CHECK(edge - rec.interval_lo[v] == doctest::Approx(x[v]));
        }
        CHECK(edge == doctest::Approx(std::accumulate(x.begin(), x.end(), 0.0)));

        // Forest: parents precede children, trees with a black are rooted at a black, siblings ordered.
        for (int v = 0; v < n + m; ++v) {
            int p = rec.forest.parent[v];
            if (p >= 0) CHECK((p < n) != (v < n));
        }
        for (int r : rec.forest.roots)
            if (r >= n) CHECK(rec.forest.children[r].empty());
        for (int v = 0; v < n + m; ++v) {
            const auto& ch = rec.forest.children[v];
            for (std::size_t a = 1; a < ch.size(); ++a) {
                double ta = ch[a] < n ? c.black[ch[a]] : c.white[ch[a] - n];
                double tb = ch[a - 1] < n ? c.black[ch[a - 1]] : c.white[ch[a - 1] - n];
                CHECK(tb < ta);
            }
        }

        // Black forest equals the genealogy of the bipartite queue.
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return c.black[a] < c.black[b]; });
        std::vector<double> arrivals, services;
        for (int v : order) {
            arrivals.push_back(c.black[v]);
            services.push_back(rec.delta_bi[v]);
        }
        Forest q = generic_lifo_genealogy(arrivals, services);
        Forest fb = black_forest(rec);
        for (int a = 0; a < n; ++a) CHECK(fb.parent[order[a]] == (q.parent[a] < 0 ? -1 : order[q.parent[a]]));
    }
}

TEST_CASE("LIFO construction reproduces the product law on enumerable instances") {
    CHECK(tv_against_product({1.0, 1.0}, {1.0, 1.0}, 2.0, 100000, 1) <= 0.02);
    CHECK(tv_against_product({0.5, 2.0}, {1.5, 0.7}, 1.5, 100000, 2) <= 0.02);
    CHECK(tv_against_product({1.0, 2.0, 0.5}, {1.0}, 1.0, 100000, 3) <= 0.02);
    CHECK(tv_against_product({1.0, 0.4, 1.6}, {0.8, 1.2, 1.0}, 3.0, 400000, 4) <= 0.02);
}

TEST_CASE("ties are re-drawn") {
    Rng rng = make_rng(5);
    std::vector<double> x(200, 1.0);
    for (int r = 0; r < 50; ++r) {
        ClockSet c = sample_clocks(x, x, 1e-300, rng);
        std::vector<double> b = c.black;
        std::sort(b.begin(), b.end());
        CHECK(std::adjacent_find(b.begin(), b.end()) == b.end());
    }
}

TEST_CASE("trace export") {
    FigureTwo f;
    ExplorationRecord rec = explore(f.x, f.y, 1.0, f.clocks);
    nlohmann::json j = trace_json(rec);
    CHECK(j["n"] == 6);
    CHECK(j["steps"][0]["v"] == 2);
    CHECK(j["steps"].size() == static_cast<std::size_t>(rec.steps_taken));
    CHECK_THROWS_AS(explore({1.0}, {1.0}, 1.0, ClockSet{{0.1, 0.2}, {0.3}}), std::invalid_argument);
}
