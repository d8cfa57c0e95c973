#include <rig/graph_core.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rig {

BipartiteGraph BipartiteGraph::from_edges(std::vector<double> x, std::vector<double> y, double z,
                                          const std::vector<Edge>& edges) {
    BipartiteGraph g;
    g.x = std::move(x);
    g.y = std::move(y);
    g.z = z;
    g.black_adj.assign(g.x.size(), {});
    g.white_adj.assign(g.y.size(), {});
    for (const auto& [b, w] : edges) {
        if (b < 0 || b >= g.n() || w < 0 || w >= g.m()) throw std::out_of_range("edge endpoint out of range");
        g.black_adj[b].push_back(w);
        g.white_adj[w].push_back(b);
    }
    for (auto& a : g.black_adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    for (auto& a : g.white_adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return g;
}

long BipartiteGraph::edge_count() const {
    long e = 0;
    for (const auto& a : black_adj) e += static_cast<long>(a.size());
    return e;
}

std::vector<Edge> BipartiteGraph::edges() const {
    std::vector<Edge> out;
    for (int b = 0; b < n(); ++b)
        for (int w : black_adj[b]) out.emplace_back(b, w);
    return out;
}

bool BipartiteGraph::has_edge(int b, int w) const {
    const auto& a = black_adj.at(b);
    return std::binary_search(a.begin(), a.end(), w);
}

std::vector<int> BipartiteGraph::neighbours(int v) const {
    std::vector<int> out;
    if (v < n()) {
        for (int w : black_adj[v]) out.push_back(n() + w);
    } else {
        out = white_adj[v - n()];
    }
    return out;
}

long SimpleGraph::edge_count() const {
    long e = 0;
    for (const auto& a : adj) e += static_cast<long>(a.size());
    return e / 2;
}

bool SimpleGraph::has_edge(int a, int b) const {
    const auto& l = adj.at(a);
    return std::binary_search(l.begin(), l.end(), b);
}

double edge_probability(double x, double y, double z) {
    if (!(x > 0.0) || !(y > 0.0) || !(z > 0.0)) throw std::invalid_argument("edge_probability needs positive arguments");
    return -std::expm1(-x * y / z);
}

BipartiteGraph sample_direct(const std::vector<double>& x, const std::vector<double>& y, double z, Rng& rng) {
    std::vector<Edge> edges;
    if (!y.empty()) {
        double ymax = *std::max_element(y.begin(), y.end());
        for (int i = 0; i < static_cast<int>(x.size()); ++i) {
            // Geometric skipping at the row's largest probability, then thinning.
            double lam = x[i] * ymax / z;
            double q = -std::expm1(-lam);
            if (q <= 0.0) continue;
            long j = -1;
            for (;;) {
                if (q < 1.0) j += 1 + static_cast<long>(std::floor(std::log(uniform_open(rng)) / -lam));
                else j += 1;
                if (j >= static_cast<long>(y.size())) break;
                double p = -std::expm1(-x[i] * y[j] / z);
                if (uniform_open(rng) * q < p) edges.emplace_back(i, static_cast<int>(j));
            }
        }
    }
    return BipartiteGraph::from_edges(x, y, z, edges);
}

BipartiteGraph sample_direct(const std::vector<double>& x, const std::vector<double>& y, double z,
                             std::uint64_t seed) {
    Rng rng = make_rng(seed, 0xD1EC7);
    return sample_direct(x, y, z, rng);
}

BipartiteGraph sample_direct(const CriticalPair& pair, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0xC1);
    std::vector<double> x(pair.n), y(pair.m);
    for (auto& v : x) v = sample_weight(pair.b, rng);
    for (auto& v : y) v = sample_weight(pair.w, rng);
    return sample_direct(x, y, pair.z(), rng);
}

SimpleGraph intersection_graph(const BipartiteGraph& g) {
    SimpleGraph s;
    s.adj.assign(g.n(), {});
    for (int w = 0; w < g.m(); ++w) {
        const auto& bl = g.white_adj[w];
        for (std::size_t a = 0; a < bl.size(); ++a)
            for (std::size_t b = a + 1; b < bl.size(); ++b) {
                s.adj[bl[a]].push_back(bl[b]);
                s.adj[bl[b]].push_back(bl[a]);
            }
    }
    for (auto& a : s.adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return s;
}

std::vector<int> bfs_distances(const BipartiteGraph& g, int source) {
    int n = g.n();
    std::vector<int> dist(n + g.m(), kUnreachable);
    std::deque<int> q;
    dist[source] = 0;
    q.push_back(source);
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        if (v < n) {
            for (int w : g.black_adj[v])
                if (dist[n + w] == kUnreachable) {
                    dist[n + w] = dist[v] + 1;
                    q.push_back(n + w);
                }
        } else {
            for (int b : g.white_adj[v - n])
                if (dist[b] == kUnreachable) {
                    dist[b] = dist[v] + 1;
                    q.push_back(b);
                }
        }
    }
    return dist;
}

std::vector<int> bfs_distances(const SimpleGraph& g, int source) {
    std::vector<int> dist(g.size(), kUnreachable);
    std::deque<int> q;
    dist[source] = 0;
    q.push_back(source);
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int u : g.adj[v])
            if (dist[u] == kUnreachable) {
                dist[u] = dist[v] + 1;
                q.push_back(u);
            }
    }
    return dist;
}

int graph_distance(const BipartiteGraph& g, int u, int v) {
    return bfs_distances(g, u).at(v);
}

ComponentDecomposition components(const BipartiteGraph& g) {
    ComponentDecomposition out;
    int n = g.n(), m = g.m();
    out.black_component.assign(n, -1);
    out.white_component.assign(m, -1);
    auto comp_of = [&](int v) -> int& { return v < n ? out.black_component[v] : out.white_component[v - n]; };
    for (int s = 0; s < n + m; ++s) {
        if (comp_of(s) != -1) continue;
        int id = static_cast<int>(out.components.size());
        ComponentRecord rec;
        std::deque<int> q{s};
        comp_of(s) = id;
        std::vector<int> dist_from_s;
        std::vector<std::pair<int, int>> order;  // (vertex, depth)
        order.emplace_back(s, 0);
        std::size_t head = 0;
        while (head < order.size()) {
            auto [v, d] = order[head++];
            if (v < n) {
                rec.blacks.push_back(v);
                rec.x_mass += g.x[v];
                rec.edges += static_cast<long>(g.black_adj[v].size());
            } else {
                rec.whites.push_back(v - n);
                rec.y_mass += g.y[v - n];
            }
            for (int u : g.neighbours(v)) {
                if (comp_of(u) == -1) {
                    comp_of(u) = id;
                    order.emplace_back(u, d + 1);
                }
            }
        }
        int ecc = order.back().second;
        rec.diameter_bound = 2 * ecc;
        long vertices = static_cast<long>(rec.blacks.size() + rec.whites.size());
        rec.surplus = rec.edges - vertices + 1;
        std::sort(rec.blacks.begin(), rec.blacks.end());
        std::sort(rec.whites.begin(), rec.whites.end());
        out.components.push_back(std::move(rec));
    }
    return out;
}

int component_diameter(const BipartiteGraph& g, const ComponentRecord& c) {
    int diam = 0;
    auto scan = [&](int v) {
        auto d = bfs_distances(g, v);
        for (int b : c.blacks) diam = std::max(diam, d[b]);
        for (int w : c.whites) diam = std::max(diam, d[g.n() + w]);
    };
    for (int b : c.blacks) scan(b);
    for (int w : c.whites) scan(g.n() + w);
    return diam;
}

IsometryReport isometry_check(const BipartiteGraph& b, const SimpleGraph& rig) {
    IsometryReport rep;
    for (int i = 0; i < b.n(); ++i) {
        auto db = bfs_distances(b, i);
        auto dr = bfs_distances(rig, i);
        for (int j = 0; j < b.n(); ++j) {
            if (db[j] == kUnreachable) {
                if (dr[j] != kUnreachable) ++rep.violations;
                continue;
            }
            ++rep.pairs_checked;
            if (dr[j] == kUnreachable || db[j] != 2 * dr[j]) ++rep.violations;
        }
    }
    return rep;
}

std::pair<double, double> wedge_counts(const SimpleGraph& g) {
    double closed = 0.0, total = 0.0;
    for (int v = 0; v < g.size(); ++v) {
        const auto& a = g.adj[v];
        double d = static_cast<double>(a.size());
        total += d * (d - 1.0);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = i + 1; j < a.size(); ++j)
                if (g.has_edge(a[i], a[j])) closed += 2.0;
    }
    return {closed, total};
}

ClusteringEstimate clustering_estimate(const ClusteringConfig& cfg) {
    if (cfg.n < 3) throw std::invalid_argument("clustering needs at least three black vertices");
    Rng rng = make_rng(cfg.seed, 0xC7);
    double z = cfg.z > 0.0 ? cfg.z : std::sqrt(static_cast<double>(cfg.n) * static_cast<double>(cfg.m));
    std::vector<SimpleGraph> graphs;
    std::vector<double> weight;  // ordered wedges per graph
    double closed_total = 0.0, wedge_total = 0.0;
    for (int k = 0; k < cfg.graphs; ++k) {
        std::vector<double> x(cfg.n), y(cfg.m);
        for (auto& v : x) v = sample_weight(cfg.b, rng);
        for (auto& v : y) v = sample_weight(cfg.w, rng);
        auto b = sample_direct(x, y, z, rng);
        auto g = intersection_graph(b);
        auto [c, t] = wedge_counts(g);
        closed_total += c;
        wedge_total += t;
        weight.push_back(t);
        graphs.push_back(std::move(g));
    }
    ClusteringEstimate est;
    est.wedges = wedge_total;
    if (wedge_total <= 0.0) return est;
    est.defined = true;
    est.exact_ratio = closed_total / wedge_total;
    // A uniform distinct triple conditioned on V1 ~ V2, V1 ~ V3 is a uniform ordered
    // wedge of the pooled graphs: pick a graph and a centre by wedge weight.
    std::discrete_distribution<int> pick_graph(weight.begin(), weight.end());
    std::vector<std::discrete_distribution<int>> pick_centre;
    for (const auto& g : graphs) {
        std::vector<double> wv(g.size());
        for (int v = 0; v < g.size(); ++v) {
            double d = static_cast<double>(g.adj[v].size());
            wv[v] = d * (d - 1.0);
        }
        if (std::accumulate(wv.begin(), wv.end(), 0.0) <= 0.0) wv.assign(g.size(), 1.0);
        pick_centre.emplace_back(wv.begin(), wv.end());
    }
    long hits = 0;
    for (long t = 0; t < cfg.triples; ++t) {
        int gi = pick_graph(rng);
        const auto& g = graphs[gi];
        int v1 = pick_centre[gi](rng);
        const auto& a = g.adj[v1];
        std::uniform_int_distribution<std::size_t> u(0, a.size() - 1);
        std::size_t i = u(rng), j = u(rng);
        while (j == i) j = u(rng);
        if (g.has_edge(a[i], a[j])) ++hits;
    }
    est.triples = cfg.triples;
    est.estimate = static_cast<double>(hits) / static_cast<double>(cfg.triples);
    est.standard_error = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(cfg.triples));
    return est;
}

void write_graph_dump(std::ostream& os, const BipartiteGraph& g) {
    os << std::setprecision(17);
    os << "# bipartite graph: labels are 1-based\n";
    os << "z " << g.z << "\n";
    os << "x";
    for (double v : g.x) os << ' ' << v;
    os << "\ny";
    for (double v : g.y) os << ' ' << v;
    os << "\n";
    for (const auto& [b, w] : g.edges()) os << 'b' << (b + 1) << " w" << (w + 1) << "\n";
}

BipartiteGraph read_graph_dump(std::istream& is) {
    std::vector<double> x, y;
    double z = 1.0;
    std::vector<Edge> edges;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "z") {
            ls >> z;
        } else if (tok == "x" || tok == "y") {
            auto& dst = tok == "x" ? x : y;
            double v;
            while (ls >> v) dst.push_back(v);
        } else if (!tok.empty() && tok[0] == 'b') {
            std::string wt;
            ls >> wt;
            if (wt.empty() || wt[0] != 'w') throw std::runtime_error("malformed edge line: " + line);
            edges.emplace_back(std::stoi(tok.substr(1)) - 1, std::stoi(wt.substr(1)) - 1);
        } else {
            throw std::runtime_error("unrecognised graph dump line: " + line);
        }
    }
    return BipartiteGraph::from_edges(std::move(x), std::move(y), z, edges);
}

}  // namespace rig
