#include <rig/lifo_explorer.hpp>

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> order_by(const std::vector<double>& keys) {
    std::vector<int> idx(keys.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return keys[a] < keys[b]; });
    return idx;
}

bool has_tie(const std::vector<double>& v) {
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    return std::adjacent_find(s.begin(), s.end()) != s.end();
}

void redraw_ties(std::vector<double>& clocks, const std::vector<double>& w, double z, Rng& rng) {
    while (has_tie(clocks)) {
        std::vector<int> idx = order_by(clocks);
        for (std::size_t a = 1; a < idx.size(); ++a)
            if (clocks[idx[a]] == clocks[idx[a - 1]]) clocks[idx[a]] = exponential(rng, w[idx[a]] / z);
    }
}

}  // namespace

ClockSet sample_clocks(const std::vector<double>& x, const std::vector<double>& y, double z, Rng& rng) {
    ClockSet c;
    c.black.resize(x.size());
    c.white.resize(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) c.black[i] = exponential(rng, x[i] / z);
    for (std::size_t j = 0; j < y.size(); ++j) c.white[j] = exponential(rng, y[j] / z);
    redraw_ties(c.black, x, z, rng);
    redraw_ties(c.white, y, z, rng);
    return c;
}

std::vector<int> Forest::depths() const {
    std::vector<int> d(parent.size(), 0);
    std::vector<int> stack;
    for (int r : roots) {
        d[r] = 1;
        stack.push_back(r);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int c : children[v]) {
                d[c] = d[v] + 1;
                stack.push_back(c);
            }
        }
    }
    return d;
}

ExplorationRecord explore(const std::vector<double>& x, const std::vector<double>& y, double z,
                          const ClockSet& clocks, const ExploreOptions& opts) {
    if (clocks.black.size() != x.size() || clocks.white.size() != y.size())
        throw std::invalid_argument("clock set does not match the weight vectors");
    ExplorationRecord rec;
    rec.n = static_cast<int>(x.size());
    rec.m = static_cast<int>(y.size());
    rec.z = z;
    rec.x = x;
    rec.y = y;
    rec.clocks = clocks;
    const int n = rec.n, m = rec.m;
    rec.interval_lo.assign(n, 0.0);
    rec.interval_hi.assign(n, 0.0);
    rec.offspring.assign(n, {});
    rec.delta_bi.assign(n, 0.0);
    rec.forest.parent.assign(n + m, -1);
    rec.forest.children.assign(n + m, {});

    const std::vector<int> black_sorted = order_by(clocks.black);
    const std::vector<int> white_sorted = order_by(clocks.white);
    std::vector<double> white_keys(m);
    for (int a = 0; a < m; ++a) white_keys[a] = clocks.white[white_sorted[a]];
    std::vector<char> white_used(m, 0);

    std::vector<QueueEntry> queue;  // back is the head
    double tau_b = 0.0, tau_w = 0.0;
    int next = 0;
    int k = 0;

    auto appoint = [&](int v) {
        double lo = tau_w;
        tau_w += x[v];
        rec.interval_lo[v] = lo;
        rec.interval_hi[v] = tau_w;
        auto first = std::upper_bound(white_keys.begin(), white_keys.end(), lo);
        auto last = std::upper_bound(white_keys.begin(), white_keys.end(), tau_w);
        for (auto it = first; it != last; ++it) {
            int w = white_sorted[it - white_keys.begin()];
            rec.offspring[v].push_back(w);
            rec.delta_bi[v] += y[w];
            white_used[w] = 1;
            rec.forest.parent[n + w] = v;
            rec.forest.children[v].push_back(n + w);
        }
        // Smallest clock ends up at the head.
        for (auto it = rec.offspring[v].rbegin(); it != rec.offspring[v].rend(); ++it)
            queue.push_back({*it, y[*it]});
        rec.black_order.push_back(v);
    };

    auto snapshot = [&](StepRecord& s) {
        s.tau_b = tau_b;
        s.tau_w = tau_w;
        if (opts.record_queue) s.queue.assign(queue.rbegin(), queue.rend());
    };

    for (;;) {
        if (queue.empty()) {
            if (next >= n) break;
            ++k;
            int v = black_sorted[next++];
            tau_b = clocks.black[v];
            appoint(v);
            rec.forest.roots.push_back(v);
            StepRecord s;
            s.k = k;
            s.kind = StepKind::Root;
            s.v = v;
            snapshot(s);
            rec.steps.push_back(std::move(s));
            continue;
        }
        QueueEntry& head = queue.back();
        double arrival = next < n ? clocks.black[black_sorted[next]] : kInf;
        ++k;
        StepRecord s;
        s.k = k;
        s.u = head.white;
        if (arrival < tau_b + head.remaining) {
            int v = black_sorted[next++];
            head.remaining -= arrival - tau_b;
            tau_b = arrival;
            for (const auto& e : queue) rec.candidates.push_back({k, v, e.white, e.remaining});
            int u = head.white;
            rec.forest.parent[v] = n + u;
            rec.forest.children[n + u].push_back(v);
            appoint(v);
            s.kind = StepKind::Interrupt;
            s.v = v;
        } else {
            tau_b += head.remaining;
            queue.pop_back();
            s.kind = StepKind::Completion;
        }
        snapshot(s);
        rec.steps.push_back(std::move(s));
    }
    for (int w : white_sorted)
        if (!white_used[w]) rec.forest.roots.push_back(n + w);
    rec.steps_taken = k;
    return rec;
}

Forest generic_lifo_genealogy(const std::vector<double>& arrivals, const std::vector<double>& services) {
    if (arrivals.size() != services.size()) throw std::invalid_argument("arrivals and services must align");
    for (std::size_t i = 1; i < arrivals.size(); ++i)
        if (!(arrivals[i] > arrivals[i - 1])) throw std::invalid_argument("arrivals must be strictly increasing");
    const int N = static_cast<int>(arrivals.size());
    Forest f;
    f.parent.assign(N, -1);
    f.children.assign(N, {});
    std::vector<std::pair<int, double>> stack;
    double now = 0.0;
    for (int i = 0; i < N; ++i) {
        double t = arrivals[i];
        while (!stack.empty() && now + stack.back().second <= t) {
            now += stack.back().second;
            stack.pop_back();
        }
        if (!stack.empty()) {
            stack.back().second -= t - now;
            f.parent[i] = stack.back().first;
            f.children[stack.back().first].push_back(i);
        } else {
            f.roots.push_back(i);
        }
        now = t;
        if (services[i] > 0.0) stack.emplace_back(i, services[i]);
    }
    return f;
}

Forest black_forest(const ExplorationRecord& rec) {
    Forest f;
    f.parent.assign(rec.n, -1);
    f.children.assign(rec.n, {});
    for (int b : rec.black_order) {
        int w = rec.forest.parent[b];
        if (w < 0) {
            f.roots.push_back(b);
            continue;
        }
        int p = rec.forest.parent[w];
        f.parent[b] = p;
        f.children[p].push_back(b);
    }
    for (auto& c : f.children)
        std::sort(c.begin(), c.end(), [&](int a, int b) { return rec.clocks.black[a] < rec.clocks.black[b]; });
    return f;
}

std::vector<Edge> sample_surplus_direct(const ExplorationRecord& rec, double z, Rng& rng) {
    std::vector<Edge> out;
    for (const auto& c : rec.candidates) {
        double p = -std::expm1(-c.remaining * rec.x[c.black] / z);
        if (uniform_open(rng) < p) out.emplace_back(c.black, c.white);
    }
    return out;
}

std::vector<Edge> sample_surplus_direct(const ExplorationRecord& rec, double z, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0x5u);
    return sample_surplus_direct(rec, z, rng);
}

std::vector<Edge> forest_edges(const ExplorationRecord& rec) {
    std::vector<Edge> out;
    for (int v = 0; v < rec.n + rec.m; ++v) {
        int p = rec.forest.parent[v];
        if (p < 0) continue;
        if (v < rec.n) out.emplace_back(v, p - rec.n);
        else out.emplace_back(p, v - rec.n);
    }
    return out;
}

BipartiteGraph assemble_graph(const ExplorationRecord& rec, const std::vector<Edge>& surplus) {
    std::vector<Edge> edges = forest_edges(rec);
    edges.insert(edges.end(), surplus.begin(), surplus.end());
    return BipartiteGraph::from_edges(rec.x, rec.y, rec.z, edges);
}

nlohmann::json trace_json(const ExplorationRecord& rec) {
    using nlohmann::json;
    json steps = json::array();
    for (const auto& s : rec.steps) {
        json q = json::array();
        for (const auto& e : s.queue) q.push_back({{"white", e.white + 1}, {"remaining", e.remaining}});
        const char* kind = s.kind == StepKind::Root ? "root" : s.kind == StepKind::Interrupt ? "interrupt" : "completion";
        json js{{"k", s.k}, {"kind", kind}, {"tau_b", s.tau_b}, {"tau_w", s.tau_w}, {"queue", q}};
        if (s.v >= 0) js["v"] = s.v + 1;
        if (s.u >= 0) js["u"] = s.u + 1;
        steps.push_back(js);
    }
    json cands = json::array();
    for (const auto& c : rec.candidates)
        cands.push_back({{"step", c.step}, {"black", c.black + 1}, {"white", c.white + 1}, {"remaining", c.remaining}});
    std::vector<int> parent(rec.forest.parent.size());
    for (std::size_t v = 0; v < parent.size(); ++v) parent[v] = rec.forest.parent[v];
    return json{{"n", rec.n},          {"m", rec.m},
                {"z", rec.z},          {"x", rec.x},
                {"y", rec.y},          {"black_clocks", rec.clocks.black},
                {"white_clocks", rec.clocks.white},
                {"steps_taken", rec.steps_taken},
                {"delta_bi", rec.delta_bi},
                {"interval_lo", rec.interval_lo},
                {"interval_hi", rec.interval_hi},
                {"forest_parent", parent},
                {"steps", steps},      {"candidates", cands}};
}

}  // namespace rig
