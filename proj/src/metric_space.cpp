#include <rig/metric_space.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace rig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Value of h just before t (h(t-)), extended by 0 beyond zeta.
double left_value(const CodedFunction& h, double t) {
    if (t <= 0.0) return h(0.0);
    if (t > h.zeta) return 0.0;
    if (h.kind == CodingClass::Continuous) return h(t);
    auto it = std::lower_bound(h.times.begin(), h.times.end(), t);
    if (it == h.times.begin()) return h.values.front();
    return h.values[(it - h.times.begin()) - 1];
}

double extended(const CodedFunction& h, double t) { return t >= h.zeta && h.zeta > 0.0 ? 0.0 : h(t); }

double extended_left(const CodedFunction& h, double t) { return t > h.zeta ? 0.0 : left_value(h, t); }

struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int a) {
        while (p[a] != a) a = p[a] = p[p[a]];
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) p[std::max(a, b)] = std::min(a, b);
    }
};

// Pairwise d_h on sorted times, sweeping the bridge minimum outward from each point.
std::vector<std::vector<double>> coded_distances(const CodedFunction& h, const std::vector<double>& times) {
    const int n = static_cast<int>(times.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return times[a] < times[b]; });
    std::vector<double> hv(n), gap(n, kInf);
    for (int r = 0; r < n; ++r) hv[r] = h(times[order[r]]);
    for (int r = 1; r < n; ++r) gap[r] = h.bridge_min(times[order[r - 1]], times[order[r]]);
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (int r = 0; r < n; ++r) {
        double low = hv[r];
        for (int c = r + 1; c < n; ++c) {
            low = std::min(low, gap[c]);
            double v = std::max(0.0, hv[r] + hv[c] - 2.0 * low);
            d[order[r]][order[c]] = d[order[c]][order[r]] = v;
        }
    }
    return d;
}

double distortion_of(const std::vector<std::pair<int, int>>& rel, const FiniteMeasuredMetricSpace& a,
                     const FiniteMeasuredMetricSpace& b) {
    double dis = 0.0;
    for (std::size_t i = 0; i < rel.size(); ++i)
        for (std::size_t j = i + 1; j < rel.size(); ++j)
            dis = std::max(dis, std::fabs(a.dist[rel[i].first][rel[j].first] - b.dist[rel[i].second][rel[j].second]));
    return dis;
}

// Disjoint-union metric induced by a correspondence with half-distortion r.
std::vector<std::vector<double>> union_metric(const std::vector<std::pair<int, int>>& rel, double r,
                                              const FiniteMeasuredMetricSpace& a,
                                              const FiniteMeasuredMetricSpace& b) {
    const int na = a.size(), nb = b.size();
    std::vector<std::vector<double>> d(na + nb, std::vector<double>(na + nb, 0.0));
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j) d[i][j] = a.dist[i][j];
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) d[na + i][na + j] = b.dist[i][j];
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j) {
            double best = kInf;
            for (const auto& [p, q] : rel) best = std::min(best, a.dist[i][p] + r + b.dist[q][j]);
            d[i][na + j] = d[na + j][i] = best;
        }
    return d;
}

double hausdorff_in_union(const std::vector<std::vector<double>>& d, int na, int nb) {
    double h = 0.0;
    for (int i = 0; i < na; ++i) {
        double best = kInf;
        for (int j = 0; j < nb; ++j) best = std::min(best, d[i][na + j]);
        h = std::max(h, best);
    }
    for (int j = 0; j < nb; ++j) {
        double best = kInf;
        for (int i = 0; i < na; ++i) best = std::min(best, d[i][na + j]);
        h = std::max(h, best);
    }
    return h;
}

// Completes the graph of a map into a correspondence: uncovered targets get the source
// that adds the least distortion.
std::vector<std::pair<int, int>> complete_map(const std::vector<int>& f, const FiniteMeasuredMetricSpace& src,
                                              const FiniteMeasuredMetricSpace& dst) {
    std::vector<std::pair<int, int>> rel;
    std::vector<char> covered(dst.size(), 0);
    for (int i = 0; i < src.size(); ++i) {
        rel.emplace_back(i, f[i]);
        covered[f[i]] = 1;
    }
    for (int j = 0; j < dst.size(); ++j) {
        if (covered[j]) continue;
        int best_i = 0;
        double best = kInf;
        for (int i = 0; i < src.size(); ++i) {
            double worst = 0.0;
            for (const auto& [p, q] : rel) worst = std::max(worst, std::fabs(src.dist[i][p] - dst.dist[j][q]));
            if (worst < best) {
                best = worst;
                best_i = i;
            }
        }
        rel.emplace_back(best_i, j);
    }
    return rel;
}

}  // namespace

CodedFunction CodedFunction::make(double zeta, std::vector<double> times, std::vector<double> values,
                                  CodingClass kind) {
    if (!(zeta >= 0.0) || !std::isfinite(zeta)) throw std::invalid_argument("coded function needs a finite zeta >= 0");
    if (times.empty() || times.size() != values.size())
        throw std::invalid_argument("coded function needs matching, nonempty times and values");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0 || times[i] > zeta) throw std::invalid_argument("coded function sample outside [0, zeta]");
        if (i > 0 && !(times[i] > times[i - 1])) throw std::invalid_argument("coded function times must increase");
        if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
            throw std::invalid_argument("coded function values must be finite and nonnegative");
    }
    CodedFunction h;
    h.zeta = zeta;
    h.times = std::move(times);
    h.values = std::move(values);
    h.kind = kind;
    return h;
}

double CodedFunction::operator()(double t) const {
    if (t < 0.0 || t > zeta || times.empty()) return 0.0;
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return values.front();
    std::size_t k = (it - times.begin()) - 1;
    if (kind == CodingClass::FiniteRange || k + 1 == times.size()) return values[k];
    double w = (t - times[k]) / (times[k + 1] - times[k]);
    return values[k] + w * (values[k + 1] - values[k]);
}

double CodedFunction::bridge_min(double s, double t) const {
    double lo = std::min(s, t), hi = std::max(s, t);
    double m = std::min((*this)(lo), (*this)(hi));
    auto first = std::upper_bound(times.begin(), times.end(), lo);
    auto last = std::lower_bound(times.begin(), times.end(), hi);
    if (kind == CodingClass::FiniteRange) last = std::upper_bound(times.begin(), times.end(), hi);
    for (auto it = first; it < last; ++it) m = std::min(m, values[it - times.begin()]);
    return m;
}

double CodedFunction::max_value() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

CodedFunction CodedFunction::scaled(double a) const {
    if (!(a >= 0.0)) throw std::invalid_argument("scale factor must be nonnegative");
    CodedFunction h = *this;
    for (auto& v : h.values) v *= a;
    return h;
}

double d_h(const CodedFunction& h, double s, double t) {
    if (s < 0.0 || s > h.zeta || t < 0.0 || t > h.zeta) throw std::invalid_argument("d_h arguments outside [0, zeta]");
    return std::max(0.0, h(s) + h(t) - 2.0 * h.bridge_min(s, t));
}

double FiniteMeasuredMetricSpace::total_mass() const { return std::accumulate(mass.begin(), mass.end(), 0.0); }

double FiniteMeasuredMetricSpace::diameter() const {
    double d = 0.0;
    for (const auto& row : dist)
        for (double v : row) d = std::max(d, v);
    return d;
}

double FiniteMeasuredMetricSpace::triangle_excess() const {
    const int n = size();
    double worst = -kInf;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) worst = std::max(worst, dist[a][c] - dist[a][b] - dist[b][c]);
    return n == 0 ? 0.0 : worst;
}

bool FiniteMeasuredMetricSpace::symmetric(double tol) const {
    for (int a = 0; a < size(); ++a) {
        if (std::fabs(dist[a][a]) > tol) return false;
        for (int b = 0; b < a; ++b)
            if (std::fabs(dist[a][b] - dist[b][a]) > tol) return false;
    }
    return true;
}

FiniteMeasuredMetricSpace FiniteMeasuredMetricSpace::single_point(double mass) {
    FiniteMeasuredMetricSpace s;
    s.dist = {{0.0}};
    s.mass = {mass};
    s.representative = {0.0};
    return s;
}

FiniteMeasuredMetricSpace merge_coincident(const FiniteMeasuredMetricSpace& s) {
    const int n = s.size();
    UnionFind uf(n);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (s.dist[a][b] < kMergeTol) uf.unite(a, b);
    std::vector<int> cls(n, -1), reps;
    for (int a = 0; a < n; ++a) {
        int r = uf.find(a);
        if (cls[r] < 0) {
            cls[r] = static_cast<int>(reps.size());
            reps.push_back(a);
        }
        cls[a] = cls[r];
    }
    FiniteMeasuredMetricSpace out;
    const int k = static_cast<int>(reps.size());
    out.mass.assign(k, 0.0);
    out.dist.assign(k, std::vector<double>(k, 0.0));
    for (int a = 0; a < n; ++a) out.mass[cls[a]] += s.mass[a];
    for (int a = 0; a < k; ++a) {
        out.representative.push_back(s.representative.empty() ? 0.0 : s.representative[reps[a]]);
        for (int b = 0; b < k; ++b) out.dist[a][b] = a == b ? 0.0 : s.dist[reps[a]][reps[b]];
    }
    return out;
}

FiniteMeasuredMetricSpace quotient_space(const CodedFunction& h, int sample_count) {
    return shortcut_graph(h, {}, 0.0, sample_count);
}

FiniteMeasuredMetricSpace shortcut_graph(const CodedFunction& h, const ShortcutPairs& pairs, double eps,
                                         int sample_count) {
    if (sample_count < 2) throw std::invalid_argument("need at least two samples");
    if (!(eps >= 0.0)) throw std::invalid_argument("shortcut length must be nonnegative");
    std::vector<double> times(sample_count), mass(sample_count, h.zeta / sample_count);
    for (int i = 0; i < sample_count; ++i) times[i] = h.zeta * i / (sample_count - 1);
    std::vector<std::pair<int, int>> ends;
    for (const auto& [u, v] : pairs) {
        if (u < 0.0 || u > h.zeta || v < 0.0 || v > h.zeta)
            throw std::invalid_argument("shortcut endpoint outside [0, zeta]");
        int iu = static_cast<int>(times.size());
        times.push_back(u);
        mass.push_back(0.0);
        times.push_back(v);
        mass.push_back(0.0);
        ends.emplace_back(iu, iu + 1);
    }
    FiniteMeasuredMetricSpace s;
    s.dist = coded_distances(h, times);
    s.mass = mass;
    s.representative = times;
    if (!ends.empty()) {
        // Shortest paths among shortcut endpoints, then route every pair through them.
        std::vector<int> node;
        for (const auto& [a, b] : ends) {
            node.push_back(a);
            node.push_back(b);
        }
        const int q = static_cast<int>(node.size());
        std::vector<std::vector<double>> g(q, std::vector<double>(q));
        for (int a = 0; a < q; ++a)
            for (int b = 0; b < q; ++b) g[a][b] = s.dist[node[a]][node[b]];
        for (int e = 0; e < q / 2; ++e) {
            double len = std::min(eps, g[2 * e][2 * e + 1]);
            g[2 * e][2 * e + 1] = g[2 * e + 1][2 * e] = len;
        }
        for (int k = 0; k < q; ++k)
            for (int a = 0; a < q; ++a)
                for (int b = 0; b < q; ++b) g[a][b] = std::min(g[a][b], g[a][k] + g[k][b]);
        const int n = static_cast<int>(times.size());
        std::vector<std::vector<double>> d = s.dist;
        for (int x = 0; x < n; ++x)
            for (int y = x + 1; y < n; ++y) {
                double best = d[x][y];
                for (int a = 0; a < q; ++a) {
                    double head = s.dist[x][node[a]];
                    if (head >= best) continue;
                    for (int b = 0; b < q; ++b) best = std::min(best, head + g[a][b] + s.dist[node[b]][y]);
                }
                d[x][y] = d[y][x] = best;
            }
        s.dist = std::move(d);
    }
    return merge_coincident(s);
}

double four_point_excess(const CodedFunction& h, double s1, double s2, double s3, double s4) {
    return d_h(h, s1, s2) + d_h(h, s3, s4) -
           std::max(d_h(h, s1, s3) + d_h(h, s2, s4), d_h(h, s1, s4) + d_h(h, s2, s3));
}

double prokhorov_distance(const std::vector<std::vector<double>>& d, const std::vector<double>& mu,
                          const std::vector<double>& nu) {
    const int n = static_cast<int>(mu.size());
    if (static_cast<int>(nu.size()) != n || static_cast<int>(d.size()) != n)
        throw std::invalid_argument("measures and metric must share the point set");
    auto one_way = [&](const std::vector<double>& p, const std::vector<double>& q) {
        std::vector<int> support;
        for (int i = 0; i < n; ++i)
            if (p[i] > 0.0) support.push_back(i);
        if (support.size() > 20) throw std::invalid_argument("Prokhorov enumeration limited to 20 atoms");
        double worst = 0.0;
        const std::uint32_t subsets = 1u << support.size();
        std::vector<std::pair<double, double>> radius(n);
        for (std::uint32_t mask = 1; mask < subsets; ++mask) {
            double pf = 0.0;
            for (std::size_t k = 0; k < support.size(); ++k)
                if (mask & (1u << k)) pf += p[support[k]];
            for (int x = 0; x < n; ++x) {
                double r = kInf;
                for (std::size_t k = 0; k < support.size(); ++k)
                    if (mask & (1u << k)) r = std::min(r, d[x][support[k]]);
                radius[x] = {r, q[x]};
            }
            std::sort(radius.begin(), radius.end());
            // Smallest delta with pf <= q(F^delta) + delta; q(F^delta) is a step function of delta.
            double covered = 0.0;
            double need = kInf;
            for (int x = 0; x < n;) {
                double r = radius[x].first;
                while (x < n && radius[x].first == r) covered += radius[x++].second;
                double next = x < n ? radius[x].first : kInf;
                double cand = std::max(r, pf - covered);
                if (cand < next) {
                    need = cand;
                    break;
                }
            }
            worst = std::max(worst, need);
        }
        return worst;
    };
    return std::max(one_way(mu, nu), one_way(nu, mu));
}

GhpSearch ghp_exact_small(const FiniteMeasuredMetricSpace& a, const FiniteMeasuredMetricSpace& b,
                          int prokhorov_candidates) {
    if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("GHP needs nonempty spaces");
    if (a.size() > 6 || b.size() > 6) throw std::invalid_argument("exact-small GHP is limited to six points");
    struct Candidate {
        double hausdorff;
        std::vector<std::pair<int, int>> rel;
        double r;
    };
    std::vector<Candidate> all;
    auto enumerate = [&](const FiniteMeasuredMetricSpace& src, const FiniteMeasuredMetricSpace& dst, bool swap) {
        std::vector<int> f(src.size(), 0);
        for (;;) {
            auto rel = complete_map(f, src, dst);
            if (swap)
                for (auto& p : rel) std::swap(p.first, p.second);
            double r = distortion_of(rel, a, b) / 2.0;
            auto d = union_metric(rel, r, a, b);
            all.push_back({hausdorff_in_union(d, a.size(), b.size()), std::move(rel), r});
            int pos = 0;
            while (pos < src.size() && ++f[pos] == dst.size()) f[pos++] = 0;
            if (pos == src.size()) break;
        }
    };
    enumerate(a, b, false);
    enumerate(b, a, true);
    std::sort(all.begin(), all.end(), [](const Candidate& x, const Candidate& y) { return x.hausdorff < y.hausdorff; });
    GhpSearch out;
    out.correspondences = static_cast<long>(all.size());
    out.value = kInf;
    const int na = a.size(), nb = b.size();
    const std::size_t keep = std::min<std::size_t>(all.size(), std::max(1, prokhorov_candidates));
    for (std::size_t c = 0; c < keep; ++c) {
        if (all[c].hausdorff >= out.value) break;
        auto d = union_metric(all[c].rel, all[c].r, a, b);
        std::vector<double> mu(na + nb, 0.0), nu(na + nb, 0.0);
        for (int i = 0; i < na; ++i) mu[i] = a.mass[i];
        for (int j = 0; j < nb; ++j) nu[na + j] = b.mass[j];
        double pr = prokhorov_distance(d, mu, nu);
        if (all[c].hausdorff + pr < out.value) {
            out.value = all[c].hausdorff + pr;
            out.hausdorff = all[c].hausdorff;
            out.prokhorov = pr;
        }
    }
    return out;
}

double sup_distance(const CodedFunction& a, const CodedFunction& b) {
    std::vector<double> pts(a.times);
    pts.insert(pts.end(), b.times.begin(), b.times.end());
    pts.push_back(a.zeta);
    pts.push_back(b.zeta);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double sup = 0.0;
    for (double t : pts) {
        sup = std::max(sup, std::fabs(extended(a, t) - extended(b, t)));
        sup = std::max(sup, std::fabs(extended_left(a, t) - extended_left(b, t)));
    }
    return sup;
}

double modulus_of_continuity(const CodedFunction& h, double delta) {
    if (!(delta >= 0.0)) throw std::invalid_argument("delta must be nonnegative");
    if (delta == 0.0) return 0.0;
    std::vector<double> pts;
    for (double t : h.times) {
        pts.push_back(t);
        pts.push_back(t + delta);
        if (t - delta >= 0.0) pts.push_back(t - delta);
    }
    pts.push_back(h.zeta);
    pts.push_back(h.zeta + delta);
    if (h.zeta - delta >= 0.0) pts.push_back(h.zeta - delta);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<double> val(pts.size()), left(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        val[i] = extended(h, pts[i]);
        left[i] = extended_left(h, pts[i]);
    }
    double w = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double hi = val[i], lo = val[i];
        for (std::size_t j = i + 1; j < pts.size() && pts[j] <= pts[i] + delta; ++j) {
            hi = std::max({hi, val[j], left[j]});
            lo = std::min({lo, val[j], left[j]});
        }
        w = std::max(w, hi - lo);
    }
    return w;
}

double ghp_coded_bound(const CodedGraph& a, const CodedGraph& b, double delta) {
    if (a.marks.size() != b.marks.size()) throw std::invalid_argument("coded graphs must carry the same number of marks");
    const double q = static_cast<double>(a.marks.size());
    for (std::size_t i = 0; i < a.marks.size(); ++i) {
        delta = std::max(delta, std::fabs(a.marks[i].first - b.marks[i].first));
        delta = std::max(delta, std::fabs(a.marks[i].second - b.marks[i].second));
    }
    return 6.0 * (q + 1.0) * (sup_distance(a.h, b.h) + modulus_of_continuity(a.h, delta)) +
           3.0 * q * std::max(a.eps, b.eps) + std::fabs(a.h.zeta - b.h.zeta);
}

double shortcut_ghp_bound(double a, int q, double eps) {
    if (!(a > 0.0) || q < 0 || !(eps >= 0.0)) throw std::invalid_argument("invalid shortcut bound arguments");
    return q * (2.0 * eps + a) + a;
}

SimpleGraph surplus_modified_graph(const ExplorationRecord& rec, const std::vector<Edge>& surplus) {
    const int n = rec.n;
    SimpleGraph g;
    g.adj.assign(n + rec.m, {});
    auto link = [&](int u, int v) {
        g.adj[u].push_back(v);
        g.adj[v].push_back(u);
    };
    for (int v = 0; v < n + rec.m; ++v)
        if (rec.forest.parent[v] >= 0) link(v, rec.forest.parent[v]);
    for (const auto& [b, w] : surplus) {
        int p = rec.forest.parent[n + w];
        if (p < 0 || p == b) continue;
        link(b, p);
    }
    for (auto& a : g.adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return g;
}

DistortionReport distortion_certificate(const BipartiteGraph& g, const ComponentRecord& component,
                                        const SimpleGraph& modified) {
    if (modified.size() != g.n() + g.m()) throw std::invalid_argument("modified graph must share the vertex set");
    std::vector<int> members(component.blacks);
    for (int w : component.whites) members.push_back(g.n() + w);
    DistortionReport r;
    r.surplus = component.surplus;
    if (members.empty()) return r;
    std::vector<char> in(modified.size(), 0);
    for (int v : members) in[v] = 1;
    auto reach = bfs_distances(modified, members.front());
    for (int v = 0; v < modified.size(); ++v)
        if ((reach[v] != kUnreachable) != static_cast<bool>(in[v])) r.component_preserved = false;
    for (int u : members) {
        auto du = bfs_distances(g, u);
        auto dm = bfs_distances(modified, u);
        for (int v : members) {
            if (dm[v] == kUnreachable) continue;
            r.max_distortion = std::max(r.max_distortion, std::fabs(static_cast<double>(du[v]) - dm[v]));
        }
    }
    return r;
}

void write_space_csv(std::ostream& os, const FiniteMeasuredMetricSpace& s) {
    os << "point,mass";
    for (int j = 0; j < s.size(); ++j) os << ",d" << j;
    os << '\n';
    os.precision(17);
    for (int i = 0; i < s.size(); ++i) {
        os << i << ',' << s.mass[i];
        for (int j = 0; j < s.size(); ++j) os << ',' << s.dist[i][j];
        os << '\n';
    }
}

}  // namespace rig
