#ifndef RIG_METRIC_SPACE_HPP
#define RIG_METRIC_SPACE_HPP

#include <iosfwd>
#include <utility>
#include <vector>

#include <rig/graph_core.hpp>
#include <rig/lifo_explorer.hpp>

namespace rig {

// Distances below this are treated as zero when building quotients.
constexpr double kMergeTol = 1e-9;

enum class CodingClass { Continuous, FiniteRange };

// Nonnegative function on [0, zeta]. Continuous codes interpolate linearly between
// samples; finite-range codes are right-continuous step functions.
struct CodedFunction {
    double zeta = 0.0;
    std::vector<double> times;
    std::vector<double> values;
    CodingClass kind = CodingClass::Continuous;

    static CodedFunction make(double zeta, std::vector<double> times, std::vector<double> values,
                              CodingClass kind);
    // h = 0 beyond zeta.
    double operator()(double t) const;
    // min of h over [min(s,t), max(s,t)].
    double bridge_min(double s, double t) const;
    double max_value() const;
    CodedFunction scaled(double a) const;
};

double d_h(const CodedFunction& h, double s, double t);

struct FiniteMeasuredMetricSpace {
    std::vector<std::vector<double>> dist;
    std::vector<double> mass;
    std::vector<double> representative;  // a preimage time of each point, when coded

    int size() const { return static_cast<int>(mass.size()); }
    double total_mass() const;
    double diameter() const;
    // Largest amount by which d(a,c) exceeds d(a,b) + d(b,c).
    double triangle_excess() const;
    bool symmetric(double tol = kMergeTol) const;

    static FiniteMeasuredMetricSpace single_point(double mass);
};

// Merges points at distance < kMergeTol, summing their masses.
FiniteMeasuredMetricSpace merge_coincident(const FiniteMeasuredMetricSpace& s);

// Uniform samples t_i = i zeta / (N - 1), each carrying mass zeta / N.
FiniteMeasuredMetricSpace quotient_space(const CodedFunction& h, int sample_count);

using ShortcutPairs = std::vector<std::pair<double, double>>;

// Shortcut endpoints join the sample set with zero mass; each pair (u, v) becomes an
// edge of length min(eps, d_h(u, v)). eps = 0 re-quotients the coincident points.
FiniteMeasuredMetricSpace shortcut_graph(const CodedFunction& h, const ShortcutPairs& pairs, double eps,
                                         int sample_count);

// Four-point condition on (s1, s2, s3, s4); returns the excess of the left side (<= 0 when it holds).
double four_point_excess(const CodedFunction& h, double s1, double s2, double s3, double s4);

// Prokhorov distance between two measures on one finite metric space.
double prokhorov_distance(const std::vector<std::vector<double>>& d, const std::vector<double>& mu,
                          const std::vector<double>& nu);

struct GhpSearch {
    double value = 0.0;         // smallest Hausdorff + Prokhorov found
    double hausdorff = 0.0;
    double prokhorov = 0.0;
    long correspondences = 0;   // correspondences examined
};

// Upper bound on the GHP distance from a restricted search. Each map f: A -> B (and each
// map B -> A) is completed greedily to a correspondence R; the disjoint union carries the
// metric d(a, b) = inf_{(a',b') in R} d_A(a, a') + dis(R)/2 + d_B(b', b). The best
// `prokhorov_candidates` correspondences by Hausdorff distance are scored in full.
// Both spaces must have at most six points.
GhpSearch ghp_exact_small(const FiniteMeasuredMetricSpace& a, const FiniteMeasuredMetricSpace& b,
                          int prokhorov_candidates = 256);

struct CodedGraph {
    CodedFunction h;
    ShortcutPairs marks;  // (s_i, t_i) with s_i <= t_i
    double eps = 0.0;
};

// sup |h1 - h2| over the union of sample times (and interval midpoints), h extended by 0.
double sup_distance(const CodedFunction& a, const CodedFunction& b);
// delta-modulus of continuity of the extension of h by 0.
double modulus_of_continuity(const CodedFunction& h, double delta);

// 6(q+1)(|h1 - h2| + w_delta(h1)) + 3q max(eps1, eps2) + |zeta1 - zeta2|, where delta is
// raised to the largest mark displacement if the given value is smaller.
double ghp_coded_bound(const CodedGraph& a, const CodedGraph& b, double delta = 0.0);

// q (2 eps + a) + a for the comparison of G(a h, Pi, eps) with T_{a h}.
double shortcut_ghp_bound(double a, int q, double eps);

enum class GhpMode { ExactSmall, CodedBound };

// Graph obtained from the LIFO forest by replacing each surplus edge (b, w) with the
// edge from b to the black parent of w. Vertex ids: black i is i, white j is n + j.
SimpleGraph surplus_modified_graph(const ExplorationRecord& rec, const std::vector<Edge>& surplus);

struct DistortionReport {
    double max_distortion = 0.0;
    long surplus = 0;
    bool component_preserved = true;
    bool ok() const { return component_preserved && max_distortion <= static_cast<double>(surplus) + 1e-9; }
};

DistortionReport distortion_certificate(const BipartiteGraph& g, const ComponentRecord& component,
                                        const SimpleGraph& modified);

// CSV: header "point,mass,d0,d1,...", one row per point.
void write_space_csv(std::ostream& os, const FiniteMeasuredMetricSpace& s);

}  // namespace rig

#endif
