#ifndef RIG_LIMIT_SIM_HPP
#define RIG_LIMIT_SIM_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <rig/metric_space.hpp>
#include <rig/rng.hpp>
#include <rig/weights.hpp>

namespace rig {

struct LimitParams {
    int regime = 1;
    double theta = 1.0;
    double sigma2_b = 1.0;
    double sigma3_b = 1.0;
    double sigma2_w = 1.0;
    double sigma3_w = 1.0;
    double alpha = 2.0;
    double c_b = 0.0;  // tail constant of the black law (regimes 2 and 3)
    double c_w = 0.0;  // tail constant of the white law (regime 3)

    // Throws std::invalid_argument on a regime/parameter mismatch.
    void validate() const;

    double c1() const;
    double c2() const;
    double c3() const;
    // C_i of the active regime.
    double c_active() const;
    // Stable index of the active regime: 2 in regime 1.
    double index() const { return regime == 1 ? 2.0 : alpha; }
    double c_alpha() const;
    double rho() const;
    // Tilt rate sigma_2^b / theta.
    double tilt() const { return sigma2_b / theta; }

    static LimitParams unit(double theta = 1.0);
    static LimitParams from_pair(const CriticalPair& pair);
};

// Psi_i(lambda) = C(a) C_i lambda^a.
double psi(const LimitParams& p, double lambda);

// Values on the grid t_k = k * step, k = 0..N.
struct GridPath {
    double step = 1.0;
    std::vector<double> values;
    std::vector<double> running_inf;
    std::vector<double> jump_times;  // accepted large jumps (stable regimes)
    std::vector<double> jump_sizes;
    bool warning = false;
    std::string note;

    static GridPath make(double step, std::vector<double> values);

    int size() const { return static_cast<int>(values.size()); }
    double horizon() const { return values.empty() ? 0.0 : step * (size() - 1); }
    double time(int k) const { return step * k; }
    double reflected(int k) const { return values[k] - running_inf[k]; }
    // Linear interpolation between grid points.
    double at(double t) const;
};

enum class TiltForm {
    // Compensated jumps with intensity C_i (a+1) e^{-x s sigma_2^b / theta} x^{-a-1}: the law
    // obtained from the exponential density applied to L^(i).
    Girsanov,
    // C_i times the martingale M with intensity (a+1) e^{-x s sigma_2^b / theta} x^{-a-1}.
    ScaledMartingale,
};

struct StableGridOptions {
    double jump_cutoff = 0.0;  // 0 selects step^{1/a}
    TiltForm form = TiltForm::Girsanov;
};

// Requires step <= 1e-3 * horizon unless the horizon is zero.
GridPath simulate_Z(const LimitParams& p, double horizon, double step, std::uint64_t seed,
                    const StableGridOptions& opts = {});
// The martingale M: compensated Poisson jumps of intensity (a+1) e^{-x s sigma_2^b/theta} x^{-a-1} dx ds,
// jumps above the cutoff exact and the rest replaced by a Gaussian of matching variance.
GridPath simulate_M(const LimitParams& p, double horizon, double step, std::uint64_t seed,
                    const StableGridOptions& opts = {});
// log E[exp(-lambda M_t)] in closed form.
double log_laplace_M(const LimitParams& p, double lambda, double t);
// The untilted Levy process L^(i).
GridPath simulate_levy(const LimitParams& p, double horizon, double step, std::uint64_t seed);

// One draw of L^(i)_t: Gaussian in regime 1, otherwise a totally skewed stable variable
// from the Chambers-Mallows-Stuck transform with scale (C(a) C_i |cos(pi a / 2)| t)^{1/a}.
double sample_levy_increment(const LimitParams& p, double t, Rng& rng);

// exp{-int_0^t (sigma_2^b s / theta) dL_s - int_0^t Psi_i(sigma_2^b s / theta) ds}; the
// stochastic integral is the left-point grid sum.
double limit_tilt_density(const GridPath& levy, const LimitParams& p, double t);

// Default occupation width in units of the grid-noise scale; smaller widths are biased upward by the grid.
constexpr double kHeightNoiseMultiple = 8.0;

// Grid-noise scale: sqrt(C_1 h) in regime 1, (C(a) C_i h)^{1/a} otherwise.
double grid_noise_scale(const LimitParams& p, double step);

// Regime 1: (2 / C_1)(Z - inf Z). Other regimes: the epsilon-occupation estimator with
// epsilon = kHeightNoiseMultiple * grid_noise_scale when `epsilon` is 0.
GridPath height_from_Z(const GridPath& z, const LimitParams& p, double epsilon = 0.0);
// (1/eps) * step * #{s_j < t_k : Z_{s_j} <= inf_{[s_j, t_k]} Z + eps}.
GridPath occupation_height(const GridPath& z, double epsilon);

struct LimitExcursion {
    int first = 0;  // first grid cell (t_{first-1}, t_first] with positive reflected value
    int last = 0;
    double g = 0.0;
    double d = 0.0;
    bool near_tie = false;  // length within one grid cell of a neighbour in the ranking

    double length() const { return d - g; }
};

// Maximal runs of grid cells whose right endpoint has a positive reflected value,
// sorted by length (descending) and then by left endpoint.
std::vector<LimitExcursion> rank_excursions(const GridPath& z);

struct Mark {
    double t = 0.0;
    double t_prime = 0.0;
    double s = 0.0;  // first coordinate in the scaled region
    double y = 0.0;
    int cell = 0;
};

struct MarkSet {
    std::vector<Mark> marks;
    double area = 0.0;  // area of the region in the (s, y) coordinates
};

// Grid area of the region under the reflected path, first coordinate scaled by rho.
double mark_region_area(const GridPath& z, const LimitParams& p);
MarkSet sample_marks(const GridPath& z, const LimitParams& p, std::uint64_t seed);
// Latest grid time u <= t_k with reflected value <= y.
double last_time_below(const GridPath& z, int k, double y);

// The k-th (1-based) ranked excursion, time-changed by rho, with its marks as shortcuts (eps = 0).
FiniteMeasuredMetricSpace build_limit_graph(const LimitParams& p, const GridPath& z, const GridPath& h,
                                            const MarkSet& marks, int k, int resolution);
// The coded function and shortcut pairs that build_limit_graph hands to shortcut_graph.
CodedGraph limit_coded_graph(const LimitParams& p, const GridPath& z, const GridPath& h, const MarkSet& marks,
                             int k);

void write_grid_csv(std::ostream& os, const GridPath& z, const GridPath* h = nullptr);
void write_excursion_csv(std::ostream& os, const std::vector<LimitExcursion>& ex);

}  // namespace rig

#endif
