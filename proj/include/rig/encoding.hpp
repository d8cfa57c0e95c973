#ifndef RIG_ENCODING_HPP
#define RIG_ENCODING_HPP

#include <functional>
#include <iosfwd>
#include <limits>
#include <vector>

#include <rig/lifo_explorer.hpp>

namespace rig {

// Tolerance on comparisons of accumulated jump sums.
constexpr double kPathTol = 1e-12;

// Right-continuous path slope * t + sum of sizes over jump times <= t.
struct StepPath {
    double slope = 0.0;
    std::vector<double> times;
    std::vector<double> sizes;
    std::vector<int> labels;  // client carried by each jump, -1 if none
    std::vector<double> cumulative;
    double horizon = std::numeric_limits<double>::infinity();

    static StepPath make(double slope, std::vector<double> times, std::vector<double> sizes,
                         std::vector<int> labels = {});

    double value(double t) const;
    double left_limit(double t) const;
    double total_jump() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
    // inf_{u <= t} of the path; valid for nonincreasing drift.
    double running_infimum(double t) const;
    double reflected(double t) const { return value(t) - running_infimum(t); }

  private:
    std::vector<double> prefix_min_left_;
};

struct LambdaPaths {
    StepPath x;
    StepPath y;
};

LambdaPaths lambda_paths(const ExplorationRecord& rec);

struct ZProcess {
    StepPath queue_load;   // drift -1, jumps delta_bi at the black clocks
    StepPath composition;  // -t + Lambda^y(Lambda^x(t))
    double max_discrepancy = 0.0;
};

// Builds Z both ways; throws std::logic_error if the jump structures differ by more than 1e-9.
ZProcess z_process(const ExplorationRecord& rec);

enum class HeightRule { NonStrict, Strict };

// Integer path with value `at[k]` at times[k] and `after[k]` on (times[k], times[k+1]).
struct HeightPath {
    std::vector<double> times;
    std::vector<int> at;
    std::vector<int> after;

    int value(double t) const;
    int min_on(double s, double t) const;
    int max_value() const;
};

// H_t = #{positive jump times s <= t : Z_{s-} <= inf_{[s,t]} Z} (NonStrict) or with "<" (Strict).
HeightPath height_process(const StepPath& z, HeightRule rule = HeightRule::NonStrict);

// 2 H(E_i) - 1 + 2 * 1{delta_i = 0} for every black vertex.
std::vector<int> vertex_heights(const ExplorationRecord& rec, const HeightPath& h);

struct ServiceSegment {
    double start = 0.0;
    double end = 0.0;
    int client = -1;
    double load_start = 0.0;  // server load at `start`
};

struct ServiceSchedule {
    std::vector<ServiceSegment> segments;  // time ordered, split at every arrival
    std::vector<double> departure;

    int served_at(double t) const;  // -1 when idle
};

ServiceSchedule service_schedule(const std::vector<double>& arrivals, const std::vector<double>& services);

struct TreeDistance {
    bool served = false;  // false when the server is idle at s or t
    int distance = 0;     // kUnreachable across trees
};

TreeDistance tree_distance_via_height(const HeightPath& h, const StepPath& z, double s, double t);

struct ExcursionInterval {
    double g = 0.0;
    double d = 0.0;
    double y_mass = 0.0;
    double x_mass = 0.0;
    int root = -1;
    int component = -1;
};

std::vector<ExcursionInterval> excursions(const StepPath& z, const StepPath& lambda_x);

// Piecewise-linear nondecreasing path given by knots with left and right values.
struct SigmaPath {
    std::vector<double> t;
    std::vector<double> left;
    std::vector<double> right;

    double value(double u) const;
    double left_limit(double u) const;
    // inf{u : Sigma(u) > s}; +inf when s >= total.
    double inverse(double s) const;
    double total() const { return right.empty() ? 0.0 : right.back(); }
};

SigmaPath sigma_transfer(const ServiceSchedule& sched, const std::vector<double>& x,
                         const std::vector<double>& arrivals, const std::vector<double>& services);

// |Sigma(J_k)| for each client.
std::vector<double> sigma_image_measure(const SigmaPath& sigma, const ServiceSchedule& sched,
                                        const std::vector<double>& arrivals, const std::vector<double>& services);

struct Encoding {
    LambdaPaths lambda;
    ZProcess z;
    HeightPath height;
    ServiceSchedule schedule;
    SigmaPath sigma;
    std::vector<ExcursionInterval> excursions;
};

Encoding encode(const ExplorationRecord& rec, HeightRule rule = HeightRule::NonStrict);

void write_path_csv(std::ostream& os, const std::function<double(double)>& f, double t0, double t1, int samples,
                    const char* name = "value");

}  // namespace rig

#endif
