#ifndef RIG_HARNESS_HPP
#define RIG_HARNESS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include <rig/encoding.hpp>
#include <rig/graph_core.hpp>
#include <rig/limit_sim.hpp>
#include <rig/lifo_explorer.hpp>
#include <rig/poisson_model.hpp>

namespace rig {

constexpr int kReportSchemaVersion = 1;

enum class SurplusSampler { Poissonized, Direct };

struct LimitEnsembleConfig {
    int paths = 2000;
    double horizon = 10.0;
    double step = 1e-3;
    std::uint64_t seed = 7;
};

struct ExperimentConfig {
    CriticalPair pair;
    int replicates = 2000;
    std::uint64_t seed = 1;
    int top_k = 2;
    SurplusSampler surplus = SurplusSampler::Poissonized;
    LimitEnsembleConfig limit;
    std::string out_dir = "out";
    int threads = 0;             // 0 uses the hardware concurrency
    double time_budget = 0.0;    // seconds; 0 means unlimited

    void validate() const;
    // a_n (space) and b_n (time/mass) scales of the classified regime.
    ScalingExponents scaling() const;
    std::uint64_t replicate_seed(int r) const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

struct ComponentObservation {
    double x_mass = 0.0;
    double y_mass = 0.0;
    long surplus = 0;
    int diameter = 0;
    bool diameter_exact = true;  // false when a double BFS sweep gave a lower bound
    int x_rank = 0;              // 1-based rank among nontrivial components
    int y_rank = 0;
    int blacks = 0;
    int whites = 0;

    bool operator==(const ComponentObservation&) const = default;
};

struct ReplicateRecord {
    std::uint64_t seed = 0;
    int nontrivial = 0;                       // kappa
    std::vector<ComponentObservation> top_x;  // top-K by x_mass
    std::vector<double> top_y_mass;           // top-K y masses (y ranking)
    bool ranking_agrees = false;              // x and y rankings agree on the top K

    bool operator==(const ReplicateRecord&) const = default;
};

struct RunReport {
    ExperimentConfig config;
    ScalingExponents scaling;
    std::vector<ReplicateRecord> replicates;
    int empty_replicates = 0;  // replicates without a nontrivial component
    bool partial = false;      // time budget exhausted

    // k is 1-based; missing ranks contribute 0.
    std::vector<double> rescaled_y(int k, double exponent = -1.0) const;
    std::vector<double> rescaled_x(int k, double exponent = -1.0) const;
    std::vector<double> rescaled_diameter(int k) const;
};

void to_json(nlohmann::json& j, const RunReport& r);
void from_json(const nlohmann::json& j, RunReport& r);
bool operator==(const RunReport& a, const RunReport& b);

// Components of the LIFO forest with surplus pairs attached; used by run_discrete.
ReplicateRecord observe_replicate(const ExplorationRecord& rec, const std::vector<std::pair<int, int>>& surplus_pairs,
                                  int top_k, std::uint64_t seed);

RunReport run_discrete(const ExperimentConfig& config);

struct DiscreteMark {
    double t = 0.0;
    double t_prime = 0.0;
    double s = 0.0;  // Sigma-transferred first coordinate
    double y = 0.0;
    int b = -1;        // client served at t
    int b_prime = -1;  // client arriving at t'
};

struct PoissonizedSurplus {
    std::vector<DiscreteMark> marks;
    std::vector<std::pair<int, int>> pairs;  // (b, b') with b != b'
    double area = 0.0;
};

// Poisson atoms of rate 1/z on the region under the reflected Z, first coordinate
// transferred through Sigma; each atom maps to the client pair it designates.
PoissonizedSurplus poissonized_surplus(const ExplorationRecord& rec, const Encoding& enc, std::uint64_t seed);
PoissonizedSurplus poissonized_surplus(const ExplorationRecord& rec, const Encoding& enc, Rng& rng);

// (V, black parent of w) for each direct surplus edge (V, w).
std::vector<std::pair<int, int>> modified_pairs(const ExplorationRecord& rec, const std::vector<Edge>& surplus);

// Distinct unordered pairs per tree of the LIFO forest, indexed by root order.
std::vector<long> surplus_per_component(const ExplorationRecord& rec, const std::vector<std::pair<int, int>>& pairs);

struct LimitEnsemble {
    LimitParams params;
    std::vector<std::vector<double>> lengths;  // per path, the top-K excursion lengths (0 if absent)

    std::vector<double> kth(int k) const;
};

LimitEnsemble simulate_limit_ensemble(const LimitParams& p, const LimitEnsembleConfig& cfg, int top_k);

constexpr double kKsThreshold = 0.1;

struct KsLine {
    int k = 1;
    double ks_y = 0.0;  // rescaled y mass vs excursion length
    double ks_x = 0.0;  // rescaled x mass vs rho * excursion length
    bool pass = false;
};

struct LimitComparison {
    std::vector<KsLine> lines;
    double threshold = kKsThreshold;
    bool pass = false;
};

// Throws std::invalid_argument when the ensemble does not carry the requested ranks.
LimitComparison compare_with_limit(const RunReport& report, const LimitEnsemble& ensemble,
                                   double exponent = -1.0);

struct RankingConsistency {
    double agreement = 0.0;
    double ratio_mean = 0.0;  // mean x_mass / y_mass of the top component
    double ratio_se = 0.0;
    double target = 0.0;      // rho
    long used = 0;
};

RankingConsistency ranking_consistency(const RunReport& report, int k);

// FNV-1a hash of the canonical JSON dump.
std::uint64_t report_hash(const RunReport& report);

// Writes components.csv and summary.json into `dir`; throws std::runtime_error if unwritable.
void emit(const RunReport& report, const std::string& dir);

struct IdentityTally {
    std::string name;
    long checked = 0;
    long violations = 0;
    double worst = 0.0;  // largest discrepancy seen
};

struct IdentitySuite {
    std::vector<IdentityTally> tallies;
    long instances = 0;
    bool ok() const;
};

// Random instances with n, m <= max_size and weights drawn from a random mix of laws; every exact
// identity of the encoding is checked at tolerance `tol`.
IdentitySuite run_identity_suite(int instances, std::uint64_t seed, int max_size = 50, double tol = 1e-9);

}  // namespace rig

#endif
