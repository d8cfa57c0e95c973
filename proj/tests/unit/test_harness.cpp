#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <rig/harness.hpp>
#include <rig/stats.hpp>

using namespace rig;

namespace {

ExperimentConfig small_config(long n, int replicates) {
    ExperimentConfig c;
    c.pair = make_critical_pair(WeightSpec::point_mass(1.0, 'b'), WeightSpec::point_mass(1.0, 'w'), 1.0, n);
    c.replicates = replicates;
    c.seed = 5;
    c.threads = 1;
    return c;
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("rig_harness_" + name);
    std::filesystem::remove_all(p);
    return p;
}

long line_count(const std::filesystem::path& p) {
    std::ifstream in(p);
    long n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

ExplorationRecord figure_two() {
    std::vector<double> x(6, 1.0), y(5, 1.0);
    return explore(x, y, 1.0, ClockSet{{2.7, 1.0, 3.5, 1.5, 2.0, 6.0}, {1.5, 5.5, 4.5, 0.3, 0.7}});
}

}  // namespace

TEST_CASE("configuration and report JSON round-trip") {
    ExperimentConfig c = small_config(300, 4);
    c.surplus = SurplusSampler::Direct;
    c.limit.paths = 17;
    c.time_budget = 2.5;
    nlohmann::json j = c;
    CHECK(j["schema_version"] == kReportSchemaVersion);
    ExperimentConfig back = j.get<ExperimentConfig>();
    CHECK(nlohmann::json(back) == j);

    RunReport r = run_discrete(small_config(300, 6));
    nlohmann::json rj = r;
    RunReport parsed = rj.get<RunReport>();
    CHECK(parsed == r);
    CHECK(report_hash(parsed) == report_hash(r));

    nlohmann::json broken = j;
    broken["replicates"] = 0;
    CHECK_THROWS_AS(broken.get<ExperimentConfig>().validate(), std::invalid_argument);
}

TEST_CASE("runs are deterministic across thread counts") {
    ExperimentConfig c = small_config(400, 24);
    RunReport one = run_discrete(c);
    c.threads = 3;
    RunReport three = run_discrete(c);
    CHECK(one.replicates == three.replicates);
    three.config.threads = 1;
    CHECK(report_hash(one) == report_hash(three));
    CHECK(report_hash(one) == report_hash(run_discrete(small_config(400, 24))));
    CHECK_FALSE(one.partial);
    CHECK(one.replicates.size() == 24);
    for (int r = 0; r < 24; ++r) CHECK(one.replicates[r].seed == c.replicate_seed(r));
    c.seed = 6;
    CHECK(report_hash(run_discrete(c)) != report_hash(one));
}

TEST_CASE("replicates without a nontrivial component are flagged") {
    RunReport r = run_discrete(small_config(1, 200));
    int empty = 0;
    for (const auto& rep : r.replicates) empty += rep.nontrivial == 0 ? 1 : 0;
    CHECK(r.empty_replicates == empty);
    CHECK(empty > 0);
    CHECK(empty < 200);
}

TEST_CASE("emit writes CSV and JSON, and rejects unwritable targets") {
    RunReport empty;
    empty.config = small_config(10, 1);
    auto dir = scratch_dir("empty");
    emit(empty, dir.string());
    CHECK(line_count(dir / "components.csv") == 1);
    CHECK(std::filesystem::exists(dir / "summary.json"));

    RunReport r = run_discrete(small_config(300, 5));
    auto full = scratch_dir("full");
    emit(r, full.string());
    std::ifstream in(full / "summary.json");
    nlohmann::json j = nlohmann::json::parse(in);
    CHECK(j["hash"].get<std::uint64_t>() == report_hash(r));
    j.erase("hash");
    CHECK(j.get<RunReport>() == r);
    long rows = 0;
    for (const auto& rep : r.replicates) rows += static_cast<long>(rep.top_x.size());
    CHECK(line_count(full / "components.csv") == rows + 1);

    std::ofstream blocker(full / "blocker");
    blocker << "file";
    blocker.close();
    CHECK_THROWS_AS(emit(r, (full / "blocker" / "sub").string()), std::runtime_error);
}

TEST_CASE("comparison with the limit ensemble") {
    ExperimentConfig c = small_config(1000, 1);
    LimitEnsembleConfig lc;
    lc.paths = 200;
    lc.seed = 3;
    LimitEnsemble e = simulate_limit_ensemble(LimitParams::unit(), lc, 2);

    // A report whose rescaled masses are the ensemble itself.
    RunReport self;
    self.config = c;
    self.scaling = c.scaling();
    for (const auto& l : e.lengths) {
        ReplicateRecord rec;
        rec.nontrivial = 2;
        for (int k = 0; k < 2; ++k) {
            ComponentObservation o;
            o.x_mass = l[k] * self.scaling.b;
            o.y_mass = l[k] * self.scaling.b;
            o.x_rank = o.y_rank = k + 1;
            rec.top_x.push_back(o);
            rec.top_y_mass.push_back(o.y_mass);
        }
        self.replicates.push_back(rec);
    }
    LimitComparison cmp = compare_with_limit(self, e);
    CHECK(cmp.pass);
    for (const auto& line : cmp.lines) {
        // Rescaling by b and back can move a value by one ulp.
        CHECK(line.ks_y <= 0.02);
        CHECK(line.ks_x <= 0.02);
    }
    CHECK_FALSE(compare_with_limit(self, e, 0.5).pass);

    LimitEnsemble short_one = simulate_limit_ensemble(LimitParams::unit(), lc, 1);
    CHECK_THROWS_AS(compare_with_limit(self, short_one), std::invalid_argument);
    LimitEnsemble wrong = e;
    wrong.params.regime = 2;
    CHECK_THROWS_AS(compare_with_limit(self, wrong), std::invalid_argument);
    RunReport none = self;
    none.replicates.clear();
    CHECK_THROWS_AS(compare_with_limit(none, e), std::invalid_argument);
}

TEST_CASE("ranking consistency") {
    RunReport r = run_discrete(small_config(300, 1));
    RankingConsistency rc = ranking_consistency(r, 1);
    CHECK((rc.agreement == 0.0 || rc.agreement == 1.0));
    CHECK(rc.target == 1.0);
    CHECK_THROWS_AS(ranking_consistency(r, 3), std::invalid_argument);

    RunReport many = run_discrete(small_config(2000, 60));
    RankingConsistency m = ranking_consistency(many, 1);
    CHECK(m.used == 60 - many.empty_replicates);
    CHECK(m.agreement > 0.5);
    CHECK(std::fabs(m.ratio_mean - 1.0) < 0.2);
}

TEST_CASE("Poissonized surplus: empty region and the hand-traced fixture") {
    ExplorationRecord quiet = explore({1.0, 1.0}, {1.0}, 1.0, ClockSet{{0.1, 0.2}, {9.0}});
    Encoding qe = encode(quiet);
    PoissonizedSurplus none = poissonized_surplus(quiet, qe, 1);
    CHECK(none.marks.empty());
    CHECK(none.area == 0.0);

    // b4 is served on (1.5, 2.5) on top of the load 1.5 left by b2: an atom at height below
    // 1.5 reaches back to b2's arrival, one above it stays with b4 (a self-loop).
    ExplorationRecord rec = figure_two();
    Encoding enc = encode(rec);
    int low = 0, high = 0, strip = 0;
    double count = 0.0, area = 0.0;
    for (std::uint64_t s = 0; s < 400; ++s) {
        PoissonizedSurplus ps = poissonized_surplus(rec, enc, s);
        count += static_cast<double>(ps.marks.size());
        area = ps.area;
        for (const auto& m : ps.marks) {
            CHECK(m.t_prime <= m.t);
            CHECK(m.y <= enc.z.queue_load.reflected(m.t) + 1e-12);
            if (m.b == 3 && m.t > 1.5 && m.t < 2.5) {
                if (m.y < 1.5) {
                    ++low;
                    CHECK(m.t_prime == 1.0);
                    CHECK(m.b_prime == 1);
                } else {
                    ++high;
                    CHECK(m.t_prime == 1.5);
                    CHECK(m.b_prime == 3);
                }
            }
            if (m.b == 4) {
                ++strip;
                CHECK(m.t == 2.0);
                CHECK(m.b_prime == (m.y < 1.5 ? 1 : 3));
            }
        }
        for (const auto& [b, bp] : ps.pairs) CHECK(b != bp);
    }
    CHECK(low > 0);
    CHECK(high > 0);
    CHECK(strip > 0);
    CHECK(std::fabs(count / 400.0 - area / rec.z) <= 4.0 * std::sqrt(area / rec.z / 400.0));
}

TEST_CASE("Poissonized and direct surplus counts share one law") {
    const std::vector<double> x{1.0, 1.5, 0.7, 1.2}, y{1.3, 0.8, 1.0, 1.1};
    const double z = 2.0;
    std::map<long, double> direct, poisson;
    Rng rng = make_rng(99);
    for (int r = 0; r < 10000; ++r) {
        ClockSet c = sample_clocks(x, y, z, rng);
        ExplorationRecord rec = explore(x, y, z, c, ExploreOptions{false});
        auto d = surplus_per_component(rec, modified_pairs(rec, sample_surplus_direct(rec, z, rng)));
        auto p = surplus_per_component(rec, poissonized_surplus(rec, encode(rec), rng).pairs);
        for (long v : d) direct[v] += 1.0;
        for (long v : p) poisson[v] += 1.0;
    }
    long top = std::max(direct.rbegin()->first, poisson.rbegin()->first);
    std::vector<double> a(top + 1, 0.0), b(top + 1, 0.0);
    for (const auto& [k, v] : direct) a[k] = v;
    for (const auto& [k, v] : poisson) b[k] = v;
    CHECK(a.size() >= 2);
    ChiSquareResult res = chi_square_homogeneity(a, b);
    CAPTURE(res.statistic);
    CHECK(res.p_value > 0.01);
}
