#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <rig/graph_core.hpp>
#include <rig/harness.hpp>
#include <rig/limit_sim.hpp>

namespace {

struct CommonOptions {
    std::string config_path;
    long n = 5000;
    double theta = 1.0;
    std::uint64_t seed = 1;
    int replicates = 0;
    std::string out;
    std::string surplus;
    int threads = 1;
};

rig::ExperimentConfig load_config(const CommonOptions& o) {
    rig::ExperimentConfig c;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw std::runtime_error("cannot read config " + o.config_path);
        c = nlohmann::json::parse(in).get<rig::ExperimentConfig>();
    } else {
        c.pair = rig::make_critical_pair(rig::WeightSpec::point_mass(1.0, 'b'), rig::WeightSpec::point_mass(1.0, 'w'),
                                         o.theta, o.n);
        c.seed = o.seed;
    }
    if (o.replicates > 0) c.replicates = o.replicates;
    if (!o.out.empty()) c.out_dir = o.out;
    if (o.surplus == "direct") c.surplus = rig::SurplusSampler::Direct;
    if (o.surplus == "poissonized") c.surplus = rig::SurplusSampler::Poissonized;
    c.threads = o.threads;
    c.validate();
    return c;
}

void add_common(CLI::App* app, CommonOptions& o) {
    app->add_option("--config", o.config_path, "JSON experiment configuration");
    app->add_option("--n", o.n, "number of black vertices (unit weights when no config is given)");
    app->add_option("--theta", o.theta, "asymptotic ratio m/n");
    app->add_option("--seed", o.seed, "master seed");
    app->add_option("--replicates", o.replicates, "replicate count");
    app->add_option("--out", o.out, "output directory");
    app->add_option("--surplus", o.surplus, "surplus sampler: poissonized or direct")
        ->check(CLI::IsMember({"poissonized", "direct"}));
    app->add_option("--threads", o.threads, "worker threads (0 uses all cores)");
}

int cmd_simulate(const CommonOptions& o) {
    rig::ExperimentConfig c = load_config(o);
    rig::RunReport r = rig::run_discrete(c);
    rig::emit(r, c.out_dir);
    std::printf("replicates %zu  empty %d  partial %s  hash %016llx\n", r.replicates.size(), r.empty_replicates,
                r.partial ? "yes" : "no", static_cast<unsigned long long>(rig::report_hash(r)));
    return r.partial ? 1 : 0;
}

struct LimitOptions {
    int regime = 1;
    double theta = 1.0;
    double alpha = 1.5;
    double c_b = 1.0;
    double c_w = 1.0;
    double horizon = 10.0;
    double step = 1e-3;
    int paths = 1;
    double epsilon = 0.0;
    std::uint64_t seed = 7;
    std::string out = "limit_out";
};

rig::LimitParams limit_params(const LimitOptions& o) {
    rig::LimitParams p = rig::LimitParams::unit(o.theta);
    p.regime = o.regime;
    if (o.regime != 1) {
        p.alpha = o.alpha;
        p.c_b = o.c_b;
        if (o.regime == 3) p.c_w = o.c_w;
    }
    p.validate();
    return p;
}

int cmd_limit(const LimitOptions& o) {
    rig::LimitParams p = limit_params(o);
    std::filesystem::create_directories(o.out);
    std::ofstream lengths(std::filesystem::path(o.out) / "ensemble.csv");
    if (!lengths) throw std::runtime_error("cannot write to " + o.out);
    lengths << "path,rank,g,d,length,near_tie\n";
    for (int i = 0; i < o.paths; ++i) {
        rig::GridPath z = rig::simulate_Z(p, o.horizon, o.step, rig::splitmix64(o.seed + static_cast<std::uint64_t>(i)));
        auto ex = rig::rank_excursions(z);
        for (std::size_t k = 0; k < ex.size() && k < 5; ++k)
            lengths << i << ',' << k + 1 << ',' << ex[k].g << ',' << ex[k].d << ',' << ex[k].length() << ','
                    << (ex[k].near_tie ? 1 : 0) << '\n';
        if (i == 0) {
            rig::GridPath h = rig::height_from_Z(z, p, o.epsilon);
            std::ofstream path(std::filesystem::path(o.out) / "path.csv");
            rig::write_grid_csv(path, z, &h);
            std::ofstream exc(std::filesystem::path(o.out) / "excursions.csv");
            rig::write_excursion_csv(exc, ex);
            if (h.warning) std::fprintf(stderr, "warning: %s\n", h.note.c_str());
        }
    }
    std::printf("regime %d  paths %d  written to %s\n", p.regime, o.paths, o.out.c_str());
    return 0;
}

int cmd_compare(const CommonOptions& o, int paths, double negative_exponent) {
    rig::ExperimentConfig c = load_config(o);
    if (paths > 0) c.limit.paths = paths;
    rig::RunReport r = rig::run_discrete(c);
    rig::LimitEnsemble e =
        rig::simulate_limit_ensemble(rig::LimitParams::from_pair(c.pair), c.limit, c.top_k);
    rig::LimitComparison cmp = rig::compare_with_limit(r, e);
    rig::LimitComparison neg = rig::compare_with_limit(r, e, negative_exponent);
    bool ok = cmp.pass && !r.partial;
    for (const auto& l : cmp.lines)
        std::printf("top-%d  KS(y) %.4f  KS(x) %.4f  threshold %.2f  %s\n", l.k, l.ks_y, l.ks_x, cmp.threshold,
                    l.pass ? "PASS" : "FAIL");
    for (const auto& l : neg.lines) {
        bool rejected = l.ks_y > 2.0 * neg.threshold;
        ok = ok && rejected;
        std::printf("negative control top-%d (exponent %.2f)  KS(y) %.4f  %s\n", l.k, negative_exponent, l.ks_y,
                    rejected ? "rejected" : "NOT rejected");
    }
    rig::RankingConsistency rc = rig::ranking_consistency(r, 1);
    std::printf("top-1 ranking agreement %.4f  ratio %.4f +- %.4f (rho %.4f)\n", rc.agreement, rc.ratio_mean,
                rc.ratio_se, rc.target);
    rig::emit(r, c.out_dir);
    return ok ? 0 : 1;
}

int cmd_check(int instances, std::uint64_t seed) {
    rig::IdentitySuite s = rig::run_identity_suite(instances, seed);
    for (const auto& t : s.tallies)
        std::printf("%-24s checked %9ld  violations %ld  worst %.3g\n", t.name.c_str(), t.checked, t.violations,
                    t.worst);
    std::printf("%s\n", s.ok() ? "all identities hold" : "identity violations found");
    return s.ok() ? 0 : 1;
}

int cmd_clustering(long n, double theta, long triples, int graphs, std::uint64_t seed) {
    rig::ClusteringConfig cfg;
    cfg.n = n;
    cfg.m = rig::companion_size(theta, n);
    cfg.triples = triples;
    cfg.graphs = graphs;
    cfg.seed = seed;
    rig::ClusteringEstimate est = rig::clustering_estimate(cfg);
    if (!est.defined) {
        std::printf("clustering undefined: no wedges sampled\n");
        return 1;
    }
    std::printf("CL %.4f +- %.4f over %ld triples  (homogeneous limit %.4f)\n", est.estimate, est.standard_error,
                est.triples, 1.0 / (1.0 + std::sqrt(theta)));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and checks for bipartite random intersection graphs"};
    app.require_subcommand(1);

    CommonOptions sim;
    add_common(app.add_subcommand("simulate", "discrete replicate runs"), sim);

    LimitOptions lim;
    auto* limit = app.add_subcommand("limit", "limit-process ensembles");
    limit->add_option("--regime", lim.regime)->check(CLI::Range(1, 3));
    limit->add_option("--theta", lim.theta);
    limit->add_option("--alpha", lim.alpha);
    limit->add_option("--cb", lim.c_b, "tail constant of the black law");
    limit->add_option("--cw", lim.c_w, "tail constant of the white law");
    limit->add_option("--horizon", lim.horizon);
    limit->add_option("--step", lim.step);
    limit->add_option("--paths", lim.paths);
    limit->add_option("--epsilon", lim.epsilon, "occupation width for the height (0 selects the default)");
    limit->add_option("--seed", lim.seed);
    limit->add_option("--out", lim.out);

    CommonOptions cmp;
    int cmp_paths = 0;
    double negative_exponent = 0.5;
    auto* compare = app.add_subcommand("compare", "discrete run against a limit ensemble");
    add_common(compare, cmp);
    compare->add_option("--paths", cmp_paths, "limit ensemble size");
    compare->add_option("--negative-exponent", negative_exponent, "wrong scaling exponent for the negative control");

    int instances = 1000;
    std::uint64_t check_seed = 1;
    auto* check = app.add_subcommand("check", "exact identity suite");
    check->add_option("--replicates", instances, "random instances");
    check->add_option("--seed", check_seed);

    long cl_n = 2000, cl_triples = 100000;
    double cl_theta = 1.0;
    int cl_graphs = 20;
    std::uint64_t cl_seed = 1;
    auto* clustering = app.add_subcommand("clustering", "clustering coefficient of the intersection graph");
    clustering->add_option("--n", cl_n);
    clustering->add_option("--theta", cl_theta);
    clustering->add_option("--triples", cl_triples);
    clustering->add_option("--graphs", cl_graphs);
    clustering->add_option("--seed", cl_seed);

    CLI11_PARSE(app, argc, argv);
    try {
        if (app.got_subcommand("simulate")) return cmd_simulate(sim);
        if (app.got_subcommand("limit")) return cmd_limit(lim);
        if (app.got_subcommand("compare")) return cmd_compare(cmp, cmp_paths, negative_exponent);
        if (app.got_subcommand("check")) return cmd_check(instances, check_seed);
        if (app.got_subcommand("clustering")) return cmd_clustering(cl_n, cl_theta, cl_triples, cl_graphs, cl_seed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
