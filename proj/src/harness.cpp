#include <rig/harness.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <rig/stats.hpp>

namespace rig {

namespace {

const char* sampler_name(SurplusSampler s) { return s == SurplusSampler::Poissonized ? "poissonized" : "direct"; }

// BFS over a local adjacency list; returns (farthest vertex, its distance).
std::pair<int, int> farthest(const std::vector<std::vector<int>>& adj, int src, std::vector<int>& dist) {
    std::fill(dist.begin(), dist.end(), -1);
    std::vector<int> queue{src};
    dist[src] = 0;
    int best = src;
    for (std::size_t h = 0; h < queue.size(); ++h) {
        int v = queue[h];
        if (dist[v] > dist[best]) best = v;
        for (int u : adj[v])
            if (dist[u] < 0) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
    }
    return {best, dist[best]};
}

constexpr int kExactDiameterLimit = 300;

}  // namespace

void ExperimentConfig::validate() const {
    validate_critical_pair(pair);
    if (replicates < 1) throw std::invalid_argument("need at least one replicate");
    if (top_k < 1) throw std::invalid_argument("top_k must be positive");
    if (limit.paths < 1 || !(limit.horizon > 0.0) || !(limit.step > 0.0))
        throw std::invalid_argument("invalid limit-ensemble settings");
    if (threads < 0 || time_budget < 0.0) throw std::invalid_argument("threads and time budget must be nonnegative");
}

ScalingExponents ExperimentConfig::scaling() const {
    CriticalReport rep = validate_critical_pair(pair);
    return scaling_for(rep.regime, rep.alpha, static_cast<double>(pair.n));
}

std::uint64_t ExperimentConfig::replicate_seed(int r) const {
    return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(r) + 0x9E3779B97F4A7C15ULL));
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    j = nlohmann::json{{"schema_version", kReportSchemaVersion},
                       {"pair", c.pair},
                       {"replicates", c.replicates},
                       {"seed", c.seed},
                       {"top_k", c.top_k},
                       {"surplus", sampler_name(c.surplus)},
                       {"limit",
                        {{"paths", c.limit.paths},
                         {"horizon", c.limit.horizon},
                         {"step", c.limit.step},
                         {"seed", c.limit.seed}}},
                       {"out_dir", c.out_dir},
                       {"threads", c.threads},
                       {"time_budget", c.time_budget}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
    c = ExperimentConfig{};
    c.pair = j.at("pair").get<CriticalPair>();
    c.replicates = j.value("replicates", c.replicates);
    c.seed = j.value("seed", c.seed);
    c.top_k = j.value("top_k", c.top_k);
    std::string s = j.value("surplus", std::string("poissonized"));
    if (s == "poissonized") c.surplus = SurplusSampler::Poissonized;
    else if (s == "direct") c.surplus = SurplusSampler::Direct;
    else throw std::invalid_argument("unknown surplus sampler: " + s);
    if (j.contains("limit")) {
        const auto& l = j.at("limit");
        c.limit.paths = l.value("paths", c.limit.paths);
        c.limit.horizon = l.value("horizon", c.limit.horizon);
        c.limit.step = l.value("step", c.limit.step);
        c.limit.seed = l.value("seed", c.limit.seed);
    }
    c.out_dir = j.value("out_dir", c.out_dir);
    c.threads = j.value("threads", c.threads);
    c.time_budget = j.value("time_budget", c.time_budget);
}

std::vector<double> RunReport::rescaled_y(int k, double exponent) const {
    const double scale = exponent < 0.0 ? scaling.b : std::pow(static_cast<double>(config.pair.n), exponent);
    std::vector<double> out;
    for (const auto& r : replicates)
        out.push_back(k <= static_cast<int>(r.top_y_mass.size()) ? r.top_y_mass[k - 1] / scale : 0.0);
    return out;
}

std::vector<double> RunReport::rescaled_x(int k, double exponent) const {
    const double scale = exponent < 0.0 ? scaling.b : std::pow(static_cast<double>(config.pair.n), exponent);
    std::vector<double> out;
    for (const auto& r : replicates)
        out.push_back(k <= static_cast<int>(r.top_x.size()) ? r.top_x[k - 1].x_mass / scale : 0.0);
    return out;
}

std::vector<double> RunReport::rescaled_diameter(int k) const {
    std::vector<double> out;
    for (const auto& r : replicates)
        out.push_back(k <= static_cast<int>(r.top_x.size()) ? 0.5 * r.top_x[k - 1].diameter / scaling.a : 0.0);
    return out;
}

void to_json(nlohmann::json& j, const RunReport& r) {
    nlohmann::json reps = nlohmann::json::array();
    std::vector<std::uint64_t> seeds;
    for (const auto& rep : r.replicates) {
        nlohmann::json comps = nlohmann::json::array();
        for (const auto& c : rep.top_x)
            comps.push_back({{"x_mass", c.x_mass},
                             {"y_mass", c.y_mass},
                             {"surplus", c.surplus},
                             {"diameter", c.diameter},
                             {"diameter_exact", c.diameter_exact},
                             {"x_rank", c.x_rank},
                             {"y_rank", c.y_rank},
                             {"blacks", c.blacks},
                             {"whites", c.whites}});
        reps.push_back({{"seed", rep.seed},
                        {"nontrivial", rep.nontrivial},
                        {"top_x", comps},
                        {"top_y_mass", rep.top_y_mass},
                        {"ranking_agrees", rep.ranking_agrees}});
        seeds.push_back(rep.seed);
    }
    j = nlohmann::json{{"schema_version", kReportSchemaVersion},
                       {"config", r.config},
                       {"scaling", {{"a", r.scaling.a}, {"b", r.scaling.b}}},
                       {"seeds", seeds},
                       {"replicates", reps},
                       {"empty_replicates", r.empty_replicates},
                       {"partial", r.partial}};
}

void from_json(const nlohmann::json& j, RunReport& r) {
    if (j.value("schema_version", 0) != kReportSchemaVersion) throw std::invalid_argument("unsupported report schema");
    r = RunReport{};
    r.config = j.at("config").get<ExperimentConfig>();
    r.scaling.a = j.at("scaling").at("a").get<double>();
    r.scaling.b = j.at("scaling").at("b").get<double>();
    for (const auto& rep : j.at("replicates")) {
        ReplicateRecord rr;
        rr.seed = rep.at("seed").get<std::uint64_t>();
        rr.nontrivial = rep.at("nontrivial").get<int>();
        rr.top_y_mass = rep.at("top_y_mass").get<std::vector<double>>();
        rr.ranking_agrees = rep.at("ranking_agrees").get<bool>();
        for (const auto& c : rep.at("top_x")) {
            ComponentObservation o;
            o.x_mass = c.at("x_mass").get<double>();
            o.y_mass = c.at("y_mass").get<double>();
            o.surplus = c.at("surplus").get<long>();
            o.diameter = c.at("diameter").get<int>();
            o.diameter_exact = c.at("diameter_exact").get<bool>();
            o.x_rank = c.at("x_rank").get<int>();
            o.y_rank = c.at("y_rank").get<int>();
            o.blacks = c.at("blacks").get<int>();
            o.whites = c.at("whites").get<int>();
            rr.top_x.push_back(o);
        }
        r.replicates.push_back(std::move(rr));
    }
    r.empty_replicates = j.at("empty_replicates").get<int>();
    r.partial = j.at("partial").get<bool>();
}

bool operator==(const RunReport& a, const RunReport& b) {
    nlohmann::json ca = a.config, cb = b.config;
    return ca == cb && a.scaling.a == b.scaling.a && a.scaling.b == b.scaling.b && a.replicates == b.replicates &&
           a.empty_replicates == b.empty_replicates && a.partial == b.partial;
}

std::vector<std::pair<int, int>> modified_pairs(const ExplorationRecord& rec, const std::vector<Edge>& surplus) {
    std::vector<std::pair<int, int>> out;
    for (const auto& [b, w] : surplus) out.emplace_back(b, rec.forest.parent[rec.n + w]);
    return out;
}

namespace {

// Tree index of every black vertex, trees numbered in root order.
std::vector<int> black_tree_index(const ExplorationRecord& rec, int& trees) {
    std::vector<int> comp(rec.n, -1);
    trees = 0;
    for (int v : rec.black_order) {
        int w = rec.forest.parent[v];
        comp[v] = w < 0 ? trees++ : comp[rec.forest.parent[w]];
    }
    return comp;
}

std::vector<std::pair<int, int>> distinct_pairs(const std::vector<std::pair<int, int>>& pairs) {
    std::vector<std::pair<int, int>> out;
    for (auto [a, b] : pairs) {
        if (a == b) continue;
        out.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

std::vector<long> surplus_per_component(const ExplorationRecord& rec, const std::vector<std::pair<int, int>>& pairs) {
    int trees = 0;
    std::vector<int> comp = black_tree_index(rec, trees);
    std::vector<long> out(trees, 0);
    for (const auto& [a, b] : distinct_pairs(pairs)) {
        if (comp[a] != comp[b]) throw std::logic_error("surplus pair joins two trees of the LIFO forest");
        ++out[comp[a]];
    }
    return out;
}

ReplicateRecord observe_replicate(const ExplorationRecord& rec, const std::vector<std::pair<int, int>>& surplus_pairs,
                                  int top_k, std::uint64_t seed) {
    ReplicateRecord out;
    out.seed = seed;
    int trees = 0;
    std::vector<int> comp = black_tree_index(rec, trees);
    std::vector<ComponentObservation> obs(trees);
    std::vector<std::vector<int>> members(trees);
    for (int v = 0; v < rec.n; ++v) {
        obs[comp[v]].x_mass += rec.x[v];
        ++obs[comp[v]].blacks;
        members[comp[v]].push_back(v);
        for (int w : rec.offspring[v]) {
            obs[comp[v]].y_mass += rec.y[w];
            ++obs[comp[v]].whites;
            members[comp[v]].push_back(rec.n + w);
        }
    }
    auto pairs = distinct_pairs(surplus_pairs);
    for (const auto& [a, b] : pairs) ++obs[comp[a]].surplus;

    std::vector<int> nontrivial;
    for (int c = 0; c < trees; ++c)
        if (obs[c].whites > 0) nontrivial.push_back(c);
    out.nontrivial = static_cast<int>(nontrivial.size());
    std::vector<int> by_x = nontrivial, by_y = nontrivial;
    std::stable_sort(by_x.begin(), by_x.end(), [&](int a, int b) { return obs[a].x_mass > obs[b].x_mass; });
    std::stable_sort(by_y.begin(), by_y.end(), [&](int a, int b) { return obs[a].y_mass > obs[b].y_mass; });
    for (std::size_t r = 0; r < by_x.size(); ++r) obs[by_x[r]].x_rank = static_cast<int>(r) + 1;
    for (std::size_t r = 0; r < by_y.size(); ++r) obs[by_y[r]].y_rank = static_cast<int>(r) + 1;

    const int K = std::min<int>(top_k, static_cast<int>(by_x.size()));
    out.ranking_agrees = K > 0;
    for (int r = 0; r < K; ++r)
        if (by_x[r] != by_y[r]) out.ranking_agrees = false;

    // Diameters of the top components in the forest plus modified surplus edges.
    std::vector<std::vector<int>> extra(trees);
    for (const auto& [a, b] : pairs) extra[comp[a]].push_back(a), extra[comp[a]].push_back(b);
    std::vector<int> local(rec.n + rec.m, -1);
    for (int r = 0; r < K; ++r) {
        int c = by_x[r];
        const auto& mem = members[c];
        for (std::size_t i = 0; i < mem.size(); ++i) local[mem[i]] = static_cast<int>(i);
        std::vector<std::vector<int>> adj(mem.size());
        for (int v : mem) {
            int p = rec.forest.parent[v];
            if (p >= 0) {
                adj[local[v]].push_back(local[p]);
                adj[local[p]].push_back(local[v]);
            }
        }
        for (std::size_t e = 0; e + 1 < extra[c].size(); e += 2) {
            int a = local[extra[c][e]], b = local[extra[c][e + 1]];
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        std::vector<int> dist(mem.size());
        ComponentObservation& o = obs[c];
        if (o.surplus == 0 || static_cast<int>(mem.size()) <= kExactDiameterLimit) {
            if (o.surplus == 0) {
                auto [far, d0] = farthest(adj, 0, dist);
                (void)d0;
                o.diameter = farthest(adj, far, dist).second;
            } else {
                for (std::size_t s = 0; s < mem.size(); ++s)
                    o.diameter = std::max(o.diameter, farthest(adj, static_cast<int>(s), dist).second);
            }
            o.diameter_exact = true;
        } else {
            auto [far, d0] = farthest(adj, 0, dist);
            (void)d0;
            o.diameter = farthest(adj, far, dist).second;
            o.diameter_exact = false;
        }
        for (int v : mem) local[v] = -1;
        out.top_x.push_back(o);
        out.top_y_mass.push_back(obs[by_y[r]].y_mass);
    }
    return out;
}

RunReport run_discrete(const ExperimentConfig& config) {
    config.validate();
    RunReport report;
    report.config = config;
    report.scaling = config.scaling();
    std::vector<ReplicateRecord> results(config.replicates);
    std::vector<char> done(config.replicates, 0);
    std::atomic<int> next{0};
    std::atomic<bool> over_budget{false};
    const auto start = std::chrono::steady_clock::now();

    auto worker = [&]() {
        for (;;) {
            int r = next.fetch_add(1);
            if (r >= config.replicates) return;
            if (config.time_budget > 0.0) {
                std::chrono::duration<double> el = std::chrono::steady_clock::now() - start;
                if (el.count() > config.time_budget) {
                    over_budget = true;
                    return;
                }
            }
            std::uint64_t seed = config.replicate_seed(r);
            PoissonCoupling pc = sample_conditioned(config.pair, seed);
            ExplorationRecord rec = explore(pc.x, pc.y, pc.z, pc.clocks(), ExploreOptions{false});
            std::vector<std::pair<int, int>> pairs;
            if (config.surplus == SurplusSampler::Poissonized) {
                Encoding enc = encode(rec);
                pairs = poissonized_surplus(rec, enc, seed).pairs;
            } else {
                pairs = modified_pairs(rec, sample_surplus_direct(rec, pc.z, seed));
            }
            results[r] = observe_replicate(rec, pairs, config.top_k, seed);
            done[r] = 1;
        }
    };
    int threads = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, config.replicates);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (int r = 0; r < config.replicates; ++r) {
        if (!done[r]) continue;
        if (results[r].nontrivial == 0) ++report.empty_replicates;
        report.replicates.push_back(std::move(results[r]));
    }
    report.partial = over_budget;
    return report;
}

PoissonizedSurplus poissonized_surplus(const ExplorationRecord& rec, const Encoding& enc, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0x5E);
    return poissonized_surplus(rec, enc, rng);
}

PoissonizedSurplus poissonized_surplus(const ExplorationRecord& rec, const Encoding& enc, Rng& rng) {
    const StepPath& z = enc.z.queue_load;
    const double rate = 1.0 / rec.z;
    // Arrivals with a positive jump, with the reflected value just before each.
    std::vector<double> arrive;
    std::vector<double> before;
    std::vector<int> client;
    for (int v : rec.black_order) {
        if (!(rec.delta_bi[v] > 0.0)) continue;
        double t = rec.clocks.black[v];
        arrive.push_back(t);
        before.push_back(std::max(0.0, z.left_limit(t) - z.running_infimum(t)));
        client.push_back(v);
    }
    auto previous_low = [&](double t, double y) {
        long j = static_cast<long>(std::upper_bound(arrive.begin(), arrive.end(), t) - arrive.begin()) - 1;
        while (j >= 0 && before[j] > y) --j;
        return j;
    };
    PoissonizedSurplus out;
    auto place = [&](double t, double s, double y, int b) {
        DiscreteMark mk;
        mk.t = t;
        mk.s = s;
        mk.y = y;
        mk.b = b;
        long j = previous_low(t, y);
        if (j < 0) {
            mk.t_prime = t;
            mk.b_prime = b;
        } else {
            mk.t_prime = arrive[j];
            mk.b_prime = client[j];
        }
        out.marks.push_back(mk);
        if (mk.b_prime != mk.b) out.pairs.emplace_back(mk.b, mk.b_prime);
    };
    for (const auto& seg : enc.schedule.segments) {
        const int c = seg.client;
        const double len = seg.end - seg.start;
        const double r0 = std::max(seg.load_start, len);
        const double base = r0 * len - 0.5 * len * len;
        const double slope = rec.x[c] / rec.delta_bi[c];
        const double area = slope * base;
        out.area += area;
        long count = poisson(rng, area * rate);
        for (long i = 0; i < count; ++i) {
            // Density proportional to the remaining load r0 - u on [0, len].
            double a = uniform_open(rng) * base;
            double u = r0 - std::sqrt(std::max(0.0, r0 * r0 - 2.0 * a));
            u = std::clamp(u, 0.0, len);
            double t = seg.start + u;
            double y = uniform_open(rng) * (r0 - u);
            place(t, enc.sigma.value(t), y, c);
        }
    }
    for (int v = 0; v < rec.n; ++v) {
        if (rec.delta_bi[v] > 0.0) continue;
        double t = rec.clocks.black[v];
        double height = z.reflected(t);
        double area = rec.x[v] * height;
        out.area += area;
        long count = poisson(rng, area * rate);
        for (long i = 0; i < count; ++i)
            place(t, enc.sigma.left_limit(t) + uniform_open(rng) * rec.x[v], uniform_open(rng) * height, v);
    }
    return out;
}

std::vector<double> LimitEnsemble::kth(int k) const {
    std::vector<double> out;
    for (const auto& l : lengths) out.push_back(k <= static_cast<int>(l.size()) ? l[k - 1] : 0.0);
    return out;
}

LimitEnsemble simulate_limit_ensemble(const LimitParams& p, const LimitEnsembleConfig& cfg, int top_k) {
    p.validate();
    if (cfg.paths < 1 || top_k < 1) throw std::invalid_argument("ensemble needs paths and ranks");
    LimitEnsemble e;
    e.params = p;
    for (int i = 0; i < cfg.paths; ++i) {
        GridPath z = simulate_Z(p, cfg.horizon, cfg.step, splitmix64(cfg.seed + static_cast<std::uint64_t>(i)));
        auto ex = rank_excursions(z);
        std::vector<double> l(top_k, 0.0);
        for (int k = 0; k < top_k && k < static_cast<int>(ex.size()); ++k) l[k] = ex[k].length();
        e.lengths.push_back(std::move(l));
    }
    return e;
}

LimitComparison compare_with_limit(const RunReport& report, const LimitEnsemble& ensemble, double exponent) {
    if (ensemble.lengths.empty()) throw std::invalid_argument("empty limit ensemble");
    const int K = report.config.top_k;
    for (const auto& l : ensemble.lengths)
        if (static_cast<int>(l.size()) < K) throw std::invalid_argument("limit ensemble carries fewer ranks than the report");
    if (report.replicates.empty()) throw std::invalid_argument("report has no replicates");
    LimitParams expected = LimitParams::from_pair(report.config.pair);
    if (expected.regime != ensemble.params.regime) throw std::invalid_argument("regime mismatch between run and ensemble");
    LimitComparison out;
    out.pass = true;
    for (int k = 1; k <= K; ++k) {
        KsLine line;
        line.k = k;
        std::vector<double> lim = ensemble.kth(k);
        line.ks_y = ks_two_sample(report.rescaled_y(k, exponent), lim);
        for (auto& v : lim) v *= ensemble.params.rho();
        line.ks_x = ks_two_sample(report.rescaled_x(k, exponent), lim);
        line.pass = line.ks_y <= out.threshold && line.ks_x <= out.threshold;
        out.pass = out.pass && line.pass;
        out.lines.push_back(line);
    }
    return out;
}

RankingConsistency ranking_consistency(const RunReport& report, int k) {
    if (k < 1 || k > report.config.top_k) throw std::invalid_argument("rank outside the recorded top-K");
    RankingConsistency out;
    out.target = report.config.pair.rho();
    std::vector<double> ratios;
    long agree = 0;
    for (const auto& r : report.replicates) {
        if (r.top_x.empty()) continue;
        ++out.used;
        bool ok = static_cast<int>(r.top_x.size()) >= std::min(k, r.nontrivial);
        for (int i = 0; i < k && i < static_cast<int>(r.top_x.size()); ++i)
            if (r.top_x[i].y_rank != i + 1) ok = false;
        agree += ok ? 1 : 0;
        ratios.push_back(r.top_x[0].x_mass / r.top_x[0].y_mass);
    }
    if (out.used > 0) {
        out.agreement = static_cast<double>(agree) / out.used;
        out.ratio_mean = mean(ratios);
        out.ratio_se = ratios.size() > 1 ? standard_error(ratios) : 0.0;
    }
    return out;
}

std::uint64_t report_hash(const RunReport& report) {
    nlohmann::json j = report;
    std::string s = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void emit(const RunReport& report, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream csv(std::filesystem::path(dir) / "components.csv");
    if (!csv) throw std::runtime_error("cannot write to " + dir);
    csv.precision(17);
    csv << "replicate,seed,rank,x_mass,y_mass,surplus,diameter,diameter_exact,x_rank,y_rank,blacks,whites\n";
    for (std::size_t r = 0; r < report.replicates.size(); ++r) {
        const auto& rep = report.replicates[r];
        for (std::size_t k = 0; k < rep.top_x.size(); ++k) {
            const auto& c = rep.top_x[k];
            csv << r << ',' << rep.seed << ',' << k + 1 << ',' << c.x_mass << ',' << c.y_mass << ',' << c.surplus << ','
                << c.diameter << ',' << (c.diameter_exact ? 1 : 0) << ',' << c.x_rank << ',' << c.y_rank << ','
                << c.blacks << ',' << c.whites << '\n';
        }
    }
    std::ofstream js(std::filesystem::path(dir) / "summary.json");
    if (!js) throw std::runtime_error("cannot write to " + dir);
    nlohmann::json j = report;
    j["hash"] = report_hash(report);
    js << j.dump(2) << '\n';
    if (!csv || !js) throw std::runtime_error("write failed in " + dir);
}

}  // namespace rig

namespace rig {

namespace {

WeightSpec random_spec(Rng& rng, char label) {
    std::uniform_int_distribution<int> pick(0, 4);
    switch (pick(rng)) {
        case 0: return WeightSpec::point_mass(0.5 + 1.5 * uniform_open(rng), label);
        case 1: return WeightSpec::exponential(0.5 + uniform_open(rng), label);
        case 2: return WeightSpec::uniform(0.1, 0.5 + 2.0 * uniform_open(rng), label);
        case 3: return WeightSpec::discrete({0.5, 1.0, 3.0}, {0.5, 0.3, 0.2}, label);
        default: return WeightSpec::power_tail(1.2 + 0.7 * uniform_open(rng), 0.5, 1.0, label);
    }
}

void record(IdentityTally& t, double discrepancy, double tol) {
    ++t.checked;
    t.worst = std::max(t.worst, discrepancy);
    if (!(discrepancy <= tol)) ++t.violations;
}

}  // namespace

bool IdentitySuite::ok() const {
    return std::all_of(tallies.begin(), tallies.end(), [](const IdentityTally& t) { return t.violations == 0; });
}

IdentitySuite run_identity_suite(int instances, std::uint64_t seed, int max_size, double tol) {
    if (instances < 1 || max_size < 1) throw std::invalid_argument("identity suite needs instances and a size");
    enum { kZ, kExcY, kExcX, kHeight, kTreeDist, kSigma, kDistortion, kIsometry, kCount };
    IdentitySuite suite;
    for (const char* name : {"z_composition", "excursion_y_mass", "excursion_x_mass", "vertex_heights",
                             "tree_distance", "sigma_image", "surplus_distortion", "intersection_isometry"})
        suite.tallies.push_back({name});
    Rng rng = make_rng(seed, 0x1D);
    std::uniform_int_distribution<int> size(1, max_size);
    for (int inst = 0; inst < instances; ++inst) {
        const int n = size(rng), m = size(rng);
        WeightSpec bs = random_spec(rng, 'b'), ws = random_spec(rng, 'w');
        std::vector<double> x(n), y(m);
        for (auto& v : x) v = sample_weight(bs, rng);
        for (auto& v : y) v = sample_weight(ws, rng);
        const double z = std::sqrt(static_cast<double>(n) * m) * (0.3 + 1.2 * uniform_open(rng));
        ClockSet clocks = sample_clocks(x, y, z, rng);
        ExplorationRecord rec = explore(x, y, z, clocks, ExploreOptions{false});
        std::vector<Edge> surplus = sample_surplus_direct(rec, z, rng);
        BipartiteGraph g = assemble_graph(rec, surplus);
        Encoding enc = encode(rec);
        ComponentDecomposition dec = components(g);
        ++suite.instances;

        record(suite.tallies[kZ], enc.z.max_discrepancy, tol);

        for (const auto& e : enc.excursions) {
            const auto& c = dec.components[dec.black_component[e.root]];
            record(suite.tallies[kExcY], std::fabs(e.y_mass - c.y_mass), tol * std::max(1.0, c.y_mass));
            record(suite.tallies[kExcX], std::fabs(e.x_mass - c.x_mass), tol * std::max(1.0, c.x_mass));
        }

        std::vector<int> heights = vertex_heights(rec, enc.height);
        std::vector<int> depth = rec.forest.depths();
        for (int i = 0; i < n; ++i) record(suite.tallies[kHeight], std::abs(heights[i] - depth[i]), 0.0);

        std::vector<int> served;
        for (int i = 0; i < n; ++i)
            if (rec.delta_bi[i] > 0.0) served.push_back(i);
        Forest queue_forest = black_forest(rec);
        SimpleGraph queue_graph;
        queue_graph.adj.assign(n, {});
        for (int i = 0; i < n; ++i)
            if (queue_forest.parent[i] >= 0) {
                queue_graph.adj[i].push_back(queue_forest.parent[i]);
                queue_graph.adj[queue_forest.parent[i]].push_back(i);
            }
        for (int i : served) {
            std::vector<int> d = bfs_distances(queue_graph, i);
            for (int j : served) {
                TreeDistance td = tree_distance_via_height(enc.height, enc.z.queue_load, clocks.black[i],
                                                           clocks.black[j]);
                int expected = d[j];
                record(suite.tallies[kTreeDist], td.served && td.distance == expected ? 0.0 : 1.0, 0.0);
            }
        }

        std::vector<double> image = sigma_image_measure(enc.sigma, enc.schedule, clocks.black, rec.delta_bi);
        for (int i = 0; i < n; ++i)
            record(suite.tallies[kSigma], std::fabs(image[i] - x[i]), tol * std::max(1.0, x[i]));

        // The bound counts every sampled surplus edge, including those that repeat a forest edge.
        SimpleGraph modified = surplus_modified_graph(rec, surplus);
        std::vector<long> sampled(dec.components.size(), 0);
        for (const auto& e : surplus) ++sampled[dec.black_component[e.first]];
        for (std::size_t c = 0; c < dec.components.size(); ++c) {
            if (!dec.components[c].nontrivial()) continue;
            DistortionReport dr = distortion_certificate(g, dec.components[c], modified);
            double excess = dr.max_distortion - static_cast<double>(sampled[c]);
            record(suite.tallies[kDistortion], dr.component_preserved ? std::max(0.0, excess) : 1.0, 0.0);
        }

        IsometryReport iso = isometry_check(g, intersection_graph(g));
        suite.tallies[kIsometry].checked += iso.pairs_checked;
        suite.tallies[kIsometry].violations += iso.violations;
    }
    return suite;
}

}  // namespace rig
