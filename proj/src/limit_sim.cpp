#include <rig/limit_sim.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include <rig/numerics.hpp>
#include <rig/poisson_model.hpp>

namespace rig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int grid_steps(double horizon, double step) {
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("horizon must be finite and >= 0");
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
    if (horizon == 0.0) return 0;
    if (step > 1e-3 * horizon * (1.0 + 1e-9)) throw std::invalid_argument("grid step must be at most 1e-3 * horizon");
    return static_cast<int>(std::llround(horizon / step));
}

// int_eps^inf x^{-a} e^{-k x} dx
double tail_first_moment(double a, double k, double eps) {
    if (k == 0.0) return std::pow(eps, 1.0 - a) / (a - 1.0);
    return (std::pow(eps, 1.0 - a) * std::exp(-k * eps) - std::pow(k, a - 1.0) * boost::math::tgamma(2.0 - a, k * eps)) /
           (a - 1.0);
}

// int_0^eps x^{1-a} e^{-k x} dx
double small_second_moment(double a, double k, double eps) {
    if (k == 0.0) return std::pow(eps, 2.0 - a) / (2.0 - a);
    return std::pow(k, a - 2.0) * boost::math::tgamma_lower(2.0 - a, k * eps);
}

// Compensated sum of jumps with intensity c (a+1) e^{-q s x} x^{-a-1} dx ds on [0, N h].
GridPath tilted_stable(double a, double c, double q, int steps, double h, double cutoff, Rng& rng) {
    std::vector<double> values(steps + 1, 0.0);
    GridPath out;
    if (steps == 0) return GridPath::make(h, values);
    const double horizon = steps * h;
    const double eps = cutoff > 0.0 ? cutoff : std::pow(h, 1.0 / a);
    std::vector<double> cell_jumps(steps + 1, 0.0);
    std::vector<std::pair<double, double>> ledger;
    // Pareto proposals on (eps, inf), thinned by the tilt factor.
    const double rate = c * (a + 1.0) * std::pow(eps, -a) / a;
    long proposals = poisson(rng, rate * horizon);
    for (long i = 0; i < proposals; ++i) {
        double s = horizon * uniform_open(rng);
        double x = eps * std::pow(uniform_open(rng), -1.0 / a);
        if (q > 0.0 && uniform_open(rng) >= std::exp(-q * s * x)) continue;
        int cell = std::clamp(static_cast<int>(std::ceil(s / h)), 1, steps);
        cell_jumps[cell] += x;
        ledger.emplace_back(s, x);
    }
    for (int k = 1; k <= steps; ++k) {
        double kappa = q * (k - 0.5) * h;
        double comp = c * (a + 1.0) * h * tail_first_moment(a, kappa, eps);
        double var = c * (a + 1.0) * h * small_second_moment(a, kappa, eps);
        values[k] = values[k - 1] + cell_jumps[k] - comp + std::sqrt(var) * standard_normal(rng);
    }
    out = GridPath::make(h, std::move(values));
    std::sort(ledger.begin(), ledger.end());
    for (const auto& [s, x] : ledger) {
        out.jump_times.push_back(s);
        out.jump_sizes.push_back(x);
    }
    return out;
}

// (theta / sigma_2^b) Psi_i(sigma_2^b t / theta)
double tilt_drift(const LimitParams& p, double t) { return psi(p, p.tilt() * t) / p.tilt(); }

}  // namespace

void LimitParams::validate() const {
    if (regime < 1 || regime > 3) throw std::invalid_argument("regime must be 1, 2 or 3");
    if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
    if (!(sigma2_b > 0.0 && sigma2_w > 0.0)) throw std::invalid_argument("second moments must be positive");
    if (regime == 1) {
        if (!(sigma3_b > 0.0 && sigma3_w > 0.0)) throw std::invalid_argument("regime 1 needs positive third moments");
        if (alpha != 2.0) throw std::invalid_argument("regime 1 has index 2");
        return;
    }
    if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("stable regimes need alpha in (1, 2)");
    if (!(c_b > 0.0)) throw std::invalid_argument("stable regimes need a positive black tail constant");
    if (regime == 3 && !(c_w > 0.0)) throw std::invalid_argument("regime 3 needs a positive white tail constant");
}

double LimitParams::c1() const { return sigma3_w * sigma2_b + std::sqrt(theta) * sigma2_w * sigma2_w * sigma3_b; }

double LimitParams::c2() const {
    return c_b * std::pow(theta, (alpha - 1.0) / 2.0) * std::pow(sigma2_w, alpha);
}

double LimitParams::c3() const { return c_w * sigma2_b + c2(); }

double LimitParams::c_active() const {
    validate();
    return regime == 1 ? c1() : regime == 2 ? c2() : c3();
}

double LimitParams::c_alpha() const { return stable_constant(index()); }

double LimitParams::rho() const { return sigma2_b / std::sqrt(theta); }

LimitParams LimitParams::unit(double theta) {
    LimitParams p;
    p.theta = theta;
    return p;
}

LimitParams LimitParams::from_pair(const CriticalPair& pair) {
    CriticalReport rep = validate_critical_pair(pair);
    LimitParams p;
    p.theta = pair.theta;
    p.sigma2_b = moment(pair.b, 2.0);
    p.sigma2_w = moment(pair.w, 2.0);
    if (rep.regime == Regime::ThirdMoments) {
        p.regime = 1;
        p.sigma3_b = moment(pair.b, 3.0);
        p.sigma3_w = moment(pair.w, 3.0);
        return p;
    }
    p.regime = rep.regime == Regime::DominantHeavy ? 2 : 3;
    p.alpha = rep.alpha;
    p.sigma3_b = p.sigma3_w = kInf;
    p.c_b = pair.b.effective_tail_const();
    if (pair.w.is_power_tail()) p.c_w = pair.w.effective_tail_const();
    return p;
}

double psi(const LimitParams& p, double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("Psi needs lambda >= 0");
    return p.c_alpha() * p.c_active() * std::pow(lambda, p.index());
}

GridPath GridPath::make(double step, std::vector<double> values) {
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
    if (values.empty()) throw std::invalid_argument("grid path needs at least one value");
    GridPath g;
    g.step = step;
    g.values = std::move(values);
    g.running_inf.resize(g.values.size());
    double low = kInf;
    for (std::size_t k = 0; k < g.values.size(); ++k) g.running_inf[k] = low = std::min(low, g.values[k]);
    return g;
}

double GridPath::at(double t) const {
    if (t <= 0.0) return values.front();
    double u = t / step;
    int k = static_cast<int>(std::floor(u));
    if (k >= size() - 1) return values.back();
    double w = u - k;
    return values[k] + w * (values[k + 1] - values[k]);
}

GridPath simulate_Z(const LimitParams& p, double horizon, double step, std::uint64_t seed,
                    const StableGridOptions& opts) {
    p.validate();
    const int steps = grid_steps(horizon, step);
    Rng rng = make_rng(seed, 0x21);
    if (p.regime == 1) {
        std::vector<double> v(steps + 1, 0.0);
        const double sd = std::sqrt(p.c1() * step);
        for (int k = 1; k <= steps; ++k)
            v[k] = v[k - 1] + sd * standard_normal(rng) - (tilt_drift(p, k * step) - tilt_drift(p, (k - 1) * step));
        return GridPath::make(step, std::move(v));
    }
    const double a = p.alpha;
    GridPath m = opts.form == TiltForm::Girsanov
                     ? tilted_stable(a, p.c_active(), p.tilt(), steps, step, opts.jump_cutoff, rng)
                     : tilted_stable(a, 1.0, p.tilt(), steps, step, opts.jump_cutoff, rng);
    const double scale = opts.form == TiltForm::Girsanov ? 1.0 : p.c_active();
    std::vector<double> v(m.values);
    for (int k = 0; k <= steps; ++k) v[k] = scale * v[k] - tilt_drift(p, k * step);
    GridPath z = GridPath::make(step, std::move(v));
    z.jump_times = std::move(m.jump_times);
    z.jump_sizes = std::move(m.jump_sizes);
    for (auto& x : z.jump_sizes) x *= scale;
    return z;
}

GridPath simulate_M(const LimitParams& p, double horizon, double step, std::uint64_t seed,
                    const StableGridOptions& opts) {
    p.validate();
    if (p.regime == 1) throw std::invalid_argument("the martingale M belongs to the stable regimes");
    const int steps = grid_steps(horizon, step);
    Rng rng = make_rng(seed, 0x22);
    return tilted_stable(p.alpha, 1.0, p.tilt(), steps, step, opts.jump_cutoff, rng);
}

double log_laplace_M(const LimitParams& p, double lambda, double t) {
    p.validate();
    if (p.regime == 1) throw std::invalid_argument("the martingale M belongs to the stable regimes");
    if (!(lambda >= 0.0) || !(t >= 0.0)) throw std::invalid_argument("lambda and t must be nonnegative");
    if (t == 0.0) return 0.0;
    const double a = p.alpha, q = p.tilt(), ca = p.c_alpha();
    return integrate(
        [&](double s) {
            double k = q * s;
            double lin = k > 0.0 ? a * lambda * std::pow(k, a - 1.0) : 0.0;
            return ca * (std::pow(lambda + k, a) - std::pow(k, a) - lin);
        },
        0.0, t);
}

GridPath simulate_levy(const LimitParams& p, double horizon, double step, std::uint64_t seed) {
    p.validate();
    const int steps = grid_steps(horizon, step);
    Rng rng = make_rng(seed, 0x23);
    if (p.regime == 1) {
        std::vector<double> v(steps + 1, 0.0);
        const double sd = std::sqrt(p.c1() * step);
        for (int k = 1; k <= steps; ++k) v[k] = v[k - 1] + sd * standard_normal(rng);
        return GridPath::make(step, std::move(v));
    }
    return tilted_stable(p.alpha, p.c_active(), 0.0, steps, step, 0.0, rng);
}

double sample_levy_increment(const LimitParams& p, double t, Rng& rng) {
    p.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("time must be nonnegative");
    if (t == 0.0) return 0.0;
    if (p.regime == 1) return std::sqrt(p.c1() * t) * standard_normal(rng);
    const double a = p.alpha;
    const double pi = std::numbers::pi;
    // E[exp(-lambda sigma X)] = exp(sigma^a lambda^a / |cos(pi a / 2)|) for X ~ S_a(1, 1, 0).
    const double sigma = std::pow(p.c_alpha() * p.c_active() * std::fabs(std::cos(pi * a / 2.0)) * t, 1.0 / a);
    const double tan_pa = std::tan(pi * a / 2.0);
    const double b = std::atan(tan_pa) / a;
    const double s = std::pow(1.0 + tan_pa * tan_pa, 1.0 / (2.0 * a));
    const double v = pi * (uniform_open(rng) - 0.5);
    const double w = exponential(rng, 1.0);
    const double x = s * std::sin(a * (v + b)) / std::pow(std::cos(v), 1.0 / a) *
                     std::pow(std::cos(v - a * (v + b)) / w, (1.0 - a) / a);
    return sigma * x;
}

double limit_tilt_density(const GridPath& levy, const LimitParams& p, double t) {
    p.validate();
    if (!(t >= 0.0) || t > levy.horizon() + 1e-12) throw std::invalid_argument("time outside the simulated horizon");
    const int k = static_cast<int>(std::llround(t / levy.step));
    const double q = p.tilt();
    double integral = 0.0;
    for (int j = 1; j <= k; ++j) integral += q * (j - 1) * levy.step * (levy.values[j] - levy.values[j - 1]);
    const double tk = k * levy.step;
    const double a = p.index();
    const double compensator = p.c_alpha() * p.c_active() * std::pow(q, a) * std::pow(tk, a + 1.0) / (a + 1.0);
    return std::exp(-integral - compensator);
}

double grid_noise_scale(const LimitParams& p, double step) {
    p.validate();
    if (p.regime == 1) return std::sqrt(p.c1() * step);
    return std::pow(p.c_alpha() * p.c_active() * step, 1.0 / p.alpha);
}

GridPath occupation_height(const GridPath& z, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("occupation width must be positive");
    const int n = z.size();
    // Sparse table of minima to find, for each s, the first later grid time below Z_s - eps.
    int levels = 1;
    while ((1 << levels) < n) ++levels;
    std::vector<std::vector<double>> table(levels + 1, z.values);
    for (int l = 1; l <= levels; ++l)
        for (int i = 0; i + (1 << l) <= n; ++i)
            table[l][i] = std::min(table[l - 1][i], table[l - 1][i + (1 << (l - 1))]);
    std::vector<int> diff(n + 1, 0);
    for (int j = 0; j < n; ++j) {
        const double level = z.values[j] - epsilon;
        int pos = j + 1;  // first index not yet known to stay at or above level
        for (int l = levels; l >= 0; --l) {
            if (pos + (1 << l) <= n && table[l][pos] >= level) pos += 1 << l;
        }
        // s = t_j counts for t_k with j < k < pos.
        if (j + 1 < pos) {
            diff[j + 1] += 1;
            diff[pos] -= 1;
        }
    }
    std::vector<double> h(n, 0.0);
    int run = 0;
    for (int k = 0; k < n; ++k) {
        run += diff[k];
        h[k] = z.step * run / epsilon;
    }
    GridPath out = GridPath::make(z.step, std::move(h));
    return out;
}

GridPath height_from_Z(const GridPath& z, const LimitParams& p, double epsilon) {
    p.validate();
    if (p.regime == 1) {
        std::vector<double> h(z.size());
        const double scale = 2.0 / p.c1();
        for (int k = 0; k < z.size(); ++k) h[k] = scale * z.reflected(k);
        return GridPath::make(z.step, std::move(h));
    }
    const double noise = grid_noise_scale(p, z.step);
    const double eps = epsilon > 0.0 ? epsilon : kHeightNoiseMultiple * noise;
    GridPath h = occupation_height(z, eps);
    if (eps <= noise) {
        h.warning = true;
        h.note = "epsilon is at or below the grid-noise scale";
    }
    return h;
}

std::vector<LimitExcursion> rank_excursions(const GridPath& z) {
    std::vector<LimitExcursion> out;
    for (int k = 1; k < z.size();) {
        if (!(z.reflected(k) > 0.0)) {
            ++k;
            continue;
        }
        LimitExcursion e;
        e.first = k;
        while (k < z.size() && z.reflected(k) > 0.0) ++k;
        e.last = k - 1;
        e.g = z.time(e.first - 1);
        e.d = z.time(e.last);
        out.push_back(e);
    }
    std::stable_sort(out.begin(), out.end(), [](const LimitExcursion& a, const LimitExcursion& b) {
        if (a.last - a.first != b.last - b.first) return a.last - a.first > b.last - b.first;
        return a.first < b.first;
    });
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
        if ((out[i].last - out[i].first) - (out[i + 1].last - out[i + 1].first) <= 1) {
            out[i].near_tie = true;
            out[i + 1].near_tie = true;
        }
    }
    return out;
}

double mark_region_area(const GridPath& z, const LimitParams& p) {
    double area = 0.0;
    for (int k = 1; k < z.size(); ++k) area += z.reflected(k);
    return area * z.step * p.rho();
}

double last_time_below(const GridPath& z, int k, double y) {
    for (int j = k; j >= 0; --j)
        if (z.reflected(j) <= y) return z.time(j);
    return 0.0;
}

MarkSet sample_marks(const GridPath& z, const LimitParams& p, std::uint64_t seed) {
    p.validate();
    Rng rng = make_rng(seed, 0x24);
    MarkSet out;
    out.area = mark_region_area(z, p);
    const double rate = 1.0 / std::sqrt(p.theta);
    for (int k = 1; k < z.size(); ++k) {
        double r = z.reflected(k);
        if (!(r > 0.0)) continue;
        long count = poisson(rng, rate * p.rho() * r * z.step);
        for (long i = 0; i < count; ++i) {
            Mark mk;
            mk.cell = k;
            mk.t = z.time(k);
            mk.s = p.rho() * mk.t;
            mk.y = r * uniform_open(rng);
            mk.t_prime = last_time_below(z, k, mk.y);
            out.marks.push_back(mk);
        }
    }
    return out;
}

CodedGraph limit_coded_graph(const LimitParams& p, const GridPath& z, const GridPath& h, const MarkSet& marks,
                             int k) {
    p.validate();
    auto ex = rank_excursions(z);
    if (k < 1 || k > static_cast<int>(ex.size())) throw std::out_of_range("excursion rank out of range");
    if (h.size() != z.size()) throw std::invalid_argument("height and path grids differ");
    const LimitExcursion& e = ex[k - 1];
    const double rho = p.rho();
    std::vector<double> times, values;
    for (int j = e.first - 1; j <= e.last; ++j) {
        times.push_back(rho * (z.time(j) - e.g));
        values.push_back(std::max(0.0, h.values[j]));
    }
    CodedGraph g;
    g.h = CodedFunction::make(rho * (e.d - e.g), std::move(times), std::move(values), CodingClass::Continuous);
    for (const auto& m : marks.marks) {
        if (!(m.t > e.g && m.t < e.d + 0.5 * z.step)) continue;
        double u = std::clamp(rho * (m.t - e.g), 0.0, g.h.zeta);
        double v = std::clamp(rho * (m.t_prime - e.g), 0.0, g.h.zeta);
        g.marks.emplace_back(v, u);
    }
    return g;
}

FiniteMeasuredMetricSpace build_limit_graph(const LimitParams& p, const GridPath& z, const GridPath& h,
                                            const MarkSet& marks, int k, int resolution) {
    CodedGraph g = limit_coded_graph(p, z, h, marks, k);
    return shortcut_graph(g.h, g.marks, 0.0, resolution);
}

void write_grid_csv(std::ostream& os, const GridPath& z, const GridPath* h) {
    os.precision(12);
    os << "t,value,reflected";
    if (h) os << ",height";
    os << '\n';
    for (int k = 0; k < z.size(); ++k) {
        os << z.time(k) << ',' << z.values[k] << ',' << z.reflected(k);
        if (h) os << ',' << h->values[k];
        os << '\n';
    }
}

void write_excursion_csv(std::ostream& os, const std::vector<LimitExcursion>& ex) {
    os.precision(12);
    os << "rank,g,d,length,near_tie\n";
    for (std::size_t i = 0; i < ex.size(); ++i)
        os << i + 1 << ',' << ex[i].g << ',' << ex[i].d << ',' << ex[i].length() << ',' << (ex[i].near_tie ? 1 : 0)
           << '\n';
}

}  // namespace rig
