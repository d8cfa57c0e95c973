#include <rig/poisson_model.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <rig/numerics.hpp>

namespace rig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PoissonCoupling coupling_with_counts(const CriticalPair& pair, long nb, long nw, Rng& rng) {
    PoissonCoupling c;
    c.n = pair.n;
    c.m = pair.m;
    c.z = pair.z();
    c.x.resize(nb);
    c.y.resize(nw);
    for (auto& v : c.x) v = sample_weight(pair.b, rng);
    for (auto& v : c.y) v = sample_weight(pair.w, rng);
    ClockSet clocks = sample_clocks(c.x, c.y, c.z, rng);
    c.black_clocks = std::move(clocks.black);
    c.white_clocks = std::move(clocks.white);
    return c;
}

void require_sizes(const CriticalPair& pair) {
    if (pair.n <= 0 || pair.m <= 0) throw std::invalid_argument("the Poisson coupling needs n, m >= 1");
}

StepPath compound_poisson(double rate, double horizon, const WeightSpec& jumps, Rng& rng) {
    std::vector<double> times, sizes;
    if (rate > 0.0 && horizon > 0.0) {
        double t = exponential(rng, rate);
        while (t <= horizon) {
            times.push_back(t);
            sizes.push_back(sample_size_biased(jumps, rng));
            t += exponential(rng, rate);
        }
    }
    StepPath p = StepPath::make(0.0, std::move(times), std::move(sizes));
    p.horizon = horizon;
    return p;
}

}  // namespace

PoissonCoupling sample_conditioned(const CriticalPair& pair, std::uint64_t seed) {
    require_sizes(pair);
    Rng rng = make_rng(seed, 0xC0);
    return coupling_with_counts(pair, pair.n, pair.m, rng);
}

PoissonCoupling sample_unconditioned(const CriticalPair& pair, std::uint64_t seed) {
    require_sizes(pair);
    Rng rng = make_rng(seed, 0xC1);
    long nb = poisson(rng, static_cast<double>(pair.n));
    long nw = poisson(rng, static_cast<double>(pair.m));
    return coupling_with_counts(pair, nb, nw, rng);
}

double intensity_total_b(const CriticalPair& pair) {
    require_sizes(pair);
    double z = pair.z();
    double ratio = std::sqrt(static_cast<double>(pair.n) / static_cast<double>(pair.m));
    return expectation_quadrature(pair.b, [&](double x) {
        return integrate([&](double t) { return ratio * x * std::exp(-x * t / z); }, 0.0, kInf);
    });
}

ScalingExponents scaling_for(Regime regime, double alpha, double n) {
    ScalingExponents s;
    if (regime == Regime::ThirdMoments) {
        s.a = std::cbrt(n);
        s.b = s.a * s.a;
    } else {
        s.a = std::pow(n, 1.0 / (alpha + 1.0));
        s.b = std::pow(n, alpha / (alpha + 1.0));
    }
    return s;
}

LaplaceExponentTable::LaplaceExponentTable(const CriticalPair& pair) : pair_(pair) {
    report_ = validate_critical_pair(pair);
    sqrt_n_over_m_ = std::sqrt(static_cast<double>(pair.n) / static_cast<double>(pair.m));
    sigma2_b_ = moment(pair.b, 2.0);
    sigma2_w_ = moment(pair.w, 2.0);
    q_n_ = -phi_b(moment(pair.w, 1.0) / sqrt_n_over_m_);
    scaling_ = scaling_for(report_.regime, report_.alpha, static_cast<double>(pair.n));
}

double LaplaceExponentTable::phi_b(double lambda) const {
    return sqrt_n_over_m_ * laplace_integral(pair_.b, lambda);
}

double LaplaceExponentTable::phi_w(double lambda) const {
    return laplace_integral(pair_.w, lambda) / sqrt_n_over_m_;
}

double LaplaceExponentTable::phi_hat_b(double lambda) const {
    return sqrt_n_over_m_ * laplace_integral_compensated(pair_.b, lambda);
}

double LaplaceExponentTable::phi_hat_w(double lambda) const {
    return laplace_integral_compensated(pair_.w, lambda) / sqrt_n_over_m_;
}

double LaplaceExponentTable::phi(double lambda) const {
    double mu = sigma2_w_ * lambda / sqrt_n_over_m_ - phi_hat_w(lambda);
    return phi_hat_b(mu) + sqrt_n_over_m_ * sigma2_b_ * phi_hat_w(lambda) + (1.0 - sigma2_b_ * sigma2_w_) * lambda;
}

double LaplaceExponentTable::phi_by_composition(double lambda) const {
    return phi_b(-phi_w(lambda)) + lambda;
}

double LaplaceExponentTable::psi_n(double u) const {
    return scaling_.b / q_n_ * phi(u * q_n_ / scaling_.a);
}

double LaplaceExponentTable::g_n(double s) const {
    double l = (1.0 - s) * q_n_;
    return 1.0 + (phi(l) - l) / q_n_;
}

ReferencePaths reference_paths(const CriticalPair& pair, double horizon, Rng& rng) {
    require_sizes(pair);
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("horizon must be finite");
    double ratio = std::sqrt(static_cast<double>(pair.n) / static_cast<double>(pair.m));
    ReferencePaths p;
    p.horizon = horizon;
    p.lb = compound_poisson(ratio * moment(pair.b, 1.0), horizon, pair.b, rng);
    double top = p.lb.value(horizon);
    p.lw = compound_poisson(moment(pair.w, 1.0) / ratio, top, pair.w, rng);
    std::vector<double> sizes(p.lb.times.size());
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        double t = p.lb.times[k];
        sizes[k] = p.lw.value(p.lb.value(t)) - p.lw.value(p.lb.left_limit(t));
    }
    p.lnm = StepPath::make(-1.0, p.lb.times, sizes);
    p.lnm.horizon = horizon;
    return p;
}

ReferencePaths reference_paths(const CriticalPair& pair, double horizon, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0xE1);
    return reference_paths(pair, horizon, rng);
}

double log_tilt_density(const ReferencePaths& paths, const LaplaceExponentTable& table, double t) {
    if (t < 0.0 || t > paths.horizon) throw std::invalid_argument("tilt density time outside the simulated horizon");
    const double z = table.pair().z();
    double top = paths.lb.value(t);
    double jump_w = 0.0;
    for (std::size_t k = 0; k < paths.lw.times.size() && paths.lw.times[k] <= top; ++k)
        jump_w += paths.lw.times[k] / z * paths.lw.sizes[k];
    double jump_b = 0.0;
    for (std::size_t k = 0; k < paths.lb.times.size() && paths.lb.times[k] <= t; ++k)
        jump_b += paths.lb.times[k] / z * paths.lb.sizes[k];
    double comp_w = top > 0.0 ? integrate([&](double s) { return table.phi_w(s / z); }, 0.0, top) : 0.0;
    double comp_b = t > 0.0 ? integrate([&](double s) { return table.phi_b(s / z); }, 0.0, t) : 0.0;
    return -(jump_w + comp_w + jump_b + comp_b);
}

double tilt_density(const ReferencePaths& paths, const LaplaceExponentTable& table, double t) {
    return std::exp(log_tilt_density(paths, table, t));
}

double stable_constant(double alpha) {
    if (alpha == 2.0) return 0.5;
    if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("stable index must lie in (1,2]");
    return (alpha + 1.0) * std::tgamma(2.0 - alpha) / (alpha * (alpha - 1.0));
}

AppendixAResult appendix_a_check(const WeightSpec& spec, AppendixCase which, double lambda, double n) {
    if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
    AppendixAResult r;
    r.n = n;
    r.lambda = lambda;
    if (which == AppendixCase::ThirdMoment) {
        if (spec.is_power_tail()) throw std::invalid_argument("third-moment check needs a finite third moment");
        double s = std::cbrt(n);
        r.value = s * s * laplace_integral_compensated(spec, lambda / s);
        r.target = 0.5 * moment(spec, 3.0) * lambda * lambda;
    } else {
        if (!spec.is_power_tail()) throw std::invalid_argument("power-tail check needs a power-tail law");
        double g = spec.gamma;
        r.value = std::pow(n, g / (g + 1.0)) * laplace_integral_compensated(spec, lambda * std::pow(n, -1.0 / (g + 1.0)));
        r.target = spec.effective_tail_const() * stable_constant(g) * std::pow(lambda, g);
    }
    r.relative_error = r.target > 0.0 ? std::fabs(r.value - r.target) / r.target : std::fabs(r.value);
    return r;
}

PsiBoundResult psi_bound_check(const WeightSpec& spec, double lambda0, int grid) {
    if (!spec.is_power_tail()) throw std::invalid_argument("psi bound check needs a power-tail law");
    if (!(lambda0 > 0.0)) throw std::invalid_argument("lambda0 must be positive");
    const double g = spec.gamma;
    const double c = spec.effective_cutoff();
    // Above the cutoff the survival is exactly C x^{-g-1}; below it scan a fine grid.
    double cmin = spec.effective_tail_const();
    if (c > 1.0) {
        const int pts = 2000;
        for (int i = 0; i <= pts; ++i) {
            double x = 1.0 + (c - 1.0) * i / pts;
            cmin = std::min(cmin, survival(spec, x) * std::pow(x, g + 1.0));
        }
    }
    PsiBoundResult r;
    r.constant = cmin * integrate([&](double y) { return -std::expm1(-y) * std::pow(y, -g); }, lambda0, kInf);
    r.min_ratio = kInf;
    for (int i = 1; i <= grid; ++i) {
        double lam = lambda0 * i / grid;
        r.min_ratio = std::min(r.min_ratio, laplace_integral_compensated(spec, lam) / std::pow(lam, g));
    }
    r.holds = r.min_ratio >= r.constant;
    return r;
}

DlgCondition dlg_condition(const LaplaceExponentTable& table, double y) {
    if (!(y > 0.0)) throw std::invalid_argument("y must be positive");
    DlgCondition out;
    double a = table.scaling().a;
    if (y >= a) return out;
    const int pts = 200;
    for (int i = 0; i <= pts; ++i) {
        double u = y * std::pow(a / y, static_cast<double>(i) / pts);
        if (!(table.psi_n(u) > 0.0)) out.flagged = true;
    }
    if (out.flagged) {
        out.value = kInf;
        return out;
    }
    out.value = integrate([&](double u) { return 1.0 / table.psi_n(u); }, y, a, 1e-8);
    return out;
}

}  // namespace rig
