#include <doctest.h>

#include <cmath>
#include <vector>

#include <rig/poisson_model.hpp>
#include <rig/stats.hpp>

using namespace rig;

namespace {

CriticalPair unit_pair(long n) {
    return make_critical_pair(WeightSpec::point_mass(1.0, 'b'), WeightSpec::point_mass(1.0, 'w'), 1.0, n);
}

CriticalPair exp_pair(long n) {
    return make_critical_pair(WeightSpec::exponential(1.0, 'b'), WeightSpec::point_mass(1.0 / std::sqrt(2.0), 'w'), 1.0,
                              n);
}

}  // namespace

TEST_CASE("conditioned coupling: exact counts, weight marginal, clock law") {
    CriticalPair p = exp_pair(100000);
    PoissonCoupling c = sample_conditioned(p, 4);
    CHECK(c.count_b() == p.n);
    CHECK(c.count_w() == p.m);
    double d = ks_one_sample(c.x, [](double x) { return 1.0 - std::exp(-x); });
    CHECK(ks_pvalue_one_sample(d, c.x.size()) > 0.01);

    // E_i X_i / sqrt(mn) is standard exponential.
    std::vector<double> scaled(c.x.size());
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = c.black_clocks[i] * c.x[i] / p.z();
    CHECK(std::fabs(mean(scaled) - 1.0) <= 4.0 * standard_error(scaled));
    double dc = ks_one_sample(scaled, [](double u) { return 1.0 - std::exp(-u); });
    CHECK(ks_pvalue_one_sample(dc, scaled.size()) > 0.01);

    PoissonCoupling u = sample_conditioned(unit_pair(50), 1);
    for (double x : u.x) CHECK(x == 1.0);
    CHECK(u.clocks().black.size() == 50);
}

TEST_CASE("unconditioned coupling: Poisson counts and total intensity") {
    CriticalPair p = unit_pair(100);
    std::vector<double> counts;
    for (std::uint64_t s = 0; s < 10000; ++s) counts.push_back(static_cast<double>(sample_unconditioned(p, s).count_b()));
    CHECK(std::fabs(mean(counts) - 100.0) <= 4.0 * std::sqrt(100.0 / 10000.0));

    CriticalPair e = exp_pair(300);
    CHECK(std::fabs(intensity_total_b(e) / 300.0 - 1.0) <= 1e-6);
    CriticalPair zero = unit_pair(10);
    zero.n = 0;
    CHECK_THROWS_AS(sample_unconditioned(zero, 1), std::invalid_argument);
}

TEST_CASE("Laplace exponents") {
    LaplaceExponentTable unit(unit_pair(400));
    LaplaceExponentTable ex(exp_pair(400));
    CHECK(unit.phi_b(0.0) == 0.0);
    CHECK(unit.phi(0.0) == doctest::Approx(0.0));
    for (double l : {0.1, 0.5, 1.0, 3.0}) {
        CHECK(unit.phi_b(l) == doctest::Approx(std::exp(-l) - 1.0).epsilon(1e-8));
        CHECK(ex.phi_b(l) == doctest::Approx(1.0 / ((1.0 + l) * (1.0 + l)) - 1.0).epsilon(1e-8));
    }
    CHECK(unit.q_n() > 0.0);
    CHECK(ex.q_n() > 0.0);
}

TEST_CASE("subordination identity and shape of the compensated exponents") {
    std::vector<CriticalPair> pairs{unit_pair(400), exp_pair(400),
                                    make_critical_pair(WeightSpec::uniform(0.5, 1.5, 'b'),
                                                       WeightSpec::exponential(1.0, 'w'), 2.0, 300),
                                    make_critical_pair(WeightSpec::power_tail(1.5, 0.5, 1.0, 'b'),
                                                       WeightSpec::exponential(1.0, 'w'), 0.5, 500)};
    for (const auto& p : pairs) {
        LaplaceExponentTable t(p);
        for (double l : {0.01, 0.1, 0.7, 2.0, 10.0}) {
            double assembled = t.phi(l) - l;
            double composed = t.phi_by_composition(l) - l;
            CHECK(std::fabs(assembled - composed) <= 1e-6 * std::max(1e-12, std::fabs(composed)));
        }
        double prev = 0.0, prev_slope = -1.0;
        for (int i = 1; i <= 40; ++i) {
            double l = 0.25 * i;
            double v = t.phi_hat_b(l);
            CHECK(v >= 0.0);
            double slope = (v - prev) / 0.25;
            CHECK(slope >= prev_slope - 1e-9);
            prev = v;
            prev_slope = slope;
            CHECK(t.phi_hat_w(l) >= 0.0);
        }
    }
}

TEST_CASE("reference paths") {
    CriticalPair p = make_critical_pair(WeightSpec::exponential(1.0, 'b'), WeightSpec::point_mass(1.0 / std::sqrt(2.0), 'w'),
                                        2.0, 50);
    const double ratio = std::sqrt(static_cast<double>(p.n) / p.m);
    const double t = 2.0;
    std::vector<double> values, jumps;
    Rng rng = make_rng(8);
    for (int r = 0; r < 10000; ++r) {
        ReferencePaths rp = reference_paths(p, t, rng);
        values.push_back(rp.lb.value(t));
        jumps.push_back(static_cast<double>(rp.lb.times.size()));
        if (r == 0) {
            for (double s : {0.3, 1.1, 2.0})
                CHECK(rp.lnm.value(s) == doctest::Approx(-s + rp.lw.value(rp.lb.value(s))));
        }
    }
    CHECK(std::fabs(mean(values) - ratio * 2.0 * t) <= 4.0 * standard_error(values));
    CHECK(std::fabs(mean(jumps) - ratio * 1.0 * t) <= 4.0 * standard_error(jumps));

    ReferencePaths zero = reference_paths(p, 0.0, 3);
    CHECK(zero.lb.times.empty());
    CHECK(zero.lnm.value(0.0) == 0.0);
    CHECK_THROWS_AS(reference_paths(p, std::numeric_limits<double>::infinity(), 3), std::invalid_argument);
}

TEST_CASE("tilt density") {
    CriticalPair p = unit_pair(10);
    LaplaceExponentTable table(p);
    const double z = p.z();

    ReferencePaths quiet;
    quiet.lb = StepPath::make(0.0, {}, {});
    quiet.lw = StepPath::make(0.0, {}, {});
    quiet.lnm = StepPath::make(-1.0, {}, {});
    quiet.horizon = 2.0;
    for (double t : {0.5, 1.0, 2.0}) {
        double expected = std::exp(t - z * (1.0 - std::exp(-t / z)));
        CHECK(tilt_density(quiet, table, t) == doctest::Approx(expected).epsilon(1e-9));
        CHECK(tilt_density(quiet, table, t) > 1.0);
    }

    Rng rng = make_rng(12);
    std::vector<double> d1, d3;
    for (int r = 0; r < 10000; ++r) {
        ReferencePaths rp = reference_paths(p, 3.0, rng);
        d1.push_back(tilt_density(rp, table, 1.0));
        d3.push_back(tilt_density(rp, table, 3.0));
        CHECK(tilt_density(rp, table, 0.0) == 1.0);
    }
    CHECK(std::fabs(mean(d1) - 1.0) <= 3.0 * standard_error(d1));
    CHECK(std::fabs(mean(d3) - 1.0) <= 3.0 * standard_error(d3));
    CHECK_THROWS_AS(tilt_density(quiet, table, 3.0), std::invalid_argument);
}

TEST_CASE("stable constant") {
    CHECK(stable_constant(1.5) == doctest::Approx(5.908179503).epsilon(1e-9));
    CHECK(stable_constant(2.0) == 0.5);
}

TEST_CASE("scaled Laplace exponents converge") {
    AppendixAResult e = appendix_a_check(WeightSpec::exponential(1.0), AppendixCase::ThirdMoment, 1.0, 1e8);
    CHECK(e.target == doctest::Approx(3.0));
    CHECK(std::fabs(e.value / 3.0 - 1.0) <= 0.05);
    CHECK(appendix_a_check(WeightSpec::point_mass(1.0), AppendixCase::ThirdMoment, 0.0, 1e6).value == 0.0);

    AppendixAResult pt = appendix_a_check(WeightSpec::power_tail(1.5, 0.5, 1.0), AppendixCase::PowerTail, 1.0, 1e8);
    CHECK(pt.target == doctest::Approx(0.5 * 2.5 * std::sqrt(M_PI) / 0.75).epsilon(1e-9));
    CHECK(std::fabs(pt.value / pt.target - 1.0) <= 0.10);

    for (auto which : {AppendixCase::ThirdMoment, AppendixCase::PowerTail}) {
        WeightSpec s = which == AppendixCase::ThirdMoment ? WeightSpec::exponential(1.0) : WeightSpec::power_tail(1.5, 0.5, 1.0);
        double prev = std::numeric_limits<double>::infinity();
        for (double n : {1e4, 1e6, 1e8}) {
            double err = appendix_a_check(s, which, 1.0, n).relative_error;
            CHECK(err < prev);
            prev = err;
        }
    }
    CHECK_THROWS_AS(appendix_a_check(WeightSpec::point_mass(1.0), AppendixCase::PowerTail, 1.0, 1e6),
                    std::invalid_argument);
    CHECK_THROWS_AS(appendix_a_check(WeightSpec::power_tail(1.5, 0.5, 1.0), AppendixCase::ThirdMoment, 1.0, 1e6),
                    std::invalid_argument);

    PsiBoundResult b = psi_bound_check(WeightSpec::power_tail(1.5, 0.5, 1.0), 1.0);
    CHECK(b.holds);
    CHECK(b.min_ratio >= b.constant);
}

TEST_CASE("scaling exponents") {
    ScalingExponents s = scaling_for(Regime::ThirdMoments, 2.0, 1e6);
    CHECK(s.a == doctest::Approx(100.0));
    CHECK(s.b == doctest::Approx(1e4));
    ScalingExponents h = scaling_for(Regime::DominantHeavy, 1.5, 1e5);
    CHECK(h.a == doctest::Approx(std::pow(1e5, 1.0 / 2.5)));
    CHECK(h.b == doctest::Approx(std::pow(1e5, 1.5 / 2.5)));
}

TEST_CASE("tail condition integral") {
    LaplaceExponentTable t(unit_pair(1000000));
    DlgCondition c10 = dlg_condition(t, 10.0);
    DlgCondition c20 = dlg_condition(t, 20.0);
    CHECK_FALSE(c10.flagged);
    CHECK(c10.value > 0.0);
    CHECK(std::isfinite(c10.value));
    CHECK(c20.value < c10.value);
    CHECK(c20.value <= 0.5 * c10.value * (1.0 + 1e-6));
    CHECK(dlg_condition(t, t.scaling().a).value == 0.0);
    CHECK_THROWS_AS(dlg_condition(t, 0.0), std::invalid_argument);
}
