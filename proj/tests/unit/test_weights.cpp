#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <rig/weights.hpp>

using namespace rig;

namespace {

std::vector<WeightSpec> every_kind() {
    return {WeightSpec::point_mass(1.3), WeightSpec::exponential(1.0), WeightSpec::exponential(2.5),
            WeightSpec::uniform(0.2, 1.7), WeightSpec::discrete({0.5, 1.0, 3.0}, {0.5, 0.3, 0.2}),
            WeightSpec::power_tail(1.5, 0.5, 1.0), WeightSpec::power_tail(1.3, 0.2, 0.8)};
}

double sample_moment(const std::vector<double>& v, double r, double& se) {
    double s = 0.0, s2 = 0.0;
    for (double x : v) {
        double p = std::pow(x, r);
        s += p;
        s2 += p * p;
    }
    double n = static_cast<double>(v.size());
    double mean = s / n;
    se = std::sqrt(std::max(0.0, s2 / n - mean * mean) / n);
    return mean;
}

}  // namespace

TEST_CASE("moments of the reference laws") {
    CHECK(moment(WeightSpec::exponential(1.0), 2.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(moment(WeightSpec::point_mass(1.0), 3.0) == 1.0);
    CHECK(std::isinf(moment(WeightSpec::power_tail(1.5, 1.0, 1.0), 3.0)));
    CHECK(std::isfinite(moment(WeightSpec::power_tail(1.5, 1.0, 1.0), 2.0)));
}

TEST_CASE("closed-form moments agree with quadrature") {
    for (const auto& spec : every_kind()) {
        for (double r : {1.0, 2.0, 2.4, 3.0}) {
            double closed = moment(spec, r);
            if (!std::isfinite(closed)) continue;
            CAPTURE(spec.kind_name());
            CAPTURE(r);
            CHECK(std::fabs(moment_quadrature(spec, r) - closed) <= 1e-8 * closed);
        }
    }
}

TEST_CASE("scaled laws scale their moments") {
    WeightSpec s = WeightSpec::exponential(1.0);
    s.scale = 3.0;
    CHECK(moment(s, 2.0) == doctest::Approx(18.0).epsilon(1e-12));
    CHECK(moment_quadrature(s, 2.0) == doctest::Approx(18.0).epsilon(1e-8));
}

TEST_CASE("sampling: point mass, determinism, law of large numbers") {
    auto ones = sample_weights(WeightSpec::point_mass(1.0), 5, 3);
    CHECK(ones == std::vector<double>(5, 1.0));

    auto a = sample_weights(WeightSpec::exponential(1.0), 100000, 42);
    auto b = sample_weights(WeightSpec::exponential(1.0), 100000, 42);
    CHECK(a == b);
    double se = 0.0;
    CHECK(std::fabs(sample_moment(a, 1.0, se) - 1.0) <= 0.02);
}

TEST_CASE("empirical moments lie within four standard errors") {
    std::uint64_t seed = 11;
    for (const auto& spec : every_kind()) {
        auto v = sample_weights(spec, 100000, seed++);
        for (double x : v) REQUIRE(x > 0.0);
        for (double r : {1.0, 2.0}) {
            // The power-tail second moment has infinite variance, so its standard error is meaningless.
            if (spec.is_power_tail() && r == 2.0) continue;
            double se = 0.0;
            double m = sample_moment(v, r, se);
            CAPTURE(spec.kind_name());
            CAPTURE(r);
            CHECK(std::fabs(m - moment(spec, r)) <= 4.0 * se + 1e-10 * moment(spec, r));
        }
    }
}

TEST_CASE("power-tail survival is exact above the cutoff") {
    WeightSpec s = WeightSpec::power_tail(1.5, 0.5, 1.0);
    CHECK(survival(s, 10.0) == doctest::Approx(0.5 * std::pow(10.0, -2.5)).epsilon(1e-12));
    // Continuity at the cutoff.
    CHECK(survival(s, 1.0 - 1e-12) == doctest::Approx(survival(s, 1.0)).epsilon(1e-9));
    auto v = sample_weights(s, 1000000, 5);
    long above = 0;
    for (double x : v) above += x > 10.0 ? 1 : 0;
    double empirical = static_cast<double>(above) / v.size();
    CHECK(std::fabs(empirical / survival(s, 10.0) - 1.0) <= 0.2);
}

TEST_CASE("size-biased draws have mean sigma2 / sigma1") {
    WeightSpec s = WeightSpec::exponential(1.0);
    Rng rng = make_rng(9);
    std::vector<double> v(100000);
    for (auto& x : v) x = sample_size_biased(s, rng);
    double se = 0.0;
    double m = sample_moment(v, 1.0, se);
    CHECK(std::fabs(m - 2.0) <= 4.0 * se);
}

TEST_CASE("Laplace integrals") {
    WeightSpec e = WeightSpec::exponential(1.0);
    for (double lambda : {0.0, 0.3, 1.0, 4.0}) {
        CHECK(laplace_integral(e, lambda) == doctest::Approx(1.0 / ((1.0 + lambda) * (1.0 + lambda)) - 1.0).epsilon(1e-9));
        double comp = laplace_integral(e, lambda) + lambda * moment(e, 2.0);
        CHECK(laplace_integral_compensated(e, lambda) == doctest::Approx(comp).epsilon(1e-8));
    }
    CHECK(laplace_integral(WeightSpec::point_mass(1.0), 1.0) == doctest::Approx(std::exp(-1.0) - 1.0));
}

TEST_CASE("critical pair classification") {
    CriticalPair unit = make_critical_pair(WeightSpec::point_mass(1.0, 'b'), WeightSpec::point_mass(1.0, 'w'), 1.0, 100);
    CriticalReport r = validate_critical_pair(unit);
    CHECK(r.regime == Regime::ThirdMoments);
    CHECK(r.rho == doctest::Approx(1.0));

    for (double theta : {0.5, 1.0, 2.0}) {
        CriticalPair p;
        p.b = WeightSpec::exponential(1.0, 'b');
        p.w = WeightSpec::point_mass(1.0 / std::sqrt(2.0), 'w');
        p.theta = theta;
        p.n = 100;
        p.m = companion_size(theta, 100);
        CriticalReport rep = validate_critical_pair(p);
        CHECK(rep.rho == doctest::Approx(2.0 / std::sqrt(theta)).epsilon(1e-12));
    }

    CriticalPair heavy = make_critical_pair(WeightSpec::power_tail(1.5, 0.5, 1.0, 'b'), WeightSpec::exponential(1.0, 'w'), 1.0, 50);
    CriticalReport hr = validate_critical_pair(heavy);
    CHECK(hr.regime == Regime::DominantHeavy);
    CHECK(hr.alpha == 1.5);
    CHECK(hr.product == doctest::Approx(1.0).epsilon(1e-12));

    CriticalPair matched = make_critical_pair(WeightSpec::power_tail(1.4, 0.5, 1.0, 'b'), WeightSpec::power_tail(1.4, 0.3, 1.0, 'w'), 1.0, 50);
    CHECK(validate_critical_pair(matched).regime == Regime::MatchedHeavy);
}

TEST_CASE("invalid pairs and specs are rejected") {
    CriticalPair p = make_critical_pair(WeightSpec::point_mass(1.0), WeightSpec::point_mass(1.0), 1.0, 10);
    p.w.scale = 1.1;
    CHECK_THROWS_AS(validate_critical_pair(p), std::invalid_argument);
    p = make_critical_pair(WeightSpec::point_mass(1.0), WeightSpec::point_mass(1.0), 1.0, 10);
    p.m = 11;
    CHECK_THROWS_AS(validate_critical_pair(p), std::invalid_argument);
    CriticalPair mirrored = make_critical_pair(WeightSpec::exponential(1.0), WeightSpec::power_tail(1.2, 0.5, 1.0, 'w'), 1.0, 10);
    CHECK_THROWS_AS(validate_critical_pair(mirrored), std::invalid_argument);
    CHECK_THROWS_AS(WeightSpec::power_tail(2.5, 0.5, 1.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(WeightSpec::point_mass(-1.0).validate(), std::invalid_argument);
    WeightSpec table = WeightSpec::discrete({1.0, 2.0}, {0.5, 0.5});
    table.probs = {0.5, 0.4};
    CHECK_THROWS_AS(table.validate(), std::invalid_argument);
}

TEST_CASE("critical pairs round-trip through JSON") {
    CriticalPair p = make_critical_pair(WeightSpec::power_tail(1.5, 0.5, 1.0, 'b'), WeightSpec::uniform(0.5, 1.5, 'w'), 2.0, 300);
    nlohmann::json j = p;
    CriticalPair q = j.get<CriticalPair>();
    CHECK(q.n == p.n);
    CHECK(q.m == p.m);
    CHECK(q.theta == p.theta);
    CHECK(moment(q.w, 2.0) == moment(p.w, 2.0));
    CHECK(validate_critical_pair(q).regime == Regime::DominantHeavy);
}
