#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <rig/encoding.hpp>
#include <rig/harness.hpp>

using namespace rig;

namespace {

ExplorationRecord figure_two() {
    std::vector<double> x(6, 1.0), y(5, 1.0);
    return explore(x, y, 1.0, ClockSet{{2.7, 1.0, 3.5, 1.5, 2.0, 6.0}, {1.5, 5.5, 4.5, 0.3, 0.7}});
}

// Height by direct scan over every earlier jump.
int height_oracle(const StepPath& z, double t) {
    int h = 0;
    for (std::size_t k = 0; k < z.times.size(); ++k) {
        double s = z.times[k];
        if (s > t || !(z.sizes[k] > 0.0)) continue;
        double inf = std::min(z.value(s), z.value(t));
        for (std::size_t u = k + 1; u < z.times.size() && z.times[u] <= t; ++u)
            inf = std::min(inf, z.left_limit(z.times[u]));
        if (z.left_limit(s) <= inf + kPathTol) ++h;
    }
    return h;
}

}  // namespace

TEST_CASE("Lambda paths follow the clock order") {
    ExplorationRecord rec = figure_two();
    LambdaPaths l = lambda_paths(rec);
    CHECK(l.x.labels == std::vector<int>{1, 3, 4, 0, 2, 5});
    CHECK(l.x.value(0.99) == 0.0);
    CHECK(l.x.value(1.0) == 1.0);
    CHECK(l.x.left_limit(1.0) == 0.0);
    CHECK(l.x.total_jump() == 6.0);
    CHECK(l.y.labels == std::vector<int>{3, 4, 0, 2, 1});

    StepPath p = StepPath::make(0.0, {1.0, 2.0}, {1.0, 2.0});
    CHECK(p.value(1.5) == 1.0);
    CHECK(p.value(2.0) == 3.0);
    CHECK(p.left_limit(2.0) == 1.0);
}

TEST_CASE("Z without jumps and for a single pair") {
    StepPath drift = StepPath::make(-1.0, {}, {});
    CHECK(drift.value(3.0) == -3.0);
    CHECK(height_process(drift).max_value() == 0);
    CHECK(excursions(drift, drift).empty());

    ExplorationRecord rec = explore({1.0}, {2.0}, 1.0, ClockSet{{0.3}, {0.5}});
    Encoding e = encode(rec);
    CHECK(e.z.max_discrepancy <= 1e-9);
    CHECK(e.z.composition.value(0.3) == doctest::Approx(1.7));
    REQUIRE(e.excursions.size() == 1);
    CHECK(e.excursions[0].g == 0.3);
    CHECK(e.excursions[0].d == doctest::Approx(2.3));
    CHECK(e.excursions[0].y_mass == 2.0);
    CHECK(e.excursions[0].x_mass == 1.0);
    CHECK(e.height.value(1.0) == 1);
    CHECK(e.height.value(2.4) == 0);
    CHECK(vertex_heights(rec, e.height) == std::vector<int>{1});
}

TEST_CASE("second figure: Z, heights, excursions") {
    ExplorationRecord rec = figure_two();
    Encoding e = encode(rec);
    CHECK(e.z.max_discrepancy <= 1e-9);
    CHECK(e.z.composition.value(1.0) == doctest::Approx(1.0));
    CHECK(e.z.composition.value(1.5) == doctest::Approx(1.5));
    CHECK(e.height.value(0.5) == 0);
    CHECK(e.height.value(1.2) == 1);
    CHECK(e.height.value(1.7) == 2);
    CHECK(e.height.value(2.9) == 1);
    CHECK(e.height.value(3.7) == 2);
    CHECK(e.height.value(5.5) == 0);
    CHECK(e.height.value(6.5) == 1);

    REQUIRE(e.excursions.size() == 2);
    CHECK(e.excursions[0].g == 1.0);
    CHECK(e.excursions[0].d == doctest::Approx(5.0));
    CHECK(e.excursions[0].y_mass == 4.0);
    CHECK(e.excursions[0].x_mass == 5.0);
    CHECK(e.excursions[0].root == 1);
    CHECK(e.excursions[1].y_mass == 1.0);
    CHECK(e.excursions[1].x_mass == 1.0);

    std::vector<int> heights = vertex_heights(rec, e.height);
    std::vector<int> depth = rec.forest.depths();
    CHECK(heights == std::vector<int>(depth.begin(), depth.begin() + 6));

    // b4 is a child of b2 in the queue forest; b4 and b3 are siblings.
    CHECK(tree_distance_via_height(e.height, e.z.composition, 1.2, 1.7).distance == 1);
    CHECK(tree_distance_via_height(e.height, e.z.composition, 1.7, 3.7).distance == 2);
    CHECK(tree_distance_via_height(e.height, e.z.composition, 3.7, 1.7).distance == 2);
    CHECK(tree_distance_via_height(e.height, e.z.composition, 1.2, 1.2).distance == 0);
    CHECK(tree_distance_via_height(e.height, e.z.composition, 1.2, 6.5).distance == kUnreachable);
    CHECK_FALSE(tree_distance_via_height(e.height, e.z.composition, 1.2, 5.5).served);
}

TEST_CASE("height process matches a direct scan") {
    Rng rng = make_rng(31);
    for (int inst = 0; inst < 500; ++inst) {
        int jumps = 1 + static_cast<int>(uniform_open(rng) * 30);
        std::vector<double> times(jumps), sizes(jumps);
        for (auto& t : times) t = 20.0 * uniform_open(rng);
        std::sort(times.begin(), times.end());
        for (auto& s : sizes) s = -std::log(uniform_open(rng));
        StepPath z = StepPath::make(-1.0, times, sizes);
        HeightPath h = height_process(z);
        for (int probe = 0; probe < 20; ++probe) {
            double t = 25.0 * uniform_open(rng);
            CHECK(h.value(t) == height_oracle(z, t));
        }
        for (double t : times) CHECK(h.value(t) == height_oracle(z, t));
    }
}

TEST_CASE("generic LIFO heights: the first figure") {
    // Client 3 is served at depth three during (1.5, 2.0).
    StepPath z = StepPath::make(-1.0, {0.0, 1.0, 1.5, 4.0, 10.0}, {5.0, 1.0, 0.5, 1.0, 1.0});
    HeightPath h = height_process(z);
    CHECK(h.value(0.5) == 1);
    CHECK(h.value(1.7) == 3);
    CHECK(h.value(2.2) == 2);
    CHECK(h.value(4.5) == 2);
    CHECK(h.value(6.0) == 1);
    CHECK(h.value(9.0) == 0);
    CHECK(h.value(10.5) == 1);
}

TEST_CASE("service schedule and Sigma transfer") {
    ServiceSchedule sched = service_schedule({0.0, 1.0, 1.5, 4.0, 10.0}, {5.0, 1.0, 0.5, 1.0, 1.0});
    CHECK(sched.served_at(0.5) == 0);
    CHECK(sched.served_at(1.7) == 2);
    CHECK(sched.served_at(2.2) == 1);
    CHECK(sched.served_at(9.0) == -1);
    CHECK(sched.departure == std::vector<double>{7.5, 2.5, 2.0, 5.0, 11.0});

    // A childless client contributes a jump of its weight at its arrival.
    std::vector<double> arrivals{0.3, 5.0}, services{2.0, 0.0}, x{1.0, 0.5};
    ServiceSchedule s2 = service_schedule(arrivals, services);
    SigmaPath sigma = sigma_transfer(s2, x, arrivals, services);
    CHECK(sigma.total() == doctest::Approx(1.5));
    CHECK(sigma.value(5.0) - sigma.left_limit(5.0) == doctest::Approx(0.5));
    std::vector<double> image = sigma_image_measure(sigma, s2, arrivals, services);
    CHECK(image[0] == doctest::Approx(1.0));
    CHECK(image[1] == doctest::Approx(0.5));
    CHECK(sigma.inverse(10.0) == std::numeric_limits<double>::infinity());

    CHECK(encode(figure_two()).sigma.total() == doctest::Approx(6.0));
}

TEST_CASE("exact identities on random instances") {
    IdentitySuite s = run_identity_suite(300, 11);
    for (const auto& t : s.tallies) {
        CAPTURE(t.name);
        CHECK(t.checked > 0);
        CHECK(t.violations == 0);
    }
    CHECK(s.ok());
}
