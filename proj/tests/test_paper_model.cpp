#include <cmath>
#include <numbers>

#include <doctest.h>

#include "hvlab/paper_model.hpp"
#include "support/oracles.hpp"

using namespace hvlab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("X response: +1 on the half-circle at a") {
    CHECK(paper_response_x(Angle(0.0), Angle(kPi / 2.0)).p_plus() == 1.0);
    CHECK(paper_response_x(Angle(0.0), Angle(3.0 * kPi / 2.0)).p_plus() == 0.0);
    // u = a + pi is the excluded end of the half-open arc.
    CHECK(paper_response_x(Angle(kPi), Angle(0.0)).p_plus() == 0.0);
    // The sampling oracle agrees on interior and exterior points of that arc.
    CHECK(oracles::arc_contains_sampled(kPi, kPi, 3.0 * kPi / 2.0, 100'000));
    CHECK_FALSE(oracles::arc_contains_sampled(kPi, kPi, 0.5, 100'000));
}

TEST_CASE("Y response: -1 on the shifted half-circle") {
    // sin^2(0) = 0: the arc is (0, pi).
    CHECK(paper_response_y(Angle(0.0), Angle(kPi / 2.0), Angle(0.0)).p_minus() == 1.0);
    // b = pi/2, w = 0 shifts the arc start to pi*sin^2(pi/4) = pi/2; v = 0
    // is outside (pi/2, 3pi/2).
    CHECK(paper_response_y(Angle(kPi / 2.0), Angle(0.0), Angle(0.0)).p_minus() == 0.0);
    CHECK_FALSE(oracles::arc_contains_sampled(kPi / 2.0, kPi, 0.0, 100'000));
    CHECK(paper_response_y(Angle(0.0), Angle(3.0 * kPi / 2.0), Angle(0.0)).p_minus() == 0.0);
}

TEST_CASE("Y response arc start uses the half-angle of (b - w)") {
    // At b - w = pi the shift vanishes only under the half-angle form:
    // sin^2(pi/2) = 1 shifts by pi (the full-angle form would shift by 0).
    Angle start = paper_y_minus_arc_start(Angle(kPi), Angle(0.0));
    CHECK(start.value() == doctest::Approx(kPi).epsilon(1e-15));
}

TEST_CASE("HV sampling: u = v exactly, w = a exactly, b unused") {
    PhiloxRng rng(7);
    Angle a(1.3), b(0.4);
    for (int i = 0; i < 1000; ++i) {
        auto [u, v, w] = paper_sample_hv(a, b, rng);
        CHECK(u.value() == v.value());
        CHECK(w.value() == a.value());
    }
    PhiloxRng r1(7), r2(7);
    auto [u1, v1, w1] = paper_sample_hv(a, Angle(0.1), r1);
    auto [u2, v2, w2] = paper_sample_hv(a, Angle(2.9), r2);
    CHECK(u1.value() == u2.value());
}

TEST_CASE("sampled u is uniform (chi-squared, 64 bins)") {
    PhiloxRng rng(31);
    PaperModel model;
    std::vector<double> samples;
    samples.reserve(1'000'000);
    for (int i = 0; i < 1'000'000; ++i) {
        samples.push_back(model.sample_local(rng).first.value());
    }
    CHECK(oracles::chi2_uniform_angles(samples, 64) < oracles::kChi2Crit64Bins);
}

TEST_CASE("sample_local ignores its context (two-sample KS across seeds)") {
    PaperModel model;
    auto draw = [&](std::uint64_t seed) {
        PhiloxRng rng(seed);
        std::vector<double> xs;
        xs.reserve(4096);
        for (int i = 0; i < 4096; ++i) {
            xs.push_back(model.sample_local(rng).first.value());
        }
        return xs;
    };
    // The interface gives sample_local no access to settings, so sample sets
    // drawn in different (a, b) contexts differ only by seed.
    CHECK(oracles::ks_two_sample_scaled(draw(101), draw(202)) < oracles::kKsCrit);
}

TEST_CASE("singlet joint table") {
    CHECK(singlet_joint(Angle(0.0), Angle(0.0)).p(+1, +1) == 0.0);
    CHECK(singlet_joint(Angle(0.0), Angle(kPi)).p(+1, +1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(singlet_joint(Angle(0.0), Angle(kPi / 2.0)).p(+1, +1) ==
          doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("closed-form joint matches the quadrature oracle") {
    PaperModel model;
    PhiloxRng rng(55);
    const int n_points = 1'000'001;
    for (int trial = 0; trial < 20; ++trial) {
        Angle a = rng.uniform_angle();
        Angle b = rng.uniform_angle();
        JointTable closed = *model.closed_form_joint(a, b);
        JointTable quad = oracles::quadrature_paper_joint(a.value(), b.value(), n_points);
        for (int x : {+1, -1}) {
            for (int y : {+1, -1}) {
                CHECK(std::fabs(closed.p(x, y) - quad.p(x, y)) < 1e-5);
            }
        }
    }
}

TEST_CASE("joint depends only on the setting difference") {
    PaperModel model;
    PhiloxRng rng(77);
    Angle a(0.3), b(1.7);
    JointTable reference = *model.closed_form_joint(a, b);
    for (int i = 0; i < 100; ++i) {
        double theta = rng.uniform() * kTwoPi;
        JointTable rotated = *model.closed_form_joint(a.shifted(theta), b.shifted(theta));
        for (int x : {+1, -1}) {
            for (int y : {+1, -1}) {
                CHECK(std::fabs(rotated.p(x, y) - reference.p(x, y)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("nonlocal support is a delta at Alice's setting") {
    PaperModel model;
    auto support = model.nonlocal_support(Angle(1.3), Angle(0.2), Angle(2.0), Angle(2.0));
    REQUIRE(support.has_value());
    REQUIRE(support->size() == 1);
    CHECK((*support)[0].value.value() == Angle(1.3).value());
    CHECK((*support)[0].prob == 1.0);
}
