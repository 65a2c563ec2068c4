#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <utility>

#include <doctest.h>

#include "hvlab/analysis.hpp"
#include "hvlab/discrete_model.hpp"
#include "hvlab/engine.hpp"
#include "hvlab/paper_model.hpp"
#include "support/oracles.hpp"

using namespace hvlab;

namespace {

constexpr double kPi = std::numbers::pi;

LocalDeterministicParams anticorrelated_coin() {
    LocalDeterministicParams params;
    params.settings_a = {Angle(0.0), Angle(kPi / 2.0)};
    params.settings_b = {Angle(0.0), Angle(kPi / 2.0)};
    params.lambda_probs = {0.5, 0.5};
    params.x_sign = {{+1, -1}, {+1, -1}};
    params.y_sign = {{-1, +1}, {-1, +1}};
    return params;
}

}  // namespace

TEST_CASE("anticorrelated coin: E[XY] = -1 at every setting pair") {
    DiscreteModel model = build_local_deterministic(anticorrelated_coin());
    for (Angle a : model.settings_a) {
        for (Angle b : model.settings_b) {
            CHECK(engine::exact_joint(model, a, b).correlator() == -1.0);
        }
    }
}

TEST_CASE("local deterministic models have a trivial nonlocal part and pass the conditional check") {
    PhiloxRng rng(7);
    DiscreteModel model = random_local_deterministic(rng, 2, 4);
    CHECK(model.n_w() == 1);
    CHECK(analysis::check_cr_locality(model).max_deviation <= kTol);
}

TEST_CASE("invalid parameters are rejected with named tables") {
    LocalDeterministicParams params = anticorrelated_coin();
    params.x_sign[0][0] = 3;
    CHECK_THROWS_WITH_AS(build_local_deterministic(params),
                         doctest::Contains("x_sign"), ValidationError);

    DiscreteModel broken = build_local_deterministic(anticorrelated_coin());
    broken.p_uv[0].p = 0.4;  // joint now sums to 0.9
    CHECK_THROWS_WITH_AS(broken.finalize(), doctest::Contains("p_uv"), ValidationError);

    DiscreteModel negative = build_local_deterministic(anticorrelated_coin());
    negative.p_y[0] = -0.25;
    CHECK_THROWS_WITH_AS(negative.finalize(), doctest::Contains("p_y_given_bvw"),
                         ValidationError);
}

TEST_CASE("discretize: coarse grid has quarter probabilities") {
    DiscreteModel model = discretize_paper_model(4);
    CHECK(model.n_u() == 4);
    CHECK(model.n_a() == 4);  // 8 does not divide 4: settings fall back to the grid
    std::set<double> allowed = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (Angle a : model.settings_a) {
        for (Angle b : model.settings_b) {
            JointTable t = engine::exact_joint(model, a, b);
            for (int x : {+1, -1}) {
                for (int y : {+1, -1}) {
                    CHECK(allowed.count(t.p(x, y)) == 1);
                }
            }
        }
    }
}

TEST_CASE("discretize: equal settings give (almost) zero same-outcome mass") {
    DiscreteModel model = discretize_paper_model(360);
    JointTable t = engine::exact_joint(model, Angle(0.0), Angle(0.0));
    CHECK(t.p(+1, +1) <= 1.0 / 360.0);
    CHECK(t.p(-1, -1) <= 1.0 / 360.0);
}

TEST_CASE("discretize: 360-point grid reproduces the closed form to 0.01") {
    DiscreteModel model = discretize_paper_model(360);
    JointTable t = engine::exact_joint(model, Angle(0.0), Angle(kPi / 2.0));
    CHECK(std::fabs(t.p(+1, +1) - 0.25) < 0.01);
}

TEST_CASE("discretize: settings must lie on the grid") {
    CHECK_THROWS_AS(discretize_paper_model(360, {Angle(0.1234)}, {Angle(0.0)}), DomainError);
    CHECK_THROWS_AS(discretize_paper_model(1), DomainError);
}

TEST_CASE("generated models always validate and sample consistently") {
    PhiloxRng rng(2718);
    CrCompliantGenOptions opts;
    opts.n_u = 3;
    opts.n_v = 2;
    DiscreteModel model = random_cr_compliant_model(rng, opts);

    // Sampling frequencies of (u, v) match p_uv within 5 sigma.
    const std::uint64_t n = 200'000;
    std::map<std::pair<double, double>, std::uint64_t> counts;
    PhiloxRng sampler(9);
    for (std::uint64_t i = 0; i < n; ++i) {
        auto [u, v] = model.sample_local(sampler);
        ++counts[{u.value(), v.value()}];
    }
    for (const auto& entry : model.p_uv) {
        auto key = std::make_pair(model.support_u[std::size_t(entry.iu)].value(),
                                  model.support_v[std::size_t(entry.iv)].value());
        CHECK(oracles::binomial_within_sigma(counts[key], n, entry.p, 5.0));
    }
}

TEST_CASE("delta nonlocal sampling returns Alice's setting exactly") {
    DiscreteModel model = discretize_paper_model(24);
    PhiloxRng rng(3);
    Angle a = model.settings_a[1];
    Angle w = model.sample_nonlocal(a, model.settings_b[0], model.support_u[5],
                                    model.support_v[5], rng);
    CHECK(w.value() == a.value());
}

TEST_CASE("absorbing a component leaves the observable joint unchanged") {
    PhiloxRng rng(404);
    CrCompliantGenOptions opts;
    opts.n_a = 2;
    opts.n_b = 3;
    opts.n_u = 3;
    opts.n_v = 2;
    opts.n_w = 2;
    std::vector<DiscreteModel> models;
    models.push_back(random_cr_compliant_model(rng, opts));
    models.push_back(discretize_paper_model(24));

    for (const DiscreteModel& model : models) {
        for (HvComponent c : {HvComponent::V, HvComponent::U}) {
            DiscreteModel merged = absorb_into_nonlocal(model, c);
            for (Angle a : model.settings_a) {
                for (Angle b : model.settings_b) {
                    JointTable before = engine::exact_joint(model, a, b);
                    JointTable after = engine::exact_joint(merged, a, b);
                    for (int x : {+1, -1}) {
                        for (int y : {+1, -1}) {
                            CHECK(std::fabs(before.p(x, y) - after.p(x, y)) <= 1e-12);
                        }
                    }
                }
            }
        }
        // Folding both components in sequence also preserves the joint.
        DiscreteModel both = absorb_into_nonlocal(absorb_into_nonlocal(model, HvComponent::V),
                                                  HvComponent::U);
        Angle a = model.settings_a[0], b = model.settings_b[0];
        JointTable before = engine::exact_joint(model, a, b);
        JointTable after = engine::exact_joint(both, a, b);
        for (int x : {+1, -1}) {
            for (int y : {+1, -1}) {
                CHECK(std::fabs(before.p(x, y) - after.p(x, y)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("inject_w_signaling turns an inert kernel into a signaling channel") {
    PhiloxRng rng(11);
    CrCompliantGenOptions opts;
    opts.n_w = 2;  // matches n_a so the kernel can track Alice's setting
    DiscreteModel model = random_cr_compliant_model(rng, opts);
    CHECK(analysis::check_observable_nonsignaling(model).max_deviation <= kTol);
    inject_w_signaling(model);
    CHECK(analysis::check_observable_nonsignaling(model).max_deviation > kTol);
}

TEST_CASE("signaling toy: Y copies Alice's setting") {
    DiscreteModel toy = build_signaling_toy();
    analysis::DependenceReport report = analysis::check_observable_nonsignaling(toy);
    CHECK(report.max_deviation == 1.0);
    CHECK(report.witness.side == "Y");
}
