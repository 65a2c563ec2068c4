#include <cmath>
#include <numbers>

#include <doctest.h>

#include "hvlab/analysis.hpp"
#include "hvlab/discrete_model.hpp"
#include "hvlab/engine.hpp"
#include "hvlab/paper_model.hpp"

using namespace hvlab;
using namespace hvlab::analysis;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent route for the w-average: build the full joint over
// (x, y, w) given (a, b, u, v), then marginalize.
OutcomeDist y_marginal_via_full_joint(const HvModel& model, Angle a, Angle b, Angle u, Angle v) {
    auto support = model.nonlocal_support(a, b, u, v);
    REQUIRE(support.has_value());
    double p_minus = 0.0;
    for (const auto& [w, pw] : *support) {
        double px = model.response_x(a, u, w).p_plus();
        double py = model.response_y(b, v, w).p_plus();
        // Sum over x of P(x, y=-1, w | a, b, u, v).
        p_minus += pw * px * (1.0 - py) + pw * (1.0 - px) * (1.0 - py);
    }
    return OutcomeDist(1.0 - p_minus);
}

DiscreteModel washout_model() {
    // W = a on two settings; Y reads (v XOR w) so conditioning on v reveals
    // the remote setting but averaging over an independent uniform V hides
    // it. U stays a legitimate local component.
    DiscreteModel m;
    m.settings_a = {Angle(0.0), Angle(kPi / 2.0)};
    m.settings_b = {Angle(0.0), Angle(kPi / 2.0)};
    m.support_u = {Angle(0.0), Angle(kPi)};
    m.support_v = {Angle(0.0), Angle(kPi)};
    m.support_w = m.settings_a;
    m.p_w = DiscreteModel::DeltaAtA{};
    for (int iu = 0; iu < 2; ++iu) {
        for (int iv = 0; iv < 2; ++iv) {
            m.p_uv.push_back({iu, iv, 0.25});
        }
    }
    m.p_x.resize(2 * 2 * 2);
    m.p_y.resize(2 * 2 * 2);
    for (int ia = 0; ia < 2; ++ia) {
        for (int iu = 0; iu < 2; ++iu) {
            for (int iw = 0; iw < 2; ++iw) {
                m.p_x[std::size_t((ia * 2 + iu) * 2 + iw)] = ia == iu ? 1.0 : 0.0;
            }
        }
    }
    for (int ib = 0; ib < 2; ++ib) {
        for (int iv = 0; iv < 2; ++iv) {
            for (int iw = 0; iw < 2; ++iw) {
                m.p_y[std::size_t((ib * 2 + iv) * 2 + iw)] = ((iv + iw) % 2 == 0) ? 1.0 : 0.0;
            }
        }
    }
    m.finalize();
    return m;
}

}  // namespace

TEST_CASE("w-averaged Y marginal: closed-form arc behaviour") {
    PaperModel model;
    // sin^2(0) = 0: arc (0, pi) contains pi/2.
    CHECK(marginal_y_given_abuv(model, Angle(0.0), Angle(0.0), Angle(kPi / 2), Angle(kPi / 2))
              .p_minus() == 1.0);
    // b = pi: shift pi*sin^2(pi/2) = pi moves the arc to (pi, 2pi).
    CHECK(marginal_y_given_abuv(model, Angle(0.0), Angle(kPi), Angle(kPi / 2), Angle(kPi / 2))
              .p_minus() == 0.0);
}

TEST_CASE("w-averaged marginal equals the response at a one-point nonlocal support") {
    PhiloxRng rng(13);
    DiscreteModel model = random_local_deterministic(rng, 2, 3);
    Angle a = model.settings_a[0], b = model.settings_b[1];
    Angle u = model.support_u[2], v = model.support_v[2];
    Angle w = model.support_w[0];
    CHECK(marginal_y_given_abuv(model, a, b, u, v).p_minus() ==
          model.response_y(b, v, w).p_minus());
    CHECK(marginal_x_given_abuv(model, a, b, u, v).p_plus() ==
          model.response_x(a, u, w).p_plus());
}

TEST_CASE("two computation routes for the w-average agree") {
    PaperModel paper;
    PhiloxRng rng(21);
    for (int i = 0; i < 50; ++i) {
        Angle a = rng.uniform_angle(), b = rng.uniform_angle(), uv = rng.uniform_angle();
        double direct = marginal_y_given_abuv(paper, a, b, uv, uv).p_minus();
        double via_joint = y_marginal_via_full_joint(paper, a, b, uv, uv).p_minus();
        CHECK(std::fabs(direct - via_joint) <= 1e-12);
    }
    CrCompliantGenOptions opts;
    opts.n_w = 3;
    DiscreteModel discrete = random_cr_compliant_model(rng, opts);
    for (const auto& entry : discrete.p_uv) {
        Angle u = discrete.support_u[std::size_t(entry.iu)];
        Angle v = discrete.support_v[std::size_t(entry.iv)];
        for (Angle a : discrete.settings_a) {
            for (Angle b : discrete.settings_b) {
                double direct = marginal_y_given_abuv(discrete, a, b, u, v).p_minus();
                double via_joint = y_marginal_via_full_joint(discrete, a, b, u, v).p_minus();
                CHECK(std::fabs(direct - via_joint) <= 1e-12);
            }
        }
    }
}

TEST_CASE("u-conditioned Y marginal: the signaling witness flips") {
    PaperModel model;
    CHECK(marginal_y_given_abu(model, Angle(0.0), Angle(0.0), Angle(3 * kPi / 4)).p_minus() ==
          1.0);
    CHECK(marginal_y_given_abu(model, Angle(kPi / 2), Angle(0.0), Angle(3 * kPi / 4)).p_minus() ==
          0.0);
}

TEST_CASE("u-conditioned marginal reduces to (u,v)-conditioned at equal settings") {
    PaperModel model;
    PhiloxRng rng(31);
    for (int i = 0; i < 20; ++i) {
        Angle ab = rng.uniform_angle();
        Angle u = rng.uniform_angle();
        CHECK(marginal_y_given_abu(model, ab, ab, u).p_minus() ==
              marginal_y_given_abuv(model, ab, ab, u, u).p_minus());
    }
}

TEST_CASE("u-conditioned marginal matches the arc indicator on a 360-point grid") {
    PaperModel model;
    PhiloxRng rng(41);
    for (int trial = 0; trial < 5; ++trial) {
        Angle a = rng.uniform_angle(), b = rng.uniform_angle();
        CircularInterval arc(paper_y_minus_arc_start(b, a), kPi);
        for (int k = 0; k < 360; ++k) {
            Angle u(kTwoPi * k / 360.0);
            if (circ_distance(u, arc.start()) <= 1e-9 ||
                circ_distance(u, arc.start().shifted(kPi)) <= 1e-9) {
                continue;  // boundary points are convention-dependent
            }
            double expected = arc.contains(u) ? 1.0 : 0.0;
            CHECK(marginal_y_given_abu(model, a, b, u).p_minus() == expected);
        }
    }
}

TEST_CASE("marginal ops reject models without exact structure") {
    struct OpaqueModel final : HvModel {
        std::pair<Angle, Angle> sample_local(PhiloxRng& rng) const override {
            Angle u = rng.uniform_angle();
            return {u, u};
        }
        Angle sample_nonlocal(Angle a, Angle, Angle, Angle, PhiloxRng&) const override {
            return a;
        }
        OutcomeDist response_x(Angle, Angle, Angle) const override { return OutcomeDist(0.5); }
        OutcomeDist response_y(Angle, Angle, Angle) const override { return OutcomeDist(0.5); }
    };
    OpaqueModel opaque;
    CHECK_THROWS_AS(marginal_y_given_abuv(opaque, Angle(0), Angle(0), Angle(0), Angle(0)),
                    UnsupportedModelError);
    CHECK_THROWS_AS(marginal_y_given_abu(opaque, Angle(0), Angle(0), Angle(0)),
                    UnsupportedModelError);
    CHECK_THROWS_AS(check_cr_locality(opaque), UnsupportedModelError);
    CHECK_THROWS_AS(cr_decompose(opaque), UnsupportedModelError);
}

TEST_CASE("generalized locality: interface-shaped models report zero") {
    PaperModel paper;
    DependenceReport report = check_generalized_locality(paper);
    CHECK(report.max_deviation == 0.0);
    CHECK(report.level == "full");

    PhiloxRng rng(3);
    DiscreteModel local = random_local_deterministic(rng, 2, 4);
    CHECK(check_generalized_locality(local).max_deviation == 0.0);
}

TEST_CASE("generalized locality: five-index audit tables catch remote dependence") {
    FullResponseTables tables;
    tables.n_a = 2;
    tables.n_b = 2;
    tables.n_u = 1;
    tables.n_v = 1;
    tables.n_w = 1;
    // P(Y=+1) lists the remote setting a: 0.9 under a0, 0.1 under a1.
    tables.p_x_plus = {0.5, 0.5, 0.5, 0.5};
    tables.p_y_plus = {0.9, 0.9, 0.1, 0.1};
    DependenceReport report = check_generalized_locality(tables);
    CHECK(report.max_deviation == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(report.witness.side == "Y");
    CHECK(std::fabs(reevaluate_witness(tables, report) - report.max_deviation) <= 1e-12);

    tables.p_y_plus = {0.9, 0.9, 0.9, 0.9};
    CHECK(check_generalized_locality(tables).max_deviation == 0.0);

    tables.p_y_plus = {0.9, 0.9, 0.9, 1.5};
    CHECK_THROWS_AS(check_generalized_locality(tables), ValidationError);
}

TEST_CASE("conditional nonsignaling check: the builtin model fails maximally") {
    PaperModel model;
    DependenceReport report = check_cr_locality(model);
    CHECK(report.max_deviation == 1.0);
    CHECK(report.witness.side == "Y");
    CHECK(report.witness.local_setting == 0.0);
    CHECK(report.witness.remote_from == 0.0);
    CHECK(report.witness.remote_to == Angle(kPi / 2).value());
    REQUIRE(report.witness.u.has_value());
    REQUIRE(report.witness.v.has_value());
    CHECK(*report.witness.u == Angle(3 * kPi / 4).value());
    CHECK(*report.witness.v == *report.witness.u);
    CHECK(std::fabs(reevaluate_witness(model, report) - 1.0) <= 1e-12);
}

TEST_CASE("conditional nonsignaling check: the X side alone is clean") {
    PaperModel model;
    double worst = 0.0;
    PhiloxRng rng(71);
    for (int i = 0; i < 200; ++i) {
        Angle a = rng.uniform_angle(), uv = rng.uniform_angle();
        Angle b1 = rng.uniform_angle(), b2 = rng.uniform_angle();
        double p1 = marginal_x_given_abuv(model, a, b1, uv, uv).p_plus();
        double p2 = marginal_x_given_abuv(model, a, b2, uv, uv).p_plus();
        worst = std::max(worst, std::fabs(p1 - p2));
    }
    CHECK(worst == 0.0);
}

TEST_CASE("conditional nonsignaling check: trivial-W models pass") {
    PhiloxRng rng(5);
    DiscreteModel model = random_local_deterministic(rng, 3, 5);
    DependenceReport report = check_cr_locality(model);
    CHECK(report.max_deviation <= kTol);
    CHECK(std::fabs(reevaluate_witness(model, report) - report.max_deviation) <= 1e-12);
}

TEST_CASE("conditional nonsignaling check: grid discretization fails like the original") {
    DiscreteModel grid = discretize_paper_model(72);
    DependenceReport report = check_cr_locality(grid);
    CHECK(report.max_deviation == 1.0);
    CHECK(std::fabs(reevaluate_witness(grid, report) - 1.0) <= 1e-12);
}

TEST_CASE("observable nonsignaling: builtin, singlet and a signaling toy") {
    PaperModel model;
    DependenceReport paper_report = check_observable_nonsignaling(model);
    CHECK(paper_report.max_deviation <= 1e-12);
    CHECK(std::fabs(reevaluate_witness(model, paper_report) - paper_report.max_deviation) <=
          1e-12);

    CHECK(check_observable_nonsignaling_singlet().max_deviation <= 1e-12);

    DiscreteModel toy = build_signaling_toy();
    DependenceReport toy_report = check_observable_nonsignaling(toy);
    CHECK(toy_report.max_deviation == 1.0);
    CHECK(std::fabs(reevaluate_witness(toy, toy_report) - 1.0) <= 1e-12);
}

TEST_CASE("generated conditional-nonsignaling models are observably nonsignaling") {
    VerifySummary summary = verify_cr_implies_nonsignaling(42, 100);
    CHECK(summary.n_models == 100);
    CHECK(summary.n_passed == 100);
    CHECK(summary.all_pass);
    CHECK(summary.worst_deviation <= kTol);

    VerifySummary vacuous = verify_cr_implies_nonsignaling(42, 0);
    CHECK(vacuous.all_pass);
    CHECK(vacuous.n_models == 0);
}

TEST_CASE("the implication check's sensor catches an injected violation") {
    PhiloxRng rng(4242);
    CrCompliantGenOptions opts;
    opts.n_a = 2;
    opts.n_w = 2;
    DiscreteModel model = random_cr_compliant_model(rng, opts);
    CHECK(check_observable_nonsignaling(model).max_deviation <= kTol);
    inject_w_signaling(model);
    DependenceReport report = check_observable_nonsignaling(model);
    CHECK(report.max_deviation > kTol);
    CHECK(std::fabs(reevaluate_witness(model, report) - report.max_deviation) <= 1e-12);
}

TEST_CASE("decomposition: builtin model loses V then U") {
    PaperModel model;
    DecompositionReport report = cr_decompose(model);
    REQUIRE(report.absorbed.size() == 2);
    CHECK(report.absorbed[0].component == "V");
    CHECK(report.absorbed[1].component == "U");
    CHECK(report.absorbed[0].report.max_deviation == 1.0);
    CHECK(report.absorbed[1].report.max_deviation == 1.0);
    CHECK(report.local_part.empty());
    REQUIRE(report.nonlocal_part.size() == 3);
    CHECK(report.nonlocal_part[0] == "W");
    CHECK(report.nonlocal_part[1] == "V");
    CHECK(report.nonlocal_part[2] == "U");
    // The step reports re-evaluate standalone.
    CHECK(std::fabs(reevaluate_witness(model, report.absorbed[0].report) - 1.0) <= 1e-12);
    CHECK(std::fabs(reevaluate_witness(model, report.absorbed[1].report) - 1.0) <= 1e-12);
    // Step 2 conditions on u alone.
    CHECK(report.absorbed[1].report.conditioning == std::vector<std::string>{"a", "b", "u"});
}

TEST_CASE("decomposition: local models keep their local part") {
    PhiloxRng rng(9);
    DiscreteModel model = random_local_deterministic(rng, 2, 4);
    DecompositionReport report = cr_decompose(model);
    CHECK(report.absorbed.empty());
    CHECK(report.local_part == std::vector<std::string>{"U", "V"});
    CHECK(report.nonlocal_part == std::vector<std::string>{"W"});
}

TEST_CASE("decomposition: grid discretization mirrors the continuous narrative") {
    DiscreteModel grid = discretize_paper_model(360);
    DecompositionReport report = cr_decompose(grid);
    REQUIRE(report.absorbed.size() == 2);
    CHECK(report.absorbed[0].component == "V");
    CHECK(report.absorbed[1].component == "U");
    CHECK(report.local_part.empty());
}

TEST_CASE("decomposition: partial absorption when averaging washes the signal out") {
    DiscreteModel model = washout_model();
    DecompositionReport report = cr_decompose(model);
    REQUIRE(report.absorbed.size() == 1);
    CHECK(report.absorbed[0].component == "V");
    CHECK(report.local_part == std::vector<std::string>{"U"});
    CHECK(report.nonlocal_part == std::vector<std::string>{"W", "V"});
    CHECK(std::fabs(reevaluate_witness(model, report.absorbed[0].report) -
                    report.absorbed[0].report.max_deviation) <= 1e-12);
}

TEST_CASE("decomposition is idempotent on the re-expressed model") {
    auto names = [](const DecompositionReport& r) {
        return std::make_pair(r.local_part, r.absorbed.size());
    };

    // Full absorption: re-expressing leaves no live local component.
    DiscreteModel grid = discretize_paper_model(60);
    DecompositionReport first = cr_decompose(grid);
    DiscreteModel re_expressed = grid;
    for (const auto& step : first.absorbed) {
        re_expressed = absorb_into_nonlocal(
            re_expressed, step.component == "V" ? HvComponent::V : HvComponent::U);
    }
    DecompositionReport second = cr_decompose(re_expressed);
    CHECK(second.local_part == first.local_part);
    CHECK(second.absorbed.empty());

    // Partial absorption: the surviving local part survives again.
    DiscreteModel wash = washout_model();
    DecompositionReport wash_first = cr_decompose(wash);
    DiscreteModel wash_re = absorb_into_nonlocal(wash, HvComponent::V);
    DecompositionReport wash_second = cr_decompose(wash_re);
    CHECK(wash_second.local_part == wash_first.local_part);
    CHECK(wash_second.absorbed.empty());

    // No absorption: decomposing the unchanged model repeats the split.
    PhiloxRng rng(9);
    DiscreteModel local = random_local_deterministic(rng, 2, 4);
    CHECK(names(cr_decompose(local)) == names(cr_decompose(local)));
}

TEST_CASE("boundary witnesses are nudged into the interior") {
    CircularInterval arc(Angle(0.0), kPi);
    double on_start = nudge_off_boundary(0.0, {arc});
    CHECK(on_start != 0.0);
    CHECK(std::fabs(on_start - 1e-9) <= 1e-15);
    double on_end = nudge_off_boundary(kPi, {arc});
    CHECK(circ_distance(Angle(on_end), Angle(kPi)) > kTol);
    double interior = nudge_off_boundary(1.0, {arc});
    CHECK(interior == 1.0);
}
