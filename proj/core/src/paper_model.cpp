#include "hvlab/paper_model.hpp"

#include <cmath>
#include <numbers>

namespace hvlab {

namespace {

constexpr double kPi = std::numbers::pi;

double half_angle_sine_sq(double delta) {
    double s = std::sin(delta / 2.0);
    return s * s;
}

}  // namespace

OutcomeDist paper_response_x(Angle a, Angle u) {
    CircularInterval plus_arc(a, kPi);
    return OutcomeDist(plus_arc.contains(u) ? 1.0 : 0.0);
}

Angle paper_y_minus_arc_start(Angle b, Angle w) {
    return w.shifted(kPi * half_angle_sine_sq(b.value() - w.value()));
}

OutcomeDist paper_response_y(Angle b, Angle v, Angle w) {
    CircularInterval minus_arc(paper_y_minus_arc_start(b, w), kPi);
    return OutcomeDist(minus_arc.contains(v) ? 0.0 : 1.0);
}

std::tuple<Angle, Angle, Angle> paper_sample_hv(Angle a, Angle /*b*/, PhiloxRng& rng) {
    Angle u = rng.uniform_angle();
    return {u, u, a};
}

JointTable singlet_joint(Angle a, Angle b) {
    double delta = b.value() - a.value();
    double s = std::sin(delta / 2.0);
    double c = std::cos(delta / 2.0);
    double same = 0.5 * s * s;
    double diff = 0.5 * c * c;
    return JointTable(same, diff, diff, same);
}

std::pair<Angle, Angle> PaperModel::sample_local(PhiloxRng& rng) const {
    Angle u = rng.uniform_angle();
    return {u, u};
}

Angle PaperModel::sample_nonlocal(Angle a, Angle /*b*/, Angle /*u*/, Angle /*v*/,
                                  PhiloxRng& /*rng*/) const {
    return a;
}

OutcomeDist PaperModel::response_x(Angle a, Angle u, Angle /*w*/) const {
    return paper_response_x(a, u);
}

OutcomeDist PaperModel::response_y(Angle b, Angle v, Angle w) const {
    return paper_response_y(b, v, w);
}

std::optional<std::vector<WeightedAngle>> PaperModel::nonlocal_support(Angle a, Angle /*b*/,
                                                                       Angle /*u*/,
                                                                       Angle /*v*/) const {
    return std::vector<WeightedAngle>{{a, 1.0}};
}

std::optional<std::vector<WeightedAngle>> PaperModel::conditional_v_given_u(Angle u) const {
    return std::vector<WeightedAngle>{{u, 1.0}};
}

std::optional<JointTable> PaperModel::closed_form_joint(Angle a, Angle b) const {
    // X = +1 on the half-circle at a; Y = +1 off the half-circle starting at
    // a + pi*sigma once w = a is substituted. The overlap of those arcs has
    // measure sigma/2 with sigma = sin^2((b-a)/2).
    double sigma = half_angle_sine_sq(b.value() - a.value());
    double same = 0.5 * sigma;
    double diff = 0.5 * (1.0 - sigma);
    return JointTable(same, diff, diff, same);
}

}  // namespace hvlab
