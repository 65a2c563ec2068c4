#pragma once

#include <tuple>

#include "hvlab/model.hpp"

namespace hvlab {

// Deterministic X response: +1 exactly when u lies on the half-circle
// starting at Alice's setting.
OutcomeDist paper_response_x(Angle a, Angle u);

// Deterministic Y response: -1 exactly when v lies on the half-circle
// starting at w + pi*sin^2((b - w)/2).
OutcomeDist paper_response_y(Angle b, Angle v, Angle w);

// Start of the arc on which Y = -1, given Bob's setting and the nonlocal HV.
Angle paper_y_minus_arc_start(Angle b, Angle w);

// One HV draw: u = v uniform on [0, 2pi), w = a exactly. b is unused.
std::tuple<Angle, Angle, Angle> paper_sample_hv(Angle a, Angle b, PhiloxRng& rng);

// Quantum singlet reference: p(+1,+1) = p(-1,-1) = sin^2((b-a)/2)/2,
// p(+1,-1) = p(-1,+1) = cos^2((b-a)/2)/2.
JointTable singlet_joint(Angle a, Angle b);

// The explicit nonlocal HV model: a shared uniform angle U = V, a nonlocal
// component pinned to Alice's setting (W = a), and deterministic arc
// responses that together reproduce the singlet joint statistics.
class PaperModel final : public HvModel {
  public:
    std::pair<Angle, Angle> sample_local(PhiloxRng& rng) const override;
    Angle sample_nonlocal(Angle a, Angle b, Angle u, Angle v, PhiloxRng& rng) const override;
    OutcomeDist response_x(Angle a, Angle u, Angle w) const override;
    OutcomeDist response_y(Angle b, Angle v, Angle w) const override;

    // W is a delta at a: a one-point support.
    std::optional<std::vector<WeightedAngle>> nonlocal_support(Angle a, Angle b, Angle u,
                                                               Angle v) const override;

    // U = V: the conditional of V given U = u is a delta at u.
    std::optional<std::vector<WeightedAngle>> conditional_v_given_u(Angle u) const override;

    // Arc-overlap integral of the responses over the uniform shared angle.
    std::optional<JointTable> closed_form_joint(Angle a, Angle b) const override;
};

}  // namespace hvlab
