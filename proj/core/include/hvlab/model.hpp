#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "hvlab/angle.hpp"
#include "hvlab/prob.hpp"
#include "hvlab/rng.hpp"

namespace hvlab {

struct WeightedAngle {
    Angle value;
    double prob = 0.0;
};

struct WeightedPair {
    Angle u;
    Angle v;
    double prob = 0.0;
};

// A bipartite hidden-variable model.
//
// The shape of this interface is itself a constraint: the joint local-HV
// draw never sees the settings, the nonlocal draw may see both, and each
// response reads only its own site's setting plus (local HV, nonlocal HV).
//
// The sampling surface is mandatory. The enumeration surface is optional;
// models that expose it (delta or finite-support structure) unlock the
// exact backends and the marginalization/dependence analyses.
class HvModel {
  public:
    virtual ~HvModel() = default;

    // Draw (u, v) from the setting-independent local-HV joint.
    virtual std::pair<Angle, Angle> sample_local(PhiloxRng& rng) const = 0;

    // Draw w from the nonlocal-HV distribution conditioned on everything.
    virtual Angle sample_nonlocal(Angle a, Angle b, Angle u, Angle v, PhiloxRng& rng) const = 0;

    virtual OutcomeDist response_x(Angle a, Angle u, Angle w) const = 0;
    virtual OutcomeDist response_y(Angle b, Angle v, Angle w) const = 0;

    // Finite or delta support of the local-HV joint, when enumerable.
    virtual std::optional<std::vector<WeightedPair>> local_support() const {
        return std::nullopt;
    }

    // Finite or delta support of the nonlocal HV given (a, b, u, v).
    virtual std::optional<std::vector<WeightedAngle>> nonlocal_support(Angle /*a*/, Angle /*b*/,
                                                                       Angle /*u*/,
                                                                       Angle /*v*/) const {
        return std::nullopt;
    }

    // Conditional distribution of V given U = u, when enumerable.
    virtual std::optional<std::vector<WeightedAngle>> conditional_v_given_u(Angle /*u*/) const {
        return std::nullopt;
    }

    // Closed-form joint outcome table, for models with a continuous local
    // part that still evaluate exactly.
    virtual std::optional<JointTable> closed_form_joint(Angle /*a*/, Angle /*b*/) const {
        return std::nullopt;
    }
};

}  // namespace hvlab
