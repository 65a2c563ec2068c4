#pragma once

#include <functional>

#include "hvlab/engine.hpp"
#include "hvlab/model.hpp"

namespace hvlab::ineq {

// Four measurement settings of a CHSH run.
struct ChshSpec {
    Angle a0;
    Angle a1;
    Angle b0;
    Angle b1;
};

using JointFn = std::function<JointTable(Angle, Angle)>;

// E[XY] at one setting pair.
double correlator(const JointFn& joint, Angle a, Angle b);
double correlator(const HvModel& model, Angle a, Angle b,
                  engine::Backend backend = engine::Backend::Exact,
                  const engine::McOptions& opts = {});

// S = E(a0,b0) - E(a0,b1) + E(a1,b0) + E(a1,b1). Local deterministic models
// obey |S| <= 2; the singlet reaches |S| = 2*sqrt(2) at settings
// (0, pi/2, pi/4, 3pi/4).
double chsh_value(const JointFn& joint, const ChshSpec& spec);
double chsh_value(const HvModel& model, const ChshSpec& spec,
                  engine::Backend backend = engine::Backend::Exact,
                  const engine::McOptions& opts = {});

}  // namespace hvlab::ineq
