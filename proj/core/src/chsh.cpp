#include "hvlab/chsh.hpp"

namespace hvlab::ineq {

double correlator(const JointFn& joint, Angle a, Angle b) {
    return joint(a, b).correlator();
}

namespace {

JointFn backend_fn(const HvModel& model, engine::Backend backend,
                   const engine::McOptions& opts) {
    if (backend == engine::Backend::Exact) {
        return [&model](Angle a, Angle b) { return engine::exact_joint(model, a, b); };
    }
    return [&model, opts](Angle a, Angle b) {
        return engine::mc_estimate_joint(model, a, b, opts).table;
    };
}

}  // namespace

double correlator(const HvModel& model, Angle a, Angle b, engine::Backend backend,
                  const engine::McOptions& opts) {
    return correlator(backend_fn(model, backend, opts), a, b);
}

double chsh_value(const JointFn& joint, const ChshSpec& spec) {
    return correlator(joint, spec.a0, spec.b0) - correlator(joint, spec.a0, spec.b1) +
           correlator(joint, spec.a1, spec.b0) + correlator(joint, spec.a1, spec.b1);
}

double chsh_value(const HvModel& model, const ChshSpec& spec, engine::Backend backend,
                  const engine::McOptions& opts) {
    return chsh_value(backend_fn(model, backend, opts), spec);
}

}  // namespace hvlab::ineq
