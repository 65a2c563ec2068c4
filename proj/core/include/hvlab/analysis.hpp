#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hvlab/discrete_model.hpp"
#include "hvlab/model.hpp"

namespace hvlab::analysis {

// P(Y | a, b, u, v): the Y response averaged over the nonlocal component.
OutcomeDist marginal_y_given_abuv(const HvModel& model, Angle a, Angle b, Angle u, Angle v);

// P(X | a, b, u, v).
OutcomeDist marginal_x_given_abuv(const HvModel& model, Angle a, Angle b, Angle u, Angle v);

// P(Y | a, b, u): additionally averaged over V conditioned on U = u.
OutcomeDist marginal_y_given_abu(const HvModel& model, Angle a, Angle b, Angle u);

// P(X | a, b, u).
OutcomeDist marginal_x_given_abu(const HvModel& model, Angle a, Angle b, Angle u);

// The configuration at which a dependence check attains its maximum. The
// varied coordinate is always the remote setting of `side`'s outcome: b for
// side "X", a for side "Y". For index-only audit tables all coordinates are
// table indices.
struct DependenceWitness {
    std::string side;  // "X" or "Y"
    int outcome = +1;  // outcome whose probability is compared
    double local_setting = 0.0;
    double remote_from = 0.0;
    double remote_to = 0.0;
    std::optional<double> u;
    std::optional<double> v;
    std::optional<double> w;
    double p_from = 0.0;
    double p_to = 0.0;
};

struct DependenceReport {
    std::string quantity;                   // e.g. "P(Y=-1 | a, b, u, v)"
    std::vector<std::string> conditioning;  // e.g. {"a", "b", "u", "v"}
    std::string level;                      // "observable", "cr" or "full"
    double max_deviation = 0.0;
    DependenceWitness witness;
    std::string note;
};

// Remote-setting dependence of the responses at fixed (settings, u, v, w).
// Interface-shaped models cannot express such a dependence; the check
// reports zero with an evaluated witness.
DependenceReport check_generalized_locality(const HvModel& model);

// Externally specified response tables indexed by all five of
// (a, b, u, v, w); the audit vehicle for tables that may list a remote
// setting. Not an HvModel.
struct FullResponseTables {
    int n_a = 0, n_b = 0, n_u = 0, n_v = 0, n_w = 0;
    std::vector<double> p_x_plus;  // [ia][ib][iu][iv][iw]
    std::vector<double> p_y_plus;

    double px(int ia, int ib, int iu, int iv, int iw) const;
    double py(int ia, int ib, int iu, int iv, int iw) const;
    void validate() const;
};

DependenceReport check_generalized_locality(const FullResponseTables& tables);

// Remote-setting dependence of the outcome marginals conditioned on the
// local components (u, v), averaging over the nonlocal one. Zero deviation
// means (U, V) is a valid local part under the conditional-nonsignaling
// restriction.
DependenceReport check_cr_locality(const HvModel& model);

// Remote-setting dependence of the fully marginalized outcome
// distributions.
DependenceReport check_observable_nonsignaling(const HvModel& model);
DependenceReport check_observable_nonsignaling_singlet();

struct VerifySummary {
    int n_models = 0;
    int n_passed = 0;
    double worst_deviation = 0.0;
    int worst_index = -1;
    bool all_pass = true;
};

// Generates random discrete models that satisfy conditional nonsignaling by
// construction (inert nonlocal part, random local tables) and checks each
// one for observable nonsignaling within 1e-12.
VerifySummary verify_cr_implies_nonsignaling(std::uint64_t seed, int n_models);

struct AbsorptionStep {
    std::string component;  // "V" or "U"
    DependenceReport report;
};

struct DecompositionReport {
    std::vector<AbsorptionStep> absorbed;
    std::vector<std::string> local_part;
    std::vector<std::string> nonlocal_part;
};

// Iteratively shrinks the candidate local part: while the marginals
// conditioned on the current local part still depend on a remote setting,
// the next component (V before U) is folded into the nonlocal part and the
// check repeats on the re-expressed model. Single-point components count as
// already absent from the local part.
DecompositionReport cr_decompose(const HvModel& model);

// Recompute |p_from - p_to| for a witness from scratch against the model it
// was reported for.
double reevaluate_witness(const HvModel& model, const DependenceReport& report);
double reevaluate_witness(const FullResponseTables& tables, const DependenceReport& report);

// Move a witness coordinate off an arc boundary (1e-9 nudge) when it sits
// within 1e-12 of one; used before reporting continuous-model witnesses.
double nudge_off_boundary(double value, const std::vector<CircularInterval>& arcs);

}  // namespace hvlab::analysis
