#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hvlab/model.hpp"

namespace hvlab {

// Hidden-variable components a model can carry besides the nonlocal one.
enum class HvComponent { U, V };

std::string to_string(HvComponent c);

// Finite-support HV model with explicit probability tables.
//
// All evaluation is index-based; the angle values attached to settings and
// supports give the indices meaning (and, for models derived from the
// continuous one, their position on the circle). Fields are public in the
// usual scientific-struct style; call finalize() after any direct edit to
// re-validate and rebuild the lookup caches.
class DiscreteModel final : public HvModel {
  public:
    struct UvEntry {
        int iu = 0;
        int iv = 0;
        double p = 0.0;
    };

    // w = Alice's setting, exactly; requires settings_a to lie on support_w.
    struct DeltaAtA {};

    // Explicit rows over support_w, one per (a, b, u, v), stored sparsely.
    struct SparseKernel {
        std::vector<std::vector<std::pair<int, double>>> rows;
    };

    std::vector<Angle> settings_a;
    std::vector<Angle> settings_b;
    std::vector<Angle> support_u;
    std::vector<Angle> support_v;
    std::vector<Angle> support_w;

    std::vector<UvEntry> p_uv;
    std::variant<DeltaAtA, SparseKernel> p_w = DeltaAtA{};
    std::vector<double> p_x;  // [ia][iu][iw] -> P(X=+1)
    std::vector<double> p_y;  // [ib][iv][iw] -> P(Y=+1)

    // Validates every table and rebuilds sampling/lookup caches. Throws
    // ValidationError naming the offending table and row.
    void finalize();

    int n_a() const { return static_cast<int>(settings_a.size()); }
    int n_b() const { return static_cast<int>(settings_b.size()); }
    int n_u() const { return static_cast<int>(support_u.size()); }
    int n_v() const { return static_cast<int>(support_v.size()); }
    int n_w() const { return static_cast<int>(support_w.size()); }

    double px(int ia, int iu, int iw) const {
        return p_x[static_cast<std::size_t>((ia * n_u() + iu) * n_w() + iw)];
    }
    double py(int ib, int iv, int iw) const {
        return p_y[static_cast<std::size_t>((ib * n_v() + iv) * n_w() + iw)];
    }

    // Nonlocal row as (iw, prob) pairs. DeltaAtA rows are one-point.
    std::span<const std::pair<int, double>> w_row(int ia, int ib, int iu, int iv) const;

    // Index of the support_w point holding the delta mass for setting ia
    // (DeltaAtA models only).
    int w_index_for_a(int ia) const { return a_to_w_[static_cast<std::size_t>(ia)]; }
    bool has_delta_w() const { return std::holds_alternative<DeltaAtA>(p_w); }

    // Angle -> index lookups (1e-12 circular tolerance); throw DomainError
    // when the value is not on the corresponding list.
    int index_a(Angle a) const;
    int index_b(Angle b) const;
    int index_u(Angle u) const;
    int index_v(Angle v) const;

    // HvModel surface.
    std::pair<Angle, Angle> sample_local(PhiloxRng& rng) const override;
    Angle sample_nonlocal(Angle a, Angle b, Angle u, Angle v, PhiloxRng& rng) const override;
    OutcomeDist response_x(Angle a, Angle u, Angle w) const override;
    OutcomeDist response_y(Angle b, Angle v, Angle w) const override;
    std::optional<std::vector<WeightedPair>> local_support() const override;
    std::optional<std::vector<WeightedAngle>> nonlocal_support(Angle a, Angle b, Angle u,
                                                               Angle v) const override;
    std::optional<std::vector<WeightedAngle>> conditional_v_given_u(Angle u) const override;

  private:
    int index_w(Angle w) const;
    int find_index(const std::vector<std::pair<double, int>>& sorted, Angle x) const;

    std::vector<std::pair<double, int>> sorted_a_, sorted_b_, sorted_u_, sorted_v_, sorted_w_;
    std::vector<int> a_to_w_;
    std::vector<double> uv_cdf_;
    std::vector<std::pair<int, double>> delta_rows_;  // one-point rows for DeltaAtA
    std::vector<double> p_u_marginal_;
    bool finalized_ = false;
};

// Parameters for a purely local deterministic model: a shared finite HV
// lambda (carried as U = V) and sign tables per (setting, lambda).
struct LocalDeterministicParams {
    std::vector<Angle> settings_a;
    std::vector<Angle> settings_b;
    std::vector<double> lambda_probs;
    std::vector<std::vector<int>> x_sign;  // [setting][lambda] in {+1, -1}
    std::vector<std::vector<int>> y_sign;
};

DiscreteModel build_local_deterministic(const LocalDeterministicParams& params);

// Random deterministic local model (shared lambda, random sign tables).
DiscreteModel random_local_deterministic(PhiloxRng& rng, int n_settings_per_side = 2,
                                         int n_lambda = 4);

// Grid discretization of the continuous model: U = V uniform on the n-point
// grid 2*pi*k/n, W delta at Alice's setting, responses evaluated at grid
// points. Default settings are the eight multiples of pi/4 when they lie on
// the grid (8 | n_grid), otherwise the full grid. Explicit settings must lie
// on the grid.
DiscreteModel discretize_paper_model(int n_grid);
DiscreteModel discretize_paper_model(int n_grid, const std::vector<Angle>& settings_a,
                                     const std::vector<Angle>& settings_b);

// Options for the random generator of models whose response tables never
// index a remote setting and whose nonlocal component is inert (all kernel
// rows put their mass on one support point).
struct CrCompliantGenOptions {
    int n_a = 2;
    int n_b = 2;
    int n_u = 3;
    int n_v = 3;
    int n_w = 1;
};

DiscreteModel random_cr_compliant_model(PhiloxRng& rng,
                                        const CrCompliantGenOptions& opts = {});

// Mutates one table (the nonlocal kernel) so W tracks Alice's setting,
// turning an inert nonlocal component into a signaling channel. Requires a
// SparseKernel with n_w >= n_a.
void inject_w_signaling(DiscreteModel& model);

// Two-settings-per-side toy whose Y response reads the nonlocal component
// (pinned to Alice's setting) straight into the outcome: observably
// signaling from Alice to Bob.
DiscreteModel build_signaling_toy();

// Re-expresses the model with the given local component folded into the
// nonlocal one: the new nonlocal support enumerates (component value, w)
// pairs, the folded component's local support shrinks to one inert point,
// and response tables are re-indexed accordingly. The observable joint is
// unchanged.
DiscreteModel absorb_into_nonlocal(const DiscreteModel& model, HvComponent component);

}  // namespace hvlab
