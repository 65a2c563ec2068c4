#include "hvlab/discrete_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hvlab/errors.hpp"
#include "hvlab/paper_model.hpp"

namespace hvlab {

namespace {

// Evenly spaced placeholder values for supports whose points are labels
// rather than positions on the circle (toy lambdas, merged components).
std::vector<Angle> synthetic_support(int n) {
    std::vector<Angle> values;
    values.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        values.emplace_back(kTwoPi * static_cast<double>(k) / static_cast<double>(n));
    }
    return values;
}

std::vector<std::pair<double, int>> sorted_index(const std::vector<Angle>& values) {
    std::vector<std::pair<double, int>> sorted;
    sorted.reserve(values.size());
    for (int i = 0; i < static_cast<int>(values.size()); ++i) {
        sorted.emplace_back(values[static_cast<std::size_t>(i)].value(), i);
    }
    std::sort(sorted.begin(), sorted.end());
    return sorted;
}

void check_distinct(const std::vector<std::pair<double, int>>& sorted, const char* name) {
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].first - sorted[i - 1].first <= kTol) {
            throw ValidationError(std::string(name) + ": duplicate values at indices " +
                                  std::to_string(sorted[i - 1].second) + " and " +
                                  std::to_string(sorted[i].second));
        }
    }
    if (sorted.size() > 1) {
        double span = sorted.back().first - sorted.front().first;
        if (kTwoPi - span <= kTol) {
            throw ValidationError(std::string(name) +
                                  ": duplicate values across the circle seam");
        }
    }
}

void check_unit_interval(const std::vector<double>& table, const char* name, int dim1, int dim2,
                         int dim3) {
    for (int i = 0; i < dim1; ++i) {
        for (int j = 0; j < dim2; ++j) {
            for (int k = 0; k < dim3; ++k) {
                double p = table[static_cast<std::size_t>((i * dim2 + j) * dim3 + k)];
                if (!(p >= 0.0 && p <= 1.0)) {
                    std::ostringstream msg;
                    msg << name << ": entry (" << i << ", " << j << ", " << k << ") = " << p
                        << " outside [0, 1]";
                    throw ValidationError(msg.str());
                }
            }
        }
    }
}

}  // namespace

std::string to_string(HvComponent c) { return c == HvComponent::U ? "U" : "V"; }

void DiscreteModel::finalize() {
    if (settings_a.empty() || settings_b.empty()) {
        throw ValidationError("settings_a/settings_b: must be non-empty");
    }
    if (support_u.empty() || support_v.empty() || support_w.empty()) {
        throw ValidationError("support_u/support_v/support_w: must be non-empty");
    }

    sorted_a_ = sorted_index(settings_a);
    sorted_b_ = sorted_index(settings_b);
    sorted_u_ = sorted_index(support_u);
    sorted_v_ = sorted_index(support_v);
    sorted_w_ = sorted_index(support_w);
    check_distinct(sorted_a_, "settings_a");
    check_distinct(sorted_b_, "settings_b");
    check_distinct(sorted_u_, "support_u");
    check_distinct(sorted_v_, "support_v");
    check_distinct(sorted_w_, "support_w");

    // p_uv: one joint distribution over (u, v).
    double uv_sum = 0.0;
    p_u_marginal_.assign(static_cast<std::size_t>(n_u()), 0.0);
    std::vector<bool> seen(static_cast<std::size_t>(n_u() * n_v()), false);
    for (std::size_t e = 0; e < p_uv.size(); ++e) {
        const UvEntry& entry = p_uv[e];
        if (entry.iu < 0 || entry.iu >= n_u() || entry.iv < 0 || entry.iv >= n_v()) {
            throw ValidationError("p_uv: entry " + std::to_string(e) + " indexes off-support");
        }
        if (!(entry.p >= 0.0)) {
            throw ValidationError("p_uv: entry (u=" + std::to_string(entry.iu) +
                                  ", v=" + std::to_string(entry.iv) + ") is negative");
        }
        std::size_t cell = static_cast<std::size_t>(entry.iu * n_v() + entry.iv);
        if (seen[cell]) {
            throw ValidationError("p_uv: duplicate entry (u=" + std::to_string(entry.iu) +
                                  ", v=" + std::to_string(entry.iv) + ")");
        }
        seen[cell] = true;
        uv_sum += entry.p;
        p_u_marginal_[static_cast<std::size_t>(entry.iu)] += entry.p;
    }
    if (std::abs(uv_sum - 1.0) > kTol) {
        throw ValidationError("p_uv: probabilities sum to " + std::to_string(uv_sum) +
                              ", expected 1 within 1e-12");
    }
    uv_cdf_.resize(p_uv.size());
    double acc = 0.0;
    for (std::size_t e = 0; e < p_uv.size(); ++e) {
        acc += p_uv[e].p;
        uv_cdf_[e] = acc;
    }

    // Nonlocal kernel.
    a_to_w_.clear();
    delta_rows_.clear();
    if (has_delta_w()) {
        a_to_w_.reserve(static_cast<std::size_t>(n_a()));
        delta_rows_.reserve(static_cast<std::size_t>(n_a()));
        for (int ia = 0; ia < n_a(); ++ia) {
            int iw = find_index(sorted_w_, settings_a[static_cast<std::size_t>(ia)]);
            if (iw < 0) {
                throw ValidationError(
                    "p_w_given_abuv: delta_at_a requires settings_a[" + std::to_string(ia) +
                    "] to lie on support_w");
            }
            a_to_w_.push_back(iw);
            delta_rows_.emplace_back(iw, 1.0);
        }
    } else {
        const SparseKernel& kernel = std::get<SparseKernel>(p_w);
        std::size_t expected = static_cast<std::size_t>(n_a()) * static_cast<std::size_t>(n_b()) *
                               static_cast<std::size_t>(n_u()) * static_cast<std::size_t>(n_v());
        if (kernel.rows.size() != expected) {
            throw ValidationError("p_w_given_abuv: expected " + std::to_string(expected) +
                                  " rows, got " + std::to_string(kernel.rows.size()));
        }
        for (std::size_t r = 0; r < kernel.rows.size(); ++r) {
            double row_sum = 0.0;
            for (const auto& [iw, p] : kernel.rows[r]) {
                if (iw < 0 || iw >= n_w()) {
                    throw ValidationError("p_w_given_abuv: row " + std::to_string(r) +
                                          " indexes off-support");
                }
                if (!(p >= 0.0)) {
                    throw ValidationError("p_w_given_abuv: row " + std::to_string(r) +
                                          " has a negative entry");
                }
                row_sum += p;
            }
            if (std::abs(row_sum - 1.0) > kTol) {
                int iv = static_cast<int>(r) % n_v();
                int iu = static_cast<int>(r / static_cast<std::size_t>(n_v())) % n_u();
                int ib = static_cast<int>(r / static_cast<std::size_t>(n_v() * n_u())) % n_b();
                int ia = static_cast<int>(r / static_cast<std::size_t>(n_v() * n_u() * n_b()));
                std::ostringstream msg;
                msg << "p_w_given_abuv: row (a=" << ia << ", b=" << ib << ", u=" << iu
                    << ", v=" << iv << ") sums to " << row_sum << ", expected 1 within 1e-12";
                throw ValidationError(msg.str());
            }
        }
    }

    // Response tables.
    std::size_t x_size = static_cast<std::size_t>(n_a()) * static_cast<std::size_t>(n_u()) *
                         static_cast<std::size_t>(n_w());
    std::size_t y_size = static_cast<std::size_t>(n_b()) * static_cast<std::size_t>(n_v()) *
                         static_cast<std::size_t>(n_w());
    if (p_x.size() != x_size) {
        throw ValidationError("p_x_given_auw: expected " + std::to_string(x_size) +
                              " entries, got " + std::to_string(p_x.size()));
    }
    if (p_y.size() != y_size) {
        throw ValidationError("p_y_given_bvw: expected " + std::to_string(y_size) +
                              " entries, got " + std::to_string(p_y.size()));
    }
    check_unit_interval(p_x, "p_x_given_auw", n_a(), n_u(), n_w());
    check_unit_interval(p_y, "p_y_given_bvw", n_b(), n_v(), n_w());

    finalized_ = true;
}

std::span<const std::pair<int, double>> DiscreteModel::w_row(int ia, int ib, int iu,
                                                             int iv) const {
    if (has_delta_w()) {
        return {&delta_rows_[static_cast<std::size_t>(ia)], 1};
    }
    const SparseKernel& kernel = std::get<SparseKernel>(p_w);
    std::size_t r = static_cast<std::size_t>(((ia * n_b() + ib) * n_u() + iu) * n_v() + iv);
    return kernel.rows[r];
}

int DiscreteModel::find_index(const std::vector<std::pair<double, int>>& sorted, Angle x) const {
    if (sorted.empty()) {
        return -1;
    }
    auto it = std::lower_bound(sorted.begin(), sorted.end(),
                               std::make_pair(x.value(), -1));
    // Candidates: the insertion neighbors plus the seam pair.
    if (it != sorted.end() && circ_distance(Angle(it->first), x) <= kTol) {
        return it->second;
    }
    if (it != sorted.begin()) {
        auto prev = std::prev(it);
        if (circ_distance(Angle(prev->first), x) <= kTol) {
            return prev->second;
        }
    }
    if (circ_distance(Angle(sorted.front().first), x) <= kTol) {
        return sorted.front().second;
    }
    if (circ_distance(Angle(sorted.back().first), x) <= kTol) {
        return sorted.back().second;
    }
    return -1;
}

namespace {

[[noreturn]] void setting_error(const char* what, Angle value) {
    throw DomainError(std::string(what) + " " + std::to_string(value.value()) +
                      " is not in the model's list (1e-12 tolerance)");
}

}  // namespace

int DiscreteModel::index_a(Angle a) const {
    int i = find_index(sorted_a_, a);
    if (i < 0) setting_error("setting a =", a);
    return i;
}

int DiscreteModel::index_b(Angle b) const {
    int i = find_index(sorted_b_, b);
    if (i < 0) setting_error("setting b =", b);
    return i;
}

int DiscreteModel::index_u(Angle u) const {
    int i = find_index(sorted_u_, u);
    if (i < 0) setting_error("u value", u);
    return i;
}

int DiscreteModel::index_v(Angle v) const {
    int i = find_index(sorted_v_, v);
    if (i < 0) setting_error("v value", v);
    return i;
}

int DiscreteModel::index_w(Angle w) const {
    int i = find_index(sorted_w_, w);
    if (i < 0) setting_error("w value", w);
    return i;
}

std::pair<Angle, Angle> DiscreteModel::sample_local(PhiloxRng& rng) const {
    double x = rng.uniform();
    auto it = std::lower_bound(uv_cdf_.begin(), uv_cdf_.end(), x);
    std::size_t e = (it == uv_cdf_.end()) ? uv_cdf_.size() - 1
                                          : static_cast<std::size_t>(it - uv_cdf_.begin());
    const UvEntry& entry = p_uv[e];
    return {support_u[static_cast<std::size_t>(entry.iu)],
            support_v[static_cast<std::size_t>(entry.iv)]};
}

Angle DiscreteModel::sample_nonlocal(Angle a, Angle b, Angle u, Angle v, PhiloxRng& rng) const {
    if (has_delta_w()) {
        return a;
    }
    auto row = w_row(index_a(a), index_b(b), index_u(u), index_v(v));
    double x = rng.uniform();
    double acc = 0.0;
    for (const auto& [iw, p] : row) {
        acc += p;
        if (x < acc) {
            return support_w[static_cast<std::size_t>(iw)];
        }
    }
    return support_w[static_cast<std::size_t>(row.back().first)];
}

OutcomeDist DiscreteModel::response_x(Angle a, Angle u, Angle w) const {
    return OutcomeDist(px(index_a(a), index_u(u), index_w(w)));
}

OutcomeDist DiscreteModel::response_y(Angle b, Angle v, Angle w) const {
    return OutcomeDist(py(index_b(b), index_v(v), index_w(w)));
}

std::optional<std::vector<WeightedPair>> DiscreteModel::local_support() const {
    std::vector<WeightedPair> support;
    support.reserve(p_uv.size());
    for (const UvEntry& entry : p_uv) {
        support.push_back({support_u[static_cast<std::size_t>(entry.iu)],
                           support_v[static_cast<std::size_t>(entry.iv)], entry.p});
    }
    return support;
}

std::optional<std::vector<WeightedAngle>> DiscreteModel::nonlocal_support(Angle a, Angle b,
                                                                          Angle u,
                                                                          Angle v) const {
    if (has_delta_w()) {
        return std::vector<WeightedAngle>{{a, 1.0}};
    }
    auto row = w_row(index_a(a), index_b(b), index_u(u), index_v(v));
    std::vector<WeightedAngle> support;
    support.reserve(row.size());
    for (const auto& [iw, p] : row) {
        support.push_back({support_w[static_cast<std::size_t>(iw)], p});
    }
    return support;
}

std::optional<std::vector<WeightedAngle>> DiscreteModel::conditional_v_given_u(Angle u) const {
    int iu = index_u(u);
    double p_u = p_u_marginal_[static_cast<std::size_t>(iu)];
    if (!(p_u > 0.0)) {
        throw DomainError("conditional_v_given_u: u value has zero marginal probability");
    }
    std::vector<WeightedAngle> conditional;
    for (const UvEntry& entry : p_uv) {
        if (entry.iu == iu && entry.p > 0.0) {
            conditional.push_back({support_v[static_cast<std::size_t>(entry.iv)], entry.p / p_u});
        }
    }
    return conditional;
}

DiscreteModel build_local_deterministic(const LocalDeterministicParams& params) {
    int n_lambda = static_cast<int>(params.lambda_probs.size());
    int na = static_cast<int>(params.settings_a.size());
    int nb = static_cast<int>(params.settings_b.size());
    if (n_lambda == 0) {
        throw ValidationError("lambda_probs: must be non-empty");
    }
    auto check_signs = [&](const std::vector<std::vector<int>>& sign, int n_settings,
                           const char* name) {
        if (static_cast<int>(sign.size()) != n_settings) {
            throw ValidationError(std::string(name) + ": expected one row per setting");
        }
        for (const auto& row : sign) {
            if (static_cast<int>(row.size()) != n_lambda) {
                throw ValidationError(std::string(name) + ": row length != lambda support");
            }
            for (int s : row) {
                if (s != +1 && s != -1) {
                    throw ValidationError(std::string(name) + ": signs must be +1 or -1");
                }
            }
        }
    };
    check_signs(params.x_sign, na, "x_sign");
    check_signs(params.y_sign, nb, "y_sign");

    DiscreteModel model;
    model.settings_a = params.settings_a;
    model.settings_b = params.settings_b;
    model.support_u = synthetic_support(n_lambda);
    model.support_v = model.support_u;
    model.support_w = {Angle(0.0)};
    for (int l = 0; l < n_lambda; ++l) {
        model.p_uv.push_back({l, l, params.lambda_probs[static_cast<std::size_t>(l)]});
    }
    DiscreteModel::SparseKernel kernel;
    kernel.rows.assign(static_cast<std::size_t>(na * nb * n_lambda * n_lambda),
                       {{0, 1.0}});
    model.p_w = std::move(kernel);
    model.p_x.resize(static_cast<std::size_t>(na * n_lambda));
    model.p_y.resize(static_cast<std::size_t>(nb * n_lambda));
    for (int ia = 0; ia < na; ++ia) {
        for (int l = 0; l < n_lambda; ++l) {
            model.p_x[static_cast<std::size_t>(ia * n_lambda + l)] =
                params.x_sign[static_cast<std::size_t>(ia)][static_cast<std::size_t>(l)] == +1
                    ? 1.0
                    : 0.0;
        }
    }
    for (int ib = 0; ib < nb; ++ib) {
        for (int l = 0; l < n_lambda; ++l) {
            model.p_y[static_cast<std::size_t>(ib * n_lambda + l)] =
                params.y_sign[static_cast<std::size_t>(ib)][static_cast<std::size_t>(l)] == +1
                    ? 1.0
                    : 0.0;
        }
    }
    model.finalize();
    return model;
}

DiscreteModel random_local_deterministic(PhiloxRng& rng, int n_settings_per_side, int n_lambda) {
    LocalDeterministicParams params;
    params.settings_a = synthetic_support(n_settings_per_side);
    params.settings_b = synthetic_support(n_settings_per_side);
    params.lambda_probs.resize(static_cast<std::size_t>(n_lambda));
    double total = 0.0;
    for (double& p : params.lambda_probs) {
        p = 0.05 + rng.uniform();
        total += p;
    }
    for (double& p : params.lambda_probs) {
        p /= total;
    }
    auto random_signs = [&](int n_settings) {
        std::vector<std::vector<int>> sign(static_cast<std::size_t>(n_settings));
        for (auto& row : sign) {
            row.resize(static_cast<std::size_t>(n_lambda));
            for (int& s : row) {
                s = (rng.next_u64() & 1u) ? +1 : -1;
            }
        }
        return sign;
    };
    params.x_sign = random_signs(n_settings_per_side);
    params.y_sign = random_signs(n_settings_per_side);
    return build_local_deterministic(params);
}

namespace {

std::vector<Angle> grid_points(int n_grid) {
    std::vector<Angle> grid;
    grid.reserve(static_cast<std::size_t>(n_grid));
    for (int k = 0; k < n_grid; ++k) {
        grid.emplace_back(kTwoPi * static_cast<double>(k) / static_cast<double>(n_grid));
    }
    return grid;
}

std::vector<Angle> snap_to_grid(const std::vector<Angle>& settings,
                                const std::vector<Angle>& grid) {
    std::vector<Angle> snapped;
    snapped.reserve(settings.size());
    for (Angle s : settings) {
        int found = -1;
        for (int k = 0; k < static_cast<int>(grid.size()); ++k) {
            if (circ_distance(grid[static_cast<std::size_t>(k)], s) <= kTol) {
                found = k;
                break;
            }
        }
        if (found < 0) {
            throw DomainError("discretize_paper_model: setting " + std::to_string(s.value()) +
                              " is not a grid point");
        }
        snapped.push_back(grid[static_cast<std::size_t>(found)]);
    }
    return snapped;
}

}  // namespace

DiscreteModel discretize_paper_model(int n_grid) {
    std::vector<Angle> grid = grid_points(std::max(n_grid, 1));
    std::vector<Angle> settings;
    if (n_grid % 8 == 0) {
        for (int j = 0; j < 8; ++j) {
            settings.push_back(grid[static_cast<std::size_t>(j * (n_grid / 8))]);
        }
    } else {
        settings = grid;
    }
    return discretize_paper_model(n_grid, settings, settings);
}

DiscreteModel discretize_paper_model(int n_grid, const std::vector<Angle>& settings_a,
                                     const std::vector<Angle>& settings_b) {
    if (n_grid < 2) {
        throw DomainError("discretize_paper_model: n_grid must be >= 2");
    }
    std::vector<Angle> grid = grid_points(n_grid);

    DiscreteModel model;
    model.settings_a = snap_to_grid(settings_a, grid);
    model.settings_b = snap_to_grid(settings_b, grid);
    model.support_u = grid;
    model.support_v = grid;
    model.support_w = model.settings_a;
    model.p_w = DiscreteModel::DeltaAtA{};

    double mass = 1.0 / static_cast<double>(n_grid);
    model.p_uv.reserve(static_cast<std::size_t>(n_grid));
    for (int k = 0; k < n_grid; ++k) {
        model.p_uv.push_back({k, k, mass});
    }

    int na = model.n_a();
    int nb = model.n_b();
    int nw = model.n_w();
    model.p_x.resize(static_cast<std::size_t>(na * n_grid * nw));
    model.p_y.resize(static_cast<std::size_t>(nb * n_grid * nw));
    for (int ia = 0; ia < na; ++ia) {
        for (int k = 0; k < n_grid; ++k) {
            double p = paper_response_x(model.settings_a[static_cast<std::size_t>(ia)],
                                        grid[static_cast<std::size_t>(k)])
                           .p_plus();
            for (int iw = 0; iw < nw; ++iw) {
                model.p_x[static_cast<std::size_t>((ia * n_grid + k) * nw + iw)] = p;
            }
        }
    }
    for (int ib = 0; ib < nb; ++ib) {
        for (int k = 0; k < n_grid; ++k) {
            for (int iw = 0; iw < nw; ++iw) {
                model.p_y[static_cast<std::size_t>((ib * n_grid + k) * nw + iw)] =
                    paper_response_y(model.settings_b[static_cast<std::size_t>(ib)],
                                     grid[static_cast<std::size_t>(k)],
                                     model.support_w[static_cast<std::size_t>(iw)])
                        .p_plus();
            }
        }
    }
    model.finalize();
    return model;
}

DiscreteModel random_cr_compliant_model(PhiloxRng& rng, const CrCompliantGenOptions& opts) {
    DiscreteModel model;
    model.settings_a = synthetic_support(opts.n_a);
    model.settings_b = synthetic_support(opts.n_b);
    model.support_u = synthetic_support(opts.n_u);
    model.support_v = synthetic_support(opts.n_v);
    model.support_w = synthetic_support(opts.n_w);

    double total = 0.0;
    for (int iu = 0; iu < opts.n_u; ++iu) {
        for (int iv = 0; iv < opts.n_v; ++iv) {
            double p = 0.05 + rng.uniform();
            model.p_uv.push_back({iu, iv, p});
            total += p;
        }
    }
    for (auto& entry : model.p_uv) {
        entry.p /= total;
    }

    // All kernel rows put their mass on the first support point: the
    // nonlocal component is inert, so conditioning on (u, v) alone already
    // leaves no remote-setting dependence.
    DiscreteModel::SparseKernel kernel;
    kernel.rows.assign(static_cast<std::size_t>(opts.n_a * opts.n_b * opts.n_u * opts.n_v),
                       {{0, 1.0}});
    model.p_w = std::move(kernel);

    model.p_x.resize(static_cast<std::size_t>(opts.n_a * opts.n_u * opts.n_w));
    for (double& p : model.p_x) {
        p = rng.uniform();
    }
    model.p_y.resize(static_cast<std::size_t>(opts.n_b * opts.n_v * opts.n_w));
    for (double& p : model.p_y) {
        p = rng.uniform();
    }
    model.finalize();
    return model;
}

void inject_w_signaling(DiscreteModel& model) {
    if (model.has_delta_w()) {
        throw DomainError("inject_w_signaling: model already has a delta-at-a kernel");
    }
    if (model.n_w() < model.n_a()) {
        throw DomainError("inject_w_signaling: needs n_w >= n_a");
    }
    auto& kernel = std::get<DiscreteModel::SparseKernel>(model.p_w);
    for (int ia = 0; ia < model.n_a(); ++ia) {
        for (int ib = 0; ib < model.n_b(); ++ib) {
            for (int iu = 0; iu < model.n_u(); ++iu) {
                for (int iv = 0; iv < model.n_v(); ++iv) {
                    std::size_t r = static_cast<std::size_t>(
                        ((ia * model.n_b() + ib) * model.n_u() + iu) * model.n_v() + iv);
                    kernel.rows[r] = {{ia, 1.0}};
                }
            }
        }
    }
    model.finalize();
}

DiscreteModel build_signaling_toy() {
    DiscreteModel model;
    model.settings_a = {Angle(0.0), Angle(kTwoPi / 4.0)};
    model.settings_b = {Angle(0.0), Angle(kTwoPi / 4.0)};
    model.support_u = {Angle(0.0)};
    model.support_v = {Angle(0.0)};
    model.support_w = model.settings_a;
    model.p_w = DiscreteModel::DeltaAtA{};
    model.p_uv = {{0, 0, 1.0}};
    // X is a fair coin; Y copies the nonlocal component (= Alice's setting)
    // straight into the outcome.
    model.p_x = {0.5, 0.5, 0.5, 0.5};
    model.p_y = {1.0, 0.0, 1.0, 0.0};
    model.finalize();
    return model;
}

DiscreteModel absorb_into_nonlocal(const DiscreteModel& model, HvComponent component) {
    int nw = model.n_w();
    bool fold_v = component == HvComponent::V;
    int n_fold = fold_v ? model.n_v() : model.n_u();
    int n_keep = fold_v ? model.n_u() : model.n_v();
    int n_merged = n_fold * nw;

    // Per kept-index conditionals of the folded component.
    std::vector<double> keep_marginal(static_cast<std::size_t>(n_keep), 0.0);
    std::vector<std::vector<std::pair<int, double>>> fold_given_keep(
        static_cast<std::size_t>(n_keep));
    for (const auto& entry : model.p_uv) {
        int keep = fold_v ? entry.iu : entry.iv;
        int fold = fold_v ? entry.iv : entry.iu;
        keep_marginal[static_cast<std::size_t>(keep)] += entry.p;
        if (entry.p > 0.0) {
            fold_given_keep[static_cast<std::size_t>(keep)].emplace_back(fold, entry.p);
        }
    }
    for (int k = 0; k < n_keep; ++k) {
        for (auto& [fold, p] : fold_given_keep[static_cast<std::size_t>(k)]) {
            p /= keep_marginal[static_cast<std::size_t>(k)];
        }
    }

    DiscreteModel merged;
    merged.settings_a = model.settings_a;
    merged.settings_b = model.settings_b;
    merged.support_w = synthetic_support(n_merged);
    if (fold_v) {
        merged.support_u = model.support_u;
        merged.support_v = {Angle(0.0)};
        for (int k = 0; k < n_keep; ++k) {
            if (keep_marginal[static_cast<std::size_t>(k)] > 0.0) {
                merged.p_uv.push_back({k, 0, keep_marginal[static_cast<std::size_t>(k)]});
            }
        }
    } else {
        merged.support_u = {Angle(0.0)};
        merged.support_v = model.support_v;
        for (int k = 0; k < n_keep; ++k) {
            if (keep_marginal[static_cast<std::size_t>(k)] > 0.0) {
                merged.p_uv.push_back({0, k, keep_marginal[static_cast<std::size_t>(k)]});
            }
        }
    }

    // Merged kernel rows: p(fold | keep) * p(w | a, b, u, v).
    int n_mu = merged.n_u();
    int n_mv = merged.n_v();
    DiscreteModel::SparseKernel kernel;
    kernel.rows.resize(static_cast<std::size_t>(model.n_a() * model.n_b() * n_mu * n_mv));
    for (int ia = 0; ia < model.n_a(); ++ia) {
        for (int ib = 0; ib < model.n_b(); ++ib) {
            for (int k = 0; k < n_keep; ++k) {
                int imu = fold_v ? k : 0;
                int imv = fold_v ? 0 : k;
                auto& row =
                    kernel.rows[static_cast<std::size_t>(((ia * model.n_b() + ib) * n_mu + imu) *
                                                             n_mv +
                                                         imv)];
                if (keep_marginal[static_cast<std::size_t>(k)] <= 0.0) {
                    row = {{0, 1.0}};  // unreachable; any valid row
                    continue;
                }
                for (const auto& [fold, p_fold] : fold_given_keep[static_cast<std::size_t>(k)]) {
                    int iu = fold_v ? k : fold;
                    int iv = fold_v ? fold : k;
                    for (const auto& [iw, p_w_val] : model.w_row(ia, ib, iu, iv)) {
                        if (p_fold * p_w_val > 0.0) {
                            row.emplace_back(fold * nw + iw, p_fold * p_w_val);
                        }
                    }
                }
            }
        }
    }
    merged.p_w = std::move(kernel);

    // Responses re-indexed over the merged support.
    merged.p_x.resize(static_cast<std::size_t>(model.n_a() * n_mu * n_merged));
    merged.p_y.resize(static_cast<std::size_t>(model.n_b() * n_mv * n_merged));
    for (int ia = 0; ia < model.n_a(); ++ia) {
        for (int imu = 0; imu < n_mu; ++imu) {
            for (int m = 0; m < n_merged; ++m) {
                int fold = m / nw;
                int iw = m % nw;
                int iu = fold_v ? imu : fold;
                merged.p_x[static_cast<std::size_t>((ia * n_mu + imu) * n_merged + m)] =
                    model.px(ia, iu, iw);
            }
        }
    }
    for (int ib = 0; ib < model.n_b(); ++ib) {
        for (int imv = 0; imv < n_mv; ++imv) {
            for (int m = 0; m < n_merged; ++m) {
                int fold = m / nw;
                int iw = m % nw;
                int iv = fold_v ? fold : imv;
                merged.p_y[static_cast<std::size_t>((ib * n_mv + imv) * n_merged + m)] =
                    model.py(ib, iv, iw);
            }
        }
    }
    merged.finalize();
    return merged;
}

}  // namespace hvlab
