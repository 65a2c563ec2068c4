#include "hvlab/engine.hpp"

#include <cmath>
#include <thread>

#include "hvlab/discrete_model.hpp"
#include "hvlab/errors.hpp"
#include "hvlab/model_io.hpp"
#include "hvlab/paper_model.hpp"
#include "hvlab/rng.hpp"

namespace hvlab::engine {

std::unique_ptr<HvModel> resolve_model(const std::string& selector) {
    if (selector == "paper") {
        return std::make_unique<PaperModel>();
    }
    return std::make_unique<DiscreteModel>(load_model(selector));
}

namespace {

JointTable exact_joint_discrete(const DiscreteModel& model, Angle a, Angle b) {
    int ia = model.index_a(a);
    int ib = model.index_b(b);
    std::array<double, 4> cells{};
    for (const auto& entry : model.p_uv) {
        if (entry.p <= 0.0) {
            continue;
        }
        for (const auto& [iw, pw] : model.w_row(ia, ib, entry.iu, entry.iv)) {
            double weight = entry.p * pw;
            if (weight <= 0.0) {
                continue;
            }
            double px_plus = model.px(ia, entry.iu, iw);
            double py_plus = model.py(ib, entry.iv, iw);
            cells[0] += weight * px_plus * py_plus;
            cells[1] += weight * px_plus * (1.0 - py_plus);
            cells[2] += weight * (1.0 - px_plus) * py_plus;
            cells[3] += weight * (1.0 - px_plus) * (1.0 - py_plus);
        }
    }
    return JointTable(cells[0], cells[1], cells[2], cells[3]);
}

}  // namespace

JointTable exact_joint(const HvModel& model, Angle a, Angle b) {
    if (auto closed = model.closed_form_joint(a, b)) {
        return *closed;
    }
    if (const auto* discrete = dynamic_cast<const DiscreteModel*>(&model)) {
        return exact_joint_discrete(*discrete, a, b);
    }
    throw UnsupportedModelError("exact_joint: model exposes no exact evaluation route");
}

namespace {

std::array<std::uint64_t, 4> run_chunk(const HvModel& model, Angle a, Angle b,
                                       std::uint64_t seed, std::uint64_t chunk,
                                       std::uint64_t n_trials) {
    PhiloxRng rng(seed, chunk);
    std::array<std::uint64_t, 4> counts{};
    for (std::uint64_t t = 0; t < n_trials; ++t) {
        auto [u, v] = model.sample_local(rng);
        Angle w = model.sample_nonlocal(a, b, u, v, rng);
        bool x_plus = rng.bernoulli(model.response_x(a, u, w).p_plus());
        bool y_plus = rng.bernoulli(model.response_y(b, v, w).p_plus());
        ++counts[static_cast<std::size_t>(JointTable::index(x_plus ? +1 : -1, y_plus ? +1 : -1))];
    }
    return counts;
}

}  // namespace

JointEstimate mc_estimate_joint(const HvModel& model, Angle a, Angle b, const McOptions& opts) {
    if (opts.n_samples < 1) {
        throw DomainError("mc_estimate_joint: n_samples must be >= 1");
    }
    std::uint64_t n_chunks = (opts.n_samples + kChunkSize - 1) / kChunkSize;
    int n_workers = opts.n_workers > 0
                        ? opts.n_workers
                        : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    n_workers = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(n_workers), n_chunks));

    auto chunk_trials = [&](std::uint64_t chunk) {
        std::uint64_t begin = chunk * kChunkSize;
        return std::min(kChunkSize, opts.n_samples - begin);
    };

    std::vector<std::array<std::uint64_t, 4>> partial(
        static_cast<std::size_t>(n_workers), std::array<std::uint64_t, 4>{});
    if (n_workers <= 1) {
        for (std::uint64_t chunk = 0; chunk < n_chunks; ++chunk) {
            auto counts = run_chunk(model, a, b, opts.seed, chunk, chunk_trials(chunk));
            for (std::size_t c = 0; c < 4; ++c) {
                partial[0][c] += counts[c];
            }
        }
    } else {
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(n_workers));
        for (int worker = 0; worker < n_workers; ++worker) {
            workers.emplace_back([&, worker] {
                auto& acc = partial[static_cast<std::size_t>(worker)];
                for (std::uint64_t chunk = static_cast<std::uint64_t>(worker); chunk < n_chunks;
                     chunk += static_cast<std::uint64_t>(n_workers)) {
                    auto counts = run_chunk(model, a, b, opts.seed, chunk, chunk_trials(chunk));
                    for (std::size_t c = 0; c < 4; ++c) {
                        acc[c] += counts[c];
                    }
                }
            });
        }
        for (auto& worker : workers) {
            worker.join();
        }
    }

    std::array<std::uint64_t, 4> counts{};
    for (const auto& acc : partial) {
        for (std::size_t c = 0; c < 4; ++c) {
            counts[c] += acc[c];
        }
    }

    JointEstimate estimate;
    double n = static_cast<double>(opts.n_samples);
    std::array<double, 4> cells{};
    for (std::size_t c = 0; c < 4; ++c) {
        cells[c] = static_cast<double>(counts[c]) / n;
    }
    estimate.table = JointTable(cells[0], cells[1], cells[2], cells[3]);
    estimate.n_samples = opts.n_samples;
    for (std::size_t c = 0; c < 4; ++c) {
        double p = cells[c];
        double var = (p <= 0.0 || p >= 1.0) ? 0.25 : p * (1.0 - p);
        estimate.std_err[c] = std::sqrt(var / n);
    }
    return estimate;
}

JointEstimate mc_estimate_joint(const RunSpec& spec) {
    auto model = resolve_model(spec.model);
    return mc_estimate_joint(*model, spec.a, spec.b,
                             McOptions{spec.n_samples, spec.seed, spec.n_workers});
}

std::vector<std::vector<JointTable>> sweep_joint(const HvModel& model,
                                                 const std::vector<Angle>& a_list,
                                                 const std::vector<Angle>& b_list,
                                                 Backend backend, const McOptions& opts) {
    if (a_list.empty() || b_list.empty()) {
        throw DomainError("sweep_joint: setting lists must be non-empty");
    }
    std::vector<std::vector<JointTable>> result(a_list.size());
    for (std::size_t i = 0; i < a_list.size(); ++i) {
        result[i].reserve(b_list.size());
        for (Angle b : b_list) {
            if (backend == Backend::Exact) {
                result[i].push_back(exact_joint(model, a_list[i], b));
            } else {
                result[i].push_back(mc_estimate_joint(model, a_list[i], b, opts).table);
            }
        }
    }
    return result;
}

}  // namespace hvlab::engine
