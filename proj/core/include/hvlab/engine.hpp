#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hvlab/model.hpp"
#include "hvlab/prob.hpp"

namespace hvlab::engine {

// Trials per RNG stream. Streams are keyed by (seed, chunk index), so the
// estimate is a pure function of (model, a, b, n_samples, seed) no matter
// how chunks are spread over workers.
inline constexpr std::uint64_t kChunkSize = 65536;

struct JointEstimate {
    JointTable table;
    std::uint64_t n_samples = 0;
    // Per-cell binomial standard error sqrt(p(1-p)/n); at p in {0, 1} the
    // conservative bound sqrt(0.25/n) is reported instead.
    std::array<double, 4> std_err{};
};

struct McOptions {
    std::uint64_t n_samples = 1'000'000;
    std::uint64_t seed = 1;
    int n_workers = 0;  // 0 = available hardware parallelism
};

// A fully resolved Monte Carlo run request, as issued by the CLI.
struct RunSpec {
    std::string model;  // builtin name ("paper") or model file path
    Angle a;
    Angle b;
    std::uint64_t n_samples = 1'000'000;
    std::uint64_t seed = 1;
    int n_workers = 0;
};

// Resolve a model selector: "paper" or a path to a model file.
std::unique_ptr<HvModel> resolve_model(const std::string& selector);

// Exact joint outcome table: closed form when the model provides one,
// exhaustive summation over enumerable supports otherwise.
JointTable exact_joint(const HvModel& model, Angle a, Angle b);

JointEstimate mc_estimate_joint(const HvModel& model, Angle a, Angle b, const McOptions& opts);
JointEstimate mc_estimate_joint(const RunSpec& spec);

enum class Backend { Exact, Mc };

// Grid evaluation; element (i, j) equals the single-pair evaluation for
// (a_list[i], b_list[j]) exactly. MC cells reuse the options (same seed per
// cell).
std::vector<std::vector<JointTable>> sweep_joint(const HvModel& model,
                                                 const std::vector<Angle>& a_list,
                                                 const std::vector<Angle>& b_list,
                                                 Backend backend, const McOptions& opts = {});

}  // namespace hvlab::engine
