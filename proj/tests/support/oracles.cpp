#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hvlab::oracles {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTau = 2.0 * std::numbers::pi;

double mod_tau(double x) {
    double r = std::fmod(x, kTau);
    return r < 0.0 ? r + kTau : r;
}

bool in_arc(double x, double start, double length) {
    double d = mod_tau(x - start);
    return d < length;
}

}  // namespace

JointTable quadrature_paper_joint(double a, double b, int n_points) {
    // u_k at cell midpoints so arc boundaries never coincide with nodes.
    double shift = kPi * std::pow(std::sin((b - a) / 2.0), 2);
    std::array<std::int64_t, 4> counts{};
    for (int k = 0; k < n_points; ++k) {
        double u = kTau * (static_cast<double>(k) + 0.5) / static_cast<double>(n_points);
        bool x_plus = in_arc(u, a, kPi);
        bool y_minus = in_arc(u, a + shift, kPi);  // v = u, w = a
        int cell = (x_plus ? 0 : 2) + (y_minus ? 1 : 0);
        ++counts[static_cast<std::size_t>(cell)];
    }
    double n = static_cast<double>(n_points);
    return JointTable(static_cast<double>(counts[0]) / n, static_cast<double>(counts[1]) / n,
                      static_cast<double>(counts[2]) / n, static_cast<double>(counts[3]) / n);
}

bool arc_contains_sampled(double start, double length, double x, int n_points) {
    if (length <= 0.0) {
        return false;
    }
    double best = kTau;
    for (int k = 0; k < n_points; ++k) {
        double point =
            mod_tau(start + length * (static_cast<double>(k) + 0.5) / static_cast<double>(n_points));
        double d = std::fabs(mod_tau(point - x));
        d = std::min(d, kTau - d);
        best = std::min(best, d);
    }
    return best <= length / static_cast<double>(n_points);
}

double chi2_uniform_angles(const std::vector<double>& samples, int bins) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
    for (double s : samples) {
        int bin = static_cast<int>(mod_tau(s) / kTau * static_cast<double>(bins));
        bin = std::clamp(bin, 0, bins - 1);
        ++counts[static_cast<std::size_t>(bin)];
    }
    double expected = static_cast<double>(samples.size()) / static_cast<double>(bins);
    double chi2 = 0.0;
    for (std::int64_t c : counts) {
        double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    return chi2;
}

double ks_two_sample_scaled(std::vector<double> xs, std::vector<double> ys) {
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    double n = static_cast<double>(xs.size());
    double m = static_cast<double>(ys.size());
    double d_max = 0.0;
    std::size_t i = 0, j = 0;
    while (i < xs.size() && j < ys.size()) {
        if (xs[i] <= ys[j]) {
            ++i;
        } else {
            ++j;
        }
        double d = std::fabs(static_cast<double>(i) / n - static_cast<double>(j) / m);
        d_max = std::max(d_max, d);
    }
    return std::sqrt(n * m / (n + m)) * d_max;
}

bool binomial_within_sigma(std::uint64_t hits, std::uint64_t n, double p, double k_sigma) {
    double n_d = static_cast<double>(n);
    double sigma = std::sqrt(p * (1.0 - p) / n_d);
    return std::fabs(static_cast<double>(hits) / n_d - p) <= k_sigma * sigma;
}

}  // namespace hvlab::oracles
