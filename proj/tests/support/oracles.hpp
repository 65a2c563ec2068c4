#pragma once

#include <cstdint>
#include <vector>

#include "hvlab/prob.hpp"

// Independent oracles for test expectations: plain-arithmetic re-derivations
// that deliberately avoid the library's evaluation paths.
namespace hvlab::oracles {

// chi2.isf(1e-4, 63): critical value for the 64-bin uniformity tests.
inline constexpr double kChi2Crit64Bins = 113.50499285105357;

// kstwobign.isf(1e-4): critical scaled KS statistic for two-sample tests.
inline constexpr double kKsCrit = 2.2252513961950457;

// Midpoint-rule integration of the builtin model's trial pipeline over the
// shared uniform angle (u = v, w = a), using raw fmod arithmetic.
JointTable quadrature_paper_joint(double a, double b, int n_points);

// Membership of x in the half-open arc [start, start+length), decided by
// dense sampling of the arc; only valid away from the boundary.
bool arc_contains_sampled(double start, double length, double x, int n_points = 1'000'000);

// Pearson chi-squared statistic of `samples` against the uniform law on
// [0, 2pi), using `bins` equal bins.
double chi2_uniform_angles(const std::vector<double>& samples, int bins);

// Scaled two-sample Kolmogorov-Smirnov statistic sqrt(nm/(n+m)) * D.
double ks_two_sample_scaled(std::vector<double> xs, std::vector<double> ys);

// |hits/n - p| <= k_sigma * sqrt(p(1-p)/n).
bool binomial_within_sigma(std::uint64_t hits, std::uint64_t n, double p, double k_sigma);

}  // namespace hvlab::oracles
