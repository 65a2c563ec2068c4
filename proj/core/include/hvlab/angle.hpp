#pragma once

#include <cmath>
#include <numbers>

#include "hvlab/errors.hpp"

namespace hvlab {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Shared tolerance for exact (closed-form) probability comparisons.
inline constexpr double kTol = 1e-12;

// Reduce x to [0, 2pi). The value congruent to x mod 2pi.
inline double wrap_radians(double x) {
    if (!std::isfinite(x)) {
        throw DomainError("wrap_angle: input must be finite");
    }
    double r = std::fmod(x, kTwoPi);
    if (r < 0.0) {
        r += kTwoPi;
    }
    // Adding 2pi to a tiny negative remainder can round up to exactly 2pi.
    if (r >= kTwoPi) {
        r = 0.0;
    }
    return r;
}

// A point on the circle, normalized to [0, 2pi) on construction and after
// any arithmetic. Immutable value type.
class Angle {
  public:
    constexpr Angle() = default;
    explicit Angle(double radians) : value_(wrap_radians(radians)) {}

    double value() const { return value_; }

    Angle shifted(double radians) const { return Angle(value_ + radians); }

    friend bool operator==(Angle lhs, Angle rhs) { return lhs.value_ == rhs.value_; }

  private:
    double value_ = 0.0;
};

inline Angle wrap_angle(double radians) { return Angle(radians); }

// Forward arc distance from `from` to `to`, in [0, 2pi).
inline double circ_delta(Angle from, Angle to) {
    double d = to.value() - from.value();
    if (d < 0.0) {
        d += kTwoPi;
    }
    if (d >= kTwoPi) {
        d = 0.0;
    }
    return d;
}

// Shortest circular distance between two angles, in [0, pi].
inline double circ_distance(Angle a, Angle b) {
    double d = circ_delta(a, b);
    return std::min(d, kTwoPi - d);
}

// Half-open arc [start, start + length) on the circle. length in [0, 2pi]:
// zero-length arcs contain nothing, length-2pi arcs contain everything.
class CircularInterval {
  public:
    CircularInterval(Angle start, double length) : start_(start), length_(length) {
        if (!(length >= 0.0 && length <= kTwoPi)) {
            throw DomainError("CircularInterval: length must be in [0, 2pi]");
        }
    }

    Angle start() const { return start_; }
    double length() const { return length_; }

    bool contains(Angle x) const { return circ_delta(start_, x) < length_; }

    // Uniform measure of the arc.
    double measure() const { return length_ / kTwoPi; }

  private:
    Angle start_;
    double length_;
};

inline bool circ_contains(const CircularInterval& iv, Angle x) { return iv.contains(x); }

}  // namespace hvlab
