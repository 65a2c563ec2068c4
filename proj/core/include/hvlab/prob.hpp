#pragma once

#include <array>
#include <cmath>
#include <string>

#include "hvlab/angle.hpp"
#include "hvlab/errors.hpp"

namespace hvlab {

// Distribution of a single +1/-1 outcome.
class OutcomeDist {
  public:
    explicit OutcomeDist(double p_plus) : p_plus_(p_plus) {
        if (!(p_plus >= 0.0 && p_plus <= 1.0)) {
            throw DomainError("OutcomeDist: p_plus must be in [0, 1], got " +
                              std::to_string(p_plus));
        }
    }

    double p_plus() const { return p_plus_; }
    double p_minus() const { return 1.0 - p_plus_; }
    double p(int outcome) const { return outcome == +1 ? p_plus() : p_minus(); }

  private:
    double p_plus_;
};

// 2x2 joint distribution over outcome pairs (x, y) in {+1, -1}^2.
class JointTable {
  public:
    JointTable() : p_{0.0, 0.0, 0.0, 0.0} {}

    JointTable(double p_pp, double p_pm, double p_mp, double p_mm)
        : p_{p_pp, p_pm, p_mp, p_mm} {
        validate();
    }

    static int index(int x, int y) { return (x == +1 ? 0 : 2) + (y == +1 ? 0 : 1); }

    double p(int x, int y) const { return p_[static_cast<std::size_t>(index(x, y))]; }
    const std::array<double, 4>& cells() const { return p_; }

    double marginal_x(int x) const { return p(x, +1) + p(x, -1); }
    double marginal_y(int y) const { return p(+1, y) + p(-1, y); }

    // E[XY] over the four cells.
    double correlator() const { return p(+1, +1) + p(-1, -1) - p(+1, -1) - p(-1, +1); }

    void validate() const {
        double sum = 0.0;
        for (double cell : p_) {
            if (!(cell >= 0.0)) {
                throw ValidationError("JointTable: negative cell " + std::to_string(cell));
            }
            sum += cell;
        }
        if (std::abs(sum - 1.0) > kTol) {
            throw ValidationError("JointTable: cells sum to " + std::to_string(sum) +
                                  ", expected 1 within 1e-12");
        }
    }

  private:
    std::array<double, 4> p_;
};

}  // namespace hvlab
