#pragma once

#include <string>
#include <vector>

namespace pnsim {

/// Piecewise-constant, right-continuous signal on [0, end].
///
/// breakpoints[k] starts the interval [breakpoints[k], breakpoints[k+1]) that
/// carries values[k]; the first breakpoint is 0 and the last interval extends
/// to `end` inclusive.
class PiecewiseConstantSignal {
public:
    PiecewiseConstantSignal() = default;
    PiecewiseConstantSignal(std::vector<double> breakpoints, std::vector<double> values, double end);

    static PiecewiseConstantSignal constant(double value, double end);

    /// Throws std::domain_error for t outside [0, end].
    [[nodiscard]] double operator()(double t) const;

    /// Exact integral over [t0, t1] (clipped to [0, end]).
    [[nodiscard]] double integral(double t0, double t1) const;

    [[nodiscard]] double max_value() const;

    [[nodiscard]] const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] double end() const noexcept { return end_; }

    /// Structural problems (ordering, sign, length mismatch); empty when well-formed.
    [[nodiscard]] std::vector<std::string> problems() const;

private:
    std::vector<double> breakpoints_{0.0};
    std::vector<double> values_{0.0};
    double end_ = 0.0;
};

}  // namespace pnsim
