#include "pnsim/signal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pnsim {

namespace {

double domain_slack(double end) { return 1e-9 * std::max(1.0, std::abs(end)); }

}  // namespace

PiecewiseConstantSignal::PiecewiseConstantSignal(std::vector<double> breakpoints,
                                                 std::vector<double> values, double end)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)), end_(end) {}

PiecewiseConstantSignal PiecewiseConstantSignal::constant(double value, double end) {
    return {{0.0}, {value}, end};
}

double PiecewiseConstantSignal::operator()(double t) const {
    const double slack = domain_slack(end_);
    if (!(t >= -slack && t <= end_ + slack)) {
        std::ostringstream os;
        os << "signal evaluated at t = " << t << " outside [0, " << end_ << "]";
        throw std::domain_error(os.str());
    }
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    if (it == breakpoints_.begin()) return values_.front();
    return values_[static_cast<std::size_t>(std::distance(breakpoints_.begin(), it)) - 1];
}

double PiecewiseConstantSignal::integral(double t0, double t1) const {
    t0 = std::max(t0, 0.0);
    t1 = std::min(t1, end_);
    if (t1 <= t0) return 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < values_.size(); ++k) {
        const double lo = std::max(breakpoints_[k], t0);
        const double hi = std::min(k + 1 < breakpoints_.size() ? breakpoints_[k + 1] : end_, t1);
        if (hi > lo) total += values_[k] * (hi - lo);
    }
    return total;
}

double PiecewiseConstantSignal::max_value() const {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

std::vector<std::string> PiecewiseConstantSignal::problems() const {
    std::vector<std::string> out;
    if (breakpoints_.empty() || breakpoints_.size() != values_.size()) {
        out.emplace_back("breakpoints and values must be non-empty and of equal length");
        return out;
    }
    if (breakpoints_.front() != 0.0) out.emplace_back("first breakpoint must be 0");
    for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
        if (!(breakpoints_[k] > breakpoints_[k - 1])) {
            out.emplace_back("breakpoints must be strictly increasing");
            break;
        }
    }
    if (breakpoints_.back() > end_) out.emplace_back("breakpoint beyond the horizon");
    for (double v : values_) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            out.emplace_back("signal values must be finite and nonnegative");
            break;
        }
    }
    return out;
}

}  // namespace pnsim
