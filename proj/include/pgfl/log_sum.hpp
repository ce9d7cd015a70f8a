#pragma once

#include <cmath>
#include <limits>

namespace pgfl {

/// Streaming log(sum_i exp(l_i)) with a running maximum.
class LogSumExp {
public:
    void add_log(double l) {
        if (l == -std::numeric_limits<double>::infinity()) return;
        if (l <= max_) {
            scaled_ += std::exp(l - max_);
        } else {
            scaled_ = scaled_ * std::exp(max_ - l) + 1.0;
            max_ = l;
        }
    }
    /// Adds a nonnegative value; zero is the log-domain identity.
    void add(double v) {
        if (v > 0.0) add_log(std::log(v));
    }
    [[nodiscard]] double log() const {
        if (scaled_ == 0.0) return -std::numeric_limits<double>::infinity();
        return max_ + std::log(scaled_);
    }

private:
    double max_ = -std::numeric_limits<double>::infinity();
    double scaled_ = 0.0;
};

}  // namespace pgfl
