#pragma once

#include <cstddef>
#include <vector>

namespace rfc {

/// Uniform time grid t_k = k * T / n on [0, T].
class TimeGrid {
public:
    TimeGrid(double horizon, std::size_t n_steps);

    double horizon() const noexcept { return horizon_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    double dt() const noexcept { return dt_; }

    /// t_k; t_{n_steps} is exactly the horizon.
    double time(std::size_t k) const;

    /// Index of the grid point equal to t (within a relative 1e-9 of dt).
    /// Throws std::invalid_argument when t is not a grid point.
    std::size_t index_of(double t) const;

    std::vector<double> times() const;

    bool operator==(const TimeGrid& other) const noexcept {
        return horizon_ == other.horizon_ && n_steps_ == other.n_steps_;
    }

private:
    double horizon_;
    std::size_t n_steps_;
    double dt_;
};

/// Throws std::invalid_argument("grid mismatch: <what>") unless a == b.
void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* what);

}  // namespace rfc
