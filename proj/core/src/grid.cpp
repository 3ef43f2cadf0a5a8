#include "rfc/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rfc {

TimeGrid::TimeGrid(double horizon, std::size_t n_steps)
    : horizon_(horizon), n_steps_(n_steps), dt_(0.0)
{
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("TimeGrid: horizon must be finite and > 0");
    if (n_steps == 0)
        throw std::invalid_argument("TimeGrid: n_steps must be positive");
    dt_ = horizon_ / static_cast<double>(n_steps_);
}

double TimeGrid::time(std::size_t k) const
{
    if (k > n_steps_)
        throw std::out_of_range("TimeGrid::time: index past horizon");
    // k / n is exactly 1 at k == n, so t_n == T.
    return horizon_ * (static_cast<double>(k) / static_cast<double>(n_steps_));
}

std::size_t TimeGrid::index_of(double t) const
{
    const double pos = t / dt_;
    const double k = std::round(pos);
    if (k < 0.0 || k > static_cast<double>(n_steps_) || std::abs(pos - k) > 1e-9)
        throw std::invalid_argument("grid mismatch: t = " + std::to_string(t) +
                                    " is not a grid time");
    return static_cast<std::size_t>(k);
}

std::vector<double> TimeGrid::times() const
{
    std::vector<double> out(n_steps_ + 1);
    for (std::size_t k = 0; k <= n_steps_; ++k)
        out[k] = time(k);
    return out;
}

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* what)
{
    if (!(a == b))
        throw std::invalid_argument(std::string("grid mismatch: ") + what);
}

}  // namespace rfc
