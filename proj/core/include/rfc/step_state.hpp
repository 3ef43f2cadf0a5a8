#pragma once

#include <cstddef>

namespace rfc {

/// Market information available at the left end of step k.
struct MarketState {
    std::size_t k = 0;
    double t = 0.0;
    double S = 1.0;
    double sigma = 0.0;
    double lambda_hat = 0.0;
    double delta = 0.0;
};

/// Market state plus the investor's current wealth.
struct StepState : MarketState {
    double X = 1.0;
};

}  // namespace rfc
