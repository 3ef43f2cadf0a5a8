#pragma once

#include <cstddef>
#include <span>

namespace rfc {

struct MeanStderr {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

/// Two-pass sample mean and standard error, summed in index order.
MeanStderr summarize(std::span<const double> samples);

/// Sample correlation of two equally long series.
double correlation(std::span<const double> a, std::span<const double> b);

}  // namespace rfc
