#include "rfc/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace rfc {

MeanStderr summarize(std::span<const double> samples)
{
    MeanStderr out;
    out.n = samples.size();
    if (out.n == 0)
        throw std::invalid_argument("summarize: no samples");
    double sum = 0.0;
    for (double x : samples)
        sum += x;
    out.mean = sum / static_cast<double>(out.n);
    if (out.n < 2)
        return out;
    double ss = 0.0;
    for (double x : samples) {
        const double d = x - out.mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(out.n - 1);
    out.std_error = std::sqrt(var / static_cast<double>(out.n));
    return out;
}

double correlation(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("correlation: need two series of equal length >= 2");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace rfc
