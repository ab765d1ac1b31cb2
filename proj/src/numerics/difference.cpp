#include "isoperiodic/errors.hpp"
#include "isoperiodic/numerics.hpp"

#include <cmath>
#include <limits>

namespace isoperiodic
{

CentralDifference central_difference(const std::function<Complex(double)> &g, double t, double h)
{
    if (!(h > 0.0)) {
        throw InvalidArgument("central_difference: step must be positive");
    }
    CentralDifference d;
    d.coarse = (g(t + h) - g(t - h)) / (2.0 * h);
    const double half = 0.5 * h;
    d.fine = (g(t + half) - g(t - half)) / h;
    d.value = (4.0 * d.fine - d.coarse) / 3.0;
    return d;
}

double observed_order(double err_coarse, double err_fine)
{
    if (!(err_fine > 0.0) || !(err_coarse > 0.0)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::log2(err_coarse / err_fine);
}

} // namespace isoperiodic
