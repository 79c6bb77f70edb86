#include "grace/numeric.hpp"

#include <cmath>

#include "grace/errors.hpp"

namespace grace {

double erf_inv(double q) {
    if (!(q > -1.0 && q < 1.0)) throw ConfigError("erf_inv requires |q| < 1");
    if (q == 0.0) return 0.0;

    // Winitzki's approximation as the starting point.
    const double a = 0.147;
    const double ln1mq2 = std::log(1.0 - q * q);
    const double term = 2.0 / (3.141592653589793238462643 * a) + ln1mq2 / 2.0;
    double x = std::copysign(std::sqrt(std::sqrt(term * term - ln1mq2 / a) - term), q);

    // Newton: f(x) = erf(x) - q, f'(x) = 2/sqrt(pi) * exp(-x^2).
    for (int iter = 0; iter < 8; ++iter) {
        const double err = std::erf(x) - q;
        const double deriv = 1.1283791670955125738961589 * std::exp(-x * x);
        if (deriv == 0.0) break;
        const double step = err / deriv;
        x -= step;
        if (std::abs(step) < 1e-17) break;
    }
    return x;
}

double chi2_quantile_1df(double q) {
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("chi2 quantile requires q in (0, 1)");
    // X = Z^2 for standard normal Z, so P(X <= x) = erf(sqrt(x/2)).
    const double t = erf_inv(q);
    return 2.0 * t * t;
}

}  // namespace grace
