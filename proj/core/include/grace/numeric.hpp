#pragma once

namespace grace {

// Inverse error function, |q| < 1. Newton refinement over std::erf from a
// rational starting guess; accurate to ~1e-15 over the range used here.
double erf_inv(double q);

// Quantile of the chi-squared distribution with one degree of freedom:
// smallest x with P(X <= x) = q. For q = 0.99 this is 6.6348966...
double chi2_quantile_1df(double q);

}  // namespace grace
