#pragma once

namespace valsim {

/// Standard normal distribution function Phi(x).
double normal_cdf(double x);

/// Upper tail Q(x) = 1 - Phi(x), computed without cancellation.
double normal_upper(double x);

double normal_pdf(double x);

/// Phi^{-1}(p) for p in (0, 1); returns -inf / +inf at 0 / 1.
double normal_quantile(double p);

/// Q^{-1}(p): the threshold exceeded with probability p.
double normal_upper_quantile(double p);

}  // namespace valsim
