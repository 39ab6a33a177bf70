#pragma once

namespace ccopf {

// Standard normal density.
double norm_pdf(double x);

// Standard normal CDF, computed through erfc so both tails keep full
// relative accuracy.
double norm_cdf(double x);

// Upper tail 1 - Phi(x) without cancellation for large x.
double norm_sf(double x);

// Inverse CDF. Rational initial guess (Acklam) followed by one Halley
// step against norm_cdf; |Phi(Phi^-1(p)) - p| < 1e-12 over (0,1).
// Throws for p outside (0,1).
double norm_ppf(double p);

// Inverse of the upper tail: returns x with norm_sf(x) = q. Accurate for
// tiny q where 1 - q rounds to 1.
double norm_isf(double q);

}  // namespace ccopf
