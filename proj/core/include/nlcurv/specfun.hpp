#pragma once

namespace nlcurv::specfun {

/// Gamma function, Lanczos approximation, >= 12 significant digits on (0, 170].
/// Negative non-integer arguments are handled by the recurrence
/// Gamma(x) = Gamma(x+1)/x. Throws PoleError at non-positive integers.
double gamma(double x);

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// B(x,y) = Gamma(x) Gamma(y) / Gamma(x+y), x, y > 0.
double beta(double x, double y);

/// Volume of the unit ball in R^m (m >= 0).
double unit_ball_volume(int m);

/// Measure of the unit sphere S^m embedded in R^{m+1} (m >= 0).
/// unit_sphere_measure(0) = 2 (two points), unit_sphere_measure(1) = 2*pi.
double unit_sphere_measure(int m);

/// mu_alpha = 2^alpha Gamma((n+alpha+1)/2) / (pi^{n/2} Gamma((1-alpha)/2)).
double mu_alpha(double alpha, int n);

/// nu_alpha = 2^alpha Gamma((n+alpha)/2) / (pi^{n/2} Gamma(-alpha/2)).
/// Negative for alpha in (0,2) \ {1}.
double nu_alpha(double alpha, int n);

} // namespace nlcurv::specfun
