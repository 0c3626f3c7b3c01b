#pragma once

namespace corrsurf::math {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kPi = 3.14159265358979323846;

double norm_pdf(double x) noexcept;
// Absolute error below 1e-16; saturates to exactly 0 or 1 for |x| > ~38.
double norm_cdf(double x) noexcept;
// Throws DomainError unless 0 < p < 1.
double norm_inv_cdf(double p);

double binorm_pdf(double x, double y, double rho);
double binorm_cdf(double x, double y, double rho);
// Partial derivative of binorm_cdf in its second argument.
double binorm_cdf_d2(double x, double y, double rho);
// Partial derivative of binorm_cdf in rho, which equals the joint density.
double binorm_cdf_d3(double x, double y, double rho);

} // namespace corrsurf::math
