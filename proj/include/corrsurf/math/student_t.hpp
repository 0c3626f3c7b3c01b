#pragma once

namespace corrsurf {
class PathRng;
}

namespace corrsurf::math {

double student_t_cdf(double x, double nu);
double student_t_inv(double p, double nu);

// Unit-variance Student-t: T * sqrt((nu - 2) / nu). Requires nu > 2.
double scaled_t_scale(double nu);
double scaled_t_cdf(double x, double nu);
double scaled_t_inv(double p, double nu);
double scaled_t_pdf(double x, double nu);
double scaled_t_sample(double nu, PathRng& rng);

} // namespace corrsurf::math
