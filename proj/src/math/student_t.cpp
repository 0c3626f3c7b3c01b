#include "corrsurf/math/student_t.hpp"

#include "corrsurf/errors.hpp"
#include "corrsurf/rng.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <string>

namespace corrsurf::math {

namespace {

void check_nu(double nu)
{
    if (!(nu > 0.0))
        throw DomainError("student-t: degrees of freedom must be > 0, got " + std::to_string(nu));
}

void check_scaled_nu(double nu)
{
    if (!(nu > 2.0))
        throw DomainError("unit-variance student-t needs nu > 2, got " + std::to_string(nu));
}

} // namespace

double student_t_cdf(double x, double nu)
{
    check_nu(nu);
    if (std::isinf(x))
        return x > 0 ? 1.0 : 0.0;
    return boost::math::cdf(boost::math::students_t_distribution<double>(nu), x);
}

double student_t_inv(double p, double nu)
{
    check_nu(nu);
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("student_t_inv: p must lie in (0,1), got " + std::to_string(p));
    return boost::math::quantile(boost::math::students_t_distribution<double>(nu), p);
}

double scaled_t_scale(double nu)
{
    check_scaled_nu(nu);
    return std::sqrt((nu - 2.0) / nu);
}

double scaled_t_cdf(double x, double nu)
{
    return student_t_cdf(x / scaled_t_scale(nu), nu);
}

double scaled_t_inv(double p, double nu)
{
    const double s = scaled_t_scale(nu);
    return s * student_t_inv(p, nu);
}

double scaled_t_pdf(double x, double nu)
{
    const double s = scaled_t_scale(nu);
    return boost::math::pdf(boost::math::students_t_distribution<double>(nu), x / s) / s;
}

double scaled_t_sample(double nu, PathRng& rng)
{
    check_scaled_nu(nu);
    const double z = rng.normal();
    const double w = rng.chi_square(nu);
    return z * std::sqrt((nu - 2.0) / w);
}

} // namespace corrsurf::math
