#include "corrsurf/math/roots.hpp"

#include "corrsurf/errors.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace corrsurf::math {

double find_root_monotone(const std::function<double(double)>& f, double lo, double hi, const RootOptions& opt)
{
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0)
        return a;
    if (fb == 0.0)
        return b;
    if ((fa > 0.0) == (fb > 0.0)) {
        std::ostringstream os;
        os << "find_root_monotone: no sign change on [" << lo << ", " << hi << "] (f=" << fa << ", " << fb << ")";
        throw NoBracketError(os.str());
    }
    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int it = 0; it < opt.max_iter; ++it) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * 2.2e-16 * std::fabs(b) + 0.5 * opt.x_tol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || std::fabs(fb) <= opt.f_tol || fb == 0.0)
            return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0)
                q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::fabs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    // Brent always shrinks the bracket; falling out means max_iter was tiny.
    return b;
}

double find_root_monotone(const std::function<double(double)>& f, double lo, double hi, double tol)
{
    RootOptions opt;
    opt.x_tol = tol;
    opt.f_tol = tol;
    return find_root_monotone(f, lo, hi, opt);
}

} // namespace corrsurf::math
