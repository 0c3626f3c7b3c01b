#pragma once

#include <functional>

namespace corrsurf::math {

struct RootOptions {
    double x_tol = 1e-10;
    double f_tol = 0.0;
    int max_iter = 200;
};

// Brent's method with a bisection safeguard. f(lo) and f(hi) must bracket a
// sign change, otherwise NoBracketError is thrown.
double find_root_monotone(const std::function<double(double)>& f, double lo, double hi,
                          const RootOptions& opt);

// Stops when |f(x)| <= tol or the bracket is narrower than tol.
double find_root_monotone(const std::function<double(double)>& f, double lo, double hi,
                          double tol = 1e-10);

} // namespace corrsurf::math
