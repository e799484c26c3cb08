#pragma once

#include <cmath>
#include <functional>
#include <limits>

namespace stoplaw {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Round to a given number of significant decimal digits. Used at every
// serialization boundary so emitted files are portable across platforms.
double round_sig(double x, int digits);

// Adaptive Simpson quadrature of f over the finite interval [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, int max_depth = 48);

struct RootResult {
    double x = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool ok = false;
};

// Root of f on the bracket [lo, hi]; f(lo) and f(hi) must have opposite signs
// (or one of them vanish). Bisection with a secant acceleration step.
RootResult find_root(const std::function<double(double)>& f, double lo, double hi,
                     double x_tol = 1e-13, int max_iter = 200);

// Root of a decreasing function, bracket grown geometrically from x0 until a
// sign change appears. Throws NumericError when no bracket is found.
RootResult find_root_decreasing(const std::function<double(double)>& f, double x0,
                                double x_tol = 1e-13);

}  // namespace stoplaw
