#include "stoplaw/numerics.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>

#include "stoplaw/errors.hpp"

namespace stoplaw {

double round_sig(double x, int digits) {
    if (!std::isfinite(x) || x == 0.0) return x;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*e", digits - 1, x);
    return std::strtod(buf, nullptr);
}

namespace {

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b, double fa,
             double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, int max_depth) {
    if (a == b) return 0.0;
    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw NumericError("integrate: endpoints must be finite");
    }
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson(fa, fm, fb, b - a);
    const double scale = std::max({std::abs(whole), std::abs(b - a), 1e-300});
    return adapt(f, a, b, fa, fm, fb, whole, std::max(rel_tol * scale, 1e-305), max_depth);
}

RootResult find_root(const std::function<double(double)>& f, double lo, double hi,
                     double x_tol, int max_iter) {
    RootResult r;
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return {lo, 0.0, 0, true};
    if (fhi == 0.0) return {hi, 0.0, 0, true};
    if ((flo < 0.0) == (fhi < 0.0)) {
        throw NumericError("find_root: endpoints do not bracket a sign change");
    }
    double x = lo;
    for (int it = 0; it < max_iter; ++it) {
        // secant candidate, fall back to midpoint when it leaves the bracket
        double cand = lo - flo * (hi - lo) / (fhi - flo);
        const double mid = 0.5 * (lo + hi);
        if (!(cand > lo && cand < hi)) cand = mid;
        if (it % 2 == 1) cand = mid;  // guarantee bisection-rate shrinkage
        const double fc = f(cand);
        r.iterations = it + 1;
        if (fc == 0.0 || hi - lo <= x_tol * std::max(1.0, std::abs(cand))) {
            return {cand, fc, r.iterations, true};
        }
        if ((fc < 0.0) == (flo < 0.0)) {
            lo = cand;
            flo = fc;
        } else {
            hi = cand;
            fhi = fc;
        }
        x = cand;
    }
    r.x = x;
    r.residual = f(x);
    r.ok = true;
    return r;
}

RootResult find_root_decreasing(const std::function<double(double)>& f, double x0,
                                double x_tol) {
    // f decreasing on (0, inf): f > 0 means the root lies to the right,
    // f < 0 to the left. Expand the bracket geometrically.
    if (!(x0 > 0.0)) x0 = 1.0;
    double v = f(x0);
    if (v == 0.0) return {x0, 0.0, 0, true};
    int grow = 0;
    if (v > 0.0) {
        double lo = x0, hi = 2.0 * x0;
        while (grow++ < 400) {
            const double fhi = f(hi);
            if (fhi <= 0.0) {
                auto r = find_root(f, lo, hi, x_tol);
                r.iterations += grow;
                return r;
            }
            lo = hi;
            hi *= 2.0;
        }
    } else {
        double hi = x0, lo = 0.5 * x0;
        while (grow++ < 2000) {
            const double flo = f(lo);
            if (flo >= 0.0) {
                auto r = find_root(f, lo, hi, x_tol);
                r.iterations += grow;
                return r;
            }
            hi = lo;
            lo *= 0.5;
        }
    }
    throw NumericError("find_root_decreasing: no sign change found while expanding bracket");
}

}  // namespace stoplaw
