#include "stoplaw/objectives.hpp"

#include <algorithm>
#include <cmath>

#include "stoplaw/errors.hpp"
#include "stoplaw/numerics.hpp"

namespace stoplaw {

Utility Utility::identity() {
    Utility u;
    u.f_ = [](double z) { return z; };
    u.inv_ = [](double v) { return v; };
    u.deriv_ = [](double) { return 1.0; };
    u.shape_ = Shape::linear;
    u.family_ = "identity";
    return u;
}

Utility Utility::power(double coef, double exponent) {
    if (!(coef > 0.0) || !(exponent > 0.0)) {
        throw DomainError("power utility: need positive coefficient and exponent");
    }
    Utility u;
    u.f_ = [coef, exponent](double z) {
        if (z < 0.0) throw DomainError("power utility: negative argument");
        return coef * std::pow(z, exponent);
    };
    u.inv_ = [coef, exponent](double v) { return std::pow(v / coef, 1.0 / exponent); };
    u.deriv_ = [coef, exponent](double z) { return coef * exponent * std::pow(z, exponent - 1.0); };
    if (exponent != 1.0) {
        u.marginal_inv_ = [coef, exponent](double p) {
            return std::pow(p / (coef * exponent), 1.0 / (exponent - 1.0));
        };
    }
    u.shape_ = exponent < 1.0 ? Shape::concave : (exponent > 1.0 ? Shape::convex : Shape::linear);
    u.domain_lo_ = 0.0;
    u.family_ = "power";
    u.params_ = {{coef, exponent}};
    return u;
}

Utility Utility::exponential(double alpha) {
    if (alpha == 0.0) return identity();
    Utility u;
    u.f_ = [alpha](double z) { return (1.0 - std::exp(-alpha * z)) / alpha; };
    u.inv_ = [alpha](double v) { return -std::log1p(-alpha * v) / alpha; };
    u.deriv_ = [alpha](double z) { return std::exp(-alpha * z); };
    u.marginal_inv_ = [alpha](double p) { return -std::log(p) / alpha; };
    u.shape_ = alpha > 0.0 ? Shape::concave : Shape::convex;
    u.family_ = "exponential";
    u.params_ = {{alpha, 0.0}};
    return u;
}

Utility Utility::piecewise_linear(std::vector<std::pair<double, double>> knots) {
    if (knots.size() < 2) throw DomainError("piecewise-linear utility: need >= 2 knots");
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (!(knots[i].first > knots[i - 1].first && knots[i].second > knots[i - 1].second)) {
            throw DomainError("piecewise-linear utility: knots must be strictly increasing");
        }
    }
    auto interp = [](const std::vector<std::pair<double, double>>& ks, double z) {
        // end pieces extrapolate with the boundary slopes
        std::size_t i = 1;
        while (i + 1 < ks.size() && z > ks[i].first) ++i;
        const auto& [z0, v0] = ks[i - 1];
        const auto& [z1, v1] = ks[i];
        return v0 + (z - z0) * (v1 - v0) / (z1 - z0);
    };
    std::vector<std::pair<double, double>> swapped(knots.size());
    std::transform(knots.begin(), knots.end(), swapped.begin(),
                   [](const auto& p) { return std::pair{p.second, p.first}; });
    // shape from the slope sequence
    Shape shape = Shape::linear;
    bool non_increasing = true, non_decreasing = true;
    double prev = kInf;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        const double slope =
            (knots[i].second - knots[i - 1].second) / (knots[i].first - knots[i - 1].first);
        if (prev != kInf) {
            if (slope > prev + 1e-15) non_increasing = false;
            if (slope < prev - 1e-15) non_decreasing = false;
        }
        prev = slope;
    }
    if (non_increasing && non_decreasing) shape = Shape::linear;
    else if (non_increasing) shape = Shape::concave;
    else if (non_decreasing) shape = Shape::convex;
    else shape = Shape::general;

    Utility u;
    u.f_ = [knots, interp](double z) { return interp(knots, z); };
    u.inv_ = [swapped, interp](double v) { return interp(swapped, v); };
    u.shape_ = shape;
    u.family_ = "piecewise_linear";
    u.params_ = knots;
    return u;
}

Utility Utility::from_functions(std::function<double(double)> f,
                                std::function<double(double)> inv, Shape shape,
                                double domain_lo, std::function<double(double)> deriv,
                                std::function<double(double)> marginal_inv,
                                std::string family) {
    Utility u;
    u.f_ = std::move(f);
    u.inv_ = std::move(inv);
    u.deriv_ = std::move(deriv);
    u.marginal_inv_ = std::move(marginal_inv);
    u.shape_ = shape;
    u.domain_lo_ = domain_lo;
    u.family_ = std::move(family);
    return u;
}

double Utility::derivative(double z) const {
    if (deriv_) return deriv_(z);
    const double h = 1e-6 * std::max(1.0, std::abs(z));
    return (f_(z + h) - f_(z - h)) / (2.0 * h);
}

double Utility::marginal_inverse(double p) const {
    if (marginal_inv_) return marginal_inv_(p);
    if (!(p > 0.0)) throw DomainError("marginal_inverse: need p > 0");
    // u' decreasing for concave u: expand a bracket and bisect
    double lo = std::max(domain_lo_, 0.0) + 1e-12, hi = std::max(1.0, lo * 2.0);
    int guard = 0;
    while (derivative(hi) > p) {
        hi *= 2.0;
        if (++guard > 200) throw NumericError("marginal_inverse: bracket expansion failed");
    }
    while (derivative(lo) < p) {
        lo *= 0.5;
        if (++guard > 400) throw NumericError("marginal_inverse: bracket expansion failed");
    }
    return find_root([&](double g) { return derivative(g) - p; }, lo, hi).x;
}

Weighting Weighting::identity() {
    Weighting w;
    w.w_ = [](double p) { return p; };
    w.deriv_ = [](double) { return 1.0; };
    w.shape_ = Shape::linear;
    w.family_ = "identity";
    return w;
}

Weighting Weighting::power(double gamma) {
    if (!(gamma > 0.0)) throw DomainError("power weighting: need gamma > 0");
    Weighting w;
    w.w_ = [gamma](double p) { return std::pow(p, gamma); };
    w.deriv_ = [gamma](double p) { return gamma * std::pow(p, gamma - 1.0); };
    w.shape_ = gamma < 1.0 ? Shape::concave : (gamma > 1.0 ? Shape::convex : Shape::linear);
    w.family_ = gamma == 1.0 ? "identity" : "power";
    w.param_ = gamma;
    return w;
}

Weighting Weighting::from_functions(std::function<double(double)> w,
                                    std::function<double(double)> deriv, Shape shape,
                                    std::string family, double param) {
    Weighting out;
    out.w_ = std::move(w);
    out.deriv_ = std::move(deriv);
    out.shape_ = shape;
    out.family_ = std::move(family);
    out.param_ = param;
    if (std::abs(out.w_(0.0)) > 1e-12 || std::abs(out.w_(1.0) - 1.0) > 1e-12) {
        throw DomainError("weighting: must satisfy w(0)=0 and w(1)=1");
    }
    return out;
}

namespace {

void check_support(const Utility& u, const Distribution& d) {
    if (d.empty()) throw DomainError("objective: empty law");
    if (d.min_support() < u.domain_lo() - 1e-12 * std::max(1.0, std::abs(u.domain_lo()))) {
        throw DomainError("objective: law support below the utility domain");
    }
}

}  // namespace

double eval_eu(const Utility& u, const Distribution& d) {
    check_support(u, d);
    double s = 0.0;
    for (const Atom& a : d.atoms()) s += a.mass * u(a.z);
    for (const Cell& c : d.cells()) {
        const double mid = 0.5 * (c.lo + c.hi);
        s += c.mass * (u(c.lo) + 4.0 * u(mid) + u(c.hi)) / 6.0;
    }
    return s;
}

double eval_rdu(const Utility& v, const Weighting& w, const Distribution& d) {
    check_support(v, d);
    if (!std::isfinite(d.min_support())) {
        throw DomainError("eval_rdu: support must be bounded below");
    }
    if (!d.is_probability(1e-9)) throw DomainError("eval_rdu: not a probability law");
    double s = 0.0;
    for (const QuantilePiece& p : d.pieces()) {
        // total mass may sit an ulp above 1; keep the survival argument in [0,1]
        const double t0 = std::clamp(1.0 - p.u0, 0.0, 1.0);
        const double t1 = std::clamp(1.0 - p.u1, 0.0, 1.0);
        const double dw = w(t0) - w(t1);
        if (dw == 0.0) continue;
        const double z = p.is_atom() ? p.z0 : 0.5 * (p.z0 + p.z1);
        s += dw * v(z);
        if (!std::isfinite(s)) throw NumericError("eval_rdu: non-integrable weighting");
    }
    return s;
}

double certainty_equivalent(const Utility& u, const Distribution& d) {
    const double ce = u.inverse(eval_eu(u, d));
    return std::clamp(ce, d.min_support(), d.max_support());
}

double eval_csc(const std::vector<Utility>& utilities, const Distribution& d) {
    if (utilities.empty()) throw DomainError("eval_csc: empty utility list");
    double best = kInf;
    for (const Utility& u : utilities) best = std::min(best, certainty_equivalent(u, d));
    return best;
}

Objective Objective::make_eu(Utility u) {
    Objective o;
    o.kind = Kind::eu;
    o.utilities = {std::move(u)};
    return o;
}

Objective Objective::make_rdu(Utility v, Weighting w) {
    Objective o;
    o.kind = Kind::rdu;
    o.utilities = {std::move(v)};
    o.weighting = std::move(w);
    return o;
}

Objective Objective::make_csc(std::vector<Utility> us) {
    if (us.empty()) throw DomainError("csc objective: empty utility list");
    Objective o;
    o.kind = Kind::csc;
    o.utilities = std::move(us);
    return o;
}

double Objective::evaluate(const Distribution& d) const {
    switch (kind) {
        case Kind::eu: return eval_eu(utilities[0], d);
        case Kind::rdu: return eval_rdu(utilities[0], *weighting, d);
        case Kind::csc: return eval_csc(utilities, d);
    }
    throw DomainError("objective: unknown kind");
}

}  // namespace stoplaw
