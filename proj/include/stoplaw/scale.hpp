#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stoplaw/distribution.hpp"
#include "stoplaw/threshold.hpp"

namespace stoplaw {

// Drift / volatility coefficient: a registered family or a tabulated curve.
struct CoefSpec {
    enum class Kind { constant, linear, table };
    Kind kind = Kind::constant;
    double value = 0.0;                             // constant value or linear slope
    std::vector<std::pair<double, double>> table;   // (z, value), linear interpolation

    double operator()(double z) const;
};

// dY = vol(Y) dB + drift(Y) dt on the interval (lo, hi), started at `start`.
struct DiffusionSpec {
    CoefSpec drift;
    CoefSpec vol;
    double lo = -kInf;
    double hi = kInf;
    double start = 0.0;

    double drift_at(double z) const { return drift(z); }
    double vol_at(double z) const { return vol(z); }
    void validate() const;
};

enum class Direction { forward, inverse };

// Strictly increasing coordinate change X = s(Y) making the process a local
// martingale, normalized to s(y) = y, s'(y) = 1. Immutable; evaluation is pure.
class ScaleMap {
public:
    static ScaleMap identity(double lo, double hi, double y);
    static ScaleMap from_functions(std::function<double(double)> fwd,
                                   std::function<double(double)> inv, double y_lo,
                                   double y_hi, double x_lo, double x_hi, double y,
                                   std::string family = "custom");

    // extended evaluation: interval endpoints map to the image endpoints
    double forward(double z) const;
    double inverse(double v) const;

    double x() const { return x_; }
    double y() const { return y_; }
    double y_lo() const { return y_lo_; }
    double y_hi() const { return y_hi_; }
    StateSpace image() const { return {x_lo_, x_hi_}; }
    CaseTag tag() const { return image().tag(); }
    const std::string& family() const { return family_; }
    bool is_identity() const { return family_ == "identity"; }

private:
    std::function<double(double)> fwd_, inv_;
    double y_lo_ = -kInf, y_hi_ = kInf, x_lo_ = -kInf, x_hi_ = kInf;
    double y_ = 0.0, x_ = 0.0;
    std::string family_;
};

// Closed form when the spec matches a registered family, quadrature otherwise.
ScaleMap build_scale(const DiffusionSpec& spec);
// Quadrature path regardless of family (reference for validation).
ScaleMap build_scale_numeric(const DiffusionSpec& spec);

// Law of s(Y) from the law of Y (forward) or of s^{-1}(X) from the law of X
// (inverse). Atoms map exactly; quantile knots map pointwise.
Distribution pushforward(const Distribution& d, const ScaleMap& m, Direction dir);

}  // namespace stoplaw
