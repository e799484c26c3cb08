#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stoplaw/distribution.hpp"
#include "stoplaw/numerics.hpp"

namespace stoplaw {

enum class Shape { concave, convex, linear, general };

// Strictly increasing payoff transform with an evaluable inverse. Registered
// families carry analytic derivative hooks; otherwise central differences
// with step 1e-6 are used.
class Utility {
public:
    static Utility identity();
    static Utility power(double coef, double exponent);  // coef * z^exponent on [0, inf)
    static Utility square_root(double coef = 1.0) { return power(coef, 0.5); }
    static Utility exponential(double alpha);  // (1 - exp(-alpha z)) / alpha
    static Utility piecewise_linear(std::vector<std::pair<double, double>> knots);
    static Utility from_functions(std::function<double(double)> f,
                                  std::function<double(double)> inv, Shape shape,
                                  double domain_lo = -kInf,
                                  std::function<double(double)> deriv = nullptr,
                                  std::function<double(double)> marginal_inv = nullptr,
                                  std::string family = "custom");

    double operator()(double z) const { return f_(z); }
    double inverse(double v) const { return inv_(v); }
    double derivative(double z) const;
    // g solving u'(g) = p; analytic for registered families, else a
    // monotone root solve on the finite-difference derivative
    double marginal_inverse(double p) const;
    bool has_analytic_marginal_inverse() const { return static_cast<bool>(marginal_inv_); }

    Shape shape() const { return shape_; }
    bool concave() const { return shape_ == Shape::concave || shape_ == Shape::linear; }
    double domain_lo() const { return domain_lo_; }
    const std::string& family() const { return family_; }
    const std::vector<std::pair<double, double>>& params() const { return params_; }

private:
    std::function<double(double)> f_, inv_, deriv_, marginal_inv_;
    Shape shape_ = Shape::general;
    double domain_lo_ = -kInf;
    std::string family_;
    std::vector<std::pair<double, double>> params_;  // family parameters / knots
};

// Probability weighting w on [0,1] with w(0)=0, w(1)=1.
class Weighting {
public:
    static Weighting identity();
    static Weighting power(double gamma);  // p^gamma
    static Weighting from_functions(std::function<double(double)> w,
                                    std::function<double(double)> deriv, Shape shape,
                                    std::string family = "custom", double param = 0.0);

    double operator()(double p) const { return w_(p); }
    double derivative(double p) const { return deriv_(p); }
    bool is_identity() const { return family_ == "identity"; }
    bool concave() const { return shape_ == Shape::concave || shape_ == Shape::linear; }
    const std::string& family() const { return family_; }
    double param() const { return param_; }

private:
    std::function<double(double)> w_, deriv_;
    Shape shape_ = Shape::general;
    std::string family_;
    double param_ = 0.0;
};

// Expected value of u under d; atoms exact, cells by per-cell Simpson.
double eval_eu(const Utility& u, const Distribution& d);

// Rank-dependent prospect value int_0^1 w'(1-u) v(G(u)) du. Atom spans use
// exact weighting increments; cells one midpoint each, so a singular w'(0+)
// is never evaluated. Support must be bounded below.
double eval_rdu(const Utility& v, const Weighting& w, const Distribution& d);

double certainty_equivalent(const Utility& u, const Distribution& d);

// min over the utility list of its certainty equivalent.
double eval_csc(const std::vector<Utility>& utilities, const Distribution& d);

// Law-invariant objective functional H.
struct Objective {
    enum class Kind { eu, rdu, csc };
    Kind kind = Kind::eu;
    std::vector<Utility> utilities;  // eu/rdu: [0] is the utility; csc: the whole list
    std::optional<Weighting> weighting;

    static Objective make_eu(Utility u);
    static Objective make_rdu(Utility v, Weighting w);
    static Objective make_csc(std::vector<Utility> us);

    bool quasi_convex() const { return kind == Kind::eu; }
    double evaluate(const Distribution& d) const;
};

}  // namespace stoplaw
