#pragma once

#include <optional>
#include <vector>

#include "stoplaw/embedding.hpp"
#include "stoplaw/objectives.hpp"
#include "stoplaw/scale.hpp"

namespace stoplaw {

// Candidate exit thresholds around x. Both lists always contain x itself
// (stop now) and the one-sided sentinels where the case allows them.
struct ThresholdGrid {
    std::vector<double> a_values;  // in [space.lo, x]
    std::vector<double> b_values;  // in [x, space.hi]

    // n_a x n_b grid: uniform coverage plus log-spaced refinement toward the
    // boundaries; infinite sides use geometric offsets out to `span`.
    static ThresholdGrid regular(const StateSpace& space, double x, int n_a = 200,
                                 int n_b = 200, double span = 0.0);
};

struct OptimReport {
    double value = 0.0;
    std::optional<ThresholdPair> best_pair;
    std::optional<RandomizedRule> best_rule;
    std::optional<Distribution> target;  // optimal stopped law (natural scale)
    std::optional<double> lambda_star;
    std::optional<double> theta_star;
    std::optional<Distribution> mix_component1, mix_component2;
    int iterations = 0;
    double residual = 0.0;
    double budget_gap = 0.0;        // |int G* - y| (quantile optimizer)
    double prospect_analytic = 0.0; // prospect value of the analytic quantile
    bool warning_nonconcave = false;
};

enum class Execution { parallel, serial };

// Exhaustive sweep of pure threshold rules: H evaluated on the Y-scale law of
// every grid pair (one-sided and stop-now included). Deterministic tie-break:
// lexicographically smallest (a, b).
OptimReport optimize_pure_thresholds(const Objective& obj, const ThresholdGrid& grid,
                                     const ScaleMap& scale,
                                     Execution exec = Execution::parallel);

// Optimal-quantile solution for concave RDU in natural scale on [0, inf):
// G*(u) = (v')^{-1}(lambda*/w'(1-u)) with lambda* solving the budget
// constraint int_0^1 G* = y. Returns the gridded target law, its realizing
// rule, and solver diagnostics.
OptimReport optimize_rdu_quantile(const Utility& v, const Weighting& w, double y,
                                  int grid_cells = 4096);

// Max over g of w'(1-u) v(g) - lambda g minus its value at g = G*(u),
// probed by central differences; used by the optimality checks.
double rdu_lagrangian_gap(const Utility& v, const Weighting& w, double lambda, double u);

// Best two-law mixture for a two-utility CSC objective: equalizes the
// certainty equivalents when the crossing condition holds, otherwise picks
// the better endpoint.
OptimReport optimize_csc_mixture(const Utility& ua, const Utility& ub,
                                 const Distribution& law1, const Distribution& law2);

struct CompareReport {
    double v_tt = 0.0;
    double v_tr = 0.0;
    double gap = 0.0;
    OptimReport pure;
    OptimReport randomized;
};

// V* over pure threshold rules (grid sweep) against V* over randomized rules
// (objective-specific optimizer). Always v_tr >= v_tt - 1e-10.
CompareReport compare_rule_classes(const Objective& obj, const ScaleMap& scale,
                                   const ThresholdGrid& grid);

}  // namespace stoplaw
