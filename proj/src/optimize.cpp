#include "stoplaw/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "stoplaw/errors.hpp"
#include "stoplaw/numerics.hpp"

namespace stoplaw {

namespace {

void side_points(std::vector<double>& out, double bound, double x, int n, double span,
                 bool lower) {
    // uniform coverage plus geometric refinement toward the boundary
    out.push_back(x);
    const int n_uni = std::max(2, n / 2);
    const int n_geo = std::max(2, n - n_uni);
    if (std::isfinite(bound)) {
        out.push_back(bound);
        for (int k = 1; k < n_uni; ++k) {
            out.push_back(bound + (x - bound) * k / n_uni);
        }
        for (int k = 0; k < n_geo; ++k) {
            const double t = static_cast<double>(k) / (n_geo - 1);
            out.push_back(bound + (x - bound) * std::pow(10.0, -6.0 * (1.0 - t)));
        }
    } else {
        out.push_back(lower ? -kInf : kInf);
        for (int k = 0; k < n - 2; ++k) {
            const double t = n > 3 ? static_cast<double>(k) / (n - 3) : 0.0;
            const double off = span * std::pow(10.0, -6.0 * (1.0 - t));
            out.push_back(lower ? x - off : x + off);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

}  // namespace

ThresholdGrid ThresholdGrid::regular(const StateSpace& space, double x, int n_a, int n_b,
                                     double span) {
    if (n_a < 2 || n_b < 2) throw ConfigError("threshold grid: need at least 2x2");
    if (!(space.lo <= x && x <= space.hi)) {
        throw ConfigError("threshold grid: x outside the state space");
    }
    if (span <= 0.0) span = 50.0 * std::max(1.0, std::abs(x));
    ThresholdGrid g;
    side_points(g.a_values, space.lo, x, n_a, span, true);
    side_points(g.b_values, space.hi, x, n_b, span, false);
    return g;
}

namespace {

std::vector<ThresholdPair> candidate_pairs(const ThresholdGrid& grid, double x,
                                           const StateSpace& space) {
    std::vector<ThresholdPair> cands;
    cands.reserve(grid.a_values.size() * grid.b_values.size());
    bool stop_now_added = false;
    for (double a : grid.a_values) {
        if (a > x || a < space.lo) continue;
        for (double b : grid.b_values) {
            if (b < x || b > space.hi) continue;
            if (a == -kInf && b == kInf) continue;  // never stops
            if (a == x || b == x) {
                if (!stop_now_added) {
                    cands.push_back({x, x, x});
                    stop_now_added = true;
                }
                continue;
            }
            cands.push_back({a, b, x});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const ThresholdPair& p, const ThresholdPair& q) {
        return p.a < q.a || (p.a == q.a && p.b < q.b);
    });
    cands.erase(std::unique(cands.begin(), cands.end(),
                            [](const ThresholdPair& p, const ThresholdPair& q) {
                                return p.a == q.a && p.b == q.b;
                            }),
                cands.end());
    return cands;
}

// evaluate fn over the candidates, parallel or serial; results are written
// into fixed slots so the outcome does not depend on the schedule
template <typename Fn>
void for_each_candidate(const std::vector<ThresholdPair>& cands, Execution exec, Fn&& fn) {
    const auto n = static_cast<std::ptrdiff_t>(cands.size());
    std::exception_ptr err;
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            try {
                fn(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            try {
                fn(static_cast<std::size_t>(i));
            } catch (...) {
                if (!err) err = std::current_exception();
            }
        }
    }
    if (err) std::rethrow_exception(err);
}

}  // namespace

OptimReport optimize_pure_thresholds(const Objective& obj, const ThresholdGrid& grid,
                                     const ScaleMap& scale, Execution exec) {
    const StateSpace space = scale.image();
    const double x = scale.x();
    const auto cands = candidate_pairs(grid, x, space);
    if (cands.empty()) throw ConfigError("optimize_pure_thresholds: empty grid");
    std::vector<double> values(cands.size());
    for_each_candidate(cands, exec, [&](std::size_t i) {
        const Distribution law_x = threshold_law(cands[i], space);
        values[i] = obj.evaluate(pushforward(law_x, scale, Direction::inverse));
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;  // candidates are sorted: first wins ties
    }
    OptimReport rep;
    rep.value = values[best];
    rep.best_pair = cands[best];
    rep.target = threshold_law(cands[best], space);
    rep.iterations = static_cast<int>(cands.size());
    return rep;
}

// ---------------------------------------------------------------------------
// RDU optimal quantile
// ---------------------------------------------------------------------------

namespace {

// int_0^h (v')^{-1}(lambda / w'(p)) dp with a p = h t^4 substitution that
// keeps the singular corner p -> 0 off the evaluation grid
double budget_integral(const Utility& v, const Weighting& w, double lambda, double h) {
    auto f = [&](double t) {
        if (t <= 0.0) return 0.0;
        const double p = h * t * t * t * t;
        const double wp = w.derivative(p);
        if (!std::isfinite(wp) || wp <= 0.0) return 0.0;
        return 4.0 * h * t * t * t * v.marginal_inverse(lambda / wp);
    };
    const double val = integrate(f, 0.0, 1.0, 1e-12);
    if (!std::isfinite(val)) throw NumericError("rdu budget: non-integrable integrand");
    return val;
}

double prospect_integral(const Utility& v, const Weighting& w, double lambda) {
    auto f = [&](double t) {
        if (t <= 0.0) return 0.0;
        const double p = t * t * t * t;
        const double wp = w.derivative(p);
        if (!std::isfinite(wp) || wp <= 0.0) return 0.0;
        return 4.0 * t * t * t * wp * v(v.marginal_inverse(lambda / wp));
    };
    const double val = integrate(f, 0.0, 1.0, 1e-12);
    if (!std::isfinite(val)) throw NumericError("rdu prospect: non-integrable integrand");
    return val;
}

// closed form of the budget map for power utility + power weighting
std::optional<double> budget_power_closed_form(const Utility& v, const Weighting& w,
                                               double lambda) {
    if (v.family() != "power") return std::nullopt;
    const double a = v.params()[0].first, p = v.params()[0].second;
    if (!(p < 1.0)) return std::nullopt;
    double gamma = 1.0;
    if (w.family() == "power") gamma = w.param();
    else if (!w.is_identity()) return std::nullopt;
    if (!(gamma > p)) return std::nullopt;  // budget diverges otherwise
    return std::pow(lambda / (a * p * gamma), 1.0 / (p - 1.0)) * (1.0 - p) / (gamma - p);
}

}  // namespace

double rdu_lagrangian_gap(const Utility& v, const Weighting& w, double lambda, double u) {
    const double wp = w.derivative(1.0 - u);
    const double g_star = v.marginal_inverse(lambda / wp);
    auto phi = [&](double g) { return wp * v(g) - lambda * g; };
    const double delta = 1e-6 * std::max(1.0, std::abs(g_star));
    const double at = phi(g_star);
    const double up = phi(g_star + delta);
    const double dn = phi(std::max(g_star - delta, 0.5 * g_star));
    return std::max(0.0, std::max(up, dn) - at);
}

OptimReport optimize_rdu_quantile(const Utility& v, const Weighting& w, double y,
                                  int grid_cells) {
    if (!(y > 0.0)) throw DomainError("optimize_rdu_quantile: start must be positive");
    if (grid_cells < 2) throw DomainError("optimize_rdu_quantile: need >= 2 grid cells");
    OptimReport rep;
    rep.warning_nonconcave = !(v.concave() && w.concave());

    auto budget = [&](double lambda) {
        if (auto cf = budget_power_closed_form(v, w, lambda)) return *cf;
        return budget_integral(v, w, lambda, 1.0);
    };
    const double lambda0 = std::max(v.derivative(y), 1e-12);
    const RootResult root =
        find_root_decreasing([&](double l) { return budget(l) - y; }, lambda0, 1e-12);
    if (!root.ok) throw NumericError("optimize_rdu_quantile: no lambda bracket");
    const double lambda = root.x;
    rep.lambda_star = lambda;
    rep.iterations = root.iterations;
    rep.residual = std::abs(root.residual);
    rep.budget_gap = std::abs(budget(lambda) - y);

    auto g_star = [&](double u) { return v.marginal_inverse(lambda / w.derivative(1.0 - u)); };

    std::vector<double> nodes(static_cast<std::size_t>(grid_cells) + 1);
    for (int k = 0; k < grid_cells; ++k) {
        nodes[static_cast<std::size_t>(k)] = g_star(static_cast<double>(k) / grid_cells);
    }
    // pick the final node so the tabulated law's barycenter is the budget y
    // itself (per-cell trapezoid means overshoot a convex quantile slightly,
    // and a super-y mean would not be attainable)
    double interior_mean = 0.0;
    for (int k = 0; k + 1 < grid_cells; ++k) {
        interior_mean += 0.5 *
                         (nodes[static_cast<std::size_t>(k)] + nodes[static_cast<std::size_t>(k) + 1]) /
                         grid_cells;
    }
    nodes[static_cast<std::size_t>(grid_cells)] =
        std::max(nodes[static_cast<std::size_t>(grid_cells) - 1],
                 2.0 * grid_cells * (y - interior_mean) -
                     nodes[static_cast<std::size_t>(grid_cells) - 1]);

    Distribution target;
    const double spread = nodes.back() - nodes.front();
    if (spread <= 1e-9 * std::max(1.0, y)) {
        target = Distribution::point(y);  // constant quantile: stop immediately
    } else {
        target = Distribution::from_quantile_nodes(nodes);
    }
    rep.prospect_analytic = prospect_integral(v, w, lambda);
    rep.value = eval_rdu(v, w, target);
    rep.best_rule = hall_embed(target, y, StateSpace{0.0, kInf});
    rep.target = std::move(target);
    return rep;
}

// ---------------------------------------------------------------------------
// CSC mixtures
// ---------------------------------------------------------------------------

namespace {

struct MixtureSolve {
    double theta = 0.0;
    double value = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool interior = false;
};

MixtureSolve csc_mixture_from_evalues(const Utility& ua, const Utility& ub, double ea1,
                                      double ea2, double eb1, double eb2) {
    auto ca = [&](double th) { return ua.inverse(th * ea1 + (1.0 - th) * ea2); };
    auto cb = [&](double th) { return ub.inverse(th * eb1 + (1.0 - th) * eb2); };
    auto diff = [&](double th) { return ca(th) - cb(th); };
    MixtureSolve out;
    const double d0 = diff(0.0), d1 = diff(1.0);
    const bool opposite = (ea1 - ea2) * (eb1 - eb2) < 0.0;
    if (opposite && d0 != 0.0 && d1 != 0.0 && (d0 < 0.0) != (d1 < 0.0)) {
        const RootResult r = find_root(diff, 0.0, 1.0, 1e-12, 400);
        out.theta = r.x;
        out.iterations = r.iterations;
        out.value = std::min(ca(r.x), cb(r.x));
        out.residual = std::abs(diff(r.x));
        out.interior = true;
        return out;
    }
    const double v0 = std::min(ca(0.0), cb(0.0));
    const double v1 = std::min(ca(1.0), cb(1.0));
    out.theta = v1 >= v0 ? 1.0 : 0.0;  // prefer the first law on ties
    out.value = std::max(v0, v1);
    return out;
}

}  // namespace

OptimReport optimize_csc_mixture(const Utility& ua, const Utility& ub,
                                 const Distribution& law1, const Distribution& law2) {
    const double ea1 = eval_eu(ua, law1), ea2 = eval_eu(ua, law2);
    const double eb1 = eval_eu(ub, law1), eb2 = eval_eu(ub, law2);
    const MixtureSolve ms = csc_mixture_from_evalues(ua, ub, ea1, ea2, eb1, eb2);
    OptimReport rep;
    rep.value = ms.value;
    rep.theta_star = ms.theta;
    rep.residual = ms.residual;
    rep.iterations = ms.iterations;
    rep.mix_component1 = law1;
    rep.mix_component2 = law2;
    rep.target = Distribution::mix({{ms.theta, law1}, {1.0 - ms.theta, law2}});
    return rep;
}

// ---------------------------------------------------------------------------
// Rule-class comparison
// ---------------------------------------------------------------------------

namespace {

// upper-right Pareto frontier followed by its concave (upper convex hull)
// chain, indices into the point set
std::vector<std::size_t> pareto_hull(const std::vector<std::pair<double, double>>& pts) {
    std::vector<std::size_t> order(pts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return pts[i].first > pts[j].first ||
               (pts[i].first == pts[j].first && pts[i].second > pts[j].second);
    });
    std::vector<std::size_t> pareto;
    double best_beta = -kInf;
    for (std::size_t i : order) {
        if (pts[i].second > best_beta) {
            pareto.push_back(i);
            best_beta = pts[i].second;
        }
    }
    std::reverse(pareto.begin(), pareto.end());  // alpha ascending, beta descending
    std::vector<std::size_t> hull;
    for (std::size_t i : pareto) {
        while (hull.size() >= 2) {
            const auto& p1 = pts[hull[hull.size() - 2]];
            const auto& p2 = pts[hull[hull.size() - 1]];
            const auto& p3 = pts[i];
            const double cross = (p2.first - p1.first) * (p3.second - p1.second) -
                                 (p3.first - p1.first) * (p2.second - p1.second);
            if (cross >= 0.0) hull.pop_back();
            else break;
        }
        hull.push_back(i);
    }
    return hull;
}

}  // namespace

CompareReport compare_rule_classes(const Objective& obj, const ScaleMap& scale,
                                   const ThresholdGrid& grid) {
    CompareReport rep;
    rep.pure = optimize_pure_thresholds(obj, grid, scale);
    rep.v_tt = rep.pure.value;

    switch (obj.kind) {
        case Objective::Kind::eu: {
            // H is affine in the mixture weight, so the best mixture of pure
            // laws is attained at a pure law
            rep.randomized = rep.pure;
            if (rep.pure.best_pair) {
                RandomizedRule r;
                r.x = scale.x();
                r.space = scale.image();
                r.atoms = {{*rep.pure.best_pair, 1.0}};
                rep.randomized.best_rule = std::move(r);
            }
            break;
        }
        case Objective::Kind::rdu: {
            if (!scale.is_identity() || scale.tag() != CaseTag::bounded_below ||
                scale.image().lo != 0.0) {
                throw ConfigError(
                    "compare: the rdu optimizer needs the natural-scale state space [0, inf)");
            }
            rep.randomized = optimize_rdu_quantile(obj.utilities[0], *obj.weighting, scale.x());
            break;
        }
        case Objective::Kind::csc: {
            if (obj.utilities.size() != 2) {
                throw ConfigError("compare: the csc mixture optimizer is two-utility");
            }
            const Utility& ua = obj.utilities[0];
            const Utility& ub = obj.utilities[1];
            const StateSpace space = scale.image();
            const double x = scale.x();
            const auto cands = candidate_pairs(grid, x, space);
            std::vector<std::pair<double, double>> pts(cands.size());
            std::vector<Distribution> laws(cands.size());
            for_each_candidate(cands, Execution::parallel, [&](std::size_t i) {
                laws[i] = pushforward(threshold_law(cands[i], space), scale, Direction::inverse);
                pts[i] = {eval_eu(ua, laws[i]), eval_eu(ub, laws[i])};
            });
            const auto hull = pareto_hull(pts);
            OptimReport best;
            best.value = -kInf;
            std::optional<std::pair<std::size_t, std::size_t>> best_edge;
            for (std::size_t k = 0; k < hull.size(); ++k) {
                const std::size_t i = hull[k];
                const double v =
                    std::min(ua.inverse(pts[i].first), ub.inverse(pts[i].second));
                if (v > best.value) {
                    best.value = v;
                    best.theta_star = 1.0;
                    best_edge = {i, i};
                }
                if (k + 1 < hull.size()) {
                    const std::size_t j = hull[k + 1];
                    const MixtureSolve ms = csc_mixture_from_evalues(
                        ua, ub, pts[i].first, pts[j].first, pts[i].second, pts[j].second);
                    if (ms.interior && ms.value > best.value) {
                        best.value = ms.value;
                        best.theta_star = ms.theta;
                        best.residual = ms.residual;
                        best.iterations = ms.iterations;
                        best_edge = {i, j};
                    }
                }
            }
            if (best_edge) {
                const auto [i, j] = *best_edge;
                best.mix_component1 = laws[i];
                best.mix_component2 = laws[j];
                best.target = Distribution::mix(
                    {{*best.theta_star, laws[i]}, {1.0 - *best.theta_star, laws[j]}});
                RandomizedRule r;
                r.x = x;
                r.space = space;
                if (i == j) {
                    r.atoms = {{cands[i], 1.0}};
                } else {
                    r.atoms = {{cands[i], *best.theta_star},
                               {cands[j], 1.0 - *best.theta_star}};
                }
                best.best_rule = std::move(r);
            }
            rep.randomized = std::move(best);
            break;
        }
    }
    rep.v_tr = rep.randomized.value;
    rep.gap = rep.v_tr - rep.v_tt;
    if (rep.v_tr < rep.v_tt - 1e-10) {
        throw NumericError("compare: randomized optimum fell below the pure optimum");
    }
    return rep;
}

}  // namespace stoplaw
