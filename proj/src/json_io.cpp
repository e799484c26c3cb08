#include "stoplaw/json_io.hpp"

#include <cmath>

#include "stoplaw/errors.hpp"
#include "stoplaw/numerics.hpp"

namespace stoplaw {

json json_num(double x) {
    if (std::isnan(x)) throw NumericError("serialization: NaN value");
    if (!std::isfinite(x)) return nullptr;
    return round_sig(x, 12);
}

double num_from_json(const json& j, double infinite_as) {
    if (j.is_null()) return infinite_as;
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
        throw ConfigError("expected a number, null or \"inf\"/\"-inf\"");
    }
    if (!j.is_number()) throw ConfigError("expected a number");
    return j.get<double>();
}

// ---------------------------------------------------------------------------
// Distribution
// ---------------------------------------------------------------------------

json to_json(const Distribution& d) {
    json j;
    json atoms = json::array();
    for (const Atom& a : d.atoms()) atoms.push_back({json_num(a.z), json_num(a.mass)});
    j["atoms"] = std::move(atoms);
    j["continuous_weight"] = json_num(d.continuous_mass());
    const auto& cells = d.cells();
    if (cells.empty()) {
        j["quantile_grid"] = json::array();
        return j;
    }
    // uniform representation only when the cells are contiguous and equal mass
    bool uniform = true;
    const double m0 = cells.front().mass;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (std::abs(cells[i].mass - m0) > 1e-12 * std::max(1.0, m0)) uniform = false;
        if (i > 0 && cells[i].lo != cells[i - 1].hi) uniform = false;
    }
    if (uniform) {
        json grid = json::array();
        grid.push_back(json_num(cells.front().lo));
        for (const Cell& c : cells) grid.push_back(json_num(c.hi));
        j["quantile_grid"] = std::move(grid);
    } else {
        json cj = json::array();
        for (const Cell& c : cells) cj.push_back({json_num(c.lo), json_num(c.hi), json_num(c.mass)});
        j["cells"] = std::move(cj);
    }
    return j;
}

Distribution distribution_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("distribution: expected an object");
    std::vector<Atom> atoms;
    if (j.contains("atoms")) {
        for (const auto& e : j.at("atoms")) {
            atoms.push_back({num_from_json(e.at(0), kInf), e.at(1).get<double>()});
        }
    }
    std::vector<Cell> cells;
    if (j.contains("cells")) {
        for (const auto& e : j.at("cells")) {
            cells.push_back({e.at(0).get<double>(), e.at(1).get<double>(), e.at(2).get<double>()});
        }
    } else if (j.contains("quantile_grid") && !j.at("quantile_grid").empty()) {
        const auto& grid = j.at("quantile_grid");
        if (grid.size() < 2) throw ConfigError("distribution: quantile_grid needs >= 2 nodes");
        const double w = j.value("continuous_weight", 0.0);
        const int n = static_cast<int>(grid.size()) - 1;
        for (int k = 0; k < n; ++k) {
            cells.push_back({grid.at(static_cast<std::size_t>(k)).get<double>(),
                             grid.at(static_cast<std::size_t>(k) + 1).get<double>(), w / n});
        }
    }
    return Distribution::from_components(std::move(atoms), std::move(cells));
}

// ---------------------------------------------------------------------------
// Diffusion
// ---------------------------------------------------------------------------

namespace {

json coef_to_json(const CoefSpec& c) {
    json j;
    switch (c.kind) {
        case CoefSpec::Kind::constant:
            j["kind"] = "constant";
            j["value"] = json_num(c.value);
            break;
        case CoefSpec::Kind::linear:
            j["kind"] = "linear";
            j["value"] = json_num(c.value);
            break;
        case CoefSpec::Kind::table: {
            j["kind"] = "expr-table";
            json t = json::array();
            for (const auto& [z, v] : c.table) t.push_back({json_num(z), json_num(v)});
            j["table"] = std::move(t);
            break;
        }
    }
    return j;
}

CoefSpec coef_from_json(const json& j) {
    CoefSpec c;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        c.kind = CoefSpec::Kind::constant;
        c.value = j.at("value").get<double>();
    } else if (kind == "linear") {
        c.kind = CoefSpec::Kind::linear;
        c.value = j.at("value").get<double>();
    } else if (kind == "expr-table" || kind == "table") {
        c.kind = CoefSpec::Kind::table;
        for (const auto& e : j.at("table")) {
            c.table.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
        }
        if (c.table.size() < 2) throw ConfigError("coefficient table needs >= 2 points");
    } else {
        throw ConfigError("coefficient: unknown kind '" + kind + "'");
    }
    return c;
}

}  // namespace

json to_json(const DiffusionSpec& spec) {
    json j;
    j["drift"] = coef_to_json(spec.drift);
    j["vol"] = coef_to_json(spec.vol);
    j["interval"] = {json_num(spec.lo), json_num(spec.hi)};
    j["start"] = json_num(spec.start);
    return j;
}

DiffusionSpec diffusion_from_json(const json& j) {
    DiffusionSpec spec;
    spec.drift = coef_from_json(j.at("drift"));
    spec.vol = coef_from_json(j.at("vol"));
    if (j.contains("interval")) {
        spec.lo = num_from_json(j.at("interval").at(0), -kInf);
        spec.hi = num_from_json(j.at("interval").at(1), kInf);
    }
    spec.start = j.at("start").get<double>();
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// Rules
// ---------------------------------------------------------------------------

json to_json(const RandomizedRule& rule) {
    json j;
    j["x"] = json_num(rule.x);
    j["space"] = {json_num(rule.space.lo), json_num(rule.space.hi)};
    json atoms = json::array();
    for (const RuleAtom& a : rule.atoms) {
        atoms.push_back({{"a", json_num(a.pair.a)}, {"b", json_num(a.pair.b)},
                         {"mass", json_num(a.mass)}});
    }
    j["atoms"] = std::move(atoms);
    if (rule.one_sided) {
        j["one_sided"] = {{"side", rule.one_sided->upper_infinite ? "upper-infinite"
                                                                  : "lower-infinite"},
                          {"levels", to_json(rule.one_sided->levels)}};
    }
    if (rule.band) {
        j["band"] = {{"lower", to_json(rule.band->lower)},
                     {"upper", to_json(rule.band->upper)},
                     {"c", json_num(rule.band->c)}};
    }
    if (rule.hit_level) j["hit_level"] = to_json(*rule.hit_level);
    return j;
}

RandomizedRule rule_from_json(const json& j) {
    RandomizedRule rule;
    rule.x = j.at("x").get<double>();
    rule.space.lo = num_from_json(j.at("space").at(0), -kInf);
    rule.space.hi = num_from_json(j.at("space").at(1), kInf);
    if (j.contains("atoms")) {
        for (const auto& e : j.at("atoms")) {
            RuleAtom a;
            a.pair.a = num_from_json(e.at("a"), -kInf);
            a.pair.b = num_from_json(e.at("b"), kInf);
            a.pair.x = rule.x;
            a.mass = e.at("mass").get<double>();
            rule.atoms.push_back(a);
        }
    }
    if (j.contains("one_sided")) {
        OneSidedComponent os;
        os.upper_infinite = j.at("one_sided").at("side").get<std::string>() == "upper-infinite";
        os.levels = distribution_from_json(j.at("one_sided").at("levels"));
        rule.one_sided = std::move(os);
    }
    if (j.contains("band")) {
        BandComponent band;
        band.lower = distribution_from_json(j.at("band").at("lower"));
        band.upper = distribution_from_json(j.at("band").at("upper"));
        band.c = j.at("band").at("c").get<double>();
        band.x = rule.x;
        rule.band = std::move(band);
    }
    if (j.contains("hit_level")) rule.hit_level = distribution_from_json(j.at("hit_level"));
    rule.validate();
    return rule;
}

// ---------------------------------------------------------------------------
// Objectives
// ---------------------------------------------------------------------------

json to_json(const Utility& u) {
    json j;
    j["family"] = u.family();
    if (u.family() == "power") {
        j["coefficient"] = json_num(u.params()[0].first);
        j["exponent"] = json_num(u.params()[0].second);
    } else if (u.family() == "exponential") {
        j["alpha"] = json_num(u.params()[0].first);
    } else if (u.family() == "piecewise_linear") {
        json knots = json::array();
        for (const auto& [z, v] : u.params()) knots.push_back({json_num(z), json_num(v)});
        j["knots"] = std::move(knots);
    } else if (u.family() != "identity") {
        throw ConfigError("utility: family '" + u.family() + "' has no serial form");
    }
    return j;
}

Utility utility_from_json(const json& j) {
    const std::string family = j.at("family").get<std::string>();
    if (family == "identity") return Utility::identity();
    if (family == "power") {
        return Utility::power(j.value("coefficient", 1.0), j.at("exponent").get<double>());
    }
    if (family == "square_root" || family == "sqrt") {
        return Utility::square_root(j.value("coefficient", 1.0));
    }
    if (family == "exponential") return Utility::exponential(j.at("alpha").get<double>());
    if (family == "piecewise_linear") {
        std::vector<std::pair<double, double>> knots;
        for (const auto& e : j.at("knots")) {
            knots.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
        }
        return Utility::piecewise_linear(std::move(knots));
    }
    throw ConfigError("utility: unknown family '" + family + "'");
}

json to_json(const Weighting& w) {
    json j;
    j["family"] = w.family();
    if (w.family() == "power") j["gamma"] = json_num(w.param());
    else if (w.family() != "identity") {
        throw ConfigError("weighting: family '" + w.family() + "' has no serial form");
    }
    return j;
}

Weighting weighting_from_json(const json& j) {
    const std::string family = j.at("family").get<std::string>();
    if (family == "identity") return Weighting::identity();
    if (family == "power") return Weighting::power(j.at("gamma").get<double>());
    throw ConfigError("weighting: unknown family '" + family + "'");
}

json to_json(const Objective& obj) {
    json j;
    switch (obj.kind) {
        case Objective::Kind::eu:
            j["kind"] = "eu";
            j["utility"] = to_json(obj.utilities[0]);
            break;
        case Objective::Kind::rdu:
            j["kind"] = "rdu";
            j["utility"] = to_json(obj.utilities[0]);
            j["weighting"] = to_json(*obj.weighting);
            break;
        case Objective::Kind::csc: {
            j["kind"] = "csc";
            json us = json::array();
            for (const Utility& u : obj.utilities) us.push_back(to_json(u));
            j["utilities"] = std::move(us);
            break;
        }
    }
    return j;
}

Objective objective_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "eu") return Objective::make_eu(utility_from_json(j.at("utility")));
    if (kind == "rdu") {
        return Objective::make_rdu(utility_from_json(j.at("utility")),
                                   weighting_from_json(j.at("weighting")));
    }
    if (kind == "csc") {
        std::vector<Utility> us;
        for (const auto& e : j.at("utilities")) us.push_back(utility_from_json(e));
        return Objective::make_csc(std::move(us));
    }
    throw ConfigError("objective: unknown kind '" + kind + "'");
}

SimConfig sim_config_from_json(const json& j) {
    SimConfig cfg;
    cfg.dt = j.value("dt", cfg.dt);
    cfg.max_steps = j.value("max_steps", cfg.max_steps);
    cfg.paths = j.value("paths", cfg.paths);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.exact_sampling = j.value("exact_sampling", cfg.exact_sampling);
    cfg.record_paths = j.value("record_paths", cfg.record_paths);
    cfg.parallel = j.value("parallel", cfg.parallel);
    if (j.contains("boundary")) {
        const std::string b = j.at("boundary").get<std::string>();
        if (b == "threshold") cfg.boundary = BoundaryPolicy::threshold;
        else if (b == "overshoot") cfg.boundary = BoundaryPolicy::overshoot;
        else throw ConfigError("sim: unknown boundary policy '" + b + "'");
    }
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

json to_json(const OptimReport& rep) {
    json j;
    j["value"] = json_num(rep.value);
    if (rep.best_pair) {
        j["best_pair"] = {{"a", json_num(rep.best_pair->a)}, {"b", json_num(rep.best_pair->b)}};
    }
    if (rep.lambda_star) j["lambda_star"] = json_num(*rep.lambda_star);
    if (rep.theta_star) j["theta_star"] = json_num(*rep.theta_star);
    if (rep.best_rule) j["rule"] = to_json(*rep.best_rule);
    if (rep.target) j["target"] = to_json(*rep.target);
    if (rep.mix_component1) j["mix_component1"] = to_json(*rep.mix_component1);
    if (rep.mix_component2) j["mix_component2"] = to_json(*rep.mix_component2);
    j["iterations"] = rep.iterations;
    j["residual"] = json_num(rep.residual);
    if (rep.budget_gap != 0.0) j["budget_gap"] = json_num(rep.budget_gap);
    if (rep.prospect_analytic != 0.0) j["prospect_analytic"] = json_num(rep.prospect_analytic);
    if (rep.warning_nonconcave) j["warning_nonconcave"] = true;
    return j;
}

json to_json(const CompareReport& rep) {
    json j;
    j["v_star_TT"] = json_num(rep.v_tt);
    j["v_star_TR"] = json_num(rep.v_tr);
    j["gap"] = json_num(rep.gap);
    json pure = to_json(rep.pure);
    if (pure.contains("best_pair")) j["best_pure_rule"] = pure["best_pair"];
    json rnd = to_json(rep.randomized);
    if (rnd.contains("rule")) j["best_randomized_rule"] = rnd["rule"];
    j["pure"] = std::move(pure);
    j["randomized"] = std::move(rnd);
    return j;
}

json to_json(const VerifyReport& rep) {
    json j;
    j["pass"] = rep.pass;
    j["w1"] = json_num(rep.w1);
    j["tol"] = json_num(rep.tol);
    j["censored_fraction"] = json_num(rep.censored_fraction);
    j["v_star"] = json_num(rep.v_star);
    j["c"] = json_num(rep.c);
    json objs = json::array();
    for (std::size_t i = 0; i < rep.objective_analytic.size(); ++i) {
        objs.push_back({{"analytic", json_num(rep.objective_analytic[i])},
                        {"empirical", json_num(rep.objective_empirical[i])}});
    }
    j["objectives"] = std::move(objs);
    j["rule"] = to_json(rep.rule);
    return j;
}

}  // namespace stoplaw
