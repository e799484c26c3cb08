#include "stoplaw/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "stoplaw/errors.hpp"
#include "stoplaw/rng.hpp"

namespace stoplaw {

void SimConfig::validate() const {
    if (!(dt > 0.0)) throw ConfigError("sim: dt must be positive");
    if (paths < 1) throw ConfigError("sim: need at least one path");
    if (max_steps < 1) throw ConfigError("sim: need at least one step");
}

double EmpiricalLaw::mean() const {
    double s = 0.0;
    for (double v : samples) s += v;
    return samples.empty() ? 0.0 : s / static_cast<double>(samples.size());
}

double EmpiricalLaw::stddev() const {
    if (samples.size() < 2) return 0.0;
    const double m = mean();
    double s = 0.0;
    for (double v : samples) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(samples.size() - 1));
}

Distribution EmpiricalLaw::to_distribution() const {
    if (samples.empty()) throw DomainError("empirical law: no uncensored samples");
    std::vector<Atom> atoms;
    atoms.reserve(samples.size());
    const double w = 1.0 / static_cast<double>(samples.size());
    for (double v : samples) atoms.push_back({v, w});
    return Distribution::from_atoms(std::move(atoms));
}

namespace {

struct PathOutcome {
    double value = 0.0;
    bool censored = false;
};

// stop at the first exit from (lo_th, hi_th); infinite thresholds never
// trigger; attainable interval endpoints absorb (thresholds at distance zero)
PathOutcome simulate_exit(const DiffusionSpec& spec, double lo_th, double hi_th,
                          const SimConfig& cfg, Philox& rng) {
    const double lo_stop = std::max(lo_th, spec.lo);
    const double hi_stop = std::min(hi_th, spec.hi);
    const double sqrt_dt = std::sqrt(cfg.dt);
    double y = spec.start;
    if (y <= lo_stop) return {cfg.boundary == BoundaryPolicy::threshold ? lo_stop : y, false};
    if (y >= hi_stop) return {cfg.boundary == BoundaryPolicy::threshold ? hi_stop : y, false};
    for (long k = 0; k < cfg.max_steps; ++k) {
        const double g = rng.next_normal();
        y += spec.drift_at(y) * cfg.dt + spec.vol_at(y) * sqrt_dt * g;
        if (y <= lo_stop) {
            return {cfg.boundary == BoundaryPolicy::threshold ? lo_stop : y, false};
        }
        if (y >= hi_stop) {
            return {cfg.boundary == BoundaryPolicy::threshold ? hi_stop : y, false};
        }
    }
    return {y, true};
}

// Bernoulli draw of the two-point natural-scale exit law
PathOutcome exact_exit(double a_x, double b_x, double x, const ScaleMap& scale, Philox& rng) {
    double v_x;
    if (a_x == x || b_x == x) {
        v_x = x;
    } else if (b_x == kInf) {
        v_x = a_x;
    } else if (a_x == -kInf) {
        v_x = b_x;
    } else {
        const double p_lower = (b_x - x) / (b_x - a_x);
        v_x = rng.next_uniform() <= p_lower ? a_x : b_x;
    }
    return {scale.inverse(v_x), false};
}

SimResult collect(const DiffusionSpec& spec, const SimConfig& cfg,
                  const std::function<PathOutcome(long, Philox&, double&, double&)>& one_path) {
    cfg.validate();
    spec.validate();
    const long n = cfg.paths;
    std::vector<double> values(static_cast<std::size_t>(n));
    std::vector<unsigned char> censored(static_cast<std::size_t>(n));
    std::vector<PathRecord> records;
    if (cfg.record_paths) records.resize(static_cast<std::size_t>(n));

    auto body = [&](long i) {
        Philox rng(cfg.seed, static_cast<std::uint64_t>(i));
        double a = 0.0, b = 0.0;
        const PathOutcome out = one_path(i, rng, a, b);
        values[static_cast<std::size_t>(i)] = out.value;
        censored[static_cast<std::size_t>(i)] = out.censored ? 1 : 0;
        if (cfg.record_paths) {
            records[static_cast<std::size_t>(i)] = {i, a, b, out.value, out.censored};
        }
    };
    if (cfg.parallel) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) body(i);
    } else {
        for (long i = 0; i < n; ++i) body(i);
    }

    SimResult res;
    res.law.samples.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        if (censored[static_cast<std::size_t>(i)]) ++res.law.censored;
        else res.law.samples.push_back(values[static_cast<std::size_t>(i)]);
    }
    std::sort(res.law.samples.begin(), res.law.samples.end());
    res.records = std::move(records);
    return res;
}

}  // namespace

SimResult run_threshold(const DiffusionSpec& spec, const ThresholdPair& pair,
                        const SimConfig& cfg) {
    if (!(pair.a <= spec.start && spec.start <= pair.b) && !pair.is_level()) {
        throw DomainError("run_threshold: pair must straddle the start point");
    }
    if (cfg.exact_sampling) {
        const ScaleMap scale = build_scale(spec);
        const double a_x = scale.forward(std::max(pair.a, spec.lo));
        const double b_x = pair.b >= spec.hi ? scale.image().hi
                                             : scale.forward(std::min(pair.b, spec.hi));
        return collect(spec, cfg, [&](long, Philox& rng, double& a, double& b) {
            a = pair.a;
            b = pair.b;
            return exact_exit(a_x, b_x, scale.x(), scale, rng);
        });
    }
    return collect(spec, cfg, [&](long, Philox& rng, double& a, double& b) {
        a = pair.a;
        b = pair.b;
        return simulate_exit(spec, pair.a, pair.b, cfg, rng);
    });
}

SimResult run_randomized(const DiffusionSpec& spec, const RandomizedRule& rule,
                         const ScaleMap& scale, const SimConfig& cfg) {
    rule.validate();
    return collect(spec, cfg, [&](long, Philox& rng, double& a, double& b) {
        ThresholdPair p = sample_rule(rule, rng);
        a = p.a;
        b = p.b;
        // degenerate pairs mean "first hit of the level": one-sided from here
        double a_x = p.a, b_x = p.b;
        if (p.is_level()) {
            if (p.a < rule.x) b_x = kInf;
            else a_x = -kInf;
        }
        if (cfg.exact_sampling) {
            return exact_exit(a_x, b_x, rule.x, scale, rng);
        }
        const double a_y = a_x == -kInf ? -kInf : scale.inverse(a_x);
        const double b_y = b_x == kInf ? kInf : scale.inverse(b_x);
        return simulate_exit(spec, a_y, b_y, cfg, rng);
    });
}

double ks_statistic(const EmpiricalLaw& s1, const EmpiricalLaw& s2) {
    const auto& a = s1.samples;
    const auto& b = s2.samples;
    if (a.empty() || b.empty()) throw DomainError("ks: empty sample");
    double d = 0.0;
    std::size_t i = 0, j = 0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() || j < b.size()) {
        // advance both samples through the next distinct value together
        double v;
        if (i == a.size()) v = b[j];
        else if (j == b.size()) v = a[i];
        else v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_statistic(const EmpiricalLaw& s, const Distribution& target) {
    const auto& a = s.samples;
    if (a.empty()) throw DomainError("ks: empty sample");
    const double n = static_cast<double>(a.size());
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - target.cdf(a[i])));
        d = std::max(d, std::abs(static_cast<double>(i) / n - target.cdf_left(a[i])));
    }
    return d;
}

VerifyReport verify_embedding(const DiffusionSpec& spec, const Distribution& nu_y,
                              const SimConfig& cfg, const std::vector<Objective>& objectives) {
    spec.validate();
    const ScaleMap scale = build_scale(spec);
    const Distribution nu_x = pushforward(nu_y, scale, Direction::forward);
    if (!attainable(nu_x, scale.x(), scale.image())) {
        throw ConstraintError("verify_embedding: target not attainable for this diffusion");
    }
    const HallDetails det = hall_embed_details(nu_x, scale.x(), scale.image());
    const SimResult sim = run_randomized(spec, det.rule, scale, cfg);

    VerifyReport rep;
    rep.rule = det.rule;
    rep.v_star = det.v_star;
    rep.c = det.c;
    rep.censored_fraction =
        static_cast<double>(sim.law.censored) / static_cast<double>(sim.law.total());
    const Distribution emp = sim.law.to_distribution();
    rep.w1 = wasserstein1(emp, nu_y);
    const double n_eff = static_cast<double>(sim.law.samples.size());
    rep.tol = std::max(0.02, 5.0 * sim.law.stddev() / std::sqrt(std::max(n_eff, 1.0)));
    rep.pass = rep.w1 <= rep.tol && rep.censored_fraction <= 1e-3;
    for (const Objective& obj : objectives) {
        rep.objective_analytic.push_back(obj.evaluate(nu_y));
        rep.objective_empirical.push_back(obj.evaluate(emp));
    }
    return rep;
}

}  // namespace stoplaw
