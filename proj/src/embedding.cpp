#include "stoplaw/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "stoplaw/errors.hpp"

namespace stoplaw {

double BandComponent::tilt_upper() const { return upper.mean_gap_above(x); }

double BandComponent::tilt_lower() const { return lower.mean_gap_below(x); }

double BandComponent::mass(double x_ref) const {
    (void)x_ref;
    return lower.total_mass() * (tilt_upper() / c) + upper.total_mass() * (tilt_lower() / c);
}

double RandomizedRule::total_mass() const {
    double m = 0.0;
    for (const RuleAtom& a : atoms) m += a.mass;
    if (one_sided) m += one_sided->levels.total_mass();
    if (band) m += band->mass(x);
    if (hit_level) m += hit_level->total_mass();
    return m;
}

void RandomizedRule::validate() const {
    for (const RuleAtom& a : atoms) {
        if (!(a.mass >= 0.0)) throw ConstraintError("rule: negative pair mass");
        ThresholdPair p = a.pair;
        p.x = x;
        p.validate(space);
    }
    if (one_sided) {
        const auto& os = *one_sided;
        if (os.upper_infinite) {
            if (space.hi != kInf) {
                throw ConstraintError("rule: (a, +inf) pairs need an unbounded-above space");
            }
            if (!os.levels.empty() &&
                (os.levels.max_support() > x || os.levels.min_support() < space.lo)) {
                throw ConstraintError("rule: one-sided levels must lie in [lo, x]");
            }
        } else {
            if (space.lo != -kInf) {
                throw ConstraintError("rule: (-inf, b) pairs need an unbounded-below space");
            }
            if (!os.levels.empty() &&
                (os.levels.min_support() < x || os.levels.max_support() > space.hi)) {
                throw ConstraintError("rule: one-sided levels must lie in [x, hi]");
            }
        }
    }
    if (band) {
        const auto& bd = *band;
        if (bd.lower.empty() || bd.upper.empty() || !(bd.c > 0.0)) {
            throw ConstraintError("rule: band needs non-empty factors and c > 0");
        }
        if (bd.lower.max_support() > x || bd.upper.min_support() < x) {
            throw ConstraintError("rule: band factors must sit on opposite sides of x");
        }
        if (bd.lower.min_support() < space.lo || bd.upper.max_support() > space.hi) {
            throw ConstraintError("rule: band support outside the state space");
        }
        if (!std::isfinite(bd.lower.min_support()) || !std::isfinite(bd.upper.max_support())) {
            throw ConstraintError("rule: band factors must have finite support");
        }
    }
    if (hit_level) {
        if (space.tag() != CaseTag::whole_line) {
            throw ConstraintError("rule: level component only exists on the whole line");
        }
    }
    const double m = total_mass();
    if (std::abs(m - 1.0) > 1e-9) {
        throw ConstraintError("rule: total mass must be 1");
    }
}

bool attainable(const Distribution& nu, double x, const StateSpace& space, double tol) {
    if (!nu.is_probability(1e-9)) {
        throw DomainError("attainable: argument must be a probability law");
    }
    const double scale = std::max({1.0, std::abs(x), std::abs(nu.barycenter())});
    if (std::isfinite(space.lo) && nu.min_support() < space.lo - tol * scale) return false;
    if (std::isfinite(space.hi) && nu.max_support() > space.hi + tol * scale) return false;
    const double mean = nu.barycenter();
    switch (space.tag()) {
        case CaseTag::bounded_below: return mean <= x + tol * scale;
        case CaseTag::bounded_above: return mean >= x - tol * scale;
        case CaseTag::bounded: return std::abs(mean - x) <= tol * scale;
        case CaseTag::whole_line: return true;
    }
    return false;
}

namespace {

// Root of f(v) = \int_v^1 [G(w) - x] dw on [0, 1). The integrand walk is
// exact: f is linear across an atom's quantile span and quadratic across a
// cell's, so the crossing segment is solved in closed form. Returns 1.0 when
// no interior crossing exists (the whole law sits at or below x).
double solve_v_star(const Distribution& nu, double x) {
    const double total = nu.total_mass();
    auto f_at = [&](double v) { return nu.tail_quantile_integral(v) - x * (total - v); };
    // barycenters equal to x up to rounding noise embed as a pure band
    const double scale = std::max(1.0, std::abs(x));
    if (f_at(0.0) >= -1e-13 * scale) return 0.0;
    double u0 = 0.0;
    double f0 = f_at(0.0);
    for (const QuantilePiece& p : nu.pieces()) {
        const double f1 = f_at(p.u1);
        if (f0 < 0.0 && f1 >= 0.0) {
            if (p.is_atom()) {
                const double slope = x - p.z0;  // f' on the atom span
                if (slope <= 0.0) return p.u1;  // flat or falling: crossing at the top
                return p.u0 + (-f0) / slope;
            }
            // cell: f(u0 + w) = f0 + (x - z0) w - dz/du * w^2 / 2
            const double du = p.u1 - p.u0, dz = p.z1 - p.z0;
            const double a2 = -0.5 * dz / du, b1 = x - p.z0, c0 = f0;
            const double disc = b1 * b1 - 4.0 * a2 * c0;
            if (disc < 0.0) return p.u1;
            const double sq = std::sqrt(disc);
            // the (-) root is the first upward crossing for a2 < 0
            double w = a2 != 0.0 ? (-b1 + sq) / (2.0 * a2) : -c0 / b1;
            if (!(w >= 0.0 && w <= du)) {
                w = a2 != 0.0 ? (-b1 - sq) / (2.0 * a2) : w;
            }
            w = std::clamp(w, 0.0, du);
            return p.u0 + w;
        }
        u0 = p.u1;
        f0 = f1;
    }
    (void)u0;
    return 1.0;  // lim G <= x: everything is embedded one-sidedly
}

HallDetails embed_bounded_below(const Distribution& nu, double x, const StateSpace& space) {
    HallDetails det;
    RandomizedRule& rule = det.rule;
    rule.x = x;
    rule.space = space;

    // point mass at the start: stop immediately
    if (nu.purely_atomic() && nu.atoms().size() == 1 && nu.atoms()[0].z == x) {
        rule.atoms.push_back({{x, x, x}, 1.0});
        det.z_star = x;
        det.nu1 = nu;
        return det;
    }

    const double v_star = space.tag() == CaseTag::bounded ? 0.0 : solve_v_star(nu, x);
    det.v_star = v_star;
    if (v_star >= 1.0) {
        det.nu0 = nu;
    } else if (v_star <= 0.0) {
        det.nu1 = nu;
    } else {
        std::tie(det.nu0, det.nu1) = nu.restrict_and_split(v_star);
    }
    det.z_star = v_star >= 1.0 ? nu.max_support() : nu.quantile_at_mass(v_star);

    Distribution lower = det.nu1.restrict_range(-kInf, x, true, true);
    Distribution upper = det.nu1.restrict_range(x, kInf, false, true);
    // c computed from the upper factor itself so that the pushforward weight
    // \int (b-x) upper / c recombines to exactly 1
    const double c = upper.mean_gap_above(x);
    det.c = c;

    if (nu.purely_atomic()) {
        for (const Atom& a : det.nu0.atoms()) {
            rule.atoms.push_back({{a.z, kInf, x}, a.mass});
        }
        if (upper.empty()) {
            // residual nu1 mass (if any) sits exactly at x: stop now
            for (const Atom& a : lower.atoms()) {
                rule.atoms.push_back({{x, x, x}, a.mass});
            }
        } else {
            for (const Atom& a : lower.atoms()) {
                for (const Atom& b : upper.atoms()) {
                    rule.atoms.push_back({{a.z, b.z, x}, a.mass * b.mass * (b.z - a.z) / c});
                }
            }
        }
        return det;
    }

    if (!det.nu0.empty()) {
        rule.one_sided = OneSidedComponent{det.nu0, true};
    }
    if (upper.empty()) {
        if (!lower.empty()) {
            // all of nu1 at x
            rule.atoms.push_back({{x, x, x}, lower.total_mass()});
        }
    } else {
        BandComponent band;
        band.lower = std::move(lower);
        band.upper = std::move(upper);
        band.c = c;
        band.x = x;
        rule.band = std::move(band);
    }
    return det;
}

RandomizedRule reflect_rule(const RandomizedRule& r, double x, const StateSpace& space) {
    RandomizedRule out;
    out.x = x;
    out.space = space;
    for (const RuleAtom& a : r.atoms) {
        const double na = -a.pair.b, nb = -a.pair.a;
        out.atoms.push_back({{na, nb, x}, a.mass});
    }
    if (r.one_sided) {
        out.one_sided = OneSidedComponent{r.one_sided->levels.reflected(), false};
    }
    if (r.band) {
        BandComponent band;
        band.lower = r.band->upper.reflected();
        band.upper = r.band->lower.reflected();
        band.c = r.band->c;
        band.x = x;
        out.band = std::move(band);
    }
    if (r.hit_level) out.hit_level = r.hit_level->reflected();
    return out;
}

}  // namespace

HallDetails hall_embed_details(const Distribution& nu, double x, const StateSpace& space) {
    if (!attainable(nu, x, space)) {
        const double mean = nu.barycenter();
        if (space.tag() == CaseTag::bounded_below && mean > x) {
            throw ConstraintError("barycenter exceeds start");
        }
        if (space.tag() == CaseTag::bounded_above && mean < x) {
            throw ConstraintError("barycenter below start");
        }
        if (space.tag() == CaseTag::bounded && mean != x) {
            throw ConstraintError("barycenter differs from start");
        }
        throw ConstraintError("target law not attainable: support outside the state space");
    }
    switch (space.tag()) {
        case CaseTag::bounded_below:
        case CaseTag::bounded:
            return embed_bounded_below(nu, x, space);
        case CaseTag::bounded_above: {
            const StateSpace mirrored{-space.hi, -space.lo};
            HallDetails det = embed_bounded_below(nu.reflected(), -x, mirrored);
            det.rule = reflect_rule(det.rule, x, space);
            det.z_star = -det.z_star;
            det.nu0 = det.nu0.empty() ? det.nu0 : det.nu0.reflected();
            det.nu1 = det.nu1.empty() ? det.nu1 : det.nu1.reflected();
            return det;
        }
        case CaseTag::whole_line: {
            HallDetails det;
            RandomizedRule& rule = det.rule;
            rule.x = x;
            rule.space = space;
            if (nu.purely_atomic()) {
                for (const Atom& a : nu.atoms()) {
                    if (a.z == x) rule.atoms.push_back({{x, x, x}, a.mass});
                    else rule.atoms.push_back({{a.z, a.z, x}, a.mass});
                }
            } else {
                rule.hit_level = nu;
            }
            return det;
        }
    }
    throw NumericError("hall_embed: unreachable");
}

RandomizedRule hall_embed(const Distribution& nu, double x, const StateSpace& space) {
    return hall_embed_details(nu, x, space).rule;
}

Distribution rule_pushforward(const RandomizedRule& rule) {
    std::vector<std::pair<double, Distribution>> parts;
    std::vector<Atom> atom_masses;
    const double x = rule.x;
    for (const RuleAtom& ra : rule.atoms) {
        const ThresholdPair& p = ra.pair;
        if (p.a == x || p.b == x) {
            atom_masses.push_back({x, ra.mass});
        } else if (p.a == p.b) {
            atom_masses.push_back({p.a, ra.mass});
        } else if (p.b == kInf) {
            atom_masses.push_back({p.a, ra.mass});
        } else if (p.a == -kInf) {
            atom_masses.push_back({p.b, ra.mass});
        } else {
            const TwoPointLaw tp{p.a, p.b, x};
            atom_masses.push_back({p.a, ra.mass * tp.mass_at_a()});
            atom_masses.push_back({p.b, ra.mass * tp.mass_at_b()});
        }
    }
    if (!atom_masses.empty()) {
        parts.emplace_back(1.0, Distribution::from_atoms(std::move(atom_masses)));
    }
    if (rule.one_sided) parts.emplace_back(1.0, rule.one_sided->levels);
    if (rule.hit_level) parts.emplace_back(1.0, *rule.hit_level);
    if (rule.band) {
        const auto& bd = *rule.band;
        parts.emplace_back(bd.tilt_upper() / bd.c, bd.lower);
        parts.emplace_back(bd.tilt_lower() / bd.c, bd.upper);
    }
    return Distribution::mix(parts);
}

namespace {

// draw from a sub-measure weighted by the linear tilt |z - x| (the support
// lies entirely on one side of x)
double sample_tilted(const Distribution& m, double x, double total_tilt, Philox& rng) {
    double target = rng.next_uniform() * total_tilt;
    for (const QuantilePiece& p : m.pieces()) {
        double w;
        if (p.is_atom()) {
            w = p.mass() * std::abs(p.z0 - x);
        } else {
            w = p.mass() * std::abs(0.5 * (p.z0 + p.z1) - x);
        }
        if (target <= w || &p == &m.pieces().back()) {
            if (p.is_atom()) return p.z0;
            const double t = std::clamp(w > 0.0 ? target / w : 0.5, 0.0, 1.0);
            const double lo = p.z0, hi = p.z1;
            // inverse CDF of a linear density on [lo, hi]
            if (lo >= x) {
                return x + std::sqrt((1.0 - t) * (lo - x) * (lo - x) + t * (hi - x) * (hi - x));
            }
            return x - std::sqrt((1.0 - t) * (x - lo) * (x - lo) + t * (x - hi) * (x - hi));
        }
        target -= w;
    }
    return m.max_support();
}

double sample_plain(const Distribution& m, Philox& rng) {
    return m.quantile_at_mass(rng.next_uniform() * m.total_mass());
}

}  // namespace

ThresholdPair sample_rule(const RandomizedRule& rule, Philox& rng) {
    const double u = rng.next_uniform() * rule.total_mass();
    double acc = 0.0;
    for (const RuleAtom& a : rule.atoms) {
        acc += a.mass;
        if (u <= acc) {
            ThresholdPair p = a.pair;
            p.x = rule.x;
            return p;
        }
    }
    if (rule.one_sided) {
        acc += rule.one_sided->levels.total_mass();
        if (u <= acc) {
            const double level = sample_plain(rule.one_sided->levels, rng);
            if (rule.one_sided->upper_infinite) return {level, kInf, rule.x};
            return {-kInf, level, rule.x};
        }
    }
    if (rule.hit_level) {
        acc += rule.hit_level->total_mass();
        if (u <= acc) {
            const double level = sample_plain(*rule.hit_level, rng);
            return {level, level, rule.x};
        }
    }
    if (rule.band) {
        const auto& bd = *rule.band;
        const double w_lower_plain = bd.lower.total_mass() * (bd.tilt_upper() / bd.c);
        const double w_upper_plain = bd.upper.total_mass() * (bd.tilt_lower() / bd.c);
        const double v = rng.next_uniform() * (w_lower_plain + w_upper_plain);
        double a, b;
        if (v <= w_lower_plain) {
            a = sample_plain(bd.lower, rng);
            b = sample_tilted(bd.upper, rule.x, bd.tilt_upper(), rng);
        } else {
            a = sample_tilted(bd.lower, rule.x, bd.tilt_lower(), rng);
            b = sample_plain(bd.upper, rng);
        }
        return {a, b, rule.x};
    }
    // mass accounting drift: fall back to the last atom
    if (!rule.atoms.empty()) {
        ThresholdPair p = rule.atoms.back().pair;
        p.x = rule.x;
        return p;
    }
    throw NumericError("sample_rule: empty rule");
}

namespace {

// equal-mass midpoint-quantile discretization of a sub-measure
Distribution atomize(const Distribution& m, int n) {
    if (m.empty()) return m;
    if (m.purely_atomic() && static_cast<int>(m.atoms().size()) <= n) return m;
    std::vector<Atom> atoms;
    atoms.reserve(static_cast<std::size_t>(n));
    const double total = m.total_mass();
    for (int k = 0; k < n; ++k) {
        const double u = (k + 0.5) / n * total;
        atoms.push_back({m.quantile_at_mass(u), total / n});
    }
    return Distribution::from_atoms(std::move(atoms));
}

}  // namespace

RandomizedRule approximate_by_atoms(const RandomizedRule& rule, int n) {
    if (n < 1) throw DomainError("approximate_by_atoms: n must be >= 1");
    if (rule.purely_atomic()) return rule;
    RandomizedRule out;
    out.x = rule.x;
    out.space = rule.space;
    out.atoms = rule.atoms;
    if (rule.one_sided) {
        const Distribution levels = atomize(rule.one_sided->levels, n);
        for (const Atom& a : levels.atoms()) {
            if (rule.one_sided->upper_infinite) out.atoms.push_back({{a.z, kInf, rule.x}, a.mass});
            else out.atoms.push_back({{-kInf, a.z, rule.x}, a.mass});
        }
    }
    if (rule.hit_level) {
        const Distribution levels = atomize(*rule.hit_level, n);
        for (const Atom& a : levels.atoms()) {
            if (a.z == rule.x) out.atoms.push_back({{rule.x, rule.x, rule.x}, a.mass});
            else out.atoms.push_back({{a.z, a.z, rule.x}, a.mass});
        }
    }
    if (rule.band) {
        const Distribution lo = atomize(rule.band->lower, n);
        const Distribution hi = atomize(rule.band->upper, n);
        const double c = rule.band->c;
        for (const Atom& a : lo.atoms()) {
            for (const Atom& b : hi.atoms()) {
                out.atoms.push_back({{a.z, b.z, rule.x}, a.mass * b.mass * (b.z - a.z) / c});
            }
        }
    }
    // re-normalize: factor discretization perturbs the band mass slightly
    double total = 0.0;
    for (const RuleAtom& a : out.atoms) total += a.mass;
    if (total > 0.0) {
        for (RuleAtom& a : out.atoms) a.mass /= total;
    }
    return out;
}

}  // namespace stoplaw
