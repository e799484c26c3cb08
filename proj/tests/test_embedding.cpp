#include <doctest.h>

#include <cmath>
#include <map>

#include "stoplaw/embedding.hpp"
#include "stoplaw/errors.hpp"

using namespace stoplaw;

namespace {

const StateSpace kHalfLine{0.0, kInf};
const StateSpace kWholeLine{-kInf, kInf};

// attainable purely atomic law for the given case, <= max_atoms atoms
Distribution random_attainable(Philox& rng, const StateSpace& space, double x,
                               int max_atoms = 50) {
    const int k = 1 + static_cast<int>(rng.next_uniform() * max_atoms);
    std::vector<Atom> atoms(static_cast<std::size_t>(k));
    const double lo = std::isfinite(space.lo) ? space.lo : x - 10.0;
    const double hi = std::isfinite(space.hi) ? space.hi : x + 10.0;
    double total = 0.0;
    for (auto& a : atoms) {
        a.z = lo + (hi - lo) * rng.next_uniform();
        a.mass = 0.02 + rng.next_uniform();
        total += a.mass;
    }
    for (auto& a : atoms) a.mass /= total;
    Distribution d = Distribution::from_atoms(atoms);
    const double mean = d.barycenter();
    switch (space.tag()) {
        case CaseTag::whole_line:
            return d;
        case CaseTag::bounded_below: {
            // scale toward lo until the mean is a fraction of x - lo
            const double target = space.lo + (x - space.lo) * (0.3 + 0.7 * rng.next_uniform());
            const double f = (target - space.lo) / (mean - space.lo);
            std::vector<Atom> out;
            for (const Atom& a : d.atoms()) out.push_back({space.lo + f * (a.z - space.lo), a.mass});
            return Distribution::from_atoms(std::move(out));
        }
        case CaseTag::bounded_above: {
            const double target = space.hi - (space.hi - x) * (0.3 + 0.7 * rng.next_uniform());
            const double f = (space.hi - target) / (space.hi - mean);
            std::vector<Atom> out;
            for (const Atom& a : d.atoms()) out.push_back({space.hi - f * (space.hi - a.z), a.mass});
            return Distribution::from_atoms(std::move(out));
        }
        case CaseTag::bounded: {
            // contract around x until the mean pins to x and stays inside
            double f = 1.0;
            if (mean != x) {
                const double room = mean > x ? (x - space.lo) / (mean - space.lo)
                                             : (space.hi - x) / (space.hi - mean);
                f = std::min(0.95 * room, 1.0);
            }
            std::vector<Atom> out;
            for (const Atom& a : d.atoms()) out.push_back({x + f * (a.z - mean), a.mass});
            return Distribution::from_atoms(std::move(out));
        }
    }
    return d;
}

double max_atom_error(const Distribution& got, const Distribution& want) {
    double err = 0.0;
    for (const Atom& a : want.atoms()) err = std::max(err, std::abs(got.mass_at(a.z) - a.mass));
    for (const Atom& a : got.atoms()) err = std::max(err, std::abs(want.mass_at(a.z) - a.mass));
    return err;
}

}  // namespace

TEST_CASE("threshold laws") {
    CHECK(threshold_law({0.0, 2.0, 1.0}, kHalfLine).mass_at(0.0) == 0.5);
    const Distribution chi = threshold_law({0.0, 3.0, 2.0}, kHalfLine);
    CHECK(chi.mass_at(0.0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(chi.mass_at(3.0) == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(threshold_law({0.0, kInf, 2.0}, kHalfLine).mass_at(0.0) == 1.0);
    CHECK(threshold_law({1.0, 5.0, 1.0}, kHalfLine).mass_at(1.0) == 1.0);  // stop now
    CHECK(threshold_law({-1.0, -1.0, 0.0}, kWholeLine).mass_at(-1.0) == 1.0);
    CHECK_THROWS_AS((void)threshold_law({-kInf, kInf, 0.0}, kWholeLine), ConstraintError);
    CHECK_THROWS_AS((void)threshold_law({0.5, 0.5, 1.0}, kHalfLine), ConstraintError);
}

TEST_CASE("attainability per case") {
    const Distribution mean15 = Distribution::from_atoms({{0.0, 0.5}, {3.0, 0.5}});
    CHECK(attainable(mean15, 2.0, kHalfLine));
    CHECK_FALSE(attainable(Distribution::point(2.0), 1.0, kHalfLine));
    const StateSpace box{0.0, 2.0};
    CHECK(attainable(Distribution::from_atoms({{0.0, 0.5}, {2.0, 0.5}}), 1.0, box));
    CHECK_FALSE(attainable(Distribution::from_atoms({{0.0, 0.6}, {2.0, 0.4}}), 1.0, box));
    CHECK(attainable(Distribution::point(7.0), 1.0, kWholeLine));
    CHECK_FALSE(attainable(mean15, 2.0, StateSpace{1.0, kInf}));  // support below lo
}

TEST_CASE("the worked embedding instance is exact") {
    const Distribution nu = Distribution::from_atoms({{0.0, 0.5}, {3.0, 0.5}});
    const HallDetails det = hall_embed_details(nu, 2.0, kHalfLine);
    CHECK(det.v_star == 0.25);
    CHECK(det.z_star == 0.0);
    CHECK(det.c == 0.5);
    REQUIRE(det.nu0.atoms().size() == 1);
    CHECK(det.nu0.atoms()[0].mass == 0.25);
    CHECK(det.nu1.barycenter() == doctest::Approx(2.0 * 0.75).epsilon(1e-15));  // mass .75, mean 2

    std::map<std::pair<double, double>, double> pairs;
    for (const RuleAtom& a : det.rule.atoms) pairs[{a.pair.a, a.pair.b}] += a.mass;
    REQUIRE(pairs.size() == 2);
    CHECK(pairs.at({0.0, kInf}) == 0.25);
    CHECK(pairs.at({0.0, 3.0}) == 0.75);

    const Distribution back = rule_pushforward(det.rule);
    CHECK(max_atom_error(back, nu) <= 1e-15);
}

TEST_CASE("mean-preserving two-point targets recover the pure rule") {
    Philox rng(21, 0);
    for (int t = 0; t < 100; ++t) {
        const double a = 5.0 * rng.next_uniform();
        const double b = a + 0.1 + 5.0 * rng.next_uniform();
        const double x = a + (b - a) * (0.05 + 0.9 * rng.next_uniform());
        const Distribution nu = TwoPointLaw{a, b, x}.to_distribution();
        const RandomizedRule rule = hall_embed(nu, x, kHalfLine);
        REQUIRE(rule.atoms.size() == 1);
        CHECK(rule.atoms[0].pair.a == a);
        CHECK(rule.atoms[0].pair.b == b);
        CHECK(std::abs(rule.atoms[0].mass - 1.0) <= 1e-12);
        CHECK(std::abs(rule.total_mass() - 1.0) <= 1e-12);
    }
}

TEST_CASE("point target stops immediately") {
    const RandomizedRule rule = hall_embed(Distribution::point(2.0), 2.0, kHalfLine);
    REQUIRE(rule.atoms.size() == 1);
    CHECK(rule.atoms[0].pair.stop_now());
    CHECK(rule.atoms[0].mass == 1.0);
    CHECK(rule_pushforward(rule).mass_at(2.0) == 1.0);
}

TEST_CASE("pushforward of a hand-built mixture") {
    RandomizedRule rule;
    rule.x = 2.0;
    rule.space = kHalfLine;
    rule.atoms = {{{0.0, kInf, 2.0}, 0.25}, {{0.0, 3.0, 2.0}, 0.75}};
    const Distribution law = rule_pushforward(rule);
    CHECK(law.mass_at(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(law.mass_at(3.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("construction identities hold on random targets") {
    Philox rng(22, 0);
    for (int t = 0; t < 100; ++t) {
        const double x = 0.5 + 3.0 * rng.next_uniform();
        const Distribution nu = random_attainable(rng, kHalfLine, x, 20);
        const HallDetails det = hall_embed_details(nu, x, kHalfLine);
        if (det.v_star >= 1.0) continue;
        const double lower = det.nu1.restrict_range(-kInf, x, true, true).total_mass();
        const double upper = det.nu1.restrict_range(x, kInf, false, true).total_mass();
        // mass identity v* + nu1[z*,x] + nu1(x,inf) = 1
        CHECK(std::abs(det.v_star + lower + upper - 1.0) <= 1e-12);
        // the two tilted integrals agree with c
        CHECK(std::abs(det.nu1.mean_gap_above(x) - det.c) <= 1e-10);
        if (det.c > 0.0) {
            CHECK(std::abs(det.nu1.mean_gap_below(x) - det.c) <= 1e-10);
            // barycenter of nu1 is x
            CHECK(det.nu1.barycenter() ==
                  doctest::Approx(x * det.nu1.total_mass()).epsilon(1e-10));
        }
    }
}

TEST_CASE("mean-equal targets have no one-sided component") {
    Philox rng(23, 0);
    for (int t = 0; t < 30; ++t) {
        const double x = 1.0 + rng.next_uniform();
        Distribution nu = random_attainable(rng, StateSpace{0.0, 2.0 * x}, x, 10);
        const HallDetails det = hall_embed_details(nu, x, kHalfLine);
        CHECK(det.v_star == 0.0);
        CHECK_FALSE(det.rule.one_sided.has_value());
    }
}

TEST_CASE("atomic embedding round-trips across all four cases") {
    Philox rng(24, 0);
    const StateSpace spaces[] = {kHalfLine, StateSpace{-kInf, 0.0}, StateSpace{0.0, 4.0},
                                 kWholeLine};
    const double xs[] = {2.0, -1.5, 1.0, 0.5};
    for (int c = 0; c < 4; ++c) {
        for (int t = 0; t < 50; ++t) {
            const Distribution nu = random_attainable(rng, spaces[c], xs[c], 50);
            REQUIRE(attainable(nu, xs[c], spaces[c]));
            const RandomizedRule rule = hall_embed(nu, xs[c], spaces[c]);
            CHECK(rule.purely_atomic());
            rule.validate();
            CHECK(max_atom_error(rule_pushforward(rule), nu) <= 1e-10);
        }
    }
}

TEST_CASE("continuous and mixed targets embed through band components") {
    // mean-x continuous target: pure band
    const Distribution unif = Distribution::uniform(1.0, 3.0);
    const HallDetails det = hall_embed_details(unif, 2.0, kHalfLine);
    CHECK(det.v_star == 0.0);
    REQUIRE(det.rule.band.has_value());
    CHECK(wasserstein1(rule_pushforward(det.rule), unif) <= 1e-12);

    // sub-x mean: one-sided part plus band
    const Distribution mixed = Distribution::mix(
        {{0.3, Distribution::point(0.2)}, {0.7, Distribution::uniform(1.0, 3.0)}});
    const double x = 1.8;
    REQUIRE(attainable(mixed, x, kHalfLine));
    const HallDetails det2 = hall_embed_details(mixed, x, kHalfLine);
    CHECK(det2.v_star > 0.0);
    REQUIRE(det2.rule.one_sided.has_value());
    CHECK(wasserstein1(rule_pushforward(det2.rule), mixed) <= 1e-10);
}

TEST_CASE("bounded-above embedding mirrors the construction") {
    const StateSpace space{-kInf, 0.0};
    const Distribution nu = Distribution::from_atoms({{-3.0, 0.5}, {0.0, 0.5}});
    const double x = -2.0;  // mean -1.5 >= x
    REQUIRE(attainable(nu, x, space));
    const RandomizedRule rule = hall_embed(nu, x, space);
    CHECK(max_atom_error(rule_pushforward(rule), nu) <= 1e-12);
    // the mirrored one-sided pairs run to -inf
    bool has_lower_inf = false;
    for (const RuleAtom& a : rule.atoms) has_lower_inf |= a.pair.a == -kInf;
    CHECK(has_lower_inf);
}

TEST_CASE("whole-line targets become level rules") {
    const Distribution nu = Distribution::from_atoms({{-1.0, 0.5}, {1.0, 0.5}});
    const RandomizedRule rule = hall_embed(nu, 0.0, kWholeLine);
    REQUIRE(rule.atoms.size() == 2);
    CHECK(rule.atoms[0].pair.is_level());
    CHECK(max_atom_error(rule_pushforward(rule), nu) <= 1e-15);

    const Distribution cont = Distribution::uniform(-2.0, 5.0);
    const RandomizedRule rule2 = hall_embed(cont, 0.0, kWholeLine);
    REQUIRE(rule2.hit_level.has_value());
    CHECK(wasserstein1(rule_pushforward(rule2), cont) <= 1e-14);
}

TEST_CASE("unattainable targets are rejected with the reason") {
    const Distribution heavy = Distribution::point(3.0);
    CHECK_THROWS_WITH_AS((void)hall_embed(heavy, 2.0, kHalfLine), "barycenter exceeds start",
                         ConstraintError);
}

TEST_CASE("sampling a single-pair rule always returns it") {
    const RandomizedRule rule = hall_embed(TwoPointLaw{0.0, 2.0, 1.0}.to_distribution(), 1.0,
                                           kHalfLine);
    Philox rng(30, 0);
    for (int t = 0; t < 32; ++t) {
        const ThresholdPair p = sample_rule(rule, rng);
        CHECK(p.a == 0.0);
        CHECK(p.b == 2.0);
    }
}

TEST_CASE("sampling frequencies match the rule weights") {
    const Distribution nu = Distribution::from_atoms({{0.0, 0.5}, {3.0, 0.5}});
    const RandomizedRule rule = hall_embed(nu, 2.0, kHalfLine);
    Philox rng(31, 0);
    const int n = 100000;
    int one_sided = 0;
    for (int t = 0; t < n; ++t) {
        if (sample_rule(rule, rng).b == kInf) ++one_sided;
    }
    const double freq = static_cast<double>(one_sided) / n;
    CHECK(std::abs(freq - 0.25) <= 3.0 * std::sqrt(0.25 * 0.75 / n));
}

TEST_CASE("whole-line sampling hits both levels") {
    const Distribution nu = Distribution::from_atoms({{-1.0, 0.5}, {1.0, 0.5}});
    const RandomizedRule rule = hall_embed(nu, 0.0, kWholeLine);
    Philox rng(32, 0);
    const int n = 100000;
    int low = 0;
    for (int t = 0; t < n; ++t) {
        const ThresholdPair p = sample_rule(rule, rng);
        CHECK(p.a == p.b);
        if (p.a == -1.0) ++low;
    }
    CHECK(std::abs(low / static_cast<double>(n) - 0.5) <= 3.0 * std::sqrt(0.25 / n));
}

TEST_CASE("sampling is deterministic per seed") {
    const Distribution mixed = Distribution::mix(
        {{0.3, Distribution::point(0.2)}, {0.7, Distribution::uniform(1.0, 3.0)}});
    const RandomizedRule rule = hall_embed(mixed, 1.8, kHalfLine);
    Philox r1(33, 5), r2(33, 5);
    for (int t = 0; t < 200; ++t) {
        const ThresholdPair p1 = sample_rule(rule, r1);
        const ThresholdPair p2 = sample_rule(rule, r2);
        CHECK(p1.a == p2.a);
        CHECK(p1.b == p2.b);
    }
}

TEST_CASE("band sampling matches the factored marginals") {
    // mean-x uniform target embeds as a pure band; the stopped law of the
    // sampled pairs must reproduce the target
    const Distribution unif = Distribution::uniform(1.0, 3.0);
    const double x = 2.0;
    const RandomizedRule rule = hall_embed(unif, x, kHalfLine);
    Philox rng(34, 0);
    const int n = 200000;
    double mean_stop = 0.0;
    int below = 0;
    for (int t = 0; t < n; ++t) {
        const ThresholdPair p = sample_rule(rule, rng);
        REQUIRE(p.a <= x);
        REQUIRE(p.b > x);
        // draw the exit side exactly
        const double q_lower = (p.b - x) / (p.b - p.a);
        const double v = rng.next_uniform() <= q_lower ? p.a : p.b;
        mean_stop += v;
        if (v <= x) ++below;
    }
    mean_stop /= n;
    CHECK(std::abs(mean_stop - 2.0) <= 3.0 * 0.6 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(below / static_cast<double>(n) - 0.5) <= 3.0 * std::sqrt(0.25 / n));
}

TEST_CASE("atom approximation leaves atomic rules unchanged") {
    const Distribution nu = Distribution::from_atoms({{0.0, 0.5}, {3.0, 0.5}});
    const RandomizedRule rule = hall_embed(nu, 2.0, kHalfLine);
    const RandomizedRule approx = approximate_by_atoms(rule, 4);
    REQUIRE(approx.atoms.size() == rule.atoms.size());
    for (std::size_t i = 0; i < rule.atoms.size(); ++i) {
        CHECK(approx.atoms[i].mass == rule.atoms[i].mass);
    }
}

TEST_CASE("atom approximation improves with resolution") {
    const Distribution unif = Distribution::uniform(1.0, 3.0);
    const RandomizedRule rule = hall_embed(unif, 2.0, kHalfLine);
    const Distribution exact = rule_pushforward(rule);
    double prev = kInf;
    for (int n : {16, 32, 64}) {
        const RandomizedRule approx = approximate_by_atoms(rule, n);
        CHECK(approx.purely_atomic());
        const double w = wasserstein1(rule_pushforward(approx), exact);
        CHECK(w <= prev + 1e-12);
        prev = w;
    }
    // degenerate n = 1: a single pair, so a two-point stopped law
    const RandomizedRule one = approximate_by_atoms(rule, 1);
    REQUIRE(one.atoms.size() == 1);
    CHECK(rule_pushforward(one).atoms().size() == 2);
}
