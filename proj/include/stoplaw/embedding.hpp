#pragma once

#include <optional>
#include <vector>

#include "stoplaw/distribution.hpp"
#include "stoplaw/rng.hpp"
#include "stoplaw/threshold.hpp"

namespace stoplaw {

struct RuleAtom {
    ThresholdPair pair;
    double mass = 0.0;
};

// Factored band of threshold pairs: joint measure
//   lower(da) upper(db) (b - a) / c
// over one side's levels a and the other's b. Stored in factored form; both
// sampling and pushforward factorize through the (b-x) + (x-a) split.
struct BandComponent {
    Distribution lower;  // a-marginal factor (sub-measure, support <= x)
    Distribution upper;  // b-marginal factor (sub-measure, support >= x)
    double c = 0.0;      // normalizer

    double tilt_upper() const;  // \int (b - x) upper(db)
    double tilt_lower() const;  // \int (x - a) lower(da)
    double mass(double x) const;

    double x = 0.0;  // reference point the tilts are taken around
};

// Sub-measure of levels paired with an infinite opposite threshold.
struct OneSidedComponent {
    Distribution levels;
    bool upper_infinite = true;  // pairs (a, +inf); false means pairs (-inf, b)
};

// Probability measure over threshold pairs: explicit atoms, an optional
// one-sided part, an optional band, and (whole-line case) an optional law of
// single levels to hit. Immutable value.
struct RandomizedRule {
    double x = 0.0;
    StateSpace space;
    std::vector<RuleAtom> atoms;
    std::optional<OneSidedComponent> one_sided;
    std::optional<BandComponent> band;
    std::optional<Distribution> hit_level;

    double total_mass() const;
    bool purely_atomic() const { return !one_sided && !band && !hit_level; }
    void validate() const;  // throws ConstraintError on a malformed rule
};

// Whether nu is realizable as the law of the stopped natural-scale process:
// support inside the state space and the barycenter constraint of the case
// (<= x below, >= x above, = x bounded, anything on the whole line).
bool attainable(const Distribution& nu, double x, const StateSpace& space,
                double tol = 1e-9);

// The extended Hall construction: a randomized threshold rule whose stopped
// law is exactly nu. Purely atomic targets yield purely atomic rules.
RandomizedRule hall_embed(const Distribution& nu, double x, const StateSpace& space);

// Construction internals, for reports and verification. v_star/z_star/c and
// the nu0/nu1 split are populated for the bounded-below, bounded and
// (mirrored) bounded-above cases; the whole-line construction has none.
struct HallDetails {
    double v_star = 0.0;
    double z_star = 0.0;
    double c = 0.0;
    Distribution nu0, nu1;
    RandomizedRule rule;
};
HallDetails hall_embed_details(const Distribution& nu, double x, const StateSpace& space);

// Law of the stopped process under the rule; exact on atoms and one-sided
// parts, factor-exact on bands.
Distribution rule_pushforward(const RandomizedRule& rule);

// Draw one threshold pair with the rule's law.
ThresholdPair sample_rule(const RandomizedRule& rule, Philox& rng);

// Finite-support approximation: continuous components are quantile-gridded
// onto n equal-mass atoms per factor. Atomic rules are returned unchanged.
RandomizedRule approximate_by_atoms(const RandomizedRule& rule, int n);

}  // namespace stoplaw
