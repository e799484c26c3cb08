#pragma once

#include "stoplaw/distribution.hpp"
#include "stoplaw/numerics.hpp"

namespace stoplaw {

enum class CaseTag { bounded, bounded_below, bounded_above, whole_line };

const char* to_string(CaseTag tag);

// State interval of the process in natural scale.
struct StateSpace {
    double lo = -kInf;
    double hi = kInf;

    CaseTag tag() const {
        const bool lo_f = std::isfinite(lo), hi_f = std::isfinite(hi);
        if (lo_f && hi_f) return CaseTag::bounded;
        if (lo_f) return CaseTag::bounded_below;
        if (hi_f) return CaseTag::bounded_above;
        return CaseTag::whole_line;
    }
};

// Exit thresholds a <= x <= b around the reference point x. b == +inf or
// a == -inf are one-sided rules. a == b != x encodes "first hit of level a"
// (whole-line case only); a == x or b == x means stop immediately.
struct ThresholdPair {
    double a = -kInf;
    double b = kInf;
    double x = 0.0;

    bool stop_now() const { return a == x || b == x; }
    bool is_level() const { return a == b && a != x; }

    void validate(const StateSpace& space) const;  // throws ConstraintError
};

// Exit law of a local martingale from (a, b) started at x in (a, b):
// mass (b-x)/(b-a) at a and (x-a)/(b-a) at b. Barycenter is x exactly.
struct TwoPointLaw {
    double a, b, x;

    double mass_at_a() const { return (b - x) / (b - a); }
    double mass_at_b() const { return (x - a) / (b - a); }
    Distribution to_distribution() const;
};

// The stopped law chi_{a,b} of the pair, handling one-sided, level and
// stop-now cases.
Distribution threshold_law(const ThresholdPair& p, const StateSpace& space);

}  // namespace stoplaw
