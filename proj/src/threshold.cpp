#include "stoplaw/threshold.hpp"

#include <cmath>

#include "stoplaw/errors.hpp"

namespace stoplaw {

const char* to_string(CaseTag tag) {
    switch (tag) {
        case CaseTag::bounded: return "bounded";
        case CaseTag::bounded_below: return "bounded-below";
        case CaseTag::bounded_above: return "bounded-above";
        case CaseTag::whole_line: return "whole-line";
    }
    return "?";
}

void ThresholdPair::validate(const StateSpace& space) const {
    if (std::isnan(a) || std::isnan(b) || !std::isfinite(x)) {
        throw ConstraintError("threshold pair: NaN endpoint");
    }
    if (is_level()) {
        if (space.tag() != CaseTag::whole_line) {
            throw ConstraintError("threshold pair: level-hitting pairs only exist on the whole line");
        }
        return;
    }
    if (!(a <= x && x <= b)) {
        throw ConstraintError("threshold pair: need a <= x <= b");
    }
    if (a < space.lo || b > space.hi) {
        throw ConstraintError("threshold pair: endpoints outside the state space");
    }
    if (space.tag() == CaseTag::whole_line && a == -kInf && b == kInf) {
        throw ConstraintError("threshold pair: (-inf, +inf) never stops on the whole line");
    }
}

Distribution TwoPointLaw::to_distribution() const {
    if (!(a < x && x < b) || !std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError("two-point law: need finite a < x < b");
    }
    return Distribution::from_atoms({{a, mass_at_a()}, {b, mass_at_b()}});
}

Distribution threshold_law(const ThresholdPair& p, const StateSpace& space) {
    p.validate(space);
    if (p.stop_now()) return Distribution::point(p.x);
    if (p.is_level()) return Distribution::point(p.a);
    if (p.b == kInf) return Distribution::point(p.a);   // lower threshold hit a.s.
    if (p.a == -kInf) return Distribution::point(p.b);  // upper threshold hit a.s.
    return TwoPointLaw{p.a, p.b, p.x}.to_distribution();
}

}  // namespace stoplaw
