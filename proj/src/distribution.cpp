#include "stoplaw/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "stoplaw/errors.hpp"
#include "stoplaw/numerics.hpp"

namespace stoplaw {

namespace {
constexpr double kMassEps = 1e-300;  // exact zeros only; no silent trimming
}

Distribution Distribution::point(double z, double mass) {
    return from_atoms({{z, mass}});
}

Distribution Distribution::from_atoms(std::vector<Atom> atoms) {
    Distribution d;
    d.atoms_ = std::move(atoms);
    d.canonicalize();
    return d;
}

Distribution Distribution::uniform(double lo, double hi, double mass) {
    Distribution d;
    d.cells_ = {{lo, hi, mass}};
    d.canonicalize();
    return d;
}

Distribution Distribution::from_quantile(const std::function<double(double)>& g, int n,
                                         double mass) {
    if (n < 1) throw DomainError("from_quantile: need at least one cell");
    std::vector<double> nodes(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) nodes[static_cast<std::size_t>(k)] = g(static_cast<double>(k) / n);
    return from_quantile_nodes(nodes, mass);
}

Distribution Distribution::from_quantile_nodes(const std::vector<double>& nodes, double mass) {
    if (nodes.size() < 2) throw DomainError("from_quantile_nodes: need at least two nodes");
    const int n = static_cast<int>(nodes.size()) - 1;
    Distribution d;
    const double cell_mass = mass / n;
    for (int k = 0; k < n; ++k) {
        const double lo = nodes[static_cast<std::size_t>(k)];
        const double hi = nodes[static_cast<std::size_t>(k) + 1];
        if (!(hi >= lo)) throw DomainError("from_quantile_nodes: nodes must be non-decreasing");
        if (!std::isfinite(lo) || !std::isfinite(hi)) {
            throw DomainError("from_quantile_nodes: nodes must be finite");
        }
        if (hi == lo) {
            d.atoms_.push_back({lo, cell_mass});
        } else {
            d.cells_.push_back({lo, hi, cell_mass});
        }
    }
    d.canonicalize();
    return d;
}

Distribution Distribution::from_components(std::vector<Atom> atoms, std::vector<Cell> cells) {
    Distribution d;
    d.atoms_ = std::move(atoms);
    d.cells_ = std::move(cells);
    d.canonicalize();
    return d;
}

Distribution Distribution::mix(const std::vector<std::pair<double, Distribution>>& parts) {
    Distribution d;
    for (const auto& [w, part] : parts) {
        if (w < 0.0) throw DomainError("mix: negative weight");
        if (w == 0.0) continue;
        for (const Atom& a : part.atoms_) d.atoms_.push_back({a.z, w * a.mass});
        for (const Cell& c : part.cells_) d.cells_.push_back({c.lo, c.hi, w * c.mass});
    }
    d.canonicalize();
    return d;
}

void Distribution::canonicalize() {
    for (const Atom& a : atoms_) {
        if (!(a.mass >= 0.0) || !std::isfinite(a.z)) {
            throw DomainError("distribution: atom with negative mass or non-finite location");
        }
    }
    for (const Cell& c : cells_) {
        if (!(c.mass >= 0.0) || !std::isfinite(c.lo) || !std::isfinite(c.hi) || c.hi < c.lo) {
            throw DomainError("distribution: malformed cell");
        }
    }
    // zero-width cells are atoms
    {
        std::vector<Cell> keep;
        keep.reserve(cells_.size());
        for (const Cell& c : cells_) {
            if (c.mass <= kMassEps) continue;
            if (c.hi == c.lo) {
                atoms_.push_back({c.lo, c.mass});
            } else {
                keep.push_back(c);
            }
        }
        cells_ = std::move(keep);
    }
    // merge atoms at identical locations
    {
        std::vector<Atom> keep;
        keep.reserve(atoms_.size());
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom& a, const Atom& b) { return a.z < b.z; });
        for (const Atom& a : atoms_) {
            if (a.mass <= kMassEps) continue;
            if (!keep.empty() && keep.back().z == a.z) {
                keep.back().mass += a.mass;
            } else {
                keep.push_back(a);
            }
        }
        atoms_ = std::move(keep);
    }
    std::sort(cells_.begin(), cells_.end(),
              [](const Cell& a, const Cell& b) { return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi); });
    // resolve overlapping cells by a density sweep over elementary intervals
    bool overlap = false;
    for (std::size_t i = 1; i < cells_.size(); ++i) {
        if (cells_[i].lo < cells_[i - 1].hi) {
            overlap = true;
            break;
        }
    }
    if (overlap) {
        std::vector<double> bounds;
        bounds.reserve(cells_.size() * 2);
        for (const Cell& c : cells_) {
            bounds.push_back(c.lo);
            bounds.push_back(c.hi);
        }
        std::sort(bounds.begin(), bounds.end());
        bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
        std::vector<Cell> merged;
        merged.reserve(bounds.size());
        for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
            const double lo = bounds[k], hi = bounds[k + 1];
            double m = 0.0;
            for (const Cell& c : cells_) {
                if (c.lo <= lo && c.hi >= hi) m += c.mass * (hi - lo) / (c.hi - c.lo);
            }
            if (m > kMassEps) merged.push_back({lo, hi, m});
        }
        cells_ = std::move(merged);
    }
    // split cells at interior atom locations
    if (!atoms_.empty() && !cells_.empty()) {
        std::vector<Cell> split;
        split.reserve(cells_.size() + atoms_.size());
        for (const Cell& c : cells_) {
            Cell cur = c;
            auto it = std::upper_bound(atoms_.begin(), atoms_.end(), cur.lo,
                                       [](double z, const Atom& a) { return z < a.z; });
            for (; it != atoms_.end() && it->z < cur.hi; ++it) {
                const double m_left = cur.mass * (it->z - cur.lo) / (cur.hi - cur.lo);
                if (m_left > kMassEps) split.push_back({cur.lo, it->z, m_left});
                cur = {it->z, cur.hi, cur.mass - m_left};
            }
            if (cur.mass > kMassEps) split.push_back(cur);
        }
        cells_ = std::move(split);
    }
    // build the merged quantile pieces (atom before a new cell at the same z,
    // after a cell that ends there)
    pieces_.clear();
    pieces_.reserve(atoms_.size() + cells_.size());
    std::size_t ia = 0, ic = 0;
    double u = 0.0;
    while (ia < atoms_.size() || ic < cells_.size()) {
        bool take_atom;
        if (ia == atoms_.size()) {
            take_atom = false;
        } else if (ic == cells_.size()) {
            take_atom = true;
        } else {
            take_atom = atoms_[ia].z <= cells_[ic].lo;
        }
        if (take_atom) {
            pieces_.push_back({u, u + atoms_[ia].mass, atoms_[ia].z, atoms_[ia].z});
            u += atoms_[ia].mass;
            ++ia;
        } else {
            pieces_.push_back({u, u + cells_[ic].mass, cells_[ic].lo, cells_[ic].hi});
            u += cells_[ic].mass;
            ++ic;
        }
    }
    mass_ = u;
    if (mass_ > 1.0 + 1e-9) throw DomainError("distribution: total mass exceeds 1");
}

double Distribution::atom_mass() const {
    double m = 0.0;
    for (const Atom& a : atoms_) m += a.mass;
    return m;
}

bool Distribution::is_probability(double tol) const { return std::abs(mass_ - 1.0) <= tol; }

double Distribution::min_support() const {
    double m = kInf;
    if (!atoms_.empty()) m = std::min(m, atoms_.front().z);
    if (!cells_.empty()) m = std::min(m, cells_.front().lo);
    return m;
}

double Distribution::max_support() const {
    double m = -kInf;
    if (!atoms_.empty()) m = std::max(m, atoms_.back().z);
    if (!cells_.empty()) m = std::max(m, cells_.back().hi);
    return m;
}

double Distribution::mass_at(double z) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), z,
                               [](const Atom& a, double v) { return a.z < v; });
    return (it != atoms_.end() && it->z == z) ? it->mass : 0.0;
}

double Distribution::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: u must lie in (0,1)");
    if (!is_probability(1e-9)) throw DomainError("quantile: not a probability law");
    return quantile_at_mass(u);
}

double Distribution::quantile_at_mass(double m) const {
    if (pieces_.empty()) throw DomainError("quantile: empty measure");
    if (m >= mass_) return pieces_.back().z1;
    if (m <= 0.0) return pieces_.front().z0;
    // last piece with u0 <= m; if m sits exactly on its top boundary,
    // right-continuity selects the next piece
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), m,
                               [](double v, const QuantilePiece& p) { return v < p.u0; });
    --it;
    while (m >= it->u1 && std::next(it) != pieces_.end()) ++it;
    if (it->is_atom()) return it->z0;
    return it->z0 + (m - it->u0) / (it->u1 - it->u0) * (it->z1 - it->z0);
}

double Distribution::cdf(double z) const {
    double m = 0.0;
    for (const Atom& a : atoms_) {
        if (a.z <= z) m += a.mass;
        else break;
    }
    for (const Cell& c : cells_) {
        if (c.hi <= z) m += c.mass;
        else if (c.lo < z) m += c.mass * (z - c.lo) / (c.hi - c.lo);
        else break;
    }
    return m;
}

double Distribution::cdf_left(double z) const {
    double m = 0.0;
    for (const Atom& a : atoms_) {
        if (a.z < z) m += a.mass;
        else break;
    }
    for (const Cell& c : cells_) {
        if (c.hi <= z) m += c.mass;
        else if (c.lo < z) m += c.mass * (z - c.lo) / (c.hi - c.lo);
        else break;
    }
    return m;
}

double Distribution::barycenter() const {
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.mass * a.z;
    for (const Cell& c : cells_) s += c.mass * 0.5 * (c.lo + c.hi);
    return s;
}

double Distribution::tail_quantile_integral(double v) const {
    double s = 0.0;
    for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) {
        if (it->u1 <= v) break;
        const double a = std::max(v, it->u0);
        if (it->is_atom()) {
            s += (it->u1 - a) * it->z0;
        } else {
            const double za = it->z0 + (a - it->u0) / (it->u1 - it->u0) * (it->z1 - it->z0);
            s += (it->u1 - a) * 0.5 * (za + it->z1);
        }
    }
    return s;
}

double Distribution::mean_gap_above(double c) const {
    double s = 0.0;
    for (const Atom& a : atoms_) {
        if (a.z > c) s += a.mass * (a.z - c);
    }
    for (const Cell& cl : cells_) {
        if (cl.hi <= c) continue;
        const double lo = std::max(cl.lo, c);
        const double frac = (cl.hi - lo) / (cl.hi - cl.lo);
        s += cl.mass * frac * (0.5 * (lo + cl.hi) - c);
    }
    return s;
}

double Distribution::mean_gap_below(double c) const {
    double s = 0.0;
    for (const Atom& a : atoms_) {
        if (a.z < c) s += a.mass * (c - a.z);
    }
    for (const Cell& cl : cells_) {
        if (cl.lo >= c) continue;
        const double hi = std::min(cl.hi, c);
        const double frac = (hi - cl.lo) / (cl.hi - cl.lo);
        s += cl.mass * frac * (c - 0.5 * (cl.lo + hi));
    }
    return s;
}

std::pair<Distribution, Distribution> Distribution::restrict_and_split(double v_star) const {
    if (v_star < -1e-12 || v_star > mass_ + 1e-9) {
        throw DomainError("restrict_and_split: level outside [0, total mass]");
    }
    Distribution lower, upper;
    for (const QuantilePiece& p : pieces_) {
        Distribution* dst = nullptr;
        if (p.u1 <= v_star) {
            dst = &lower;
        } else if (p.u0 >= v_star) {
            dst = &upper;
        }
        if (dst != nullptr) {
            if (p.is_atom()) dst->atoms_.push_back({p.z0, p.mass()});
            else dst->cells_.push_back({p.z0, p.z1, p.mass()});
            continue;
        }
        const double m0 = v_star - p.u0;
        const double m1 = p.mass() - m0;
        if (p.is_atom()) {
            if (m0 > 0.0) lower.atoms_.push_back({p.z0, m0});
            if (m1 > 0.0) upper.atoms_.push_back({p.z0, m1});
        } else {
            const double zs = p.z0 + m0 / p.mass() * (p.z1 - p.z0);
            if (m0 > 0.0) lower.cells_.push_back({p.z0, zs, m0});
            if (m1 > 0.0) upper.cells_.push_back({zs, p.z1, m1});
        }
    }
    lower.canonicalize();
    upper.canonicalize();
    return {std::move(lower), std::move(upper)};
}

Distribution Distribution::restrict_range(double lo, double hi, bool incl_lo,
                                          bool incl_hi) const {
    Distribution out;
    for (const Atom& a : atoms_) {
        const bool in_lo = incl_lo ? a.z >= lo : a.z > lo;
        const bool in_hi = incl_hi ? a.z <= hi : a.z < hi;
        if (in_lo && in_hi) out.atoms_.push_back(a);
    }
    for (const Cell& c : cells_) {
        const double clo = std::max(c.lo, lo);
        const double chi = std::min(c.hi, hi);
        if (chi <= clo) continue;
        out.cells_.push_back({clo, chi, c.mass * (chi - clo) / (c.hi - c.lo)});
    }
    out.canonicalize();
    return out;
}

Distribution Distribution::scaled(double factor) const {
    if (factor < 0.0) throw DomainError("scaled: negative factor");
    Distribution out;
    out.atoms_ = atoms_;
    out.cells_ = cells_;
    for (Atom& a : out.atoms_) a.mass *= factor;
    for (Cell& c : out.cells_) c.mass *= factor;
    out.canonicalize();
    return out;
}

Distribution Distribution::normalized() const {
    if (mass_ <= 0.0) throw DomainError("normalized: zero measure");
    return scaled(1.0 / mass_);
}

Distribution Distribution::map(const std::function<double(double)>& f, bool increasing) const {
    Distribution out;
    out.atoms_.reserve(atoms_.size());
    out.cells_.reserve(cells_.size());
    for (const Atom& a : atoms_) out.atoms_.push_back({f(a.z), a.mass});
    for (const Cell& c : cells_) {
        const double a = f(c.lo), b = f(c.hi);
        if (increasing) out.cells_.push_back({a, b, c.mass});
        else out.cells_.push_back({b, a, c.mass});
    }
    out.canonicalize();
    return out;
}

Distribution Distribution::reflected() const {
    return map([](double z) { return -z; }, false);
}

double wasserstein1(const Distribution& d1, const Distribution& d2) {
    if (!d1.is_probability(1e-9) || !d2.is_probability(1e-9)) {
        throw DomainError("wasserstein1: both arguments must be probability laws");
    }
    if (!std::isfinite(d1.barycenter()) || !std::isfinite(d2.barycenter())) {
        throw DomainError("wasserstein1: infinite barycenter unsupported");
    }
    const auto& p1 = d1.pieces();
    const auto& p2 = d2.pieces();
    auto value_at = [](const QuantilePiece& p, double u) {
        if (p.is_atom()) return p.z0;
        return p.z0 + (u - p.u0) / (p.u1 - p.u0) * (p.z1 - p.z0);
    };
    std::size_t i = 0, j = 0;
    double u = 0.0, s = 0.0;
    const double top = std::min(d1.total_mass(), d2.total_mass());
    while (u < top) {
        while (i < p1.size() && p1[i].u1 <= u) ++i;
        while (j < p2.size() && p2[j].u1 <= u) ++j;
        if (i >= p1.size() || j >= p2.size()) break;
        const double un = std::min({p1[i].u1, p2[j].u1, top});
        const double da = value_at(p1[i], u) - value_at(p2[j], u);
        const double db = value_at(p1[i], un) - value_at(p2[j], un);
        const double w = un - u;
        if (da * db >= 0.0) {
            s += w * 0.5 * (std::abs(da) + std::abs(db));
        } else {
            const double t = da / (da - db);
            s += w * 0.5 * (t * std::abs(da) + (1.0 - t) * std::abs(db));
        }
        u = un;
    }
    return s;
}

}  // namespace stoplaw
