#include "stoplaw/scale.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "stoplaw/errors.hpp"
#include "stoplaw/numerics.hpp"

namespace stoplaw {

double CoefSpec::operator()(double z) const {
    switch (kind) {
        case Kind::constant: return value;
        case Kind::linear: return value * z;
        case Kind::table: {
            if (table.empty()) throw ConfigError("coefficient table is empty");
            if (z <= table.front().first) return table.front().second;
            if (z >= table.back().first) return table.back().second;
            auto it = std::upper_bound(table.begin(), table.end(), z,
                                       [](double v, const auto& p) { return v < p.first; });
            const auto& [z1, v1] = *it;
            const auto& [z0, v0] = *std::prev(it);
            return v0 + (z - z0) / (z1 - z0) * (v1 - v0);
        }
    }
    throw ConfigError("coefficient: unknown kind");
}

void DiffusionSpec::validate() const {
    if (!(lo < start && start < hi)) {
        throw ConfigError("diffusion: start must lie in the interior of the state interval");
    }
    const double a = std::isfinite(lo) ? lo : start - 10.0 * std::max(1.0, std::abs(start));
    const double b = std::isfinite(hi) ? hi : start + 10.0 * std::max(1.0, std::abs(start));
    for (int i = 1; i < 32; ++i) {
        const double z = a + (b - a) * i / 32.0;
        if (!(vol(z) > 0.0)) {
            throw ConfigError("diffusion: volatility must be positive on the interior");
        }
    }
}

// ---------------------------------------------------------------------------
// ScaleMap
// ---------------------------------------------------------------------------

ScaleMap ScaleMap::identity(double lo, double hi, double y) {
    ScaleMap m;
    m.fwd_ = [](double z) { return z; };
    m.inv_ = [](double v) { return v; };
    m.y_lo_ = lo;
    m.y_hi_ = hi;
    m.x_lo_ = lo;
    m.x_hi_ = hi;
    m.y_ = y;
    m.x_ = y;
    m.family_ = "identity";
    return m;
}

ScaleMap ScaleMap::from_functions(std::function<double(double)> fwd,
                                  std::function<double(double)> inv, double y_lo,
                                  double y_hi, double x_lo, double x_hi, double y,
                                  std::string family) {
    ScaleMap m;
    m.fwd_ = std::move(fwd);
    m.inv_ = std::move(inv);
    m.y_lo_ = y_lo;
    m.y_hi_ = y_hi;
    m.x_lo_ = x_lo;
    m.x_hi_ = x_hi;
    m.y_ = y;
    m.x_ = m.fwd_(y);
    m.family_ = std::move(family);
    return m;
}

double ScaleMap::forward(double z) const {
    if (std::isnan(z)) throw DomainError("scale: NaN input");
    if (z <= y_lo_) {
        if (z < y_lo_ - 1e-9 * std::max(1.0, std::abs(y_lo_))) {
            throw DomainError("scale: point below the state interval");
        }
        return x_lo_;
    }
    if (z >= y_hi_) {
        if (z > y_hi_ + 1e-9 * std::max(1.0, std::abs(y_hi_))) {
            throw DomainError("scale: point above the state interval");
        }
        return x_hi_;
    }
    return fwd_(z);
}

double ScaleMap::inverse(double v) const {
    if (std::isnan(v)) throw DomainError("scale: NaN input");
    if (v <= x_lo_) {
        if (v < x_lo_ - 1e-9 * std::max(1.0, std::abs(x_lo_))) {
            throw DomainError("scale: value below the image interval");
        }
        return y_lo_;
    }
    if (v >= x_hi_) {
        if (v > x_hi_ + 1e-9 * std::max(1.0, std::abs(x_hi_))) {
            throw DomainError("scale: value above the image interval");
        }
        return y_hi_;
    }
    return inv_(v);
}

// ---------------------------------------------------------------------------
// Closed-form families
// ---------------------------------------------------------------------------

namespace {

bool zero_drift(const CoefSpec& d) {
    return (d.kind == CoefSpec::Kind::constant || d.kind == CoefSpec::Kind::linear) &&
           d.value == 0.0;
}

ScaleMap build_bm(const DiffusionSpec& spec) {
    const double xi = spec.drift.value, sigma = spec.vol.value;
    const double kappa = 2.0 * xi / (sigma * sigma);
    const double y = spec.start;
    auto fwd = [kappa, y](double z) { return y + (1.0 - std::exp(-kappa * (z - y))) / kappa; };
    auto inv = [kappa, y](double v) { return y - std::log1p(-kappa * (v - y)) / kappa; };
    auto lim = [&](double z) {
        if (std::isfinite(z)) return fwd(z);
        if ((z > 0.0) == (kappa > 0.0)) return y + 1.0 / kappa;  // finite limit side
        return z > 0.0 ? kInf : -kInf;
    };
    return ScaleMap::from_functions(fwd, inv, spec.lo, spec.hi, lim(spec.lo), lim(spec.hi),
                                    y, "bm-drift");
}

ScaleMap build_gbm(const DiffusionSpec& spec) {
    const double mu = spec.drift.value, c = spec.vol.value;
    const double beta = 2.0 * mu / (c * c);
    const double y = spec.start;
    std::function<double(double)> fwd, inv;
    if (beta == 1.0) {
        fwd = [y](double z) { return y * (1.0 + std::log(z / y)); };
        inv = [y](double v) { return y * std::exp(v / y - 1.0); };
    } else {
        fwd = [y, beta](double z) {
            return y + y * (std::pow(z / y, 1.0 - beta) - 1.0) / (1.0 - beta);
        };
        inv = [y, beta](double v) {
            return y * std::pow(1.0 + (1.0 - beta) * (v - y) / y, 1.0 / (1.0 - beta));
        };
    }
    auto lim = [&](double z) {
        if (z == 0.0) return beta < 1.0 ? y - y / (1.0 - beta) : -kInf;
        if (std::isfinite(z)) return fwd(z);
        return beta > 1.0 ? y + y / (beta - 1.0) : kInf;
    };
    return ScaleMap::from_functions(fwd, inv, spec.lo, spec.hi, lim(spec.lo), lim(spec.hi),
                                    y, "gbm");
}

// ---------------------------------------------------------------------------
// Quadrature path: integrate psi' = 2 xi / sigma^2 and s' = exp(-psi) away
// from the start with step-doubled RK4; evaluation re-integrates from the
// nearest stored node, so there is no interpolation error.
// ---------------------------------------------------------------------------

struct Node {
    double z, psi, s;
};

struct NumericScale {
    DiffusionSpec spec;
    std::vector<Node> nodes;  // ascending in z; always contains the start node
    double x_lo = -kInf, x_hi = kInf;
    bool lo_truncated = false, hi_truncated = false;
    double s_scale = 1.0;

    double q(double z) const {
        const double sg = spec.vol(z);
        if (!(sg > 0.0)) throw NumericError("scale quadrature: vanishing volatility");
        return 2.0 * spec.drift(z) / (sg * sg);
    }

    void rk4(double z, double h, double& psi, double& s) const {
        const double q1 = q(z);
        const double qm = q(z + 0.5 * h);
        const double q4 = q(z + h);
        const double e1 = std::exp(-psi);
        const double e2 = std::exp(-(psi + 0.5 * h * q1));
        const double e3 = std::exp(-(psi + 0.5 * h * qm));
        const double e4 = std::exp(-(psi + h * qm));
        psi += h / 6.0 * (q1 + 4.0 * qm + q4);
        s += h / 6.0 * (e1 + 2.0 * e2 + 2.0 * e3 + e4);
    }

    // one error-controlled step; on rejection h is halved and state unchanged
    bool step(double& z, double& h, double& psi, double& s, bool allow_growth) const {
        double p1 = psi, s1 = s;
        rk4(z, h, p1, s1);
        double p2 = psi, s2 = s;
        rk4(z, 0.5 * h, p2, s2);
        rk4(z + 0.5 * h, 0.5 * h, p2, s2);
        const double err = std::max(std::abs(p1 - p2) / std::max(1.0, std::abs(p2)),
                                    std::abs(s1 - s2) / s_scale);
        if (!std::isfinite(err) || err > 1e-12) {
            h *= 0.5;
            return false;
        }
        z += h;
        psi = p2 + (p2 - p1) / 15.0;
        s = s2 + (s2 - s1) / 15.0;
        if (allow_growth && err < 2e-14) h *= 1.9;
        return true;
    }

    std::vector<Node> march(double target, int dir) {
        const double y = spec.start;
        double z = y, psi = 0.0, s = y;
        const bool finite_end = std::isfinite(target);
        double h = dir * (finite_end ? std::abs(target - y) / 1024.0 : s_scale / 256.0);
        std::vector<Node> side;
        long guard = 0;
        while (true) {
            if (++guard > 4'000'000) {
                throw NumericError("scale quadrature: endpoint classification did not converge");
            }
            bool final_step = false;
            double h_use = h;
            if (finite_end) {
                const double rem = target - z;
                if (rem == 0.0) {
                    set_endpoint(dir, s, false);
                    break;
                }
                if (std::abs(rem) <= std::abs(h)) {
                    h_use = rem;
                    final_step = true;
                }
            }
            if (std::abs(h_use) < 1e-13 * std::max(std::abs(z), 1.0)) {
                classify_stall(side, target, dir, psi, s);
                break;
            }
            double z2 = z, p2 = psi, s2 = s, h2 = h_use;
            if (!step(z2, h2, p2, s2, !final_step)) {
                h = h2;
                continue;
            }
            z = z2;
            psi = p2;
            s = s2;
            if (!final_step) h = h2;
            side.push_back({z, psi, s});
            if (final_step && std::abs(target - z) <= 1e-15 * std::max(1.0, std::abs(target))) {
                set_endpoint(dir, s, false);
                break;
            }
            if (std::abs(s - y) > 1e14 * s_scale) {
                set_endpoint(dir, dir > 0 ? kInf : -kInf, false);
                break;
            }
            if (!finite_end && std::exp(-psi) < 1e-14) {
                set_endpoint(dir, s, true);
                break;
            }
        }
        return side;
    }

    void set_endpoint(int dir, double value, bool truncated) {
        if (dir > 0) {
            x_hi = value;
            hi_truncated = truncated;
        } else {
            x_lo = value;
            lo_truncated = truncated;
        }
    }

    // reached the minimum step near a finite endpoint: decide by the local
    // power s' ~ C * dist^r; integrable tails (r > -1) give a finite limit
    void classify_stall(const std::vector<Node>& side, double target, int dir, double psi,
                        double s) {
        if (side.size() < 2 || !std::isfinite(target)) {
            throw NumericError("scale quadrature: ambiguous endpoint classification");
        }
        const Node& n1 = side[side.size() - 2];
        const Node& n2 = side.back();
        const double d1 = std::abs(n1.z - target), d2 = std::abs(n2.z - target);
        if (!(d1 > 0.0 && d2 > 0.0 && d1 != d2)) {
            throw NumericError("scale quadrature: ambiguous endpoint classification");
        }
        const double r = -(n2.psi - n1.psi) / (std::log(d2) - std::log(d1));
        if (r > -0.95) {
            const double tail = std::exp(-psi) * d2 / (1.0 + r);
            set_endpoint(dir, s + dir * tail, true);
        } else if (r < -1.05) {
            set_endpoint(dir, dir > 0 ? kInf : -kInf, false);
        } else {
            throw NumericError("scale quadrature: ambiguous endpoint classification");
        }
    }

    double eval_forward(double z) const {
        if (z <= nodes.front().z) {
            if (lo_truncated || z >= nodes.front().z) return nodes.front().s;
        }
        if (z >= nodes.back().z) {
            if (hi_truncated || z <= nodes.back().z) return nodes.back().s;
        }
        auto it = std::upper_bound(nodes.begin(), nodes.end(), z,
                                   [](double v, const Node& n) { return v < n.z; });
        Node from = it == nodes.begin() ? nodes.front() : *std::prev(it);
        double zz = from.z, psi = from.psi, s = from.s;
        long guard = 0;
        while (true) {
            const double rem = z - zz;
            if (std::abs(rem) <= 1e-15 * std::max(1.0, std::abs(z))) break;
            double h = rem;
            if (++guard > 100000) throw NumericError("scale quadrature: evaluation stalled");
            if (!step(zz, h, psi, s, false)) {
                if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(zz))) break;
            }
        }
        return s;
    }

    double eval_inverse(double v) const {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), v,
                                   [](const Node& n, double val) { return n.s < val; });
        double zlo, zhi;
        if (it == nodes.begin()) {
            zhi = nodes.front().z;
            zlo = zhi - std::max(1.0, std::abs(zhi));
            while (eval_forward(zlo) > v) {
                zhi = zlo;
                zlo -= 2.0 * (nodes.front().z - zlo) + 1.0;
                if (zlo < -1e300) throw NumericError("scale inverse: bracket expansion failed");
            }
        } else if (it == nodes.end()) {
            zlo = nodes.back().z;
            zhi = zlo + std::max(1.0, std::abs(zlo));
            while (eval_forward(zhi) < v) {
                zlo = zhi;
                zhi += 2.0 * (zhi - nodes.back().z) + 1.0;
                if (zhi > 1e300) throw NumericError("scale inverse: bracket expansion failed");
            }
        } else {
            zhi = it->z;
            zlo = std::prev(it)->z;
        }
        return find_root([&](double z) { return eval_forward(z) - v; }, zlo, zhi).x;
    }
};

ScaleMap build_numeric(const DiffusionSpec& spec) {
    auto ns = std::make_shared<NumericScale>();
    ns->spec = spec;
    ns->s_scale = std::max(1.0, std::abs(spec.start));
    auto right = ns->march(spec.hi, +1);
    auto left = ns->march(spec.lo, -1);
    std::reverse(left.begin(), left.end());
    ns->nodes = std::move(left);
    ns->nodes.push_back({spec.start, 0.0, spec.start});
    ns->nodes.insert(ns->nodes.end(), right.begin(), right.end());
    auto fwd = [ns](double z) { return ns->eval_forward(z); };
    auto inv = [ns](double v) { return ns->eval_inverse(v); };
    return ScaleMap::from_functions(fwd, inv, spec.lo, spec.hi, ns->x_lo, ns->x_hi,
                                    spec.start, "quadrature");
}

}  // namespace

ScaleMap build_scale(const DiffusionSpec& spec) {
    spec.validate();
    if (zero_drift(spec.drift)) {
        return ScaleMap::identity(spec.lo, spec.hi, spec.start);
    }
    if (spec.drift.kind == CoefSpec::Kind::constant && spec.vol.kind == CoefSpec::Kind::constant) {
        return build_bm(spec);
    }
    if (spec.drift.kind == CoefSpec::Kind::linear && spec.vol.kind == CoefSpec::Kind::linear &&
        spec.lo >= 0.0 && spec.start > 0.0) {
        return build_gbm(spec);
    }
    return build_numeric(spec);
}

ScaleMap build_scale_numeric(const DiffusionSpec& spec) {
    spec.validate();
    return build_numeric(spec);
}

Distribution pushforward(const Distribution& d, const ScaleMap& m, Direction dir) {
    auto f = [&](double z) {
        const double v = dir == Direction::forward ? m.forward(z) : m.inverse(z);
        if (!std::isfinite(v)) {
            throw DomainError("pushforward: support maps to an infinite endpoint");
        }
        return v;
    };
    return d.map(f, true);
}

}  // namespace stoplaw
