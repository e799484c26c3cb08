#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace stoplaw {

struct Atom {
    double z = 0.0;
    double mass = 0.0;
};

// Uniform-density block on [lo, hi]; the continuous part of a law is a list
// of these, which is the same thing as a piecewise-linear quantile function.
struct Cell {
    double lo = 0.0;
    double hi = 0.0;
    double mass = 0.0;
};

// One linear piece of the quantile function: z goes z0 -> z1 while the
// cumulative mass goes u0 -> u1. Atoms are flat pieces (z0 == z1).
struct QuantilePiece {
    double u0, u1, z0, z1;
    bool is_atom() const { return z0 == z1; }
    double mass() const { return u1 - u0; }
};

// A finite nonnegative measure on the reals: exact atoms plus a
// piecewise-linear-quantile continuous part. Total mass <= 1; probability
// laws have mass 1. Immutable after construction.
class Distribution {
public:
    Distribution() = default;  // zero measure

    static Distribution point(double z, double mass = 1.0);
    static Distribution from_atoms(std::vector<Atom> atoms);
    static Distribution uniform(double lo, double hi, double mass = 1.0);
    // n equal-mass cells between quantile nodes g(k/n), k = 0..n
    static Distribution from_quantile(const std::function<double(double)>& g, int n,
                                      double mass = 1.0);
    static Distribution from_quantile_nodes(const std::vector<double>& nodes,
                                            double mass = 1.0);
    static Distribution from_components(std::vector<Atom> atoms, std::vector<Cell> cells);
    static Distribution mix(const std::vector<std::pair<double, Distribution>>& parts);

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<QuantilePiece>& pieces() const { return pieces_; }

    double total_mass() const { return mass_; }
    double atom_mass() const;
    double continuous_mass() const { return mass_ - atom_mass(); }
    bool empty() const { return atoms_.empty() && cells_.empty(); }
    bool is_probability(double tol = 1e-12) const;
    bool purely_atomic() const { return cells_.empty(); }
    double min_support() const;
    double max_support() const;
    double mass_at(double z) const;

    // right-continuous generalized inverse of the CDF; u in (0,1), probability laws
    double quantile(double u) const;
    // same inverse at an absolute mass level in [0, total_mass]; no domain check
    double quantile_at_mass(double m) const;
    double cdf(double z) const;       // mass of (-inf, z]
    double cdf_left(double z) const;  // mass of (-inf, z)
    double barycenter() const;

    // \int_v^mass G(u) du over the upper part of the quantile function
    double tail_quantile_integral(double v) const;
    // \int (z - c)^+ dnu and \int (c - z)^+ dnu
    double mean_gap_above(double c) const;
    double mean_gap_below(double c) const;

    // CDF-level split at v_star: lower part has mass v_star, upper the rest;
    // an atom (or cell) straddling the level is divided between the parts.
    std::pair<Distribution, Distribution> restrict_and_split(double v_star) const;
    Distribution restrict_range(double lo, double hi, bool incl_lo, bool incl_hi) const;

    Distribution scaled(double factor) const;
    Distribution normalized() const;
    Distribution map(const std::function<double(double)>& f, bool increasing = true) const;
    Distribution reflected() const;

private:
    void canonicalize();

    std::vector<Atom> atoms_;
    std::vector<Cell> cells_;
    std::vector<QuantilePiece> pieces_;
    double mass_ = 0.0;
};

// \int_0^1 |G_1 - G_2| du, exact on the merged piece breakpoints.
double wasserstein1(const Distribution& d1, const Distribution& d2);

}  // namespace stoplaw
