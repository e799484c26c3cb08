#pragma once

#include <cstdint>
#include <vector>

#include "stoplaw/embedding.hpp"
#include "stoplaw/objectives.hpp"
#include "stoplaw/scale.hpp"

namespace stoplaw {

enum class BoundaryPolicy { threshold, overshoot };

struct SimConfig {
    double dt = 1e-3;
    long max_steps = 10'000'000;
    long paths = 10'000;
    std::uint64_t seed = 0;
    BoundaryPolicy boundary = BoundaryPolicy::threshold;
    bool exact_sampling = false;  // Bernoulli draw of the natural-scale exit law
    bool record_paths = false;
    bool parallel = true;

    void validate() const;
};

struct PathRecord {
    long id = 0;
    double a = 0.0, b = 0.0;  // thresholds used (natural scale for randomized rules)
    double value = 0.0;       // stopped value (Y coordinates)
    bool censored = false;
};

// Sorted uncensored stopped values plus the censored count.
struct EmpiricalLaw {
    std::vector<double> samples;
    long censored = 0;

    long total() const { return static_cast<long>(samples.size()) + censored; }
    double mean() const;
    double stddev() const;
    Distribution to_distribution() const;  // equal-weight atoms over the samples
};

struct SimResult {
    EmpiricalLaw law;
    std::vector<PathRecord> records;  // populated when cfg.record_paths
};

// Euler-Maruyama paths stopped at the first exit from (pair.a, pair.b); the
// pair is given in Y coordinates. One-sided pairs census paths that outlive
// the horizon. Bit-identical output for any thread count.
SimResult run_threshold(const DiffusionSpec& spec, const ThresholdPair& pair,
                        const SimConfig& cfg);

// Per path: draw a pair from the rule (natural-scale coordinates), map the
// thresholds back through the scale, then stop as run_threshold does.
SimResult run_randomized(const DiffusionSpec& spec, const RandomizedRule& rule,
                         const ScaleMap& scale, const SimConfig& cfg);

// two-sample Kolmogorov-Smirnov statistic
double ks_statistic(const EmpiricalLaw& s1, const EmpiricalLaw& s2);
// one-sample statistic against an analytic law
double ks_statistic(const EmpiricalLaw& s, const Distribution& target);

struct VerifyReport {
    bool pass = false;
    double w1 = 0.0;
    double tol = 0.0;
    double censored_fraction = 0.0;
    double v_star = 0.0;  // construction diagnostics
    double c = 0.0;
    std::vector<double> objective_analytic;
    std::vector<double> objective_empirical;
    RandomizedRule rule;
};

// scale -> embed -> simulate -> W1(empirical, target): the end-to-end witness
// that the constructed rule realizes nu (given in Y coordinates).
VerifyReport verify_embedding(const DiffusionSpec& spec, const Distribution& nu_y,
                              const SimConfig& cfg,
                              const std::vector<Objective>& objectives = {});

}  // namespace stoplaw
