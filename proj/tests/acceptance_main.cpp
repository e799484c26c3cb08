// Acceptance suite: every check prints one [PASS]/[FAIL] line and the binary
// exits non-zero if any of them failed. Runs on the library only; the CLI has
// its own coverage in the unit tests.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "stoplaw/cli.hpp"
#include "stoplaw/json_io.hpp"
#include "stoplaw/optimize.hpp"
#include "stoplaw/simulate.hpp"

using namespace stoplaw;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& what) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
    if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Distribution random_attainable(Philox& rng, const StateSpace& space, double x, int max_atoms) {
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
            const double target = space.lo + (x - space.lo) * (0.3 + 0.7 * rng.next_uniform());
            const double f = (target - space.lo) / (mean - space.lo);
            std::vector<Atom> out;
            for (const Atom& a : d.atoms())
                out.push_back({space.lo + f * (a.z - space.lo), a.mass});
            return Distribution::from_atoms(std::move(out));
        }
        case CaseTag::bounded_above: {
            const double target = space.hi - (space.hi - x) * (0.3 + 0.7 * rng.next_uniform());
            const double f = (space.hi - target) / (space.hi - mean);
            std::vector<Atom> out;
            for (const Atom& a : d.atoms())
                out.push_back({space.hi - f * (space.hi - a.z), a.mass});
            return Distribution::from_atoms(std::move(out));
        }
        case CaseTag::bounded: {
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

DiffusionSpec brownian(double y, double lo, double hi) {
    DiffusionSpec s;
    s.drift = {CoefSpec::Kind::constant, 0.0, {}};
    s.vol = {CoefSpec::Kind::constant, 1.0, {}};
    s.lo = lo;
    s.hi = hi;
    s.start = y;
    return s;
}

// --- criterion 1: embedding exactness over all four cases -----------------

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    Philox rng(101, 0);
    const StateSpace spaces[] = {{0.0, kInf}, {-kInf, 0.0}, {0.0, 4.0}, {-kInf, kInf}};
    const double xs[] = {2.0, -1.5, 1.0, 0.5};
    double worst = 0.0;
    int done = 0;
    for (int t = 0; t < 500; ++t) {
        const int c = t % 4;
        const Distribution nu = random_attainable(rng, spaces[c], xs[c], 50);
        if (!attainable(nu, xs[c], spaces[c])) continue;
        const RandomizedRule rule = hall_embed(nu, xs[c], spaces[c]);
        worst = std::max(worst, max_atom_error(rule_pushforward(rule), nu));
        ++done;
    }
    const double dt = seconds_since(t0);
    std::ostringstream what;
    what << "embedding exactness on " << done << " atomic targets, worst per-atom error "
         << worst << ", " << dt << " s";
    report(1, done == 500 && worst <= 1e-10 && dt < 10.0, what.str());
}

// --- criterion 2: the worked instance ---------------------------------------

void criterion_2() {
    const Distribution nu = Distribution::from_atoms({{0.0, 0.5}, {3.0, 0.5}});
    const HallDetails det = hall_embed_details(nu, 2.0, StateSpace{0.0, kInf});
    std::map<std::pair<double, double>, double> pairs;
    for (const RuleAtom& a : det.rule.atoms) pairs[{a.pair.a, a.pair.b}] += a.mass;
    const bool ok = det.v_star == 0.25 && det.z_star == 0.0 && det.c == 0.5 &&
                    pairs.size() == 2 && pairs.count({0.0, kInf}) == 1 &&
                    pairs.at({0.0, kInf}) == 0.25 && pairs.count({0.0, 3.0}) == 1 &&
                    pairs.at({0.0, 3.0}) == 0.75;
    std::ostringstream what;
    what << "worked instance: v*=" << det.v_star << " z*=" << det.z_star << " c=" << det.c
         << " rule={(0,inf):" << (pairs.count({0.0, kInf}) ? pairs.at({0.0, kInf}) : -1)
         << ", (0,3):" << (pairs.count({0.0, 3.0}) ? pairs.at({0.0, 3.0}) : -1) << "}";
    report(2, ok, what.str());
}

// --- criterion 3: two-point recovery ----------------------------------------

void criterion_3() {
    Philox rng(103, 0);
    double worst = kInf;
    bool shape_ok = true;
    for (int t = 0; t < 200; ++t) {
        const double a = 4.0 * rng.next_uniform();
        const double b = a + 0.05 + 5.0 * rng.next_uniform();
        const double x = a + (b - a) * (0.02 + 0.96 * rng.next_uniform());
        const RandomizedRule rule =
            hall_embed(TwoPointLaw{a, b, x}.to_distribution(), x, StateSpace{0.0, kInf});
        shape_ok = shape_ok && rule.atoms.size() == 1 && rule.atoms[0].pair.a == a &&
                   rule.atoms[0].pair.b == b;
        if (!rule.atoms.empty()) {
            worst = std::min(worst, rule.atoms[0].mass);
        }
    }
    std::ostringstream what;
    what << "two-point recovery: single pure pair, smallest mass " << worst;
    report(3, shape_ok && std::abs(worst - 1.0) <= 1e-12, what.str());
}

// --- criterion 4: the optimal-quantile closed form ---------------------------

void criterion_4() {
    const Utility v = Utility::power(2.0, 0.5);
    const Weighting w = Weighting::power(0.75);
    const OptimReport rep = optimize_rdu_quantile(v, w, 1.0);
    const double lambda_expected = 0.75 / std::sqrt(0.5);
    const double lambda_err = std::abs(*rep.lambda_star - lambda_expected) / lambda_expected;
    double lagrangian_worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double u = (i + 0.5) / 100.0;
        lagrangian_worst = std::max(lagrangian_worst,
                                    rdu_lagrangian_gap(v, w, *rep.lambda_star, u));
    }
    std::ostringstream what;
    what << "quantile optimizer: lambda* rel err " << lambda_err << ", budget gap "
         << rep.budget_gap << ", worst Lagrangian gap " << lagrangian_worst;
    report(4, lambda_err <= 1e-8 && rep.budget_gap <= 1e-8 && lagrangian_worst <= 1e-6,
           what.str());
}

// --- criterion 5: no gap for expected utility --------------------------------

void criterion_5() {
    const ScaleMap scale = ScaleMap::identity(0.0, 2.0, 1.0);
    const ThresholdGrid grid = ThresholdGrid::regular(scale.image(), 1.0, 200, 200);
    const std::vector<Utility> us = {Utility::square_root(), Utility::exponential(1.0),
                                     Utility::power(1.0, 0.8), Utility::power(1.0, 2.0),
                                     Utility::exponential(-1.0), Utility::power(1.0, 1.5)};
    double worst = 0.0;
    for (const Utility& u : us) {
        const CompareReport rep = compare_rule_classes(Objective::make_eu(u), scale, grid);
        worst = std::max(worst, std::abs(rep.gap));
    }
    std::ostringstream what;
    what << "expected-utility gap on a 200x200 grid, worst |gap| " << worst
         << " over 3 concave + 3 convex utilities";
    report(5, worst <= 1e-6, what.str());
}

// --- criterion 6: the frozen crossing instance has a strict gap ---------------

void criterion_6() {
    const Utility ua =
        Utility::piecewise_linear({{0.0, 0.0}, {0.05, 0.05}, {2.9, 1.475}, {4.0, 2.575}});
    const Utility ub =
        Utility::piecewise_linear({{0.0, 0.0}, {0.65, 0.325}, {1.65, 1.325}, {4.0, 2.5}});
    const ScaleMap scale = ScaleMap::identity(0.0, 4.0, 1.0);
    const ThresholdGrid grid = ThresholdGrid::regular(scale.image(), 1.0, 200, 200);
    const CompareReport rep =
        compare_rule_classes(Objective::make_csc({ua, ub}), scale, grid);
    const OptimReport mix =
        optimize_csc_mixture(ua, ub, TwoPointLaw{0.05, 1.65, 1.0}.to_distribution(),
                             TwoPointLaw{0.05, 4.0, 1.0}.to_distribution());
    std::ostringstream what;
    what << "frozen csc instance: randomized-vs-pure gap " << rep.gap
         << ", equalization residual " << mix.residual << " at theta* " << *mix.theta_star;
    report(6, rep.gap >= 1e-3 && mix.residual <= 1e-8, what.str());
}

// --- criterion 7: Monte Carlo realization ------------------------------------

void criterion_7(bool exact) {
    const auto t0 = std::chrono::steady_clock::now();
    const DiffusionSpec bm1 = brownian(1.0, 0.0, kInf);
    int good_seeds = 0;
    for (int seed = 0; seed < 10; ++seed) {
        SimConfig cfg;
        cfg.dt = 1e-2;
        cfg.paths = 100000;
        cfg.seed = static_cast<std::uint64_t>(seed);
        cfg.max_steps = 2000000;
        cfg.exact_sampling = exact;
        const SimResult res = run_threshold(bm1, {0.0, 2.0, 1.0}, cfg);
        long at_zero = 0;
        for (double v : res.law.samples) at_zero += v == 0.0 ? 1 : 0;
        const double p = static_cast<double>(at_zero) / static_cast<double>(res.law.total());
        if (std::abs(p - 0.5) <= 3.0 * std::sqrt(0.25 / 100000.0)) ++good_seeds;
    }

    const Distribution nu = Distribution::from_atoms({{0.0, 0.5}, {3.0, 0.5}});
    SimConfig vcfg;
    vcfg.dt = 8e-3;
    vcfg.paths = 100000;
    vcfg.seed = 42;
    vcfg.max_steps = 25000000;  // horizon 2e5 keeps one-sided censoring < 0.1%
    vcfg.exact_sampling = exact;
    const VerifyReport vr = verify_embedding(brownian(2.0, 0.0, kInf), nu, vcfg);

    const double dt = seconds_since(t0);
    const double budget = exact ? 2.0 : 60.0;
    std::ostringstream what;
    what << "monte carlo (" << (exact ? "exact sampling" : "path simulation") << "): "
         << good_seeds << "/10 seeds within 3 binomial SE, verify W1 " << vr.w1
         << " (tol " << vr.tol << ", censored " << vr.censored_fraction << "), " << dt
         << " s";
    report(7, good_seeds >= 9 && vr.pass && vr.w1 <= 0.03 && dt < budget, what.str());
}

// --- criterion 8: scale function closed forms vs quadrature -------------------

void criterion_8() {
    double worst = 0.0;
    {
        DiffusionSpec spec = brownian(0.0, -kInf, kInf);
        spec.drift.value = 0.5;
        const ScaleMap closed = build_scale(spec);
        const ScaleMap numeric = build_scale_numeric(spec);
        for (int k = 1; k < 100; ++k) {
            const double z = -1.5 + 4.0 * k / 100.0;
            const double a = closed.forward(z), b = numeric.forward(z);
            worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
        }
    }
    for (const double mu : {0.05, 0.02}) {
        DiffusionSpec spec;
        spec.drift = {CoefSpec::Kind::linear, mu, {}};
        spec.vol = {CoefSpec::Kind::linear, 0.3, {}};
        spec.lo = 0.0;
        spec.hi = kInf;
        spec.start = 1.0;
        const ScaleMap closed = build_scale(spec);
        const ScaleMap numeric = build_scale_numeric(spec);
        for (int k = 1; k < 100; ++k) {
            const double z = 0.3 + 3.7 * k / 100.0;
            const double a = closed.forward(z), b = numeric.forward(z);
            worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
        }
    }
    std::ostringstream what;
    what << "scale functions: closed form vs quadrature, worst relative error " << worst;
    report(8, worst <= 1e-6, what.str());
}

// --- criterion 9: byte-identical command output -------------------------------

void criterion_9() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "stoplaw_acceptance_det";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "config.json");
        cfg << R"({
          "target": {"atoms": [[0.0, 0.5], [3.0, 0.5]], "quantile_grid": [], "continuous_weight": 0},
          "diffusion": {"drift": {"kind": "constant", "value": 0},
                        "vol": {"kind": "constant", "value": 1},
                        "interval": [0, null], "start": 2.0},
          "sim": {"paths": 20000, "seed": 7, "exact_sampling": true}
        })";
    }
    auto run = [&](const std::string& cmd, const std::string& sub) {
        CliOptions opt;
        opt.command = cmd;
        opt.config_path = (dir / "config.json").string();
        opt.out_dir = (dir / sub).string();
        return run_command(opt);
    };
    auto slurp = [&](const std::string& sub, const char* name) {
        std::ifstream in(dir / sub / name, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    bool ok = run("embed", "e1") == 0 && run("embed", "e2") == 0;
    ok = ok && slurp("e1", "rule.json") == slurp("e2", "rule.json");
    ok = ok && slurp("e1", "check.json") == slurp("e2", "check.json");
    ok = ok && slurp("e1", "rule.csv") == slurp("e2", "rule.csv");

    // simulate twice off the written rule
    {
        json sim_cfg = json::parse(slurp(".", "config.json"));
        sim_cfg["rule_path"] = (dir / "e1" / "rule.json").string();
        std::ofstream out(dir / "simcfg.json");
        out << sim_cfg.dump();
    }
    auto run_sim = [&](const std::string& sub) {
        CliOptions opt;
        opt.command = "simulate";
        opt.config_path = (dir / "simcfg.json").string();
        opt.out_dir = (dir / sub).string();
        return run_command(opt);
    };
    ok = ok && run_sim("s1") == 0 && run_sim("s2") == 0;
    ok = ok && slurp("s1", "summary.json") == slurp("s2", "summary.json");
    ok = ok && slurp("s1", "paths.csv") == slurp("s2", "paths.csv");
    report(9, ok, "identical configs and seeds give byte-identical rule/check/summary/paths");
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7(false);
    criterion_7(true);
    criterion_8();
    criterion_9();
    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", g_failures);
    return 1;
}
