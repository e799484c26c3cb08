#include "stoplaw/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "stoplaw/errors.hpp"
#include "stoplaw/json_io.hpp"

namespace stoplaw {

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("cannot parse '" + path + "': " + e.what());
    }
    return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

void write_json(const std::filesystem::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

std::string fmt_num(double x) {
    if (x == kInf) return "inf";
    if (x == -kInf) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", round_sig(x, 12));
    return buf;
}

// config objects may be inline or referenced by "<key>_path"
json fetch(const json& config, const std::string& key) {
    if (config.contains(key)) return config.at(key);
    const std::string path_key = key + "_path";
    if (config.contains(path_key)) return load_json(config.at(path_key).get<std::string>());
    throw ConfigError("config: missing '" + key + "'");
}

DiffusionSpec diffusion_from_config(const json& config) {
    if (config.contains("diffusion") || config.contains("diffusion_path")) {
        return diffusion_from_json(fetch(config, "diffusion"));
    }
    // natural-scale shortcut: driftless unit-vol diffusion on the given space
    if (config.contains("space") && config.contains("start")) {
        DiffusionSpec spec;
        spec.drift = {CoefSpec::Kind::constant, 0.0, {}};
        spec.vol = {CoefSpec::Kind::constant, 1.0, {}};
        spec.lo = num_from_json(config.at("space").at(0), -kInf);
        spec.hi = num_from_json(config.at("space").at(1), kInf);
        spec.start = config.at("start").get<double>();
        spec.validate();
        return spec;
    }
    throw ConfigError("config: need 'diffusion' or 'space'+'start'");
}

SimConfig sim_from_config(const json& config, const CliOptions& opt) {
    SimConfig cfg = config.contains("sim") ? sim_config_from_json(config.at("sim")) : SimConfig{};
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.paths) cfg.paths = *opt.paths;
    if (opt.exact_sampling) cfg.exact_sampling = *opt.exact_sampling;
    cfg.validate();
    return cfg;
}

ThresholdGrid grid_from_config(const json& config, const CliOptions& opt,
                               const ScaleMap& scale) {
    int n_a = 200, n_b = 200;
    double span = 0.0;
    if (config.contains("grid")) {
        n_a = config.at("grid").value("n_a", n_a);
        n_b = config.at("grid").value("n_b", n_b);
        span = config.at("grid").value("span", span);
    }
    if (opt.grid) {
        n_a = opt.grid->first;
        n_b = opt.grid->second;
    }
    return ThresholdGrid::regular(scale.image(), scale.x(), n_a, n_b, span);
}

void export_rule_csv(const std::filesystem::path& path, const RandomizedRule& rule, int n) {
    const RandomizedRule atomized = approximate_by_atoms(rule, n);
    std::ostringstream out;
    out << "a,b,mass\n";
    for (const RuleAtom& a : atomized.atoms) {
        out << fmt_num(a.pair.a) << ',' << fmt_num(a.pair.b) << ',' << fmt_num(a.mass) << '\n';
    }
    write_text(path, out.str());
}

int cmd_embed(const json& config, const CliOptions& opt) {
    const Distribution target_y = distribution_from_json(fetch(config, "target"));
    const DiffusionSpec spec = diffusion_from_config(config);
    const ScaleMap scale = build_scale(spec);
    const std::filesystem::path out(opt.out_dir);

    Distribution nu_x;
    HallDetails det;
    try {
        nu_x = pushforward(target_y, scale, Direction::forward);
        det = hall_embed_details(nu_x, scale.x(), scale.image());
    } catch (const ConstraintError& e) {
        write_json(out / "check.json", {{"error", "unattainable"}, {"reason", e.what()}});
        std::cerr << "embed: " << e.what() << "\n";
        return 2;
    }
    write_json(out / "rule.json", to_json(det.rule));
    export_rule_csv(out / "rule.csv", det.rule, 64);

    const Distribution push = rule_pushforward(det.rule);
    double atom_err = 0.0;
    for (const Atom& a : nu_x.atoms()) {
        atom_err = std::max(atom_err, std::abs(push.mass_at(a.z) - a.mass));
    }
    const double w1 = wasserstein1(push, nu_x);
    const bool pass = nu_x.purely_atomic() ? atom_err <= 1e-10 : w1 <= 1e-6;
    json check;
    check["pass"] = pass;
    check["per_atom_error"] = json_num(atom_err);
    check["w1"] = json_num(w1);
    check["v_star"] = json_num(det.v_star);
    check["z_star"] = json_num(det.z_star);
    check["c"] = json_num(det.c);
    write_json(out / "check.json", check);
    return pass ? 0 : 1;
}

int cmd_simulate(const json& config, const CliOptions& opt) {
    const RandomizedRule rule = rule_from_json(fetch(config, "rule"));
    const DiffusionSpec spec = diffusion_from_config(config);
    const ScaleMap scale = build_scale(spec);
    SimConfig cfg = sim_from_config(config, opt);
    cfg.record_paths = true;
    const SimResult res = run_randomized(spec, rule, scale, cfg);

    const std::filesystem::path out(opt.out_dir);
    std::ostringstream csv;
    csv << "path_id,a,b,stopped_value,censored\n";
    for (const PathRecord& r : res.records) {
        csv << r.id << ',' << fmt_num(r.a) << ',' << fmt_num(r.b) << ',' << fmt_num(r.value)
            << ',' << (r.censored ? 1 : 0) << '\n';
    }
    write_text(out / "paths.csv", csv.str());

    json summary;
    summary["paths"] = cfg.paths;
    summary["censored_fraction"] =
        json_num(static_cast<double>(res.law.censored) / static_cast<double>(res.law.total()));
    const bool enough = static_cast<long>(res.law.samples.size()) >= 100;
    if (config.contains("target") || config.contains("target_path")) {
        const Distribution target = distribution_from_json(fetch(config, "target"));
        const Distribution emp = res.law.to_distribution();
        summary["w1"] = json_num(wasserstein1(emp, target));
        summary["ks"] = json_num(ks_statistic(res.law, target));
        json masses = json::array();
        for (const Atom& a : target.atoms()) {
            masses.push_back({{"z", json_num(a.z)},
                              {"target", json_num(a.mass)},
                              {"empirical", json_num(emp.mass_at(a.z))}});
        }
        summary["masses"] = std::move(masses);
        if (enough) {
            const double tol = std::max(0.02, 5.0 * res.law.stddev() /
                                                   std::sqrt(static_cast<double>(
                                                       res.law.samples.size())));
            summary["tol"] = json_num(tol);
            summary["pass"] = summary["w1"].get<double>() <= tol &&
                              summary["censored_fraction"].get<double>() <= 1e-3;
        } else {
            summary["verdict"] = "insufficient-n";
        }
    } else if (!enough) {
        summary["verdict"] = "insufficient-n";
    }
    if (res.law.censored * 2 > res.law.total()) {
        summary["warning"] = "more than half of the paths hit the horizon";
    }
    write_json(out / "summary.json", summary);
    return 0;
}

int cmd_optimize_rdu(const json& config, const CliOptions& opt) {
    const Utility v = utility_from_json(config.at("utility"));
    const Weighting w = weighting_from_json(config.at("weighting"));
    const double y = config.at("start").get<double>();
    const int cells = config.value("grid_cells", 4096);
    const OptimReport rep = optimize_rdu_quantile(v, w, y, cells);

    const std::filesystem::path out(opt.out_dir);
    write_json(out / "report.json", to_json(rep));
    if (rep.best_rule) write_json(out / "rule.json", to_json(*rep.best_rule));
    std::ostringstream csv;
    csv << "u,g_star\n";
    if (rep.target) {
        const int n = 512;
        for (int k = 1; k < n; ++k) {
            const double u = static_cast<double>(k) / n;
            csv << fmt_num(u) << ',' << fmt_num(rep.target->quantile(u)) << '\n';
        }
    }
    write_text(out / "gstar.csv", csv.str());
    return 0;
}

int cmd_optimize_csc(const json& config, const CliOptions& opt) {
    const Utility ua = utility_from_json(config.at("utility_a"));
    const Utility ub = utility_from_json(config.at("utility_b"));
    const Distribution law1 = distribution_from_json(fetch(config, "law1"));
    const Distribution law2 = distribution_from_json(fetch(config, "law2"));
    const OptimReport rep = optimize_csc_mixture(ua, ub, law1, law2);
    write_json(std::filesystem::path(opt.out_dir) / "report.json", to_json(rep));
    return 0;
}

int cmd_compare(const json& config, const CliOptions& opt) {
    const Objective obj = objective_from_json(config.at("objective"));
    const DiffusionSpec spec = diffusion_from_config(config);
    const ScaleMap scale = build_scale(spec);
    const ThresholdGrid grid = grid_from_config(config, opt, scale);
    const CompareReport rep = compare_rule_classes(obj, scale, grid);
    write_json(std::filesystem::path(opt.out_dir) / "compare.json", to_json(rep));
    return 0;
}

int cmd_scale_info(const json& config, const CliOptions& opt) {
    const DiffusionSpec spec = diffusion_from_config(config);
    const ScaleMap scale = build_scale(spec);
    json j;
    j["family"] = scale.family();
    j["case"] = to_string(scale.tag());
    j["x"] = json_num(scale.x());
    j["image"] = {json_num(scale.image().lo), json_num(scale.image().hi)};
    const double lo = std::isfinite(spec.lo) ? spec.lo
                                             : spec.start - 5.0 * std::max(1.0, std::abs(spec.start));
    const double hi = std::isfinite(spec.hi) ? spec.hi
                                             : spec.start + 5.0 * std::max(1.0, std::abs(spec.start));
    json table = json::array();
    std::ostringstream csv;
    csv << "z,s\n";
    const int n = 100;
    for (int k = 1; k < n; ++k) {
        const double z = lo + (hi - lo) * k / n;
        const double s = scale.forward(z);
        table.push_back({json_num(z), json_num(s)});
        csv << fmt_num(z) << ',' << fmt_num(s) << '\n';
    }
    j["table"] = std::move(table);
    const std::filesystem::path out(opt.out_dir);
    write_json(out / "scale.json", j);
    write_text(out / "scale.csv", csv.str());
    std::cout << "case: " << to_string(scale.tag()) << "  x = " << fmt_num(scale.x())
              << "  image = [" << fmt_num(scale.image().lo) << ", "
              << fmt_num(scale.image().hi) << "]\n";
    return 0;
}

}  // namespace

int run_command(const CliOptions& opt) {
    try {
        std::filesystem::create_directories(opt.out_dir);
        const json config = load_json(opt.config_path);
        if (opt.command == "embed") return cmd_embed(config, opt);
        if (opt.command == "simulate") return cmd_simulate(config, opt);
        if (opt.command == "optimize-rdu") return cmd_optimize_rdu(config, opt);
        if (opt.command == "optimize-csc") return cmd_optimize_csc(config, opt);
        if (opt.command == "compare") return cmd_compare(config, opt);
        if (opt.command == "scale-info") return cmd_scale_info(config, opt);
        std::cerr << "unknown command '" << opt.command << "'\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ConstraintError& e) {
        std::cerr << "constraint error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace stoplaw
