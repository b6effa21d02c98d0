#include "cskor/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cskor/analytic_map.hpp"
#include "cskor/boundary.hpp"
#include "cskor/svg.hpp"
#include "cskor/verify.hpp"

namespace cskor::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Options {
    std::string dist;
    int order = 4096;
    int samples = 0; // 0 -> 8*order
    std::string mode = "auto";
    std::string variant = "delta_infinity";
    int n_paths = 100000;
    double dt_max = 1e-4;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string p_list = "1,2";
    std::string output_dir;
    bool plot = false;
    int grid = 4096;
    int threads = 0;
};

CoeffMode parse_mode(const std::string& s) {
    if (s == "auto") return CoeffMode::Auto;
    if (s == "direct") return CoeffMode::Direct;
    if (s == "split") return CoeffMode::Split;
    throw ValidationError("unknown mode: " + s + " (want auto|direct|split)");
}

std::vector<double> parse_p_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw ValidationError("empty p list");
    return out;
}

fs::path resolve_output_dir(const Options& opt) {
    std::string dir = opt.output_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv("CSKOR_OUTPUT_DIR")) dir = env;
    }
    if (dir.empty()) dir = ".";
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

void validate_common(const Options& opt, bool needs_rng) {
    const int samples = opt.samples > 0 ? opt.samples : 8 * opt.order;
    if (samples < 8 * opt.order)
        throw ValidationError("sample count must be at least 8x the order");
    if (opt.dt_max > 1e-3 || opt.dt_max <= 0.0) throw ValidationError("dt_max must lie in (0, 1e-3]");
    if (needs_rng && opt.n_paths > 0 && !opt.seed_given)
        throw ValidationError("a seed is required whenever paths are simulated");
}

Distribution load_dist(const Options& opt) {
    if (opt.dist.empty()) throw ValidationError("--dist is required");
    Distribution d = Distribution::parse(opt.dist);
    if (d.kind() == DistKind::Cauchy) return d; // formal mode only
    if (!d.nondegenerate()) throw DegenerateError();
    if (!d.is_centered()) d = d.centered();
    return d;
}

AnalyticMap make_map(const Distribution& d, const Options& opt) {
    const int samples = opt.samples > 0 ? opt.samples : 8 * opt.order;
    return build_map(d, opt.order, variant_from_name(opt.variant), parse_mode(opt.mode), samples);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << content;
}

std::string map_csv(const AnalyticMap& m) {
    std::ostringstream out;
    export_map_csv(m, out);
    return out.str();
}

std::string build_diagnostic_json(const AnalyticMap& m, const Options& opt) {
    const InjectivityDiagnostic diag = injectivity_check(m, std::max(256, opt.grid));
    nlohmann::ordered_json j;
    j["variant"] = variant_name(m.variant);
    j["order"] = m.order;
    j["log_weight"] = m.log_weight;
    j["a0"] = m.series.a0;
    j["kappa"] = m.series.kappa;
    j["split"] = m.series.split;
    j["clip_delta"] = m.series.clip_delta;
    j["moment_warning"] = m.series.moment_warning;
    if (m.variant == MapVariant::FormalCauchy)
        j["note"] = "formal mode: the law has no mean, outside the construction's hypotheses";
    j["injectivity"] = {{"monotone_violation", diag.monotone_violation},
                        {"self_intersections", diag.self_intersections},
                        {"verdict", diag.verdict == InjectivityDiagnostic::Verdict::Pass   ? "pass"
                                    : diag.verdict == InjectivityDiagnostic::Verdict::Warn ? "warn"
                                                                                           : "fail"}};
    return j.dump(2);
}

std::string boundary_csv(const BoundaryCurve& c) {
    std::ostringstream out;
    for (std::size_t i = 0; i < c.x.size(); ++i)
        out << fmt17(c.x[i]) << ',' << fmt17(c.y[i]) << "\n";
    return out.str();
}

std::string polyline_csv(const BoundaryCurve& c) {
    std::ostringstream out;
    for (std::size_t i = 0; i < c.x.size(); ++i)
        out << fmt17(c.theta[i]) << ',' << fmt17(c.x[i]) << ',' << fmt17(c.y[i]) << "\n";
    return out.str();
}

std::string curve_svg(const BoundaryCurve& c) {
    PlotSpec spec;
    for (std::size_t i = 0; i < c.x.size(); ++i) spec.curve.emplace_back(c.x[i], c.y[i]);
    spec.caption = catalog_name(c.closed_form);
    // Unbounded tails dwarf the interesting region; frame the central part.
    if (c.tail_clipped) {
        const double lo = c.x[c.x.size() / 50], hi = c.x[c.x.size() - 1 - c.x.size() / 50];
        double ymin = 0.0, ymax = 0.0;
        for (std::size_t i = 0; i < c.x.size(); ++i) {
            if (c.x[i] < lo || c.x[i] > hi) continue;
            ymin = std::min(ymin, c.y[i]);
            ymax = std::max(ymax, c.y[i]);
        }
        spec.x_min = lo;
        spec.x_max = hi;
        spec.y_min = ymin - 0.05 * (ymax - ymin + 1e-9);
        spec.y_max = ymax + 0.05 * (ymax - ymin + 1e-9);
    }
    return render_svg(spec);
}

DomainOracle domain_for(const Distribution& d, const AnalyticMap& m, const Options& opt,
                        bool& is_strip) {
    if (d.kind() == DistKind::Atomic || d.kind() == DistKind::Empirical) {
        is_strip = true;
        return make_oracle(build_strip_slit(d, opt.order));
    }
    is_strip = false;
    return make_oracle(build_boundary(m, opt.grid));
}

VerificationReport run_mc(const Distribution& d, const Options& opt) {
    bool is_strip = false;
    AnalyticMap m;
    if (d.kind() != DistKind::Atomic && d.kind() != DistKind::Empirical) m = make_map(d, opt);
    const DomainOracle oracle = domain_for(d, m, opt, is_strip);

    VerifyConfig cfg;
    cfg.seed = opt.seed;
    cfg.sim.dt_max = opt.dt_max;
    cfg.p_list = parse_p_list(opt.p_list);
    cfg.threads = opt.threads;
    return run_verification(d, oracle, opt.n_paths, cfg);
}

std::string rate_json(const VerificationReport& rep) {
    nlohmann::ordered_json j;
    j["n_paths"] = rep.n_paths;
    j["seed"] = rep.seed;
    j["dt_max"] = rep.dt_max;
    j["formula_rate"] = rep.formula_rate;
    j["rate_detected"] = rep.rate_detected;
    if (rep.rate_detected) {
        j["lambda_hat"] = rep.rate_fit.lambda;
        j["r_squared"] = rep.rate_fit.r_squared;
        j["window"] = {rep.rate_fit.window_lo, rep.rate_fit.window_hi};
        j["points"] = rep.rate_fit.points;
    }
    return j.dump(2);
}

std::string consistency_json(const Distribution& d, const AnalyticMap& m, const Options& opt) {
    const std::vector<double> sample = consistency_sample(m, opt.n_paths, opt.seed);
    const KsResult ks = ks_test(sample, [&d](double v) { return d.cdf(v); });
    double mean = 0.0;
    for (double v : sample) mean += v;
    mean /= static_cast<double>(sample.size());
    nlohmann::ordered_json j;
    j["mode"] = "consistency";
    j["note"] = "validates the quantile composition, not the domain";
    j["n"] = opt.n_paths;
    j["seed"] = opt.seed;
    j["ks_stat"] = ks.stat;
    j["ks_p_value"] = ks.p_value;
    j["sample_mean"] = mean;
    return j.dump(2);
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"Constructive conformal embedding of a law as a planar exit distribution"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&opt](CLI::App* cmd) {
        cmd->add_option("--dist", opt.dist, "distribution spec, e.g. \"kind=uniform a=-1 b=1\"");
        cmd->add_option("--N", opt.order, "series truncation order");
        cmd->add_option("--M", opt.samples, "transform sample count (default 8N)");
        cmd->add_option("--mode", opt.mode, "coefficient mode: auto|direct|split");
        cmd->add_option("--variant", opt.variant, "delta_infinity|gross|formal_cauchy");
        cmd->add_option("--grid", opt.grid, "boundary grid size");
        cmd->add_option("--output-dir,-o", opt.output_dir, "output directory");
        cmd->add_flag("--plot", opt.plot, "also write plot.svg");
    };
    auto add_mc = [&opt](CLI::App* cmd) {
        cmd->add_option("--n-paths", opt.n_paths, "Monte Carlo path count");
        cmd->add_option("--dt-max", opt.dt_max, "maximum step size");
        cmd->add_option("--seed", opt.seed, "RNG seed")->each([&opt](const std::string&) {
            opt.seed_given = true;
        });
        cmd->add_option("--p-list", opt.p_list, "comma list of moment orders");
        cmd->add_option("--threads", opt.threads, "worker threads (0 = auto)");
    };

    CLI::App* c_build = app.add_subcommand("build", "assemble the disk map; writes map.csv + build.json");
    add_common(c_build);
    CLI::App* c_boundary = app.add_subcommand("boundary", "extract the boundary curve; writes boundary.csv");
    add_common(c_boundary);
    CLI::App* c_verify = app.add_subcommand("verify", "Monte Carlo verification; writes verify.json");
    add_common(c_verify);
    add_mc(c_verify);
    CLI::App* c_rate = app.add_subcommand("rate", "survival-rate estimate; writes rate.json");
    add_common(c_rate);
    add_mc(c_rate);
    CLI::App* c_cons = app.add_subcommand("consistency", "quantile-composition check; writes consistency.json");
    add_common(c_cons);
    add_mc(c_cons);
    CLI::App* c_report = app.add_subcommand("report", "all artifacts into the output directory");
    add_common(c_report);
    add_mc(c_report);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2; // prints help or the parse error
    }

    const fs::path dir = resolve_output_dir(opt);

    if (c_build->parsed()) {
        validate_common(opt, false);
        const Distribution d = load_dist(opt);
        const AnalyticMap m = make_map(d, opt);
        write_file(dir / "map.csv", map_csv(m));
        write_file(dir / "build.json", build_diagnostic_json(m, opt));
        return 0;
    }
    if (c_boundary->parsed()) {
        validate_common(opt, false);
        const Distribution d = load_dist(opt);
        const AnalyticMap m = make_map(d, opt);
        const BoundaryCurve c = build_boundary(m, opt.grid);
        write_file(dir / "boundary.csv", boundary_csv(c));
        write_file(dir / "polyline.csv", polyline_csv(c));
        if (opt.plot) write_file(dir / "plot.svg", curve_svg(c));
        return 0;
    }
    if (c_verify->parsed()) {
        validate_common(opt, true);
        const Distribution d = load_dist(opt);
        const VerificationReport rep = run_mc(d, opt);
        write_file(dir / "verify.json", report_to_json(rep));
        return 0;
    }
    if (c_rate->parsed()) {
        validate_common(opt, true);
        const Distribution d = load_dist(opt);
        const VerificationReport rep = run_mc(d, opt);
        write_file(dir / "rate.json", rate_json(rep));
        return 0;
    }
    if (c_cons->parsed()) {
        validate_common(opt, true);
        const Distribution d = load_dist(opt);
        const AnalyticMap m = make_map(d, opt);
        write_file(dir / "consistency.json", consistency_json(d, m, opt));
        return 0;
    }
    if (c_report->parsed()) {
        validate_common(opt, true);
        const Distribution d = load_dist(opt);
        const bool atomic = d.kind() == DistKind::Atomic || d.kind() == DistKind::Empirical;
        const AnalyticMap m = make_map(d, opt);
        write_file(dir / "map.csv", map_csv(m));
        write_file(dir / "build.json", build_diagnostic_json(m, opt));
        write_file(dir / "consistency.json", consistency_json(d, m, opt));
        if (!atomic) {
            const BoundaryCurve c = build_boundary(m, opt.grid);
            write_file(dir / "boundary.csv", boundary_csv(c));
            write_file(dir / "plot.svg", curve_svg(c));
        }
        const VerificationReport rep = run_mc(d, opt);
        write_file(dir / "verify.json", report_to_json(rep));
        write_file(dir / "rate.json", rate_json(rep));
        return 0;
    }
    return 2;
}

} // namespace

int execute(const std::vector<std::string>& args) {
    try {
        return run(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0; // --help
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 3;
    }
}

} // namespace cskor::cli
