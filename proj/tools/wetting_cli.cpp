// Command-line surface of the wetting/well solver: free energies, rate
// functions, phase diagrams, exact joint laws, Gaussian comparisons, path
// sampling and the acceptance suite. CSV is emitted with 17 significant
// digits and is byte-identical for identical configuration and seed.
//
// Exit codes: 0 ok, 1 domain error, 2 configuration error.
// WETTING_THREADS limits the worker pool for grid sweeps.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "wetting/acceptance.hpp"
#include "wetting/config.hpp"
#include "wetting/emit.hpp"
#include "wetting/exact.hpp"
#include "wetting/oracles.hpp"
#include "wetting/sampler.hpp"

using json = nlohmann::json;
using namespace wetting;

namespace {

struct CommonOpts {
    LawSpec law;
    std::string output_dir = ".";
    int n_max = 0;  // 0: derived from N (10 N) with a floor of 10000
};

void add_law_options(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--family", opts.law.family,
                    "increment law: lazy | geometric | almost-geometric | custom")
        ->required();
    cmd->add_option("--gamma", opts.law.gamma, "parameter of lazy/geometric laws");
    cmd->add_option("--theta", opts.law.theta, "parameter of the almost-geometric law");
    cmd->add_option("--table", opts.law.table_path, "custom law: two-column pmf file");
    cmd->add_option("--output-dir", opts.output_dir, "directory for emitted files");
    cmd->add_option("--nmax", opts.n_max, "first-return table length override");
}

int resolve_nmax(const CommonOpts& opts, int N) {
    if (opts.n_max > 0) return std::max(opts.n_max, N);
    return std::max(10 * N, 10000);
}

std::string out_path(const CommonOpts& opts, const std::string& name) {
    std::filesystem::create_directories(opts.output_dir);
    return (std::filesystem::path(opts.output_dir) / name).string();
}

void write_summary(const CommonOpts& opts, const std::string& name, const json& j) {
    std::ofstream out(out_path(opts, name));
    out << j.dump(2) << "\n";
}

json law_json(const CommonOpts& opts) {
    json j;
    j["family"] = opts.law.family;
    if (opts.law.family == "lazy" || opts.law.family == "geometric")
        j["gamma"] = opts.law.gamma;
    if (opts.law.family == "almost-geometric") j["theta"] = opts.law.theta;
    if (opts.law.family == "custom") j["table"] = opts.law.table_path;
    return j;
}

// ---------------------------------------------------------------------------

int cmd_free_energy(const CommonOpts& opts, const std::string& grid) {
    std::vector<double> lambdas = parse_grid(grid);
    IncrementLaw law = build_law(opts.law);
    RenewalModel model = RenewalModel::from_law(law, resolve_nmax(opts, 0));

    CsvWriter csv(out_path(opts, "free_energy.csv"),
                  {"lambda", "free_energy", "free_energy_derivative"});
    std::vector<std::pair<double, double>> rows(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t i) {
        rows[i] = {model.free_energy(lambdas[i]), model.free_energy_deriv(lambdas[i])};
    });
    double max_err = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        csv.row({lambdas[i], rows[i].first, rows[i].second});
        max_err = std::max(max_err, model.free_energy_error(lambdas[i]));
    }

    json j;
    j["command"] = "free-energy";
    j["law"] = law_json(opts);
    j["lambda_c"] = model.lambda_c();
    j["kappa"] = model.kappa();
    j["error_budget"] = {{"kappa_tail", model.kappa_tail_bound()},
                         {"free_energy_max", max_err}};
    j["outputs"] = {"free_energy.csv"};
    write_summary(opts, "free_energy_summary.json", j);
    return 0;
}

int cmd_rate_function(const CommonOpts& opts, const std::string& grid,
                      const std::string& sign) {
    std::vector<double> xs = parse_grid(grid);
    IncrementLaw law = build_law(opts.law);
    RateFunction rf(law, sign == "minus" ? Sign::minus : Sign::plus);

    CsvWriter csv(out_path(opts, "rate_function.csv"),
                  {"x", "rate", "first_derivative", "second_derivative"});
    for (double x : xs) {
        double I = rf.rate(x);
        if (std::isinf(I)) {
            csv.row({x, std::string("inf"), std::string("inf"), std::string("0")});
            continue;
        }
        auto [d1, d2] = x > 0.0 ? rf.derivatives(x) : std::pair<double, double>{0.0, 0.0};
        csv.row({x, I, d1, d2});
    }

    json j;
    j["command"] = "rate-function";
    j["law"] = law_json(opts);
    j["sign"] = sign;
    j["t0"] = rf.t0().is_inf() ? json("inf") : json(rf.t0().value());
    j["rho"] = rf.rho().is_inf() ? json("inf") : json(rf.rho().value());
    j["outputs"] = {"rate_function.csv"};
    write_summary(opts, "rate_function_summary.json", j);
    return 0;
}

int cmd_phase_diagram(const CommonOpts& opts, const std::string& grid) {
    std::vector<double> lambdas = parse_grid(grid);
    IncrementLaw law = build_law(opts.law);
    WellModel model(law, resolve_nmax(opts, 0));
    auto rows = model.phase_diagram(lambdas);

    CsvWriter csv(out_path(opts, "phase_diagram.csv"),
                  {"lambda", "flat_free_energy", "critical_depth"});
    SvgSeries curve{"a_c(lambda)", "#1f77b4", {}};
    for (const auto& r : rows) {
        csv.row({r.lambda, r.flat_free_energy, r.a_c});
        curve.points.push_back({r.lambda, r.a_c});
    }

    SvgPlot plot("wetting in a square well: phase diagram", "lambda", "depth a");
    plot.add_series(std::move(curve));
    plot.add_marker({model.renewal().lambda_c(), "lambda_c", "#d62728"});
    auto [lm, lp] = model.saturation_points();
    if (lm.is_finite()) plot.add_marker({lm.value(), "lambda_-", "#2ca02c"});
    if (lp.is_finite() && !(lp == lm)) plot.add_marker({lp.value(), "lambda_+", "#9467bd"});
    plot.write(out_path(opts, "phase_diagram.svg"));

    json j;
    j["command"] = "phase-diagram";
    j["law"] = law_json(opts);
    j["lambda_c"] = model.renewal().lambda_c();
    j["lambda_minus"] = lm.is_finite() ? json(lm.value()) : json("inf");
    j["lambda_plus"] = lp.is_finite() ? json(lp.value()) : json("inf");
    j["max_depth"] =
        model.max_depth().is_finite() ? json(model.max_depth().value()) : json("inf");
    j["error_budget"] = {{"kappa_tail", model.renewal().kappa_tail_bound()}};
    j["outputs"] = {"phase_diagram.csv", "phase_diagram.svg"};
    write_summary(opts, "phase_diagram_summary.json", j);
    return 0;
}

int cmd_well_spectrum(const CommonOpts& opts, double lambda, double a, int N,
                      double threshold) {
    IncrementLaw law = build_law(opts.law);
    WellModel model(law, resolve_nmax(opts, N));
    LrLaw lr = lr_joint_law(model, lambda, a, N);

    CsvWriter csv(out_path(opts, "well_spectrum.csv"), {"l", "r", "probability"});
    for (int l = 1; l < N; ++l)
        for (int r = l; r < N; ++r) {
            double p = lr.prob(l, r);
            if (p >= threshold) csv.row({static_cast<long long>(l), static_cast<long long>(r), p});
        }
    CsvWriter marg(out_path(opts, "well_marginals.csv"), {"n", "p_left", "p_right"});
    std::vector<double> pl(static_cast<std::size_t>(N + 1), 0.0), pr(pl);
    for (int l = 1; l < N; ++l)
        for (int r = l; r < N; ++r) {
            double p = lr.prob(l, r);
            pl[static_cast<std::size_t>(l)] += p;
            pr[static_cast<std::size_t>(r)] += p;
        }
    for (int n = 0; n <= N; ++n)
        marg.row({static_cast<long long>(n), pl[static_cast<std::size_t>(n)],
                  pr[static_cast<std::size_t>(n)]});

    json j;
    j["command"] = "well-spectrum";
    j["law"] = law_json(opts);
    j["lambda"] = lambda;
    j["a"] = a;
    j["N"] = N;
    j["depth"] = lr.A;
    j["dry_atom"] = lr.dry_atom;
    j["log_partition"] = lr.split.log_Z;
    j["wet_mean_l"] = lr.mean_l;
    j["wet_mean_r"] = lr.mean_r;
    j["regime"] = to_string(model.solve(lambda, a).regime);
    j["outputs"] = {"well_spectrum.csv", "well_marginals.csv"};
    write_summary(opts, "well_spectrum_summary.json", j);
    return 0;
}

int cmd_contact_law(const CommonOpts& opts, double lambda, int N) {
    IncrementLaw law = build_law(opts.law);
    RenewalModel model = RenewalModel::from_law(law, resolve_nmax(opts, N));
    ContactNumberLaw cl = model.contact_number_law(lambda, N);

    CsvWriter csv(out_path(opts, "contact_law.csv"),
                  {"k", "probability", "gaussian_prediction"});
    for (std::size_t k = 0; k < cl.pmf.size(); ++k)
        csv.row({static_cast<long long>(k), cl.pmf[k],
                 k < cl.gaussian.size() ? cl.gaussian[k] : 0.0});

    json j;
    j["command"] = "contact-law";
    j["law"] = law_json(opts);
    j["lambda"] = lambda;
    j["N"] = N;
    j["mean_contacts"] = cl.mean();
    j["gap_mean"] = cl.gap_mean;
    j["outputs"] = {"contact_law.csv"};
    write_summary(opts, "contact_law_summary.json", j);
    return 0;
}

int cmd_verify_gaussian(const CommonOpts& opts, double lambda, double a, int N) {
    IncrementLaw law = build_law(opts.law);
    WellModel model(law, resolve_nmax(opts, N));
    LrLaw lr = lr_joint_law(model, lambda, a, N);
    GaussianConstants gc = gaussian_constants(model, lambda, a);
    GaussianComparison cmp = compare_lr_gaussian(lr, gc);

    // marginal overlays around the maximizers
    double sqN = std::sqrt(static_cast<double>(N));
    int l0 = static_cast<int>(std::lround(gc.u_star * N));
    int r0 = static_cast<int>(std::lround(gc.v_star * N));
    int wl = static_cast<int>(std::ceil(4.0 * gc.sigma1 * sqN));
    int wr = static_cast<int>(std::ceil(4.0 * gc.sigma2 * sqN));
    std::vector<double> pl(static_cast<std::size_t>(N + 1), 0.0), pr(pl);
    for (int l = 1; l < N; ++l)
        for (int r = l; r < N; ++r) {
            double p = lr.prob(l, r);
            pl[static_cast<std::size_t>(l)] += p;
            pr[static_cast<std::size_t>(r)] += p;
        }

    CsvWriter csv(out_path(opts, "verify_gaussian.csv"),
                  {"side", "n", "exact", "gaussian"});
    SvgPlot plot("exact (L, R) marginals vs Gaussian limit", "n", "probability");
    SvgSeries exact_l{"exact L", "#1f77b4", {}}, gauss_l{"gaussian L", "#d62728", {}};
    SvgSeries exact_r{"exact R", "#2ca02c", {}}, gauss_r{"gaussian R", "#9467bd", {}};
    for (int l = l0 - wl; l <= l0 + wl; ++l) {
        if (l < 0 || l > N) continue;
        double z = (l - gc.u_star * N) / sqN;
        double g = std::exp(-z * z / (2.0 * gc.sigma1 * gc.sigma1)) /
                   (std::sqrt(2.0 * M_PI) * gc.sigma1 * sqN);
        csv.row({std::string("L"), static_cast<long long>(l),
                 pl[static_cast<std::size_t>(l)], g});
        exact_l.points.push_back({static_cast<double>(l), pl[static_cast<std::size_t>(l)]});
        gauss_l.points.push_back({static_cast<double>(l), g});
    }
    for (int r = r0 - wr; r <= r0 + wr; ++r) {
        if (r < 0 || r > N) continue;
        double z = (r - gc.v_star * N) / sqN;
        double g = std::exp(-z * z / (2.0 * gc.sigma2 * gc.sigma2)) /
                   (std::sqrt(2.0 * M_PI) * gc.sigma2 * sqN);
        csv.row({std::string("R"), static_cast<long long>(r),
                 pr[static_cast<std::size_t>(r)], g});
        exact_r.points.push_back({static_cast<double>(r), pr[static_cast<std::size_t>(r)]});
        gauss_r.points.push_back({static_cast<double>(r), g});
    }
    plot.add_series(std::move(exact_l));
    plot.add_series(std::move(gauss_l));
    plot.add_series(std::move(exact_r));
    plot.add_series(std::move(gauss_r));
    plot.write(out_path(opts, "verify_gaussian.svg"));

    json j;
    j["command"] = "verify-gaussian";
    j["law"] = law_json(opts);
    j["lambda"] = lambda;
    j["a"] = a;
    j["N"] = N;
    j["u_star"] = gc.u_star;
    j["v_star"] = gc.v_star;
    j["sigma1"] = gc.sigma1;
    j["sigma2"] = gc.sigma2;
    j["sigma3"] = gc.sigma3;
    j["c0"] = gc.c0;
    j["c1"] = gc.c1;
    j["m_lambda"] = gc.m_lambda;
    j["sup_discrepancy"] = cmp.sup_discrepancy;
    j["window_mass"] = cmp.window_mass;
    j["outputs"] = {"verify_gaussian.csv", "verify_gaussian.svg"};
    write_summary(opts, "verify_gaussian_summary.json", j);
    return 0;
}

int cmd_sample(const CommonOpts& opts, double lambda, double a, int N, int paths,
               std::uint64_t seed) {
    IncrementLaw law = build_law(opts.law);
    WellModel model(law, resolve_nmax(opts, N));
    WellPathSampler sampler(model, lambda, a, N);

    std::vector<PathSample> samples(static_cast<std::size_t>(paths));
    parallel_for(static_cast<std::size_t>(paths), [&](std::size_t i) {
        samples[i] = sampler.sample(seed, static_cast<std::uint64_t>(i));
    });

    CsvWriter csv(out_path(opts, "paths.csv"), {"path", "time", "height"});
    double sl = 0, sr = 0, sh = 0, sl2 = 0, sr2 = 0, sh2 = 0;
    int wet = 0;
    for (int p = 0; p < paths; ++p) {
        const PathSample& s = samples[static_cast<std::size_t>(p)];
        for (int t = 0; t <= N; ++t)
            csv.row({static_cast<long long>(p), static_cast<long long>(t),
                     static_cast<long long>(s.heights[static_cast<std::size_t>(t)])});
        if (!s.contacts.empty()) {
            ++wet;
            double l = s.contacts.front(), r = s.contacts.back(),
                   h = static_cast<double>(s.contacts.size());
            sl += l; sr += r; sh += h;
            sl2 += l * l; sr2 += r * r; sh2 += h * h;
        }
    }

    json j;
    j["command"] = "sample";
    j["law"] = law_json(opts);
    j["lambda"] = lambda;
    j["a"] = a;
    j["N"] = N;
    j["paths"] = paths;
    j["seed"] = seed;
    j["wet_fraction"] = static_cast<double>(wet) / paths;
    if (wet > 0) {
        auto moments = [&](double s1, double s2) {
            double mean = s1 / wet;
            double se = wet > 1 ? std::sqrt(std::max(0.0, s2 / wet - mean * mean) / wet) : 0.0;
            return std::pair<double, double>{mean, se};
        };
        auto [ml, sel] = moments(sl, sl2);
        auto [mr, ser] = moments(sr, sr2);
        auto [mh, seh] = moments(sh, sh2);
        j["wet_mean_L"] = ml;
        j["wet_se_L"] = sel;
        j["wet_mean_R"] = mr;
        j["wet_se_R"] = ser;
        j["wet_mean_contacts"] = mh;
        j["wet_se_contacts"] = seh;
    }
    j["exact_dry_atom"] = sampler.lr_law().dry_atom;
    j["outputs"] = {"paths.csv"};
    write_summary(opts, "sample_summary.json", j);
    return 0;
}

int cmd_verify(const std::string& output_dir) {
    AcceptanceOptions opt;
    auto results = run_acceptance(opt, std::cout);
    json j;
    j["command"] = "verify";
    int failed = 0;
    for (const auto& r : results) {
        j["checks"].push_back({{"id", r.id},
                               {"name", r.name},
                               {"pass", r.pass},
                               {"details", r.details},
                               {"seconds", r.seconds}});
        if (!r.pass) ++failed;
    }
    j["passed"] = static_cast<int>(results.size()) - failed;
    j["failed"] = failed;
    std::filesystem::create_directories(output_dir);
    std::ofstream out((std::filesystem::path(output_dir) / "verify_report.json").string());
    out << j.dump(2) << "\n";
    std::cout << "\n" << (results.size() - failed) << "/" << results.size()
              << " acceptance checks passed\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wetting model and square-well solver"};
    app.require_subcommand(1);
    app.set_config("--config")->description("INI config with one section per subcommand");
    app.allow_config_extras(false);

    CommonOpts fe_opts, rf_opts, pd_opts, ws_opts, cl_opts, vg_opts, sm_opts;
    std::string fe_grid, rf_grid, pd_grid, rf_sign = "plus";
    double ws_lambda = 0, ws_a = 0, cl_lambda = 0, vg_lambda = 0, vg_a = 0, sm_lambda = 0,
           sm_a = 0;
    int ws_N = 0, cl_N = 0, vg_N = 0, sm_N = 0, sm_paths = 100;
    double ws_threshold = 1e-12;
    std::uint64_t sm_seed = 1;
    std::string verify_dir = ".";

    auto* fe = app.add_subcommand("free-energy", "flat-wall free energy over a lambda grid");
    add_law_options(fe, fe_opts);
    fe->add_option("--lambda", fe_grid, "lambda grid start:stop:step or single value")
        ->required();

    auto* rf = app.add_subcommand("rate-function", "Fenchel-Legendre rate function table");
    add_law_options(rf, rf_opts);
    rf->add_option("--x", rf_grid, "x grid start:stop:step or single value")->required();
    rf->add_option("--sign", rf_sign, "plus (default) or minus");

    auto* pd = app.add_subcommand("phase-diagram", "critical curve a_c(lambda) + SVG");
    add_law_options(pd, pd_opts);
    pd->add_option("--lambda", pd_grid, "lambda grid start:stop:step")->required();

    auto* ws = app.add_subcommand("well-spectrum", "exact joint (L, R) law of the well");
    add_law_options(ws, ws_opts);
    ws->add_option("--lambda", ws_lambda)->required();
    ws->add_option("--a", ws_a)->required();
    ws->add_option("--N", ws_N)->required();
    ws->add_option("--threshold", ws_threshold, "drop cells below this probability");

    auto* cl = app.add_subcommand("contact-law", "exact law of the contact number H_N");
    add_law_options(cl, cl_opts);
    cl->add_option("--lambda", cl_lambda)->required();
    cl->add_option("--N", cl_N)->required();

    auto* vg = app.add_subcommand("verify-gaussian",
                                  "exact (L, R) law against the Gaussian limit");
    add_law_options(vg, vg_opts);
    vg->add_option("--lambda", vg_lambda)->required();
    vg->add_option("--a", vg_a)->required();
    vg->add_option("--N", vg_N)->required();

    auto* sm = app.add_subcommand("sample", "draw well trajectories");
    add_law_options(sm, sm_opts);
    sm->add_option("--lambda", sm_lambda)->required();
    sm->add_option("--a", sm_a)->required();
    sm->add_option("--N", sm_N)->required();
    sm->add_option("--paths", sm_paths);
    sm->add_option("--seed", sm_seed);

    auto* vf = app.add_subcommand("verify", "run the full acceptance suite");
    vf->add_option("--output-dir", verify_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << json{{"error", e.what()}, {"kind", "config"}}.dump() << "\n";
        return 2;
    }

    try {
        if (*fe) return cmd_free_energy(fe_opts, fe_grid);
        if (*rf) return cmd_rate_function(rf_opts, rf_grid, rf_sign);
        if (*pd) return cmd_phase_diagram(pd_opts, pd_grid);
        if (*ws) return cmd_well_spectrum(ws_opts, ws_lambda, ws_a, ws_N, ws_threshold);
        if (*cl) return cmd_contact_law(cl_opts, cl_lambda, cl_N);
        if (*vg) return cmd_verify_gaussian(vg_opts, vg_lambda, vg_a, vg_N);
        if (*sm) return cmd_sample(sm_opts, sm_lambda, sm_a, sm_N, sm_paths, sm_seed);
        if (*vf) return cmd_verify(verify_dir);
    } catch (const std::invalid_argument& e) {
        std::cerr << json{{"error", e.what()}, {"kind", "domain"}}.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}, {"kind", "domain"}}.dump() << "\n";
        return 1;
    }
    return 2;
}
