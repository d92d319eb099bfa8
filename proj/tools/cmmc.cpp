// Command-line front end: simulate patterns, compute summary curves, run
// conformal multiple Monte Carlo tests, evaluate exact FWER sweeps, emit
// graphical envelope reports, and drive full simulation studies.

#include "cmmc/conformal.hpp"
#include "cmmc/envelopes.hpp"
#include "cmmc/exact_fwer.hpp"
#include "cmmc/fitting.hpp"
#include "cmmc/generate.hpp"
#include "cmmc/multiplicity.hpp"
#include "cmmc/pattern_io.hpp"
#include "cmmc/study.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace cmmc;

namespace {

std::vector<PointPattern> read_patterns(const std::vector<std::string>& paths) {
    std::vector<PointPattern> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(read_pattern(p));
    return out;
}

std::vector<CurveStatistic> curves_of(const std::vector<PointPattern>& patterns,
                                      const DistanceGrid& grid, StatisticKind kind) {
    std::vector<CurveStatistic> out;
    out.reserve(patterns.size());
    for (const auto& p : patterns) out.push_back(curve_or_extreme(p, grid, kind));
    return out;
}

std::vector<int> parse_int_list(const std::string& spec) {
    // either comma-separated values or lo:hi:step
    std::vector<int> out;
    const auto c1 = spec.find(':');
    if (c1 != std::string::npos) {
        const auto c2 = spec.find(':', c1 + 1);
        const int lo = std::stoi(spec.substr(0, c1));
        const int hi = std::stoi(spec.substr(c1 + 1, c2 - c1 - 1));
        const int step = c2 == std::string::npos ? 1 : std::stoi(spec.substr(c2 + 1));
        for (int v = lo; v <= hi; v += step) out.push_back(v);
        return out;
    }
    std::istringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

std::vector<double> parse_double_list(const std::string& spec) {
    std::vector<double> out;
    std::istringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"conformal multiple Monte Carlo testing for replicated point patterns"};
    app.require_subcommand(1);

    // ---- simulate ----------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "simulate point patterns and write pattern files");
    std::string sim_model = "poisson:200";
    std::string sim_window = "0,1,0,1";
    int sim_count = 1;
    std::uint64_t sim_seed = 1;
    long sim_strauss_steps = 100000;
    int sim_lgcp_grid = 64;
    std::string sim_out = ".";
    sim->add_option("--model", sim_model, "model spec, e.g. poisson:200 | strauss:250,0.6,0.03 | lgcp:5,0.6,0.05");
    sim->add_option("--window", sim_window, "x_min,x_max,y_min,y_max");
    sim->add_option("--count", sim_count, "number of patterns");
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--strauss-steps", sim_strauss_steps, "Metropolis-Hastings proposals");
    sim->add_option("--lgcp-grid", sim_lgcp_grid, "Gaussian field lattice size");
    sim->add_option("--out", sim_out, "output directory");

    // ---- curves ------------------------------------------------------------
    auto* cur = app.add_subcommand("curves", "compute summary curves from pattern files");
    std::vector<std::string> cur_files;
    std::string cur_stat = "centered_l";
    int cur_grid_m = 64;
    double cur_rmax = 0.25;
    std::string cur_out = ".";
    cur->add_option("files", cur_files, "pattern files")->required();
    cur->add_option("--stat", cur_stat, "centered_l | j");
    cur->add_option("--grid-m", cur_grid_m, "grid size");
    cur->add_option("--grid-rmax", cur_rmax, "largest distance");
    cur->add_option("--out", cur_out, "output directory");

    // ---- test --------------------------------------------------------------
    auto* tst = app.add_subcommand("test", "conformal p-values and rejection report");
    std::vector<std::string> tst_nulls, tst_tests;
    std::string tst_stat = "centered_l";
    std::string tst_score = "parallel";
    std::string tst_proc = "storey_bh";
    double tst_alpha = 0.05, tst_lambda = 0.5, tst_rmax = 0.25;
    int tst_grid_m = 64;
    std::string tst_pvals = "pvalues.csv", tst_report = "rejections.csv";
    tst->add_option("--nulls", tst_nulls, "null pattern files")->required();
    tst->add_option("--tests", tst_tests, "test pattern files")->required();
    tst->add_option("--stat", tst_stat, "centered_l | j");
    tst->add_option("--score", tst_score, "parallel | joint | naive");
    tst->add_option("--procedure", tst_proc, "bh|storey_bh|hochberg|hommel|bonferroni|sidak");
    tst->add_option("--alpha", tst_alpha, "significance level");
    tst->add_option("--lambda", tst_lambda, "Storey lambda");
    tst->add_option("--grid-m", tst_grid_m, "grid size");
    tst->add_option("--grid-rmax", tst_rmax, "largest distance");
    tst->add_option("--pvalues", tst_pvals, "p-value CSV path");
    tst->add_option("--report", tst_report, "rejection CSV path");

    // ---- fwer-exact --------------------------------------------------------
    auto* fw = app.add_subcommand("fwer-exact", "exact FWER sweep over the null-sample size");
    std::string fw_proc = "hochberg";
    std::string fw_ns = "10:200:10";
    int fw_m = 10, fw_m0 = -1;
    std::string fw_alphas = "0.05,0.1";
    std::string fw_out = "fwer_exact.csv";
    bool fw_rational = false;
    fw->add_option("--procedure", fw_proc, "hochberg | sidak");
    fw->add_option("--n-grid", fw_ns, "n values: comma list or lo:hi:step");
    fw->add_option("--m", fw_m, "number of hypotheses");
    fw->add_option("--m0", fw_m0, "number of true nulls (default m)");
    fw->add_option("--alpha", fw_alphas, "significance levels, comma list");
    fw->add_option("--out", fw_out, "output CSV");
    fw->add_flag("--print-rational", fw_rational, "also print exact rationals to stdout");

    // ---- envelope ----------------------------------------------------------
    auto* env = app.add_subcommand("envelope", "graphical envelope report for test patterns");
    std::vector<std::string> env_nulls, env_tests;
    std::string env_stat = "centered_l";
    double env_alpha = 0.05, env_lambda = 0.5, env_rmax = 0.25;
    int env_grid_m = 64;
    std::string env_outdir = "envelopes";
    env->add_option("--nulls", env_nulls, "null pattern files")->required();
    env->add_option("--tests", env_tests, "test pattern files")->required();
    env->add_option("--stat", env_stat, "centered_l | j");
    env->add_option("--alpha", env_alpha, "significance level");
    env->add_option("--lambda", env_lambda, "Storey lambda");
    env->add_option("--grid-m", env_grid_m, "grid size");
    env->add_option("--grid-rmax", env_rmax, "largest distance");
    env->add_option("--outdir", env_outdir, "output directory");

    // ---- fit ---------------------------------------------------------------
    auto* fit = app.add_subcommand("fit", "fit a parametric model family to patterns");
    std::vector<std::string> fit_files;
    std::string fit_family = "poisson";
    std::string fit_out;
    fit->add_option("files", fit_files, "pattern files")->required();
    fit->add_option("--family", fit_family, "poisson | strauss | lgcp");
    fit->add_option("--out", fit_out, "report path (default stdout)");

    // ---- study -------------------------------------------------------------
    auto* st = app.add_subcommand("study", "run a simulation study scenario");
    std::string st_config;
    std::vector<std::string> st_overrides;
    std::string st_outdir = "study_out";
    std::string st_mode = "local";
    std::string st_lambdas, st_ms, st_ns;
    st->add_option("--config", st_config, "key=value config file");
    st->add_option("--set", st_overrides, "config overrides key=value (repeatable)");
    st->add_option("--outdir", st_outdir, "output directory");
    st->add_option("--mode", st_mode, "local | lambda-sweep | multiplicity-sweep | global-null");
    st->add_option("--lambdas", st_lambdas, "comma list (lambda-sweep mode)");
    st->add_option("--ms", st_ms, "comma list of m values (multiplicity-sweep mode)");
    st->add_option("--ns", st_ns, "n values: comma list or lo:hi:step (multiplicity-sweep mode)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            const auto wv = parse_double_list(sim_window);
            if (wv.size() != 4) throw std::invalid_argument("--window needs 4 numbers");
            const Window w(wv[0], wv[1], wv[2], wv[3]);
            const NullModel model = parse_model(sim_model);
            fs::create_directories(sim_out);
            RngStream rng(sim_seed, 0);
            const SimOptions opts{sim_strauss_steps, sim_lgcp_grid};
            for (int i = 0; i < sim_count; ++i) {
                RngStream stream(sim_seed, static_cast<std::uint64_t>(i));
                const PointPattern p = simulate_null(model, w, stream, opts);
                const std::string path = sim_out + "/pattern_" + std::to_string(i) + ".txt";
                write_pattern(p, path);
                std::cout << path << " n_points " << p.size() << "\n";
            }
            return 0;
        }

        if (*cur) {
            const DistanceGrid grid = DistanceGrid::regular(cur_rmax, cur_grid_m);
            const StatisticKind kind = parse_statistic_kind(cur_stat);
            fs::create_directories(cur_out);
            for (const auto& file : cur_files) {
                const PointPattern p = read_pattern(file);
                const CurveStatistic c = curve_or_extreme(p, grid, kind);
                const std::string path =
                    cur_out + "/" + fs::path(file).stem().string() + "_" + cur_stat + ".csv";
                write_curve_csv(c, path);
                std::cout << path << "\n";
            }
            return 0;
        }

        if (*tst) {
            const DistanceGrid grid = DistanceGrid::regular(tst_rmax, tst_grid_m);
            const StatisticKind kind = parse_statistic_kind(tst_stat);
            const auto nulls = curves_of(read_patterns(tst_nulls), grid, kind);
            const auto tests = curves_of(read_patterns(tst_tests), grid, kind);
            PValueVector pv = [&] {
                if (tst_score == "naive") return naive_mmctest_pvalues(nulls, tests);
                const TestSetup setup(nulls, tests);
                return tst_score == "joint" ? conformal_pvalues_joint(setup)
                                            : conformal_pvalues_parallel(setup);
            }();
            write_pvalues_csv(pv, tst_pvals);
            const Procedure proc = parse_procedure(tst_proc);
            RejectionSet rej = [&] {
                switch (proc) {
                    case Procedure::bh: return bh_procedure(pv, tst_alpha);
                    case Procedure::storey_bh:
                        return storey_bh(pv, tst_alpha, snap_lambda(tst_lambda, pv.n_effective));
                    case Procedure::hochberg: return hochberg_procedure(pv, tst_alpha);
                    case Procedure::hommel: return hommel_procedure(pv, tst_alpha);
                    case Procedure::bonferroni:
                        return bonferroni(pv, tst_alpha, static_cast<double>(pv.size()));
                    case Procedure::sidak:
                        return sidak(pv, tst_alpha, static_cast<double>(pv.size()));
                }
                throw std::logic_error("bad procedure");
            }();
            write_rejection_csv(pv, rej, tst_report);
            std::cout << "rejected " << rej.count() << " of " << pv.size() << " hypotheses\n";
            return 0;
        }

        if (*fw) {
            if (fw_m0 < 0) fw_m0 = fw_m;
            const auto ns = parse_int_list(fw_ns);
            const auto alphas = parse_double_list(fw_alphas);
            std::ofstream out(fw_out);
            if (!out) throw std::runtime_error("cannot open " + fw_out);
            out << "n,m,m0,procedure,alpha,fwer_exact\n";
            for (const double alpha : alphas) {
                for (const int n : ns) {
                    const std::vector<int> thresholds =
                        fw_proc == "sidak"
                            ? sidak_thresholds(n, fw_m, alpha, static_cast<double>(fw_m0))
                            : hochberg_thresholds(n, fw_m, alpha);
                    const Rational fwer =
                        exact_fwer_partial_nulls(n, fw_m, fw_m0, thresholds);
                    out << n << ',' << fw_m << ',' << fw_m0 << ',' << fw_proc << ','
                        << format_double(alpha) << ',' << format_double(fwer.to_double()) << '\n';
                    if (fw_rational)
                        std::cout << "n=" << n << " alpha=" << alpha << " fwer=" << fwer.str()
                                  << "\n";
                }
            }
            std::cout << fw_out << "\n";
            return 0;
        }

        if (*env) {
            const DistanceGrid grid = DistanceGrid::regular(env_rmax, env_grid_m);
            const StatisticKind kind = parse_statistic_kind(env_stat);
            const auto nulls = curves_of(read_patterns(env_nulls), grid, kind);
            const auto tests = curves_of(read_patterns(env_tests), grid, kind);
            const TestSetup setup(nulls, tests);
            const auto reports = storey_bh_envelopes(setup, env_alpha, env_lambda);
            fs::create_directories(env_outdir);
            std::vector<std::string> files;
            for (const auto& rep : reports) {
                const std::string name = "envelope_" + std::to_string(rep.test_index + 1) + ".csv";
                write_envelope_csv(rep, env_outdir + "/" + name);
                files.push_back(name);
            }
            write_envelope_manifest(reports, files, env_outdir + "/manifest.csv");
            std::cout << env_outdir << "/manifest.csv\n";
            return 0;
        }

        if (*fit) {
            const auto patterns = read_patterns(fit_files);
            const std::string report = fitted_model_report(patterns, parse_model_family(fit_family));
            if (fit_out.empty()) {
                std::cout << report;
            } else {
                std::ofstream out(fit_out);
                if (!out) throw std::runtime_error("cannot open " + fit_out);
                out << report;
                std::cout << fit_out << "\n";
            }
            return 0;
        }

        if (*st) {
            ScenarioConfig cfg;
            if (!st_config.empty()) cfg = parse_config_file(st_config);
            for (const auto& kv : st_overrides) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos)
                    throw std::invalid_argument("--set expects key=value, got " + kv);
                apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
            }
            fs::create_directories(st_outdir);

            if (st_mode == "local") {
                const StudyResult res = run_study(cfg);
                write_study_tables(res, cfg.procedures, st_outdir);
                for (const auto& note : res.notes) std::cout << "note: " << note << "\n";
                std::cout << "tie_rate " << res.tie_rate << "\n" << st_outdir << "\n";
            } else if (st_mode == "lambda-sweep") {
                if (st_lambdas.empty()) throw std::invalid_argument("--lambdas required");
                const auto sweep = run_lambda_sweep(cfg, parse_double_list(st_lambdas));
                for (const auto& [lambda, res] : sweep) {
                    const std::string dir = st_outdir + "/lambda_" + format_double(lambda);
                    write_study_tables(res, cfg.procedures, dir);
                }
                std::cout << st_outdir << "\n";
            } else if (st_mode == "multiplicity-sweep") {
                if (st_ms.empty() || st_ns.empty())
                    throw std::invalid_argument("--ms and --ns required");
                const auto rows = run_multiplicity_sweep(cfg, cfg.alpha_grid,
                                                         parse_int_list(st_ms),
                                                         parse_int_list(st_ns));
                write_sweep_table(rows, st_outdir + "/tdr_sweep.csv");
                std::cout << st_outdir << "/tdr_sweep.csv\n";
            } else if (st_mode == "global-null") {
                const auto cells = run_global_null_study(cfg);
                write_global_null_table(cells, st_outdir + "/global_null.csv");
                std::cout << st_outdir << "/global_null.csv\n";
            } else {
                throw std::invalid_argument("unknown study mode: " + st_mode);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
