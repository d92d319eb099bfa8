#include "cmmc/study.hpp"

#include "cmmc/pattern_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace cmmc {

std::string score_type_name(ScoreType s) {
    switch (s) {
        case ScoreType::parallel_erl: return "parallel";
        case ScoreType::joint_erl: return "joint";
        case ScoreType::both: return "both";
    }
    return "?";
}

ScoreType parse_score_type(const std::string& name) {
    if (name == "parallel" || name == "parallel_erl") return ScoreType::parallel_erl;
    if (name == "joint" || name == "joint_erl") return ScoreType::joint_erl;
    if (name == "both") return ScoreType::both;
    throw std::invalid_argument("unknown score type: " + name);
}

std::string statistic_kind_name(StatisticKind s) {
    return s == StatisticKind::centered_l ? "centered_l" : "j";
}

StatisticKind parse_statistic_kind(const std::string& name) {
    if (name == "centered_l" || name == "centered_L" || name == "L") return StatisticKind::centered_l;
    if (name == "j" || name == "J") return StatisticKind::j_function;
    throw std::invalid_argument("unknown statistic: " + name);
}

void ScenarioConfig::validate() const {
    cmmc::validate(null_model);
    cmmc::validate(alt_model);
    if (n < 1 || m < 1) throw std::invalid_argument("config: need n >= 1 and m >= 1");
    if (m0 < 0 || m0 > m) throw std::invalid_argument("config: need 0 <= m0 <= m");
    if (replications < 1) throw std::invalid_argument("config: need replications >= 1");
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("config: lambda in (0,1)");
    if (alpha_grid.empty()) throw std::invalid_argument("config: empty alpha grid");
    for (const double a : alpha_grid)
        if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("config: alpha must be in (0,1)");
    if (procedures.empty()) throw std::invalid_argument("config: no procedures");
    if (fit_from && *fit_from < 1) throw std::invalid_argument("config: fit_from must be >= 1");
    (void)grid();
}

CurveStatistic curve_or_extreme(const PointPattern& p, const DistanceGrid& grid,
                                StatisticKind kind) {
    try {
        return kind == StatisticKind::centered_l ? centered_l_function(p, grid)
                                                 : j_function(p, grid);
    } catch (const DegeneratePatternError&) {
        // hugely extreme but finite: ranking is purely comparison-based
        const CurveKind ck =
            kind == StatisticKind::centered_l ? CurveKind::centered_l : CurveKind::j_function;
        return CurveStatistic{grid, std::vector<double>(grid.size(), 1e300), ck};
    }
}

namespace {

ModelFamily family_of(const NullModel& model) {
    if (std::holds_alternative<PoissonParams>(model.spec)) return ModelFamily::poisson;
    if (std::holds_alternative<StraussParams>(model.spec)) return ModelFamily::strauss;
    if (std::holds_alternative<LgcpParams>(model.spec)) return ModelFamily::lgcp;
    throw std::invalid_argument("cannot derive a fit family from a mixture null model");
}

struct MeanSe {
    double mean = 0.0, se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe out;
    const std::size_t n = xs.size();
    if (n == 0) return out;
    out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (const double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    }
    return out;
}

void parallel_for(int jobs, int threads, const std::function<void(int)>& body) {
    if (threads <= 1) {
        for (int i = 0; i < jobs; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= jobs) return;
            body(i);
        }
    };
    std::vector<std::thread> pool;
    const int count = std::min(threads, jobs);
    pool.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace

RepData run_replication(const ScenarioConfig& cfg, RngStream rng) {
    const DistanceGrid grid = cfg.grid();
    const SimOptions opts{cfg.strauss_steps, cfg.lgcp_grid};

    RepData rep;

    // S3: estimate the null from a few observed patterns, then simulate the
    // null sample under the fitted mixture.
    NullModel generation_null = cfg.null_model;
    if (cfg.fit_from) {
        const ModelFamily family = cfg.fit_family ? *cfg.fit_family : family_of(cfg.null_model);
        std::vector<PointPattern> observed;
        observed.reserve(static_cast<std::size_t>(*cfg.fit_from));
        for (int i = 0; i < *cfg.fit_from; ++i)
            observed.push_back(simulate_null(cfg.null_model, cfg.window, rng, opts));
        rep.patterns_simulated += *cfg.fit_from;
        generation_null = build_mixture_null(observed, family);
    }

    std::vector<CurveStatistic> null_curves;
    null_curves.reserve(static_cast<std::size_t>(cfg.n));
    for (int i = 0; i < cfg.n; ++i) {
        const PointPattern p = simulate_null(generation_null, cfg.window, rng, opts);
        null_curves.push_back(curve_or_extreme(p, grid, cfg.statistic));
    }
    rep.patterns_simulated += cfg.n;

    // alternatives occupy test indices 0..(m-m0-1)
    std::vector<CurveStatistic> test_curves;
    test_curves.reserve(static_cast<std::size_t>(cfg.m));
    for (int j = 0; j < cfg.m; ++j) {
        const bool is_alt = j < cfg.m - cfg.m0;
        const PointPattern p = is_alt ? simulate_null(cfg.alt_model, cfg.window, rng, opts)
                                      : simulate_null(cfg.null_model, cfg.window, rng, opts);
        if (is_alt) rep.truth.push_back(static_cast<std::size_t>(j));
        test_curves.push_back(curve_or_extreme(p, grid, cfg.statistic));
    }
    rep.patterns_simulated += cfg.m;

    const TestSetup setup(null_curves, test_curves);
    if (cfg.score == ScoreType::parallel_erl || cfg.score == ScoreType::both)
        rep.cm_parallel = conformal_pvalues_parallel(setup);
    if (cfg.score == ScoreType::joint_erl || cfg.score == ScoreType::both)
        rep.cm_joint = conformal_pvalues_joint(setup);

    if (cfg.run_naive) {
        if (cfg.n < cfg.m) {
            rep.naive_note = "naive arm skipped: n < m";
        } else {
            const int block = cfg.n / cfg.m;
            const int n_used = block * cfg.m;
            if (n_used != cfg.n)
                rep.naive_note = "naive arm trimmed to n=" + std::to_string(n_used);
            std::vector<CurveStatistic> trimmed(null_curves.begin(),
                                                null_curves.begin() + n_used);
            rep.naive = naive_mmctest_pvalues(trimmed, test_curves);
        }
    }
    return rep;
}

namespace {

struct ArmRef {
    std::string name;
    const PValueVector* pv;
};

std::vector<ArmRef> arms_of(const RepData& rep) {
    std::vector<ArmRef> arms;
    if (rep.cm_parallel) arms.push_back({"cmmctest", &*rep.cm_parallel});
    if (rep.cm_joint) arms.push_back({"cmmctest_joint", &*rep.cm_joint});
    if (rep.naive) arms.push_back({"mmctest", &*rep.naive});
    return arms;
}

RejectionSet apply_procedure(Procedure proc, const PValueVector& pv, double alpha,
                             double lambda) {
    switch (proc) {
        case Procedure::bh: return bh_procedure(pv, alpha);
        case Procedure::storey_bh:
            return storey_bh(pv, alpha, snap_lambda(lambda, pv.n_effective));
        case Procedure::hochberg: return hochberg_procedure(pv, alpha);
        case Procedure::hommel: return hommel_procedure(pv, alpha);
        case Procedure::bonferroni: return bonferroni(pv, alpha, pv.size());
        case Procedure::sidak: return sidak(pv, alpha, pv.size());
    }
    throw std::logic_error("apply_procedure: bad procedure");
}

struct Key {
    Procedure proc;
    double alpha;
    std::string method;
    bool operator<(const Key& o) const {
        return std::tie(proc, alpha, method) < std::tie(o.proc, o.alpha, o.method);
    }
};

struct Samples {
    std::vector<double> fdp, tdp, any_v;
};

StudyResult aggregate(const ScenarioConfig& cfg, const std::vector<RepData>& reps,
                      double lambda) {
    std::map<Key, Samples> table;
    double tie_events = 0.0;
    long pvalue_count = 0;
    std::vector<std::string> notes;

    for (const auto& rep : reps) {
        for (const auto& arm : arms_of(rep)) {
            tie_events += static_cast<double>(arm.pv->tie_events);
            pvalue_count += static_cast<long>(arm.pv->size());
            for (const Procedure proc : cfg.procedures) {
                for (const double alpha : cfg.alpha_grid) {
                    const RejectionSet rej = apply_procedure(proc, *arm.pv, alpha, lambda);
                    const ErrorMetrics em = error_metrics(rej, rep.truth, arm.pv->size());
                    Samples& s = table[{proc, alpha, arm.name}];
                    s.fdp.push_back(em.fdp);
                    s.tdp.push_back(em.tdp);
                    s.any_v.push_back(em.v >= 1 ? 1.0 : 0.0);
                }
            }
        }
        if (!rep.naive_note.empty() &&
            std::find(notes.begin(), notes.end(), rep.naive_note) == notes.end())
            notes.push_back(rep.naive_note);
    }

    StudyResult out;
    out.notes = std::move(notes);
    out.tie_rate = pvalue_count > 0 ? tie_events / static_cast<double>(pvalue_count) : 0.0;
    for (const auto& [key, samples] : table) {
        const MeanSe fdr = mean_se(samples.fdp);
        const MeanSe tdr = mean_se(samples.tdp);
        const MeanSe fwer = mean_se(samples.any_v);
        out.cells.push_back(StudyCell{key.proc, key.alpha, key.method, fdr.mean, fdr.se, tdr.mean,
                                      tdr.se, fwer.mean, fwer.se,
                                      static_cast<int>(samples.tdp.size())});
    }

    // paired TDP comparisons on replications where both arms exist
    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"cmmctest", "mmctest"}, {"cmmctest", "cmmctest_joint"}};
    for (const auto& [a, b] : pairs) {
        for (const Procedure proc : cfg.procedures) {
            for (const double alpha : cfg.alpha_grid) {
                std::vector<double> diffs;
                for (const auto& rep : reps) {
                    const auto arms = arms_of(rep);
                    const ArmRef* pa = nullptr;
                    const ArmRef* pb = nullptr;
                    for (const auto& arm : arms) {
                        if (arm.name == a) pa = &arm;
                        if (arm.name == b) pb = &arm;
                    }
                    if (!pa || !pb) continue;
                    const ErrorMetrics ea = error_metrics(
                        apply_procedure(proc, *pa->pv, alpha, lambda), rep.truth, pa->pv->size());
                    const ErrorMetrics eb = error_metrics(
                        apply_procedure(proc, *pb->pv, alpha, lambda), rep.truth, pb->pv->size());
                    diffs.push_back(ea.tdp - eb.tdp);
                }
                if (diffs.empty()) continue;
                const MeanSe d = mean_se(diffs);
                out.comparisons.push_back(
                    StudyComparison{proc, alpha, a, b, d.mean, d.se});
            }
        }
    }
    return out;
}

std::vector<RepData> collect_replications(const ScenarioConfig& cfg) {
    cfg.validate();
    std::vector<RepData> reps(static_cast<std::size_t>(cfg.replications));
    parallel_for(cfg.replications, cfg.threads, [&](int r) {
        reps[static_cast<std::size_t>(r)] =
            run_replication(cfg, RngStream(cfg.seed, static_cast<std::uint64_t>(r)));
    });
    return reps;
}

} // namespace

const StudyCell& StudyResult::cell(Procedure proc, double alpha, const std::string& method) const {
    for (const auto& c : cells)
        if (c.procedure == proc && std::fabs(c.alpha - alpha) < 1e-12 && c.method == method)
            return c;
    throw std::out_of_range("StudyResult::cell: no such cell");
}

const StudyComparison& StudyResult::comparison(Procedure proc, double alpha,
                                               const std::string& method_a,
                                               const std::string& method_b) const {
    for (const auto& c : comparisons)
        if (c.procedure == proc && std::fabs(c.alpha - alpha) < 1e-12 && c.method_a == method_a &&
            c.method_b == method_b)
            return c;
    throw std::out_of_range("StudyResult::comparison: no such comparison");
}

StudyResult run_study(const ScenarioConfig& cfg) {
    return aggregate(cfg, collect_replications(cfg), cfg.lambda);
}

std::vector<std::pair<double, StudyResult>> run_lambda_sweep(const ScenarioConfig& cfg,
                                                             const std::vector<double>& lambdas) {
    if (lambdas.empty()) throw std::invalid_argument("run_lambda_sweep: no lambdas");
    const auto reps = collect_replications(cfg);
    std::vector<std::pair<double, StudyResult>> out;
    out.reserve(lambdas.size());
    for (const double lambda : lambdas) out.emplace_back(lambda, aggregate(cfg, reps, lambda));
    return out;
}

std::vector<SweepRow> run_multiplicity_sweep(const ScenarioConfig& base,
                                             const std::vector<double>& alphas,
                                             const std::vector<int>& ms,
                                             const std::vector<int>& ns) {
    std::vector<SweepRow> rows;
    for (const int m : ms) {
        if (m % 2 != 0)
            throw std::invalid_argument("run_multiplicity_sweep: m must be even (m0 = m/2)");
        for (const int n : ns) {
            ScenarioConfig cfg = base;
            cfg.m = m;
            cfg.m0 = m / 2;
            cfg.n = n;
            cfg.alpha_grid = alphas;
            cfg.run_naive = true;
            cfg.seed = RngStream(base.seed, 0x5eed'0000u + static_cast<std::uint64_t>(m) * 131072u +
                                                static_cast<std::uint64_t>(n))
                           .next_u64();
            const StudyResult res = run_study(cfg);
            for (const double alpha : alphas) {
                for (const char* method : {"cmmctest", "mmctest"}) {
                    SweepRow row;
                    row.m = m;
                    row.n = n;
                    row.alpha = alpha;
                    row.method = method;
                    try {
                        const StudyCell& c = res.cell(cfg.procedures.front(), alpha, method);
                        row.tdr = c.tdr;
                        row.tdr_se = c.tdr_se;
                        if (std::string(method) == "mmctest" && !res.notes.empty())
                            row.note = res.notes.front();
                    } catch (const std::out_of_range&) {
                        row.note = "naive arm skipped: n < m";
                        for (const auto& note : res.notes)
                            if (!note.empty()) row.note = note;
                    }
                    rows.push_back(std::move(row));
                }
            }
        }
    }
    return rows;
}

std::vector<GlobalNullCell> run_global_null_study(const ScenarioConfig& cfg) {
    cfg.validate();
    const DistanceGrid grid = cfg.grid();
    const SimOptions opts{cfg.strauss_steps, cfg.lgcp_grid};

    struct Flags {
        std::map<std::pair<double, std::string>, double> reject;
    };
    std::vector<Flags> all(static_cast<std::size_t>(cfg.replications));

    parallel_for(cfg.replications, cfg.threads, [&](int r) {
        RngStream rng(cfg.seed, static_cast<std::uint64_t>(r));
        std::vector<CurveStatistic> null_curves;
        null_curves.reserve(static_cast<std::size_t>(cfg.n));
        for (int i = 0; i < cfg.n; ++i)
            null_curves.push_back(
                curve_or_extreme(simulate_null(cfg.null_model, cfg.window, rng, opts), grid,
                                 cfg.statistic));
        std::vector<CurveStatistic> test_curves;
        for (int j = 0; j < cfg.m; ++j) {
            const bool is_alt = j < cfg.m - cfg.m0;
            const PointPattern p = is_alt ? simulate_null(cfg.alt_model, cfg.window, rng, opts)
                                          : simulate_null(cfg.null_model, cfg.window, rng, opts);
            test_curves.push_back(curve_or_extreme(p, grid, cfg.statistic));
        }

        const int block = cfg.n / cfg.m;
        if (block < 1) throw std::invalid_argument("global-null study needs n >= m");
        const int n_used = block * cfg.m;
        std::vector<CurveStatistic> trimmed(null_curves.begin(), null_curves.begin() + n_used);

        const TestSetup setup(trimmed, test_curves);
        const PValueVector cm = conformal_pvalues_parallel(setup);
        const PValueVector naive = naive_mmctest_pvalues(trimmed, test_curves);

        Flags& f = all[static_cast<std::size_t>(r)];
        for (const double alpha : cfg.alpha_grid) {
            RngStream get_rng = rng.sub(0xC0'4CA7u + static_cast<std::uint64_t>(alpha * 1e6));
            f.reject[{alpha, "concat_get"}] =
                global_null_concatenated_get(setup, alpha, get_rng) ? 1.0 : 0.0;
            f.reject[{alpha, "hochberg_cmmctest"}] = global_null_hochberg(cm, alpha) ? 1.0 : 0.0;
            f.reject[{alpha, "hochberg_mmctest"}] = global_null_hochberg(naive, alpha) ? 1.0 : 0.0;
            f.reject[{alpha, "fisher_mmctest"}] = global_null_fisher(naive, alpha) ? 1.0 : 0.0;
        }
    });

    std::vector<GlobalNullCell> cells;
    for (const double alpha : cfg.alpha_grid) {
        for (const char* method :
             {"concat_get", "hochberg_cmmctest", "hochberg_mmctest", "fisher_mmctest"}) {
            std::vector<double> xs;
            xs.reserve(all.size());
            for (const auto& f : all) xs.push_back(f.reject.at({alpha, method}));
            const MeanSe ms = mean_se(xs);
            cells.push_back(GlobalNullCell{alpha, method, ms.mean, ms.se,
                                           static_cast<int>(xs.size())});
        }
    }
    return cells;
}

namespace {

std::string trim_ws(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(trim_ws(tok));
    return out;
}

} // namespace

void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "null_model") cfg.null_model = parse_model(value);
    else if (key == "alt_model") cfg.alt_model = parse_model(value);
    else if (key == "window") {
        const auto v = split_csv(value);
        if (v.size() != 4) throw std::invalid_argument("window needs 4 numbers");
        cfg.window = Window(std::stod(v[0]), std::stod(v[1]), std::stod(v[2]), std::stod(v[3]));
    }
    else if (key == "n") cfg.n = std::stoi(value);
    else if (key == "m") cfg.m = std::stoi(value);
    else if (key == "m0") cfg.m0 = std::stoi(value);
    else if (key == "score") cfg.score = parse_score_type(value);
    else if (key == "statistic") cfg.statistic = parse_statistic_kind(value);
    else if (key == "procedure") {
        cfg.procedures.clear();
        for (const auto& name : split_csv(value)) cfg.procedures.push_back(parse_procedure(name));
    }
    else if (key == "alpha") {
        cfg.alpha_grid.clear();
        for (const auto& a : split_csv(value)) cfg.alpha_grid.push_back(std::stod(a));
    }
    else if (key == "lambda") cfg.lambda = std::stod(value);
    else if (key == "replications") cfg.replications = std::stoi(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "fit_from") {
        if (value.empty()) cfg.fit_from.reset();
        else cfg.fit_from = std::stoi(value);
    }
    else if (key == "fit_family") {
        if (value.empty()) cfg.fit_family.reset();
        else cfg.fit_family = parse_model_family(value);
    }
    else if (key == "strauss_steps") cfg.strauss_steps = std::stol(value);
    else if (key == "lgcp_grid") cfg.lgcp_grid = std::stoi(value);
    else if (key == "grid_m") cfg.grid_m = std::stoi(value);
    else if (key == "grid_rmax") cfg.grid_r_max = std::stod(value);
    else if (key == "threads") cfg.threads = std::stoi(value);
    else if (key == "run_naive") cfg.run_naive = value == "1" || value == "true";
    else throw std::invalid_argument("unknown config key: " + key);
}

ScenarioConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    ScenarioConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim_ws(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected `key = value`");
        apply_override(cfg, trim_ws(body.substr(0, eq)), trim_ws(body.substr(eq + 1)));
    }
    return cfg;
}

void write_study_tables(const StudyResult& result, const std::vector<Procedure>& procedures,
                        const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    for (const Procedure proc : procedures) {
        for (const char* metric : {"tdr", "fdr", "fwer"}) {
            const std::string path =
                out_dir + "/" + metric + "_" + procedure_name(proc) + ".csv";
            std::ofstream out(path);
            if (!out) throw std::runtime_error("cannot open for writing: " + path);
            out << "alpha,method,estimate,se\n";
            for (const auto& c : result.cells) {
                if (c.procedure != proc) continue;
                double est = 0.0, se = 0.0;
                if (std::string(metric) == "tdr") { est = c.tdr; se = c.tdr_se; }
                if (std::string(metric) == "fdr") { est = c.fdr; se = c.fdr_se; }
                if (std::string(metric) == "fwer") { est = c.fwer; se = c.fwer_se; }
                out << format_double(c.alpha) << ',' << c.method << ',' << format_double(est)
                    << ',' << format_double(se) << '\n';
            }
        }
    }
}

void write_global_null_table(const std::vector<GlobalNullCell>& cells, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "alpha,method,estimate,se\n";
    for (const auto& c : cells)
        out << format_double(c.alpha) << ',' << c.method << ',' << format_double(c.reject_rate)
            << ',' << format_double(c.se) << '\n';
}

void write_sweep_table(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "m,n,alpha,method,estimate,se,note\n";
    for (const auto& r : rows)
        out << r.m << ',' << r.n << ',' << format_double(r.alpha) << ',' << r.method << ','
            << format_double(r.tdr) << ',' << format_double(r.tdr_se) << ',' << r.note << '\n';
}

} // namespace cmmc
