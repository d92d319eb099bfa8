#pragma once

#include "cmmc/conformal.hpp"
#include "cmmc/fitting.hpp"
#include "cmmc/generate.hpp"
#include "cmmc/multiplicity.hpp"
#include "cmmc/summaries.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cmmc {

enum class ScoreType { parallel_erl, joint_erl, both };
enum class StatisticKind { centered_l, j_function };

std::string score_type_name(ScoreType s);
ScoreType parse_score_type(const std::string& name);
std::string statistic_kind_name(StatisticKind s);
StatisticKind parse_statistic_kind(const std::string& name);

/// One simulation scenario. Test indices 0..(m-m0-1) are alternatives, the
/// rest are true nulls; metrics are index-aware so the placement carries no
/// meaning. Desk-scale defaults; the paper-scale setting is n=2500,
/// replications=2000.
struct ScenarioConfig {
    NullModel null_model = NullModel(PoissonParams{200.0});
    NullModel alt_model = NullModel(StraussParams{250.0, 0.6, 0.03});
    Window window = Window::unit_square();
    int n = 500;
    int m = 10;
    int m0 = 5;
    ScoreType score = ScoreType::parallel_erl;
    StatisticKind statistic = StatisticKind::centered_l;
    std::vector<Procedure> procedures = {Procedure::storey_bh};
    std::vector<double> alpha_grid = {0.05, 0.1, 0.2};
    double lambda = 0.5;
    int replications = 500;
    std::uint64_t seed = 1;
    std::optional<int> fit_from;               // S3: observed-null count
    std::optional<ModelFamily> fit_family;     // default: family of null_model
    long strauss_steps = 20000;
    int lgcp_grid = 32;
    int grid_m = 64;
    double grid_r_max = 0.25;
    int threads = 1;
    bool run_naive = true;

    void validate() const;
    DistanceGrid grid() const { return DistanceGrid::regular(grid_r_max, grid_m); }
};

/// P-value vectors of one replication, one per testing arm.
struct RepData {
    std::optional<PValueVector> cm_parallel;
    std::optional<PValueVector> cm_joint;
    std::optional<PValueVector> naive;
    std::vector<std::size_t> truth;  // non-null test indices
    long patterns_simulated = 0;
    std::string naive_note;          // set when the naive arm was trimmed/skipped
};

RepData run_replication(const ScenarioConfig& cfg, RngStream rng);

struct StudyCell {
    Procedure procedure;
    double alpha = 0.0;
    std::string method;
    double fdr = 0.0, fdr_se = 0.0;
    double tdr = 0.0, tdr_se = 0.0;
    double fwer = 0.0, fwer_se = 0.0;
    int reps = 0;
};

/// Paired per-replication TDP difference between two arms (same patterns).
struct StudyComparison {
    Procedure procedure;
    double alpha = 0.0;
    std::string method_a, method_b;
    double tdr_diff = 0.0, tdr_diff_se = 0.0;
};

struct StudyResult {
    std::vector<StudyCell> cells;
    std::vector<StudyComparison> comparisons;
    double tie_rate = 0.0;           // mean ERL tie events per computed p-value
    std::vector<std::string> notes;

    const StudyCell& cell(Procedure proc, double alpha, const std::string& method) const;
    const StudyComparison& comparison(Procedure proc, double alpha, const std::string& method_a,
                                      const std::string& method_b) const;
};

/// Aggregates run_replication over `replications` per-replication streams
/// RngStream(seed, rep); bit-reproducible for a fixed config.
StudyResult run_study(const ScenarioConfig& cfg);

/// Same simulations evaluated at several Storey lambdas (storey_bh only).
std::vector<std::pair<double, StudyResult>> run_lambda_sweep(const ScenarioConfig& cfg,
                                                             const std::vector<double>& lambdas);

struct SweepRow {
    int m = 0, n = 0;
    double alpha = 0.0;
    std::string method;
    double tdr = 0.0, tdr_se = 0.0;
    std::string note;
};

/// TDR grid over (alpha, m, n) with m0 = m/2; the naive arm is trimmed when
/// m does not divide n and skipped (with a recorded reason) when n < m.
std::vector<SweepRow> run_multiplicity_sweep(const ScenarioConfig& base,
                                             const std::vector<double>& alphas,
                                             const std::vector<int>& ms,
                                             const std::vector<int>& ns);

struct GlobalNullCell {
    double alpha = 0.0;
    std::string method;
    double reject_rate = 0.0, se = 0.0;
    int reps = 0;
};

/// Global-null comparison: concatenated GET, Hochberg-global on both p-value
/// variants, Fisher on the naive p-values. With m0 = m the rate is the
/// type-I error, otherwise power.
std::vector<GlobalNullCell> run_global_null_study(const ScenarioConfig& cfg);

/// Key-value config file (`key = value`, `#` comments); unknown keys throw.
ScenarioConfig parse_config_file(const std::string& path);
void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value);

/// One CSV per (procedure, metric) with columns alpha,method,estimate,se.
void write_study_tables(const StudyResult& result, const std::vector<Procedure>& procedures,
                        const std::string& out_dir);
void write_global_null_table(const std::vector<GlobalNullCell>& cells, const std::string& path);
void write_sweep_table(const std::vector<SweepRow>& rows, const std::string& path);

/// Computes the configured statistic; degenerate patterns (too few points)
/// yield a constant hugely-extreme curve so Monte Carlo replications never
/// abort.
CurveStatistic curve_or_extreme(const PointPattern& p, const DistanceGrid& grid,
                                StatisticKind kind);

} // namespace cmmc
