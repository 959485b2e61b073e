#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "msl/degree_profiles.hpp"
#include "msl/io.hpp"
#include "msl/lower_bounds.hpp"
#include "msl/metrics.hpp"

namespace msl {

// Shared setup for the two simulation experiments: DCMM draws with
// P = beta I + (1 - beta) 11' where beta = snr / b_n.
struct ExperimentConfig {
    std::string experiment = "exp1";
    int n = 2000;
    int k = 2;
    DegreeProfile profile = DegreeProfile::uniform(0.3, 5.0);
    std::vector<double> bn_grid;
    double snr = 4.5;
    double pure_frac = 0.15;
    int replicates = 20;
    std::uint64_t seed = 1;
    bool run_msl = true;
    bool run_oms = true;
    double c = 0.1;
    double gamma = 0.05;
    double tau = 1.0;
    int threads = 1;
    bool zero_noise = false;  // exp2 diagnostic: feed Omega instead of sampling

    void validate() const;
    // Reads a [section]; unknown keys are errors.
    static ExperimentConfig from_section(const ConfigSection& section, const std::string& name);
};

struct ResultRow {
    std::string method;   // "msl" / "oms"
    double p = 0.0;       // loss spec
    double q = 1.0;
    double grid = 0.0;    // b_n
    int replicate = 0;
    double value = 0.0;   // NaN when flagged
    std::string flag;     // failure description, empty on success
};

struct AggregateRow {
    std::string method;
    double p = 0.0;
    double q = 1.0;
    double grid = 0.0;
    int count = 0;
    double mean = 0.0;
    double stderr_mean = 0.0;
};

struct ResultTable {
    std::string experiment;
    std::vector<ResultRow> raw;
    std::vector<AggregateRow> aggregate;
    int failures = 0;

    std::string raw_csv() const;
    std::string aggregate_csv() const;
    // Recomputes `aggregate` from `raw` (sorted, index-ordered reduction).
    void aggregate_from_raw();
    double mean_of(const std::string& method, double p, double q, double grid) const;
};

// Experiment 1: fresh (theta, Pi) per replicate, MSL vs OMS across the b_n grid.
ResultTable run_experiment1(const ExperimentConfig& cfg);

// Experiment 2: (theta, Pi) fixed across replicates; per-node mean errors and
// the log-log slope over theta_i <= theta_bar.
struct Exp2Result {
    ExperimentConfig cfg;
    Vector theta;
    Vector mean_error;       // per node, over successful replicates
    std::vector<int> used;   // replicates contributing
    double theta_bar = 0.0;
    double slope = 0.0;
    bool slope_defined = false;
    int excluded_zero = 0;   // zero-error nodes left out of the fit
    int failures = 0;

    std::string nodewise_csv() const;
};

Exp2Result run_experiment2(const ExperimentConfig& cfg);

// Rate study over an err_n grid for an Example-2 profile.
struct RateStudyConfig {
    DegreeProfile profile = DegreeProfile::gamma(0.25, 1.0);
    int n = 2000;
    std::uint64_t seed = 1;
    double err_lo = 0.01;
    double err_hi = 0.1;
    int points = 9;

    static RateStudyConfig from_section(const ConfigSection& section);
};

struct RateStudyResult {
    std::vector<double> err;
    std::vector<double> integral;
    double fitted_exponent = 0.0;

    std::string csv() const;
};

RateStudyResult run_rate_study(const RateStudyConfig& cfg);

// Lower-bound study: ensembles across seeds and a c0 sweep.
struct LfcStudyConfig {
    DegreeProfile profile = DegreeProfile::uniform(0.3, 5.0);
    int n = 400;
    int k = 2;
    double beta_n = 0.5;
    double target_norm = 10.0;
    int j_target = 8;
    LfcVariant variant = LfcVariant::Weighted;
    std::vector<double> c0_sweep = {0.4, 0.2, 0.1, 0.05};
    int seeds = 3;
    std::uint64_t seed = 1;

    static LfcStudyConfig from_section(const ConfigSection& section);
};

struct LfcStudyRow {
    std::uint64_t seed = 0;
    double c0_requested = 0.0;
    double c0_effective = 0.0;
    int j_nonzero = 0;
    double min_pairwise_ratio = 0.0;
    double kl_ratio = 0.0;
    bool kl_ratio_defined = false;
};

struct LfcStudyResult {
    std::vector<LfcStudyRow> rows;
    std::string report_text;  // lfc_report summary of the first ensemble

    std::string csv() const;
};

LfcStudyResult run_lfc_study(const LfcStudyConfig& cfg);

// Replicate-level worker pool: runs fn(0..tasks-1) on `threads` workers. fn
// must capture failures itself; results must be written into index-addressed
// slots so the merge is thread-count independent.
void parallel_tasks(int tasks, int threads, const std::function<void(int)>& fn);

// Companion gnuplot scripts for the emitted CSVs.
std::string exp1_gnuplot_script(const std::string& aggregate_csv_name);
std::string exp2_gnuplot_script(const std::string& nodewise_csv_name, double slope,
                                double intercept_hint);

}  // namespace msl
