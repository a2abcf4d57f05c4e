#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fastdebias/coherence.hpp"
#include "fastdebias/qp_baseline.hpp"
#include "fastdebias/types.hpp"

namespace fastdebias {

// mu selection for a study: the per-matrix threshold rho/(1+rho), a fixed
// value, or a sweep grid.
struct MuRuleRhoAuto {};
struct MuRuleFixed { double value = 0.3; };
struct MuRuleSweep { double lo = 0.2, hi = 0.6, step = 0.01; };
using MuRule = std::variant<MuRuleRhoAuto, MuRuleFixed, MuRuleSweep>;

struct ExperimentConfig {
    Eigen::Index p = 500;
    Eigen::Index s = 10;
    std::vector<Eigen::Index> n_grid = {200, 250, 300, 350, 400, 450, 500};
    long trials = 25;
    MuRule mu_rule = MuRuleRhoAuto{};
    EnsembleSpec ensemble;
    std::uint64_t master_seed = 1;
    double value_lo = 50.0;   // nonzero signal magnitudes, uniform [lo, hi)
    double value_hi = 1000.0;
    double alpha = 0.05;
    double lambda_scale = kDefaultLambdaScale;  // lambda = scale*sigma*sqrt(2 log p / n)
    bool fast = true;         // skip the iterative QP path in table runs
    unsigned threads = 0;     // 0 = hardware concurrency
    double qp_tol = 1e-10;
    long qp_max_iters = 20000;
    double qp_divergence_bound = 1e12;

    void validate() const;  // throws std::invalid_argument
};

// Parses the key = value config format ('#' comments, blank lines ignored).
// Unknown keys and malformed values throw std::invalid_argument.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct TrialOutcome {
    Eigen::Index n = 0;
    long trial_id = 0;
    double sens_o = 0.0, sens_e = 0.0;
    double spec_o = 0.0, spec_e = 0.0;
    double time_o = 0.0, time_e = 0.0;  // weight-construction wall clock, seconds
    double rel_err = 0.0;               // ||W_o - W_e||_F / ||W_e||_F
    double mu = 0.0;
    double rho_over_1_plus_rho = 0.0;
    double lambda = 0.0;
    double sigma = 0.0;
};

struct Table1Row {
    Eigen::Index n = 0;
    long trials = 0;
    double sens_o = 0.0, sens_e = 0.0;
    double spec_o = 0.0, spec_e = 0.0;
    double time_o = 0.0, time_e = 0.0;  // totals over trials
    double rel_err = 0.0;               // mean
    double mu = 0.0;                    // mean
    bool has_qp_path = false;
};

struct Table1Result {
    std::vector<Table1Row> rows;
    std::vector<TrialOutcome> trials;
    double lambda_scale = 0.0;
};

// Support-recovery study over cfg.n_grid, one fresh (A, beta, noise) draw per
// trial, mu = rho/(1+rho) per matrix. Requires mu_rule = RhoAuto. With
// cfg.fast only the closed-form path runs; otherwise the QP baseline runs
// alongside and the relative error between the two weight matrices is
// recorded. Trials are independent work items; results are keyed by
// (n, trial) and identical for any thread count.
Table1Result run_table1(const ExperimentConfig& cfg);

struct MuSweepPoint {
    double mu = 0.0;
    double rel_err = 0.0;
    enum class Status { Ok, Infeasible, Failed } status = Status::Ok;
};

struct MuSweepResult {
    std::vector<MuSweepPoint> points;
    double mu_threshold = 0.0;  // vertical-line abscissa rho/(1+rho)
    double rho = 0.0;
    Eigen::Index n = 0, p = 0;
};

// Fixed single matrix (defaults n=80, p=100 via cfg.n_grid.front(), cfg.p);
// for each mu in the sweep grid solves the QP baseline and compares with the
// closed form.
MuSweepResult run_mu_sweep(const ExperimentConfig& cfg);

struct BoundsEvent {
    std::string name;
    double frequency = 0.0;
    double floor = 0.0;         // theoretical lower bound on the probability
    double binomial_sigma = 0.0;
    bool meets_floor = false;   // frequency >= floor - 3 * binomial_sigma
};

struct BoundsReport {
    Eigen::Index n = 0, p = 0;
    std::string ensemble;
    TheoreticalBoundParams params;
    long trials = 0;
    double mu_bound = 0.0;      // 2 sqrt(2) (kappa^2/c)(c_max/c_min) sqrt(log p / n)
    double nu_bound = 0.0;      // 2 sqrt(2) c_max kappa^2 sqrt(log p / n)
    BoundsEvent threshold_event;  // rho/(1+rho) <= mu_bound
    BoundsEvent l_event;          // L >= c * c_min
    BoundsEvent nu_event;         // nu <= nu_bound
    BoundsEvent chain_event;      // rho/(1+rho) <= nu/L (deterministic)
};

// Monte Carlo coverage of the three probabilistic events over `trials`
// seeded matrices drawn from cfg.ensemble at (n, p) = (n_grid.front(), p).
// The sample-size hypothesis is enforced via SampleSizeError.
BoundsReport run_bound_validation(const ExperimentConfig& cfg,
                                  const TheoreticalBoundParams& params,
                                  long trials);

// Frobenius ratio ||Wo - We||_F / ||We||_F; throws std::domain_error when
// ||We||_F = 0 (only at mu = 1).
double relative_error(const DebiasWeights& Wo, const DebiasWeights& We);

// Writers. CSV files start with a "# schema: <name>-v1" line and are
// byte-identical across reruns with the same master seed and any thread
// count. In the mu-sweep plot data (TSV), exact zeros are clamped to 1e-16
// so log-scale plots stay finite; the CSV keeps the exact values.
std::string table1_csv(const Table1Result& result);
std::string table1_json(const Table1Result& result, const ExperimentConfig& cfg);
std::string mu_sweep_csv(const MuSweepResult& result);
std::string mu_sweep_json(const MuSweepResult& result);
std::string mu_sweep_plotdata(const MuSweepResult& result);
std::string bounds_json(const std::vector<BoundsReport>& reports);

}  // namespace fastdebias
