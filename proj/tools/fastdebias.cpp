// Command-line front end. Subcommands mirror the library modules:
//
//   gen        draw a design matrix, sparse signal and noisy measurements
//   coherence  rho, L, nu and the closed-form threshold of a matrix
//   lasso      l1-regularized least squares by coordinate descent
//   debias     closed-form debiasing of a lasso fit
//   qp-weights iterative per-column QP baseline with a gap certificate
//   infer      z-tests / confidence intervals on a debiased estimate
//   table1     support-recovery study over a grid of sample sizes
//   mu-sweep   closed-form vs QP weights across a mu grid
//   bounds     Monte Carlo coverage of the probabilistic bounds
//
// Exit codes: 0 success, 2 invalid configuration or input, 3 solver failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "fastdebias/coherence.hpp"
#include "fastdebias/debias.hpp"
#include "fastdebias/errors.hpp"
#include "fastdebias/experiments.hpp"
#include "fastdebias/inference.hpp"
#include "fastdebias/io.hpp"
#include "fastdebias/lasso.hpp"
#include "fastdebias/model_gen.hpp"
#include "fastdebias/qp_baseline.hpp"
#include "fastdebias/rng.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace fastdebias;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
}

EnsembleSpec::Kind parse_kind(const std::string& name) {
    if (name == "gaussian") return EnsembleSpec::Kind::Gaussian;
    if (name == "rademacher") return EnsembleSpec::Kind::Rademacher;
    throw std::invalid_argument("unknown ensemble: " + name);
}

DesignMatrix load_design(const std::string& path) {
    return DesignMatrix(read_matrix(path));
}

struct GenArgs {
    long n = 80, p = 100, s = 10;
    std::string ensemble = "gaussian";
    std::string scales_path;
    double lo = 50.0, hi = 1000.0;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    bool csv = false;
};

int run_gen(const GenArgs& args) {
    EnsembleSpec spec;
    spec.kind = parse_kind(args.ensemble);
    if (!args.scales_path.empty()) {
        spec.column_scales = read_vector(args.scales_path);
    }
    const DesignMatrix A = generate_design(args.n, args.p, spec, args.seed);
    const SparseSignal beta = generate_signal(args.p, args.s, args.lo, args.hi, args.seed);
    const double sigma = noise_sigma(A, beta);
    const Measurement y = sample_measurements(A, beta, sigma, args.seed);

    const fs::path dir(args.out_dir);
    fs::create_directories(dir);
    const std::string ext = args.csv ? ".csv" : ".bin";
    write_matrix((dir / ("A" + ext)).string(), A.entries());
    write_vector((dir / "beta.csv").string(), beta.values);
    write_vector((dir / ("y" + ext)).string(), y.y);

    ordered_json meta;
    meta["format_version"] = kFormatVersion;
    meta["n"] = args.n;
    meta["p"] = args.p;
    meta["s"] = args.s;
    meta["ensemble"] = args.ensemble;
    meta["sigma"] = sigma;
    meta["seed"] = args.seed;
    write_text(dir / "meta.json", meta.dump(2) + "\n");
    std::cout << "wrote A" << ext << ", beta.csv, y" << ext << ", meta.json to "
              << dir.string() << " (sigma = " << format_double(sigma) << ")\n";
    return kExitOk;
}

int run_coherence(const std::string& matrix_path, const std::string& json_path) {
    const DesignMatrix A = load_design(matrix_path);
    const CoherenceStats stats = coherence_stats(A);
    ordered_json j;
    j["rho"] = stats.rho;
    j["L"] = stats.L;
    j["nu"] = stats.nu;
    j["mu_threshold"] = stats.mu_threshold;
    const std::string text = j.dump(2) + "\n";
    if (!json_path.empty()) write_text(json_path, text);
    std::cout << text;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-form lasso debiasing with an iterative QP baseline"};
    app.require_subcommand(1);

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "Generate a design, signal and measurements");
    gen->add_option("--n", gen_args.n, "rows")->required();
    gen->add_option("--p", gen_args.p, "columns")->required();
    gen->add_option("--s", gen_args.s, "signal sparsity");
    gen->add_option("--ensemble", gen_args.ensemble, "gaussian|rademacher");
    gen->add_option("--column-scales", gen_args.scales_path,
                    "vector file of per-column standard deviations");
    gen->add_option("--lo", gen_args.lo, "smallest nonzero magnitude");
    gen->add_option("--hi", gen_args.hi, "largest nonzero magnitude");
    gen->add_option("--seed", gen_args.seed, "master seed");
    gen->add_option("--out", gen_args.out_dir, "output directory")->required();
    gen->add_flag("--csv", gen_args.csv, "write A and y as CSV instead of binary");

    std::string matrix_path, json_path;
    auto* coh = app.add_subcommand("coherence", "Column-coherence statistics");
    coh->add_option("--matrix", matrix_path, "matrix file")->required();
    coh->add_option("--json", json_path, "also write the JSON here");

    struct {
        std::string matrix, y, out;
        double lambda = 1.0, tol = 1e-8;
        long max_iters = 100000;
    } lasso_args;
    auto* las = app.add_subcommand("lasso", "Coordinate-descent lasso");
    las->add_option("--matrix", lasso_args.matrix)->required();
    las->add_option("--y", lasso_args.y)->required();
    las->add_option("--lambda", lasso_args.lambda)->required();
    las->add_option("--tol", lasso_args.tol);
    las->add_option("--max-iters", lasso_args.max_iters);
    las->add_option("--out", lasso_args.out, "beta_hat CSV")->required();

    struct {
        std::string matrix, y, beta_hat, out, mu = "auto";
        double sigma = 0.0;
    } debias_args;
    auto* deb = app.add_subcommand("debias", "Closed-form debiasing update");
    deb->add_option("--matrix", debias_args.matrix)->required();
    deb->add_option("--y", debias_args.y)->required();
    deb->add_option("--beta-hat", debias_args.beta_hat)->required();
    deb->add_option("--sigma", debias_args.sigma, "noise standard deviation")->required();
    deb->add_option("--mu", debias_args.mu, "'auto' (= rho/(1+rho)) or a value in [0,1]");
    deb->add_option("--out", debias_args.out, "CSV with beta_d,stderr columns")->required();

    struct {
        std::string matrix, out, cert;
        double mu = 0.3, tol = 1e-8;
        long max_iters = 20000;
        unsigned threads = 0;
    } qp_args;
    auto* qpw = app.add_subcommand("qp-weights", "Iterative per-column QP weights");
    qpw->add_option("--matrix", qp_args.matrix)->required();
    qpw->add_option("--mu", qp_args.mu)->required();
    qpw->add_option("--tol", qp_args.tol);
    qpw->add_option("--max-iters", qp_args.max_iters);
    qpw->add_option("--threads", qp_args.threads);
    qpw->add_option("--out", qp_args.out, "weight matrix file")->required();
    qpw->add_option("--cert", qp_args.cert, "JSON certificate path");

    struct {
        std::string estimate, truth, json;
        double alpha = 0.05;
    } infer_args;
    auto* inf = app.add_subcommand("infer", "Support tests and confidence intervals");
    inf->add_option("--estimate", infer_args.estimate,
                    "CSV with beta_d,stderr columns")->required();
    inf->add_option("--alpha", infer_args.alpha);
    inf->add_option("--truth", infer_args.truth, "true beta vector (scores if given)");
    inf->add_option("--json", infer_args.json, "also write the JSON here");

    struct {
        std::string config, out;
    } exp_args;
    auto* table1 = app.add_subcommand("table1", "Support-recovery study");
    table1->add_option("--config", exp_args.config)->required();
    table1->add_option("--out", exp_args.out, "output directory")->required();
    auto* sweep = app.add_subcommand("mu-sweep", "Closed-form vs QP across mu");
    sweep->add_option("--config", exp_args.config)->required();
    sweep->add_option("--out", exp_args.out, "output directory")->required();

    struct {
        std::string config, out;
        std::vector<double> kappas;
        double c = 0.9, c_min = 1.0, c_max = 1.0;
        long trials = 200;
    } bounds_args;
    auto* bounds = app.add_subcommand("bounds", "Probabilistic-bound coverage");
    bounds->add_option("--config", bounds_args.config)->required();
    bounds->add_option("--out", bounds_args.out, "output directory")->required();
    bounds->add_option("--kappa", bounds_args.kappas,
                       "sub-Gaussian norm(s); default the built-in range for the ensemble");
    bounds->add_option("--c", bounds_args.c);
    bounds->add_option("--c-min", bounds_args.c_min);
    bounds->add_option("--c-max", bounds_args.c_max);
    bounds->add_option("--trials", bounds_args.trials);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (gen->parsed()) return run_gen(gen_args);
        if (coh->parsed()) return run_coherence(matrix_path, json_path);

        if (las->parsed()) {
            const DesignMatrix A = load_design(lasso_args.matrix);
            Measurement meas;
            meas.y = read_vector(lasso_args.y);
            LassoConfig cfg;
            cfg.lambda = lasso_args.lambda;
            cfg.tol = lasso_args.tol;
            cfg.max_iters = lasso_args.max_iters;
            const LassoEstimate est = fit_lasso(A, meas, cfg);
            write_vector(lasso_args.out, est.beta_hat);
            std::cout << "sweeps=" << est.iterations
                      << " kkt_residual=" << format_double(est.kkt_residual)
                      << " objective=" << format_double(est.objective) << "\n";
            return kExitOk;
        }

        if (deb->parsed()) {
            const DesignMatrix A = load_design(debias_args.matrix);
            Measurement meas;
            meas.y = read_vector(debias_args.y);
            meas.sigma = debias_args.sigma;
            LassoEstimate fit;
            fit.beta_hat = read_vector(debias_args.beta_hat);
            double mu;
            std::optional<double> rho;
            if (debias_args.mu == "auto") {
                rho = compute_rho(A);
                mu = mu_from_rho(*rho);
            } else {
                mu = std::stod(debias_args.mu);
            }
            const DebiasWeights W = closed_form_weights(A, mu, rho);
            const DebiasedEstimate est = debias(A, meas, fit, W);
            std::ofstream out(debias_args.out);
            if (!out) throw std::runtime_error("cannot open " + debias_args.out);
            out << "# beta_d,stderr (mu=" << format_double(mu) << ")\n";
            for (Eigen::Index j = 0; j < est.beta_d.size(); ++j) {
                out << format_double(est.beta_d(j)) << ','
                    << format_double(est.std_errors(j)) << '\n';
            }
            if (W.feasible && !*W.feasible) {
                std::cerr << "warning: mu = " << format_double(mu)
                          << " is below rho/(1+rho); the closed form violates the "
                             "constraint\n";
            }
            std::cout << "wrote " << debias_args.out << "\n";
            return kExitOk;
        }

        if (qpw->parsed()) {
            const DesignMatrix A = load_design(qp_args.matrix);
            QpOptions opts;
            opts.tol = qp_args.tol;
            opts.max_iters = qp_args.max_iters;
            opts.threads = qp_args.threads == 0
                               ? std::max(1u, std::thread::hardware_concurrency())
                               : qp_args.threads;
            QpSolveStats stats;
            const DebiasWeights W = solve_all(A, qp_args.mu, opts, &stats);
            write_matrix(qp_args.out, W.W);
            ordered_json cert;
            cert["max_gap"] = stats.max_gap;
            cert["max_margin"] = stats.max_margin;
            cert["time_seconds"] = stats.seconds;
            const std::string text = cert.dump(2) + "\n";
            if (!qp_args.cert.empty()) write_text(qp_args.cert, text);
            std::cout << text;
            return kExitOk;
        }

        if (inf->parsed()) {
            const Eigen::MatrixXd est_matrix = read_matrix(infer_args.estimate);
            if (est_matrix.cols() != 2) {
                throw std::invalid_argument("infer: expected two CSV columns");
            }
            DebiasedEstimate est;
            est.beta_d = est_matrix.col(0);
            est.std_errors = est_matrix.col(1);
            const SupportCall call = test_support(est, infer_args.alpha);
            const auto intervals = confidence_interval(est, infer_args.alpha);
            ordered_json j;
            j["alpha"] = infer_args.alpha;
            j["z_crit"] = call.z_crit;
            j["b_hat"] = call.b_hat;
            j["intervals"] = ordered_json::array();
            for (const auto& [lo, hi] : intervals) {
                j["intervals"].push_back(ordered_json::array({lo, hi}));
            }
            if (!infer_args.truth.empty()) {
                const SparseSignal truth =
                    SparseSignal::from_values(read_vector(infer_args.truth));
                const RecoveryScore score = score_support(call, truth);
                ordered_json s;
                s["true_defective"] = score.true_defective;
                s["false_defective"] = score.false_defective;
                s["false_nondefective"] = score.false_nondefective;
                s["true_nondefective"] = score.true_nondefective;
                if (score.sensitivity) s["sensitivity"] = *score.sensitivity;
                if (score.specificity) s["specificity"] = *score.specificity;
                j["score"] = s;
            }
            const std::string text = j.dump(2) + "\n";
            if (!infer_args.json.empty()) write_text(infer_args.json, text);
            std::cout << text;
            return kExitOk;
        }

        if (table1->parsed()) {
            const ExperimentConfig cfg = load_config(exp_args.config);
            const Table1Result result = run_table1(cfg);
            const fs::path dir(exp_args.out);
            fs::create_directories(dir);
            write_text(dir / "results.csv", table1_csv(result));
            write_text(dir / "results.json", table1_json(result, cfg));
            std::cout << table1_csv(result);
            return kExitOk;
        }

        if (sweep->parsed()) {
            const ExperimentConfig cfg = load_config(exp_args.config);
            const MuSweepResult result = run_mu_sweep(cfg);
            const fs::path dir(exp_args.out);
            fs::create_directories(dir / "plotdata");
            write_text(dir / "results.csv", mu_sweep_csv(result));
            write_text(dir / "results.json", mu_sweep_json(result));
            write_text(dir / "plotdata" / "musweep.tsv", mu_sweep_plotdata(result));
            std::cout << mu_sweep_csv(result);
            return kExitOk;
        }

        if (bounds->parsed()) {
            const ExperimentConfig cfg = load_config(bounds_args.config);
            std::vector<double> kappas = bounds_args.kappas;
            if (kappas.empty()) {
                const KappaConstants k = kappa_constants(cfg.ensemble.kind);
                kappas = {k.moment, k.orlicz};
            }
            std::vector<BoundsReport> reports;
            for (const double kappa : kappas) {
                TheoreticalBoundParams params;
                params.kappa = kappa;
                params.c = bounds_args.c;
                params.c_min = bounds_args.c_min;
                params.c_max = bounds_args.c_max;
                reports.push_back(
                    run_bound_validation(cfg, params, bounds_args.trials));
            }
            const fs::path dir(bounds_args.out);
            fs::create_directories(dir);
            write_text(dir / "results.json", bounds_json(reports));
            std::cout << bounds_json(reports);
            return kExitOk;
        }
    } catch (const ConvergenceError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const InfeasibleOrUnboundedError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
