#include "fastdebias/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "fastdebias/errors.hpp"
#include "fastdebias/inference.hpp"
#include "fastdebias/io.hpp"
#include "fastdebias/lasso.hpp"
#include "fastdebias/model_gen.hpp"
#include "fastdebias/parallel.hpp"
#include "fastdebias/rng.hpp"

namespace fastdebias {
namespace {

using ordered_json = nlohmann::ordered_json;

unsigned effective_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for '" + key + "': " + v);
    }
}

long parse_long(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for '" + key + "': " + v);
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) parts.push_back(trim(part));
    return parts;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (p < 1) throw std::invalid_argument("config: p must be >= 1");
    if (s < 0 || s > p) throw std::invalid_argument("config: need 0 <= s <= p");
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (n_grid.empty()) throw std::invalid_argument("config: n_grid must be nonempty");
    for (const auto n : n_grid) {
        if (n < 1) throw std::invalid_argument("config: n values must be >= 1");
        if (std::count(n_grid.begin(), n_grid.end(), n) != 1) {
            throw std::invalid_argument("config: duplicate n in n_grid");
        }
    }
    if (!(value_lo < value_hi)) {
        throw std::invalid_argument("config: need value_lo < value_hi");
    }
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::invalid_argument("config: alpha must lie in (0, 1)");
    }
    if (!(lambda_scale > 0.0)) {
        throw std::invalid_argument("config: lambda_scale must be > 0");
    }
    if (!(qp_tol > 0.0) || qp_max_iters < 1 || !(qp_divergence_bound > 0.0)) {
        throw std::invalid_argument("config: invalid qp solver settings");
    }
    if (const auto* sweep = std::get_if<MuRuleSweep>(&mu_rule)) {
        if (!(sweep->lo > 0.0) || !(sweep->hi < 1.0) || !(sweep->lo <= sweep->hi) ||
            !(sweep->step > 0.0)) {
            throw std::invalid_argument(
                "config: sweep bounds must satisfy 0 < lo <= hi < 1, step > 0");
        }
    }
    if (const auto* fixed = std::get_if<MuRuleFixed>(&mu_rule)) {
        if (!(fixed->value >= 0.0) || !(fixed->value <= 1.0)) {
            throw std::invalid_argument("config: fixed mu must lie in [0, 1]");
        }
    }
    ensemble.validate(p);
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    std::optional<std::vector<double>> column_scales;
    while (std::getline(ss, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: expected 'key = value': " + line);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) throw std::invalid_argument("config: empty value for " + key);

        if (key == "p") cfg.p = parse_long(key, value);
        else if (key == "s") cfg.s = parse_long(key, value);
        else if (key == "trials") cfg.trials = parse_long(key, value);
        else if (key == "master_seed") cfg.master_seed = static_cast<std::uint64_t>(parse_long(key, value));
        else if (key == "value_lo") cfg.value_lo = parse_double(key, value);
        else if (key == "value_hi") cfg.value_hi = parse_double(key, value);
        else if (key == "alpha") cfg.alpha = parse_double(key, value);
        else if (key == "lambda_scale") cfg.lambda_scale = parse_double(key, value);
        else if (key == "threads") cfg.threads = static_cast<unsigned>(parse_long(key, value));
        else if (key == "qp_tol") cfg.qp_tol = parse_double(key, value);
        else if (key == "qp_max_iters") cfg.qp_max_iters = parse_long(key, value);
        else if (key == "qp_divergence_bound") cfg.qp_divergence_bound = parse_double(key, value);
        else if (key == "fast") {
            if (value == "true" || value == "1") cfg.fast = true;
            else if (value == "false" || value == "0") cfg.fast = false;
            else throw std::invalid_argument("config: fast must be true/false");
        } else if (key == "n_grid") {
            cfg.n_grid.clear();
            for (const auto& part : split(value, ',')) {
                cfg.n_grid.push_back(parse_long(key, part));
            }
        } else if (key == "ensemble") {
            if (value == "gaussian") cfg.ensemble.kind = EnsembleSpec::Kind::Gaussian;
            else if (value == "rademacher") cfg.ensemble.kind = EnsembleSpec::Kind::Rademacher;
            else throw std::invalid_argument("config: unknown ensemble: " + value);
        } else if (key == "column_scales") {
            column_scales.emplace();
            for (const auto& part : split(value, ',')) {
                column_scales->push_back(parse_double(key, part));
            }
        } else if (key == "mu_rule") {
            if (value == "rho_auto") cfg.mu_rule = MuRuleRhoAuto{};
            else if (value.rfind("fixed:", 0) == 0) {
                cfg.mu_rule = MuRuleFixed{parse_double(key, value.substr(6))};
            } else if (value.rfind("sweep:", 0) == 0) {
                const auto parts = split(value.substr(6), ':');
                if (parts.size() != 3) {
                    throw std::invalid_argument("config: sweep needs lo:hi:step");
                }
                cfg.mu_rule = MuRuleSweep{parse_double(key, parts[0]),
                                          parse_double(key, parts[1]),
                                          parse_double(key, parts[2])};
            } else {
                throw std::invalid_argument("config: unknown mu_rule: " + value);
            }
        } else {
            throw std::invalid_argument("config: unknown key: " + key);
        }
    }
    if (column_scales) {
        cfg.ensemble.column_scales =
            Eigen::Map<const Eigen::VectorXd>(column_scales->data(),
                                              static_cast<Eigen::Index>(column_scales->size()));
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

double relative_error(const DebiasWeights& Wo, const DebiasWeights& We) {
    if (Wo.W.rows() != We.W.rows() || Wo.W.cols() != We.W.cols()) {
        throw std::invalid_argument("relative_error: shape mismatch");
    }
    const double denom = We.W.norm();
    if (denom == 0.0) {
        throw std::domain_error("relative_error: ||We||_F = 0 (mu = 1)");
    }
    return (Wo.W - We.W).norm() / denom;
}

Table1Result run_table1(const ExperimentConfig& cfg) {
    cfg.validate();
    if (!std::holds_alternative<MuRuleRhoAuto>(cfg.mu_rule)) {
        throw std::invalid_argument("run_table1: requires mu_rule = rho_auto");
    }
    const unsigned threads = effective_threads(cfg.threads);

    struct Task {
        Eigen::Index n;
        long trial;
    };
    std::vector<Task> tasks;
    for (const auto n : cfg.n_grid) {
        for (long t = 0; t < cfg.trials; ++t) tasks.push_back({n, t});
    }

    Table1Result result;
    result.lambda_scale = cfg.lambda_scale;
    result.trials.resize(tasks.size());

    auto run_trial = [&](std::size_t ti) {
        const Task task = tasks[ti];
        const std::uint64_t seed =
            derive_seed(cfg.master_seed, Stream::Trial,
                        static_cast<std::uint64_t>(task.n),
                        static_cast<std::uint64_t>(task.trial));

        const DesignMatrix A = generate_design(task.n, cfg.p, cfg.ensemble, seed);
        const SparseSignal beta = generate_signal(cfg.p, cfg.s, cfg.value_lo,
                                                  cfg.value_hi, seed);
        const double sigma = noise_sigma(A, beta);
        const Measurement y = sample_measurements(A, beta, sigma, seed);

        const double rho = compute_rho(A);
        const double mu = mu_from_rho(rho);
        const double lambda = lambda_rule(sigma, task.n, cfg.p, cfg.lambda_scale);

        LassoConfig lasso_cfg;
        lasso_cfg.lambda = lambda;
        const LassoEstimate fit = fit_lasso(A, y, lasso_cfg);

        TrialOutcome& out = result.trials[ti];
        out.n = task.n;
        out.trial_id = task.trial;
        out.mu = mu;
        out.rho_over_1_plus_rho = mu;
        out.lambda = lambda;
        out.sigma = sigma;

        const DebiasWeights We = closed_form_weights(A, mu, rho);
        out.time_e = We.build_seconds;
        const DebiasedEstimate est_e = debias(A, y, fit, We);
        const RecoveryScore score_e =
            score_support(test_support(est_e, cfg.alpha), beta);
        out.sens_e = score_e.sensitivity.value_or(0.0);
        out.spec_e = score_e.specificity.value_or(0.0);

        if (!cfg.fast) {
            QpOptions qp;
            qp.tol = cfg.qp_tol;
            qp.max_iters = cfg.qp_max_iters;
            qp.divergence_bound = cfg.qp_divergence_bound;
            qp.threads = 1;  // trials already run in parallel
            const DebiasWeights Wo = solve_all(A, mu, qp);
            out.time_o = Wo.build_seconds;
            out.rel_err = relative_error(Wo, We);
            const DebiasedEstimate est_o = debias(A, y, fit, Wo);
            const RecoveryScore score_o =
                score_support(test_support(est_o, cfg.alpha), beta);
            out.sens_o = score_o.sensitivity.value_or(0.0);
            out.spec_o = score_o.specificity.value_or(0.0);
        }
    };

    parallel_for(tasks.size(), threads, [&](std::size_t ti) {
        const Task task = tasks[ti];
        const std::string tag = "table1 (n = " + std::to_string(task.n) +
                                ", trial = " + std::to_string(task.trial) + "): ";
        try {
            run_trial(ti);
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(tag + e.what(), e.last_iterate(), e.residual(),
                                   e.iterations());
        } catch (const InfeasibleOrUnboundedError& e) {
            throw InfeasibleOrUnboundedError(tag + e.what(), e.column(),
                                             e.dual_objective());
        }
    });

    for (const auto n : cfg.n_grid) {
        Table1Row row;
        row.n = n;
        row.has_qp_path = !cfg.fast;
        for (const auto& t : result.trials) {
            if (t.n != n) continue;
            ++row.trials;
            row.sens_e += t.sens_e;
            row.spec_e += t.spec_e;
            row.sens_o += t.sens_o;
            row.spec_o += t.spec_o;
            row.time_e += t.time_e;
            row.time_o += t.time_o;
            row.rel_err += t.rel_err;
            row.mu += t.mu;
        }
        const double k = static_cast<double>(row.trials);
        row.sens_e /= k;
        row.spec_e /= k;
        row.sens_o /= k;
        row.spec_o /= k;
        row.rel_err /= k;
        row.mu /= k;
        result.rows.push_back(row);
    }
    return result;
}

MuSweepResult run_mu_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto* sweep = std::get_if<MuRuleSweep>(&cfg.mu_rule);
    if (!sweep) throw std::invalid_argument("run_mu_sweep: requires mu_rule = sweep");

    MuSweepResult result;
    result.n = cfg.n_grid.front();
    result.p = cfg.p;

    const std::uint64_t seed = derive_seed(cfg.master_seed, Stream::Trial,
                                           static_cast<std::uint64_t>(result.n), 0);
    const DesignMatrix A = generate_design(result.n, cfg.p, cfg.ensemble, seed);
    result.rho = compute_rho(A);
    result.mu_threshold = mu_from_rho(result.rho);

    QpOptions qp;
    qp.tol = cfg.qp_tol;
    qp.max_iters = cfg.qp_max_iters;
    qp.divergence_bound = cfg.qp_divergence_bound;
    qp.threads = effective_threads(cfg.threads);

    for (long k = 0;; ++k) {
        const double mu = sweep->lo + static_cast<double>(k) * sweep->step;
        if (mu > sweep->hi + 0.5 * sweep->step) break;
        MuSweepPoint point;
        point.mu = mu;
        const DebiasWeights We = closed_form_weights(A, mu, result.rho);
        try {
            const DebiasWeights Wo = solve_all(A, mu, qp);
            point.rel_err = relative_error(Wo, We);
        } catch (const InfeasibleOrUnboundedError&) {
            point.status = MuSweepPoint::Status::Infeasible;
        } catch (const ConvergenceError&) {
            point.status = MuSweepPoint::Status::Failed;
        }
        result.points.push_back(point);
    }
    return result;
}

BoundsReport run_bound_validation(const ExperimentConfig& cfg,
                                  const TheoreticalBoundParams& params,
                                  long trials) {
    cfg.validate();
    params.validate();
    if (trials < 1) throw std::invalid_argument("run_bound_validation: trials >= 1");
    const Eigen::Index n = cfg.n_grid.front();
    const Eigen::Index p = cfg.p;

    BoundsReport report;
    report.n = n;
    report.p = p;
    report.ensemble =
        cfg.ensemble.kind == EnsembleSpec::Kind::Gaussian ? "gaussian" : "rademacher";
    report.params = params;
    report.trials = trials;
    report.mu_bound = theoretical_mu(params, n, p);  // enforces the hypothesis
    report.nu_bound = 2.0 * std::sqrt(2.0) * params.c_max * params.kappa *
                      params.kappa *
                      std::sqrt(std::log(static_cast<double>(p)) /
                                static_cast<double>(n));

    std::vector<std::array<bool, 4>> hits(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), effective_threads(cfg.threads),
                 [&](std::size_t t) {
                     const std::uint64_t seed =
                         derive_seed(cfg.master_seed, Stream::Trial,
                                     static_cast<std::uint64_t>(n),
                                     static_cast<std::uint64_t>(t));
                     const DesignMatrix A = generate_design(n, p, cfg.ensemble, seed);
                     const CoherenceStats stats = coherence_stats(A);
                     hits[t] = {stats.mu_threshold <= report.mu_bound,
                                stats.L >= params.c * params.c_min,
                                stats.nu <= report.nu_bound,
                                stats.mu_threshold <= stats.nu / stats.L};
                 });

    auto summarize = [&](const std::string& name, std::size_t idx, double floor) {
        BoundsEvent ev;
        ev.name = name;
        long count = 0;
        for (const auto& h : hits) count += h[idx] ? 1 : 0;
        ev.frequency = static_cast<double>(count) / static_cast<double>(trials);
        ev.floor = floor;
        ev.binomial_sigma = std::sqrt(ev.frequency * (1.0 - ev.frequency) /
                                      static_cast<double>(trials));
        ev.meets_floor = ev.frequency >= floor - 3.0 * ev.binomial_sigma;
        return ev;
    };

    const double pd = static_cast<double>(p);
    report.threshold_event = summarize("threshold_le_mu_bound", 0,
                                       1.0 - (2.0 / pd + 1.0 / (pd * pd)));
    report.l_event = summarize("L_ge_c_cmin", 1, 1.0 - 2.0 / pd);
    report.nu_event = summarize("nu_le_nu_bound", 2, 1.0 - 1.0 / (pd * pd));
    report.chain_event = summarize("threshold_le_nu_over_L", 3, 1.0);
    return report;
}

std::string table1_csv(const Table1Result& result) {
    std::ostringstream out;
    out << "# schema: table1-v1\n";
    out << "n,trials,mu,sens_e,spec_e,sens_o,spec_o,rel_err\n";
    for (const auto& row : result.rows) {
        out << row.n << ',' << row.trials << ',' << format_double(row.mu) << ','
            << format_double(row.sens_e) << ',' << format_double(row.spec_e) << ',';
        if (row.has_qp_path) {
            out << format_double(row.sens_o) << ',' << format_double(row.spec_o)
                << ',' << format_double(row.rel_err);
        } else {
            out << "-,-,-";
        }
        out << '\n';
    }
    return out.str();
}

std::string table1_json(const Table1Result& result, const ExperimentConfig& cfg) {
    ordered_json j;
    j["schema"] = "table1-v1";
    j["p"] = cfg.p;
    j["s"] = cfg.s;
    j["trials"] = cfg.trials;
    j["master_seed"] = cfg.master_seed;
    j["alpha"] = cfg.alpha;
    j["lambda_scale"] = result.lambda_scale;
    j["ensemble"] =
        cfg.ensemble.kind == EnsembleSpec::Kind::Gaussian ? "gaussian" : "rademacher";
    j["fast"] = cfg.fast;
    j["rows"] = ordered_json::array();
    for (const auto& row : result.rows) {
        ordered_json r;
        r["n"] = row.n;
        r["trials"] = row.trials;
        r["mu"] = row.mu;
        r["sens_e"] = row.sens_e;
        r["spec_e"] = row.spec_e;
        r["time_e_total"] = row.time_e;
        if (row.has_qp_path) {
            r["sens_o"] = row.sens_o;
            r["spec_o"] = row.spec_o;
            r["time_o_total"] = row.time_o;
            r["rel_err"] = row.rel_err;
        }
        j["rows"].push_back(r);
    }
    j["trial_outcomes"] = ordered_json::array();
    for (const auto& t : result.trials) {
        ordered_json r;
        r["n"] = t.n;
        r["trial"] = t.trial_id;
        r["mu"] = t.mu;
        r["lambda"] = t.lambda;
        r["sigma"] = t.sigma;
        r["sens_e"] = t.sens_e;
        r["spec_e"] = t.spec_e;
        r["time_e"] = t.time_e;
        if (t.time_o > 0.0) {
            r["sens_o"] = t.sens_o;
            r["spec_o"] = t.spec_o;
            r["time_o"] = t.time_o;
            r["rel_err"] = t.rel_err;
        }
        j["trial_outcomes"].push_back(r);
    }
    return j.dump(2) + "\n";
}

std::string mu_sweep_csv(const MuSweepResult& result) {
    std::ostringstream out;
    out << "# schema: musweep-v1\n";
    out << "# n=" << result.n << " p=" << result.p
        << " mu_threshold=" << format_double(result.mu_threshold) << '\n';
    out << "mu,rel_err,status\n";
    for (const auto& pt : result.points) {
        out << format_double(pt.mu) << ',';
        if (pt.status == MuSweepPoint::Status::Ok) {
            out << format_double(pt.rel_err) << ",ok";
        } else if (pt.status == MuSweepPoint::Status::Infeasible) {
            out << "-,infeasible";
        } else {
            out << "-,failed";
        }
        out << '\n';
    }
    return out.str();
}

std::string mu_sweep_json(const MuSweepResult& result) {
    ordered_json j;
    j["schema"] = "musweep-v1";
    j["n"] = result.n;
    j["p"] = result.p;
    j["rho"] = result.rho;
    j["mu_threshold"] = result.mu_threshold;
    j["points"] = ordered_json::array();
    for (const auto& pt : result.points) {
        ordered_json r;
        r["mu"] = pt.mu;
        switch (pt.status) {
            case MuSweepPoint::Status::Ok:
                r["rel_err"] = pt.rel_err;
                r["status"] = "ok";
                break;
            case MuSweepPoint::Status::Infeasible:
                r["status"] = "infeasible";
                break;
            case MuSweepPoint::Status::Failed:
                r["status"] = "failed";
                break;
        }
        j["points"].push_back(r);
    }
    return j.dump(2) + "\n";
}

std::string mu_sweep_plotdata(const MuSweepResult& result) {
    std::ostringstream out;
    out << "# mu\trel_err (zeros clamped to 1e-16 for log plots)\n";
    out << "# mu_threshold = " << format_double(result.mu_threshold) << '\n';
    for (const auto& pt : result.points) {
        if (pt.status != MuSweepPoint::Status::Ok) continue;
        const double value = pt.rel_err == 0.0 ? 1e-16 : pt.rel_err;
        out << format_double(pt.mu) << '\t' << format_double(value) << '\n';
    }
    return out.str();
}

std::string bounds_json(const std::vector<BoundsReport>& reports) {
    ordered_json j = ordered_json::array();
    for (const auto& rep : reports) {
        ordered_json r;
        r["n"] = rep.n;
        r["p"] = rep.p;
        r["ensemble"] = rep.ensemble;
        r["kappa"] = rep.params.kappa;
        r["c"] = rep.params.c;
        r["c_min"] = rep.params.c_min;
        r["c_max"] = rep.params.c_max;
        r["trials"] = rep.trials;
        r["mu_bound"] = rep.mu_bound;
        r["nu_bound"] = rep.nu_bound;
        r["events"] = ordered_json::array();
        for (const auto* ev :
             {&rep.threshold_event, &rep.l_event, &rep.nu_event, &rep.chain_event}) {
            ordered_json e;
            e["name"] = ev->name;
            e["frequency"] = ev->frequency;
            e["floor"] = ev->floor;
            e["binomial_sigma"] = ev->binomial_sigma;
            e["meets_floor"] = ev->meets_floor;
            r["events"].push_back(e);
        }
        j.push_back(r);
    }
    return j.dump(2) + "\n";
}

}  // namespace fastdebias
