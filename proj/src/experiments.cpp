#include "msl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "msl/estimator.hpp"

namespace msl {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::uint64_t parse_u64(const std::string& s) {
    std::size_t pos = 0;
    const auto v = std::stoull(s, &pos);
    if (pos != s.size()) throw ConfigError("bad integer '" + s + "'");
    return v;
}

double parse_real(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ConfigError("bad number '" + s + "'");
    return v;
}

std::vector<double> parse_real_list(const std::string& s) {
    std::vector<double> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            out.push_back(parse_real(cur));
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(parse_real(cur));
    return out;
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("bad boolean '" + s + "'");
}

MixingMatrix assortative_p(int k, double beta) {
    MixingMatrix p;
    p.p = beta * Matrix::Identity(k, k) + (1.0 - beta) * Matrix::Ones(k, k);
    return p;
}

const std::vector<LossSpec>& both_losses() {
    static const std::vector<LossSpec> specs{LossSpec::unweighted_l1(), LossSpec::weighted_l1()};
    return specs;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (n < 10) throw ConfigError("experiment: n too small");
    if (k < 2) throw ConfigError("experiment: K must be at least 2");
    if (bn_grid.empty()) throw ConfigError("experiment: empty b_n grid");
    if (replicates < 1) throw ConfigError("experiment: replicates must be >= 1");
    for (double bn : bn_grid) {
        const double beta = snr / bn;
        if (!(beta > 0.0 && beta < 1.0)) {
            std::ostringstream os;
            os << "experiment: beta_n = snr/b_n = " << beta << " at b_n = " << bn
               << " outside (0,1)";
            throw ConfigError(os.str());
        }
    }
    if (!run_msl && !run_oms) throw ConfigError("experiment: no methods selected");
    profile.validate();
}

ExperimentConfig ExperimentConfig::from_section(const ConfigSection& section,
                                                const std::string& name) {
    ExperimentConfig cfg;
    cfg.experiment = name;
    for (const auto& [key, value] : section) {
        if (key == "n") cfg.n = static_cast<int>(parse_u64(value));
        else if (key == "k") cfg.k = static_cast<int>(parse_u64(value));
        else if (key == "degree_profile" || key == "profile") cfg.profile = DegreeProfile::parse(value);
        else if (key == "bn_grid" || key == "bn") cfg.bn_grid = parse_real_list(value);
        else if (key == "snr") cfg.snr = parse_real(value);
        else if (key == "pure_frac") cfg.pure_frac = parse_real(value);
        else if (key == "replicates") cfg.replicates = static_cast<int>(parse_u64(value));
        else if (key == "seed") cfg.seed = parse_u64(value);
        else if (key == "methods") {
            cfg.run_msl = value.find("msl") != std::string::npos;
            cfg.run_oms = value.find("oms") != std::string::npos;
            if (!cfg.run_msl && !cfg.run_oms)
                throw ConfigError("methods must name msl and/or oms");
        }
        else if (key == "c") cfg.c = parse_real(value);
        else if (key == "gamma") cfg.gamma = parse_real(value);
        else if (key == "tau") cfg.tau = parse_real(value);
        else if (key == "threads") cfg.threads = static_cast<int>(parse_u64(value));
        else if (key == "zero_noise") cfg.zero_noise = parse_bool(value);
        else throw ConfigError("unknown key '" + key + "' in experiment config");
    }
    cfg.validate();
    return cfg;
}

void parallel_tasks(int tasks, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, tasks));
    if (threads == 1) {
        for (int t = 0; t < tasks; ++t) fn(t);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int t = next.fetch_add(1);
                if (t >= tasks) return;
                fn(t);
            }
        });
    }
    for (auto& th : pool) th.join();
}

std::string ResultTable::raw_csv() const {
    std::ostringstream os;
    os << "experiment,method,p,q,bn,replicate,value,flag\n";
    for (const auto& r : raw) {
        os << experiment << "," << r.method << "," << format_double(r.p) << ","
           << format_double(r.q) << "," << format_double(r.grid) << "," << r.replicate << ","
           << (std::isnan(r.value) ? "nan" : format_double(r.value)) << "," << r.flag << "\n";
    }
    return os.str();
}

std::string ResultTable::aggregate_csv() const {
    std::ostringstream os;
    os << "experiment,method,p,q,bn,count,mean,stderr\n";
    for (const auto& r : aggregate) {
        os << experiment << "," << r.method << "," << format_double(r.p) << ","
           << format_double(r.q) << "," << format_double(r.grid) << "," << r.count << ","
           << format_double(r.mean) << "," << format_double(r.stderr_mean) << "\n";
    }
    return os.str();
}

void ResultTable::aggregate_from_raw() {
    aggregate.clear();
    // Raw rows are already emitted in deterministic order; group sequentially.
    std::vector<std::tuple<std::string, double, double, double>> keys;
    for (const auto& r : raw) {
        const auto key = std::make_tuple(r.method, r.p, r.q, r.grid);
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());
    for (const auto& key : keys) {
        AggregateRow agg;
        std::tie(agg.method, agg.p, agg.q, agg.grid) = key;
        double sum = 0.0;
        std::vector<double> vals;
        for (const auto& r : raw) {
            if (std::make_tuple(r.method, r.p, r.q, r.grid) != key || std::isnan(r.value)) continue;
            vals.push_back(r.value);
            sum += r.value;
        }
        agg.count = static_cast<int>(vals.size());
        if (agg.count > 0) {
            agg.mean = sum / agg.count;
            double ss = 0.0;
            for (double v : vals) ss += (v - agg.mean) * (v - agg.mean);
            agg.stderr_mean = agg.count > 1 ? std::sqrt(ss / (agg.count - 1) / agg.count) : 0.0;
        }
        aggregate.push_back(agg);
    }
}

double ResultTable::mean_of(const std::string& method, double p, double q, double grid) const {
    for (const auto& r : aggregate)
        if (r.method == method && r.p == p && r.q == q && r.grid == grid) return r.mean;
    throw Error("ResultTable: no aggregate row for the requested key");
}

ResultTable run_experiment1(const ExperimentConfig& cfg) {
    cfg.validate();
    ResultTable table;
    table.experiment = cfg.experiment;
    const int g = static_cast<int>(cfg.bn_grid.size());
    const int tasks = g * cfg.replicates;
    std::vector<std::vector<ResultRow>> slots(tasks);

    parallel_tasks(tasks, cfg.threads, [&](int t) {
        const int gi = t / cfg.replicates;
        const int rep = t % cfg.replicates;
        const double bn = cfg.bn_grid[gi];
        const double beta = cfg.snr / bn;
        auto& rows = slots[t];
        const std::uint64_t base = 4ULL * static_cast<std::uint64_t>(t);

        MembershipMatrix pi;
        AdjacencyMatrix a;
        DegreeParams theta;
        try {
            theta = sample_degrees(cfg.profile, cfg.n, bn, RandomSeed{cfg.seed, base});
            pi = generate_membership(cfg.n, cfg.k, cfg.pure_frac, RandomSeed{cfg.seed, base + 1});
            auto omega = build_omega_clipped(theta, pi, assortative_p(cfg.k, beta));
            a = sample_adjacency(omega, RandomSeed{cfg.seed, base + 2});
        } catch (const Error& e) {
            for (const char* method : {"msl", "oms"}) {
                if ((method[0] == 'm' && !cfg.run_msl) || (method[0] == 'o' && !cfg.run_oms))
                    continue;
                for (const auto& spec : both_losses())
                    rows.push_back({method, spec.p, spec.q, bn, rep, kNan, e.what()});
            }
            return;
        }

        auto record = [&](const char* method, const MembershipEstimate* est, const char* err) {
            for (const auto& spec : both_losses()) {
                if (est) {
                    const auto al = loss(est->pi_hat, pi.pi, &theta, spec);
                    rows.push_back({method, spec.p, spec.q, bn, rep, al.value, ""});
                } else {
                    rows.push_back({method, spec.p, spec.q, bn, rep, kNan, err});
                }
            }
        };
        if (cfg.run_msl) {
            try {
                const auto est = mixed_score_laplacian(a, cfg.k, cfg.c, cfg.gamma, cfg.tau);
                record("msl", &est, nullptr);
            } catch (const Error& e) {
                record("msl", nullptr, e.what());
            }
        }
        if (cfg.run_oms) {
            try {
                const auto est = orthodox_mixed_score(a, cfg.k);
                record("oms", &est, nullptr);
            } catch (const Error& e) {
                record("oms", nullptr, e.what());
            }
        }
    });

    for (auto& rows : slots)
        for (auto& r : rows) {
            if (!r.flag.empty()) ++table.failures;
            table.raw.push_back(std::move(r));
        }
    table.aggregate_from_raw();
    return table;
}

Exp2Result run_experiment2(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.bn_grid.size() != 1)
        throw ConfigError("experiment 2 uses a single b_n value");
    Exp2Result res;
    res.cfg = cfg;
    const double bn = cfg.bn_grid[0];
    const double beta = cfg.snr / bn;

    const auto theta = sample_degrees(cfg.profile, cfg.n, bn, RandomSeed{cfg.seed, 0});
    const auto pi = generate_membership(cfg.n, cfg.k, cfg.pure_frac, RandomSeed{cfg.seed, 1});
    const auto omega = build_omega_clipped(theta, pi, assortative_p(cfg.k, beta));
    res.theta = theta.theta;
    res.theta_bar = theta.theta_bar;

    std::vector<Vector> nodewise(cfg.replicates);
    std::vector<char> ok(cfg.replicates, 0);

    if (cfg.zero_noise) {
        const auto est = estimate_from_expected(omega, cfg.k, cfg.c, cfg.gamma, cfg.tau);
        const auto al = loss(est.pi_hat, pi.pi, &theta, LossSpec::unweighted_l1());
        res.mean_error = al.nodewise;
        res.used.assign(1, 0);
        auto pairs = nodewise_errors(al, theta, /*cap=*/true);
        res.slope = fit_loglog_slope(pairs, &res.excluded_zero);
        res.slope_defined = std::isfinite(res.slope);
        return res;
    }

    parallel_tasks(cfg.replicates, cfg.threads, [&](int rep) {
        try {
            const auto a = sample_adjacency(omega, RandomSeed{cfg.seed, 2 + static_cast<std::uint64_t>(rep)});
            const auto est = mixed_score_laplacian(a, cfg.k, cfg.c, cfg.gamma, cfg.tau);
            const auto al = loss(est.pi_hat, pi.pi, &theta, LossSpec::unweighted_l1());
            nodewise[rep] = al.nodewise;
            ok[rep] = 1;
        } catch (const Error&) {
            ok[rep] = 0;
        }
    });

    Vector sum = Vector::Zero(cfg.n);
    for (int rep = 0; rep < cfg.replicates; ++rep) {
        if (!ok[rep]) {
            ++res.failures;
            continue;
        }
        res.used.push_back(rep);
        sum += nodewise[rep];
    }
    if (res.used.empty()) throw Error("experiment 2: every replicate failed");
    res.mean_error = sum / static_cast<double>(res.used.size());

    AlignedLoss mean_aligned;
    mean_aligned.nodewise = res.mean_error;
    auto pairs = nodewise_errors(mean_aligned, theta, /*cap=*/true);
    res.slope = fit_loglog_slope(pairs, &res.excluded_zero);
    res.slope_defined = std::isfinite(res.slope);
    return res;
}

std::string Exp2Result::nodewise_csv() const {
    std::ostringstream os;
    os << "node,theta,mean_l1_error,below_theta_bar\n";
    for (int i = 0; i < theta.size(); ++i) {
        os << i << "," << format_double(theta(i)) << "," << format_double(mean_error(i)) << ","
           << (theta(i) <= theta_bar ? 1 : 0) << "\n";
    }
    return os.str();
}

RateStudyConfig RateStudyConfig::from_section(const ConfigSection& section) {
    RateStudyConfig cfg;
    for (const auto& [key, value] : section) {
        if (key == "degree_profile" || key == "profile") cfg.profile = DegreeProfile::parse(value);
        else if (key == "n") cfg.n = static_cast<int>(parse_u64(value));
        else if (key == "seed") cfg.seed = parse_u64(value);
        else if (key == "err_lo") cfg.err_lo = parse_real(value);
        else if (key == "err_hi") cfg.err_hi = parse_real(value);
        else if (key == "points") cfg.points = static_cast<int>(parse_u64(value));
        else throw ConfigError("unknown key '" + key + "' in rates config");
    }
    return cfg;
}

RateStudyResult run_rate_study(const RateStudyConfig& cfg) {
    if (cfg.points < 2) throw ConfigError("rate study needs at least two grid points");
    if (!(0.0 < cfg.err_lo && cfg.err_lo < cfg.err_hi))
        throw ConfigError("rate study needs 0 < err_lo < err_hi");
    // The integral depends only on eta = theta/theta_bar, so the norm is free.
    const auto theta = sample_degrees(cfg.profile, cfg.n, 1.0, RandomSeed{cfg.seed, 0});
    const auto cdf = empirical_cdf(theta);

    RateStudyResult out;
    const double ratio = cfg.err_hi / cfg.err_lo;
    for (int t = 0; t < cfg.points; ++t) {
        const double e = cfg.err_lo * std::pow(ratio, static_cast<double>(t) / (cfg.points - 1));
        out.err.push_back(e);
        out.integral.push_back(optimal_rate_integral(cdf, e));
    }
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < out.err.size(); ++i) pairs.emplace_back(out.err[i], out.integral[i]);
    out.fitted_exponent = fit_loglog_slope(pairs, nullptr);
    return out;
}

std::string RateStudyResult::csv() const {
    std::ostringstream os;
    os << "err_n,integral,ratio\n";
    for (std::size_t i = 0; i < err.size(); ++i)
        os << format_double(err[i]) << "," << format_double(integral[i]) << ","
           << format_double(integral[i] / err[i]) << "\n";
    return os.str();
}

LfcStudyConfig LfcStudyConfig::from_section(const ConfigSection& section) {
    LfcStudyConfig cfg;
    for (const auto& [key, value] : section) {
        if (key == "degree_profile" || key == "profile") cfg.profile = DegreeProfile::parse(value);
        else if (key == "n") cfg.n = static_cast<int>(parse_u64(value));
        else if (key == "k") cfg.k = static_cast<int>(parse_u64(value));
        else if (key == "beta_n") cfg.beta_n = parse_real(value);
        else if (key == "target_norm") cfg.target_norm = parse_real(value);
        else if (key == "j_target") cfg.j_target = static_cast<int>(parse_u64(value));
        else if (key == "c0_sweep") cfg.c0_sweep = parse_real_list(value);
        else if (key == "seeds") cfg.seeds = static_cast<int>(parse_u64(value));
        else if (key == "seed") cfg.seed = parse_u64(value);
        else if (key == "variant") {
            if (value == "weighted") cfg.variant = LfcVariant::Weighted;
            else if (value == "unweighted") cfg.variant = LfcVariant::Unweighted;
            else if (value == "unweighted-violated") cfg.variant = LfcVariant::UnweightedViolated;
            else throw ConfigError("unknown LFC variant '" + value + "'");
        }
        else throw ConfigError("unknown key '" + key + "' in lfc config");
    }
    return cfg;
}

LfcStudyResult run_lfc_study(const LfcStudyConfig& cfg) {
    if (cfg.c0_sweep.empty()) throw ConfigError("lfc study needs a c0 sweep");
    LfcStudyResult out;
    for (int s = 0; s < cfg.seeds; ++s) {
        const std::uint64_t stream = 100ULL * static_cast<std::uint64_t>(s);
        const auto theta =
            sample_degrees(cfg.profile, cfg.n, cfg.target_norm, RandomSeed{cfg.seed, stream});
        for (double c0 : cfg.c0_sweep) {
            const auto ens = build_lfc(theta, cfg.k, cfg.beta_n, c0, cfg.j_target, cfg.variant,
                                       RandomSeed{cfg.seed, stream + 1});
            const auto rep = lfc_report(ens);
            LfcStudyRow row;
            row.seed = stream;
            row.c0_requested = c0;
            row.c0_effective = ens.c0;
            row.j_nonzero = rep.j_nonzero;
            row.min_pairwise_ratio = rep.min_pairwise_ratio;
            row.kl_ratio = rep.kl_ratio;
            row.kl_ratio_defined = rep.kl_ratio_defined;
            out.rows.push_back(row);
            if (out.report_text.empty()) out.report_text = rep.summary();
        }
    }
    return out;
}

std::string LfcStudyResult::csv() const {
    std::ostringstream os;
    os << "seed,c0_requested,c0_effective,j,min_pairwise_ratio,kl_ratio,kl_ratio_defined\n";
    for (const auto& r : rows) {
        os << r.seed << "," << format_double(r.c0_requested) << ","
           << format_double(r.c0_effective) << "," << r.j_nonzero << ","
           << format_double(r.min_pairwise_ratio) << ","
           << (r.kl_ratio_defined ? format_double(r.kl_ratio) : "nan") << ","
           << (r.kl_ratio_defined ? 1 : 0) << "\n";
    }
    return os.str();
}

std::string exp1_gnuplot_script(const std::string& aggregate_csv_name) {
    std::ostringstream os;
    os << "# gnuplot script for the experiment-1 aggregate table\n"
       << "set datafile separator ','\n"
       << "set key outside\n"
       << "set xlabel 'b_n = ||theta||'\n"
       << "set ylabel 'loss'\n"
       << "plot '" << aggregate_csv_name
       << "' using 5:($2 eq 'msl' && $3 == 0 ? $7 : 1/0) with linespoints title 'MSL l1', \\\n"
       << "     '' using 5:($2 eq 'oms' && $3 == 0 ? $7 : 1/0) with linespoints title 'OMS l1', \\\n"
       << "     '' using 5:($2 eq 'msl' && $3 == 0.5 ? $7 : 1/0) with linespoints title 'MSL weighted', \\\n"
       << "     '' using 5:($2 eq 'oms' && $3 == 0.5 ? $7 : 1/0) with linespoints title 'OMS weighted'\n";
    return os.str();
}

std::string exp2_gnuplot_script(const std::string& nodewise_csv_name, double slope,
                                double intercept_hint) {
    std::ostringstream os;
    os << "# gnuplot script for the experiment-2 node-wise errors\n"
       << "set datafile separator ','\n"
       << "set logscale xy\n"
       << "set xlabel 'theta_i'\n"
       << "set ylabel 'mean l1 error'\n"
       << "f(x) = exp(" << format_double(intercept_hint) << ") * x**(" << format_double(slope)
       << ")\n"
       << "plot '" << nodewise_csv_name
       << "' using 2:($4 == 1 ? $3 : 1/0) with points title 'nodes (theta <= mean)', \\\n"
       << "     f(x) with lines title 'fitted slope'\n";
    return os.str();
}

}  // namespace msl
