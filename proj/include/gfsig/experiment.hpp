#ifndef GFSIG_EXPERIMENT_HPP
#define GFSIG_EXPERIMENT_HPP

/**
 * @file experiment.hpp
 * @brief Monte-Carlo detection experiments driven by a flat key = value config.
 *
 * Every trial draws activity, channel and noise from streams keyed by
 * (base_seed, K, M, trial) and never by family, so two configs that differ
 * only in the signature family see identical activity, channel and noise.
 * Trials are spread over worker threads and aggregated in trial order, so
 * output is independent of the worker count.
 */

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gfsig/analysis.hpp"
#include "gfsig/detectors.hpp"
#include "gfsig/rng.hpp"
#include "gfsig/seqgen.hpp"
#include "gfsig/simulator.hpp"

namespace gfsig {

enum class Detector { cdml, mmvamp };

inline std::string_view to_string(Detector d) { return d == Detector::cdml ? "cdml" : "mmvamp"; }
inline Detector parse_detector(std::string_view s) {
    if (s == "cdml") return Detector::cdml;
    if (s == "mmvamp" || s == "amp") return Detector::mmvamp;
    throw InvalidArgument("unknown detector: " + std::string(s));
}

struct ExperimentConfig {
    Family family = Family::cubic;
    long L = 23;  // sequence length for cubic, PR and random families
    long p = 0;   // field parameters for Sidelnikov and trace
    long m = 0;
    long H = 0;   // 0 = family default
    long num_devices = 200;
    long per_device = 4;
    std::vector<long> K_grid{20};
    std::vector<long> M_grid{64};
    double sigma_w2 = 0.1;
    Detector detector = Detector::cdml;
    int sweeps = 15;
    int max_iters = 50;
    double damping = 0.3;
    double xi_th = kDefaultActivityThreshold;
    long trials = 200;
    std::uint64_t base_seed = 1;
    int signature_trials = 10;  // random families only
    bool record_timing = false;
    std::string output;

    bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline long parse_long(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    long out = 0;
    try {
        out = std::stol(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size() || v.empty()) throw InvalidArgument("config: bad integer for " + key + ": " + v);
    return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out = 0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size() || v.empty()) throw InvalidArgument("config: bad number for " + key + ": " + v);
    return out;
}

inline std::vector<long> parse_grid(const std::string& key, const std::string& v) {
    std::vector<long> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_long(key, trim(item)));
    if (out.empty()) throw InvalidArgument("config: empty grid for " + key);
    return out;
}

inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace detail

/// Parses `key = value` lines; `#` starts a comment. Unknown keys are errors.
inline ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string k = detail::trim(line.substr(0, eq));
        const std::string v = detail::trim(line.substr(eq + 1));
        if (k == "family") c.family = parse_family(v);
        else if (k == "L") c.L = detail::parse_long(k, v);
        else if (k == "p") c.p = detail::parse_long(k, v);
        else if (k == "m") c.m = detail::parse_long(k, v);
        else if (k == "H") c.H = detail::parse_long(k, v);
        else if (k == "N_d") c.num_devices = detail::parse_long(k, v);
        else if (k == "Q") c.per_device = detail::parse_long(k, v);
        else if (k == "K") c.K_grid = detail::parse_grid(k, v);
        else if (k == "M") c.M_grid = detail::parse_grid(k, v);
        else if (k == "sigma_w2") c.sigma_w2 = detail::parse_double(k, v);
        else if (k == "detector") c.detector = parse_detector(v);
        else if (k == "sweeps") c.sweeps = static_cast<int>(detail::parse_long(k, v));
        else if (k == "max_iters") c.max_iters = static_cast<int>(detail::parse_long(k, v));
        else if (k == "damping") c.damping = detail::parse_double(k, v);
        else if (k == "xi_th") c.xi_th = detail::parse_double(k, v);
        else if (k == "trials") c.trials = detail::parse_long(k, v);
        else if (k == "base_seed") c.base_seed = static_cast<std::uint64_t>(detail::parse_long(k, v));
        else if (k == "signature_trials") c.signature_trials = static_cast<int>(detail::parse_long(k, v));
        else if (k == "record_timing") c.record_timing = (v == "true" || v == "1");
        else if (k == "output") c.output = v;
        else throw InvalidArgument("config line " + std::to_string(lineno) + ": unknown key " + k);
    }
    return c;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline void write_config(std::ostream& os, const ExperimentConfig& c) {
    auto grid = [](const std::vector<long>& g) {
        std::string s;
        for (std::size_t i = 0; i < g.size(); ++i) s += (i ? "," : "") + std::to_string(g[i]);
        return s;
    };
    os << "family = " << to_string(c.family) << "\n"
       << "L = " << c.L << "\n"
       << "p = " << c.p << "\n"
       << "m = " << c.m << "\n"
       << "H = " << c.H << "\n"
       << "N_d = " << c.num_devices << "\n"
       << "Q = " << c.per_device << "\n"
       << "K = " << grid(c.K_grid) << "\n"
       << "M = " << grid(c.M_grid) << "\n"
       << "sigma_w2 = " << detail::format_double(c.sigma_w2) << "\n"
       << "detector = " << to_string(c.detector) << "\n"
       << "sweeps = " << c.sweeps << "\n"
       << "max_iters = " << c.max_iters << "\n"
       << "damping = " << detail::format_double(c.damping) << "\n"
       << "xi_th = " << detail::format_double(c.xi_th) << "\n"
       << "trials = " << c.trials << "\n"
       << "base_seed = " << c.base_seed << "\n"
       << "signature_trials = " << c.signature_trials << "\n"
       << "record_timing = " << (c.record_timing ? "true" : "false") << "\n";
    if (!c.output.empty()) os << "output = " << c.output << "\n";
}

/// Masking set for a deterministic family config.
inline MaskingSet masking_set_for(const ExperimentConfig& c) {
    switch (c.family) {
        case Family::cubic: return gen_cubic_masks(c.L);
        case Family::power_residue: return gen_pr_masks(c.L, c.H);
        case Family::sidelnikov:
            return gen_sidelnikov_masks(static_cast<std::uint32_t>(c.p), static_cast<unsigned>(c.m), c.H);
        case Family::trace: return gen_trace_masks(static_cast<std::uint32_t>(c.p), static_cast<unsigned>(c.m));
        default: throw InvalidArgument("masking_set_for: not a deterministic family");
    }
}

/// Checks the config and returns the signature matrix it describes.
inline SignatureMatrix signatures_for(const ExperimentConfig& c) {
    if (c.num_devices < 1 || c.per_device < 1) throw InvalidArgument("config: N_d and Q must be positive");
    if (is_deterministic(c.family)) return build_signature_matrix(masking_set_for(c), c.num_devices, c.per_device);
    if (c.family == Family::custom) throw InvalidArgument("config: custom family cannot be simulated");
    if (c.L < 1) throw InvalidArgument("config: L must be positive");
    Rng rng = derive_stream(c.base_seed, {}, StreamTag::signature);
    return gen_random_family(c.family, c.L, c.num_devices, c.per_device, c.signature_trials, rng);
}

inline void validate_config(const ExperimentConfig& c) {
    if (c.trials < 1) throw InvalidArgument("config: trials must be at least 1");
    if (!(c.sigma_w2 > 0.0)) throw InvalidArgument("config: sigma_w2 must be positive");
    if (c.sweeps < 1 || c.max_iters < 1) throw InvalidArgument("config: sweeps and max_iters must be positive");
    for (auto k : c.K_grid)
        if (k < 1 || k > c.num_devices) throw InvalidArgument("config: K grid values must lie in [1, N_d]");
    for (auto m : c.M_grid)
        if (m < 1) throw InvalidArgument("config: M grid values must be positive");
}

struct TrialOutcome {
    double p_e = 0.0;
    bool diverged = false;
};

/// One access trial: draw, synthesize, detect, score.
inline TrialOutcome run_trial(const ExperimentConfig& c, const SignatureMatrix& s, const CMatrix& s_scaled, long K,
                              long M, long trial) {
    const std::uint64_t k = static_cast<std::uint64_t>(K), mm = static_cast<std::uint64_t>(M),
                        t = static_cast<std::uint64_t>(trial);
    Rng act_rng = derive_stream(c.base_seed, {k, mm, t}, StreamTag::activity);
    Rng ch_rng = derive_stream(c.base_seed, {k, mm, t}, StreamTag::channel);
    Rng noise_rng = derive_stream(c.base_seed, {k, mm, t}, StreamTag::noise);
    Rng det_rng = derive_stream(c.base_seed, {k, mm, t}, StreamTag::detector);

    const auto activity = draw_activity(s.num_devices, K, s.per_device, act_rng);
    const auto channel = draw_channel(s.num_devices, M, s.per_device, ch_rng);
    const auto rx = synthesize(s, activity, channel, c.sigma_w2, noise_rng);

    TrialOutcome out;
    DetectionResult det;
    if (c.detector == Detector::cdml) {
        CdmlOptions opt;
        opt.sweeps = c.sweeps;
        opt.record_objective = false;
        const auto est = cdml_estimate(rx.Y, s_scaled, c.sigma_w2, det_rng, opt);
        det = cdml_decide(est.gamma_hat, s.num_devices, s.per_device, c.xi_th);
    } else {
        AmpOptions opt;
        opt.activity_rate = static_cast<double>(K) / static_cast<double>(s.columns());
        opt.max_iters = c.max_iters;
        opt.damping = c.damping;
        const auto est = mmv_amp_estimate(rx.Y, s_scaled, c.sigma_w2, opt);
        out.diverged = est.diverged;
        det = amp_decide(est.X_hat, s.num_devices, s.per_device, c.xi_th);
    }
    out.p_e = error_metric(activity, det).p_e;
    return out;
}

struct ResultRow {
    Family family = Family::cubic;
    long L = 0;
    long H = 0;
    long num_devices = 0;
    long per_device = 0;
    long K = 0;
    long M = 0;
    Detector detector = Detector::cdml;
    long trials = 0;
    double p_e = 0.0;
    double p_e_stderr = 0.0;
    double seconds = 0.0;
    double divergence_rate = 0.0;
    std::vector<double> per_trial;  // P_e of every trial, in trial order

    static constexpr const char* csv_header = "family,L,H,N_d,Q,K,M,detector,trials,p_e,p_e_stderr,seconds";

    std::string csv_row() const {
        std::ostringstream os;
        os << to_string(family) << ',' << L << ',' << H << ',' << num_devices << ',' << per_device << ',' << K << ','
           << M << ',' << to_string(detector) << ',' << trials << ',' << std::setprecision(10) << p_e << ','
           << p_e_stderr << ',' << std::setprecision(6) << seconds;
        return os.str();
    }
};

/// Worker count from GFSIG_WORKERS, defaulting to the hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("GFSIG_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

/// Runs `trials` trials at one (K, M) grid point.
inline ResultRow run_grid_point(const ExperimentConfig& c, const SignatureMatrix& s, long K, long M,
                                unsigned workers = worker_count()) {
    const auto start = std::chrono::steady_clock::now();
    const CMatrix s_scaled = s.scaled();
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(c.trials));
    std::atomic<long> next{0};
    auto work = [&] {
        for (long t = next++; t < c.trials; t = next++) outcomes[t] = run_trial(c, s, s_scaled, K, M, t);
    };
    workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(c.trials)));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    ResultRow row;
    row.family = c.family;
    row.L = s.length();
    row.H = s.metadata.count("H") ? std::stol(s.metadata.at("H")) : 0;
    row.num_devices = s.num_devices;
    row.per_device = s.per_device;
    row.K = K;
    row.M = M;
    row.detector = c.detector;
    row.trials = c.trials;
    double sum = 0.0, sumsq = 0.0;
    long diverged = 0;
    for (const auto& o : outcomes) {
        row.per_trial.push_back(o.p_e);
        sum += o.p_e;
        sumsq += o.p_e * o.p_e;
        diverged += o.diverged;
    }
    const double n = static_cast<double>(c.trials);
    row.p_e = sum / n;
    if (c.trials > 1) {
        const double var = std::max(0.0, (sumsq - n * row.p_e * row.p_e) / (n - 1.0));
        row.p_e_stderr = std::sqrt(var / n);
    }
    row.divergence_rate = static_cast<double>(diverged) / n;
    if (c.record_timing)
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

/// Full K x M sweep, rows ordered K-major.
inline std::vector<ResultRow> run_experiment(const ExperimentConfig& c, unsigned workers = worker_count()) {
    validate_config(c);
    const SignatureMatrix s = signatures_for(c);
    std::vector<ResultRow> rows;
    for (auto K : c.K_grid)
        for (auto M : c.M_grid) rows.push_back(run_grid_point(c, s, K, M, workers));
    return rows;
}

inline void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << ResultRow::csv_header << "\n";
    for (const auto& r : rows) os << r.csv_row() << "\n";
}

}  // namespace gfsig

#endif  // GFSIG_EXPERIMENT_HPP
