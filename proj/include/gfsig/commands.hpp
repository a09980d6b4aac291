#ifndef GFSIG_COMMANDS_HPP
#define GFSIG_COMMANDS_HPP

// Subcommand bodies behind the gfsig CLI. Each returns a process exit code and
// writes to caller-supplied streams so the commands are testable in-process.

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "gfsig/analysis.hpp"
#include "gfsig/experiment.hpp"
#include "gfsig/seqgen.hpp"

namespace gfsig {

/// Deterministic family selector shared by gen, verify and a1.
struct FamilySpec {
    Family family = Family::cubic;
    long L = 0;
    long p = 0;
    long m = 0;
    long H = 0;

    MaskingSet masks() const {
        ExperimentConfig c;
        c.family = family;
        c.L = L;
        c.p = p;
        c.m = m;
        c.H = H;
        return masking_set_for(c);
    }

    std::string label() const {
        std::string s(to_string(family));
        if (family == Family::sidelnikov || family == Family::trace)
            s += "(p=" + std::to_string(p) + ",m=" + std::to_string(m) + ")";
        else
            s += "(L=" + std::to_string(L) + ")";
        return s;
    }
};

/// Parameter grid covering every deterministic family at desk scale.
inline std::vector<FamilySpec> default_verify_grid() {
    return {{Family::cubic, 7, 0, 0, 0},         {Family::cubic, 11, 0, 0, 0},      {Family::cubic, 23, 0, 0, 0},
            {Family::power_residue, 11, 0, 0, 10}, {Family::power_residue, 23, 0, 0, 22},
            {Family::sidelnikov, 0, 5, 2, 0},     {Family::sidelnikov, 0, 3, 3, 0},
            {Family::trace, 0, 5, 2, 0},          {Family::trace, 0, 3, 3, 0}};
}

struct GenOptions {
    FamilySpec spec;
    long per_device = 4;
    long num_devices = 0;  // 0 = full capacity
    std::string seed_out;
    std::string matrix_out;
};

inline int cmd_gen(const GenOptions& o, std::ostream& out, std::ostream& err) {
    try {
        const MaskingSet set = o.spec.masks();
        if (o.per_device < 1) throw InvalidArgument("Q must be positive");
        out << "family: " << to_string(set.family) << "\n"
            << "L: " << set.L << "\n"
            << "B: " << set.B << "\n"
            << "N_s: " << set.capacity() << "\n"
            << "capacity: " << set.capacity() / o.per_device << " devices at Q=" << o.per_device << "\n";
        if (set.params.H) out << "H: " << set.params.H << "\n";
        if (set.field) out << "poly: " << set.field->poly_string() << "\n";
        if (!set.seed.empty()) {
            out << "seed:";
            for (std::size_t i = 0; i < set.seed.size(); ++i) out << (i ? ", " : " ") << set.seed[i];
            out << "\n";
        }
        if (!o.seed_out.empty()) {
            std::ofstream f(o.seed_out);
            if (!f) throw InvalidArgument("cannot open " + o.seed_out);
            for (std::size_t i = 0; i < set.seed.size(); ++i) f << (i ? "," : "") << set.seed[i];
            f << "\n";
        }
        if (!o.matrix_out.empty()) {
            const long nd = o.num_devices > 0 ? o.num_devices : static_cast<long>(set.capacity() / o.per_device);
            const auto s = build_signature_matrix(set, nd, o.per_device);
            std::ofstream f(o.matrix_out);
            if (!f) throw InvalidArgument("cannot open " + o.matrix_out);
            write_signature_csv(f, s);
        }
        return 0;
    } catch (const std::exception& e) {
        err << "gen: " << e.what() << "\n";
        return 2;
    }
}

struct VerifyOptions {
    std::vector<FamilySpec> grid = default_verify_grid();
    long per_device = 4;
    bool corrupt = false;      // duplicate a column, to exercise the failure path
    long lift_columns = 64;   // column subsample for the Khatri-Rao identity
    int ortho_blocks = 10;
};

/// Coherence regression gate: nonzero exit when any bound or identity fails.
inline int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
    bool all_ok = true;
    out << CoherenceReport::csv_header << ",lift_err,ortho_err,status\n";
    try {
        for (const auto& spec : o.grid) {
            const MaskingSet set = spec.masks();
            const long small_nd = static_cast<long>(set.small_regime_masks() * set.L / o.per_device);
            const long full_nd = static_cast<long>(set.capacity() / o.per_device);
            double ortho_err = 0.0;
            const Eigen::Index step = std::max<Eigen::Index>(1, set.B / o.ortho_blocks);
            for (Eigen::Index b = 1; b <= set.B; b += step) {
                const CMatrix phi = mask_block(set, b);
                ortho_err = std::max(ortho_err, (phi.adjoint() * phi - CMatrix::Identity(set.L, set.L)).cwiseAbs().maxCoeff());
            }
            for (long nd : {small_nd, full_nd}) {
                if (nd < 1) continue;
                SignatureMatrix s = build_signature_matrix(set, nd, o.per_device);
                if (o.corrupt) s.entries.col(0) = s.entries.col(1);
                const auto rep = coherence_report(s, set.params.H);
                const Eigen::Index cols = std::min<Eigen::Index>(o.lift_columns, s.columns());
                CMatrix sub(s.length(), cols);
                for (Eigen::Index j = 0; j < cols; ++j) sub.col(j) = s.entries.col(j * s.columns() / cols);
                const double mu_sub = coherence(sub);
                const double lift_err = std::abs(coherence(khatri_rao_lift(sub)) - mu_sub * mu_sub);
                const bool ok = rep.within_bounds(1e-9) && lift_err < 1e-12 && ortho_err < 1e-10;
                all_ok = all_ok && ok;
                out << rep.csv_row() << ',' << std::setprecision(3) << lift_err << ',' << ortho_err << ','
                    << (ok ? "pass" : "FAIL") << std::setprecision(6) << "\n";
            }
        }
    } catch (const std::exception& e) {
        err << "verify: " << e.what() << "\n";
        return 2;
    }
    return all_ok ? 0 : 1;
}

/// Runs the experiment in `config_path`; CSV goes to the config's `output`,
/// the override path, or `out` when neither is set.
inline int cmd_simulate(const std::string& config_path, const std::string& output_override, std::ostream& out,
                        std::ostream& err) {
    try {
        std::ifstream f(config_path);
        if (!f) throw InvalidArgument("cannot open config " + config_path);
        const ExperimentConfig c = parse_config(f);
        const auto rows = run_experiment(c);
        for (const auto& r : rows)
            if (r.divergence_rate > 0.5)
                err << "simulate: warning: detector diverged in " << r.divergence_rate * 100.0
                    << "% of trials at K=" << r.K << ", M=" << r.M << "\n";
        const std::string path = !output_override.empty() ? output_override : c.output;
        if (path.empty()) {
            write_results_csv(out, rows);
        } else {
            std::ofstream o(path);
            if (!o) throw InvalidArgument("cannot open " + path);
            write_results_csv(o, rows);
        }
        return 0;
    } catch (const std::exception& e) {
        err << "simulate: " << e.what() << "\n";
        return 2;
    }
}

struct A1Options {
    std::vector<FamilySpec> families{{Family::cubic, 23, 0, 0, 0},
                                     {Family::power_residue, 23, 0, 0, 0},
                                     {Family::gaussian, 23, 0, 0, 0},
                                     {Family::musa, 23, 0, 0, 0},
                                     {Family::qpsk, 23, 0, 0, 0}};
    long num_devices = 200;
    long per_device = 4;
    int samples = 1000;
    std::uint64_t seed = 1;
    int signature_trials = 10;
};

inline SignatureMatrix signatures_for(const FamilySpec& f, long num_devices, long per_device, std::uint64_t seed,
                                      int signature_trials) {
    ExperimentConfig c;
    c.family = f.family;
    c.L = f.L;
    c.p = f.p;
    c.m = f.m;
    c.H = f.H;
    c.num_devices = num_devices;
    c.per_device = per_device;
    c.base_seed = seed;
    c.signature_trials = signature_trials;
    return signatures_for(c);
}

inline int cmd_a1(const A1Options& o, std::ostream& out, std::ostream& err) {
    try {
        out << "family,L,N_d,Q,null_dim,samples,ratio\n";
        for (const auto& f : o.families) {
            const auto s = signatures_for(f, o.num_devices, o.per_device, o.seed, o.signature_trials);
            Rng rng = derive_stream(o.seed, {static_cast<std::uint64_t>(f.family)}, StreamTag::a1);
            const auto rep = a1_sign_ratio(s.entries, o.samples, rng);
            out << to_string(f.family) << ',' << s.length() << ',' << o.num_devices << ',' << o.per_device << ','
                << rep.null_dim << ',' << rep.samples << ',';
            if (rep.empty)
                out << "empty null space\n";
            else
                out << std::setprecision(6) << rep.ratio << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        err << "a1: " << e.what() << "\n";
        return 2;
    }
}

/// Wall-clock timing of signature generation, coherence and one detection trial.
inline int cmd_bench(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
    try {
        validate_config(c);
        using clock = std::chrono::steady_clock;
        auto t0 = clock::now();
        const auto s = signatures_for(c);
        auto t1 = clock::now();
        const double mu = coherence(s.entries);
        auto t2 = clock::now();
        const CMatrix scaled = s.scaled();
        const auto outcome = run_trial(c, s, scaled, c.K_grid.front(), c.M_grid.front(), 0);
        auto t3 = clock::now();
        auto secs = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };
        out << "generate_s: " << secs(t0, t1) << "\n"
            << "coherence_s: " << secs(t1, t2) << " (mu=" << mu << ")\n"
            << "trial_s: " << secs(t2, t3) << " (P_e=" << outcome.p_e << ")\n";
        return 0;
    } catch (const std::exception& e) {
        err << "bench: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace gfsig

#endif  // GFSIG_COMMANDS_HPP
