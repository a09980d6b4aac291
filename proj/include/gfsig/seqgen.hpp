#ifndef GFSIG_SEQGEN_HPP
#define GFSIG_SEQGEN_HPP

/**
 * @file seqgen.hpp
 * @brief Masking-sequence families and DFT-masked signature matrices.
 *
 * A masking set holds B unimodular sequences v_1..v_B of length L. Each mask
 * yields the block Phi_b = diag(v_b) * F_L, where F_L is the unitary L-point
 * DFT matrix; concatenating the blocks gives N_s = B*L candidate signatures.
 * Devices take Q consecutive columns each, in block order.
 *
 * Mask index b is 1-based in the index maps below (as are device numbers at
 * the CLI); element index k runs 0..L-1. Phases are evaluated from exact
 * integer numerators so every entry is a correctly rounded unit phasor.
 */

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "gfsig/coherence.hpp"
#include "gfsig/galois.hpp"
#include "gfsig/rng.hpp"
#include "gfsig/types.hpp"

namespace gfsig {

struct MaskingParams {
    std::uint32_t p = 0;  // field characteristic (prime length L for cubic/PR)
    unsigned m = 1;       // extension degree
    std::uint32_t H = 0;  // alphabet size for PR / Sidelnikov
};

struct MaskingSet {
    Family family = Family::custom;
    Eigen::Index L = 0;
    Eigen::Index B = 0;
    CMatrix masks;              // B x L, row b-1 holds v_b
    std::vector<int> seed;      // base integer sequence (empty for cubic)
    MaskingParams params;
    std::shared_ptr<const ExtField> field;  // set for Sidelnikov and trace

    /// Total signature count N_s = B*L.
    Eigen::Index capacity() const { return B * L; }

    /// Number of leading masks that form the small-N regime of the coherence
    /// bounds (L for cubic/trace, H-1 for PR/Sidelnikov).
    Eigen::Index small_regime_masks() const {
        switch (family) {
            case Family::cubic:
            case Family::trace: return L;
            case Family::power_residue:
            case Family::sidelnikov: return params.H - 1;
            default: return B;
        }
    }
};

struct SignatureMatrix {
    CMatrix entries;  // L x N, unit-norm columns
    Eigen::Index num_devices = 0;
    Eigen::Index per_device = 1;
    Family family = Family::custom;
    std::map<std::string, std::string> metadata;

    Eigen::Index length() const { return entries.rows(); }
    Eigen::Index columns() const { return entries.cols(); }
    /// Column of (device n, symbol q), both 0-based.
    Eigen::Index column_of(Eigen::Index n, Eigen::Index q) const { return n * per_device + q; }
    /// Columns rescaled to norm sqrt(L), as transmitted.
    CMatrix scaled() const { return entries * std::sqrt(static_cast<double>(length())); }
};

// (lambda1, lambda2) index maps, b 1-based.
struct LambdaPair {
    std::int64_t lambda1;
    std::int64_t lambda2;
};

inline LambdaPair cubic_lambdas(std::int64_t b, std::int64_t L) { return {(b - 1) / L, (b - 1) % L + 1}; }
inline LambdaPair residue_lambdas(std::int64_t b, std::int64_t H) { return {(b - 1) / (H - 1), (b - 1) % (H - 1) + 1}; }
inline LambdaPair trace_lambdas(std::int64_t b, std::int64_t L) { return {(b - 1) / L, (b - 1) % L}; }

/// Cubic masks v_b(k) = exp(j2pi(l1 k^3 + l2 k^2)/L), B = L^2.
inline MaskingSet gen_cubic_masks(std::int64_t L) {
    if (L < 3 || !is_prime(static_cast<std::uint64_t>(L)))
        throw InvalidArgument("cubic masks: L must be an odd prime");
    MaskingSet set;
    set.family = Family::cubic;
    set.L = L;
    set.B = L * L;
    set.params = {static_cast<std::uint32_t>(L), 1, 0};
    set.masks.resize(set.B, L);
    for (std::int64_t b = 1; b <= set.B; ++b) {
        const auto [l1, l2] = cubic_lambdas(b, L);
        for (std::int64_t k = 0; k < L; ++k) {
            const std::int64_t k2 = k * k % L;
            const std::int64_t k3 = k2 * k % L;
            set.masks(b - 1, k) = unit_phasor(l1 * k3 + l2 * k2, L);
        }
    }
    return set;
}

/// H-ary power-residue masks v_b(k) = exp(j2pi l2 log(k + l1)/H), B = (H-1)L.
/// H = 0 selects H = L-1.
inline MaskingSet gen_pr_masks(std::int64_t L, std::int64_t H = 0) {
    if (L < 3 || !is_prime(static_cast<std::uint64_t>(L)))
        throw InvalidArgument("PR masks: L must be an odd prime");
    if (H == 0) H = L - 1;
    if (H <= 2 || (L - 1) % H != 0) throw InvalidArgument("PR masks: H must divide L-1 and exceed 2");
    const PrimeField fp(static_cast<std::uint32_t>(L));
    MaskingSet set;
    set.family = Family::power_residue;
    set.L = L;
    set.B = (H - 1) * L;
    set.params = {static_cast<std::uint32_t>(L), 1, static_cast<std::uint32_t>(H)};
    set.seed.resize(L);
    for (std::int64_t k = 0; k < L; ++k) set.seed[k] = static_cast<int>(fp.log(k) % H);
    set.masks.resize(set.B, L);
    for (std::int64_t b = 1; b <= set.B; ++b) {
        const auto [l1, l2] = residue_lambdas(b, H);
        for (std::int64_t k = 0; k < L; ++k)
            set.masks(b - 1, k) = unit_phasor(l2 * static_cast<std::int64_t>(fp.log((k + l1) % L)), H);
    }
    return set;
}

/// H-ary Sidelnikov masks v_b(k) = exp(j2pi l2 log(1 + alpha^{k+l1})/H) over
/// GF(p^m), L = p^m - 1, B = (H-1)L. H = 0 selects H = L.
inline MaskingSet gen_sidelnikov_masks(std::uint32_t p, unsigned m, std::int64_t H = 0,
                                       std::optional<std::vector<std::uint32_t>> poly = std::nullopt) {
    auto field = std::make_shared<const ExtField>(build_ext_field(p, m, std::move(poly)));
    const auto L = static_cast<std::int64_t>(field->order());
    if (H == 0) H = L;
    if (H < 2 || L % H != 0) throw InvalidArgument("Sidelnikov masks: H must divide p^m-1 and be at least 2");
    MaskingSet set;
    set.family = Family::sidelnikov;
    set.L = L;
    set.B = (H - 1) * L;
    set.params = {p, m, static_cast<std::uint32_t>(H)};
    // c(k) = log(1 + alpha^k)
    std::vector<std::int64_t> base(L);
    for (std::int64_t k = 0; k < L; ++k) base[k] = field->log(field->add(field->one(), field->exp(k)));
    set.seed.resize(L);
    for (std::int64_t k = 0; k < L; ++k) set.seed[k] = static_cast<int>(base[k] % H);
    set.masks.resize(set.B, L);
    for (std::int64_t b = 1; b <= set.B; ++b) {
        const auto [l1, l2] = residue_lambdas(b, H);
        for (std::int64_t k = 0; k < L; ++k) set.masks(b - 1, k) = unit_phasor(l2 * base[(k + l1) % L], H);
    }
    set.field = std::move(field);
    return set;
}

/// Trace masks v_b(k) = exp(j2pi Tr(alpha^{k+l2} + theta alpha^{2(k+l2)})/p)
/// with theta = 0 for l1 = 0 and alpha^{l1-1} otherwise; B = L(L+1).
inline MaskingSet gen_trace_masks(std::uint32_t p, unsigned m,
                                  std::optional<std::vector<std::uint32_t>> poly = std::nullopt) {
    if (p == 2) throw InvalidArgument("trace masks: p must be odd");
    auto field = std::make_shared<const ExtField>(build_ext_field(p, m, std::move(poly)));
    const auto L = static_cast<std::int64_t>(field->order());
    MaskingSet set;
    set.family = Family::trace;
    set.L = L;
    set.B = L * (L + 1);
    set.params = {p, m, 0};
    set.seed.resize(L);
    for (std::int64_t k = 0; k < L; ++k) set.seed[k] = static_cast<int>(field->trace(field->exp(k)));
    set.masks.resize(set.B, L);
    for (std::int64_t b = 1; b <= set.B; ++b) {
        const auto [l1, l2] = trace_lambdas(b, L);
        for (std::int64_t k = 0; k < L; ++k) {
            auto x = field->exp(k + l2);
            if (l1 > 0) x = field->add(x, field->exp(l1 - 1 + 2 * (k + l2)));
            set.masks(b - 1, k) = unit_phasor(field->trace(x), p);
        }
    }
    set.field = std::move(field);
    return set;
}

/// Unitary L-point DFT matrix, F(k,l) = exp(-j2pi kl/L)/sqrt(L).
inline CMatrix dft_matrix(Eigen::Index L) {
    CMatrix f(L, L);
    const double s = 1.0 / std::sqrt(static_cast<double>(L));
    for (Eigen::Index k = 0; k < L; ++k)
        for (Eigen::Index l = 0; l < L; ++l) f(k, l) = s * unit_phasor(-static_cast<std::int64_t>(k * l), L);
    return f;
}

/// Phi_b = diag(v_b) F_L, b 1-based.
inline CMatrix mask_block(const MaskingSet& set, Eigen::Index b) {
    if (b < 1 || b > set.B) throw InvalidArgument("mask_block: index out of range");
    return set.masks.row(b - 1).transpose().asDiagonal() * dft_matrix(set.L);
}

/// First N_d*Q columns of [Phi_1, ..., Phi_B].
inline SignatureMatrix build_signature_matrix(const MaskingSet& set, Eigen::Index num_devices, Eigen::Index per_device) {
    if (num_devices < 1 || per_device < 1) throw InvalidArgument("build_signature_matrix: N_d and Q must be positive");
    const Eigen::Index n = num_devices * per_device;
    if (n > set.capacity())
        throw InvalidArgument("build_signature_matrix: N_d*Q = " + std::to_string(n) + " exceeds capacity " +
                              std::to_string(set.capacity()));
    const Eigen::Index L = set.L;
    const CMatrix f = dft_matrix(L);
    SignatureMatrix s;
    s.entries.resize(L, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const Eigen::Index b = c / L;
        const Eigen::Index l = c % L;
        s.entries.col(c) = set.masks.row(b).transpose().cwiseProduct(f.col(l));
    }
    s.num_devices = num_devices;
    s.per_device = per_device;
    s.family = set.family;
    s.metadata["B"] = std::to_string(set.B);
    if (set.params.H) s.metadata["H"] = std::to_string(set.params.H);
    if (set.field) {
        s.metadata["p"] = std::to_string(set.params.p);
        s.metadata["m"] = std::to_string(set.params.m);
        s.metadata["poly"] = set.field->poly_string();
    }
    return s;
}

namespace detail {

inline cdouble draw_entry(Family kind, Rng& rng) {
    switch (kind) {
        case Family::gaussian: return complex_normal(rng);
        case Family::qpsk: {
            std::uniform_int_distribution<int> d(0, 3);
            const int v = d(rng);
            const double s = 1.0 / std::sqrt(2.0);
            return {(v & 1) ? -s : s, (v & 2) ? -s : s};
        }
        case Family::musa: {
            static constexpr std::array<std::array<int, 2>, 9> pts{
                {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {0, 0}}};
            std::uniform_int_distribution<int> d(0, 8);
            const auto& pt = pts[static_cast<std::size_t>(d(rng))];
            const double s = std::sqrt(3.0) / 2.0;
            return {s * pt[0], s * pt[1]};
        }
        default: throw InvalidArgument("random family: unsupported kind");
    }
}

}  // namespace detail

/// Raw L x N draw of a random family, columns not yet normalized. All-zero
/// MUSA columns are redrawn.
inline CMatrix draw_random_matrix(Family kind, Eigen::Index L, Eigen::Index n, Rng& rng) {
    CMatrix a(L, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        do {
            for (Eigen::Index i = 0; i < L; ++i) a(i, j) = detail::draw_entry(kind, rng);
        } while (a.col(j).squaredNorm() == 0.0);
    }
    return a;
}

/// Lowest-coherence matrix among `trials` random draws, unit-norm columns.
inline SignatureMatrix gen_random_family(Family kind, Eigen::Index L, Eigen::Index num_devices,
                                         Eigen::Index per_device, int trials, Rng& rng) {
    if (trials < 1) throw InvalidArgument("gen_random_family: trials must be at least 1");
    if (L < 1 || num_devices < 1 || per_device < 1) throw InvalidArgument("gen_random_family: sizes must be positive");
    const Eigen::Index n = num_devices * per_device;
    SignatureMatrix best;
    double best_mu = 2.0;
    int best_idx = 0;
    for (int t = 0; t < trials; ++t) {
        CMatrix cand = normalize_columns(draw_random_matrix(kind, L, n, rng));
        const double mu = n >= 2 ? coherence(cand) : 0.0;
        if (mu < best_mu) {
            best_mu = mu;
            best_idx = t;
            best.entries = std::move(cand);
        }
    }
    best.num_devices = num_devices;
    best.per_device = per_device;
    best.family = kind;
    best.metadata["trials"] = std::to_string(trials);
    best.metadata["chosen_trial"] = std::to_string(best_idx);
    return best;
}

/// CSV export: two comment header lines, then L rows of interleaved re,im.
inline void write_signature_csv(std::ostream& os, const SignatureMatrix& s) {
    os << "# L=" << s.length() << ",N=" << s.columns() << ",family=" << to_string(s.family)
       << ",N_d=" << s.num_devices << ",Q=" << s.per_device << "\n#";
    bool first = true;
    for (const auto& [k, v] : s.metadata) {
        os << (first ? " " : ",") << k << "=" << v;
        first = false;
    }
    os << "\n";
    const auto old_prec = os.precision(17);
    for (Eigen::Index i = 0; i < s.length(); ++i) {
        for (Eigen::Index j = 0; j < s.columns(); ++j) {
            if (j) os << ',';
            os << s.entries(i, j).real() << ',' << s.entries(i, j).imag();
        }
        os << "\n";
    }
    os.precision(old_prec);
}

}  // namespace gfsig

#endif  // GFSIG_SEQGEN_HPP
