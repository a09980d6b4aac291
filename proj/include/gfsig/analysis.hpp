#ifndef GFSIG_ANALYSIS_HPP
#define GFSIG_ANALYSIS_HPP

/**
 * @file analysis.hpp
 * @brief Coherence and identifiability analytics for signature matrices.
 *
 * Covers the Welch lower bound, the closed-form coherence upper bounds of the
 * four deterministic families, the Khatri-Rao lift conj(s_i) (x) s_i whose
 * coherence is mu(S)^2, the coherence-based ML identifiability test, the
 * null-space sign-ratio test and a brute-force spark oracle for tiny inputs.
 */

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "gfsig/coherence.hpp"
#include "gfsig/rng.hpp"
#include "gfsig/seqgen.hpp"
#include "gfsig/types.hpp"

namespace gfsig {

struct WelchBound {
    double value = 0.0;
    bool vacuous = false;  // N <= L: the bound carries no information
};

/// sqrt((N-L)/(L(N-1))) for N > L; zero and flagged otherwise.
inline WelchBound welch_bound(Eigen::Index L, Eigen::Index n) {
    if (L < 1) throw InvalidArgument("welch_bound: L must be positive");
    if (n <= L) return {0.0, true};
    const double l = static_cast<double>(L), nn = static_cast<double>(n);
    return {std::sqrt((nn - l) / (l * (nn - 1.0))), false};
}

/// Column i of the result is conj(s_i) (x) s_i, so its norm is |s_i|^2.
template <typename Derived>
CMatrix khatri_rao_lift(const Eigen::MatrixBase<Derived>& s) {
    const Eigen::Index L = s.rows();
    CMatrix out(L * L, s.cols());
    for (Eigen::Index c = 0; c < s.cols(); ++c)
        for (Eigen::Index r = 0; r < L; ++r)
            out.col(c).segment(r * L, L) = std::conj(s(r, c)) * s.col(c);
    return out;
}

struct TheoremBound {
    double bound = 1.0;
    bool small_regime = false;
};

/**
 * Two-case coherence bound of a deterministic family holding N_d devices of Q
 * signatures. The small regime applies while N_d*Q fits in the leading masks
 * (L^2 columns for cubic and trace, (H-1)L for PR and Sidelnikov).
 */
inline TheoremBound theorem_coherence_bound(Family family, Eigen::Index L, Eigen::Index H, Eigen::Index num_devices,
                                            Eigen::Index per_device) {
    const double l = static_cast<double>(L);
    const Eigen::Index n = num_devices * per_device;
    switch (family) {
        case Family::cubic: {
            const bool small = n <= L * L;
            return {small ? 1.0 / std::sqrt(l) : 2.0 / std::sqrt(l), small};
        }
        case Family::power_residue: {
            const bool small = n <= (H - 1) * L;
            return {small ? (std::sqrt(l) + 1.0) / l : (2.0 * std::sqrt(l) + 2.0) / l, small};
        }
        case Family::sidelnikov: {
            const bool small = n <= (H - 1) * L;
            return {small ? (std::sqrt(l + 1.0) + 3.0) / l : (2.0 * std::sqrt(l + 1.0) + 4.0) / l, small};
        }
        case Family::trace: {
            const bool small = n <= L * L;
            return {small ? (std::sqrt(l + 1.0) + 2.0) / l : (2.0 * std::sqrt(l + 1.0) + 2.0) / l, small};
        }
        default: throw InvalidArgument("theorem_coherence_bound: no bound for family " + std::string(to_string(family)));
    }
}

struct MlCondition {
    bool holds = false;
    double success_probability = 0.0;  // 1 - 2^-delta
};

/// mu < 1/sqrt(K + delta - 1), strict.
inline MlCondition ml_coherence_condition(double mu, long K, long delta) {
    if (K < 1 || delta < 1) throw InvalidArgument("ml_coherence_condition: K and delta must be at least 1");
    const double limit = 1.0 / std::sqrt(static_cast<double>(K + delta - 1));
    return {mu < limit, 1.0 - std::ldexp(1.0, static_cast<int>(-delta))};
}

struct CoherenceReport {
    Family family = Family::custom;
    Eigen::Index L = 0;
    Eigen::Index H = 0;
    Eigen::Index num_devices = 0;
    Eigen::Index per_device = 0;
    double mu = 0.0;
    double welch = 0.0;
    std::optional<TheoremBound> theorem;
    std::pair<Eigen::Index, Eigen::Index> argmax_pair{0, 0};

    static constexpr const char* csv_header = "family,L,H,N_d,Q,mu,welch,bound,regime";

    std::string csv_row() const {
        std::ostringstream os;
        os.precision(12);
        os << to_string(family) << ',' << L << ',' << H << ',' << num_devices << ',' << per_device << ',' << mu << ','
           << welch << ',';
        if (theorem)
            os << theorem->bound << ',' << (theorem->small_regime ? "small" : "general");
        else
            os << "nan,none";
        return os.str();
    }

    /// welch <= mu (+tol) and, for tagged families, mu <= bound (+tol).
    bool within_bounds(double tol = 1e-9) const {
        if (mu < welch - tol) return false;
        if (theorem && mu > theorem->bound + tol) return false;
        return true;
    }
};

inline CoherenceReport coherence_report(const SignatureMatrix& s, Eigen::Index H = 0) {
    CoherenceReport r;
    r.family = s.family;
    r.L = s.length();
    r.H = H;
    r.num_devices = s.num_devices;
    r.per_device = s.per_device;
    const auto c = coherence_detail(s.entries);
    r.mu = c.mu;
    r.argmax_pair = c.argmax_pair;
    r.welch = welch_bound(s.length(), s.columns()).value;
    if (is_deterministic(s.family))
        r.theorem = theorem_coherence_bound(s.family, r.L, H, s.num_devices, s.per_device);
    return r;
}

/// Fraction of negative entries among entries with |x_i| > tol * max|x|.
inline double negative_fraction(const RVector& x, double nonzero_tol) {
    const double cut = nonzero_tol * x.cwiseAbs().maxCoeff();
    long nonzero = 0, negative = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (std::abs(x[i]) > cut) {
            ++nonzero;
            if (x[i] < 0) ++negative;
        }
    }
    return nonzero ? static_cast<double>(negative) / static_cast<double>(nonzero) : 0.0;
}

/// Orthonormal basis (columns) of the real null space of [Re(A); Im(A)].
inline RMatrix real_null_space(const CMatrix& a, double rel_tol = 1e-10) {
    RMatrix stacked(2 * a.rows(), a.cols());
    stacked.topRows(a.rows()) = a.real();
    stacked.bottomRows(a.rows()) = a.imag();
    // A tall system is first reduced to its R factor (same singular values and
    // null space). JacobiSVD rather than BDCSVD: the latter trips on the heavily
    // clustered spectra of structured lifts.
    if (stacked.rows() > stacked.cols()) {
        Eigen::HouseholderQR<RMatrix> qr(stacked);
        stacked = qr.matrixQR().topRows(stacked.cols()).triangularView<Eigen::Upper>();
    }
    Eigen::JacobiSVD<RMatrix> svd(stacked, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cut = sv.size() ? rel_tol * sv[0] : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > cut) ++rank;
    return svd.matrixV().rightCols(a.cols() - rank);
}

struct A1Report {
    double ratio = std::numeric_limits<double>::quiet_NaN();
    Eigen::Index null_dim = 0;
    int samples = 0;
    bool empty = true;  // null space is {0}; no ratio available
};

/**
 * Average negative-entry ratio of random unit vectors drawn uniformly from the
 * real null space of the Khatri-Rao lift of S. An empty null space is
 * reported through A1Report::empty rather than an exception.
 */
template <typename Derived>
A1Report a1_sign_ratio(const Eigen::MatrixBase<Derived>& s, int num_samples, Rng& rng, double nonzero_tol = 1e-8) {
    if (num_samples < 1) throw InvalidArgument("a1_sign_ratio: need at least one sample");
    const RMatrix z = real_null_space(khatri_rao_lift(s));
    A1Report rep;
    rep.null_dim = z.cols();
    if (z.cols() == 0) return rep;
    rep.empty = false;
    rep.samples = num_samples;
    std::normal_distribution<double> nd(0.0, 1.0);
    double sum = 0.0;
    RVector c(z.cols());
    for (int t = 0; t < num_samples; ++t) {
        for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = nd(rng);
        RVector x = z * c;
        x /= x.norm();
        sum += negative_fraction(x, nonzero_tol);
    }
    rep.ratio = sum / num_samples;
    return rep;
}

struct SparkResult {
    Eigen::Index value = 0;  // exact spark, or the certified lower bound k_max+1
    bool exact = false;
};

/// Exhaustive spark for tiny matrices (N <= 24, k_max <= 8). A column subset
/// counts as dependent when sigma_min < 1e-9 * sigma_max.
template <typename Derived>
SparkResult spark_bruteforce(const Eigen::MatrixBase<Derived>& a, int k_max) {
    const Eigen::Index n = a.cols();
    if (n > 24 || k_max > 8 || k_max < 1) throw InvalidArgument("spark_bruteforce: limited to N <= 24, 1 <= k_max <= 8");
    const CMatrix m = a;
    for (int k = 1; k <= std::min<Eigen::Index>(k_max, n); ++k) {
        if (k > m.rows()) return {k, true};
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) idx[i] = i;
        CMatrix sub(m.rows(), k);
        while (true) {
            for (int i = 0; i < k; ++i) sub.col(i) = m.col(idx[i]);
            Eigen::JacobiSVD<CMatrix> svd(sub);
            const auto& sv = svd.singularValues();
            if (sv[0] == 0.0 || sv[k - 1] < 1e-9 * sv[0]) return {k, true};
            int pos = k - 1;
            while (pos >= 0 && idx[pos] == n - k + pos) --pos;
            if (pos < 0) break;
            ++idx[pos];
            for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
        }
    }
    return {k_max + 1, false};
}

}  // namespace gfsig

#endif  // GFSIG_ANALYSIS_HPP
