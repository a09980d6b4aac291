#ifndef GFSIG_COHERENCE_HPP
#define GFSIG_COHERENCE_HPP

#include <algorithm>
#include <utility>

#include "gfsig/types.hpp"

namespace gfsig {

struct CoherenceValue {
    double mu = 0.0;
    std::pair<Eigen::Index, Eigen::Index> argmax_pair{0, 0};
};

/// Columns scaled to unit l2-norm. Throws on a zero column.
template <typename Derived>
CMatrix normalize_columns(const Eigen::MatrixBase<Derived>& a) {
    CMatrix out = a;
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        const double n = out.col(j).norm();
        if (!(n > 0.0)) throw InvalidArgument("coherence: zero column " + std::to_string(j));
        out.col(j) /= n;
    }
    return out;
}

/**
 * Maximum normalized inner product between distinct columns, evaluated over
 * column blocks of the normalized Gram matrix so memory stays O(block^2).
 */
template <typename Derived>
CoherenceValue coherence_detail(const Eigen::MatrixBase<Derived>& a, Eigen::Index block = 1024) {
    if (a.cols() < 2) throw InvalidArgument("coherence: need at least two columns");
    const CMatrix s = normalize_columns(a);
    const Eigen::Index n = s.cols();
    CoherenceValue best{-1.0, {0, 1}};
    for (Eigen::Index i0 = 0; i0 < n; i0 += block) {
        const Eigen::Index bi = std::min(block, n - i0);
        for (Eigen::Index j0 = i0; j0 < n; j0 += block) {
            const Eigen::Index bj = std::min(block, n - j0);
            const Eigen::MatrixXd g = (s.middleCols(i0, bi).adjoint() * s.middleCols(j0, bj)).cwiseAbs();
            for (Eigen::Index jj = 0; jj < bj; ++jj) {
                for (Eigen::Index ii = 0; ii < bi; ++ii) {
                    const Eigen::Index gi = i0 + ii, gj = j0 + jj;
                    if (gi >= gj) continue;
                    if (g(ii, jj) > best.mu) best = {g(ii, jj), {gi, gj}};
                }
            }
        }
    }
    best.mu = std::min(best.mu, 1.0);
    return best;
}

template <typename Derived>
double coherence(const Eigen::MatrixBase<Derived>& a) {
    return coherence_detail(a).mu;
}

}  // namespace gfsig

#endif  // GFSIG_COHERENCE_HPP
