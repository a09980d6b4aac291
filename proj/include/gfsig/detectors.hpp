#ifndef GFSIG_DETECTORS_HPP
#define GFSIG_DETECTORS_HPP

/**
 * @file detectors.hpp
 * @brief Joint activity and data detection: covariance ML by coordinate
 *        descent (CD-ML), Bernoulli-Gaussian MMV-AMP, and the per-device
 *        error metric.
 *
 * Both detectors take the transmitted signature matrix, i.e. columns of norm
 * sqrt(L). Decisions pick, per device, the signature with the largest
 * statistic and declare the device active when that statistic reaches the
 * threshold (default 0.25).
 */

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Cholesky>

#include "gfsig/rng.hpp"
#include "gfsig/simulator.hpp"
#include "gfsig/types.hpp"

namespace gfsig {

inline constexpr double kDefaultActivityThreshold = 0.25;

// ---------------------------------------------------------------- CD-ML

struct MLEstimate {
    RVector gamma_hat;
    std::vector<double> objective_trace;  // initial value, then one entry per sweep
    int sweeps_run = 0;
    CMatrix sigma_inv;  // incrementally maintained inverse covariance at exit
};

struct CdmlOptions {
    int sweeps = 15;
    int refresh_every = 5;  // direct re-inversion of Sigma after this many sweeps
    bool record_objective = true;
    /// Called after every coordinate update with (coordinate, gamma).
    std::function<void(Eigen::Index, const RVector&)> on_update;
    /// Called at the end of every sweep, before any refresh.
    std::function<void(int, const RVector&, const CMatrix&)> on_sweep;
};

/// Sample covariance Y Y^H / M.
inline CMatrix sample_covariance(const CMatrix& y) {
    return (y * y.adjoint()) / static_cast<double>(y.cols());
}

/// S diag(gamma) S^H + sigma_w2 I.
inline CMatrix model_covariance(const CMatrix& s, const RVector& gamma, double sigma_w2) {
    CMatrix sigma = s * gamma.cast<cdouble>().asDiagonal() * s.adjoint();
    sigma.diagonal().array() += sigma_w2;
    return sigma;
}

/// log|Sigma| + tr(Sigma^{-1} Sigma_hat), evaluated directly via Cholesky.
inline double ml_objective(const CMatrix& s, const RVector& gamma, double sigma_w2, const CMatrix& sigma_hat) {
    const CMatrix sigma = model_covariance(s, gamma, sigma_w2);
    Eigen::LLT<CMatrix> llt(sigma);
    if (llt.info() != Eigen::Success) throw InvalidArgument("ml_objective: covariance not positive definite");
    const CMatrix& lower = llt.matrixLLT();
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < lower.rows(); ++i) logdet += 2.0 * std::log(lower(i, i).real());
    return logdet + llt.solve(sigma_hat).trace().real();
}

inline CMatrix inverse_covariance(const CMatrix& s, const RVector& gamma, double sigma_w2) {
    const CMatrix sigma = model_covariance(s, gamma, sigma_w2);
    return sigma.llt().solve(CMatrix::Identity(sigma.rows(), sigma.cols()));
}

/**
 * Coordinate descent on log|Sigma| + tr(Sigma^{-1} Sigma_hat) over gamma >= 0.
 * Each sweep visits all coordinates in a fresh random order; coordinate i moves
 * by its exact one-dimensional minimizer clamped at -gamma_i, and Sigma^{-1}
 * follows by a Sherman-Morrison update.
 */
inline MLEstimate cdml_estimate(const CMatrix& y, const CMatrix& s_scaled, double sigma_w2, Rng& rng,
                                const CdmlOptions& opt = {}) {
    if (!(sigma_w2 > 0.0) || !std::isfinite(sigma_w2)) throw InvalidArgument("cdml: sigma_w2 must be positive");
    if (opt.sweeps < 1) throw InvalidArgument("cdml: sweeps must be at least 1");
    if (y.rows() != s_scaled.rows()) throw InvalidArgument("cdml: Y and S row counts differ");
    if (!y.allFinite() || !s_scaled.allFinite()) throw InvalidArgument("cdml: non-finite input");

    const Eigen::Index L = s_scaled.rows();
    const Eigen::Index n = s_scaled.cols();
    const CMatrix sigma_hat = sample_covariance(y);

    MLEstimate est;
    est.gamma_hat = RVector::Zero(n);
    est.sigma_inv = CMatrix::Identity(L, L) / sigma_w2;
    if (opt.record_objective) est.objective_trace.push_back(ml_objective(s_scaled, est.gamma_hat, sigma_w2, sigma_hat));

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    CVector u(L);
    for (int sweep = 0; sweep < opt.sweeps; ++sweep) {
        std::shuffle(order.begin(), order.end(), rng);
        for (auto i : order) {
            u.noalias() = est.sigma_inv * s_scaled.col(i);
            const double a = s_scaled.col(i).dot(u).real();
            const double b = u.dot(sigma_hat * u).real();
            const double delta = std::max((b - a) / (a * a), -est.gamma_hat[i]);
            if (delta != 0.0) {
                est.gamma_hat[i] += delta;
                est.sigma_inv.noalias() -= (delta / (1.0 + delta * a)) * u * u.adjoint();
            }
            if (opt.on_update) opt.on_update(i, est.gamma_hat);
        }
        est.sweeps_run = sweep + 1;
        if (opt.on_sweep) opt.on_sweep(sweep, est.gamma_hat, est.sigma_inv);
        if (opt.refresh_every > 0 && (sweep + 1) % opt.refresh_every == 0)
            est.sigma_inv = inverse_covariance(s_scaled, est.gamma_hat, sigma_w2);
        if (opt.record_objective)
            est.objective_trace.push_back(ml_objective(s_scaled, est.gamma_hat, sigma_w2, sigma_hat));
    }
    return est;
}

// ---------------------------------------------------------------- MMV-AMP

struct AmpEstimate {
    CMatrix X_hat;  // N x M, same scale as Gamma^{1/2} H
    int iterations = 0;
    std::vector<double> residual_norm_trace;
    bool diverged = false;
};

struct AmpOptions {
    double activity_rate = 0.05;  // prior probability that a row is nonzero
    double gain = 1.0;            // large-scale gain g of active rows
    int max_iters = 50;
    double damping = 0.3;         // in [0, 1), weight kept on the previous X
    double tol = 1e-6;            // relative residual change for stopping
    std::optional<CMatrix> initial_X;
};

/**
 * MMV-AMP with known hyperparameters. The problem is rescaled to unit-norm
 * columns A = S/sqrt(L) and rows X' = sqrt(L) X, whose prior is
 * (1-lambda) delta_0 + lambda CN(0, L g^2 I_M). Each iteration applies the
 * row-wise MMSE denoiser at the effective noise level tau^2 = |R|_F^2 / (L M)
 * and a scalar Onsager correction (1/L) sum_n tr(J_n)/M, where J_n is the
 * denoiser Jacobian of row n.
 *
 * With L/N of a few percent the undamped recursion oscillates on
 * DFT-structured matrices; the default damping of 0.3 on X keeps it stable.
 */
inline AmpEstimate mmv_amp_estimate(const CMatrix& y, const CMatrix& s_scaled, double sigma_w2,
                                    const AmpOptions& opt = {}) {
    if (opt.max_iters < 1) throw InvalidArgument("mmv_amp: max_iters must be at least 1");
    if (!(opt.activity_rate > 0.0 && opt.activity_rate < 1.0))
        throw InvalidArgument("mmv_amp: activity_rate must lie in (0,1)");
    if (opt.damping < 0.0 || opt.damping >= 1.0) throw InvalidArgument("mmv_amp: damping must lie in [0,1)");
    if (sigma_w2 < 0.0) throw InvalidArgument("mmv_amp: sigma_w2 must be nonnegative");
    if (y.rows() != s_scaled.rows()) throw InvalidArgument("mmv_amp: Y and S row counts differ");

    const Eigen::Index L = s_scaled.rows();
    const Eigen::Index n = s_scaled.cols();
    const Eigen::Index M = y.cols();
    const double root_l = std::sqrt(static_cast<double>(L));
    const CMatrix a = s_scaled / root_l;
    const double beta = static_cast<double>(L) * opt.gain * opt.gain;
    const double log_prior_ratio = std::log((1.0 - opt.activity_rate) / opt.activity_rate);

    CMatrix x = opt.initial_X ? CMatrix(*opt.initial_X * root_l) : CMatrix::Zero(n, M);
    if (x.rows() != n || x.cols() != M) throw InvalidArgument("mmv_amp: initial_X has wrong shape");
    CMatrix r = y - a * x;
    const double r0 = std::max(r.norm(), std::sqrt(std::numeric_limits<double>::min()));

    AmpEstimate est;
    est.residual_norm_trace.push_back(r.norm());
    CMatrix u(n, M), x_new(n, M), r_new(L, M);
    for (int t = 0; t < opt.max_iters; ++t) {
        const double tau2 = std::max({r.squaredNorm() / static_cast<double>(L * M), sigma_w2, 1e-12 * beta});
        u.noalias() = a.adjoint() * r;
        u += x;

        const double shrink = beta / (beta + tau2);
        const double expo = 1.0 / tau2 - 1.0 / (beta + tau2);
        const double log_var_ratio = static_cast<double>(M) * std::log((beta + tau2) / tau2);
        double divergence = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double e = u.row(i).squaredNorm();
            // phi: posterior probability that row i is active
            const double z = log_prior_ratio + log_var_ratio - expo * e;
            const double phi = z > 0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
            x_new.row(i) = (shrink * phi) * u.row(i);
            divergence += shrink * phi * (1.0 + expo * (1.0 - phi) * e / static_cast<double>(M));
        }

        if (opt.damping > 0.0) x_new = (1.0 - opt.damping) * x_new + opt.damping * x;
        r_new.noalias() = y - a * x_new;
        r_new += (divergence / static_cast<double>(L)) * r;

        const double change = (r_new - r).norm();
        const double before = r.norm();
        x.swap(x_new);
        r.swap(r_new);
        est.iterations = t + 1;
        est.residual_norm_trace.push_back(r.norm());
        if (!r.allFinite() || r.norm() > 1e6 * r0) {
            est.diverged = true;
            break;
        }
        if (before == 0.0 || change < opt.tol * before) break;
    }
    est.X_hat = x / root_l;
    if (!est.X_hat.allFinite()) {
        est.diverged = true;
        est.X_hat = est.X_hat.unaryExpr([](cdouble v) { return std::isfinite(std::abs(v)) ? v : cdouble{}; });
    }
    return est;
}

// ---------------------------------------------------------------- decisions

struct DetectionResult {
    std::vector<int> symbol_hat;   // -1 inactive, else q-hat
    std::vector<double> statistic; // xi_n
    std::vector<int> q_hat;        // argmax index, smallest on ties
    Eigen::Index per_device = 1;

    std::vector<int> indicator(Eigen::Index n) const {
        std::vector<int> a(static_cast<std::size_t>(per_device), 0);
        if (symbol_hat[n] >= 0) a[symbol_hat[n]] = 1;
        return a;
    }
};

/// Per-device argmax/threshold rule over per-column statistics.
inline DetectionResult decide(const RVector& column_stat, Eigen::Index num_devices, Eigen::Index per_device,
                              double xi_th) {
    if (column_stat.size() != num_devices * per_device)
        throw InvalidArgument("decide: statistic length must equal N_d*Q");
    DetectionResult r;
    r.per_device = per_device;
    r.symbol_hat.assign(static_cast<std::size_t>(num_devices), -1);
    r.statistic.resize(static_cast<std::size_t>(num_devices));
    r.q_hat.resize(static_cast<std::size_t>(num_devices));
    for (Eigen::Index dev = 0; dev < num_devices; ++dev) {
        int best = 0;
        for (int q = 1; q < per_device; ++q)
            if (column_stat[dev * per_device + q] > column_stat[dev * per_device + best]) best = q;
        const double xi = column_stat[dev * per_device + best];
        r.statistic[dev] = xi;
        r.q_hat[dev] = best;
        if (xi >= xi_th) r.symbol_hat[dev] = best;
    }
    return r;
}

inline DetectionResult cdml_decide(const RVector& gamma_hat, Eigen::Index num_devices, Eigen::Index per_device,
                                   double xi_th = kDefaultActivityThreshold) {
    return decide(gamma_hat, num_devices, per_device, xi_th);
}

/// xi_n = max_q |x_n^(q)|^2 / M.
inline DetectionResult amp_decide(const CMatrix& x_hat, Eigen::Index num_devices, Eigen::Index per_device,
                                  double xi_th = kDefaultActivityThreshold) {
    const RVector power = x_hat.rowwise().squaredNorm() / static_cast<double>(x_hat.cols());
    return decide(power, num_devices, per_device, xi_th);
}

struct ErrorMetric {
    std::vector<int> e;  // e_n = 1 iff a_n and a-hat_n differ anywhere
    double p_e = 0.0;    // |e|_1 / N_d
};

inline ErrorMetric error_metric(const ActivityPattern& truth, const DetectionResult& result) {
    if (truth.num_devices() != static_cast<Eigen::Index>(result.symbol_hat.size()) ||
        truth.per_device != result.per_device)
        throw InvalidArgument("error_metric: mismatched N_d or Q");
    ErrorMetric m;
    m.e.resize(truth.symbol.size());
    long errors = 0;
    for (std::size_t n = 0; n < truth.symbol.size(); ++n) {
        m.e[n] = truth.symbol[n] != result.symbol_hat[n] ? 1 : 0;
        errors += m.e[n];
    }
    m.p_e = truth.symbol.empty() ? 0.0 : static_cast<double>(errors) / static_cast<double>(truth.symbol.size());
    return m;
}

}  // namespace gfsig

#endif  // GFSIG_DETECTORS_HPP
