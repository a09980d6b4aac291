#ifndef GFSIG_SIMULATOR_HPP
#define GFSIG_SIMULATOR_HPP

// Uplink received-signal synthesis for the non-coherent grant-free model:
// Y = sqrt(L) S Gamma^{1/2} H + W, one active signature per active device.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "gfsig/rng.hpp"
#include "gfsig/seqgen.hpp"
#include "gfsig/types.hpp"

namespace gfsig {

struct ActivityPattern {
    Eigen::Index per_device = 1;
    std::vector<int> symbol;                // per device: -1 inactive, else q in [0, Q)
    std::vector<Eigen::Index> active_set;   // ascending device indices

    Eigen::Index num_devices() const { return static_cast<Eigen::Index>(symbol.size()); }
    Eigen::Index num_active() const { return static_cast<Eigen::Index>(active_set.size()); }

    /// Indicator vector a_n (length Q, at most one 1).
    std::vector<int> indicator(Eigen::Index n) const {
        std::vector<int> a(static_cast<std::size_t>(per_device), 0);
        if (symbol[n] >= 0) a[symbol[n]] = 1;
        return a;
    }
};

inline ActivityPattern make_activity(Eigen::Index per_device, std::vector<int> symbol) {
    ActivityPattern a;
    a.per_device = per_device;
    a.symbol = std::move(symbol);
    for (Eigen::Index n = 0; n < a.num_devices(); ++n) {
        if (a.symbol[n] >= per_device) throw InvalidArgument("activity: symbol index out of range");
        if (a.symbol[n] >= 0) a.active_set.push_back(n);
    }
    return a;
}

/// Uniform K-subset of devices, each active device picking q uniformly.
inline ActivityPattern draw_activity(Eigen::Index num_devices, Eigen::Index K, Eigen::Index per_device, Rng& rng) {
    if (K < 0 || K > num_devices) throw InvalidArgument("draw_activity: need 0 <= K <= N_d");
    if (per_device < 1) throw InvalidArgument("draw_activity: Q must be positive");
    std::vector<Eigen::Index> devices(static_cast<std::size_t>(num_devices));
    std::iota(devices.begin(), devices.end(), Eigen::Index{0});
    // partial Fisher-Yates
    for (Eigen::Index i = 0; i < K; ++i) {
        std::uniform_int_distribution<Eigen::Index> d(i, num_devices - 1);
        std::swap(devices[i], devices[d(rng)]);
    }
    std::vector<int> symbol(static_cast<std::size_t>(num_devices), -1);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(per_device) - 1);
    for (Eigen::Index i = 0; i < K; ++i) symbol[devices[i]] = pick(rng);
    return make_activity(per_device, std::move(symbol));
}

/// Bernoulli activity: each device active independently with probability rate.
inline ActivityPattern draw_activity_bernoulli(Eigen::Index num_devices, double rate, Eigen::Index per_device, Rng& rng) {
    if (rate < 0.0 || rate > 1.0) throw InvalidArgument("draw_activity_bernoulli: rate must lie in [0,1]");
    std::bernoulli_distribution active(rate);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(per_device) - 1);
    std::vector<int> symbol(static_cast<std::size_t>(num_devices), -1);
    for (auto& s : symbol)
        if (active(rng)) s = pick(rng);
    return make_activity(per_device, std::move(symbol));
}

struct ChannelRealization {
    CMatrix H;          // N x M, rows of device n all equal h_n^T
    RVector g;          // large-scale gains, length N_d
    Eigen::Index per_device = 1;
};

/// One CN(0, I_M) vector per device, replicated over its Q rows. Empty g
/// means unit gains.
inline ChannelRealization draw_channel(Eigen::Index num_devices, Eigen::Index M, Eigen::Index per_device, Rng& rng,
                                       RVector g = RVector()) {
    if (M < 1) throw InvalidArgument("draw_channel: M must be positive");
    if (g.size() == 0) g = RVector::Ones(num_devices);
    if (g.size() != num_devices) throw InvalidArgument("draw_channel: gain vector length must equal N_d");
    ChannelRealization ch;
    ch.H.resize(num_devices * per_device, M);
    ch.g = std::move(g);
    ch.per_device = per_device;
    for (Eigen::Index n = 0; n < num_devices; ++n) {
        Eigen::RowVectorXcd h(M);
        for (Eigen::Index m = 0; m < M; ++m) h[m] = complex_normal(rng);
        for (Eigen::Index q = 0; q < per_device; ++q) ch.H.row(n * per_device + q) = h;
    }
    return ch;
}

struct ReceivedSignal {
    CMatrix Y;  // L x M
    double sigma_w2 = 0.0;
};

/// Diagonal of Gamma^{1/2}: g_n at the transmitted column of each active device.
inline RVector gamma_sqrt_diagonal(const ActivityPattern& activity, const RVector& g) {
    RVector d = RVector::Zero(activity.num_devices() * activity.per_device);
    for (auto n : activity.active_set) d[n * activity.per_device + activity.symbol[n]] = g[n];
    return d;
}

/// Y = sqrt(L) S Gamma^{1/2} H + W with W i.i.d. CN(0, sigma_w2).
inline ReceivedSignal synthesize(const SignatureMatrix& s, const ActivityPattern& activity,
                                 const ChannelRealization& channel, double sigma_w2, Rng& rng) {
    const Eigen::Index L = s.length();
    const Eigen::Index M = channel.H.cols();
    if (activity.num_devices() != s.num_devices || activity.per_device != s.per_device ||
        channel.H.rows() != s.columns() || channel.g.size() != s.num_devices)
        throw InvalidArgument("synthesize: shape mismatch between signatures, activity and channel");
    if (sigma_w2 < 0.0) throw InvalidArgument("synthesize: noise variance must be nonnegative");
    const double scale = std::sqrt(static_cast<double>(L));
    ReceivedSignal out;
    out.sigma_w2 = sigma_w2;
    out.Y = CMatrix::Zero(L, M);
    for (auto n : activity.active_set) {
        const Eigen::Index c = s.column_of(n, activity.symbol[n]);
        out.Y.noalias() += (scale * channel.g[n]) * s.entries.col(c) * channel.H.row(c);
    }
    if (sigma_w2 > 0.0) out.Y += complex_normal_matrix(L, M, rng, sigma_w2);
    return out;
}

}  // namespace gfsig

#endif  // GFSIG_SIMULATOR_HPP
