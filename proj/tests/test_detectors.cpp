#include <gtest/gtest.h>

#include "gfsig/detectors.hpp"

using namespace gfsig;

namespace {

struct Instance {
    CMatrix s_scaled;
    ActivityPattern activity;
    ChannelRealization channel;
    ReceivedSignal rx;
};

Instance random_instance(Eigen::Index L, Eigen::Index nd, Eigen::Index q, Eigen::Index K, Eigen::Index M, double sigma_w2,
                         Rng& rng) {
    SignatureMatrix s;
    s.entries = normalize_columns(complex_normal_matrix(L, nd * q, rng));
    s.num_devices = nd;
    s.per_device = q;
    Instance in;
    in.s_scaled = s.scaled();
    in.activity = draw_activity(nd, K, q, rng);
    in.channel = draw_channel(nd, M, q, rng);
    in.rx = synthesize(s, in.activity, in.channel, sigma_w2, rng);
    return in;
}

}  // namespace

TEST(Cdml, ZeroObservationGivesZeroEstimate) {
    const auto s = build_signature_matrix(gen_cubic_masks(7), 10, 2).scaled();
    Rng rng(1);
    const auto est = cdml_estimate(CMatrix::Zero(7, 4), s, 0.1, rng);
    EXPECT_TRUE((est.gamma_hat.array() == 0.0).all());
    EXPECT_EQ(est.sweeps_run, 15);
    EXPECT_EQ(est.objective_trace.size(), 16U);
}

TEST(Cdml, ObjectiveNeverIncreasesPerUpdate) {
    Rng rng(2);
    for (int t = 0; t < 5; ++t) {
        const auto in = random_instance(12, 20, 2, 4, 16, 0.1, rng);
        const CMatrix sigma_hat = sample_covariance(in.rx.Y);
        double prev = ml_objective(in.s_scaled, RVector::Zero(40), 0.1, sigma_hat);
        double worst = -1e300;
        CdmlOptions opt;
        opt.sweeps = 4;
        opt.on_update = [&](Eigen::Index, const RVector& g) {
            EXPECT_GE(g.minCoeff(), 0.0);
            const double now = ml_objective(in.s_scaled, g, 0.1, sigma_hat);
            worst = std::max(worst, now - prev);
            prev = now;
        };
        Rng det(t);
        const auto est = cdml_estimate(in.rx.Y, in.s_scaled, 0.1, det, opt);
        EXPECT_LE(worst, 1e-8);
        for (std::size_t i = 1; i < est.objective_trace.size(); ++i)
            EXPECT_LE(est.objective_trace[i], est.objective_trace[i - 1] + 1e-8);
    }
}

TEST(Cdml, ShermanMorrisonTracksDirectInverse) {
    Rng rng(3);
    const auto in = random_instance(16, 30, 2, 6, 32, 0.1, rng);
    CdmlOptions opt;
    opt.sweeps = 12;
    opt.on_sweep = [&](int, const RVector& g, const CMatrix& sigma_inv) {
        const CMatrix direct = inverse_covariance(in.s_scaled, g, 0.1);
        EXPECT_LT((sigma_inv - direct).norm() / direct.norm(), 1e-6);
    };
    Rng det(0);
    cdml_estimate(in.rx.Y, in.s_scaled, 0.1, det, opt);
}

TEST(Cdml, SingleActiveDeviceFound) {
    const auto s = build_signature_matrix(gen_cubic_masks(23), 200, 4);
    const CMatrix scaled = s.scaled();
    int hits = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        Rng rng = derive_stream(5, {static_cast<std::uint64_t>(t)}, StreamTag::activity);
        const auto act = draw_activity(200, 1, 4, rng);
        const auto ch = draw_channel(200, 256, 4, rng);
        const auto rx = synthesize(s, act, ch, 0.1, rng);
        CdmlOptions opt;
        opt.record_objective = false;
        const auto est = cdml_estimate(rx.Y, scaled, 0.1, rng, opt);
        Eigen::Index arg = 0;
        est.gamma_hat.maxCoeff(&arg);
        hits += arg / 4 == act.active_set.front();
    }
    EXPECT_GE(hits, 0.99 * trials);
}

TEST(Cdml, RejectsBadInput) {
    Rng rng(1);
    const CMatrix s = CMatrix::Identity(3, 3);
    EXPECT_THROW(cdml_estimate(CMatrix::Zero(3, 2), s, 0.0, rng), InvalidArgument);
    EXPECT_THROW(cdml_estimate(CMatrix::Zero(4, 2), s, 0.1, rng), InvalidArgument);
}

TEST(Decisions, CdmlExamples) {
    RVector g = RVector::Zero(8);
    auto r = cdml_decide(g, 2, 4);
    EXPECT_EQ(r.symbol_hat, (std::vector<int>{-1, -1}));
    g << 0.3, 0.1, 0, 0, 0.2, 0.2, 0, 0;
    r = cdml_decide(g, 2, 4);
    EXPECT_EQ(r.symbol_hat, (std::vector<int>{0, -1}));
    EXPECT_EQ(r.indicator(0), (std::vector<int>{1, 0, 0, 0}));
    g << 0, 0.5, 0.5, 0, 0, 0, 0, 0.25;
    r = cdml_decide(g, 2, 4);
    EXPECT_EQ(r.symbol_hat, (std::vector<int>{1, 3}));
}

TEST(Decisions, ScaleCovariance) {
    Rng rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        RVector g(40);
        for (auto& v : g) v = u(rng);
        const double c = 0.1 + 10.0 * u(rng);
        EXPECT_EQ(cdml_decide(g, 10, 4, 0.5).symbol_hat, cdml_decide(c * g, 10, 4, 0.5 * c).symbol_hat);
    }
}

TEST(Decisions, AmpExamples) {
    CMatrix x = CMatrix::Zero(8, 4);
    EXPECT_EQ(amp_decide(x, 2, 4).symbol_hat, (std::vector<int>{-1, -1}));
    x.row(5).setConstant(cdouble(0.0, 1.0));
    auto r = amp_decide(x, 2, 4);
    EXPECT_EQ(r.symbol_hat, (std::vector<int>{-1, 1}));
    EXPECT_DOUBLE_EQ(r.statistic[1], 1.0);
    x.setZero();
    x(2, 0) = std::sqrt(0.3 * 4);
    x(3, 1) = std::sqrt(0.26 * 4);
    r = amp_decide(x, 2, 4);
    EXPECT_EQ(r.symbol_hat[0], 2);
}

TEST(ErrorMetric, Examples) {
    const auto truth = make_activity(4, {-1, 2, 0});
    DetectionResult det;
    det.per_device = 4;
    det.symbol_hat = {-1, 2, 0};
    EXPECT_EQ(error_metric(truth, det).p_e, 0.0);
    det.symbol_hat = {-1, -1, 0};
    auto m = error_metric(truth, det);
    EXPECT_EQ(m.e, (std::vector<int>{0, 1, 0}));
    det.symbol_hat = {1, 2, 3};
    m = error_metric(truth, det);
    EXPECT_EQ(m.e, (std::vector<int>{1, 0, 1}));
    EXPECT_DOUBLE_EQ(m.p_e, 2.0 / 3.0);
    det.per_device = 2;
    EXPECT_THROW(error_metric(truth, det), InvalidArgument);
}

TEST(Amp, ZeroObservation) {
    const auto s = build_signature_matrix(gen_cubic_masks(7), 10, 2).scaled();
    const auto est = mmv_amp_estimate(CMatrix::Zero(7, 3), s, 0.1);
    EXPECT_FALSE(est.diverged);
    EXPECT_LT(est.X_hat.norm(), 1e-12);
}

TEST(Amp, TruthIsFixedPointOfSupport) {
    const auto s = build_signature_matrix(gen_cubic_masks(23), 200, 4);
    const CMatrix scaled = s.scaled();
    for (int t = 0; t < 20; ++t) {
        Rng rng = derive_stream(7, {static_cast<std::uint64_t>(t)}, StreamTag::activity);
        const auto act = draw_activity(200, 10, 4, rng);
        const auto ch = draw_channel(200, 8, 4, rng);
        const auto rx = synthesize(s, act, ch, 0.0, rng);
        const CMatrix x_true = gamma_sqrt_diagonal(act, ch.g).cast<cdouble>().asDiagonal() * ch.H;
        AmpOptions opt;
        opt.activity_rate = 10.0 / 800.0;
        opt.max_iters = 1;
        opt.initial_X = x_true;
        const auto est = mmv_amp_estimate(rx.Y, scaled, 0.0, opt);
        DetectionResult det = amp_decide(est.X_hat, 200, 4);
        EXPECT_EQ(det.symbol_hat, act.symbol);
    }
}

TEST(Amp, NoiselessSingleDeviceRecovery) {
    const auto s = build_signature_matrix(gen_cubic_masks(23), 200, 4);
    const CMatrix scaled = s.scaled();
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        Rng rng = derive_stream(8, {static_cast<std::uint64_t>(t)}, StreamTag::activity);
        const auto act = draw_activity(200, 1, 4, rng);
        const auto ch = draw_channel(200, 8, 4, rng);
        const auto rx = synthesize(s, act, ch, 0.0, rng);
        const CMatrix x_true = gamma_sqrt_diagonal(act, ch.g).cast<cdouble>().asDiagonal() * ch.H;
        AmpOptions opt;
        opt.activity_rate = 1.0 / 800.0;
        const auto est = mmv_amp_estimate(rx.Y, scaled, 0.0, opt);
        const Eigen::Index row = s.column_of(act.active_set.front(), act.symbol[act.active_set.front()]);
        worst = std::max(worst, (est.X_hat.row(row) - x_true.row(row)).norm() / x_true.row(row).norm());
    }
    EXPECT_LE(worst, 0.05);
}

TEST(Amp, SparseRegimeSupportRecovery) {
    const auto s = build_signature_matrix(gen_cubic_masks(23), 200, 4);
    const CMatrix scaled = s.scaled();
    double total = 0.0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        Rng rng = derive_stream(9, {static_cast<std::uint64_t>(t)}, StreamTag::activity);
        const auto act = draw_activity(200, 10, 4, rng);
        const auto ch = draw_channel(200, 10, 4, rng);
        const auto rx = synthesize(s, act, ch, 0.1, rng);
        AmpOptions opt;
        opt.activity_rate = 10.0 / 800.0;
        const auto est = mmv_amp_estimate(rx.Y, scaled, 0.1, opt);
        total += error_metric(act, amp_decide(est.X_hat, 200, 4)).p_e;
    }
    EXPECT_LE(total / trials, 0.05);
}

TEST(Amp, RejectsBadOptions) {
    const CMatrix s = CMatrix::Identity(3, 3);
    AmpOptions opt;
    opt.damping = 1.0;
    EXPECT_THROW(mmv_amp_estimate(CMatrix::Zero(3, 2), s, 0.1, opt), InvalidArgument);
    opt = {};
    opt.activity_rate = 0.0;
    EXPECT_THROW(mmv_amp_estimate(CMatrix::Zero(3, 2), s, 0.1, opt), InvalidArgument);
}
