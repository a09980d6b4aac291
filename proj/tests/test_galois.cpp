#include <gtest/gtest.h>

#include <complex>
#include <random>

#include "gfsig/galois.hpp"

using namespace gfsig;

TEST(NumberTheory, PrimitiveRoots) {
    EXPECT_EQ(find_primitive_root(3), 2U);
    EXPECT_EQ(find_primitive_root(5), 2U);
    EXPECT_EQ(find_primitive_root(7), 3U);
    EXPECT_EQ(find_primitive_root(23), 5U);
    EXPECT_THROW(find_primitive_root(2), InvalidArgument);
    EXPECT_THROW(find_primitive_root(9), InvalidArgument);
}

TEST(NumberTheory, PrimitiveRootHasFullOrderBruteForce) {
    for (std::uint32_t p : {3U, 5U, 7U, 11U, 13U, 23U, 31U, 97U}) {
        const auto g = find_primitive_root(p);
        for (std::uint32_t c = 2; c <= g; ++c) {
            std::uint64_t x = 1;
            std::uint32_t order = 0;
            do {
                x = x * c % p;
                ++order;
            } while (x != 1);
            if (c < g)
                EXPECT_LT(order, p - 1) << "p=" << p << " c=" << c;
            else
                EXPECT_EQ(order, p - 1) << "p=" << p;
        }
    }
}

TEST(PrimeField, DiscreteLog) {
    const PrimeField f(23);
    EXPECT_EQ(f.alpha(), 5U);
    EXPECT_EQ(f.log(1), 0U);
    EXPECT_EQ(f.log(0), 0U);
    EXPECT_EQ(f.log(16), 8U);
    EXPECT_EQ(pow_mod(5, 8, 23), 16U);
    for (std::uint32_t x = 1; x < 23; ++x) EXPECT_EQ(f.exp(f.log(x)), x);
}

TEST(ExtField, DefaultPolynomialOrdering) {
    // x^2 + x + 2 is the smallest primitive quadratic over GF(5) when compared
    // from the x^1 coefficient down.
    const auto polys = primitive_polynomials(5, 2);
    ASSERT_FALSE(polys.empty());
    EXPECT_EQ(polys.front(), (std::vector<std::uint32_t>{2, 1, 1}));
    // phi(24)/2 = 4 primitive quadratics
    EXPECT_EQ(polys.size(), 4U);
    for (const auto& f : polys) EXPECT_TRUE(is_primitive_polynomial(5, f));
    EXPECT_FALSE(is_primitive_polynomial(5, {1, 0, 1}));  // x^2 + 1 is reducible
    EXPECT_FALSE(is_primitive_polynomial(5, {2, 0, 1}));  // irreducible but alpha has order 8
}

TEST(ExtField, DegreeOneMatchesPrimeField) {
    const auto f = build_ext_field(5, 1);
    EXPECT_EQ(f.q(), 5U);
    EXPECT_EQ(f.alpha(), find_primitive_root(5));
    const PrimeField pf(5);
    for (std::uint32_t x = 1; x < 5; ++x) EXPECT_EQ(f.log(x), pf.log(x));
}

TEST(ExtField, TraceOfOne) {
    const auto f = build_ext_field(5, 2);
    EXPECT_EQ(f.q(), 25U);
    EXPECT_EQ(f.trace(f.one()), 2U);
    EXPECT_EQ(f.trace(f.zero()), 0U);
    EXPECT_EQ(trace(f, FieldElement{{1, 0}}), 2U);
    EXPECT_EQ(f.trace(f.exp(0)), 2U);
    const auto g = build_ext_field(3, 3);
    EXPECT_EQ(g.trace(g.one()), 0U);
}

TEST(ExtField, RejectsBadInput) {
    EXPECT_THROW(build_ext_field(2, 3), InvalidArgument);
    EXPECT_THROW(build_ext_field(6, 1), InvalidArgument);
    EXPECT_THROW(build_ext_field(5, 2, std::vector<std::uint32_t>{1, 0, 1}), InvalidArgument);
    EXPECT_THROW(build_ext_field(5, 2, std::vector<std::uint32_t>{2, 1}), InvalidArgument);
    EXPECT_THROW(build_ext_field(3, 20), InvalidArgument);
    EXPECT_NO_THROW(build_ext_field(5, 2, std::vector<std::uint32_t>{4, 2, 2}));  // 2(x^2+x+2)
}

TEST(ExtField, MultiplicationMatchesPolynomialProduct) {
    for (auto [p, m] : {std::pair{5U, 2U}, {3U, 3U}, {7U, 2U}, {3U, 4U}}) {
        const auto f = build_ext_field(p, m);
        for (std::uint32_t a = 0; a < f.q(); a += 3) {
            for (std::uint32_t b = 0; b < f.q(); b += 5) {
                const auto pa = f.decode(a).coeffs;
                const auto pb = f.decode(b).coeffs;
                auto prod = detail::poly_mulmod(pa, pb, f.poly(), p);
                prod.resize(m, 0);
                EXPECT_EQ(f.mul(a, b), f.encode(FieldElement{prod})) << "p=" << p << " m=" << m;
            }
        }
    }
}

TEST(ExtField, FieldAxiomsOnRandomTriples) {
    std::mt19937_64 rng(7);
    for (auto [p, m] : {std::pair{5U, 2U}, {3U, 3U}, {11U, 2U}, {7U, 3U}}) {
        const auto f = build_ext_field(p, m);
        std::uniform_int_distribution<std::uint32_t> d(0, static_cast<std::uint32_t>(f.q() - 1));
        for (int t = 0; t < 1000; ++t) {
            const auto a = d(rng), b = d(rng), c = d(rng);
            EXPECT_EQ(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            EXPECT_EQ(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            EXPECT_EQ(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            EXPECT_EQ(f.add(a, f.neg(a)), f.zero());
            EXPECT_EQ(f.sub(f.add(a, b), b), a);
            if (a != 0) EXPECT_EQ(f.mul(a, f.inv(a)), f.one());
        }
    }
}

TEST(ExtField, ExpLogRoundTrip) {
    const auto f = build_ext_field(3, 5);
    for (std::uint32_t x = 1; x < f.q(); ++x) EXPECT_EQ(f.exp(f.log(x)), x);
    EXPECT_EQ(f.log(0), 0U);
    EXPECT_EQ(f.exp(-1), f.exp(static_cast<std::int64_t>(f.order()) - 1));
}

TEST(ExtField, FrobeniusInvariance) {
    for (auto [p, m] : {std::pair{5U, 2U}, {3U, 3U}, {3U, 7U}, {7U, 4U}}) {
        const auto f = build_ext_field(p, m);
        ASSERT_LE(f.q(), 1U << 12);
        for (std::uint32_t x = 0; x < f.q(); ++x) EXPECT_EQ(f.trace(f.pow(x, p)), f.trace(x));
    }
}

TEST(ExtField, TraceIsLinearAndBalanced) {
    const auto f = build_ext_field(5, 2);
    std::vector<int> count(5, 0);
    for (std::uint32_t x = 0; x < f.q(); ++x) {
        ++count[f.trace(x)];
        for (std::uint32_t y = 0; y < f.q(); ++y) EXPECT_EQ(f.trace(f.add(x, y)), (f.trace(x) + f.trace(y)) % 5);
    }
    for (int c : count) EXPECT_EQ(c, 5);
}

TEST(ExtField, CharactersAreHomomorphisms) {
    for (auto [p, m] : {std::pair{5U, 2U}, {3U, 3U}, {3U, 5U}}) {
        const auto f = build_ext_field(p, m);
        const auto q = static_cast<std::uint32_t>(f.q());
        const std::int64_t H = static_cast<std::int64_t>(f.order());
        auto chi = [&](std::uint32_t x) { return unit_phasor(f.trace(x), p); };
        auto psi = [&](std::uint32_t x) { return unit_phasor(f.log(x), H); };
        for (std::uint32_t x = 0; x < q; ++x) {
            for (std::uint32_t y = 0; y < q; ++y) {
                EXPECT_LT(std::abs(chi(f.add(x, y)) - chi(x) * chi(y)), 1e-12);
                if (x && y) EXPECT_LT(std::abs(psi(f.mul(x, y)) - psi(x) * psi(y)), 1e-12);
            }
        }
    }
}

TEST(ExtField, TraceSeedForDefaultPolynomial) {
    const auto f = build_ext_field(5, 2);
    const std::vector<std::uint32_t> expected{2, 4, 2, 0, 1, 4, 4, 3, 4, 0, 2, 3, 3, 1, 3, 0, 4, 1, 1, 2, 1, 0, 3, 2};
    for (std::int64_t k = 0; k < 24; ++k) EXPECT_EQ(f.trace(f.exp(k)), expected[k]) << "k=" << k;
}
