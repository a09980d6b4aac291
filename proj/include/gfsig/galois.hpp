#ifndef GFSIG_GALOIS_HPP
#define GFSIG_GALOIS_HPP

/**
 * @file galois.hpp
 * @brief Table-driven arithmetic over GF(p) and GF(p^m) for odd p.
 *
 * Elements of GF(p^m) are handled internally as integers in [0, q) holding the
 * base-p digits of their coefficient vector over the polynomial basis
 * {1, x, ..., x^{m-1}}. FieldElement is the explicit coefficient form used at
 * API boundaries. Discrete logarithms follow the convention log(0) = 0.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gfsig/types.hpp"

namespace gfsig {

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

/// Distinct prime factors of n, ascending.
inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
    std::uint64_t result = 1 % mod;
    base %= mod;
    while (exp > 0) {
        if (exp & 1U) result = result * base % mod;
        base = base * base % mod;
        exp >>= 1U;
    }
    return result;
}

inline std::uint64_t ipow(std::uint64_t base, unsigned exp) {
    std::uint64_t r = 1;
    for (unsigned i = 0; i < exp; ++i) r *= base;
    return r;
}

/// Smallest g >= 2 whose multiplicative order mod p is p-1.
inline std::uint32_t find_primitive_root(std::uint32_t p) {
    if (p == 2 || !is_prime(p)) throw InvalidArgument("find_primitive_root: p must be an odd prime");
    const auto factors = prime_factors(p - 1);
    for (std::uint32_t g = 2; g < p; ++g) {
        bool primitive = true;
        for (auto r : factors) {
            if (pow_mod(g, (p - 1) / r, p) == 1) {
                primitive = false;
                break;
            }
        }
        if (primitive) return g;
    }
    throw InvalidArgument("find_primitive_root: no primitive root found");  // unreachable for prime p
}

/// Coefficient-vector form of a field element, lowest degree first.
struct FieldElement {
    std::vector<std::uint32_t> coeffs;

    bool operator==(const FieldElement&) const = default;
};

/// GF(p) with a fixed primitive root and dense log/exp tables.
class PrimeField {
public:
    explicit PrimeField(std::uint32_t p) : p_(p), alpha_(find_primitive_root(p)) {
        exp_.resize(p - 1);
        log_.assign(p, 0);
        std::uint64_t x = 1;
        for (std::uint32_t k = 0; k + 1 < p; ++k) {
            exp_[k] = static_cast<std::uint32_t>(x);
            log_[x] = k;
            x = x * alpha_ % p;
        }
    }

    std::uint32_t p() const { return p_; }
    std::uint32_t alpha() const { return alpha_; }
    const std::vector<std::uint32_t>& log_table() const { return log_; }

    /// log_alpha(x mod p), with log(0) = 0.
    std::uint32_t log(std::uint64_t x) const { return log_[x % p_]; }
    std::uint32_t exp(std::uint64_t k) const { return exp_[k % (p_ - 1)]; }

private:
    std::uint32_t p_;
    std::uint32_t alpha_;
    std::vector<std::uint32_t> exp_;
    std::vector<std::uint32_t> log_;
};

namespace detail {

// Polynomials over Z_p as coefficient vectors, lowest degree first.
using Poly = std::vector<std::uint32_t>;

// a*b mod f, where f is monic of degree m and a, b have degree < m.
inline Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f, std::uint32_t p) {
    const std::size_t m = f.size() - 1;
    std::vector<std::uint64_t> prod(2 * m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < m; ++j) prod[i + j] = (prod[i + j] + std::uint64_t{a[i]} * b[j]) % p;
    }
    for (std::size_t d = 2 * m - 1; d >= m; --d) {
        const std::uint64_t c = prod[d];
        if (c == 0) continue;
        prod[d] = 0;
        // x^d = x^{d-m} * x^m and x^m = -sum f_i x^i
        for (std::size_t i = 0; i < m; ++i)
            prod[d - m + i] = (prod[d - m + i] + (p - f[i]) % p * c) % p;
    }
    Poly r(m);
    for (std::size_t i = 0; i < m; ++i) r[i] = static_cast<std::uint32_t>(prod[i]);
    return r;
}

inline Poly poly_powmod_x(std::uint64_t e, const Poly& f, std::uint32_t p) {
    const std::size_t m = f.size() - 1;
    Poly result(m, 0);
    result[0] = 1;
    Poly base(m, 0);
    if (m == 1) {
        base[0] = (p - f[0]) % p;
    } else {
        base[1] = 1;
    }
    while (e > 0) {
        if (e & 1U) result = poly_mulmod(result, base, f, p);
        base = poly_mulmod(base, base, f, p);
        e >>= 1U;
    }
    return result;
}

inline bool poly_is_one(const Poly& a) {
    if (a.empty() || a[0] != 1) return false;
    for (std::size_t i = 1; i < a.size(); ++i)
        if (a[i] != 0) return false;
    return true;
}

}  // namespace detail

/// True iff the monic polynomial f (lowest degree first, f.back() == 1) is
/// primitive over GF(p), i.e. its root has multiplicative order p^deg - 1.
inline bool is_primitive_polynomial(std::uint32_t p, const std::vector<std::uint32_t>& f) {
    if (f.size() < 2 || f.back() != 1 || f[0] % p == 0) return false;
    const unsigned m = static_cast<unsigned>(f.size() - 1);
    const std::uint64_t order = ipow(p, m) - 1;
    if (!detail::poly_is_one(detail::poly_powmod_x(order, f, p))) return false;
    for (auto r : prime_factors(order))
        if (detail::poly_is_one(detail::poly_powmod_x(order / r, f, p))) return false;
    return true;
}

/// All monic primitive polynomials of degree m over GF(p), in the order used
/// for default selection: coefficients compared from x^{m-1} down to x^0.
inline std::vector<std::vector<std::uint32_t>> primitive_polynomials(std::uint32_t p, unsigned m) {
    std::vector<std::vector<std::uint32_t>> out;
    const std::uint64_t count = ipow(p, m);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        // idx enumerates (c_{m-1}, ..., c_0) with c_0 least significant
        std::vector<std::uint32_t> f(m + 1, 0);
        std::uint64_t t = idx;
        for (unsigned i = 0; i < m; ++i) {
            f[i] = static_cast<std::uint32_t>(t % p);
            t /= p;
        }
        f[m] = 1;
        if (is_primitive_polynomial(p, f)) out.push_back(std::move(f));
    }
    return out;
}

/// GF(p^m) over a primitive polynomial, with dense exp/log/trace tables.
class ExtField {
public:
    using Elem = std::uint32_t;

    ExtField(std::uint32_t p, unsigned m, std::vector<std::uint32_t> poly)
        : p_(p), m_(m), q_(ipow(p, m)), poly_(std::move(poly)) {
        exp_.resize(q_ - 1);
        log_.assign(q_, 0);
        std::vector<std::uint32_t> digits(m, 0);
        digits[0] = 1;
        for (std::uint64_t k = 0; k + 1 < q_; ++k) {
            const Elem e = pack(digits);
            exp_[k] = e;
            log_[e] = static_cast<std::uint32_t>(k);
            mul_by_root(digits);
        }
        trace_.assign(q_, 0);
        for (std::uint64_t k = 0; k + 1 < q_; ++k) {
            Elem acc = 0;
            std::uint64_t e = k;
            for (unsigned i = 0; i < m_; ++i) {
                acc = add(acc, exp_[e]);
                e = e * p_ % (q_ - 1);
            }
            if (acc >= p_) throw InvalidArgument("ExtField: trace left the prime subfield");
            trace_[exp_[k]] = acc;
        }
    }

    std::uint32_t p() const { return p_; }
    unsigned m() const { return m_; }
    std::uint64_t q() const { return q_; }
    std::uint64_t order() const { return q_ - 1; }
    const std::vector<std::uint32_t>& poly() const { return poly_; }
    const std::vector<Elem>& exp_table() const { return exp_; }
    const std::vector<std::uint32_t>& log_table() const { return log_; }

    Elem zero() const { return 0; }
    Elem one() const { return 1; }
    Elem alpha() const { return exp_[1 % order()]; }

    Elem exp(std::int64_t k) const {
        const auto n = static_cast<std::int64_t>(order());
        return exp_[static_cast<std::size_t>(((k % n) + n) % n)];
    }
    std::uint32_t log(Elem x) const { return log_[x]; }
    std::uint32_t trace(Elem x) const { return trace_[x]; }

    Elem add(Elem a, Elem b) const {
        Elem r = 0;
        Elem scale = 1;
        for (unsigned i = 0; i < m_; ++i) {
            r += ((a % p_ + b % p_) % p_) * scale;
            a /= p_;
            b /= p_;
            scale *= p_;
        }
        return r;
    }
    Elem neg(Elem a) const {
        Elem r = 0;
        Elem scale = 1;
        for (unsigned i = 0; i < m_; ++i) {
            r += ((p_ - a % p_) % p_) * scale;
            a /= p_;
            scale *= p_;
        }
        return r;
    }
    Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }
    Elem mul(Elem a, Elem b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[(std::uint64_t{log_[a]} + log_[b]) % order()];
    }
    Elem inv(Elem a) const {
        if (a == 0) throw InvalidArgument("ExtField: inverse of zero");
        return exp_[(order() - log_[a]) % order()];
    }
    Elem pow(Elem a, std::uint64_t e) const {
        if (a == 0) return e == 0 ? 1 : 0;
        return exp_[(std::uint64_t{log_[a]} * (e % order())) % order()];
    }

    Elem encode(const FieldElement& x) const {
        if (x.coeffs.size() != m_) throw InvalidArgument("FieldElement: wrong coefficient count");
        for (auto c : x.coeffs)
            if (c >= p_) throw InvalidArgument("FieldElement: coefficient out of range");
        return pack(x.coeffs);
    }
    FieldElement decode(Elem e) const {
        FieldElement x{std::vector<std::uint32_t>(m_)};
        for (unsigned i = 0; i < m_; ++i) {
            x.coeffs[i] = e % p_;
            e /= p_;
        }
        return x;
    }

    std::string poly_string() const {
        std::string s;
        for (std::size_t i = poly_.size(); i-- > 0;) {
            if (poly_[i] == 0) continue;
            if (!s.empty()) s += " + ";
            if (i == 0 || poly_[i] != 1) s += std::to_string(poly_[i]);
            if (i >= 1) s += "x";
            if (i >= 2) s += "^" + std::to_string(i);
        }
        return s;
    }

private:
    Elem pack(const std::vector<std::uint32_t>& digits) const {
        Elem e = 0;
        for (std::size_t i = digits.size(); i-- > 0;) e = e * p_ + digits[i];
        return e;
    }

    void mul_by_root(std::vector<std::uint32_t>& d) const {
        if (m_ == 1) {
            d[0] = static_cast<std::uint32_t>(std::uint64_t{d[0]} * ((p_ - poly_[0]) % p_) % p_);
            return;
        }
        const std::uint64_t top = d[m_ - 1];
        for (unsigned i = m_ - 1; i > 0; --i) d[i] = d[i - 1];
        d[0] = 0;
        for (unsigned i = 0; i < m_; ++i)
            d[i] = static_cast<std::uint32_t>((d[i] + (p_ - poly_[i]) % p_ * top) % p_);
    }

    std::uint32_t p_;
    unsigned m_;
    std::uint64_t q_;
    std::vector<std::uint32_t> poly_;
    std::vector<Elem> exp_;
    std::vector<std::uint32_t> log_;
    std::vector<std::uint32_t> trace_;
};

inline constexpr std::uint64_t kDefaultFieldCap = std::uint64_t{1} << 20;

/**
 * Builds GF(p^m). Without an explicit polynomial the smallest primitive one is
 * chosen (see primitive_polynomials); for m = 1 the polynomial is x - g with g
 * the smallest primitive root, so that alpha agrees with PrimeField.
 * A supplied polynomial is given lowest degree first and normalized to monic.
 */
inline ExtField build_ext_field(std::uint32_t p, unsigned m,
                                std::optional<std::vector<std::uint32_t>> poly = std::nullopt,
                                std::uint64_t max_q = kDefaultFieldCap) {
    if (p == 2 || !is_prime(p)) throw InvalidArgument("build_ext_field: p must be an odd prime");
    if (m < 1) throw InvalidArgument("build_ext_field: degree must be at least 1");
    double log_q = m * std::log2(static_cast<double>(p));
    if (log_q > 62.0 || ipow(p, m) > max_q)
        throw InvalidArgument("build_ext_field: field size exceeds table cap");

    std::vector<std::uint32_t> f;
    if (poly) {
        f = *poly;
        if (f.size() != m + 1) throw InvalidArgument("build_ext_field: polynomial degree must equal m");
        for (auto& c : f) c %= p;
        if (f.back() == 0) throw InvalidArgument("build_ext_field: leading coefficient is zero");
        const auto lead_inv = static_cast<std::uint32_t>(pow_mod(f.back(), p - 2, p));
        for (auto& c : f) c = static_cast<std::uint32_t>(std::uint64_t{c} * lead_inv % p);
        if (!is_primitive_polynomial(p, f)) throw InvalidArgument("build_ext_field: polynomial is not primitive");
    } else if (m == 1) {
        f = {p - find_primitive_root(p), 1};
    } else {
        auto all = primitive_polynomials(p, m);
        if (all.empty()) throw InvalidArgument("build_ext_field: no primitive polynomial");  // cannot happen
        f = std::move(all.front());
    }
    return ExtField(p, m, std::move(f));
}

/// log_alpha(x) in [0, q-2], with log(0) = 0.
inline std::uint32_t discrete_log(const ExtField& field, const FieldElement& x) { return field.log(field.encode(x)); }
inline std::uint32_t discrete_log(const PrimeField& field, std::uint64_t x) { return field.log(x); }

/// Tr(x) = sum_{i<m} x^{p^i}, as an integer in [0, p-1].
inline std::uint32_t trace(const ExtField& field, const FieldElement& x) { return field.trace(field.encode(x)); }

}  // namespace gfsig

#endif  // GFSIG_GALOIS_HPP
