#pragma once
/// \file cyclotomic.hpp
/// \brief Exact arithmetic in cyclotomic fields Q(zeta_n).
///
/// Elements are represented on the power basis 1, z, ..., z^{phi(n)-1} of
/// Q(zeta_n) = Q[x]/(Phi_n(x)), with coefficients kept as exact rationals
/// (GMP mpq_class).  Here z denotes the primitive root zeta_n = exp(2*pi*i/n).
/// All operations are exact; the complex embedding is provided only as a
/// convenience for floating-point cross-checks.

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qtqft {

using Rational = mpq_class;

namespace detail {

/// Euler totient by trial division (orders used here are tiny).
inline int euler_phi(int n) {
    int result = n;
    int m = n;
    for (int p = 2; p * p <= m; ++p) {
        if (m % p == 0) {
            while (m % p == 0) m /= p;
            result -= result / p;
        }
    }
    if (m > 1) result -= result / m;
    return result;
}

/// Degree of an integer polynomial (index of highest nonzero coefficient,
/// or -1 for the zero polynomial).
inline int ideg(const std::vector<mpz_class>& p) {
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
        if (p[static_cast<size_t>(i)] != 0) return i;
    return -1;
}

/// Exact division of integer polynomials: a / b with zero remainder required.
/// b must be monic-up-to-sign with integer quotient (true for cyclotomics).
inline std::vector<mpz_class> ipoly_divide_exact(std::vector<mpz_class> a,
                                                 const std::vector<mpz_class>& b) {
    const int db = ideg(b);
    if (db < 0) throw std::invalid_argument("ipoly_divide_exact: division by zero");
    int da = ideg(a);
    std::vector<mpz_class> q(static_cast<size_t>(da - db + 1), mpz_class(0));
    while (da >= db) {
        mpz_class lead = a[static_cast<size_t>(da)] / b[static_cast<size_t>(db)];
        q[static_cast<size_t>(da - db)] = lead;
        for (int i = 0; i <= db; ++i)
            a[static_cast<size_t>(da - db + i)] -= lead * b[static_cast<size_t>(i)];
        da = ideg(a);
    }
    if (da >= 0) throw std::logic_error("ipoly_divide_exact: nonzero remainder");
    return q;
}

/// n-th cyclotomic polynomial Phi_n as integer coefficients, computed by
/// dividing x^n - 1 by the product of Phi_d over proper divisors d | n.
inline const std::vector<mpz_class>& cyclotomic_polynomial(int n) {
    static std::map<int, std::vector<mpz_class>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    // Compute without recursion-under-lock: divisors in increasing order, so
    // every proper divisor is already cached by the time it is needed.
    std::function<const std::vector<mpz_class>&(int)> get = [&](int m) -> const std::vector<mpz_class>& {
        auto fit = cache.find(m);
        if (fit != cache.end()) return fit->second;
        std::vector<mpz_class> num(static_cast<size_t>(m) + 1, mpz_class(0));
        num[0] = -1;
        num[static_cast<size_t>(m)] = 1;  // x^m - 1
        for (int d = 1; d < m; ++d) {
            if (m % d == 0) num = ipoly_divide_exact(std::move(num), get(d));
        }
        return cache.emplace(m, std::move(num)).first->second;
    };
    return get(n);
}

/// Per-order context: Phi_n plus a reduction table expressing x^m mod Phi_n
/// on the power basis, for m = 0 .. 2*(deg-1).  Contexts are immutable once
/// built and shared across threads.
struct CycContext {
    int order = 0;
    int degree = 0;
    std::vector<mpz_class> phi;
    // powred[m] = coefficients of x^m mod Phi_n, length `degree`.
    std::vector<std::vector<mpz_class>> powred;
};

inline const CycContext& context(int n) {
    static std::map<int, CycContext> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    if (n < 1) throw std::invalid_argument("cyclotomic order must be >= 1");

    CycContext ctx;
    ctx.order = n;
    ctx.phi = cyclotomic_polynomial(n);
    ctx.degree = ideg(ctx.phi);
    const int d = ctx.degree;
    ctx.powred.resize(static_cast<size_t>(2 * d > 0 ? 2 * d - 1 : 1));
    for (int m = 0; m < d; ++m) {
        std::vector<mpz_class> row(static_cast<size_t>(d), mpz_class(0));
        row[static_cast<size_t>(m)] = 1;
        ctx.powred[static_cast<size_t>(m)] = std::move(row);
    }
    // x^d = -(phi_0 + phi_1 x + ... + phi_{d-1} x^{d-1}) since Phi_n is monic;
    // higher powers follow by multiply-by-x then folding the top term.
    if (d > 0) {
        std::vector<mpz_class> cur(static_cast<size_t>(d), mpz_class(0));
        for (int i = 0; i < d; ++i) cur[static_cast<size_t>(i)] = -ctx.phi[static_cast<size_t>(i)];
        for (int m = d; m <= 2 * d - 2; ++m) {
            ctx.powred[static_cast<size_t>(m)] = cur;
            if (m == 2 * d - 2) break;
            // multiply by x: shift, then reduce the overflowing x^d term.
            mpz_class top = cur[static_cast<size_t>(d - 1)];
            for (int i = d - 1; i > 0; --i) cur[static_cast<size_t>(i)] = cur[static_cast<size_t>(i - 1)];
            cur[0] = 0;
            if (top != 0)
                for (int i = 0; i < d; ++i)
                    cur[static_cast<size_t>(i)] -= top * ctx.phi[static_cast<size_t>(i)];
        }
    }
    return cache.emplace(n, std::move(ctx)).first->second;
}

}  // namespace detail

/// An element of Q(zeta_order) on the power basis of Q[x]/(Phi_order).
struct CycNum {
    int order = 1;
    std::vector<Rational> c;  // size phi(order)

    CycNum() : order(1), c(1, Rational(0)) {}
    explicit CycNum(int n) : order(n) {
        c.assign(static_cast<size_t>(detail::context(n).degree), Rational(0));
    }

    bool is_zero() const {
        for (const auto& x : c)
            if (x != 0) return false;
        return true;
    }
    bool is_rational() const {
        for (size_t i = 1; i < c.size(); ++i)
            if (c[i] != 0) return false;
        return true;
    }
};

/// zeta_order^e as a field element (e may be negative; it is reduced mod order).
inline CycNum cyc_from_power(long e, int n) {
    const auto& ctx = detail::context(n);
    long m = e % n;
    if (m < 0) m += n;
    CycNum out(n);
    if (ctx.degree == 0) return out;  // degenerate n = 1 handled by callers
    if (m < static_cast<long>(ctx.powred.size())) {
        const auto& row = ctx.powred[static_cast<size_t>(m)];
        for (int i = 0; i < ctx.degree; ++i) out.c[static_cast<size_t>(i)] = Rational(row[static_cast<size_t>(i)]);
        return out;
    }
    // m can reach order-1 which may exceed the table: reduce by repeated
    // multiply-by-x starting from the largest tabulated power.
    long base = static_cast<long>(ctx.powred.size()) - 1;
    std::vector<Rational> cur(ctx.powred[static_cast<size_t>(base)].size());
    for (size_t i = 0; i < cur.size(); ++i) cur[i] = Rational(ctx.powred[static_cast<size_t>(base)][i]);
    for (long step = base; step < m; ++step) {
        Rational top = cur[static_cast<size_t>(ctx.degree - 1)];
        for (int i = ctx.degree - 1; i > 0; --i) cur[static_cast<size_t>(i)] = cur[static_cast<size_t>(i - 1)];
        cur[0] = 0;
        if (top != 0)
            for (int i = 0; i < ctx.degree; ++i)
                cur[static_cast<size_t>(i)] -= top * Rational(ctx.phi[static_cast<size_t>(i)]);
    }
    out.c = std::move(cur);
    return out;
}

inline CycNum cyc_rational(const Rational& q, int n) {
    CycNum out(n);
    if (!out.c.empty()) out.c[0] = q;
    return out;
}
inline CycNum cyc_zero(int n) { return CycNum(n); }
inline CycNum cyc_one(int n) { return cyc_rational(Rational(1), n); }

namespace detail {
inline void require_same_order(const CycNum& a, const CycNum& b) {
    if (a.order != b.order)
        throw std::invalid_argument("cyclotomic order mismatch: " + std::to_string(a.order) +
                                    " vs " + std::to_string(b.order));
}
}  // namespace detail

inline CycNum cyc_add(const CycNum& a, const CycNum& b) {
    detail::require_same_order(a, b);
    CycNum out = a;
    for (size_t i = 0; i < out.c.size(); ++i) out.c[i] += b.c[i];
    return out;
}

inline CycNum cyc_neg(const CycNum& a) {
    CycNum out = a;
    for (auto& x : out.c) x = -x;
    return out;
}

inline CycNum cyc_sub(const CycNum& a, const CycNum& b) { return cyc_add(a, cyc_neg(b)); }

inline CycNum cyc_mul(const CycNum& a, const CycNum& b) {
    detail::require_same_order(a, b);
    const auto& ctx = detail::context(a.order);
    const int d = ctx.degree;
    std::vector<Rational> conv(static_cast<size_t>(2 * d > 0 ? 2 * d - 1 : 1), Rational(0));
    for (int i = 0; i < d; ++i) {
        if (a.c[static_cast<size_t>(i)] == 0) continue;
        for (int j = 0; j < d; ++j) {
            if (b.c[static_cast<size_t>(j)] == 0) continue;
            conv[static_cast<size_t>(i + j)] += a.c[static_cast<size_t>(i)] * b.c[static_cast<size_t>(j)];
        }
    }
    CycNum out(a.order);
    for (int m = 0; m < 2 * d - 1; ++m) {
        const Rational& w = conv[static_cast<size_t>(m)];
        if (w == 0) continue;
        const auto& row = ctx.powred[static_cast<size_t>(m)];
        for (int i = 0; i < d; ++i)
            if (row[static_cast<size_t>(i)] != 0)
                out.c[static_cast<size_t>(i)] += w * Rational(row[static_cast<size_t>(i)]);
    }
    return out;
}

namespace detail {

using QPoly = std::vector<Rational>;

inline int qdeg(const QPoly& p) {
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
        if (p[static_cast<size_t>(i)] != 0) return i;
    return -1;
}

/// Remainder-producing division over Q[x]; returns {quotient, remainder}.
inline std::pair<QPoly, QPoly> qpoly_divmod(QPoly a, const QPoly& b) {
    const int db = qdeg(b);
    if (db < 0) throw std::invalid_argument("qpoly_divmod: division by zero");
    int da = qdeg(a);
    QPoly q(static_cast<size_t>(da > db ? da - db + 1 : 1), Rational(0));
    while (da >= db) {
        Rational lead = a[static_cast<size_t>(da)] / b[static_cast<size_t>(db)];
        q[static_cast<size_t>(da - db)] = lead;
        for (int i = 0; i <= db; ++i)
            a[static_cast<size_t>(da - db + i)] -= lead * b[static_cast<size_t>(i)];
        da = qdeg(a);
    }
    return {std::move(q), std::move(a)};
}

inline QPoly qpoly_sub_scaled(QPoly a, const QPoly& b, const QPoly& q) {
    // a - q*b
    const int dq = qdeg(q), db = qdeg(b);
    if (dq >= 0 && db >= 0) {
        if (a.size() < static_cast<size_t>(dq + db + 1)) a.resize(static_cast<size_t>(dq + db + 1), Rational(0));
        for (int i = 0; i <= dq; ++i) {
            if (q[static_cast<size_t>(i)] == 0) continue;
            for (int j = 0; j <= db; ++j)
                a[static_cast<size_t>(i + j)] -= q[static_cast<size_t>(i)] * b[static_cast<size_t>(j)];
        }
    }
    return a;
}

}  // namespace detail

/// Field inverse via the extended Euclidean algorithm in Q[x] modulo Phi_n.
/// Throws std::domain_error on zero input.
inline CycNum cyc_inv(const CycNum& a) {
    if (a.is_zero()) throw std::domain_error("cyc_inv: division by zero");
    const auto& ctx = detail::context(a.order);
    using detail::QPoly;
    QPoly phi_q(ctx.phi.size());
    for (size_t i = 0; i < ctx.phi.size(); ++i) phi_q[i] = Rational(ctx.phi[i]);
    QPoly r0 = phi_q;
    QPoly r1(a.c.begin(), a.c.end());
    QPoly t0(1, Rational(0)), t1(1, Rational(1));
    while (detail::qdeg(r1) > 0) {
        auto [q, r2] = detail::qpoly_divmod(r0, r1);
        QPoly t2 = detail::qpoly_sub_scaled(t0, t1, q);
        r0 = std::move(r1);
        r1 = std::move(r2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    const int dr = detail::qdeg(r1);
    if (dr != 0) throw std::logic_error("cyc_inv: gcd with Phi_n not a unit (Phi_n reducible?)");
    const Rational& unit = r1[0];
    const int d = ctx.degree;
    if (detail::qdeg(t1) >= d) t1 = detail::qpoly_divmod(std::move(t1), phi_q).second;
    CycNum out(a.order);
    for (int i = 0; i <= detail::qdeg(t1) && i < d; ++i) out.c[static_cast<size_t>(i)] = t1[static_cast<size_t>(i)] / unit;
    return out;
}

inline CycNum cyc_div(const CycNum& a, const CycNum& b) { return cyc_mul(a, cyc_inv(b)); }

inline bool cyc_eq(const CycNum& a, const CycNum& b) {
    if (a.order != b.order) return false;
    for (size_t i = 0; i < a.c.size(); ++i)
        if (a.c[i] != b.c[i]) return false;
    return true;
}

inline CycNum cyc_pow(const CycNum& a, long e) {
    if (e < 0) return cyc_pow(cyc_inv(a), -e);
    CycNum acc = cyc_one(a.order);
    CycNum base = a;
    while (e > 0) {
        if (e & 1) acc = cyc_mul(acc, base);
        base = cyc_mul(base, base);
        e >>= 1;
    }
    return acc;
}

/// Complex conjugation (the Galois automorphism zeta -> zeta^{-1}).
inline CycNum cyc_conj(const CycNum& a) {
    CycNum out(a.order);
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        CycNum term = cyc_from_power(-static_cast<long>(i), a.order);
        for (size_t j = 0; j < out.c.size(); ++j) out.c[j] += a.c[i] * term.c[j];
    }
    return out;
}

/// Re-express an element of Q(zeta_n) in Q(zeta_m) where n | m
/// (zeta_n = zeta_m^{m/n}, so power-basis exponents scale by m/n).
inline CycNum cyc_lift(const CycNum& a, int m) {
    if (m == a.order) return a;
    if (m % a.order != 0)
        throw std::invalid_argument("cyc_lift: target order must be a multiple of source order");
    const long scale = m / a.order;
    CycNum out(m);
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        CycNum term = cyc_from_power(static_cast<long>(i) * scale, m);
        for (size_t j = 0; j < out.c.size(); ++j) out.c[j] += a.c[i] * term.c[j];
    }
    return out;
}

/// Numerical embedding with zeta_n -> exp(2*pi*i/n).
inline std::complex<double> cyc_to_complex(const CycNum& a) {
    std::complex<double> acc(0.0, 0.0);
    const double tau = 6.283185307179586476925286766559;
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        double w = mpq_get_d(a.c[i].get_mpq_t());
        double ang = tau * static_cast<double>(i) / static_cast<double>(a.order);
        acc += w * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    return acc;
}

/// Real part of the numerical embedding (the reported float view).
inline double cyc_to_float(const CycNum& a) { return cyc_to_complex(a).real(); }

/// Human-readable power-basis form "c0 + c1*z + c2*z^2 + ...".
inline std::string cyc_to_string(const CycNum& a) {
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        if (!first) os << " + ";
        os << a.c[i].get_str();
        if (i == 1) os << "*z";
        if (i > 1) os << "*z^" << i;
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

// Operator sugar (same-order operands only).
inline CycNum operator+(const CycNum& a, const CycNum& b) { return cyc_add(a, b); }
inline CycNum operator-(const CycNum& a, const CycNum& b) { return cyc_sub(a, b); }
inline CycNum operator-(const CycNum& a) { return cyc_neg(a); }
inline CycNum operator*(const CycNum& a, const CycNum& b) { return cyc_mul(a, b); }
inline CycNum operator/(const CycNum& a, const CycNum& b) { return cyc_div(a, b); }
inline bool operator==(const CycNum& a, const CycNum& b) { return cyc_eq(a, b); }
inline bool operator!=(const CycNum& a, const CycNum& b) { return !cyc_eq(a, b); }

}  // namespace qtqft
