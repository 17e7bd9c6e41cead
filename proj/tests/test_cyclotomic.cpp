// Exact cyclotomic arithmetic: algebraic identities and float cross-checks.
#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>

#include "qtqft/cyclotomic.hpp"

using namespace qtqft;

static Rational mkq(long num, long den) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}
static CycNum rat(long num, long den, int n) { return cyc_rational(mkq(num, den), n); }

TEST_CASE("roots of unity reduce to canonical form") {
    for (int n : {4, 8, 12, 16, 20, 24, 40, 48}) {
        CHECK(cyc_from_power(n, n) == cyc_one(n));
        CHECK(cyc_from_power(n / 2, n) == cyc_neg(cyc_one(n)));
        CHECK(cyc_from_power(-1, n) == cyc_from_power(n - 1, n));
        CHECK(cyc_from_power(3 * n + 5, n) == cyc_from_power(5, n));
    }
    // Order 12 landmark: zeta_12^6 = -1.
    CHECK(cyc_from_power(6, 12) == rat(-1, 1, 12));
}

TEST_CASE("power basis has totient dimension") {
    CHECK(CycNum(12).c.size() == 4);  // Phi_12 = x^4 - x^2 + 1
    CHECK(CycNum(16).c.size() == 8);
    CHECK(CycNum(20).c.size() == 8);
    CHECK(CycNum(24).c.size() == 8);
    CHECK(CycNum(48).c.size() == 16);
}

TEST_CASE("field axioms on sampled elements") {
    std::mt19937 rng(20240817u);
    std::uniform_int_distribution<long> coeff(-5, 5);
    for (int n : {12, 16, 20, 24, 40, 48}) {
        const size_t d = CycNum(n).c.size();
        for (int trial = 0; trial < 40; ++trial) {
            CycNum a(n), b(n);
            for (size_t i = 0; i < d; ++i) {
                a.c[i] = mkq(coeff(rng), 1 + (trial % 3));
                b.c[i] = mkq(coeff(rng), 1 + ((trial + 1) % 4));
            }
            CHECK(cyc_add(a, b) == cyc_add(b, a));
            CHECK(cyc_mul(a, b) == cyc_mul(b, a));
            CHECK(cyc_mul(a, cyc_add(b, cyc_one(n))) == cyc_add(cyc_mul(a, b), a));
            if (!a.is_zero()) {
                CHECK(cyc_mul(a, cyc_inv(a)) == cyc_one(n));
            }
        }
    }
}

TEST_CASE("float embedding is a ring homomorphism numerically") {
    std::mt19937 rng(77u);
    std::uniform_int_distribution<long> coeff(-4, 4);
    for (int n : {12, 16, 24, 48}) {
        const size_t d = CycNum(n).c.size();
        for (int trial = 0; trial < 250; ++trial) {
            CycNum a(n), b(n);
            for (size_t i = 0; i < d; ++i) {
                a.c[i] = mkq(coeff(rng), 3);
                b.c[i] = mkq(coeff(rng), 2);
            }
            auto za = cyc_to_complex(a), zb = cyc_to_complex(b);
            CHECK(std::abs(cyc_to_complex(cyc_add(a, b)) - (za + zb)) < 1e-9);
            CHECK(std::abs(cyc_to_complex(cyc_mul(a, b)) - (za * zb)) < 1e-9);
        }
    }
}

TEST_CASE("quantum-parameter landmarks") {
    // q = zeta_{4r}^2; q + q^{-1} = 2 cos(pi/r).
    {
        const int n = 20;  // r = 5
        CycNum q = cyc_from_power(2, n);
        CycNum s = cyc_add(q, cyc_inv(q));
        CHECK(std::abs(cyc_to_float(s) - 1.6180339887498949) < 1e-12);
        CHECK(std::abs(cyc_to_complex(s).imag()) < 1e-12);
    }
    {
        const int n = 16;  // r = 4
        CycNum q = cyc_from_power(2, n);
        CycNum s = cyc_add(q, cyc_inv(q));
        CHECK(std::abs(cyc_to_float(s) - std::sqrt(2.0)) < 1e-12);
        // (q + q^{-1})^2 = 2 exactly at r = 4.
        CHECK(cyc_mul(s, s) == rat(2, 1, n));
    }
}

TEST_CASE("inverse of q - q^{-1}") {
    for (int n : {12, 16, 20, 24}) {
        CycNum q = cyc_from_power(2, n);
        CycNum diff = cyc_sub(q, cyc_inv(q));
        REQUIRE(!diff.is_zero());
        CHECK(cyc_mul(diff, cyc_inv(diff)) == cyc_one(n));
    }
}

TEST_CASE("conjugation and norms") {
    for (int n : {12, 16, 24}) {
        for (long e = -3; e <= 7; ++e) {
            CHECK(cyc_conj(cyc_from_power(e, n)) == cyc_from_power(-e, n));
        }
        CycNum x(n);
        x.c[0] = mkq(1, 2);
        x.c[1] = mkq(-2, 3);
        if (x.c.size() > 3) x.c[3] = mkq(5, 7);
        CycNum nrm = cyc_mul(x, cyc_conj(x));
        auto z = cyc_to_complex(nrm);
        CHECK(std::abs(z.imag()) < 1e-12);
        CHECK(z.real() >= 0.0);
    }
}

TEST_CASE("order lifting preserves values") {
    CycNum a = cyc_add(cyc_from_power(3, 12), rat(1, 2, 12));
    CycNum lifted = cyc_lift(a, 24);
    CHECK(std::abs(cyc_to_complex(a) - cyc_to_complex(lifted)) < 1e-12);
    CycNum twice = cyc_lift(a, 48);
    CHECK(cyc_lift(lifted, 48) == twice);
    // Lifted arithmetic agrees with base arithmetic.
    CycNum b = cyc_from_power(5, 12);
    CHECK(cyc_lift(cyc_mul(a, b), 48) == cyc_mul(twice, cyc_lift(b, 48)));
    CHECK_THROWS_AS(cyc_lift(a, 18), std::invalid_argument);
}

TEST_CASE("string form") {
    CycNum a(12);
    a.c[0] = mkq(-1, 2);
    a.c[2] = Rational(3);
    CHECK(cyc_to_string(a) == "-1/2 + 3*z^2");
    CHECK(cyc_to_string(cyc_zero(12)) == "0");
}

TEST_CASE("error paths") {
    CHECK_THROWS_AS(cyc_inv(cyc_zero(12)), std::domain_error);
    CHECK_THROWS_AS(cyc_add(cyc_one(12), cyc_one(16)), std::invalid_argument);
}
