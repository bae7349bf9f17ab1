#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "prymsieve/polynomial.hpp"
#include "prymsieve/rng.hpp"

using namespace prymsieve;

namespace {

IntPolynomial random_poly(Rng& rng, int max_deg, long span = 6) {
    std::vector<Int> c(1 + rng.below(static_cast<std::uint64_t>(max_deg) + 1));
    for (auto& v : c) v = Int(static_cast<long>(rng.below(2 * span + 1)) - span);
    return IntPolynomial(std::move(c));
}

ModPolynomial random_mod_poly(Rng& rng, int max_deg, ModPolynomial::Coeff p) {
    std::vector<ModPolynomial::Coeff> c(1 + rng.below(static_cast<std::uint64_t>(max_deg) + 1));
    for (auto& v : c) v = static_cast<ModPolynomial::Coeff>(rng.below(p));
    return ModPolynomial(std::move(c), p);
}

unsigned long phi_brute(unsigned long m) {
    unsigned long count = 0;
    for (unsigned long k = 1; k <= m; ++k) {
        unsigned long a = k, b = m;
        while (b) {
            const unsigned long t = a % b;
            a = b;
            b = t;
        }
        if (a == 1) ++count;
    }
    return count;
}

}  // namespace

TEST_CASE("integer polynomial arithmetic") {
    const IntPolynomial f({-1, 0, 1});  // x^2 - 1
    REQUIRE(IntPolynomial({1, 1}) * IntPolynomial({-1, 1}) == f);
    REQUIRE(f.degree() == 2);
    REQUIRE(f.coeff(0) == -1);
    REQUIRE(f.coeff(5) == 0);
    REQUIRE(f.evaluate(Int(3)) == 8);
    REQUIRE(IntPolynomial::zero().is_zero());
    REQUIRE(IntPolynomial({0}).is_zero());
    REQUIRE((f - f).is_zero());
    REQUIRE(IntPolynomial::monomial(Int(2), 3) == IntPolynomial({0, 0, 0, 2}));
    REQUIRE(f.to_string() == "x^2 - 1");

    Rng rng(21);
    for (int c = 0; c < 100; ++c) {
        const IntPolynomial a = random_poly(rng, 6);
        const IntPolynomial b = random_poly(rng, 6);
        const IntPolynomial g = random_poly(rng, 6);
        REQUIRE(a * b == b * a);
        REQUIRE(a * (b + g) == a * b + a * g);
        REQUIRE((a + b) - b == a);
    }
}

TEST_CASE("division by monic polynomials") {
    Rng rng(22);
    for (int c = 0; c < 100; ++c) {
        const IntPolynomial f = random_poly(rng, 8);
        IntPolynomial g = random_poly(rng, 4);
        g = g + IntPolynomial::monomial(Int(1), static_cast<std::size_t>(g.degree() < 0 ? 2 : g.degree() + 1));
        REQUIRE(g.is_monic());
        IntPolynomial q, r;
        IntPolynomial::divmod_monic(f, g, q, r);
        REQUIRE(f == q * g + r);
        REQUIRE(r.degree() < g.degree());
        REQUIRE((f * g).divisible_by(g));
    }
}

TEST_CASE("derivative, negated argument, inflation") {
    const IntPolynomial f({1, 2, 3, 4});  // 4x^3+3x^2+2x+1
    REQUIRE(f.derivative() == IntPolynomial({2, 6, 12}));
    REQUIRE(f.at_negated_argument() == IntPolynomial({1, -2, 3, -4}));
    REQUIRE(f.at_negated_argument().at_negated_argument() == f);
    REQUIRE(f.inflate(2) == IntPolynomial({1, 0, 2, 0, 3, 0, 4}));
    Rng rng(23);
    for (int c = 0; c < 50; ++c) {
        const IntPolynomial a = random_poly(rng, 5);
        const IntPolynomial b = random_poly(rng, 5);
        REQUIRE((a * b).derivative() == a.derivative() * b + a * b.derivative());
        const Int x(static_cast<long>(rng.below(11)) - 5);
        REQUIRE(a.inflate(3).evaluate(x) == a.evaluate(x * x * x));
    }
}

TEST_CASE("content and primitive part") {
    const IntPolynomial f({6, -9, 12});
    REQUIRE(f.content() == 3);
    REQUIRE(f.primitive_part() == IntPolynomial({2, -3, 4}));
    REQUIRE(f.primitive_part().content() == 1);
    // sign convention: positive leading coefficient
    REQUIRE(IntPolynomial({2, -4}).primitive_part() == IntPolynomial({-1, 2}));
}

TEST_CASE("integer polynomial gcd") {
    const IntPolynomial h({1, 1, 1});  // x^2+x+1
    const IntPolynomial a = IntPolynomial({-1, 1}) * h;
    const IntPolynomial b = IntPolynomial({1, 1}) * h;
    REQUIRE(int_poly_gcd(a, b) == h);
    REQUIRE(int_poly_gcd(a.scaled(Int(6)), b.scaled(Int(4))) == h.scaled(Int(2)));
    Rng rng(24);
    auto random_monic = [&](int deg) {
        IntPolynomial f = random_poly(rng, deg - 1);
        return f + IntPolynomial::monomial(Int(1), static_cast<std::size_t>(deg));
    };
    for (int c = 0; c < 60; ++c) {
        const IntPolynomial f = random_monic(3);
        const IntPolynomial g = random_monic(3);
        const IntPolynomial k = random_monic(2);
        // monic inputs make the gcd monic, so divisibility checks apply.
        const IntPolynomial d = int_poly_gcd(f * k, g * k);
        REQUIRE(d.is_monic());
        REQUIRE((f * k).divisible_by(d));
        REQUIRE((g * k).divisible_by(d));
        REQUIRE(d.divisible_by(k));
    }
}

TEST_CASE("cyclotomic polynomials and euler phi") {
    REQUIRE(cyclotomic(1) == IntPolynomial({-1, 1}));
    REQUIRE(cyclotomic(2) == IntPolynomial({1, 1}));
    REQUIRE(cyclotomic(3) == IntPolynomial({1, 1, 1}));
    REQUIRE(cyclotomic(4) == IntPolynomial({1, 0, 1}));
    REQUIRE(cyclotomic(5) == IntPolynomial({1, 1, 1, 1, 1}));
    REQUIRE(cyclotomic(6) == IntPolynomial({1, -1, 1}));
    REQUIRE(cyclotomic(12) == IntPolynomial({1, 0, -1, 0, 1}));
    REQUIRE_THROWS_AS(cyclotomic(0), config_error);

    for (unsigned n = 1; n <= 30; ++n) {
        IntPolynomial prod = IntPolynomial::constant(Int(1));
        for (unsigned d = 1; d <= n; ++d)
            if (n % d == 0) prod = prod * cyclotomic(d);
        std::vector<Int> xn(n + 1, Int(0));
        xn[0] = -1;
        xn[n] = 1;
        REQUIRE(prod == IntPolynomial(std::move(xn)));
        REQUIRE(cyclotomic(n).degree() == static_cast<int>(euler_phi(n)));
    }
    for (unsigned long m = 1; m <= 200; ++m) REQUIRE(euler_phi(m) == phi_brute(m));
}

TEST_CASE("self reciprocal detection") {
    REQUIRE(IntPolynomial({1, 0, 3, 0, 1}).is_self_reciprocal());
    REQUIRE(IntPolynomial({1, 1}).is_self_reciprocal());
    REQUIRE_FALSE(IntPolynomial({1, 1, 0, 1}).is_self_reciprocal());
    REQUIRE_FALSE(IntPolynomial({2, 0, 1}).is_self_reciprocal());
}

TEST_CASE("mod-p polynomial arithmetic") {
    const ModPolynomial f({4, 0, 1}, 5);  // x^2 + 4
    REQUIRE(f == ModPolynomial({2, 0, 1}, 5) * ModPolynomial::constant(1, 5) +
                     ModPolynomial::constant(2, 5));
    REQUIRE(ModPolynomial({9, 7}, 5) == ModPolynomial({4, 2}, 5));
    REQUIRE(ModPolynomial::inv_mod(3, 7) == 5);

    Rng rng(25);
    for (int c = 0; c < 100; ++c) {
        for (const ModPolynomial::Coeff p : {2u, 3u, 5u, 97u}) {
            const ModPolynomial a = random_mod_poly(rng, 6, p);
            ModPolynomial g = random_mod_poly(rng, 3, p);
            g = g + ModPolynomial::monomial(1, static_cast<std::size_t>(g.degree() + 1), p);
            ModPolynomial q, r;
            ModPolynomial::divmod(a, g, q, r);
            REQUIRE(a == q * g + r);
            REQUIRE(r.degree() < g.degree());
            if (!a.is_zero()) {
                const ModPolynomial d = gcd(a * g, g);
                REQUIRE(d.is_monic());
                REQUIRE((g % d).is_zero());
            }
        }
    }
}

TEST_CASE("pow_mod matches repeated multiplication") {
    Rng rng(26);
    for (const ModPolynomial::Coeff p : {2u, 3u, 7u}) {
        const ModPolynomial f =
            ModPolynomial::monomial(1, 5, p) + random_mod_poly(rng, 4, p);
        const ModPolynomial base = random_mod_poly(rng, 4, p);
        ModPolynomial acc = ModPolynomial::constant(1, p) % f;
        for (unsigned e = 0; e <= 12; ++e) {
            REQUIRE(base.pow_mod(Int(e), f) == acc);
            acc = (acc * base) % f;
        }
    }
}

TEST_CASE("reduction from integer polynomials") {
    const IntPolynomial f({-1, 7, 10, 3});
    REQUIRE(reduce_mod(f, 5) == ModPolynomial({4, 2, 0, 3}, 5));
    REQUIRE(reduce_mod(f, 3) == ModPolynomial({2, 1, 1}, 3));  // leading 3 vanishes
}
