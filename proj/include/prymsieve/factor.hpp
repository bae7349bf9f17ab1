#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "prymsieve/error.hpp"
#include "prymsieve/polynomial.hpp"
#include "prymsieve/rng.hpp"

namespace prymsieve {

inline constexpr std::array<ModPolynomial::Coeff, 25> small_primes = {
    2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
    43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

struct ModFactor {
    ModPolynomial poly;
    unsigned multiplicity = 1;
};

namespace detail {

/// p-th root of f when f = g(x^p): over the prime field Frobenius fixes
/// coefficients, so the root is a reindexing.
inline ModPolynomial pth_root(const ModPolynomial& f) {
    const auto p = f.p();
    std::vector<ModPolynomial::Coeff> r(static_cast<std::size_t>(f.degree()) / p + 1, 0);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = f.coeff(j * p);
    return ModPolynomial(std::move(r), p);
}

inline void squarefree_decomposition(const ModPolynomial& f,
                                     std::vector<ModFactor>& out,
                                     unsigned multiplier) {
    if (f.degree() < 1) return;
    const auto p = f.p();
    ModPolynomial d = f.derivative();
    if (d.is_zero()) {
        squarefree_decomposition(pth_root(f), out, multiplier * p);
        return;
    }
    ModPolynomial c = gcd(f, d);
    ModPolynomial w, rem;
    ModPolynomial::divmod(f, c, w, rem);
    unsigned i = 1;
    while (w.degree() > 0) {
        ModPolynomial y = gcd(w, c);
        ModPolynomial piece, r2;
        ModPolynomial::divmod(w, y, piece, r2);
        if (piece.degree() > 0) out.push_back({piece.monic(), multiplier * i});
        w = std::move(y);
        ModPolynomial c2;
        ModPolynomial::divmod(c, w, c2, r2);
        c = std::move(c2);
        ++i;
    }
    if (c.degree() > 0) squarefree_decomposition(pth_root(c), out, multiplier * p);
}

/// Cantor-Zassenhaus equal-degree splitting of a monic squarefree product of
/// irreducibles all of degree d. Randomized; the rng is caller-supplied.
inline void equal_degree_split(const ModPolynomial& f, int d, Rng& rng,
                               std::vector<ModPolynomial>& out) {
    const auto p = f.p();
    if (f.degree() == d) {
        out.push_back(f.monic());
        return;
    }
    const ModPolynomial one = ModPolynomial::constant(1, p);
    ModPolynomial splitter = one;
    while (true) {
        std::vector<ModPolynomial::Coeff> coeffs(static_cast<std::size_t>(f.degree()), 0);
        for (auto& c : coeffs) c = static_cast<ModPolynomial::Coeff>(rng.below(p));
        ModPolynomial r(std::move(coeffs), p);
        if (r.degree() < 1) continue;
        ModPolynomial h;
        if (p == 2) {
            // trace map r + r^2 + r^4 + ... + r^(2^(d-1))
            h = ModPolynomial::zero(p);
            ModPolynomial t = r % f;
            for (int s = 0; s < d; ++s) {
                h = h + t;
                t = (t * t) % f;
            }
        } else {
            Int e = (int_pow(Int(static_cast<unsigned long>(p)), static_cast<unsigned long>(d)) - 1) / 2;
            h = r.pow_mod(e, f) - one;
        }
        ModPolynomial g = gcd(h, f);
        if (g.degree() > 0 && g.degree() < f.degree()) {
            splitter = g;
            break;
        }
    }
    ModPolynomial rest, rem;
    ModPolynomial::divmod(f, splitter, rest, rem);
    equal_degree_split(splitter.monic(), d, rng, out);
    equal_degree_split(rest.monic(), d, rng, out);
}

}  // namespace detail

/// Complete factorization over F_p into irreducibles with multiplicities.
/// The factor list is sorted (degree, then coefficients) so output is
/// deterministic even though equal-degree splitting is randomized.
inline std::vector<ModFactor> factor_mod_p(const ModPolynomial& f, Rng& rng) {
    if (f.is_zero()) throw config_error("factor_mod_p: zero polynomial");
    std::vector<ModFactor> squarefree;
    detail::squarefree_decomposition(f.monic(), squarefree, 1);
    std::vector<ModFactor> out;
    for (const auto& part : squarefree) {
        // distinct-degree on each squarefree part
        ModPolynomial work = part.poly;
        const ModPolynomial x = ModPolynomial::x(f.p());
        ModPolynomial h = x % work;
        const Int pz(static_cast<unsigned long>(f.p()));
        for (int d = 1; work.degree() > 0 && 2 * d <= work.degree(); ++d) {
            h = h.pow_mod(pz, work);
            ModPolynomial g = gcd(h - x, work);
            if (g.degree() > 0) {
                std::vector<ModPolynomial> pieces;
                detail::equal_degree_split(g.monic(), d, rng, pieces);
                for (auto& q : pieces) out.push_back({std::move(q), part.multiplicity});
                ModPolynomial rest, rem;
                ModPolynomial::divmod(work, g, rest, rem);
                work = rest.monic();
                h = h % work;
            }
        }
        if (work.degree() > 0) out.push_back({work.monic(), part.multiplicity});
    }
    std::sort(out.begin(), out.end(), [](const ModFactor& a, const ModFactor& b) {
        return a.poly < b.poly;
    });
    return out;
}

inline std::vector<ModFactor> factor_mod_p(const ModPolynomial& f, std::uint64_t seed = 0) {
    Rng rng(derive_seed(seed, stream::factor, 0));
    return factor_mod_p(f, rng);
}

/// Deterministic irreducibility test over F_p (Rabin).
inline bool is_irreducible_mod_p(const ModPolynomial& f) {
    if (f.is_zero()) throw config_error("is_irreducible_mod_p: zero polynomial");
    const int n = f.degree();
    if (n < 1) return false;
    if (n == 1) return true;
    const auto p = f.p();
    const ModPolynomial fm = f.monic();
    const ModPolynomial x = ModPolynomial::x(p);
    const Int pz(static_cast<unsigned long>(p));
    const Int pn = int_pow(pz, static_cast<unsigned long>(n));
    if (x.pow_mod(pn, fm) != x % fm) return false;
    int m = n;
    for (int q = 2; q * q <= m; ++q) {
        if (m % q != 0) continue;
        while (m % q == 0) m /= q;
        const Int e = int_pow(pz, static_cast<unsigned long>(n / q));
        if (gcd(x.pow_mod(e, fm) - x, fm).degree() != 0) return false;
    }
    if (m > 1) {
        const Int e = int_pow(pz, static_cast<unsigned long>(n / m));
        if (gcd(x.pow_mod(e, fm) - x, fm).degree() != 0) return false;
    }
    return true;
}

struct FactorOptions {
    /// Number of small primes tried for an irreducibility certificate before
    /// falling back to a complete rational factorization.
    unsigned certificate_primes = 10;
    /// Seed for the randomized equal-degree splitting; part of experiment
    /// configuration so that runs are reproducible.
    std::uint64_t seed = 0;
};

namespace detail {

// --- arithmetic on integer polynomials with coefficients mod m ------------

inline IntPolynomial poly_mod(const IntPolynomial& f, const Int& m) {
    std::vector<Int> c(f.coeffs());
    for (auto& v : c) v = int_mod(v, m);
    return IntPolynomial(std::move(c));
}

inline IntPolynomial mul_mod(const IntPolynomial& a, const IntPolynomial& b, const Int& m) {
    return poly_mod(a * b, m);
}

/// Division with remainder by a monic divisor, coefficients mod m.
inline void divmod_monic_mod(const IntPolynomial& f, const IntPolynomial& g, const Int& m,
                             IntPolynomial& q, IntPolynomial& r) {
    IntPolynomial::divmod_monic(poly_mod(f, m), g, q, r);
    q = poly_mod(q, m);
    r = poly_mod(r, m);
}

/// Coefficients mapped into the symmetric range (-m/2, m/2].
inline IntPolynomial symmetric_rep(const IntPolynomial& f, const Int& m) {
    std::vector<Int> c(f.coeffs());
    const Int half = m / 2;
    for (auto& v : c) {
        v = int_mod(v, m);
        if (v > half) v -= m;
    }
    return IntPolynomial(std::move(c));
}

inline IntPolynomial lift_from_mod(const ModPolynomial& f) {
    std::vector<Int> c(f.coeffs().size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = Int(static_cast<unsigned long>(f.coeff(i)));
    return IntPolynomial(std::move(c));
}

struct HenselPair {
    IntPolynomial g, h, s, t;  // f = g*h, s*g + t*h = 1 (mod modulus)
};

/// One quadratic Hensel step: lifts the pair from modulus m to m2 (m2 <= m^2).
inline void hensel_step(const IntPolynomial& f, HenselPair& pair, const Int& m, const Int& m2) {
    IntPolynomial& g = pair.g;
    IntPolynomial& h = pair.h;
    IntPolynomial& s = pair.s;
    IntPolynomial& t = pair.t;
    IntPolynomial e = poly_mod(f - g * h, m2);
    IntPolynomial q, r;
    divmod_monic_mod(s * e, h, m2, q, r);
    g = poly_mod(g + t * e + q * g, m2);
    h = poly_mod(h + r, m2);
    IntPolynomial b = poly_mod(s * g + t * h - IntPolynomial{1}, m2);
    IntPolynomial q2, r2;
    divmod_monic_mod(s * b, h, m2, q2, r2);
    s = poly_mod(s - r2, m2);
    t = poly_mod(t - t * b - q2 * g, m2);
}

/// Lifts the factorization f = prod(factors) mod p to modulus p^e by a
/// balanced binary tree of pair lifts. All polynomials monic.
inline void hensel_lift_tree(const IntPolynomial& f, const std::vector<ModPolynomial>& factors,
                             std::size_t lo, std::size_t hi, ModPolynomial::Coeff p,
                             unsigned long e, std::vector<IntPolynomial>& out) {
    if (hi - lo == 1) {
        out.push_back(poly_mod(f, int_pow(Int(static_cast<unsigned long>(p)), e)));
        return;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    ModPolynomial a = ModPolynomial::constant(1, p);
    for (std::size_t i = lo; i < mid; ++i) a = a * factors[i];
    ModPolynomial b = ModPolynomial::constant(1, p);
    for (std::size_t i = mid; i < hi; ++i) b = b * factors[i];
    // Bezout s*a + t*b = 1 over F_p (a, b coprime: f squarefree mod p)
    ModPolynomial r0 = a, r1 = b;
    ModPolynomial s0 = ModPolynomial::constant(1, p), s1 = ModPolynomial::zero(p);
    ModPolynomial t0 = ModPolynomial::zero(p), t1 = ModPolynomial::constant(1, p);
    while (!r1.is_zero()) {
        ModPolynomial q, rr;
        ModPolynomial::divmod(r0, r1, q, rr);
        r0 = std::exchange(r1, rr);
        s0 = std::exchange(s1, s0 - q * s1);
        t0 = std::exchange(t1, t0 - q * t1);
    }
    if (r0.degree() != 0)
        throw error("hensel_lift_tree: modular factors not coprime (not squarefree mod p)");
    const ModPolynomial::Coeff lead_inv = ModPolynomial::inv_mod(r0.leading(), p);
    HenselPair pair{lift_from_mod(a), lift_from_mod(b),
                    lift_from_mod(s0.scaled(lead_inv)), lift_from_mod(t0.scaled(lead_inv))};
    const Int pz(static_cast<unsigned long>(p));
    Int m = pz;
    unsigned long cur = 1;
    while (cur < e) {
        const unsigned long next = std::min(2 * cur, e);
        const Int m2 = int_pow(pz, next);
        hensel_step(f, pair, m, m2);
        m = m2;
        cur = next;
    }
    hensel_lift_tree(pair.g, factors, lo, mid, p, e, out);
    hensel_lift_tree(pair.h, factors, mid, hi, p, e, out);
}

/// Landau-Mignotte style bound: coefficients of any monic factor of monic f
/// are below 2^deg(f) * (||f||_2 + 1).
inline Int factor_coeff_bound(const IntPolynomial& f) {
    Int norm2(0);
    for (const auto& c : f.coeffs()) norm2 += c * c;
    Int root;
    mpz_sqrt(root.get_mpz_t(), norm2.get_mpz_t());
    return (root + 2) * int_pow(Int(2), static_cast<unsigned long>(f.degree()));
}

/// Factorization of a squarefree monic integer polynomial (degree >= 1) into
/// monic irreducibles: factor mod a good prime, Hensel lift, recombine.
inline std::vector<IntPolynomial> factor_squarefree_Q(const IntPolynomial& f,
                                                      const FactorOptions& opts) {
    if (f.degree() == 1) return {f};
    // Choose the admissible small prime giving the fewest modular factors.
    std::optional<ModPolynomial::Coeff> best_p;
    std::vector<ModFactor> best_factors;
    unsigned examined = 0;
    for (const auto p : small_primes) {
        ModPolynomial fp = reduce_mod(f, p);
        if (gcd(fp, fp.derivative()).degree() != 0) continue;  // p divides disc(f)
        Rng rng(derive_seed(opts.seed, stream::factor, p));
        auto factors = factor_mod_p(fp, rng);
        if (factors.size() == 1) return {f};  // irreducibility certificate
        if (!best_p || factors.size() < best_factors.size()) {
            best_p = p;
            best_factors = std::move(factors);
        }
        if (++examined >= 3) break;
    }
    if (!best_p)
        throw error("factor_squarefree_Q: no admissible prime in the fixed table");

    const auto p = *best_p;
    std::vector<ModPolynomial> modular;
    modular.reserve(best_factors.size());
    for (auto& mf : best_factors) modular.push_back(std::move(mf.poly));

    // Lift to p^e > 2 * coefficient bound.
    const Int bound = factor_coeff_bound(f);
    unsigned long e = 1;
    Int modulus(static_cast<unsigned long>(p));
    while (modulus <= 2 * bound) {
        modulus *= p;
        ++e;
    }
    std::vector<IntPolynomial> lifted;
    hensel_lift_tree(poly_mod(f, modulus), modular, 0, modular.size(), p, e, lifted);

    // Zassenhaus recombination over subsets of the lifted factors.
    std::vector<IntPolynomial> result;
    std::vector<std::size_t> active(lifted.size());
    for (std::size_t i = 0; i < active.size(); ++i) active[i] = i;
    IntPolynomial remaining = f;

    auto try_subset = [&](const std::vector<std::size_t>& subset) -> bool {
        IntPolynomial cand{1};
        for (std::size_t idx : subset) cand = mul_mod(cand, lifted[idx], modulus);
        cand = symmetric_rep(cand, modulus);
        if (!cand.is_monic()) return false;
        if (remaining.coeff(0) != 0) {
            if (cand.coeff(0) == 0) return false;
            if (!mpz_divisible_p(remaining.coeff(0).get_mpz_t(), cand.coeff(0).get_mpz_t()))
                return false;
        }
        IntPolynomial q, r;
        IntPolynomial::divmod_monic(remaining, cand, q, r);
        if (!r.is_zero()) return false;
        result.push_back(cand);
        remaining = q;
        return true;
    };

    bool progress = true;
    while (progress) {
        progress = false;
        const std::size_t n_active = active.size();
        for (std::size_t size = 1; size <= n_active / 2 && !progress; ++size) {
            std::vector<std::size_t> choice(size);
            // iterate combinations of `active` of the given size
            std::vector<std::size_t> pos(size);
            for (std::size_t i = 0; i < size; ++i) pos[i] = i;
            while (true) {
                for (std::size_t i = 0; i < size; ++i) choice[i] = active[pos[i]];
                if (try_subset(choice)) {
                    std::vector<std::size_t> rest;
                    for (std::size_t idx : active)
                        if (std::find(choice.begin(), choice.end(), idx) == choice.end())
                            rest.push_back(idx);
                    active = std::move(rest);
                    progress = true;
                    break;
                }
                // next combination
                std::size_t i = size;
                while (i-- > 0) {
                    if (pos[i] != i + n_active - size) {
                        ++pos[i];
                        for (std::size_t j = i + 1; j < size; ++j) pos[j] = pos[j - 1] + 1;
                        break;
                    }
                    if (i == 0) goto combos_done;
                }
            }
        combos_done:;
        }
    }
    if (remaining.degree() > 0) result.push_back(remaining);
    std::sort(result.begin(), result.end(), [](const IntPolynomial& a, const IntPolynomial& b) {
        if (a.degree() != b.degree()) return a.degree() < b.degree();
        for (int i = a.degree(); i >= 0; --i) {
            const auto& ca = a.coeff(static_cast<std::size_t>(i));
            const auto& cb = b.coeff(static_cast<std::size_t>(i));
            if (ca != cb) return ca < cb;
        }
        return false;
    });
    return result;
}

}  // namespace detail

/// Complete factorization of a monic integer polynomial over Q (equivalently
/// over Z) into monic irreducibles with multiplicities.
inline std::vector<std::pair<IntPolynomial, unsigned>> factor_Q(const IntPolynomial& f,
                                                                const FactorOptions& opts = {}) {
    if (f.degree() < 1) throw config_error("factor_Q: degree must be >= 1");
    if (!f.is_monic()) throw config_error("factor_Q: polynomial must be monic");
    const IntPolynomial d = int_poly_gcd(f, f.derivative());
    IntPolynomial squarefree = f;
    if (d.degree() > 0) {
        IntPolynomial q, r;
        IntPolynomial::divmod_monic(f, d, q, r);
        squarefree = q;
    }
    auto irreducibles = detail::factor_squarefree_Q(squarefree, opts);
    std::vector<std::pair<IntPolynomial, unsigned>> out;
    for (auto& q : irreducibles) {
        unsigned mult = 0;
        IntPolynomial rest = f;
        while (true) {
            IntPolynomial quot, rem;
            IntPolynomial::divmod_monic(rest, q, quot, rem);
            if (!rem.is_zero()) break;
            ++mult;
            rest = quot;
        }
        out.emplace_back(std::move(q), mult);
    }
    return out;
}

/// True iff the monic polynomial f factors nontrivially over Q.
///
/// Certificate-first strategy: f irreducible modulo any prime (with degree
/// preserved; automatic for monic f) is irreducible over Q, so a bounded list
/// of small primes is scanned before the complete factorization fallback.
/// Inputs like x^4+1 are reducible modulo every prime, which is why the
/// fallback is mandatory.
inline bool is_reducible_Q(const IntPolynomial& f, const FactorOptions& opts = {}) {
    if (f.degree() < 1) throw config_error("is_reducible_Q: degree must be >= 1");
    if (!f.is_monic()) throw config_error("is_reducible_Q: polynomial must be monic");
    if (f.degree() == 1) return false;
    unsigned tried = 0;
    for (const auto p : small_primes) {
        if (tried >= opts.certificate_primes) break;
        ++tried;
        if (is_irreducible_mod_p(reduce_mod(f, p))) return false;
    }
    if (int_poly_gcd(f, f.derivative()).degree() > 0) return true;  // repeated factor
    return detail::factor_squarefree_Q(f, opts).size() > 1;
}

/// Smallest m such that the m-th cyclotomic polynomial divides f, searching
/// exactly the m with euler_phi(m) <= deg f; nullopt when no root of f is a
/// root of unity.
inline std::optional<unsigned> has_root_of_unity_root(const IntPolynomial& f) {
    if (f.degree() < 1) throw config_error("has_root_of_unity_root: degree must be >= 1");
    if (!f.is_monic()) throw config_error("has_root_of_unity_root: polynomial must be monic");
    const unsigned n = static_cast<unsigned>(f.degree());
    // phi(m) > sqrt(m) for m > 6, so phi(m) <= n forces m <= max(6, n^2).
    const unsigned cap = std::max(6u, n * n);
    for (unsigned m = 1; m <= cap; ++m) {
        if (euler_phi(m) > n) continue;
        if (f.divisible_by(cyclotomic(m))) return m;
    }
    return std::nullopt;
}

struct PowerSubstitution {
    unsigned d = 0;        // largest valid d >= 2
    IntPolynomial inner;   // g with f(x) = g(x^d)
};

/// Largest d >= 2 with every nonzero coefficient of f supported on exponents
/// divisible by d (d then divides deg f since f is monic), with the witness g.
inline std::optional<PowerSubstitution> power_substitution(const IntPolynomial& f) {
    if (f.degree() < 1) throw config_error("power_substitution: degree must be >= 1");
    if (!f.is_monic()) throw config_error("power_substitution: polynomial must be monic");
    unsigned d = 0;
    for (std::size_t i = 1; i <= static_cast<std::size_t>(f.degree()); ++i) {
        if (f.coeff(i) == 0) continue;
        d = static_cast<unsigned>(std::gcd<std::size_t>(d, i));
        if (d == 1) return std::nullopt;
    }
    if (d < 2) return std::nullopt;
    std::vector<Int> g(static_cast<std::size_t>(f.degree()) / d + 1);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = f.coeff(j * d);
    return PowerSubstitution{d, IntPolynomial(std::move(g))};
}

}  // namespace prymsieve
