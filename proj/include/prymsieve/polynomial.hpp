#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "prymsieve/error.hpp"

namespace prymsieve {

using Int = mpz_class;

inline Int int_gcd(const Int& a, const Int& b) {
    Int r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Int int_pow(const Int& a, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), a.get_mpz_t(), e);
    return r;
}

/// Nonnegative residue of a mod m (m > 0).
inline Int int_mod(const Int& a, const Int& m) {
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

/// Univariate polynomial with exact integer coefficients, constant term first.
/// The zero polynomial has an empty coefficient vector and degree -1.
class IntPolynomial {
public:
    IntPolynomial() = default;

    explicit IntPolynomial(std::vector<Int> coeffs) : c_(std::move(coeffs)) { normalize(); }

    IntPolynomial(std::initializer_list<long> coeffs) {
        c_.reserve(coeffs.size());
        for (long v : coeffs) c_.emplace_back(v);
        normalize();
    }

    static IntPolynomial zero() { return IntPolynomial(); }

    static IntPolynomial constant(Int v) {
        IntPolynomial f;
        f.c_.push_back(std::move(v));
        f.normalize();
        return f;
    }

    static IntPolynomial monomial(Int coeff, std::size_t exp) {
        IntPolynomial f;
        f.c_.assign(exp + 1, Int(0));
        f.c_[exp] = std::move(coeff);
        f.normalize();
        return f;
    }

    static IntPolynomial x() { return monomial(Int(1), 1); }

    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }

    const Int& coeff(std::size_t i) const {
        static const Int kZero(0);
        return i < c_.size() ? c_[i] : kZero;
    }

    const std::vector<Int>& coeffs() const { return c_; }

    const Int& leading() const {
        if (c_.empty()) throw config_error("leading coefficient of zero polynomial");
        return c_.back();
    }

    bool is_monic() const { return !c_.empty() && c_.back() == 1; }

    friend IntPolynomial operator+(const IntPolynomial& a, const IntPolynomial& b) {
        std::vector<Int> r(std::max(a.c_.size(), b.c_.size()), Int(0));
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) + b.coeff(i);
        return IntPolynomial(std::move(r));
    }

    friend IntPolynomial operator-(const IntPolynomial& a, const IntPolynomial& b) {
        std::vector<Int> r(std::max(a.c_.size(), b.c_.size()), Int(0));
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) - b.coeff(i);
        return IntPolynomial(std::move(r));
    }

    friend IntPolynomial operator-(const IntPolynomial& a) {
        std::vector<Int> r(a.c_);
        for (auto& v : r) v = -v;
        return IntPolynomial(std::move(r));
    }

    friend IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b) {
        if (a.is_zero() || b.is_zero()) return zero();
        std::vector<Int> r(a.c_.size() + b.c_.size() - 1, Int(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == 0) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j)
                mpz_addmul(r[i + j].get_mpz_t(), a.c_[i].get_mpz_t(), b.c_[j].get_mpz_t());
        }
        return IntPolynomial(std::move(r));
    }

    IntPolynomial scaled(const Int& k) const {
        std::vector<Int> r(c_);
        for (auto& v : r) v *= k;
        return IntPolynomial(std::move(r));
    }

    bool operator==(const IntPolynomial& o) const { return c_ == o.c_; }
    bool operator!=(const IntPolynomial& o) const { return !(*this == o); }

    /// Division with remainder by a monic divisor; exact over the integers.
    static void divmod_monic(const IntPolynomial& f, const IntPolynomial& g,
                             IntPolynomial& q, IntPolynomial& r) {
        if (!g.is_monic()) throw config_error("divmod_monic: divisor is not monic");
        std::vector<Int> rem(f.c_);
        const int dg = g.degree();
        const int df = f.degree();
        if (df < dg) {
            q = zero();
            r = f;
            return;
        }
        std::vector<Int> quot(static_cast<std::size_t>(df - dg) + 1, Int(0));
        for (int i = df; i >= dg; --i) {
            Int lead = rem[static_cast<std::size_t>(i)];
            if (lead == 0) continue;
            quot[static_cast<std::size_t>(i - dg)] = lead;
            for (int j = 0; j <= dg; ++j)
                rem[static_cast<std::size_t>(i - dg + j)] -= lead * g.c_[static_cast<std::size_t>(j)];
        }
        q = IntPolynomial(std::move(quot));
        r = IntPolynomial(std::move(rem));
    }

    /// True iff the monic polynomial g divides f exactly over the integers.
    bool divisible_by(const IntPolynomial& g) const {
        IntPolynomial q, r;
        divmod_monic(*this, g, q, r);
        return r.is_zero();
    }

    IntPolynomial derivative() const {
        if (degree() < 1) return zero();
        std::vector<Int> r(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * Int(static_cast<long>(i));
        return IntPolynomial(std::move(r));
    }

    /// f(-x).
    IntPolynomial at_negated_argument() const {
        std::vector<Int> r(c_);
        for (std::size_t i = 1; i < r.size(); i += 2) r[i] = -r[i];
        return IntPolynomial(std::move(r));
    }

    /// f(x^d).
    IntPolynomial inflate(std::size_t d) const {
        if (is_zero() || d == 1) return *this;
        std::vector<Int> r(static_cast<std::size_t>(degree()) * d + 1, Int(0));
        for (std::size_t i = 0; i < c_.size(); ++i) r[i * d] = c_[i];
        return IntPolynomial(std::move(r));
    }

    Int evaluate(const Int& x) const {
        Int acc(0);
        for (std::size_t i = c_.size(); i-- > 0;) {
            acc *= x;
            acc += c_[i];
        }
        return acc;
    }

    Int content() const {
        Int g(0);
        for (const auto& v : c_) g = int_gcd(g, v);
        return g;
    }

    /// Content-free part with positive leading coefficient; zero maps to zero.
    IntPolynomial primitive_part() const {
        if (is_zero()) return zero();
        Int g = content();
        if (leading() < 0) g = -g;
        std::vector<Int> r(c_);
        for (auto& v : r) v /= g;
        return IntPolynomial(std::move(r));
    }

    /// c_k == c_{n-k} for all k (characteristic polynomials of symplectic
    /// matrices have this symmetry).
    bool is_self_reciprocal() const {
        const int n = degree();
        if (n < 0) return false;
        for (int k = 0; k <= n; ++k)
            if (coeff(static_cast<std::size_t>(k)) != coeff(static_cast<std::size_t>(n - k)))
                return false;
        return true;
    }

    std::string to_string() const {
        if (is_zero()) return "0";
        std::ostringstream out;
        bool first = true;
        for (int i = degree(); i >= 0; --i) {
            const Int& v = c_[static_cast<std::size_t>(i)];
            if (v == 0) continue;
            Int a = v;
            if (first) {
                if (a < 0) {
                    out << "-";
                    a = -a;
                }
            } else {
                out << (a < 0 ? " - " : " + ");
                if (a < 0) a = -a;
            }
            if (i == 0 || a != 1) out << a.get_str();
            if (i > 0) {
                if (a != 1) out << "*";
                out << "x";
                if (i > 1) out << "^" << i;
            }
            first = false;
        }
        return out.str();
    }

private:
    void normalize() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    std::vector<Int> c_;
};

/// Pseudo-remainder: lc(g)^(deg f - deg g + 1) * f  =  q*g + r, over the integers.
inline IntPolynomial pseudo_remainder(const IntPolynomial& f, const IntPolynomial& g) {
    if (g.is_zero()) throw config_error("pseudo_remainder by zero");
    int df = f.degree();
    const int dg = g.degree();
    if (df < dg) return f;
    std::vector<Int> rem(f.coeffs());
    const Int& lg = g.leading();
    for (int i = df; i >= dg; --i) {
        Int lead = rem[static_cast<std::size_t>(i)];
        for (auto& v : rem) v *= lg;
        if (lead != 0) {
            for (int j = 0; j <= dg; ++j)
                rem[static_cast<std::size_t>(i - dg + j)] -= lead * g.coeff(static_cast<std::size_t>(j));
        }
    }
    rem.resize(static_cast<std::size_t>(dg));
    return IntPolynomial(std::move(rem));
}

/// Gcd in Z[x] via the primitive pseudo-remainder sequence. Result is
/// primitive with positive leading coefficient (times the content gcd).
inline IntPolynomial int_poly_gcd(IntPolynomial a, IntPolynomial b) {
    if (a.is_zero()) return b.primitive_part().scaled(b.is_zero() ? Int(1) : b.content());
    if (b.is_zero()) return a.primitive_part().scaled(a.content());
    const Int cont = int_gcd(a.content(), b.content());
    a = a.primitive_part();
    b = b.primitive_part();
    if (a.degree() < b.degree()) std::swap(a, b);
    while (!b.is_zero()) {
        IntPolynomial r = pseudo_remainder(a, b).primitive_part();
        a = std::move(b);
        b = std::move(r);
    }
    return a.scaled(cont);
}

/// The m-th cyclotomic polynomial, computed by exact division of x^m - 1 by
/// the cyclotomic polynomials of the proper divisors of m.
inline IntPolynomial cyclotomic(unsigned m) {
    if (m == 0) throw config_error("cyclotomic: m must be >= 1");
    std::map<unsigned, IntPolynomial> memo;
    // Iterate divisors in increasing order so every needed value is ready.
    std::vector<unsigned> divisors;
    for (unsigned d = 1; d <= m; ++d)
        if (m % d == 0) divisors.push_back(d);
    for (unsigned d : divisors) {
        IntPolynomial num = IntPolynomial::monomial(Int(1), d) - IntPolynomial{1};
        for (unsigned e : divisors) {
            if (e >= d || d % e != 0) continue;
            IntPolynomial q, r;
            IntPolynomial::divmod_monic(num, memo.at(e), q, r);
            num = std::move(q);
        }
        memo.emplace(d, std::move(num));
    }
    return memo.at(m);
}

inline unsigned euler_phi(unsigned m) {
    unsigned result = m;
    for (unsigned q = 2; q * q <= m; ++q) {
        if (m % q == 0) {
            while (m % q == 0) m /= q;
            result -= result / q;
        }
    }
    if (m > 1) result -= result / m;
    return result;
}

// ---------------------------------------------------------------------------

/// Polynomial over F_p, p a prime < 2^31. Coefficients reduced into [0, p).
class ModPolynomial {
public:
    using Coeff = std::uint32_t;

    ModPolynomial() : p_(2) {}

    ModPolynomial(std::vector<Coeff> coeffs, Coeff p) : c_(std::move(coeffs)), p_(p) {
        check_prime_arg(p_);
        for (auto& v : c_) v %= p_;
        normalize();
    }

    static ModPolynomial zero(Coeff p) { return ModPolynomial({}, p); }

    static ModPolynomial constant(Coeff v, Coeff p) { return ModPolynomial({v}, p); }

    static ModPolynomial monomial(Coeff coeff, std::size_t exp, Coeff p) {
        std::vector<Coeff> c(exp + 1, 0);
        c[exp] = coeff;
        return ModPolynomial(std::move(c), p);
    }

    static ModPolynomial x(Coeff p) { return monomial(1, 1, p); }

    Coeff p() const { return p_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }

    Coeff coeff(std::size_t i) const { return i < c_.size() ? c_[i] : 0; }
    const std::vector<Coeff>& coeffs() const { return c_; }

    Coeff leading() const {
        if (c_.empty()) throw config_error("leading coefficient of zero polynomial");
        return c_.back();
    }

    bool is_monic() const { return !c_.empty() && c_.back() == 1; }

    bool operator==(const ModPolynomial& o) const { return p_ == o.p_ && c_ == o.c_; }
    bool operator!=(const ModPolynomial& o) const { return !(*this == o); }

    // total order used to emit factor lists deterministically
    bool operator<(const ModPolynomial& o) const {
        if (degree() != o.degree()) return degree() < o.degree();
        for (std::size_t i = c_.size(); i-- > 0;)
            if (c_[i] != o.c_[i]) return c_[i] < o.c_[i];
        return false;
    }

    friend ModPolynomial operator+(const ModPolynomial& a, const ModPolynomial& b) {
        a.check_same_p(b);
        std::vector<Coeff> r(std::max(a.c_.size(), b.c_.size()), 0);
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] = static_cast<Coeff>((static_cast<std::uint64_t>(a.coeff(i)) + b.coeff(i)) % a.p_);
        return ModPolynomial(std::move(r), a.p_);
    }

    friend ModPolynomial operator-(const ModPolynomial& a, const ModPolynomial& b) {
        a.check_same_p(b);
        std::vector<Coeff> r(std::max(a.c_.size(), b.c_.size()), 0);
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] = static_cast<Coeff>((static_cast<std::uint64_t>(a.coeff(i)) + a.p_ - b.coeff(i)) % a.p_);
        return ModPolynomial(std::move(r), a.p_);
    }

    friend ModPolynomial operator*(const ModPolynomial& a, const ModPolynomial& b) {
        a.check_same_p(b);
        if (a.is_zero() || b.is_zero()) return zero(a.p_);
        std::vector<Coeff> r(a.c_.size() + b.c_.size() - 1, 0);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == 0) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) {
                std::uint64_t v = r[i + j] + static_cast<std::uint64_t>(a.c_[i]) * b.c_[j];
                r[i + j] = static_cast<Coeff>(v % a.p_);
            }
        }
        return ModPolynomial(std::move(r), a.p_);
    }

    ModPolynomial scaled(Coeff k) const {
        std::vector<Coeff> r(c_);
        for (auto& v : r) v = static_cast<Coeff>(static_cast<std::uint64_t>(v) * k % p_);
        return ModPolynomial(std::move(r), p_);
    }

    ModPolynomial monic() const {
        if (is_zero()) return *this;
        return scaled(inv_mod(leading(), p_));
    }

    static void divmod(const ModPolynomial& f, const ModPolynomial& g,
                       ModPolynomial& q, ModPolynomial& r) {
        f.check_same_p(g);
        if (g.is_zero()) throw config_error("mod-p division by zero polynomial");
        const Coeff p = f.p_;
        const int dg = g.degree();
        int df = f.degree();
        if (df < dg) {
            q = zero(p);
            r = f;
            return;
        }
        const Coeff linv = inv_mod(g.leading(), p);
        std::vector<Coeff> rem(f.c_);
        std::vector<Coeff> quot(static_cast<std::size_t>(df - dg) + 1, 0);
        for (int i = df; i >= dg; --i) {
            Coeff lead = rem[static_cast<std::size_t>(i)];
            if (lead == 0) continue;
            Coeff factor = static_cast<Coeff>(static_cast<std::uint64_t>(lead) * linv % p);
            quot[static_cast<std::size_t>(i - dg)] = factor;
            for (int j = 0; j <= dg; ++j) {
                auto& slot = rem[static_cast<std::size_t>(i - dg + j)];
                std::uint64_t sub = static_cast<std::uint64_t>(factor) * g.c_[static_cast<std::size_t>(j)] % p;
                slot = static_cast<Coeff>((slot + p - sub) % p);
            }
        }
        q = ModPolynomial(std::move(quot), p);
        r = ModPolynomial(std::move(rem), p);
    }

    friend ModPolynomial operator%(const ModPolynomial& f, const ModPolynomial& g) {
        ModPolynomial q, r;
        divmod(f, g, q, r);
        return r;
    }

    friend ModPolynomial gcd(ModPolynomial a, ModPolynomial b) {
        a.check_same_p(b);
        while (!b.is_zero()) {
            ModPolynomial r = a % b;
            a = std::move(b);
            b = std::move(r);
        }
        return a.monic();
    }

    ModPolynomial derivative() const {
        if (degree() < 1) return zero(p_);
        std::vector<Coeff> r(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i)
            r[i - 1] = static_cast<Coeff>(static_cast<std::uint64_t>(c_[i]) * (i % p_) % p_);
        return ModPolynomial(std::move(r), p_);
    }

    /// this^e mod f, e an arbitrary-precision nonnegative exponent.
    ModPolynomial pow_mod(const Int& e, const ModPolynomial& f) const {
        check_same_p(f);
        ModPolynomial result = constant(1, p_);
        ModPolynomial base = *this % f;
        const std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
        if (e == 0) return result;
        for (std::size_t i = bits; i-- > 0;) {
            result = (result * result) % f;
            if (mpz_tstbit(e.get_mpz_t(), i)) result = (result * base) % f;
        }
        return result;
    }

    static Coeff inv_mod(Coeff a, Coeff p) {
        // extended Euclid
        std::int64_t t = 0, new_t = 1;
        std::int64_t r = p, new_r = a % p;
        while (new_r != 0) {
            std::int64_t quot = r / new_r;
            t = std::exchange(new_t, t - quot * new_t);
            r = std::exchange(new_r, r - quot * new_r);
        }
        if (r != 1) throw config_error("inv_mod: argument not invertible");
        return static_cast<Coeff>(t < 0 ? t + p : t);
    }

    std::string to_string() const {
        std::ostringstream out;
        out << "[";
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (i) out << ", ";
            out << c_[i];
        }
        out << "] mod " << p_;
        return out.str();
    }

private:
    static void check_prime_arg(Coeff p) {
        if (p < 2) throw config_error("modulus must be >= 2");
    }

    void check_same_p(const ModPolynomial& o) const {
        if (p_ != o.p_) throw config_error("mixed moduli in mod-p polynomial arithmetic");
    }

    void normalize() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    std::vector<Coeff> c_;
    Coeff p_;
};

/// Entrywise reduction of an integer polynomial into F_p[x].
inline ModPolynomial reduce_mod(const IntPolynomial& f, ModPolynomial::Coeff p) {
    if (p < 2) throw config_error("reduce_mod: modulus must be >= 2");
    std::vector<ModPolynomial::Coeff> r(f.coeffs().size());
    const Int pz(static_cast<unsigned long>(p));
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = static_cast<ModPolynomial::Coeff>(int_mod(f.coeff(i), pz).get_ui());
    return ModPolynomial(std::move(r), p);
}

}  // namespace prymsieve
