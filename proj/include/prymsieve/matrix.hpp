#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "prymsieve/error.hpp"
#include "prymsieve/mod_matrix.hpp"
#include "prymsieve/polynomial.hpp"

namespace prymsieve {

/// Square matrix over the integers, exact arithmetic throughout.
///
/// Convention used across the library: homology classes are ROW vectors and
/// matrices act on the right, h -> h*M. Row i of a matrix is therefore the
/// image of the i-th basis vector, and the matrix of a composite map
/// "apply A, then B" is A*B (same order as the word).
class IntMatrix {
public:
    explicit IntMatrix(std::size_t dim) : dim_(dim), e_(dim * dim, Int(0)) {
        if (dim == 0) throw config_error("IntMatrix: dimension must be positive");
    }

    static IntMatrix identity(std::size_t dim) {
        IntMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m.set(i, i, Int(1));
        return m;
    }

    static IntMatrix from_rows(const std::vector<std::vector<long>>& rows) {
        IntMatrix m(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size())
                throw config_error("IntMatrix::from_rows: matrix must be square");
            for (std::size_t j = 0; j < rows.size(); ++j) m.set(i, j, Int(rows[i][j]));
        }
        return m;
    }

    std::size_t dim() const { return dim_; }

    const Int& at(std::size_t i, std::size_t j) const { return e_[i * dim_ + j]; }
    void set(std::size_t i, std::size_t j, Int v) { e_[i * dim_ + j] = std::move(v); }

    bool operator==(const IntMatrix& o) const { return dim_ == o.dim_ && e_ == o.e_; }
    bool operator!=(const IntMatrix& o) const { return !(*this == o); }

    bool is_identity() const {
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j)
                if (at(i, j) != (i == j ? 1 : 0)) return false;
        return true;
    }

    friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
        if (a.dim_ != b.dim_) throw config_error("IntMatrix multiply: dimension mismatch");
        const std::size_t n = a.dim_;
        IntMatrix r(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                const Int& aik = a.e_[i * n + k];
                if (aik == 0) continue;
                for (std::size_t j = 0; j < n; ++j)
                    mpz_addmul(r.e_[i * n + j].get_mpz_t(), aik.get_mpz_t(),
                               b.e_[k * n + j].get_mpz_t());
            }
        }
        return r;
    }

    friend IntMatrix operator+(const IntMatrix& a, const IntMatrix& b) {
        if (a.dim_ != b.dim_) throw config_error("IntMatrix add: dimension mismatch");
        IntMatrix r(a.dim_);
        for (std::size_t k = 0; k < a.e_.size(); ++k) r.e_[k] = a.e_[k] + b.e_[k];
        return r;
    }

    friend IntMatrix operator-(const IntMatrix& a, const IntMatrix& b) {
        if (a.dim_ != b.dim_) throw config_error("IntMatrix subtract: dimension mismatch");
        IntMatrix r(a.dim_);
        for (std::size_t k = 0; k < a.e_.size(); ++k) r.e_[k] = a.e_[k] - b.e_[k];
        return r;
    }

    IntMatrix negated() const {
        IntMatrix r(dim_);
        for (std::size_t k = 0; k < e_.size(); ++k) r.e_[k] = -e_[k];
        return r;
    }

    IntMatrix scaled(const Int& c) const {
        IntMatrix r(dim_);
        for (std::size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k] * c;
        return r;
    }

    IntMatrix transpose() const {
        IntMatrix r(dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) r.e_[j * dim_ + i] = e_[i * dim_ + j];
        return r;
    }

    Int trace() const {
        Int t(0);
        for (std::size_t i = 0; i < dim_; ++i) t += at(i, i);
        return t;
    }

    /// Exact determinant (Bareiss fraction-free elimination).
    Int det() const {
        const std::size_t n = dim_;
        std::vector<Int> a(e_);
        Int sign(1), prev(1);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (a[k * n + k] == 0) {
                std::size_t piv = k + 1;
                while (piv < n && a[piv * n + k] == 0) ++piv;
                if (piv == n) return Int(0);
                for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
                sign = -sign;
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                for (std::size_t j = k + 1; j < n; ++j) {
                    Int v = a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j];
                    mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
                    a[i * n + j] = std::move(v);
                }
            }
            prev = a[k * n + k];
        }
        return sign * a[n * n - 1];
    }

    /// Exact inverse; defined only for unimodular matrices (det = +-1),
    /// which covers every group element handled here.
    IntMatrix inverse() const {
        const std::size_t n = dim_;
        std::vector<mpq_class> a(n * 2 * n, mpq_class(0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) a[i * 2 * n + j] = mpq_class(at(i, j));
            a[i * 2 * n + n + i] = 1;
        }
        mpq_class det(1);
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t piv = col;
            while (piv < n && a[piv * 2 * n + col] == 0) ++piv;
            if (piv == n) throw config_error("IntMatrix inverse: matrix is singular");
            if (piv != col) {
                for (std::size_t j = 0; j < 2 * n; ++j)
                    std::swap(a[piv * 2 * n + j], a[col * 2 * n + j]);
                det = -det;
            }
            const mpq_class pivot = a[col * 2 * n + col];
            det *= pivot;
            for (std::size_t j = 0; j < 2 * n; ++j) a[col * 2 * n + j] /= pivot;
            for (std::size_t i = 0; i < n; ++i) {
                if (i == col) continue;
                const mpq_class f = a[i * 2 * n + col];
                if (f == 0) continue;
                for (std::size_t j = 0; j < 2 * n; ++j) a[i * 2 * n + j] -= f * a[col * 2 * n + j];
            }
        }
        if (det != 1 && det != -1)
            throw config_error("IntMatrix inverse: matrix is not unimodular (det = " +
                               det.get_str() + ")");
        IntMatrix r(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                mpq_class v = a[i * 2 * n + n + j];
                v.canonicalize();
                if (v.get_den() != 1)
                    throw config_error("IntMatrix inverse: non-integer entry (unexpected)");
                r.set(i, j, v.get_num());
            }
        }
        return r;
    }

    /// Characteristic polynomial det(xI - M), monic of degree dim.
    /// Faddeev-LeVerrier; every division is exact over the integers.
    IntPolynomial char_poly() const {
        const std::size_t n = dim_;
        std::vector<Int> c(n + 1, Int(0));
        c[n] = 1;
        IntMatrix m = *this;
        c[n - 1] = -m.trace();
        for (std::size_t k = 2; k <= n; ++k) {
            IntMatrix shifted = m;
            for (std::size_t i = 0; i < n; ++i)
                shifted.set(i, i, shifted.at(i, i) + c[n - k + 1]);
            m = *this * shifted;
            Int t = -m.trace();
            mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), Int(static_cast<long>(k)).get_mpz_t());
            c[n - k] = std::move(t);
        }
        return IntPolynomial(std::move(c));
    }

    /// Entrywise residues in [0, p).
    ModMatrix reduce_mod(ModMatrix::Coeff p) const {
        if (p < 2) throw config_error("reduce_mod: modulus must be >= 2");
        ModMatrix r(dim_, p);
        const Int pz(static_cast<unsigned long>(p));
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j)
                r.set(i, j, static_cast<ModMatrix::Coeff>(int_mod(at(i, j), pz).get_ui()));
        return r;
    }

    /// Largest |entry|, for growth diagnostics.
    Int max_abs() const {
        Int m(0);
        for (const auto& v : e_) {
            Int a = abs(v);
            if (a > m) m = a;
        }
        return m;
    }

    std::string to_string() const {
        std::ostringstream out;
        for (std::size_t i = 0; i < dim_; ++i) {
            for (std::size_t j = 0; j < dim_; ++j) {
                if (j) out << " ";
                out << at(i, j).get_str();
            }
            out << "\n";
        }
        return out.str();
    }

private:
    std::size_t dim_;
    std::vector<Int> e_;
};

/// The standard symplectic gram matrix: 2x2 blocks [[0,1],[-1,0]] down the
/// diagonal, in the interleaved basis ordering (u1, v1, u2, v2, ...).
class SymplecticForm {
public:
    static SymplecticForm standard(std::size_t dim) {
        if (dim == 0 || dim % 2 != 0)
            throw config_error("SymplecticForm: dimension must be even and positive");
        IntMatrix j(dim);
        for (std::size_t k = 0; k < dim / 2; ++k) {
            j.set(2 * k, 2 * k + 1, Int(1));
            j.set(2 * k + 1, 2 * k, Int(-1));
        }
        return SymplecticForm(std::move(j));
    }

    std::size_t dim() const { return gram_.dim(); }
    const IntMatrix& gram() const { return gram_; }

    /// Form value (x, y) = x J y^T for row vectors.
    Int pair(const std::vector<Int>& x, const std::vector<Int>& y) const {
        const std::size_t n = dim();
        if (x.size() != n || y.size() != n)
            throw config_error("SymplecticForm::pair: dimension mismatch");
        Int acc(0);
        for (std::size_t i = 0; i < n; ++i) {
            if (x[i] == 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (gram_.at(i, j) == 0) continue;
                acc += x[i] * gram_.at(i, j) * y[j];
            }
        }
        return acc;
    }

private:
    explicit SymplecticForm(IntMatrix gram) : gram_(std::move(gram)) {}
    IntMatrix gram_;
};

/// True iff M^T J M = J exactly. (Equivalent to M J M^T = J; symplectic
/// groups are closed under transposition.)
inline bool is_symplectic(const IntMatrix& m, const SymplecticForm& form) {
    if (m.dim() != form.dim()) throw config_error("is_symplectic: dimension mismatch");
    return m.transpose() * form.gram() * m == form.gram();
}

inline bool is_symplectic_mod(const ModMatrix& m, ModMatrix::Coeff p) {
    if (m.dim() % 2 != 0) throw config_error("is_symplectic_mod: dimension must be even");
    ModMatrix j(m.dim(), p);
    for (std::size_t k = 0; k < m.dim() / 2; ++k) {
        j.set(2 * k, 2 * k + 1, 1);
        j.set(2 * k + 1, 2 * k, p - 1);
    }
    return m.transpose() * j * m == j;
}

/// k-th power of the transvection along v: h -> h + k*(h,v)*v.
/// As a matrix (row convention): I + k * (J v^T) v, where (J v^T)_i = (e_i, v).
inline IntMatrix transvection_power(const SymplecticForm& form, const std::vector<Int>& v,
                                    long k) {
    const std::size_t n = form.dim();
    if (v.size() != n) throw config_error("transvection: dimension mismatch");
    IntMatrix t = IntMatrix::identity(n);
    std::vector<Int> jv(n, Int(0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (form.gram().at(i, j) != 0) jv[i] += form.gram().at(i, j) * v[j];
    const Int kz(k);
    for (std::size_t i = 0; i < n; ++i) {
        if (jv[i] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (v[j] == 0) continue;
            t.set(i, j, t.at(i, j) + kz * jv[i] * v[j]);
        }
    }
    return t;
}

inline IntMatrix transvection(const SymplecticForm& form, const std::vector<Int>& v) {
    return transvection_power(form, v, 1);
}

/// Index of the basis vector labelled z_i (i in {+-1, ..., +-n}) in the
/// interleaved ordering z_1, z_{-1}, z_2, z_{-2}, ...
inline std::size_t interleaved_index(int i, std::size_t half_rank) {
    if (i == 0 || static_cast<std::size_t>(i > 0 ? i : -i) > half_rank)
        throw config_error("basis index out of range: " + std::to_string(i));
    return i > 0 ? 2 * static_cast<std::size_t>(i - 1)
                 : 2 * static_cast<std::size_t>(-i - 1) + 1;
}

/// k-th power of the elementary transformation T_i on the standard
/// interleaved symplectic lattice of rank 2*half_rank:
///   h -> h + k*(h, z_{-i}) z_{-i}.
inline IntMatrix elementary_transvection_power(std::size_t half_rank, int i, long k) {
    const SymplecticForm form = SymplecticForm::standard(2 * half_rank);
    std::vector<Int> v(2 * half_rank, Int(0));
    v[interleaved_index(-i, half_rank)] = 1;
    return transvection_power(form, v, k);
}

/// k-th power of the elementary pair transformation T_{i,j} (i != +-j):
///   h -> h + k*[(h, z_{-i}) z_{-j} + (h, z_{-j}) z_{-i}].
/// The two directions pair to zero, so the displacement is nilpotent and the
/// k-th power is the k-fold multiple of it.
inline IntMatrix elementary_pair_power(std::size_t half_rank, int i, int j, long k) {
    if (i == j || i == -j)
        throw config_error("elementary pair transformation requires i != +-j");
    const SymplecticForm form = SymplecticForm::standard(2 * half_rank);
    const std::size_t n = 2 * half_rank;
    std::vector<Int> u(n, Int(0)), v(n, Int(0));
    u[interleaved_index(-i, half_rank)] = 1;
    v[interleaved_index(-j, half_rank)] = 1;
    IntMatrix t = IntMatrix::identity(n);
    std::vector<Int> ju(n, Int(0)), jv(n, Int(0));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (form.gram().at(a, b) == 0) continue;
            ju[a] += form.gram().at(a, b) * u[b];
            jv[a] += form.gram().at(a, b) * v[b];
        }
    const Int kz(k);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            Int add = ju[a] * v[b] + jv[a] * u[b];
            if (add != 0) t.set(a, b, t.at(a, b) + kz * add);
        }
    return t;
}

/// Characteristic polynomial over F_p, via the exact integer lift.
inline ModPolynomial char_poly_mod(const ModMatrix& m) {
    IntMatrix lift(m.dim());
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j)
            lift.set(i, j, Int(static_cast<unsigned long>(m.at(i, j))));
    return reduce_mod(lift.char_poly(), m.p());
}

}  // namespace prymsieve
