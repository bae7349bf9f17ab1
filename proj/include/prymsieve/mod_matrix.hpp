#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "prymsieve/error.hpp"

namespace prymsieve {

/// Square matrix over F_p, entries reduced into [0, p). Same row-vector
/// convention as IntMatrix: vectors act on the left, h -> h*M.
class ModMatrix {
public:
    using Coeff = std::uint32_t;

    ModMatrix(std::size_t dim, Coeff p) : dim_(dim), p_(p), e_(dim * dim, 0) {
        if (dim == 0) throw config_error("ModMatrix: dimension must be positive");
        if (p < 2) throw config_error("ModMatrix: modulus must be >= 2");
    }

    static ModMatrix identity(std::size_t dim, Coeff p) {
        ModMatrix m(dim, p);
        for (std::size_t i = 0; i < dim; ++i) m.set(i, i, 1);
        return m;
    }

    std::size_t dim() const { return dim_; }
    Coeff p() const { return p_; }

    Coeff at(std::size_t i, std::size_t j) const { return e_[i * dim_ + j]; }
    void set(std::size_t i, std::size_t j, Coeff v) { e_[i * dim_ + j] = v % p_; }

    const std::vector<Coeff>& entries() const { return e_; }

    bool operator==(const ModMatrix& o) const {
        return dim_ == o.dim_ && p_ == o.p_ && e_ == o.e_;
    }
    bool operator!=(const ModMatrix& o) const { return !(*this == o); }

    bool is_identity() const {
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j)
                if (at(i, j) != (i == j ? 1u : 0u)) return false;
        return true;
    }

    friend ModMatrix operator*(const ModMatrix& a, const ModMatrix& b) {
        if (a.dim_ != b.dim_) throw config_error("ModMatrix multiply: dimension mismatch");
        if (a.p_ != b.p_) throw config_error("ModMatrix multiply: modulus mismatch");
        const std::size_t n = a.dim_;
        ModMatrix r(n, a.p_);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                std::uint64_t acc = 0;
                for (std::size_t k = 0; k < n; ++k) {
                    acc += static_cast<std::uint64_t>(a.e_[i * n + k]) * b.e_[k * n + j];
                    if (a.p_ >= (1u << 16)) acc %= a.p_;
                }
                r.e_[i * n + j] = static_cast<Coeff>(acc % a.p_);
            }
        }
        return r;
    }

    ModMatrix transpose() const {
        ModMatrix r(dim_, p_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) r.e_[j * dim_ + i] = e_[i * dim_ + j];
        return r;
    }

    ModMatrix negated() const {
        ModMatrix r(dim_, p_);
        for (std::size_t k = 0; k < e_.size(); ++k)
            r.e_[k] = e_[k] == 0 ? 0 : p_ - e_[k];
        return r;
    }

    /// Canonical representative of {M, -M}: first nonzero entry in row-major
    /// order lies in [1, (p-1)/2]. Identity operation when p = 2.
    ModMatrix canonical_projective() const {
        if (p_ == 2) return *this;
        for (const Coeff v : e_) {
            if (v == 0) continue;
            return v <= (p_ - 1) / 2 ? *this : negated();
        }
        return *this;  // zero matrix; not a group element anyway
    }

    /// Inverse over F_p via Gauss-Jordan. Throws if singular.
    ModMatrix inverse() const {
        const std::size_t n = dim_;
        std::vector<std::uint64_t> a(n * 2 * n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) a[i * 2 * n + j] = at(i, j);
            a[i * 2 * n + n + i] = 1;
        }
        auto inv = [&](std::uint64_t v) {
            std::int64_t t = 0, nt = 1, r = p_, nr = static_cast<std::int64_t>(v % p_);
            while (nr != 0) {
                std::int64_t q = r / nr;
                std::int64_t tmp = t - q * nt; t = nt; nt = tmp;
                tmp = r - q * nr; r = nr; nr = tmp;
            }
            if (r != 1) throw config_error("ModMatrix inverse: singular matrix");
            return static_cast<std::uint64_t>(t < 0 ? t + p_ : t);
        };
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t piv = col;
            while (piv < n && a[piv * 2 * n + col] % p_ == 0) ++piv;
            if (piv == n) throw config_error("ModMatrix inverse: singular matrix");
            if (piv != col)
                for (std::size_t j = 0; j < 2 * n; ++j) std::swap(a[piv * 2 * n + j], a[col * 2 * n + j]);
            const std::uint64_t pivinv = inv(a[col * 2 * n + col]);
            for (std::size_t j = 0; j < 2 * n; ++j)
                a[col * 2 * n + j] = a[col * 2 * n + j] % p_ * pivinv % p_;
            for (std::size_t i = 0; i < n; ++i) {
                if (i == col) continue;
                const std::uint64_t f = a[i * 2 * n + col] % p_;
                if (f == 0) continue;
                for (std::size_t j = 0; j < 2 * n; ++j) {
                    std::uint64_t sub = f * a[col * 2 * n + j] % p_;
                    a[i * 2 * n + j] = (a[i * 2 * n + j] % p_ + p_ - sub) % p_;
                }
            }
        }
        ModMatrix r(n, p_);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                r.set(i, j, static_cast<Coeff>(a[i * 2 * n + n + j] % p_));
        return r;
    }

    /// True iff p^(dim^2) fits in 64 bits, i.e. pack_u64 is available.
    static bool packable_u64(std::size_t dim, Coeff p) {
        std::uint64_t cap = 1;
        for (std::size_t k = 0; k < dim * dim; ++k) {
            if (cap > (~std::uint64_t{0}) / p) return false;
            cap *= p;
        }
        return true;
    }

    /// Base-p packing of the row-major entries into one 64-bit key.
    std::uint64_t pack_u64() const {
        std::uint64_t key = 0;
        for (std::size_t k = e_.size(); k-- > 0;) key = key * p_ + e_[k];
        return key;
    }

    static ModMatrix unpack_u64(std::uint64_t key, std::size_t dim, Coeff p) {
        ModMatrix m(dim, p);
        for (std::size_t k = 0; k < dim * dim; ++k) {
            m.e_[k] = static_cast<Coeff>(key % p);
            key /= p;
        }
        return m;
    }

    /// Canonical byte encoding, one byte per entry; requires p < 256.
    std::string pack_bytes() const {
        if (p_ >= 256) throw config_error("pack_bytes: requires p < 256");
        std::string s(e_.size(), '\0');
        for (std::size_t k = 0; k < e_.size(); ++k) s[k] = static_cast<char>(e_[k]);
        return s;
    }

    std::string to_string() const {
        std::ostringstream out;
        for (std::size_t i = 0; i < dim_; ++i) {
            for (std::size_t j = 0; j < dim_; ++j) {
                if (j) out << " ";
                out << at(i, j);
            }
            out << "\n";
        }
        return out.str();
    }

private:
    std::size_t dim_;
    Coeff p_;
    std::vector<Coeff> e_;
};

}  // namespace prymsieve
