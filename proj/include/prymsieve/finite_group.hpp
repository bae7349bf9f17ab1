#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <iterator>
#include <string>
#include <vector>

#include "prymsieve/error.hpp"
#include "prymsieve/factor.hpp"
#include "prymsieve/matrix.hpp"
#include "prymsieve/mod_matrix.hpp"
#include "prymsieve/rng.hpp"
#include "prymsieve/stats.hpp"

namespace prymsieve {

inline bool is_prime_u32(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

/// Sp(2n, F_p), or PSp(2n, F_p) when projective (quotient by {+-I}).
class FiniteGroupSpec {
public:
    FiniteGroupSpec(unsigned n, ModMatrix::Coeff p, bool projective = false)
        : n_(n), p_(p), projective_(projective) {
        if (n < 1) throw config_error("FiniteGroupSpec: half-rank must be >= 1");
        if (!is_prime_u32(p)) throw config_error("FiniteGroupSpec: p = " + std::to_string(p) +
                                                 " is not prime");
    }

    unsigned n() const { return n_; }
    ModMatrix::Coeff p() const { return p_; }
    bool projective() const { return projective_; }
    std::size_t dim() const { return 2 * static_cast<std::size_t>(n_); }

    bool operator==(const FiniteGroupSpec& o) const {
        return n_ == o.n_ && p_ == o.p_ && projective_ == o.projective_;
    }

    std::string label() const {
        return std::string(projective_ ? "PSp" : "Sp") + "(" + std::to_string(2 * n_) + "," +
               std::to_string(p_) + ")";
    }

private:
    unsigned n_;
    ModMatrix::Coeff p_;
    bool projective_;
};

/// |Sp(2n,F_p)| = p^(n^2) * prod_{i=1..n} (p^(2i) - 1); PSp halves this for
/// odd p (|center| = 2), and equals Sp for p = 2.
inline Int group_order(const FiniteGroupSpec& spec) {
    const Int p(static_cast<unsigned long>(spec.p()));
    Int order = int_pow(p, static_cast<unsigned long>(spec.n()) * spec.n());
    for (unsigned i = 1; i <= spec.n(); ++i) order *= int_pow(p, 2 * i) - 1;
    if (spec.projective() && spec.p() != 2) order /= 2;
    return order;
}

/// Transvections along the interleaved basis vectors e_1,f_1,...,e_n,f_n plus
/// the chain vectors f_i - f_{i+1}. The pairing graph of these vectors is
/// connected and they span, so they generate the full group; the generation
/// tests pin this down against the order formula.
inline std::vector<ModMatrix> standard_transvection_generators(const FiniteGroupSpec& spec) {
    const std::size_t d = spec.dim();
    const SymplecticForm form = SymplecticForm::standard(d);
    std::vector<std::vector<Int>> vectors;
    for (std::size_t k = 0; k < d; ++k) {
        std::vector<Int> v(d, Int(0));
        v[k] = 1;
        vectors.push_back(std::move(v));
    }
    for (unsigned i = 1; i < spec.n(); ++i) {
        std::vector<Int> v(d, Int(0));
        v[2 * (i - 1) + 1] = 1;
        v[2 * i + 1] = -1;
        vectors.push_back(std::move(v));
    }
    std::vector<ModMatrix> gens;
    gens.reserve(vectors.size());
    for (const auto& v : vectors) gens.push_back(transvection(form, v).reduce_mod(spec.p()));
    return gens;
}

/// The set closed under inverse (and deduplicated); canonical projective
/// representatives when requested.
inline std::vector<ModMatrix> with_inverses(const std::vector<ModMatrix>& gens, bool projective) {
    std::vector<ModMatrix> out;
    auto push_unique = [&](ModMatrix m) {
        if (projective) m = m.canonical_projective();
        for (const auto& e : out)
            if (e == m) return;
        out.push_back(std::move(m));
    };
    for (const auto& g : gens) {
        push_unique(g);
        push_unique(g.inverse());
    }
    return out;
}

// --------------------------------------------------------------------------
// uniform sampling

namespace detail {

/// Uniformly random ordered symplectic basis for the alternating form with
/// the given nondegenerate gram matrix, written as rows of basis_out (k x k,
/// row-major). Recursion on the symplectic complement keeps every
/// conditional choice exactly uniform, so the induced group element is
/// exactly uniform over Sp.
inline void sample_symplectic_basis(const std::vector<std::uint32_t>& gram, std::size_t k,
                                    std::uint32_t p, Rng& rng,
                                    std::vector<std::uint32_t>& basis_out) {
    basis_out.assign(k * k, 0);
    if (k == 0) return;

    auto form_apply = [&](const std::uint32_t* x, const std::uint32_t* y) -> std::uint32_t {
        std::uint64_t acc = 0;
        for (std::size_t a = 0; a < k; ++a) {
            if (x[a] == 0) continue;
            std::uint64_t row = 0;
            for (std::size_t b = 0; b < k; ++b)
                row = (row + static_cast<std::uint64_t>(gram[a * k + b]) * y[b]) % p;
            acc = (acc + static_cast<std::uint64_t>(x[a]) * row) % p;
        }
        return static_cast<std::uint32_t>(acc);
    };

    std::vector<std::uint32_t> u(k), v(k);
    while (true) {
        bool nonzero = false;
        for (auto& c : u) {
            c = static_cast<std::uint32_t>(rng.below(p));
            nonzero = nonzero || c != 0;
        }
        if (nonzero) break;
    }
    while (true) {
        for (auto& c : v) c = static_cast<std::uint32_t>(rng.below(p));
        const std::uint32_t c = form_apply(u.data(), v.data());
        if (c == 0) continue;
        const std::uint64_t cinv = ModPolynomial::inv_mod(c, p);
        for (auto& x : v) x = static_cast<std::uint32_t>(x * cinv % p);
        break;
    }
    for (std::size_t b = 0; b < k; ++b) {
        basis_out[b] = u[b];
        basis_out[k + b] = v[b];
    }
    if (k == 2) return;

    // Functionals x -> (x,u) and x -> (x,v); their common kernel is the
    // symplectic complement of span(u, v).
    std::vector<std::uint32_t> rows(2 * k, 0);
    for (std::size_t a = 0; a < k; ++a) {
        std::uint64_t su = 0, sv = 0;
        for (std::size_t b = 0; b < k; ++b) {
            su = (su + static_cast<std::uint64_t>(gram[a * k + b]) * u[b]) % p;
            sv = (sv + static_cast<std::uint64_t>(gram[a * k + b]) * v[b]) % p;
        }
        rows[a] = static_cast<std::uint32_t>(su);
        rows[k + a] = static_cast<std::uint32_t>(sv);
    }
    // RREF of the 2 x k functional matrix.
    std::vector<std::size_t> pivots;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < k && rank < 2; ++col) {
        std::size_t piv = rank;
        while (piv < 2 && rows[piv * k + col] == 0) ++piv;
        if (piv == 2) continue;
        if (piv != rank)
            for (std::size_t j = 0; j < k; ++j) std::swap(rows[piv * k + j], rows[rank * k + j]);
        const std::uint64_t inv = ModPolynomial::inv_mod(rows[rank * k + col], p);
        for (std::size_t j = 0; j < k; ++j)
            rows[rank * k + j] = static_cast<std::uint32_t>(rows[rank * k + j] * inv % p);
        for (std::size_t r = 0; r < 2; ++r) {
            if (r == rank) continue;
            const std::uint64_t f = rows[r * k + col];
            if (f == 0) continue;
            for (std::size_t j = 0; j < k; ++j) {
                const std::uint64_t sub = f * rows[rank * k + j] % p;
                rows[r * k + j] =
                    static_cast<std::uint32_t>((rows[r * k + j] + p - sub) % p);
            }
        }
        pivots.push_back(col);
        ++rank;
    }
    if (rank != 2) throw error("sample_symplectic_basis: degenerate pair (internal)");

    const std::size_t m = k - 2;
    std::vector<std::uint32_t> comp(m * k, 0);  // rows: kernel basis
    std::size_t row = 0;
    for (std::size_t col = 0; col < k; ++col) {
        if (std::find(pivots.begin(), pivots.end(), col) != pivots.end()) continue;
        comp[row * k + col] = 1;
        for (std::size_t r = 0; r < 2; ++r) {
            const std::uint32_t c = rows[r * k + col];
            if (c != 0) comp[row * k + pivots[r]] = p - c;
        }
        ++row;
    }

    std::vector<std::uint32_t> sub_gram(m * m, 0);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            sub_gram[a * m + b] = form_apply(&comp[a * k], &comp[b * k]);

    std::vector<std::uint32_t> sub_basis;
    sample_symplectic_basis(sub_gram, m, p, rng, sub_basis);

    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t b = 0; b < k; ++b) {
            std::uint64_t acc = 0;
            for (std::size_t a = 0; a < m; ++a)
                acc = (acc + static_cast<std::uint64_t>(sub_basis[r * m + a]) * comp[a * k + b]) % p;
            basis_out[(2 + r) * k + b] = static_cast<std::uint32_t>(acc);
        }
    }
}

}  // namespace detail

/// Exactly uniform element of the group: the rows of the sampled matrix are a
/// uniformly random ordered symplectic basis, and Sp acts simply transitively
/// on those. For PSp the canonical sign representative of a uniform Sp
/// element is uniform on the quotient.
inline ModMatrix uniform_sample(const FiniteGroupSpec& spec, Rng& rng) {
    const std::size_t d = spec.dim();
    std::vector<std::uint32_t> gram(d * d, 0);
    for (std::size_t k = 0; k < d / 2; ++k) {
        gram[(2 * k) * d + 2 * k + 1] = 1;
        gram[(2 * k + 1) * d + 2 * k] = spec.p() - 1;
    }
    std::vector<std::uint32_t> basis;
    detail::sample_symplectic_basis(gram, d, spec.p(), rng, basis);
    ModMatrix m(d, spec.p());
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) m.set(i, j, basis[i * d + j]);
    if (spec.projective()) m = m.canonical_projective();
    return m;
}

// --------------------------------------------------------------------------
// BFS closure

struct ClosureOptions {
    std::size_t budget = 10'000'000;  // visited-element cap; exceeding reports
    bool projective = false;
};

/// Subgroup generated by a finite set of invertible mod-p matrices, as the
/// multiplicative closure (finite, so the semigroup closure is the subgroup).
/// Elements are stored as sorted packed keys: base-p 64-bit keys when
/// p^(dim^2) fits, raw little-endian byte strings otherwise.
class Closure {
public:
    std::size_t size() const { return packed_ ? keys_.size() : byte_keys_.size(); }
    std::size_t dim() const { return dim_; }
    ModMatrix::Coeff p() const { return p_; }
    bool projective() const { return projective_; }
    bool packed() const { return packed_; }

    const std::vector<std::uint64_t>& keys() const { return keys_; }

    bool contains(const ModMatrix& m) const {
        if (m.dim() != dim_ || m.p() != p_) return false;
        const ModMatrix c = projective_ ? m.canonical_projective() : m;
        if (packed_) return std::binary_search(keys_.begin(), keys_.end(), c.pack_u64());
        return std::binary_search(byte_keys_.begin(), byte_keys_.end(), encode_bytes(c));
    }

    std::size_t index_of(const ModMatrix& m) const {
        const ModMatrix c = projective_ ? m.canonical_projective() : m;
        if (packed_) {
            const auto it = std::lower_bound(keys_.begin(), keys_.end(), c.pack_u64());
            if (it == keys_.end() || *it != c.pack_u64())
                throw error("Closure::index_of: element not in closure");
            return static_cast<std::size_t>(it - keys_.begin());
        }
        const std::string k = encode_bytes(c);
        const auto it = std::lower_bound(byte_keys_.begin(), byte_keys_.end(), k);
        if (it == byte_keys_.end() || *it != k)
            throw error("Closure::index_of: element not in closure");
        return static_cast<std::size_t>(it - byte_keys_.begin());
    }

    ModMatrix element(std::size_t idx) const {
        if (idx >= size()) throw error("Closure::element: index out of range");
        if (packed_) return ModMatrix::unpack_u64(keys_[idx], dim_, p_);
        const std::string& s = byte_keys_[idx];
        ModMatrix m(dim_, p_);
        for (std::size_t k = 0; k < dim_ * dim_; ++k) {
            std::uint32_t v = 0;
            std::memcpy(&v, s.data() + k * 4, 4);
            m.set(k / dim_, k % dim_, v);
        }
        return m;
    }

private:
    friend Closure bfs_closure(const std::vector<ModMatrix>&, const ClosureOptions&);

    static std::string encode_bytes(const ModMatrix& m) {
        std::string s(m.dim() * m.dim() * 4, '\0');
        const auto& e = m.entries();
        for (std::size_t k = 0; k < e.size(); ++k) std::memcpy(&s[k * 4], &e[k], 4);
        return s;
    }

    std::size_t dim_ = 0;
    ModMatrix::Coeff p_ = 2;
    bool projective_ = false;
    bool packed_ = true;
    std::vector<std::uint64_t> keys_;
    std::vector<std::string> byte_keys_;
};

namespace detail {

/// Flat fixed-buffer multiply for the packed BFS hot loop (dim <= 8).
struct FlatOps {
    std::size_t dim;
    std::uint64_t p;
    bool reduce_each;

    FlatOps(std::size_t d, std::uint64_t prime)
        : dim(d), p(prime), reduce_each(prime >= (1ull << 16)) {}

    void mul(const std::uint32_t* a, const std::uint32_t* b, std::uint32_t* out) const {
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                std::uint64_t acc = 0;
                for (std::size_t k = 0; k < dim; ++k) {
                    acc += static_cast<std::uint64_t>(a[i * dim + k]) * b[k * dim + j];
                    if (reduce_each) acc %= p;
                }
                out[i * dim + j] = static_cast<std::uint32_t>(acc % p);
            }
        }
    }

    void canonicalize(std::uint32_t* m) const {
        if (p == 2) return;
        const std::uint64_t half = (p - 1) / 2;
        for (std::size_t k = 0; k < dim * dim; ++k) {
            if (m[k] == 0) continue;
            if (m[k] <= half) return;
            for (std::size_t t = 0; t < dim * dim; ++t)
                if (m[t] != 0) m[t] = static_cast<std::uint32_t>(p - m[t]);
            return;
        }
    }

    std::uint64_t pack(const std::uint32_t* m) const {
        std::uint64_t key = 0;
        for (std::size_t k = dim * dim; k-- > 0;) key = key * p + m[k];
        return key;
    }

    void unpack(std::uint64_t key, std::uint32_t* m) const {
        for (std::size_t k = 0; k < dim * dim; ++k) {
            m[k] = static_cast<std::uint32_t>(key % p);
            key /= p;
        }
    }
};

inline void sort_unique_u64(std::vector<std::uint64_t>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

inline void sort_unique_str(std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace detail

inline Closure bfs_closure(const std::vector<ModMatrix>& generators,
                           const ClosureOptions& opts = {}) {
    if (generators.empty()) throw config_error("bfs_closure: empty generating set");
    const std::size_t d = generators.front().dim();
    const ModMatrix::Coeff p = generators.front().p();
    for (const auto& g : generators)
        if (g.dim() != d || g.p() != p)
            throw config_error("bfs_closure: mixed dimensions or moduli");

    Closure result;
    result.dim_ = d;
    result.p_ = p;
    result.projective_ = opts.projective;
    result.packed_ = ModMatrix::packable_u64(d, p);

    const std::size_t dedupe_cap = 1u << 23;

    if (result.packed_) {
        const detail::FlatOps ops(d, p);
        std::vector<std::uint32_t> gen_flat(generators.size() * d * d);
        for (std::size_t g = 0; g < generators.size(); ++g) {
            const auto& e = generators[g].entries();
            std::copy(e.begin(), e.end(), gen_flat.begin() + static_cast<std::ptrdiff_t>(g * d * d));
        }
        std::vector<std::uint32_t> ident(d * d, 0);
        for (std::size_t i = 0; i < d; ++i) ident[i * d + i] = 1;

        std::vector<std::uint64_t>& visited = result.keys_;
        visited.push_back(ops.pack(ident.data()));
        std::vector<std::uint64_t> frontier = visited;

        std::vector<std::uint32_t> x(d * d), y(d * d);
        while (!frontier.empty()) {
            std::vector<std::uint64_t> acc;
            for (std::size_t g = 0; g < generators.size(); ++g) {
                const std::uint32_t* gm = gen_flat.data() + g * d * d;
                for (const std::uint64_t key : frontier) {
                    ops.unpack(key, x.data());
                    ops.mul(x.data(), gm, y.data());
                    if (opts.projective) ops.canonicalize(y.data());
                    acc.push_back(ops.pack(y.data()));
                }
                if (acc.size() > dedupe_cap) detail::sort_unique_u64(acc);
            }
            detail::sort_unique_u64(acc);
            std::vector<std::uint64_t> fresh;
            std::set_difference(acc.begin(), acc.end(), visited.begin(), visited.end(),
                                std::back_inserter(fresh));
            if (visited.size() + fresh.size() > opts.budget)
                throw budget_error("bfs_closure: budget of " + std::to_string(opts.budget) +
                                   " elements exceeded (at least " +
                                   std::to_string(visited.size() + fresh.size()) + " reached)");
            const std::size_t old = visited.size();
            visited.insert(visited.end(), fresh.begin(), fresh.end());
            std::inplace_merge(visited.begin(),
                               visited.begin() + static_cast<std::ptrdiff_t>(old), visited.end());
            frontier = std::move(fresh);
        }
        return result;
    }

    // generic byte-string path
    auto key_of = [&](const ModMatrix& m) {
        return Closure::encode_bytes(opts.projective ? m.canonical_projective() : m);
    };
    std::vector<std::string>& visited = result.byte_keys_;
    visited.push_back(key_of(ModMatrix::identity(d, p)));
    std::vector<std::string> frontier = visited;
    while (!frontier.empty()) {
        std::vector<std::string> acc;
        for (const auto& g : generators) {
            for (const auto& key : frontier) {
                ModMatrix m(d, p);
                for (std::size_t k = 0; k < d * d; ++k) {
                    std::uint32_t v = 0;
                    std::memcpy(&v, key.data() + k * 4, 4);
                    m.set(k / d, k % d, v);
                }
                acc.push_back(key_of(m * g));
            }
            if (acc.size() > dedupe_cap / 8) detail::sort_unique_str(acc);
        }
        detail::sort_unique_str(acc);
        std::vector<std::string> fresh;
        std::set_difference(acc.begin(), acc.end(), visited.begin(), visited.end(),
                            std::back_inserter(fresh));
        if (visited.size() + fresh.size() > opts.budget)
            throw budget_error("bfs_closure: budget of " + std::to_string(opts.budget) +
                               " elements exceeded (at least " +
                               std::to_string(visited.size() + fresh.size()) + " reached)");
        const std::size_t old = visited.size();
        frontier = fresh;
        visited.insert(visited.end(), std::make_move_iterator(fresh.begin()),
                       std::make_move_iterator(fresh.end()));
        std::inplace_merge(visited.begin(), visited.begin() + static_cast<std::ptrdiff_t>(old),
                           visited.end());
    }
    return result;
}

/// All elements of the group, via BFS from the standard generators; order is
/// checked against the formula so a generation bug cannot pass silently.
inline Closure enumerate_group(const FiniteGroupSpec& spec, std::size_t budget = 10'000'000) {
    const Int order = group_order(spec);
    if (order > static_cast<unsigned long>(budget))
        throw budget_error("enumerate_group: " + spec.label() + " has order " + order.get_str() +
                           ", over the budget of " + std::to_string(budget));
    Closure c = bfs_closure(standard_transvection_generators(spec),
                            {budget, spec.projective()});
    if (Int(static_cast<unsigned long>(c.size())) != order)
        throw error("enumerate_group: closure size " + std::to_string(c.size()) +
                    " does not match the order formula " + order.get_str());
    return c;
}

// --------------------------------------------------------------------------
// census

enum class CensusMode { Exhaustive, Sampled };

struct CensusResult {
    FiniteGroupSpec spec;
    CensusMode method;
    std::size_t total = 0;
    std::size_t reducible = 0;
    double density = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t seed = 0;
};

/// Reducibility over F_p of the characteristic polynomial. Well defined on
/// PSp representatives: char polys of M and -M differ by x -> -x, which
/// preserves reducibility.
inline bool char_poly_reducible(const ModMatrix& m) {
    return !is_irreducible_mod_p(char_poly_mod(m));
}

/// Fraction of group elements with reducible characteristic polynomial
/// (Chavdarov-type density). Exhaustive mode enumerates the group; sampled
/// mode draws exactly uniform elements on independent per-sample streams and
/// reports a 95% Wilson interval.
inline CensusResult reducible_density(const FiniteGroupSpec& spec, CensusMode mode,
                                      std::size_t samples = 0, std::uint64_t seed = 0,
                                      std::size_t budget = 10'000'000) {
    CensusResult r{spec, mode};
    if (mode == CensusMode::Exhaustive) {
        const Closure c = enumerate_group(spec, budget);
        r.total = c.size();
        for (std::size_t i = 0; i < c.size(); ++i)
            if (char_poly_reducible(c.element(i))) ++r.reducible;
        r.density = static_cast<double>(r.reducible) / static_cast<double>(r.total);
        r.ci_low = r.ci_high = r.density;
        return r;
    }
    if (samples == 0) throw config_error("reducible_density: sampled mode needs samples >= 1");
    r.seed = seed;
    r.total = samples;
    for (std::size_t i = 0; i < samples; ++i) {
        Rng rng(derive_seed(seed, stream::census, i));
        if (char_poly_reducible(uniform_sample(spec, rng))) ++r.reducible;
    }
    const Interval ci = wilson_interval(r.reducible, r.total);
    r.density = static_cast<double>(r.reducible) / static_cast<double>(r.total);
    r.ci_low = ci.low;
    r.ci_high = ci.high;
    return r;
}

// --------------------------------------------------------------------------
// spectral gap

struct GapOptions {
    std::size_t budget = 10'000'000;          // closure node budget
    std::size_t adjacency_budget = 100'000'000;  // nodes x degree entries
    bool projective = false;
    double tol = 1e-6;
    std::size_t max_iterations = 100'000;
    std::uint64_t seed = 1;
};

struct GapEstimate {
    double gap = 0.0;      // 1 - lambda_2 (signed), may exceed 1
    double lambda2 = 0.0;  // second-largest eigenvalue of the normalized adjacency
    std::size_t group_size = 0;
    std::size_t degree = 0;
    std::size_t iterations = 0;
};

/// Spectral gap 1 - lambda_2 of the normalized adjacency operator of the
/// Cayley graph. Power iteration runs on the lazy operator (P+I)/2 restricted
/// to the complement of constants; that operator is positive semidefinite, so
/// the iteration converges to the largest *signed* eigenvalue, which is what
/// expansion needs. Iteration stops when the Rayleigh quotient moves less
/// than tol.
inline GapEstimate cayley_spectral_gap(const std::vector<ModMatrix>& generators,
                                       const GapOptions& opts = {}) {
    if (generators.empty()) throw config_error("cayley_spectral_gap: empty generating set");
    // symmetry check (projective mode compares sign classes)
    for (const auto& g : generators) {
        ModMatrix inv = g.inverse();
        if (opts.projective) inv = inv.canonical_projective();
        bool found = false;
        for (const auto& h : generators) {
            const ModMatrix hh = opts.projective ? h.canonical_projective() : h;
            if (hh == inv) {
                found = true;
                break;
            }
        }
        if (!found)
            throw config_error("cayley_spectral_gap: generating set is not symmetric "
                               "(missing inverse of one generator)");
    }

    const Closure closure = bfs_closure(generators, {opts.budget, opts.projective});
    const std::size_t n = closure.size();
    const std::size_t deg = generators.size();
    GapEstimate est;
    est.group_size = n;
    est.degree = deg;
    if (n == 1) {
        est.gap = 1.0;
        est.lambda2 = 0.0;
        return est;
    }
    if (n * deg > opts.adjacency_budget)
        throw budget_error("cayley_spectral_gap: adjacency of " + std::to_string(n * deg) +
                           " entries exceeds budget " + std::to_string(opts.adjacency_budget));

    std::vector<std::uint32_t> nbr(n * deg);
    for (std::size_t i = 0; i < n; ++i) {
        const ModMatrix x = closure.element(i);
        for (std::size_t g = 0; g < deg; ++g)
            nbr[i * deg + g] = static_cast<std::uint32_t>(closure.index_of(x * generators[g]));
    }

    Rng rng(derive_seed(opts.seed, stream::spectral, 0));
    std::vector<double> v(n), w(n);
    for (auto& x : v) x = rng.unit() - 0.5;
    auto project = [&](std::vector<double>& vec) {
        double mean = 0;
        for (double x : vec) mean += x;
        mean /= static_cast<double>(n);
        double norm2 = 0;
        for (auto& x : vec) {
            x -= mean;
            norm2 += x * x;
        }
        return std::sqrt(norm2);
    };
    {
        const double norm = project(v);
        if (norm == 0) throw error("cayley_spectral_gap: degenerate start vector");
        for (auto& x : v) x /= norm;
    }

    double rayleigh_prev = 2.0;
    double rayleigh = 0.0;
    std::size_t it = 0;
    for (; it < opts.max_iterations; ++it) {
        const double inv_deg = 1.0 / static_cast<double>(deg);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0;
            for (std::size_t g = 0; g < deg; ++g) acc += v[nbr[i * deg + g]];
            w[i] = 0.5 * (acc * inv_deg + v[i]);
        }
        rayleigh = 0.0;
        for (std::size_t i = 0; i < n; ++i) rayleigh += v[i] * w[i];
        const double norm = project(w);
        if (norm < 1e-12) {
            // smoothed operator annihilates the complement of constants: lambda2 = -1
            rayleigh = std::max(rayleigh, 0.0);
            ++it;
            break;
        }
        for (auto& x : w) x /= norm;
        std::swap(v, w);
        if (std::fabs(rayleigh - rayleigh_prev) < opts.tol) {
            ++it;
            break;
        }
        rayleigh_prev = rayleigh;
        if (it + 1 == opts.max_iterations)
            throw error("cayley_spectral_gap: no convergence to tol " +
                        std::to_string(opts.tol) + " within " +
                        std::to_string(opts.max_iterations) + " iterations");
    }
    est.iterations = it;
    est.lambda2 = 2.0 * rayleigh - 1.0;
    est.gap = 1.0 - est.lambda2;
    return est;
}

}  // namespace prymsieve
