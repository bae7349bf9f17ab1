#pragma once

#include <cstdlib>
#include <string>
#include <vector>

#include "prymsieve/error.hpp"
#include "prymsieve/finite_group.hpp"
#include "prymsieve/matrix.hpp"
#include "prymsieve/surface.hpp"

namespace prymsieve {

/// The anti-invariant part H of the homology of the double cover obtained by
/// cutting along b_g: free of rank 2g-2 with ordered basis
/// z_1, z_{-1}, ..., z_{g-1}, z_{1-g} and halved form (z_i, z_{-i}) = 1 for
/// i > 0, all other pairings zero. That is exactly the standard interleaved
/// form, so the gram matrix is shared with the rest of the library.
class PrymModule {
public:
    explicit PrymModule(unsigned genus)
        : genus_(checked(genus)), form_(SymplecticForm::standard(2 * (genus - 1))) {}

    unsigned genus() const { return genus_; }
    std::size_t half_rank() const { return genus_ - 1; }
    std::size_t rank() const { return 2 * (static_cast<std::size_t>(genus_) - 1); }
    const SymplecticForm& form() const { return form_; }

    /// Position of z_i in the basis order (i in {+-1, ..., +-(g-1)}).
    std::size_t z_index(int i) const { return interleaved_index(i, half_rank()); }

    std::vector<Int> z_class(int i) const {
        std::vector<Int> v(rank(), Int(0));
        v[z_index(i)] = 1;
        return v;
    }

    std::string basis_label(std::size_t k) const {
        if (k >= rank()) throw config_error("basis label index out of range");
        const int i = static_cast<int>(k / 2) + 1;
        return "z" + std::to_string(k % 2 == 0 ? i : -i);
    }

private:
    static unsigned checked(unsigned g) {
        if (g < 3) throw config_error("PrymModule: genus must be >= 3");
        return g;
    }

    unsigned genus_;
    SymplecticForm form_;
};

/// Double covers of S correspond to index-2 subgroups of H_1(S, Z/2), so
/// there are 2^(2g) - 1 of them; only the cut along b_g is realized here.
struct CoverCatalog {
    unsigned genus = 0;
    Int cover_count;
    std::string implemented_cut;

    static CoverCatalog for_genus(unsigned g) {
        if (g < 2) throw config_error("CoverCatalog: genus must be >= 2");
        CoverCatalog c;
        c.genus = g;
        c.cover_count = int_pow(Int(2), 2 * g) - 1;
        c.implemented_cut = "b" + std::to_string(g);
        return c;
    }
};

/// T_i: h -> h + (h, z_{-i}) z_{-i}.
inline IntMatrix elementary_T(int i, const PrymModule& m) {
    return elementary_transvection_power(m.half_rank(), i, 1);
}

/// T_{i,j}: h -> h + (h, z_{-i}) z_{-j} + (h, z_{-j}) z_{-i}, i != +-j.
inline IntMatrix elementary_T_pair(int i, int j, const PrymModule& m) {
    return elementary_pair_power(m.half_rank(), i, j, 1);
}

/// Element of PSp(2g-2, Z): a symplectic matrix regarded up to sign, stored
/// as the canonical representative whose first nonzero entry (row-major) is
/// positive. Every predicate used on these is sign-invariant.
class PrymImage {
public:
    explicit PrymImage(IntMatrix m) : matrix_(canonical_sign(std::move(m))) {}

    const IntMatrix& matrix() const { return matrix_; }
    std::size_t dim() const { return matrix_.dim(); }

    static IntMatrix canonical_sign(IntMatrix m) {
        for (std::size_t i = 0; i < m.dim(); ++i)
            for (std::size_t j = 0; j < m.dim(); ++j) {
                const Int& v = m.at(i, j);
                if (v == 0) continue;
                return v > 0 ? std::move(m) : m.negated();
            }
        return m;
    }

    bool operator==(const PrymImage& o) const { return matrix_ == o.matrix_; }
    bool operator!=(const PrymImage& o) const { return !(*this == o); }

    friend PrymImage operator*(const PrymImage& a, const PrymImage& b) {
        return PrymImage(a.matrix_ * b.matrix_);
    }

    PrymImage inverse() const { return PrymImage(matrix_.inverse()); }

    ModMatrix reduce_mod(ModMatrix::Coeff p) const {
        return matrix_.reduce_mod(p).canonical_projective();
    }

    std::string to_string() const { return matrix_.to_string(); }

private:
    IntMatrix matrix_;
};

namespace detail {

inline void check_prym_pair_index(int i, std::size_t half_rank, const Letter& l) {
    if (i == 0 || static_cast<std::size_t>(std::abs(i)) > half_rank)
        throw config_error("index out of range for the Prym module in letter " + l.to_string());
}

}  // namespace detail

/// Image of a single Torelli letter under rho:
///   t^(i)    -> T_i^4
///   r^(i,j)  -> T_i^4 T_j^4 T_{i,j}^{-4}
///   u^(i,j)  -> T_{i,j}^4
/// with negative indices denoting the Delta-conjugated variants (conjugation
/// by Delta_i negates the index i in every factor). Exponent -1 inverts.
inline PrymImage rho_generator(const Letter& l, const PrymModule& m) {
    const std::size_t h = m.half_rank();
    const long e = 4L * l.exponent;
    switch (l.kind) {
        case LetterKind::TorelliT:
            detail::check_prym_pair_index(l.i, h, l);
            return PrymImage(elementary_transvection_power(h, l.i, e));
        case LetterKind::TorelliU:
            detail::check_prym_pair_index(l.i, h, l);
            detail::check_prym_pair_index(l.j, h, l);
            if (std::abs(l.i) == std::abs(l.j))
                throw config_error("invalid index pair in letter " + l.to_string());
            return PrymImage(elementary_pair_power(h, l.i, l.j, e));
        case LetterKind::TorelliR: {
            detail::check_prym_pair_index(l.i, h, l);
            detail::check_prym_pair_index(l.j, h, l);
            if (std::abs(l.i) == std::abs(l.j))
                throw config_error("invalid index pair in letter " + l.to_string());
            const IntMatrix ti = elementary_transvection_power(h, l.i, e);
            const IntMatrix tj = elementary_transvection_power(h, l.j, e);
            const IntMatrix tij = elementary_pair_power(h, l.i, l.j, -e);
            if (l.exponent == 1) return PrymImage(ti * tj * tij);
            return PrymImage(tij * tj * ti);
        }
        default:
            throw config_error("letter has no Prym image: " + l.to_string());
    }
}

/// Image of a word of Torelli letters, allowing balanced Delta-conjugation
/// frames: a Delta_i letter opens a frame (or closes the innermost one if it
/// is its exact inverse), and every Torelli letter inside has the sign of
/// index i flipped. Unbalanced frames, Delta_g (the cut handle), and
/// non-Torelli twist letters are outside the domain of rho and rejected.
inline PrymImage rho_word(const MCGWord& w, const PrymModule& m) {
    const std::size_t h = m.half_rank();
    std::vector<std::pair<int, int>> frames;  // (index, exponent)
    std::vector<unsigned> open(h + 1, 0);
    IntMatrix acc = IntMatrix::identity(m.rank());
    auto flip = [&](int idx) {
        return open[static_cast<std::size_t>(std::abs(idx))] % 2 == 0 ? idx : -idx;
    };
    for (const Letter& l : w.letters()) {
        switch (l.kind) {
            case LetterKind::Delta: {
                if (l.i < 1 || static_cast<std::size_t>(l.i) > h)
                    throw config_error("Delta index outside the Prym range in letter " +
                                       l.to_string());
                if (!frames.empty() && frames.back() == std::make_pair(l.i, -l.exponent)) {
                    frames.pop_back();
                    --open[static_cast<std::size_t>(l.i)];
                } else {
                    frames.emplace_back(l.i, l.exponent);
                    ++open[static_cast<std::size_t>(l.i)];
                }
                break;
            }
            case LetterKind::TorelliT:
            case LetterKind::TorelliR:
            case LetterKind::TorelliU: {
                Letter effective = l;
                effective.i = flip(l.i);
                if (l.kind != LetterKind::TorelliT) effective.j = flip(l.j);
                acc = acc * rho_generator(effective, m).matrix();
                break;
            }
            default:
                throw config_error("letter has no Prym image: " + l.to_string());
        }
    }
    if (!frames.empty())
        throw config_error("unbalanced Delta conjugation frames in word: " + w.to_string());
    return PrymImage(std::move(acc));
}

/// The full list of rho-generator letters for the module: t^(+-i), r^(i,j)
/// for i < j, and u with all four sign patterns per pair.
inline std::vector<Letter> prym_generator_letters(const PrymModule& m) {
    const int h = static_cast<int>(m.half_rank());
    std::vector<Letter> letters;
    for (int i = 1; i <= h; ++i) {
        letters.push_back(torelli_t(i));
        letters.push_back(torelli_t(-i));
    }
    for (int i = 1; i <= h; ++i)
        for (int j = i + 1; j <= h; ++j) {
            letters.push_back(torelli_r(i, j));
            letters.push_back(torelli_u(i, j));
            letters.push_back(torelli_u(-i, j));
            letters.push_back(torelli_u(i, -j));
            letters.push_back(torelli_u(-i, -j));
        }
    return letters;
}

struct GenerationWitness {
    bool full = false;           // closure equals all of PSp(2g-2, F_p)
    std::size_t closure_size = 0;
    Int target_order;
};

/// Empirical witness for the finite-index statement: the mod-p reductions of
/// the rho-generator images generate all of PSp(2g-2, F_p).
inline GenerationWitness image_generates_finite_index_mod_p(const PrymModule& m,
                                                            ModMatrix::Coeff p,
                                                            std::size_t budget = 10'000'000) {
    if (p < 3) throw config_error("image_generates_finite_index_mod_p: requires p >= 3");
    const FiniteGroupSpec spec(static_cast<unsigned>(m.half_rank()), p, true);
    GenerationWitness wit;
    wit.target_order = group_order(spec);
    if (wit.target_order > static_cast<unsigned long>(budget))
        throw budget_error("image_generates_finite_index_mod_p: " + spec.label() + " has order " +
                           wit.target_order.get_str() + ", over the budget of " +
                           std::to_string(budget));
    std::vector<ModMatrix> gens;
    for (const Letter& l : prym_generator_letters(m))
        gens.push_back(rho_generator(l, m).reduce_mod(p));
    const Closure c = bfs_closure(gens, {budget, true});
    wit.closure_size = c.size();
    wit.full = Int(static_cast<unsigned long>(c.size())) == wit.target_order;
    return wit;
}

}  // namespace prymsieve
