#pragma once

#include <charconv>
#include <cstdlib>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "prymsieve/error.hpp"
#include "prymsieve/matrix.hpp"

namespace prymsieve {

/// Homology class in the a/b basis, as a row vector of 2g integers.
using HomologyClass = std::vector<Int>;

/// Closed surface of genus g with the symplectic basis a_1,b_1,...,a_g,b_g of
/// H_1(S,Z), interleaved so the gram matrix is the standard block form with
/// (a_i, b_i) = +1.
class SurfaceModel {
public:
    explicit SurfaceModel(unsigned genus)
        : genus_(checked(genus)), form_(SymplecticForm::standard(2 * genus)) {}

    unsigned genus() const { return genus_; }
    std::size_t dim() const { return 2 * static_cast<std::size_t>(genus_); }
    const SymplecticForm& form() const { return form_; }

    std::size_t a_index(unsigned i) const { return 2 * (checked_handle(i) - 1); }
    std::size_t b_index(unsigned i) const { return 2 * (checked_handle(i) - 1) + 1; }

    HomologyClass a_class(unsigned i) const { return basis_class(a_index(i)); }
    HomologyClass b_class(unsigned i) const { return basis_class(b_index(i)); }

    /// Class of the chain curve c_i joining handles i and i+1 (the extra
    /// Humphries-type twist curve); its class is b_i - b_{i+1}.
    HomologyClass chain_class(unsigned i) const {
        if (i < 1 || i + 1 > genus_)
            throw config_error("chain curve index out of range: " + std::to_string(i));
        HomologyClass c(dim(), Int(0));
        c[b_index(i)] = 1;
        c[b_index(i + 1)] = -1;
        return c;
    }

    HomologyClass zero_class() const { return HomologyClass(dim(), Int(0)); }

    std::string basis_label(std::size_t k) const {
        if (k >= dim()) throw config_error("basis label index out of range");
        return (k % 2 == 0 ? "a" : "b") + std::to_string(k / 2 + 1);
    }

private:
    static unsigned checked(unsigned g) {
        if (g < 2) throw config_error("SurfaceModel: genus must be >= 2");
        return g;
    }

    unsigned checked_handle(unsigned i) const {
        if (i < 1 || i > genus_)
            throw config_error("handle index out of range: " + std::to_string(i));
        return i;
    }

    HomologyClass basis_class(std::size_t k) const {
        HomologyClass c(dim(), Int(0));
        c[k] = 1;
        return c;
    }

    unsigned genus_;
    SymplecticForm form_;
};

/// Dehn twist action on homology: h -> h + (h, t) * t.
inline HomologyClass twist_action(const HomologyClass& c, const HomologyClass& t,
                                  const SymplecticForm& form) {
    const Int k = form.pair(c, t);
    HomologyClass r(c);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += k * t[i];
    return r;
}

/// Generator alphabet.
///   Da_i, Db_i          twists along the basis curves (i = 1..g)
///   Dc_i                twist along the chain curve (i = 1..g-1)
///   t^(i)               Torelli generator per handle pair, null-homologous
///                       (i = 1..g-1; negative i denotes the Delta-conjugated
///                       variant, still acting trivially on homology)
///   r^(i,j), u^(i,j)    Torelli generators per handle pair, null-homologous
///                       (signed indices, |i| != |j|, as for t)
///   Delta_i             the coordinate change D_{b_i} D_{a_i} D_{b_i}
enum class LetterKind { TwistA, TwistB, TwistChain, TorelliT, TorelliR, TorelliU, Delta };

struct Letter {
    LetterKind kind;
    int i = 0;
    int j = 0;         // second index, r/u only
    int exponent = 1;  // +1 or -1

    bool operator==(const Letter& o) const {
        return kind == o.kind && i == o.i && j == o.j && exponent == o.exponent;
    }

    Letter inverse() const { return {kind, i, j, -exponent}; }

    bool is_torelli_letter() const {
        return kind == LetterKind::TorelliT || kind == LetterKind::TorelliR ||
               kind == LetterKind::TorelliU;
    }

    std::string to_string() const {
        std::ostringstream out;
        switch (kind) {
            case LetterKind::TwistA: out << "Da" << i; break;
            case LetterKind::TwistB: out << "Db" << i; break;
            case LetterKind::TwistChain: out << "Dc" << i; break;
            case LetterKind::TorelliT: out << "t" << i; break;
            case LetterKind::TorelliR: out << "r" << i << "," << j; break;
            case LetterKind::TorelliU: out << "u" << i << "," << j; break;
            case LetterKind::Delta: out << "Delta" << i; break;
        }
        if (exponent == -1) out << "^-1";
        return out.str();
    }
};

inline Letter twist_a(int i, int e = 1) { return {LetterKind::TwistA, i, 0, e}; }
inline Letter twist_b(int i, int e = 1) { return {LetterKind::TwistB, i, 0, e}; }
inline Letter twist_chain(int i, int e = 1) { return {LetterKind::TwistChain, i, 0, e}; }
inline Letter torelli_t(int i, int e = 1) { return {LetterKind::TorelliT, i, 0, e}; }
inline Letter torelli_r(int i, int j, int e = 1) { return {LetterKind::TorelliR, i, j, e}; }
inline Letter torelli_u(int i, int j, int e = 1) { return {LetterKind::TorelliU, i, j, e}; }
inline Letter delta(int i, int e = 1) { return {LetterKind::Delta, i, 0, e}; }

namespace detail {

inline int parse_int_token(std::string_view s, const std::string& token) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw config_error("cannot parse index in word token: " + token);
    return value;
}

}  // namespace detail

/// Word in the generator alphabet, applied left to right.
class MCGWord {
public:
    MCGWord() = default;
    explicit MCGWord(std::vector<Letter> letters) : letters_(std::move(letters)) {}
    MCGWord(std::initializer_list<Letter> letters) : letters_(letters) {}

    const std::vector<Letter>& letters() const { return letters_; }
    std::size_t size() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }

    void append(Letter l) { letters_.push_back(l); }

    friend MCGWord operator*(const MCGWord& a, const MCGWord& b) {
        MCGWord w(a.letters_);
        w.letters_.insert(w.letters_.end(), b.letters_.begin(), b.letters_.end());
        return w;
    }

    MCGWord inverse() const {
        MCGWord w;
        w.letters_.reserve(letters_.size());
        for (std::size_t k = letters_.size(); k-- > 0;) w.letters_.push_back(letters_[k].inverse());
        return w;
    }

    bool operator==(const MCGWord& o) const { return letters_ == o.letters_; }

    std::string to_string() const {
        std::ostringstream out;
        for (std::size_t k = 0; k < letters_.size(); ++k) {
            if (k) out << " ";
            out << letters_[k].to_string();
        }
        return out.str();
    }

    /// Whitespace separated tokens, e.g. "Da1 Db1 Da1 t1 r1,2 Delta2^-1".
    /// "r12" with two positive single-digit indices is accepted as "r1,2".
    static MCGWord parse(const std::string& text) {
        MCGWord w;
        std::istringstream in(text);
        std::string token;
        while (in >> token) w.append(parse_letter(token));
        return w;
    }

    static Letter parse_letter(const std::string& token) {
        std::string_view s(token);
        int exponent = 1;
        if (const auto caret = s.find('^'); caret != std::string_view::npos) {
            const int e = detail::parse_int_token(s.substr(caret + 1), token);
            if (e != 1 && e != -1)
                throw config_error("letter exponent must be +-1 in token: " + token);
            exponent = e;
            s = s.substr(0, caret);
        }
        auto one_index = [&](std::string_view rest, LetterKind kind) {
            return Letter{kind, detail::parse_int_token(rest, token), 0, exponent};
        };
        auto two_index = [&](std::string_view rest, LetterKind kind) {
            const auto comma = rest.find(',');
            int i, j;
            if (comma != std::string_view::npos) {
                i = detail::parse_int_token(rest.substr(0, comma), token);
                j = detail::parse_int_token(rest.substr(comma + 1), token);
            } else if (rest.size() == 2) {
                i = detail::parse_int_token(rest.substr(0, 1), token);
                j = detail::parse_int_token(rest.substr(1, 1), token);
            } else {
                throw config_error("pair letter needs two indices in token: " + token);
            }
            return Letter{kind, i, j, exponent};
        };
        if (s.rfind("Delta", 0) == 0) return one_index(s.substr(5), LetterKind::Delta);
        if (s.rfind("Da", 0) == 0) return one_index(s.substr(2), LetterKind::TwistA);
        if (s.rfind("Db", 0) == 0) return one_index(s.substr(2), LetterKind::TwistB);
        if (s.rfind("Dc", 0) == 0) return one_index(s.substr(2), LetterKind::TwistChain);
        if (!s.empty() && s[0] == 't') return one_index(s.substr(1), LetterKind::TorelliT);
        if (!s.empty() && s[0] == 'r') return two_index(s.substr(1), LetterKind::TorelliR);
        if (!s.empty() && s[0] == 'u') return two_index(s.substr(1), LetterKind::TorelliU);
        throw config_error("unknown word token: " + token);
    }

private:
    std::vector<Letter> letters_;
};

namespace detail {

inline void check_letter(const Letter& l, const SurfaceModel& s) {
    const int g = static_cast<int>(s.genus());
    auto in_handle_range = [&](int i) { return i >= 1 && i <= g; };
    auto in_pair_range = [&](int i) { return i != 0 && std::abs(i) <= g - 1; };
    switch (l.kind) {
        case LetterKind::TwistA:
        case LetterKind::TwistB:
        case LetterKind::Delta:
            if (!in_handle_range(l.i))
                throw config_error("index out of range in letter " + l.to_string());
            break;
        case LetterKind::TwistChain:
            if (l.i < 1 || l.i > g - 1)
                throw config_error("index out of range in letter " + l.to_string());
            break;
        case LetterKind::TorelliT:
            if (!in_pair_range(l.i))
                throw config_error("index out of range in letter " + l.to_string());
            break;
        case LetterKind::TorelliR:
        case LetterKind::TorelliU:
            if (!in_pair_range(l.i) || !in_pair_range(l.j) || std::abs(l.i) == std::abs(l.j))
                throw config_error("invalid index pair in letter " + l.to_string());
            break;
    }
    if (l.exponent != 1 && l.exponent != -1)
        throw config_error("letter exponent must be +-1 in " + l.to_string());
}

}  // namespace detail

/// Matrix of one letter acting on H_1(S,Z) (row convention). Torelli letters
/// act trivially: their curves are null-homologous.
inline IntMatrix letter_homology_matrix(const Letter& l, const SurfaceModel& s) {
    detail::check_letter(l, s);
    const unsigned i = static_cast<unsigned>(std::abs(l.i));
    switch (l.kind) {
        case LetterKind::TwistA:
            return transvection_power(s.form(), s.a_class(i), l.exponent);
        case LetterKind::TwistB:
            return transvection_power(s.form(), s.b_class(i), l.exponent);
        case LetterKind::TwistChain:
            return transvection_power(s.form(), s.chain_class(i), l.exponent);
        case LetterKind::TorelliT:
        case LetterKind::TorelliR:
        case LetterKind::TorelliU:
            return IntMatrix::identity(s.dim());
        case LetterKind::Delta: {
            // D_{b_i} D_{a_i} D_{b_i}; a palindrome, so the exponent just
            // inverts each twist.
            const IntMatrix tb = transvection_power(s.form(), s.b_class(i), l.exponent);
            const IntMatrix ta = transvection_power(s.form(), s.a_class(i), l.exponent);
            return tb * ta * tb;
        }
    }
    throw error("unreachable letter kind");
}

/// Image of the word under gamma: MCG(S) -> Sp(H_1(S,Z)), as the product of
/// the per-letter matrices in word order.
inline IntMatrix homology_matrix(const MCGWord& w, const SurfaceModel& s) {
    IntMatrix m = IntMatrix::identity(s.dim());
    for (const Letter& l : w.letters()) m = m * letter_homology_matrix(l, s);
    return m;
}

/// Torelli membership: trivial action on homology.
inline bool is_torelli(const MCGWord& w, const SurfaceModel& s) {
    return homology_matrix(w, s).is_identity();
}

}  // namespace prymsieve
