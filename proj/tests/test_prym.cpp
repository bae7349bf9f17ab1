#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "prymsieve/prym.hpp"
#include "prymsieve/rng.hpp"

using namespace prymsieve;

namespace {

Letter random_torelli_letter(const PrymModule& m, Rng& rng) {
    const int h = static_cast<int>(m.half_rank());
    const int e = rng.below(2) == 0 ? 1 : -1;
    auto signed_index = [&] {
        const int i = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(h)));
        return rng.below(2) == 0 ? i : -i;
    };
    if (h == 1 || rng.below(3) == 0) return torelli_t(signed_index(), e);
    int i = signed_index(), j = signed_index();
    while (std::abs(i) == std::abs(j)) j = signed_index();
    return rng.below(2) == 0 ? torelli_r(i, j, e) : torelli_u(i, j, e);
}

MCGWord random_torelli_word(const PrymModule& m, Rng& rng, std::size_t len) {
    MCGWord w;
    for (std::size_t k = 0; k < len; ++k) w.append(random_torelli_letter(m, rng));
    return w;
}

}  // namespace

TEST_CASE("prym module basis and halved pairing") {
    const PrymModule m(3);
    REQUIRE(m.rank() == 4);
    REQUIRE(m.half_rank() == 2);
    REQUIRE(m.basis_label(0) == "z1");
    REQUIRE(m.basis_label(1) == "z-1");
    REQUIRE(m.basis_label(3) == "z-2");
    REQUIRE_THROWS_AS(PrymModule(2), config_error);
    for (int i = 1; i <= 2; ++i) {
        REQUIRE(m.form().pair(m.z_class(i), m.z_class(-i)) == 1);
        REQUIRE(m.form().pair(m.z_class(-i), m.z_class(i)) == -1);
        for (int j = 1; j <= 2; ++j) {
            if (j == i) continue;
            REQUIRE(m.form().pair(m.z_class(i), m.z_class(j)) == 0);
            REQUIRE(m.form().pair(m.z_class(i), m.z_class(-j)) == 0);
        }
    }
    REQUIRE(m.form().gram() == SymplecticForm::standard(4).gram());
}

TEST_CASE("cover catalog counts double covers") {
    const CoverCatalog c = CoverCatalog::for_genus(3);
    REQUIRE(c.cover_count == 63);
    REQUIRE(c.implemented_cut == "b3");
    REQUIRE(CoverCatalog::for_genus(2).cover_count == 15);
}

TEST_CASE("rho on generator letters") {
    const PrymModule m(3);
    // t^(i) -> T_i^4
    for (const int i : {1, -1, 2, -2}) {
        const PrymImage img = rho_generator(torelli_t(i), m);
        REQUIRE(img.matrix() == elementary_transvection_power(2, i, 4));
        REQUIRE(is_symplectic(img.matrix(), m.form()));
        const PrymImage inv = rho_generator(torelli_t(i, -1), m);
        REQUIRE((img * inv).matrix().is_identity());
    }
    // u^(i,j) -> T_{i,j}^4
    REQUIRE(rho_generator(torelli_u(1, 2), m).matrix() == elementary_pair_power(2, 1, 2, 4));
    REQUIRE(rho_generator(torelli_u(-1, 2), m).matrix() == elementary_pair_power(2, -1, 2, 4));
    // r^(i,j) -> T_i^4 T_j^4 T_{i,j}^{-4}
    const IntMatrix expect_r = elementary_transvection_power(2, 1, 4) *
                               elementary_transvection_power(2, 2, 4) *
                               elementary_pair_power(2, 1, 2, -4);
    REQUIRE(rho_generator(torelli_r(1, 2), m).matrix() == expect_r);
    REQUIRE((rho_generator(torelli_r(1, 2), m) * rho_generator(torelli_r(1, 2, -1), m))
                .matrix()
                .is_identity());

    REQUIRE_THROWS_AS(rho_generator(torelli_t(3), m), config_error);
    REQUIRE_THROWS_AS(rho_generator(torelli_u(1, -1), m), config_error);
    REQUIRE_THROWS_AS(rho_generator(twist_a(1), m), config_error);
}

TEST_CASE("rho images are symplectic on random words") {
    for (unsigned g = 3; g <= 5; ++g) {
        const PrymModule m(g);
        Rng rng(50 + g);
        for (int c = 0; c < 60; ++c) {
            const MCGWord w = random_torelli_word(m, rng, 1 + rng.below(10));
            const IntMatrix mat = rho_word(w, m).matrix();
            REQUIRE(is_symplectic(mat, m.form()));
        }
    }
}

TEST_CASE("rho is a homomorphism on Torelli words") {
    const PrymModule m(3);
    Rng rng(52);
    for (int c = 0; c < 60; ++c) {
        const MCGWord w1 = random_torelli_word(m, rng, rng.below(8));
        const MCGWord w2 = random_torelli_word(m, rng, rng.below(8));
        REQUIRE(rho_word(w1 * w2, m) == rho_word(w1, m) * rho_word(w2, m));
        REQUIRE(rho_word(w1.inverse(), m) == rho_word(w1, m).inverse());
    }
}

TEST_CASE("Delta conjugation frames flip index signs") {
    const PrymModule m(3);
    // conjugating t^(1) by Delta_1 gives t^(-1); Delta_1^{-1} agrees, because
    // Delta_1^2 acts as -1 on the handle and rho lands in PSp
    REQUIRE(rho_word(MCGWord::parse("Delta1 t1 Delta1^-1"), m) ==
            rho_generator(torelli_t(-1), m));
    REQUIRE(rho_word(MCGWord::parse("Delta1^-1 t1 Delta1"), m) ==
            rho_generator(torelli_t(-1), m));
    REQUIRE(rho_word(MCGWord::parse("Delta1^-1 u1,2 Delta1"), m) ==
            rho_generator(torelli_u(-1, 2), m));
    REQUIRE(rho_word(MCGWord::parse("Delta2^-1 u1,2 Delta2"), m) ==
            rho_generator(torelli_u(1, -2), m));
    REQUIRE(rho_word(MCGWord::parse("Delta1^-1 Delta2^-1 u1,2 Delta2 Delta1"), m) ==
            rho_generator(torelli_u(-1, -2), m));
    // double conjugation cancels
    REQUIRE(rho_word(MCGWord::parse("Delta1 Delta1^-1 t1"), m) ==
            rho_generator(torelli_t(1), m));
    REQUIRE(rho_word(MCGWord::parse("Delta1 Delta1 t1 Delta1^-1 Delta1^-1"), m) ==
            rho_generator(torelli_t(1), m));
    // unbalanced frames and the cut handle are rejected
    REQUIRE_THROWS_AS(rho_word(MCGWord::parse("Delta1 t1"), m), config_error);
    REQUIRE_THROWS_AS(rho_word(MCGWord::parse("Delta3 t1 Delta3^-1"), m), config_error);
    REQUIRE_THROWS_AS(rho_word(MCGWord::parse("Da1 Da1^-1"), m), config_error);
}

TEST_CASE("prym image canonical sign") {
    const PrymModule m(3);
    const IntMatrix t = elementary_transvection_power(2, 1, 4);
    REQUIRE(PrymImage(t) == PrymImage(t.negated()));
    REQUIRE(PrymImage(t).matrix() == t);
    REQUIRE(PrymImage(t.negated()).matrix() == t);
    REQUIRE(PrymImage(t).reduce_mod(5) == PrymImage(t.negated()).reduce_mod(5));
}

TEST_CASE("generator letter list") {
    const PrymModule m3(3);
    // h=2: 4 t letters + (r, 4 u) for the single pair
    REQUIRE(prym_generator_letters(m3).size() == 9);
    const PrymModule m4(4);
    // h=3: 6 t letters + 3 pairs * 5
    REQUIRE(prym_generator_letters(m4).size() == 21);
}

TEST_CASE("mod-p image generates the full projective symplectic group") {
    const PrymModule m(3);
    const GenerationWitness w = image_generates_finite_index_mod_p(m, 3);
    REQUIRE(w.target_order == 25920);
    REQUIRE(w.closure_size == 25920);
    REQUIRE(w.full);
    REQUIRE_THROWS_AS(image_generates_finite_index_mod_p(m, 2), config_error);
    REQUIRE_THROWS_AS(image_generates_finite_index_mod_p(m, 5, 1000), budget_error);
}
