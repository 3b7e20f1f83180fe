#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fluxladder/basis.hpp"
#include "fluxladder/errors.hpp"
#include "fluxladder/state.hpp"
#include "oracle/dense_reference.hpp"

using namespace fluxladder;

TEST_CASE("basis counts match the recursive counting oracle") {
    CHECK(build_basis(8, 4, 1)->dim() == 70);
    CHECK(build_basis(8, 4, 4)->dim() == 330);
    CHECK(build_basis(8, 4, 2)->dim() == 266);
    for (int n = 1; n <= 8; ++n)
        for (int total = 0; total <= 4; ++total)
            for (int n_max = 1; n_max <= 4; ++n_max) {
                if (total > n * n_max) continue;
                CAPTURE(n);
                CAPTURE(total);
                CAPTURE(n_max);
                CHECK(build_basis(n, total, n_max)->dim() == oracle::count_states(n, total, n_max));
            }
}

TEST_CASE("states are canonically ordered and the index round-trips") {
    auto basis = build_basis(6, 3, 2);
    for (std::size_t k = 1; k < basis->dim(); ++k) {
        auto prev = basis->state(k - 1);
        auto cur = basis->state(k);
        // descending lexicographic
        CHECK(std::lexicographical_compare(cur.begin(), cur.end(), prev.begin(), prev.end()));
    }
    for (std::size_t k = 0; k < basis->dim(); ++k) {
        auto idx = basis->find(basis->state(k));
        REQUIRE(idx.has_value());
        CHECK(*idx == k);
    }
    CHECK_FALSE(basis->find(Occupation{3, 0, 0, 0, 0, 0}).has_value());  // over cutoff
    CHECK_FALSE(basis->find(Occupation{1, 1, 0, 0, 0, 0}).has_value());  // wrong total
}

TEST_CASE("invalid bounds are rejected") {
    CHECK_THROWS_AS(build_basis(4, -1, 1), Error);
    CHECK_THROWS_AS(build_basis(4, 5, 1), Error);
    CHECK_THROWS_AS(build_basis(4, 1, 0), Error);
}

TEST_CASE("occupation strings serialize site 1 first") {
    auto basis = build_basis(8, 4, 1);
    const auto idx = basis->find(parse_occupation_string("10010011"));
    REQUIRE(idx.has_value());
    CHECK(basis->state_string(*idx) == "10010011");
}

TEST_CASE("multi-sector basis concatenates number sectors") {
    auto multi = build_multi_sector_basis(8, 4, 4);
    CHECK(multi->dim() == 495);  // 1 + 8 + 36 + 120 + 330
    CHECK(multi->sector_offset(0) == 0);
    CHECK(multi->sector_dim(4) == 330);
    std::size_t expected = 0;
    for (int total = 0; total <= 4; ++total) expected += multi->sector_dim(total);
    CHECK(expected == multi->dim());
    for (std::size_t k = 0; k < multi->dim(); k += 7) {
        auto idx = multi->find(multi->state(k));
        REQUIRE(idx.has_value());
        CHECK(*idx == k);
    }
}

TEST_CASE("apply_hop moves a particle with the bosonic factor") {
    auto basis = build_basis(2, 1, 1);
    const StateVector in = product_state(basis, {0, 1});
    const StateVector out = apply_hop(in, 1, 2, 1.0);
    CHECK(out.amplitudes()(static_cast<Eigen::Index>(*basis->find(Occupation{1, 0}))) ==
          Complex(1.0, 0.0));

    auto soft = build_basis(2, 2, 2);
    const StateVector both = product_state(soft, {1, 1});
    const StateVector raised = apply_hop(both, 1, 2, 1.0);
    CHECK(raised.amplitudes()(static_cast<Eigen::Index>(*soft->find(Occupation{2, 0}))).real() ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    auto hard = build_basis(2, 2, 1);
    const StateVector blocked = apply_hop(product_state(hard, {1, 1}), 1, 2, 1.0);
    CHECK(blocked.norm() == 0.0);  // cutoff annihilates
}

TEST_CASE("apply_hop matrix elements satisfy the adjoint relation") {
    auto basis = build_basis(4, 2, 2);
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        const int i = 1 + static_cast<int>(rng() % 4);
        int j = 1 + static_cast<int>(rng() % 4);
        if (i == j) j = (j % 4) + 1;
        const auto m = rng() % basis->dim();
        const auto n = rng() % basis->dim();
        StateVector em(basis), en(basis);
        em.amplitudes()(static_cast<Eigen::Index>(m)) = 1.0;
        en.amplitudes()(static_cast<Eigen::Index>(n)) = 1.0;
        const Complex fwd = inner(em, apply_hop(en, i, j, 1.0));
        const Complex bwd = inner(en, apply_hop(em, j, i, 1.0));
        CHECK(std::abs(fwd - std::conj(bwd)) < 1e-14);
    }
}

TEST_CASE("inner product and expectations behave") {
    auto basis = build_basis(2, 1, 1);
    StateVector x(basis);
    x.amplitudes() << Complex(M_SQRT1_2, 0.0), Complex(0.0, M_SQRT1_2);
    CHECK(inner(x, x).real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(x.site_population(1) == doctest::Approx(0.5).epsilon(1e-14));

    auto other = build_basis(3, 1, 1);
    StateVector y(other);
    CHECK_THROWS_AS((void)inner(x, y), Error);
    CHECK_THROWS_AS((void)apply_hop(x, 1, 1, 1.0), Error);
    CHECK_THROWS_AS((void)apply_hop(x, 0, 2, 1.0), Error);
}
