#include <catch2/catch_amalgamated.hpp>

#include <tentlab/lattice.hpp>

using namespace tentlab;

TEST_CASE("lattice constructor contracts", "[lattice]") {
    CHECK_THROWS_AS(Lattice(0, 0.5, 2.0), ContractViolation);
    CHECK_THROWS_AS(Lattice(1, 0.0, 2.0), ContractViolation);
    CHECK_THROWS_AS(Lattice(1, 1.0, 2.0), ContractViolation);
    CHECK_THROWS_AS(Lattice(1, 0.5, 0.0), ContractViolation);
    CHECK_THROWS_AS(Lattice(1, 0.5, 12.5), ContractViolation);
    CHECK_NOTHROW(Lattice(2, 0.5, 12.0));
}

TEST_CASE("one-variable construction is separated and covering", "[lattice]") {
    const Lattice L = build_lattice(1, 0.5, 2.0, 42);
    REQUIRE(L.size() > 1);
    // radial order
    for (std::size_t k = 1; k < L.size(); ++k) CHECK(L.beta0(k) >= L.beta0(k - 1) - 1e-12);
    const auto rep = verify_lattice(L, 5000, 42);
    CHECK(rep.covering_ok);
    CHECK(rep.min_pairwise_separation >= 0.25 - 1e-9);
    CHECK(rep.max_overlap_observed >= 1);
}

TEST_CASE("angular-window neighbor query agrees with brute force", "[lattice]") {
    const Lattice L = build_lattice(1, 0.5, 1.5, 7);
    Rng rng(3, stream_tag::generic, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const double rho = 0.97 * rng.uniform();
        const double theta = 2.0 * M_PI * rng.uniform();
        const BallPoint z(CVec{std::polar(rho, theta)});
        for (double d : {0.3, 0.7, 1.2}) {
            auto got = L.neighbors_within(z, d);
            std::sort(got.begin(), got.end());
            std::vector<std::size_t> want;
            for (std::size_t k = 0; k < L.size(); ++k)
                if (bergman_metric(z, L.point(k)) < d) want.push_back(k);
            CHECK(got == want);
        }
    }
}

TEST_CASE("two-variable construction is separated and covering", "[lattice]") {
    const Lattice L = build_lattice(2, 0.8, 2.0, 42);
    REQUIRE(L.size() > 10);
    CHECK(static_cast<double>(L.size()) <= lattice_size_upper_bound(2, 0.8, 2.0));
    const auto rep = verify_lattice(L, 2000, 42);
    CHECK(rep.covering_ok);
    CHECK(rep.min_pairwise_separation >= 0.4 - 1e-9);
}

TEST_CASE("predicted oversize lattices are rejected up front", "[lattice]") {
    CHECK_THROWS_AS(build_lattice(2, 0.05, 4.0, 1), ContractViolation);
}

TEST_CASE("size bound is monotone in the truncation radius", "[lattice]") {
    CHECK(lattice_size_upper_bound(1, 0.5, 1.0) < lattice_size_upper_bound(1, 0.5, 2.0));
    CHECK(lattice_size_upper_bound(2, 0.5, 1.0) > lattice_size_upper_bound(1, 0.5, 1.0));
}

TEST_CASE("invariant-ball sampler respects the radius cap", "[lattice]") {
    Rng rng(9, stream_tag::lattice, 5);
    for (int i = 0; i < 500; ++i) {
        const BallPoint z = sample_invariant_ball(2, 1.5, rng);
        CHECK(bergman_metric(BallPoint::origin(2), z) <= 1.5 + 1e-12);
    }
}
