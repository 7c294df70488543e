#include <catch2/catch_amalgamated.hpp>

#include <tentlab/functions.hpp>

using namespace tentlab;

TEST_CASE("random sign functions on dyadic intervals", "[functions]") {
    CHECK(rademacher(1, 0.25) == 1);
    CHECK(rademacher(1, 0.75) == -1);
    CHECK(rademacher(2, 0.1) == 1);
    CHECK(rademacher(2, 0.3) == -1);
    CHECK(rademacher(2, 0.6) == 1);
    CHECK(rademacher(2, 0.9) == -1);
    CHECK(rademacher(3, 0.5) == 1);  // zero of the sine: +1 by convention
    CHECK(rademacher(1, 0.0) == 1);
    CHECK_THROWS_AS(rademacher(0, 0.5), ContractViolation);
    CHECK_THROWS_AS(rademacher(1, 1.0), ContractViolation);
}

TEST_CASE("polynomial evaluation and contracts", "[functions]") {
    // f(z1, z2) = 2 + 3i z1^2 z2
    const HoloFunction f =
        HoloFunction::polynomial({{{0, 0}, 2.0}, {{2, 1}, cdouble{0.0, 3.0}}}, 2);
    const BallPoint z(CVec{cdouble{0.3, 0.1}, cdouble{0.2, -0.2}});
    const cdouble z1 = z.coords()[0], z2 = z.coords()[1];
    CHECK(std::abs(evaluate(f, z) - (2.0 + cdouble{0.0, 3.0} * z1 * z1 * z2)) < 1e-14);
    CHECK(f.dim() == 2);
    CHECK_THROWS_AS(HoloFunction::polynomial({{{1}, 1.0}}, 2), ContractViolation);
    CHECK_THROWS_AS(HoloFunction::polynomial({{{-1, 0}, 1.0}}, 2), ContractViolation);
    CHECK_THROWS_AS(evaluate(f, BallPoint::origin(1)), ContractViolation);
}

TEST_CASE("kernel powers use the principal branch", "[functions]") {
    CHECK(std::abs(kernel_power(cdouble{0.5, 0.0}, 2.0) - 4.0) < 1e-14);
    const cdouble w{0.8, 0.3};
    CHECK(std::abs(kernel_power(w, 1.7) - std::pow(w, cdouble{-1.7, 0.0})) < 1e-13);
}

TEST_CASE("kernel family evaluation matches its formula", "[functions]") {
    const BallPoint a(CVec{cdouble{0.6, 0.2}});
    const double theta = 1.2, alpha = 0.5, q = 2.0, p = 3.0;
    const HoloFunction f = HoloFunction::make_fa(a, theta, alpha, q, p);
    const double e = theta + (1.0 + 1.0 + alpha) / q + 1.0 / p;
    const BallPoint z(CVec{cdouble{0.4, -0.3}});
    const cdouble om = 1.0 - z.coords()[0] * std::conj(a.coords()[0]);
    const cdouble expect = std::pow(a.one_minus_sq(), theta) * std::exp(-e * std::log(om));
    CHECK(std::abs(evaluate(f, z) - expect) < 1e-13);
    CHECK_THROWS_AS(HoloFunction::make_fa(a, 0.0, 0.0, 2.0, 2.0), ContractViolation);
}

TEST_CASE("boundary kernel and its singular direction", "[functions]") {
    const SpherePoint zeta(CVec{std::polar(1.0, 0.4)});
    const HoloFunction g = HoloFunction::make_g(zeta, 1.4);
    const BallPoint z(CVec{cdouble{0.5, 0.1}});
    const cdouble om = 1.0 - z.coords()[0] * std::conj(zeta.coords()[0]);
    CHECK(std::abs(evaluate(g, z) - std::exp(-1.4 * std::log(om))) < 1e-13);
    const auto sing = singular_directions(g);
    REQUIRE(sing.size() == 1);
    CHECK(std::abs(sing[0].coords()[0] - zeta.coords()[0]) < 1e-14);

    const BallPoint a(CVec{cdouble{0.0, 0.8}});
    const auto sfa = singular_directions(HoloFunction::make_fa(a, 1.0, 0.0, 2.0, 2.0));
    REQUIRE(sfa.size() == 1);
    CHECK(std::abs(sfa[0].coords()[0] - cdouble{0.0, 1.0}) < 1e-13);
    CHECK(singular_directions(HoloFunction::constant(1.0, 1)).empty());
}

TEST_CASE("lattice sums and their sign-randomized variants", "[functions]") {
    auto Z = std::make_shared<Lattice>(build_lattice(1, 0.6, 1.0, 3));
    REQUIRE(Z->size() >= 2);
    CVec lam(Z->size());
    for (std::size_t k = 0; k < lam.size(); ++k) lam[k] = cdouble(1.0 + k, 0.5);
    const double theta = 2.0, alpha = 0.0, q = 2.0;
    const HoloFunction S = HoloFunction::lattice_sum(Z, lam, theta, alpha, q);
    const BallPoint z(CVec{cdouble{0.3, 0.3}});
    cdouble manual = 0.0;
    const double e = theta + 2.0 / q;
    for (std::size_t k = 0; k < Z->size(); ++k) {
        const cdouble om = 1.0 - z.coords()[0] * std::conj(Z->point(k).coords()[0]);
        manual += lam[k] * std::pow(Z->point(k).one_minus_sq(), theta) * std::exp(-e * std::log(om));
    }
    CHECK(std::abs(evaluate(S, z) - manual) < 1e-12);

    // signs are indexed from k = 1
    const double tau = 0.3;
    const HoloFunction F = HoloFunction::rademacher_sum(LatticeSum{Z, lam, theta, alpha, q}, tau);
    cdouble manual_signed = 0.0;
    for (std::size_t k = 0; k < Z->size(); ++k) {
        const cdouble om = 1.0 - z.coords()[0] * std::conj(Z->point(k).coords()[0]);
        const double sgn = rademacher(static_cast<int>(k) + 1, tau);
        manual_signed +=
            sgn * lam[k] * std::pow(Z->point(k).one_minus_sq(), theta) * std::exp(-e * std::log(om));
    }
    CHECK(std::abs(evaluate(F, z) - manual_signed) < 1e-12);

    CHECK_THROWS_AS(HoloFunction::lattice_sum(Z, CVec{1.0}, theta, alpha, q), ContractViolation);
}

TEST_CASE("polynomial superposition composes pointwise", "[functions]") {
    const BallPoint a(CVec{cdouble{0.5, 0.0}});
    const HoloFunction f = HoloFunction::make_fa(a, 1.0, 0.0, 2.0, 2.0);
    // phi(u) = 1 + 2u + u^2
    const HoloFunction h = superpose({1.0, 2.0, 1.0}, f);
    const BallPoint z(CVec{cdouble{0.2, 0.4}});
    const cdouble u = evaluate(f, z);
    CHECK(std::abs(evaluate(h, z) - (1.0 + 2.0 * u + u * u)) < 1e-12);
    CHECK(h.dim() == 1);
    CHECK(singular_directions(h).size() == 1);
    CHECK_THROWS_AS(superpose({}, f), ContractViolation);
}
