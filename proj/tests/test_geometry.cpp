#include <catch2/catch_amalgamated.hpp>

#include <tentlab/geometry.hpp>

using namespace tentlab;

static BallPoint rand_ball(int n, double rmax, Rng& rng) {
    CVec c = rng.unit_ball(n);
    for (auto& x : c) x *= rmax;
    return BallPoint(std::move(c));
}

TEST_CASE("ball and sphere point contracts", "[geometry]") {
    CHECK_THROWS_AS(BallPoint(CVec{}), ContractViolation);
    CHECK_THROWS_AS(BallPoint(CVec{cdouble{1.0, 0.0}}), ContractViolation);
    CHECK_THROWS_AS(BallPoint(CVec{cdouble{0.8, 0.8}}), ContractViolation);
    CHECK_NOTHROW(BallPoint(CVec{cdouble{0.9, 0.0}}));
    CHECK_THROWS_AS(SpherePoint(CVec{cdouble{0.5, 0.0}}), ContractViolation);
    // slightly off unit length is normalized
    SpherePoint xi(CVec{cdouble{1.0 + 5e-7, 0.0}});
    CHECK(std::abs(xi.coords()[0]) == Catch::Approx(1.0).margin(1e-15));
    CHECK(BallPoint::origin(3).abs() == 0.0);
}

TEST_CASE("involution matches the one-variable closed form", "[geometry]") {
    Rng rng(7, stream_tag::generic, 1);
    for (int i = 0; i < 200; ++i) {
        const BallPoint a = rand_ball(1, 0.95, rng);
        const BallPoint z = rand_ball(1, 0.95, rng);
        const cdouble expect =
            (a.coords()[0] - z.coords()[0]) / (1.0 - z.coords()[0] * std::conj(a.coords()[0]));
        const BallPoint img = involution(a, z);
        CHECK(std::abs(img.coords()[0] - expect) < 1e-13);
    }
}

TEST_CASE("involution swaps the base point and the origin, and is involutive", "[geometry]") {
    Rng rng(11, stream_tag::generic, 2);
    for (int n : {1, 2, 3}) {
        for (int i = 0; i < 100; ++i) {
            const BallPoint a = rand_ball(n, 0.9, rng);
            const BallPoint z = rand_ball(n, 0.9, rng);
            const BallPoint a0 = involution(a, BallPoint::origin(n));
            for (int j = 0; j < n; ++j)
                CHECK(std::abs(a0.coords()[j] - a.coords()[j]) < 1e-13);
            CHECK(involution(a, a).abs() < 1e-12);
            const BallPoint zz = involution(a, involution(a, z));
            for (int j = 0; j < n; ++j)
                CHECK(std::abs(zz.coords()[j] - z.coords()[j]) < 1e-11);
        }
    }
}

TEST_CASE("pseudo-hyperbolic distance agrees with the mapped point's modulus", "[geometry]") {
    Rng rng(13, stream_tag::generic, 3);
    for (int n : {1, 2}) {
        for (int i = 0; i < 200; ++i) {
            const BallPoint z = rand_ball(n, 0.9, rng);
            const BallPoint w = rand_ball(n, 0.9, rng);
            CHECK(std::abs(pseudo_hyperbolic(z, w) - involution(z, w).abs()) < 1e-12);
        }
    }
}

TEST_CASE("metric values on radial points", "[geometry]") {
    // beta(0, (rho, 0, ...)) = atanh(rho)
    for (double rho : {0.1, 0.5, 0.9, 0.99}) {
        const BallPoint z(CVec{cdouble{rho, 0.0}});
        CHECK(bergman_metric(BallPoint::origin(1), z) == Catch::Approx(std::atanh(rho)).epsilon(1e-13));
    }
    const BallPoint z(CVec{cdouble{0.3, 0.4}});
    CHECK(bergman_metric(z, z) == 0.0);
}

TEST_CASE("region membership uses the defining strict inequalities", "[geometry]") {
    const SpherePoint xi(CVec{cdouble{1.0, 0.0}});
    // Koranyi: |1 - z| < (gamma/2)(1-|z|^2); at z = rho on the axis with gamma = 2
    // the inequality reads 1-rho < 1-rho^2, true for rho in (0,1).
    const BallPoint zin(CVec{cdouble{0.5, 0.0}});
    CHECK(in_region(zin, RegionSpec::koranyi(xi, 2.0)));
    // The origin sits exactly on the gamma = 2 cone boundary: excluded.
    CHECK_FALSE(in_region(BallPoint::origin(1), RegionSpec::koranyi(xi, 2.0)));
    CHECK(in_region(BallPoint::origin(1), RegionSpec::koranyi(xi, 2.1)));

    CHECK(in_region(zin, RegionSpec::nonisotropic_ball(xi, 0.51)));
    CHECK_FALSE(in_region(zin, RegionSpec::nonisotropic_ball(xi, 0.5)));

    // Q(0) is the whole ball.
    CHECK(in_region(zin, RegionSpec::tent(BallPoint::origin(1))));
    const BallPoint u(CVec{cdouble{0.6, 0.0}});
    // Q(u): |1 - <z, u/|u|>| < 1-|u|^2 = 0.64
    CHECK(in_region(BallPoint(CVec{cdouble{0.5, 0.0}}), RegionSpec::tent(u)));
    CHECK_FALSE(in_region(BallPoint(CVec{cdouble{0.1, 0.0}}), RegionSpec::tent(u)));

    CHECK(in_region(zin, RegionSpec::annulus(0.4)));
    CHECK_FALSE(in_region(zin, RegionSpec::annulus(0.5)));
    CHECK(in_region(zin, RegionSpec::whole_ball()));

    CHECK_THROWS_AS(RegionSpec::koranyi(xi, 1.0), ContractViolation);
    CHECK_THROWS_AS(RegionSpec::annulus(1.0), ContractViolation);
    CHECK_THROWS_AS(RegionSpec::bergman_ball(zin, 0.0), ContractViolation);
}

TEST_CASE("cap measure matches the exact arc fraction in one variable", "[geometry]") {
    // sigma{xi : z in Gamma_gamma(xi)} = sigma{|1 - <z,xi>| < (gamma/2)(1-|z|^2)},
    // an arc whose exact fraction is acos((1+rho^2-d^2)/(2 rho))/pi.
    for (double rho : {0.3, 0.7, 0.9}) {
        for (double gamma : {1.5, 2.0, 3.0}) {
            const double d = 0.5 * gamma * (1.0 - rho * rho);
            double exact;
            if (d >= 1.0 + rho) exact = 1.0;
            else if (d <= 1.0 - rho) exact = 0.0;
            else exact = std::acos(std::clamp((1.0 + rho * rho - d * d) / (2.0 * rho), -1.0, 1.0)) / M_PI;
            const BallPoint z(CVec{cdouble{rho, 0.0}});
            const auto est = cap_measure(z, 40000, 99, gamma);
            CHECK(std::abs(est.value - exact) <= 5.0 * est.std_error + 1e-12);
        }
    }
    CHECK_THROWS_AS(cap_measure(BallPoint::origin(1), 10, 1), ContractViolation);
}

TEST_CASE("widened aperture covers metric neighborhoods of a cone", "[geometry]") {
    const double gp = widened_aperture(2.0, 0.5, 1, 5, 2000);
    CHECK(gp >= 4.0);
    CHECK(gp <= 64.0);
    CHECK_THROWS_AS(widened_aperture(0.9, 0.5, 1, 5), ContractViolation);
}
