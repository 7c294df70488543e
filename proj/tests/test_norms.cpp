#include <catch2/catch_amalgamated.hpp>

#include <tentlab/norms.hpp>

using namespace tentlab;

TEST_CASE("tent parameter validation", "[norms]") {
    CHECK_NOTHROW(TentParams(2, 2, 1, 2, 0, 0, 1));
    CHECK_THROWS_AS(TentParams(0, 2, 1, 2, 0, 0, 1), ContractViolation);
    CHECK_THROWS_AS(TentParams(2, 2, 1, 2, -2.5, 0, 1), ContractViolation);
    CHECK_THROWS_AS(TentParams(2, 2, 1, 2, 0, 0, 1, 1.0), ContractViolation);
    CHECK_THROWS_AS(TentParams(2, 2, 1, 2, 0, 0, 1, 2.0, 1.0), ContractViolation);
}

TEST_CASE("boundary cap fractions have the right exact values", "[norms]") {
    CHECK(detail::boundary_cap_sigma(1, 2.0) == 1.0);
    CHECK(detail::boundary_cap_sigma(1, std::sqrt(2.0)) == Catch::Approx(0.5));
    CHECK(detail::boundary_cap_sigma(2, 2.0) == 1.0);
    // lens of the unit disk with the radius-1 disk about 1:
    // 2*pi/3 - sqrt(3)/2 over pi
    CHECK(detail::boundary_cap_sigma(2, 1.0) ==
          Catch::Approx((2.0 * M_PI / 3.0 - std::sqrt(3.0) / 2.0) / M_PI));
    CHECK(detail::boundary_cap_sigma(2, 0.0) == 0.0);
    CHECK_THROWS_AS(detail::boundary_cap_sigma(3, 0.5), ContractViolation);

    // Monte-Carlo cross-check of the two-variable formula
    const auto xis = sample_sphere(2, 40000, 12);
    const SpherePoint zeta(CVec{cdouble{1.0, 0.0}, cdouble{0.0, 0.0}});
    for (double eps : {0.5, 1.0}) {
        std::size_t hits = 0;
        for (const auto& xi : xis)
            if (std::abs(1.0 - inner(xi, zeta)) < eps) ++hits;
        const double frac = static_cast<double>(hits) / xis.size();
        const double exact = detail::boundary_cap_sigma(2, eps);
        CHECK(std::abs(frac - exact) <= 5.0 * std::sqrt(exact * (1.0 - exact) / xis.size()));
    }
}

TEST_CASE("ring sampler stays inside its ring", "[norms]") {
    Rng rng(5, stream_tag::generic, 1);
    for (int n : {1, 2}) {
        CVec zc(static_cast<std::size_t>(n), 0.0);
        zc[0] = std::polar(1.0, 0.3);
        const SpherePoint zeta(std::move(zc));
        for (int i = 0; i < 300; ++i) {
            const auto xi = detail::sample_boundary_ring(n, zeta, 0.25, 0.5, rng);
            const double d = std::abs(1.0 - inner(xi, zeta));
            CHECK(d >= 0.25 - 1e-9);
            CHECK(d <= 0.5 + 1e-9);
        }
    }
}

TEST_CASE("tent norm of the constant matches a radial oracle", "[norms]") {
    // ||1||^2 in the diagonal (2,2) norm against v_1 equals
    // int_B sigma(I(z)) dv(z) with sigma(I(z)) the exact arc fraction.
    const double gamma = 2.0;
    double oracle = 0.0;
    const int m = 20000;
    for (int i = 0; i < m; ++i) {
        const double rho = (i + 0.5) / m;
        const double d = 0.5 * gamma * (1.0 - rho * rho);
        double frac;
        if (d >= 1.0 + rho) frac = 1.0;
        else if (d <= 1.0 - rho) frac = 0.0;
        else frac = std::acos(std::clamp((1.0 + rho * rho - d * d) / (2.0 * rho), -1.0, 1.0)) / M_PI;
        oracle += 2.0 * rho * frac / m;
    }
    TentNormOptions opt;
    opt.budget = 150000;
    opt.seed = 21;
    const auto est = tent_norm(HoloFunction::constant(1.0, 1), MeasureSpec::weighted_volume(1.0), 1,
                               2.0, 2.0, gamma, opt);
    CHECK(est.value * est.value == Catch::Approx(oracle).epsilon(0.1));
}

TEST_CASE("area operator on atomic measures is an exact sum", "[norms]") {
    const BallPoint a(CVec{cdouble{0.5, 0.0}});
    const MeasureSpec mu = MeasureSpec::point_masses({{a, 2.0}});
    const HoloFunction f = HoloFunction::polynomial({{{1}, 1.0}}, 1);
    const SpherePoint xi(CVec{cdouble{1.0, 0.0}});
    // a lies in Gamma_3(xi): |1-0.5| = 0.5 < 1.5*0.75
    const auto est = area_operator(f, mu, 1, 2.0, xi, 3.0, 1000, 1);
    const double expect = std::sqrt(2.0 * 0.25 / 0.75);
    CHECK(est.value == Catch::Approx(expect).epsilon(1e-12));
    CHECK(est.std_error == 0.0);
}

TEST_CASE("sequence norm of a single entry reduces to its cap fraction", "[norms]") {
    Lattice Z(1, 0.5, 2.0);
    Z.push(BallPoint::origin(1), 0.0, 0, 0.0);
    const double rho = std::tanh(0.5);
    Z.push(BallPoint(CVec{cdouble{rho, 0.0}}), 0.5, 8, 0.0);
    CVec c{0.0, cdouble{2.0, 0.0}};

    const double gamma = 3.0;
    const std::size_t budget = 20000;
    const auto res = seq_tent_norm(c, Z, SeqExponent::finite(2.0), SeqExponent::finite(2.0), budget,
                                   9, gamma);
    // count the same sampled directions directly
    const auto xis = sample_sphere(1, budget, 9);
    std::size_t hits = 0;
    for (const auto& xi : xis) {
        const BallPoint& a = Z.point(1);
        if (std::abs(1.0 - inner(a, xi)) < 0.5 * gamma * a.one_minus_sq()) ++hits;
    }
    const double frac = static_cast<double>(hits) / xis.size();
    CHECK(res.value == Catch::Approx(2.0 * std::sqrt(frac)).epsilon(1e-12));
    CHECK_THROWS_AS(seq_tent_norm(c, Z, SeqExponent::inf(), SeqExponent::inf(), budget, 9),
                    ContractViolation);
    CHECK_THROWS_AS(seq_tent_norm(CVec{1.0}, Z, SeqExponent::finite(2.0), SeqExponent::finite(2.0),
                                  budget, 9),
                    ContractViolation);
}

TEST_CASE("infinite-exponent sequence norm via the Carleson constant", "[norms]") {
    Lattice Z(1, 0.5, 2.0);
    Z.push(BallPoint::origin(1), 0.0, 0, 0.0);
    const double rho = 0.5;
    Z.push(BallPoint(CVec{cdouble{rho, 0.0}}), std::atanh(rho), 9, 0.0);
    CVec c{0.0, cdouble{3.0, 0.0}};
    const double q = 2.0;
    const auto res = seq_tent_norm(c, Z, SeqExponent::inf(), SeqExponent::finite(q), 64, 9);
    // one atom of mass |c|^q (1-|a|^2)^n at a = 0.5; best grid delta is 1:
    // constant = 9 * 0.75, norm = sqrt of that
    CHECK(res.value == Catch::Approx(std::sqrt(9.0 * 0.75)).epsilon(1e-9));
}

TEST_CASE("pairing weights by the invariant factor", "[norms]") {
    Lattice Z(1, 0.5, 2.0);
    Z.push(BallPoint::origin(1), 0.0, 0, 0.0);
    Z.push(BallPoint(CVec{cdouble{0.6, 0.0}}), std::atanh(0.6), 11, 0.0);
    const CVec c{1.0, cdouble{2.0, 1.0}};
    const CVec d{cdouble{0.0, 1.0}, 3.0};
    const cdouble expect = c[0] * std::conj(d[0]) + c[1] * std::conj(d[1]) * 0.64;
    CHECK(std::abs(pairing(c, d, Z) - expect) < 1e-14);
}

TEST_CASE("product norms obey the Cauchy-Schwarz factorization with shared samples",
          "[norms]") {
    auto Zp = build_lattice(1, 0.5, 1.5, 3);
    CVec c(Zp.size()), d(Zp.size());
    Rng rng(17, stream_tag::generic, 0);
    for (std::size_t k = 0; k < c.size(); ++k) {
        c[k] = rng.cnormal();
        d[k] = rng.cnormal();
    }
    const auto chk = product_inequality_check(c, d, Zp, SeqExponent::finite(1.0),
                                              SeqExponent::finite(1.0), SeqExponent::finite(2.0),
                                              SeqExponent::finite(2.0), SeqExponent::finite(2.0),
                                              SeqExponent::finite(2.0), 2000, 5);
    CHECK(chk.ratio <= 1.0 + 1e-9);
    CHECK_THROWS_AS(product_inequality_check(c, d, Zp, SeqExponent::finite(1.0),
                                             SeqExponent::finite(1.0), SeqExponent::finite(2.0),
                                             SeqExponent::finite(2.0), SeqExponent::finite(3.0),
                                             SeqExponent::finite(2.0), 200, 5),
                    ContractViolation);
}

TEST_CASE("sign-average contracts", "[norms]") {
    CHECK_THROWS_AS(khinchine_ratio(CVec{1.0}, 2.0, 17), ContractViolation);
    CHECK_THROWS_AS(khinchine_ratio(CVec(5, 1.0), 2.0, 4), ContractViolation);
    CHECK(khinchine_ratio(CVec{1.0}, 2.0, 8) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("two-kernel integral bound preconditions and symmetry", "[norms]") {
    const BallPoint u(CVec{cdouble{0.5, 0.0}});
    const BallPoint z(CVec{cdouble{-0.3, 0.2}});
    CHECK_THROWS_AS(forelli_rudin_check(u, z, 0.0, 1.0, 1.0, 5000, 1), ContractViolation);
    CHECK_THROWS_AS(forelli_rudin_check(u, z, 0.0, 2.5, 1.6, 5000, 1), ContractViolation);
    const auto a = forelli_rudin_check(u, z, 0.0, 1.6, 1.6, 5000, 1);
    const auto b = forelli_rudin_check(z, u, 0.0, 1.6, 1.6, 5000, 1);
    CHECK(a.bound == Catch::Approx(b.bound).epsilon(1e-12));
    CHECK(a.ratio > 0.0);
}
