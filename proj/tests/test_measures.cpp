#include <catch2/catch_amalgamated.hpp>

#include <tentlab/measures.hpp>

using namespace tentlab;

TEST_CASE("measure validation", "[measures]") {
    CHECK_THROWS_AS(MeasureSpec::point_masses({{BallPoint::origin(1), 0.0}}), ContractViolation);
    CHECK_THROWS_AS(MeasureSpec::weighted_volume(-1.0), ContractViolation);
    CHECK_THROWS_AS(MeasureSpec::radial_density({{1.0, -1.5}}), ContractViolation);
    CHECK_THROWS_AS(MeasureSpec::radial_density({{-1.0, 0.0}}), ContractViolation);
    CHECK(MeasureSpec::zero().is_atomic());
    CHECK(total_mass(MeasureSpec::zero()) == 0.0);
}

TEST_CASE("closed-form total masses", "[measures]") {
    // mass of (1-|z|^2)^b dv = Gamma(n+1)Gamma(b+1)/Gamma(n+b+1)
    CHECK(total_mass(MeasureSpec::weighted_volume(0.0), 1) == Catch::Approx(1.0));
    CHECK(total_mass(MeasureSpec::weighted_volume(1.0), 1) == Catch::Approx(0.5));
    CHECK(total_mass(MeasureSpec::weighted_volume(1.0), 2) == Catch::Approx(1.0 / 3.0));
    CHECK(total_mass(MeasureSpec::radial_density({{2.0, 1.0}, {1.0, 0.0}}), 1) ==
          Catch::Approx(2.0));
    CHECK_THROWS_AS(total_mass(MeasureSpec::weighted_volume(0.0)), ContractViolation);
}

TEST_CASE("shell masses match direct quadrature", "[measures]") {
    // n * int_{u1}^{u2} u^{n-1} (1-u)^b du by Simpson
    auto simpson = [](int n, double b, double u1, double u2) {
        const int m = 2000;
        double acc = 0.0;
        for (int i = 0; i <= m; ++i) {
            const double u = u1 + (u2 - u1) * i / m;
            const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * n * std::pow(u, n - 1.0) * std::pow(1.0 - u, b);
        }
        return acc * (u2 - u1) / (3.0 * m);
    };
    for (int n : {1, 2, 3}) {
        for (double b : {0.0, 0.5, 2.0}) {
            const double got = detail::shell_mass(n, {{1.0, b}}, 0.1, 0.3);
            CHECK(got == Catch::Approx(simpson(n, b, 0.1, 0.3)).epsilon(1e-8));
        }
    }
}

TEST_CASE("whole-ball integration of constants recovers the total mass", "[measures]") {
    IntegrateOptions opt;
    opt.budget = 20000;
    opt.seed = 5;
    for (int n : {1, 2}) {
        for (double b : {0.0, 1.0}) {
            const auto est = integrate(MeasureSpec::weighted_volume(b), n,
                                       RegionSpec::whole_ball(),
                                       [](const BallPoint&) { return 1.0; }, opt);
            CHECK(est.value ==
                  Catch::Approx(total_mass(MeasureSpec::weighted_volume(b), n)).margin(5e-3));
            CHECK_FALSE(est.diverged);
        }
    }
}

TEST_CASE("radial density scaling equals weighted volume scaling", "[measures]") {
    IntegrateOptions opt;
    opt.budget = 5000;
    opt.seed = 17;
    auto f = [](const BallPoint& z) { return 1.0 + z.abs_sq(); };
    const auto a = integrate(MeasureSpec::radial_density({{2.0, 0.5}}), 1,
                             RegionSpec::whole_ball(), f, opt);
    const auto b = integrate(MeasureSpec::weighted_volume(0.5), 1, RegionSpec::whole_ball(), f, opt);
    CHECK(a.value == Catch::Approx(2.0 * b.value).epsilon(1e-12));
}

TEST_CASE("atomic integration is an exact filtered sum", "[measures]") {
    std::vector<std::pair<BallPoint, double>> atoms = {
        {BallPoint(CVec{cdouble{0.5, 0.0}}), 2.0},
        {BallPoint(CVec{cdouble{-0.5, 0.0}}), 3.0},
        {BallPoint::origin(1), 1.0},
    };
    const MeasureSpec mu = MeasureSpec::point_masses(atoms);
    const auto est = integrate(mu, 1, RegionSpec::annulus(0.2),
                               [](const BallPoint& z) { return z.abs(); }, 5000, 1);
    CHECK(est.value == Catch::Approx(2.0 * 0.5 + 3.0 * 0.5).epsilon(1e-14));
    CHECK(est.std_error == 0.0);
}

TEST_CASE("nonisotropic ball mass matches a rejection-sampling oracle", "[measures]") {
    const SpherePoint xi(CVec{cdouble{1.0, 0.0}});
    const double delta = 0.3;
    IntegrateOptions opt;
    opt.budget = 60000;
    opt.seed = 23;
    const auto est = integrate(MeasureSpec::weighted_volume(0.0), 1,
                               RegionSpec::nonisotropic_ball(xi, delta),
                               [](const BallPoint&) { return 1.0; }, opt);
    // independent estimator: uniform draws from the ball
    Rng rng(99, stream_tag::generic, 0);
    const std::size_t m = 200000;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const CVec z = rng.unit_ball(1);
        if (std::abs(1.0 - z[0]) < delta) ++hits;
    }
    const double mc = static_cast<double>(hits) / m;
    const double mc_se = std::sqrt(mc * (1.0 - mc) / m);
    CHECK(std::abs(est.value - mc) <= 5.0 * (est.std_error + mc_se) + 1e-4);
}

TEST_CASE("metric-ball volume is center independent", "[measures]") {
    // int_{D(z0,r)} dv/(1-|z|^2)^{n+1} = sinh^{2n}(r) for every center
    const double r = 0.7;
    IntegrateOptions opt;
    opt.budget = 40000;
    opt.seed = 31;
    auto lam = [](const BallPoint& z) { return std::pow(z.one_minus_sq(), -2.0); };
    const auto at0 = integrate(MeasureSpec::weighted_volume(0.0), 1,
                               RegionSpec::bergman_ball(BallPoint::origin(1), r), lam, opt);
    const auto at6 = integrate(MeasureSpec::weighted_volume(0.0), 1,
                               RegionSpec::bergman_ball(BallPoint(CVec{cdouble{0.6, 0.0}}), r), lam,
                               opt);
    const double exact = std::pow(std::sinh(r), 2.0);
    CHECK(at0.value == Catch::Approx(exact).epsilon(0.05));
    CHECK(at6.value == Catch::Approx(exact).epsilon(0.05));
}

TEST_CASE("divergent integrands are flagged", "[measures]") {
    IntegrateOptions opt;
    opt.budget = 30000;
    opt.seed = 3;
    const auto est = integrate(MeasureSpec::weighted_volume(0.0), 1, RegionSpec::whole_ball(),
                               [](const BallPoint& z) { return std::pow(z.one_minus_sq(), -3.0); },
                               opt);
    CHECK(est.diverged);
}

TEST_CASE("negative integrand values violate the contract", "[measures]") {
    IntegrateOptions opt;
    opt.budget = 2000;
    opt.seed = 3;
    CHECK_THROWS_AS(integrate(MeasureSpec::weighted_volume(0.0), 1, RegionSpec::whole_ball(),
                              [](const BallPoint&) { return -1.0; }, opt),
                    ContractViolation);
}

TEST_CASE("ball-average density of a point mass at the origin", "[measures]") {
    const MeasureSpec mu = MeasureSpec::point_masses({{BallPoint::origin(1), 1.0}});
    MuHat mh(mu, 1, 0.5, 0.0, 1);
    const BallPoint zin(CVec{cdouble{0.2, 0.0}});   // beta = atanh(0.2) = 0.203 < 0.5
    const BallPoint zout(CVec{cdouble{0.7, 0.0}});  // beta = 0.867 > 0.5
    CHECK(mh(zin) == Catch::Approx(std::pow(zin.one_minus_sq(), -3.0)).epsilon(1e-12));
    CHECK(mh(zout) == 0.0);
}

TEST_CASE("ball-average density of a weighted volume follows the weight gap", "[measures]") {
    // for mu = v_{beta+n}, mu_hat_r(z) with weight alpha behaves like (1-|z|^2)^{beta-alpha}
    MuHat mh(MeasureSpec::weighted_volume(2.0), 1, 0.5, 0.0, 7);  // beta = 1, n = 1
    std::vector<double> ratios;
    for (double rho : {0.5, 0.9, 0.99}) {
        const BallPoint z(CVec{cdouble{rho, 0.0}});
        ratios.push_back(mh(z) / z.one_minus_sq());
    }
    const double lo = *std::min_element(ratios.begin(), ratios.end());
    const double hi = *std::max_element(ratios.begin(), ratios.end());
    CHECK(hi / lo <= 4.0);
}

TEST_CASE("free mu_hat keeps the strict radius contract", "[measures]") {
    const BallPoint z(CVec{cdouble{0.3, 0.0}});
    CHECK_THROWS_AS(mu_hat(MeasureSpec::weighted_volume(0.0), 1, z, 1.0, 0.0), ContractViolation);
    CHECK_NOTHROW(mu_hat(MeasureSpec::weighted_volume(0.0), 1, z, 0.5, 0.0));
    CHECK_NOTHROW(MuHat(MeasureSpec::zero(), 1, 2.0, 0.0, 1));  // class allows doubled radii
}
