#include <catch2/catch_amalgamated.hpp>

#include <tentlab/io.hpp>

using namespace tentlab;

TEST_CASE("complex vectors survive the JSON round trip", "[io]") {
    const CVec v{cdouble{0.25, -0.5}, cdouble{1e-3, 0.125}};
    const CVec back = cvec_from_json(to_json(v));
    REQUIRE(back.size() == v.size());
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(back[i] == v[i]);
    CHECK_THROWS_AS(cvec_from_json(json::parse("[[1, 2, 3]]")), ContractViolation);
}

TEST_CASE("regions round trip through JSON", "[io]") {
    const SpherePoint xi(CVec{cdouble{0.0, 1.0}});
    const std::vector<RegionSpec> regions = {
        RegionSpec::koranyi(xi, 2.5),
        RegionSpec::bergman_ball(BallPoint(CVec{cdouble{0.3, 0.1}}), 0.8),
        RegionSpec::nonisotropic_ball(xi, 0.4),
        RegionSpec::tent(BallPoint(CVec{cdouble{0.5, 0.0}})),
        RegionSpec::annulus(0.7),
        RegionSpec::whole_ball(),
    };
    for (const auto& r : regions) {
        const json j = to_json(r);
        CHECK(to_json(region_from_json(j)) == j);
    }
    CHECK_THROWS_AS(region_from_json(json{{"kind", "banana"}}), ContractViolation);
}

TEST_CASE("lattices round trip through JSON", "[io]") {
    for (int n : {1, 2}) {
        const Lattice L = build_lattice(n, n == 1 ? 0.4 : 0.8, 1.5, 11);
        const json j = to_json(L);
        const auto back = lattice_from_json(j);
        REQUIRE(back->size() == L.size());
        CHECK(back->n() == L.n());
        CHECK(back->delta() == L.delta());
        for (std::size_t k = 0; k < L.size(); ++k) {
            const auto& a = L.point(k).coords();
            const auto& b = back->point(k).coords();
            for (std::size_t d = 0; d < a.size(); ++d) CHECK(std::abs(a[d] - b[d]) < 1e-12);
        }
        // neighbor queries still work on the reconstruction
        const BallPoint z(CVec(static_cast<std::size_t>(n), cdouble{0.2, 0.1}));
        auto got = back->neighbors_within(z, 0.9);
        auto want = L.neighbors_within(z, 0.9);
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        CHECK(got == want);
        CHECK(back->report().covering_ok == L.report().covering_ok);
    }
    // off-mesh points are rejected for n = 1
    json bad = to_json(build_lattice(1, 0.4, 1.0, 11));
    bad["points"][1] = to_json(BallPoint(CVec{cdouble{0.123456, 0.0}}));
    CHECK_THROWS_AS(lattice_from_json(bad), ContractViolation);
}

TEST_CASE("measures round trip through JSON", "[io]") {
    auto Z = std::make_shared<Lattice>(build_lattice(1, 0.5, 1.0, 11));
    const std::vector<MeasureSpec> mus = {
        MeasureSpec::point_masses({{BallPoint(CVec{cdouble{0.4, -0.2}}), 1.5}}),
        MeasureSpec::lattice_masses(Z, 3.0, 2.0),
        MeasureSpec::weighted_volume(1.25),
        MeasureSpec::radial_density({{2.0, 0.5}, {1.0, 0.0}}),
        MeasureSpec::zero(),
    };
    for (const auto& mu : mus) {
        const json j = to_json(mu);
        CHECK(to_json(measure_from_json(j)) == j);
    }
    CHECK(total_mass(measure_from_json(to_json(mus[3])), 1) ==
          Catch::Approx(total_mass(mus[3], 1)));
    CHECK_THROWS_AS(measure_from_json(json{{"kind", "banana"}}), ContractViolation);
}

TEST_CASE("functions round trip through JSON and evaluate identically", "[io]") {
    auto Z = std::make_shared<Lattice>(build_lattice(1, 0.5, 1.0, 11));
    CVec lam(Z->size(), cdouble{0.5, 0.25});
    const std::vector<HoloFunction> fs = {
        HoloFunction::polynomial({{{0, 1}, cdouble{1.0, 2.0}}, {{2, 0}, 0.5}}, 2),
        HoloFunction::make_fa(BallPoint(CVec{cdouble{0.6, 0.1}}), 1.2, 0.5, 2.0, 3.0),
        HoloFunction::make_g(SpherePoint(CVec{std::polar(1.0, 0.7)}), 1.4),
        HoloFunction::lattice_sum(Z, lam, 2.0, 0.0, 2.0),
        HoloFunction::rademacher_sum(LatticeSum{Z, lam, 2.0, 0.0, 2.0}, 0.3),
        superpose({1.0, cdouble{0.0, 1.0}},
                  HoloFunction::make_fa(BallPoint(CVec{cdouble{0.5, 0.0}}), 1.0, 0.0, 2.0, 2.0)),
    };
    for (const auto& f : fs) {
        const HoloFunction back = function_from_json(to_json(f));
        CHECK(back.dim() == f.dim());
        const BallPoint z(CVec(static_cast<std::size_t>(f.dim()), cdouble{0.3, -0.2}));
        CHECK(std::abs(evaluate(back, z) - evaluate(f, z)) < 1e-12);
    }
    CHECK_THROWS_AS(function_from_json(json{{"kind", "banana"}}), ContractViolation);
}

TEST_CASE("estimate and verdict serialization exposes all fields", "[io]") {
    IntegralEstimate e;
    e.value = 1.5;
    e.std_error = 0.01;
    e.samples_used = 1234;
    e.truncation_radius = 0.99;
    e.diverged = true;
    const json je = to_json(e);
    CHECK(je.at("value").get<double>() == 1.5);
    CHECK(je.at("samples_used").get<std::size_t>() == 1234);
    CHECK(je.at("diverged").get<bool>());

    Verdict v;
    v.bounded = Boundedness::Unbounded;
    v.tag = CaseTag::Case3;
    v.levels = {1.0, 2.0};
    v.slope = 0.7;
    const json jv = to_json(v);
    CHECK(jv.at("bounded").get<std::string>() == "unbounded");
    CHECK(jv.at("case").get<std::string>() == "case3");
    CHECK(jv.at("levels").size() == 2);
}

TEST_CASE("files round trip on disk", "[io]") {
    const std::string path = "io_roundtrip_tmp.json";
    const json j = to_json(MeasureSpec::weighted_volume(0.5));
    save_json(path, j);
    CHECK(load_json(path) == j);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_json("does_not_exist_anywhere.json"), ContractViolation);
}
