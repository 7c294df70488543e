#pragma once

#include <fstream>

#include <json.hpp>

#include "criteria.hpp"
#include "functions.hpp"
#include "measures.hpp"
#include "norms.hpp"

namespace tentlab {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Points: JSON arrays of [re, im] pairs
// ---------------------------------------------------------------------------

inline json to_json(const CVec& v) {
    json a = json::array();
    for (const auto& c : v) a.push_back({c.real(), c.imag()});
    return a;
}

inline CVec cvec_from_json(const json& j) {
    CVec v;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2)
            throw ContractViolation("point JSON: expected [re, im] pairs");
        v.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return v;
}

inline json to_json(const BallPoint& p) { return to_json(p.coords()); }
inline json to_json(const SpherePoint& p) { return to_json(p.coords()); }
inline BallPoint ball_point_from_json(const json& j) { return BallPoint(cvec_from_json(j)); }
inline SpherePoint sphere_point_from_json(const json& j) { return SpherePoint(cvec_from_json(j)); }

// ---------------------------------------------------------------------------
// Regions
// ---------------------------------------------------------------------------

inline json to_json(const RegionSpec& r) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Koranyi>)
                return {{"kind", "koranyi"}, {"xi", to_json(v.xi)}, {"gamma", v.gamma}};
            else if constexpr (std::is_same_v<T, BergmanBall>)
                return {{"kind", "bergman_ball"}, {"center", to_json(v.center)}, {"radius", v.radius}};
            else if constexpr (std::is_same_v<T, NonisotropicBall>)
                return {{"kind", "nonisotropic_ball"}, {"xi", to_json(v.xi)}, {"delta", v.delta}};
            else if constexpr (std::is_same_v<T, TentRegion>)
                return {{"kind", "tent"}, {"u", to_json(v.u)}};
            else if constexpr (std::is_same_v<T, Annulus>)
                return {{"kind", "annulus"}, {"rho", v.rho}};
            else
                return {{"kind", "whole_ball"}};
        },
        r.variant());
}

inline RegionSpec region_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "koranyi")
        return RegionSpec::koranyi(sphere_point_from_json(j.at("xi")), j.at("gamma").get<double>());
    if (kind == "bergman_ball")
        return RegionSpec::bergman_ball(ball_point_from_json(j.at("center")),
                                        j.at("radius").get<double>());
    if (kind == "nonisotropic_ball")
        return RegionSpec::nonisotropic_ball(sphere_point_from_json(j.at("xi")),
                                             j.at("delta").get<double>());
    if (kind == "tent") return RegionSpec::tent(ball_point_from_json(j.at("u")));
    if (kind == "annulus") return RegionSpec::annulus(j.at("rho").get<double>());
    if (kind == "whole_ball") return RegionSpec::whole_ball();
    throw ContractViolation("region JSON: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Lattices (round-trip only for lattices produced by build_lattice)
// ---------------------------------------------------------------------------

inline json to_json(const Lattice& L) {
    json pts = json::array();
    for (const auto& p : L.points()) pts.push_back(to_json(p));
    const auto& rep = L.report();
    return {{"n", L.n()},
            {"delta", L.delta()},
            {"r_max", L.r_max()},
            {"points", pts},
            {"report",
             {{"covering_ok", rep.covering_ok},
              {"min_pairwise_separation", rep.min_pairwise_separation},
              {"max_overlap_observed", rep.max_overlap_observed},
              {"covering_samples", rep.covering_samples},
              {"failure_witness", rep.failure_witness}}}};
}

inline std::shared_ptr<Lattice> lattice_from_json(const json& j) {
    const int n = j.at("n").get<int>();
    auto L = std::make_shared<Lattice>(n, j.at("delta").get<double>(), j.at("r_max").get<double>());
    const double h = L->delta() / 8.0;
    for (const auto& pj : j.at("points")) {
        BallPoint p = ball_point_from_json(pj);
        const double b = bergman_metric(BallPoint::origin(n), p);
        if (n == 1) {
            const int level = static_cast<int>(std::llround(b / h));
            if (std::abs(b - level * h) > 1e-9)
                throw ContractViolation("lattice JSON: points are not on the construction mesh");
            double ang = std::arg(p.coords()[0]);
            if (ang < 0.0) ang += 2.0 * M_PI;
            L->push(std::move(p), level * h, level, ang);
        } else {
            L->push(std::move(p), b);
        }
    }
    if (j.contains("report")) {
        auto& rep = L->mutable_report();
        const auto& rj = j.at("report");
        rep.covering_ok = rj.value("covering_ok", false);
        rep.min_pairwise_separation = rj.value("min_pairwise_separation", 0.0);
        rep.max_overlap_observed = rj.value("max_overlap_observed", 0);
        rep.covering_samples = rj.value("covering_samples", std::size_t{0});
        rep.failure_witness = rj.value("failure_witness", std::string{});
    }
    return L;
}

// ---------------------------------------------------------------------------
// Measures
// ---------------------------------------------------------------------------

inline json to_json(const MeasureSpec& m) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PointMasses>) {
                json atoms = json::array();
                for (const auto& [p, w] : v.atoms)
                    atoms.push_back({{"point", to_json(p)}, {"weight", w}});
                return {{"kind", "point_masses"}, {"atoms", atoms}};
            } else if constexpr (std::is_same_v<T, LatticeMasses>) {
                return {{"kind", "lattice_masses"},
                        {"lattice", to_json(*v.lattice)},
                        {"gamma_w", v.gamma_w},
                        {"c", v.c}};
            } else if constexpr (std::is_same_v<T, WeightedVolume>) {
                return {{"kind", "weighted_volume"}, {"beta_v", v.beta_v}};
            } else {
                json terms = json::array();
                for (const auto& [c, b] : v.terms) terms.push_back({c, b});
                return {{"kind", "radial_density"}, {"terms", terms}};
            }
        },
        m.variant());
}

inline MeasureSpec measure_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "point_masses") {
        std::vector<std::pair<BallPoint, double>> atoms;
        for (const auto& a : j.at("atoms"))
            atoms.emplace_back(ball_point_from_json(a.at("point")), a.at("weight").get<double>());
        return MeasureSpec::point_masses(std::move(atoms));
    }
    if (kind == "lattice_masses")
        return MeasureSpec::lattice_masses(lattice_from_json(j.at("lattice")),
                                           j.at("gamma_w").get<double>(), j.at("c").get<double>());
    if (kind == "weighted_volume")
        return MeasureSpec::weighted_volume(j.at("beta_v").get<double>());
    if (kind == "radial_density") {
        std::vector<std::pair<double, double>> terms;
        for (const auto& t : j.at("terms"))
            terms.emplace_back(t[0].get<double>(), t[1].get<double>());
        return MeasureSpec::radial_density(std::move(terms));
    }
    throw ContractViolation("measure JSON: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Holomorphic functions
// ---------------------------------------------------------------------------

inline json to_json(const HoloFunction& f) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Polynomial>) {
                json terms = json::array();
                for (const auto& [m, c] : v.terms)
                    terms.push_back({json(m), {c.real(), c.imag()}});
                return {{"kind", "polynomial"}, {"n", v.n}, {"terms", terms}};
            } else if constexpr (std::is_same_v<T, KernelPowerFa>) {
                return {{"kind", "kernel_power_fa"},
                        {"a", to_json(v.a)},
                        {"theta", v.theta},
                        {"e", v.e}};
            } else if constexpr (std::is_same_v<T, BoundaryKernelG>) {
                return {{"kind", "boundary_kernel_g"}, {"zeta", to_json(v.zeta)}, {"theta", v.theta}};
            } else if constexpr (std::is_same_v<T, LatticeSum>) {
                return {{"kind", "lattice_sum"},
                        {"lattice", to_json(*v.lattice)},
                        {"lambda", to_json(v.lambda)},
                        {"theta", v.theta},
                        {"alpha", v.alpha},
                        {"q", v.q}};
            } else if constexpr (std::is_same_v<T, RademacherSum>) {
                return {{"kind", "rademacher_sum"},
                        {"lattice", to_json(*v.base.lattice)},
                        {"lambda", to_json(v.base.lambda)},
                        {"theta", v.base.theta},
                        {"alpha", v.base.alpha},
                        {"q", v.base.q},
                        {"tau", v.tau}};
            } else {
                json outer = json::array();
                for (const auto& c : v->outer) outer.push_back({c.real(), c.imag()});
                return {{"kind", "composed"}, {"outer", outer}, {"inner", to_json(v->inner)}};
            }
        },
        f.variant());
}

inline HoloFunction function_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "polynomial") {
        std::vector<std::pair<std::vector<int>, cdouble>> terms;
        for (const auto& t : j.at("terms")) {
            std::vector<int> m = t[0].get<std::vector<int>>();
            terms.emplace_back(std::move(m), cdouble(t[1][0].get<double>(), t[1][1].get<double>()));
        }
        return HoloFunction::polynomial(std::move(terms), j.at("n").get<int>());
    }
    if (kind == "kernel_power_fa") {
        BallPoint a = ball_point_from_json(j.at("a"));
        return HoloFunction(
            KernelPowerFa{std::move(a), j.at("theta").get<double>(), j.at("e").get<double>()});
    }
    if (kind == "boundary_kernel_g")
        return HoloFunction::make_g(sphere_point_from_json(j.at("zeta")),
                                    j.at("theta").get<double>());
    if (kind == "lattice_sum" || kind == "rademacher_sum") {
        auto L = lattice_from_json(j.at("lattice"));
        LatticeSum ls{L, cvec_from_json(j.at("lambda")), j.at("theta").get<double>(),
                      j.at("alpha").get<double>(), j.at("q").get<double>()};
        if (kind == "lattice_sum") return HoloFunction(std::move(ls));
        return HoloFunction::rademacher_sum(std::move(ls), j.at("tau").get<double>());
    }
    if (kind == "composed") {
        std::vector<cdouble> outer;
        for (const auto& c : j.at("outer"))
            outer.emplace_back(c[0].get<double>(), c[1].get<double>());
        return HoloFunction::composed(std::move(outer), function_from_json(j.at("inner")));
    }
    throw ContractViolation("function JSON: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Estimates and reports
// ---------------------------------------------------------------------------

inline json to_json(const IntegralEstimate& e) {
    return {{"value", e.value},
            {"std_error", e.std_error},
            {"samples_used", e.samples_used},
            {"truncation_radius", e.truncation_radius},
            {"diverged", e.diverged}};
}

inline json to_json(const Verdict& v) {
    const char* b = v.bounded == Boundedness::Bounded
                        ? "bounded"
                        : (v.bounded == Boundedness::Unbounded ? "unbounded" : "inconclusive");
    return {{"bounded", b},
            {"functional_value", v.functional_value},
            {"case", case_name(v.tag)},
            {"levels", v.levels},
            {"slope", v.slope},
            {"diverged", v.diverged}};
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractViolation("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

inline void save_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ContractViolation("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace tentlab
