#pragma once

#include <optional>
#include <sstream>

#include "criteria.hpp"

namespace tentlab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20240917;
    bool quick = false;  // reduced budgets for smoke runs
};

namespace detail {

inline double spread(const std::vector<double>& xs) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double x : xs) {
        if (!(x > 0.0) || !std::isfinite(x)) return std::numeric_limits<double>::infinity();
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return hi / lo;
}

inline std::string fmt(double x) {
    std::ostringstream os;
    os.precision(4);
    os << x;
    return os.str();
}

inline BallPoint random_ball_point(int n, double rmax, Rng& rng) {
    CVec c = rng.unit_ball(n);
    for (auto& x : c) x *= rmax;
    return BallPoint(std::move(c));
}

}  // namespace detail

// 1. Invariance of the Bergman metric under the ball automorphisms, plus the
//    metric axioms (symmetry, identity, triangle inequality).
inline CriterionResult criterion_metric_invariance(const AcceptanceOptions& o) {
    CriterionResult res{1, "mobius-invariance", false, ""};
    const std::size_t triples = o.quick ? 200 : 1000;
    double worst_inv = 0.0, worst_sym = 0.0, worst_tri = 0.0;
    for (std::size_t i = 0; i < triples; ++i) {
        const int n = 1 + static_cast<int>(i % 2);
        Rng rng(o.seed, stream_tag::generic, 2000 + i);
        const BallPoint a = detail::random_ball_point(n, 0.95, rng);
        const BallPoint z = detail::random_ball_point(n, 0.95, rng);
        const BallPoint w = detail::random_ball_point(n, 0.95, rng);
        const double b = bergman_metric(z, w);
        worst_inv = std::max(worst_inv,
                             std::abs(b - bergman_metric(involution(a, z), involution(a, w))));
        worst_sym = std::max(worst_sym, std::abs(b - bergman_metric(w, z)));
        if (bergman_metric(z, z) != 0.0) {
            res.detail = "beta(z,z) != 0";
            return res;
        }
        const double tri = b - bergman_metric(z, a) - bergman_metric(a, w);
        worst_tri = std::max(worst_tri, tri);
    }
    res.pass = worst_inv <= 1e-9 && worst_sym <= 1e-12 && worst_tri <= 1e-9;
    res.detail = "max invariance defect " + detail::fmt(worst_inv) + ", symmetry defect " +
                 detail::fmt(worst_sym) + ", triangle defect " + detail::fmt(worst_tri);
    return res;
}

// 2. Lattice construction over (n, delta, r_max) in {1,2} x {0.2,0.5} x {4}:
//    verified covering, exact separation >= delta/2, finite observed overlap.
inline CriterionResult criterion_lattice(const AcceptanceOptions& o) {
    CriterionResult res{2, "lattice-construction", true, ""};
    const std::size_t samples = o.quick ? 2000 : 10000;
    std::ostringstream detail;
    for (int n : {1, 2}) {
        for (double delta : {0.2, 0.5}) {
            const double r_max = 4.0;
            detail << "(n=" << n << ", delta=" << delta << ", r_max=4): ";
            try {
                const Lattice L = build_lattice(n, delta, r_max, o.seed);
                const auto rep = verify_lattice(L, samples, o.seed);
                const bool sep_ok = rep.min_pairwise_separation >= delta / 2.0 - 1e-9;
                const bool ok = rep.covering_ok && sep_ok && rep.max_overlap_observed >= 1;
                if (!ok) res.pass = false;
                detail << (ok ? "ok" : "FAIL") << " [" << L.size() << " pts, min sep "
                       << detail::fmt(rep.min_pairwise_separation) << ", 4-delta overlap "
                       << rep.max_overlap_observed
                       << (rep.covering_ok ? "" : ", covering failed: " + rep.failure_witness)
                       << "]; ";
            } catch (const ContractViolation& e) {
                res.pass = false;
                detail << "FAIL [" << e.what() << "]; ";
            }
        }
    }
    res.detail = detail.str();
    return res;
}

// 3. Exact dyadic averaging of random sign sums: the second moment identity
//    holds exactly; the fourth moment of (1,1) is exactly 2.
inline CriterionResult criterion_khinchine(const AcceptanceOptions& o) {
    CriterionResult res{3, "khinchine-exactness", false, ""};
    const int K = 12;
    double worst = 0.0;
    for (int len = 1; len <= K; ++len) {
        Rng rng(o.seed, stream_tag::generic, 3000 + len);
        CVec c(len);
        for (auto& x : c) x = rng.cnormal();
        worst = std::max(worst, std::abs(khinchine_ratio(c, 2.0, K) - 1.0));
    }
    const double r4 = khinchine_ratio(CVec{1.0, 1.0}, 4.0, K);
    res.pass = worst <= 1e-9 && std::abs(r4 - 2.0) <= 1e-9;
    res.detail = "max |p=2 ratio - 1| = " + detail::fmt(worst) +
                 ", p=4 ratio for (1,1) = " + detail::fmt(r4);
    return res;
}

// 4. The L^t norm of the area operator agrees with the tent norm at (p,q)=(t,s)
//    within three combined standard errors, on five (f, mu) pairs.
inline CriterionResult criterion_norm_consistency(const AcceptanceOptions& o) {
    CriterionResult res{4, "area-vs-tent-norm", true, ""};
    struct Pair {
        HoloFunction f;
        MeasureSpec mu;
        int n;
        double s, t;
    };
    std::vector<Pair> pairs;
    pairs.push_back({HoloFunction::polynomial({{{1}, 1.0}}, 1), MeasureSpec::weighted_volume(0.0),
                     1, 2.0, 2.0});
    pairs.push_back({HoloFunction::polynomial({{{0}, 1.0}, {{2}, 0.5}}, 1),
                     MeasureSpec::weighted_volume(1.0), 1, 2.0, 2.0});
    pairs.push_back({HoloFunction::make_fa(BallPoint(CVec{0.5}), 1.0, 0.0, 2.0, 2.0),
                     MeasureSpec::weighted_volume(0.0), 1, 2.0, 2.0});
    pairs.push_back({HoloFunction::polynomial({{{0, 0}, 1.0}, {{1, 1}, 1.0}}, 2),
                     MeasureSpec::weighted_volume(0.0), 2, 2.0, 2.0});
    pairs.push_back({HoloFunction::polynomial({{{3}, 1.0}}, 1),
                     MeasureSpec::radial_density({{1.0, 0.5}, {0.5, 2.0}}), 1, 3.0, 3.0});

    std::ostringstream detail;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& pr = pairs[i];
        TentNormOptions tno;
        tno.budget = o.quick ? 40000 : 200000;
        tno.seed = derive_stream(o.seed, stream_tag::generic, 4000 + i);
        const auto tn = tent_norm(pr.f, pr.mu, pr.n, pr.t, pr.s, 2.0, tno);
        const auto an = area_norm(pr.f, pr.mu, pr.n, pr.s, pr.t, 2.0, tno);
        const double tol = 3.0 * std::sqrt(tn.std_error * tn.std_error +
                                           an.std_error * an.std_error);
        const bool ok =
            !tn.diverged && !an.diverged && std::abs(tn.value - an.value) <= tol;
        if (!ok) res.pass = false;
        detail << "pair " << i << ": tent " << detail::fmt(tn.value) << " vs area "
               << detail::fmt(an.value) << " (tol " << detail::fmt(tol) << ", "
               << (ok ? "ok" : "FAIL") << "); ";
    }
    res.detail = detail.str();
    return res;
}

// 5. Identification of the diagonal tent space with a weighted Bergman space:
//    the two norms stay within one constant over 20 random polynomials.
inline CriterionResult criterion_bergman_identification(const AcceptanceOptions& o) {
    CriterionResult res{5, "bergman-identification", false, ""};
    std::vector<double> ratios;
    for (int i = 0; i < 20; ++i) {
        Rng rng(o.seed, stream_tag::generic, 5000 + i);
        const int deg = 1 + static_cast<int>(rng.bits() % 5);
        std::vector<std::pair<std::vector<int>, cdouble>> terms;
        for (int d = 0; d <= deg; ++d) terms.push_back({{d}, rng.cnormal()});
        const HoloFunction f = HoloFunction::polynomial(std::move(terms), 1);

        const MeasureSpec v1 = MeasureSpec::weighted_volume(1.0);  // v_{n+alpha}, alpha = 0
        IntegrateOptions io;
        io.budget = o.quick ? 20000 : 80000;
        io.seed = derive_stream(o.seed, stream_tag::generic, 5100 + i);
        const auto sq = integrate(
            v1, 1, RegionSpec::whole_ball(),
            [&](const BallPoint& z) { return std::norm(evaluate(f, z)); }, io);
        const double bergman = std::sqrt(sq.value);

        TentNormOptions tno;
        tno.budget = o.quick ? 30000 : 100000;
        tno.seed = derive_stream(o.seed, stream_tag::generic, 5200 + i);
        const double tent = tent_norm(f, v1, 1, 2.0, 2.0, 2.0, tno).value;
        ratios.push_back(tent / bergman);
    }
    const double sp = detail::spread(ratios);
    res.pass = sp <= 10.0;
    res.detail = "tent/bergman ratio spread over 20 polynomials: " + detail::fmt(sp);
    return res;
}

// 6. The two-kernel weighted integral stays within one constant of its
//    closed-form bound over a 5x5 grid of kernel centers.
inline CriterionResult criterion_kernel_bound(const AcceptanceOptions& o) {
    CriterionResult res{6, "kernel-integral-bound", false, ""};
    std::vector<double> ratios;
    for (int j = 0; j < 5; ++j) {
        for (int k = 0; k < 5; ++k) {
            const BallPoint u(CVec{std::polar(0.95 * j / 4.0, 0.7 * j)});
            const BallPoint z(CVec{std::polar(0.95 * k / 4.0, -0.9 * k)});
            const auto chk = forelli_rudin_check(
                u, z, 0.0, 1.6, 1.6, o.quick ? 20000 : 100000,
                derive_stream(o.seed, stream_tag::generic, 6000 + 5 * j + k));
            ratios.push_back(chk.ratio);
        }
    }
    const double sp = detail::spread(ratios);
    res.pass = sp <= 10.0;
    res.detail = "integral/bound ratio spread over the 5x5 grid: " + detail::fmt(sp);
    return res;
}

// 7. Kernel-family witnesses for the inclusion predicate: target norms stay
//    bracketed at an inside parameter point and grow without bound at an
//    outside one, with the points selected by inclusion_region itself.
inline CriterionResult criterion_inclusion_witnesses(const AcceptanceOptions& o) {
    CriterionResult res{7, "inclusion-witnesses", false, ""};
    const double p = 2.0, q = 2.0, alpha = 0.0;
    const int n = 1;
    struct Target {
        double t, s, b;
    };
    const std::vector<Target> inside_cands = {{2.0, 1.5, 0.0}, {2.0, 1.0, 0.5}, {4.0, 2.0, 0.0}};
    const std::vector<Target> outside_cands = {{2.0, 8.0, 0.0}, {1.0, 4.0, 0.0}};
    std::optional<Target> ins, outs;
    for (const auto& c : inside_cands)
        if (inclusion_region(p, q, alpha, c.t, c.s, c.b, n)) {
            ins = c;
            break;
        }
    for (const auto& c : outside_cands)
        if (!inclusion_region(p, q, alpha, c.t, c.s, c.b, n)) {
            outs = c;
            break;
        }
    if (!ins || !outs) {
        res.detail = "predicate selected no inside/outside target";
        return res;
    }

    const std::vector<double> rads = {0.9, 0.99, 0.999};
    std::vector<double> src, ratio_in, tgt_out;
    for (std::size_t i = 0; i < rads.size(); ++i) {
        const BallPoint a(CVec{rads[i]});
        const HoloFunction f = HoloFunction::make_fa(a, 1.0, alpha, q, p);
        TentNormOptions tno;
        tno.budget = o.quick ? 40000 : 150000;
        tno.seed = derive_stream(o.seed, stream_tag::generic, 7000 + i);
        const double sn =
            tent_norm(f, MeasureSpec::weighted_volume(n + alpha), n, p, q, 2.0, tno).value;
        const double ti =
            tent_norm(f, MeasureSpec::weighted_volume(n + ins->b), n, ins->t, ins->s, 2.0, tno)
                .value;
        const double to =
            tent_norm(f, MeasureSpec::weighted_volume(n + outs->b), n, outs->t, outs->s, 2.0, tno)
                .value;
        src.push_back(sn);
        ratio_in.push_back(ti / sn);
        tgt_out.push_back(to);
    }
    const double src_sp = detail::spread(src);
    const double in_sp = detail::spread(ratio_in);
    const bool grow = tgt_out[0] < tgt_out[1] && tgt_out[1] < tgt_out[2] &&
                      tgt_out[2] >= 10.0 * tgt_out[0];
    res.pass = src_sp <= 10.0 && in_sp <= 10.0 && grow;
    res.detail = "inside (t,s,b)=(" + detail::fmt(ins->t) + "," + detail::fmt(ins->s) + "," +
                 detail::fmt(ins->b) + ") ratio spread " + detail::fmt(in_sp) +
                 "; outside (t,s,b)=(" + detail::fmt(outs->t) + "," + detail::fmt(outs->s) + "," +
                 detail::fmt(outs->b) + ") growth " + detail::fmt(tgt_out[2] / tgt_out[0]) +
                 (grow ? " (monotone)" : " (NOT monotone >= 10x)") + "; source norm spread " +
                 detail::fmt(src_sp);
    return res;
}

// 8. Lower bound of the area operator by the pointwise density functional G:
//    the fitted constant varies by at most 10x along a boundary approach.
inline CriterionResult criterion_area_lower_bound(const AcceptanceOptions& o) {
    CriterionResult res{8, "area-lower-bound", false, ""};
    auto Z = std::make_shared<Lattice>(build_lattice(1, 0.25, 3.5, o.seed));
    // gamma_w = 2n+1+alpha makes the density functional G constant in |a|.
    const MeasureSpec mu = MeasureSpec::lattice_masses(Z, 3.0, 1.0);
    const TentParams P(2.0, 2.0, 2.0, 2.0, 0.0, 0.0, 1);
    MuHat mh(mu, 1, P.r, P.alpha, o.seed);

    std::vector<double> consts;
    const std::vector<double> rads = {0.5, 0.9, 0.99};
    for (std::size_t i = 0; i < rads.size(); ++i) {
        const BallPoint a(CVec{rads[i]});
        const HoloFunction f = HoloFunction::make_fa(a, 1.0, P.alpha, P.q, P.p);
        TentNormOptions tno;
        tno.n_xi = o.quick ? 128 : 512;
        tno.budget = tno.n_xi * 1000;
        tno.seed = derive_stream(o.seed, stream_tag::generic, 8000 + i);
        const double an = area_norm(f, mu, 1, P.s, P.t, P.gamma, tno).value;
        const double g = G_functional(mh, a, P);
        if (!(g > 0.0)) {
            res.detail = "G vanished at |a|=" + detail::fmt(rads[i]);
            return res;
        }
        consts.push_back(an / std::pow(g, 1.0 / P.s));
    }
    const double sp = detail::spread(consts);
    res.pass = sp <= 10.0;
    res.detail = "fitted-constant spread over |a| in {0.5,0.9,0.99}: " + detail::fmt(sp);
    return res;
}

// 9. The closed-form admissible superposition degree matches the inclusion
//    predicate applied at the composed exponents, on random parameter tuples.
inline CriterionResult criterion_predicate_crosscheck(const AcceptanceOptions& o) {
    CriterionResult res{9, "superposition-predicate-crosscheck", false, ""};
    const std::size_t tuples = o.quick ? 100 : 500;
    std::size_t mismatches = 0;
    std::string first;
    for (std::size_t i = 0; i < tuples; ++i) {
        Rng rng(o.seed, stream_tag::generic, 9000 + i);
        const int n = 1 + static_cast<int>(i % 2);
        auto ex = [&] { return std::exp(rng.uniform(std::log(0.5), std::log(4.0))); };
        const double p = ex(), q = ex(), s = ex(), t = ex();
        const double alpha = rng.uniform(-n - 0.5, 3.0);
        const double beta = rng.uniform(-n - 0.5, 3.0);
        const auto sd = superposition_degree(p, q, alpha, t, s, beta, n);
        for (int N = 1; N <= 6; ++N) {
            const bool adm = N <= sd.max_degree;
            const bool inc = inclusion_region(p, q, alpha, N * t, N * s, beta, n);
            if (adm != inc) {
                ++mismatches;
                if (first.empty())
                    first = " first at (p,q,a,t,s,b,n,N)=(" + detail::fmt(p) + "," +
                            detail::fmt(q) + "," + detail::fmt(alpha) + "," + detail::fmt(t) +
                            "," + detail::fmt(s) + "," + detail::fmt(beta) + "," +
                            std::to_string(n) + "," + std::to_string(N) + ")";
            }
        }
    }
    res.pass = mismatches == 0;
    res.detail = std::to_string(mismatches) + " mismatches over " + std::to_string(tuples) +
                 " tuples x N=1..6" + first;
    return res;
}

// 10. Superposition growth witness: the boundary kernel at theta = 1.4 has a
//     stable tent norm under truncation refinement while its square blows up.
inline CriterionResult criterion_superposition_witness(const AcceptanceOptions& o) {
    CriterionResult res{10, "superposition-growth-witness", false, ""};
    const SpherePoint zeta(CVec{1.0});
    const HoloFunction g = HoloFunction::make_g(zeta, 1.4);
    const HoloFunction g2 = superpose({0.0, 0.0, 1.0}, g);
    const MeasureSpec v1 = MeasureSpec::weighted_volume(1.0);  // v_{n+alpha}

    std::vector<double> base_vals, sq_vals;
    for (int K : {10, 14, 18}) {
        TentNormOptions tno;
        tno.budget = o.quick ? 50000 : 200000;
        tno.shell_levels = K;
        tno.cap_depth = K;
        tno.seed = derive_stream(o.seed, stream_tag::generic, 10000 + K);
        base_vals.push_back(tent_norm(g, v1, 1, 2.0, 2.0, 2.0, tno).value);
        sq_vals.push_back(tent_norm(g2, v1, 1, 2.0, 2.0, 2.0, tno).value);
    }
    const bool stable = base_vals[1] <= 2.0 * base_vals[0] && base_vals[2] <= 2.0 * base_vals[1] &&
                        base_vals[2] <= 2.0 * base_vals[0];
    const bool grows = sq_vals[0] < sq_vals[1] && sq_vals[1] < sq_vals[2] &&
                       sq_vals[1] >= 10.0 * sq_vals[0] && sq_vals[2] >= 10.0 * sq_vals[1];
    res.pass = stable && grows;
    res.detail = "base norms (" + detail::fmt(base_vals[0]) + ", " + detail::fmt(base_vals[1]) +
                 ", " + detail::fmt(base_vals[2]) + ") " + (stable ? "stable" : "NOT stable") +
                 "; squared norms (" + detail::fmt(sq_vals[0]) + ", " + detail::fmt(sq_vals[1]) +
                 ", " + detail::fmt(sq_vals[2]) + ") " + (grows ? "grow >= 10x/step" : "do NOT grow");
    return res;
}

// 11. Discretized-sequence vs Carleson-constant ratios stay stable across
//     random weight profiles, and truncated Carleson constants of the plain
//     volume measure vanish toward the boundary.
inline CriterionResult criterion_discretization_stability(const AcceptanceOptions& o) {
    CriterionResult res{11, "discretization-stability", false, ""};
    auto Z = std::make_shared<Lattice>(build_lattice(1, 0.3, 2.2, o.seed));
    const TentParams P(2.0, 2.0, 1.0, 2.0, 0.0, 0.0, 1);

    const int profiles = o.quick ? 3 : 10;
    std::vector<double> lefts, rights;
    for (int i = 0; i < profiles; ++i) {
        Rng rng(o.seed, stream_tag::generic, 11000 + i);
        std::vector<std::pair<BallPoint, double>> atoms;
        for (const auto& a : Z->points())
            atoms.emplace_back(a, std::pow(a.one_minus_sq(), 3.0) * rng.uniform(0.5, 2.0));
        const MeasureSpec mu = MeasureSpec::point_masses(std::move(atoms));
        DiscretizationOptions dopt;
        dopt.budget = o.quick ? 6000 : 15000;
        dopt.sphere_budget = 32;
        dopt.seed = derive_stream(o.seed, stream_tag::generic, 11100 + i);
        const auto rep = discretization_check(mu, Z, P, dopt);
        lefts.push_back(rep.ratio_left);
        rights.push_back(rep.ratio_right);
    }
    const double sp_l = detail::spread(lefts), sp_r = detail::spread(rights);

    CarlesonOptions co;
    co.seed = o.seed;
    co.budget = o.quick ? 50000 : 200000;
    const auto van = vanishing_carleson(MeasureSpec::weighted_volume(0.0), 1, co);

    res.pass = sp_l <= 10.0 && sp_r <= 10.0 && van.decreasing;
    res.detail = "chain-ratio spreads over " + std::to_string(profiles) + " profiles: left " +
                 detail::fmt(sp_l) + ", right " + detail::fmt(sp_r) +
                 "; truncated Carleson constants (" + detail::fmt(van.constants[0]) + ", " +
                 detail::fmt(van.constants[1]) + ", " + detail::fmt(van.constants[2]) + ") " +
                 (van.decreasing ? "halve per step" : "do NOT halve per step");
    return res;
}

inline CriterionResult run_criterion(int id, const AcceptanceOptions& o) {
    try {
        switch (id) {
            case 1: return criterion_metric_invariance(o);
            case 2: return criterion_lattice(o);
            case 3: return criterion_khinchine(o);
            case 4: return criterion_norm_consistency(o);
            case 5: return criterion_bergman_identification(o);
            case 6: return criterion_kernel_bound(o);
            case 7: return criterion_inclusion_witnesses(o);
            case 8: return criterion_area_lower_bound(o);
            case 9: return criterion_predicate_crosscheck(o);
            case 10: return criterion_superposition_witness(o);
            case 11: return criterion_discretization_stability(o);
        }
        throw ContractViolation("run_criterion: id must be 1..11");
    } catch (const std::exception& e) {
        return {id, "criterion-" + std::to_string(id), false, std::string("exception: ") + e.what()};
    }
}

inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o,
                                                   std::vector<int> ids = {}) {
    if (ids.empty())
        for (int i = 1; i <= 11; ++i) ids.push_back(i);
    std::vector<CriterionResult> out;
    out.reserve(ids.size());
    for (int id : ids) out.push_back(run_criterion(id, o));
    return out;
}

}  // namespace tentlab
