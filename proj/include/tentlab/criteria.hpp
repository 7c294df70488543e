#pragma once

#include <cmath>
#include <string>

#include "norms.hpp"

namespace tentlab {

// ---------------------------------------------------------------------------
// Case dispatch for the embedding characterization
// ---------------------------------------------------------------------------

enum class CaseTag {
    Case1,  // p < t, or p = t and q <= s : pointwise sup of G
    Case2,  // p = t and q > s           : nu_mu is a Carleson measure
    Case3,  // p > t and q > s           : U in L^{pt/(s(p-t))}
    Case4,  // p > t and q <= s          : V in L^{pt/(s(p-t))}
};

inline CaseTag case_dispatch(double p, double q, double s, double t) {
    if (!(p > 0 && q > 0 && s > 0 && t > 0))
        throw ContractViolation("case_dispatch: exponents must be positive");
    if (p < t || (p == t && q <= s)) return CaseTag::Case1;
    if (p == t) return CaseTag::Case2;
    return q > s ? CaseTag::Case3 : CaseTag::Case4;
}

inline const char* case_name(CaseTag c) {
    switch (c) {
        case CaseTag::Case1: return "case1";
        case CaseTag::Case2: return "case2";
        case CaseTag::Case3: return "case3";
        case CaseTag::Case4: return "case4";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// The four decision functionals
// ---------------------------------------------------------------------------

// G_mu(z) = mu_hat_r(z) (1-|z|^2)^{(q-s)(n+1+alpha)/q + n s (1/t - 1/p)}
inline double G_functional(const MuHat& mh, const BallPoint& z, const TentParams& P) {
    const double e = (P.q - P.s) * (P.n + 1.0 + P.alpha) / P.q + P.n * P.s * (1.0 / P.t - 1.0 / P.p);
    return mh(z) * std::pow(z.one_minus_sq(), e);
}

// density of nu_mu against v: mu_hat_r(z)^{q/(q-s)} (1-|z|^2)^{alpha+n}
inline double nu_density(const MuHat& mh, const BallPoint& z, const TentParams& P) {
    if (!(P.q > P.s)) throw ContractViolation("nu_density: q > s required");
    return std::pow(mh(z), P.q / (P.q - P.s)) * std::pow(z.one_minus_sq(), P.alpha + P.n);
}

namespace detail {

// Integrates g dv_w over a region, routing weights w <= -1 (infinite-mass)
// through the integrand so the measure object stays valid.
inline IntegralEstimate integrate_weighted(int n, double w, const RegionSpec& region,
                                           const Integrand& g, const IntegrateOptions& opt) {
    const double base = std::max(w, -0.9);
    return integrate(
        MeasureSpec::weighted_volume(base), n, region,
        [&](const BallPoint& z) {
            return g(z) * std::pow(z.one_minus_sq(), w - base);
        },
        opt);
}

}  // namespace detail

// U_mu(xi) = (int_{Gamma(xi)} mu_hat_r^{q/(q-s)} dv_alpha)^{(q-s)/q},
// optionally over Gamma(xi) \ rho_cut*B.
inline IntegralEstimate U_functional(const MuHat& mh, const SpherePoint& xi, const TentParams& P,
                                     const IntegrateOptions& opt, double rho_cut = 0.0) {
    if (!(P.p > P.t) || !(P.q > P.s))
        throw ContractViolation("U_functional: p > t and q > s required");
    const double e = P.q / (P.q - P.s);
    auto est = detail::integrate_weighted(
        P.n, P.alpha, RegionSpec::koranyi(xi, P.gamma),
        [&](const BallPoint& z) {
            if (z.abs() <= rho_cut) return 0.0;
            return std::pow(mh(z), e);
        },
        opt);
    IntegralEstimate out = est;
    out.value = std::pow(est.value, 1.0 / e);
    out.std_error = est.value > 0.0 ? est.std_error / e * std::pow(est.value, 1.0 / e - 1.0) : 0.0;
    return out;
}

// V_mu(xi) = sup_{z in Gamma(xi), |z| > rho_cut} mu_hat_r(z) (1-|z|^2)^{(q-s)(n+1+alpha)/q},
// maximized over a boundary-refined sample of the cone.
inline double V_functional(const MuHat& mh, const SpherePoint& xi, const TentParams& P,
                           int radial_depth, std::uint64_t seed, double rho_cut = 0.0) {
    if (!(P.p > P.t) || !(P.q <= P.s))
        throw ContractViolation("V_functional: p > t and q <= s required");
    const double e = (P.q - P.s) * (P.n + 1.0 + P.alpha) / P.q;
    Rng rng(seed, stream_tag::cone_inner, 0x5F);
    double sup = 0.0;
    for (int j = 0; j <= 2 * radial_depth; ++j) {
        const double rho = 1.0 - std::pow(2.0, -0.5 * j);
        if (rho <= rho_cut && !(rho_cut == 0.0 && j == 0)) continue;
        const double d = 0.5 * P.gamma * (1.0 - rho * rho);
        // central ray point
        if (rho > 0.0) {
            CVec c(xi.coords());
            for (auto& x : c) x *= rho;
            const BallPoint z(c);
            if (in_region(z, RegionSpec::koranyi(xi, P.gamma)) && z.abs() > rho_cut)
                sup = std::max(sup, mh(z) * std::pow(z.one_minus_sq(), e));
        }
        for (int i = 0; i < 8; ++i) {
            auto draw = detail::sample_section(P.n, rho, d, xi, rng);
            if (!draw || draw->weight <= 0.0) continue;
            CVec zc(draw->direction);
            for (auto& x : zc) x *= rho;
            const BallPoint z(std::move(zc));
            if (z.abs() <= rho_cut) continue;
            sup = std::max(sup, mh(z) * std::pow(z.one_minus_sq(), e));
        }
    }
    return sup;
}

// ---------------------------------------------------------------------------
// Verdicts via boundary-refinement slope fitting
// ---------------------------------------------------------------------------

enum class Boundedness { Bounded, Unbounded, Inconclusive };

struct Verdict {
    Boundedness bounded = Boundedness::Inconclusive;
    double functional_value = 0.0;  // statistic at the deepest refinement
    CaseTag tag = CaseTag::Case1;
    std::vector<double> levels;     // statistic per refinement level
    double slope = 0.0;             // d log(statistic) / d log(1/(1-rho^2))
    bool diverged = false;
};

namespace detail {

// Least-squares slope of log(stat) against the refinement axis; decides
// bounded/unbounded with an inconclusive band around zero.
inline void decide(Verdict& v, const std::vector<double>& xs, double band = 0.05) {
    v.functional_value = v.levels.empty() ? 0.0 : v.levels.back();
    if (v.diverged) {
        v.bounded = Boundedness::Inconclusive;
        return;
    }
    bool all_zero = true, any_zero = false;
    for (double s : v.levels) {
        if (s > 0.0) all_zero = false;
        else any_zero = true;
    }
    if (all_zero) {
        v.bounded = Boundedness::Bounded;  // zero functional
        return;
    }
    if (any_zero || v.levels.size() < 2) {
        v.bounded = Boundedness::Inconclusive;
        return;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const std::size_t m = v.levels.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double x = xs[i], y = std::log(v.levels[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    v.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    if (v.slope > band) {
        v.bounded = Boundedness::Unbounded;
    } else if (v.slope < -band) {
        v.bounded = Boundedness::Bounded;
    } else {
        // Slope within the band: converged (final refinement step no longer
        // moves the statistic) means bounded; still drifting means undecided.
        const double last_step =
            std::abs(std::log(v.levels[m - 1]) - std::log(v.levels[m - 2]));
        v.bounded = last_step < 0.01 ? Boundedness::Bounded : Boundedness::Inconclusive;
    }
}

}  // namespace detail

struct VerdictOptions {
    std::size_t budget = 60000;
    std::uint64_t seed = 1;
    std::vector<double> radial_grid = {0.5, 0.9, 0.99, 0.999};
    std::vector<int> truncation_depths = {10, 14, 18};  // for Case3/Case4 L-norms
    std::size_t xi_count = 64;
    double band = 0.05;
};

inline Verdict embedding_verdict(const MeasureSpec& mu, const TentParams& P,
                                 const VerdictOptions& opt) {
    Verdict v;
    v.tag = case_dispatch(P.p, P.q, P.s, P.t);
    MuHat mh(mu, P.n, P.r, P.alpha, opt.seed);

    // Directions at which radial statistics are probed: sampled, plus atom
    // directions for atomic measures.
    std::vector<SpherePoint> dirs = sample_sphere(P.n, std::min<std::size_t>(opt.xi_count, 16),
                                                  derive_stream(opt.seed, stream_tag::generic, 5));
    if (mu.is_atomic()) {
        std::size_t added = 0;
        for (const auto& [a, w] : mu.atoms()) {
            (void)w;
            if (a.abs() < 1e-12) continue;
            CVec c(a.coords());
            for (auto& x : c) x /= a.abs();
            dirs.emplace_back(std::move(c));
            if (++added >= 16) break;
        }
    }

    std::vector<double> xs;
    switch (v.tag) {
        case CaseTag::Case1: {
            for (double rho : opt.radial_grid) {
                double sup = 0.0;
                for (const auto& d : dirs) {
                    CVec c(d.coords());
                    for (auto& x : c) x *= rho;
                    sup = std::max(sup, G_functional(mh, BallPoint(std::move(c)), P));
                }
                v.levels.push_back(sup);
                xs.push_back(std::log(1.0 / (1.0 - rho * rho)));
            }
            break;
        }
        case CaseTag::Case2: {
            // integral Carleson statistic of nu_mu at a -> boundary
            for (double rho : opt.radial_grid) {
                double sup = 0.0;
                for (std::size_t di = 0; di < std::min<std::size_t>(dirs.size(), 6); ++di) {
                    CVec c(dirs[di].coords());
                    for (auto& x : c) x *= rho;
                    const BallPoint a(std::move(c));
                    const double oma = a.one_minus_sq();
                    IntegrateOptions io;
                    io.budget = std::max<std::size_t>(1000, opt.budget / opt.radial_grid.size() / 6);
                    io.seed = derive_stream(opt.seed, stream_tag::generic,
                                            1000 + di * 100 + static_cast<std::uint64_t>(rho * 1e3));
                    const auto est = detail::integrate_weighted(
                        P.n, P.alpha + P.n, RegionSpec::whole_ball(),
                        [&](const BallPoint& z) {
                            return std::pow(mh(z), P.q / (P.q - P.s)) * oma /
                                   std::pow(std::abs(1.0 - inner(z, a)), P.n + 1.0);
                        },
                        io);
                    v.diverged = v.diverged || est.diverged;
                    sup = std::max(sup, est.value);
                }
                v.levels.push_back(sup);
                xs.push_back(std::log(1.0 / (1.0 - rho * rho)));
            }
            break;
        }
        case CaseTag::Case3:
        case CaseTag::Case4: {
            const double lexp = P.p * P.t / (P.s * (P.p - P.t));
            const auto xis = sample_sphere(P.n, opt.xi_count,
                                           derive_stream(opt.seed, stream_tag::generic, 6));
            for (int depth : opt.truncation_depths) {
                const auto vals = parallel_map<double>(xis.size(), [&](std::size_t i) {
                    if (v.tag == CaseTag::Case3) {
                        IntegrateOptions io;
                        io.budget = std::max<std::size_t>(1000, opt.budget / xis.size());
                        io.seed = derive_stream(opt.seed, stream_tag::cone_inner, i);
                        io.shell_levels = depth;
                        return U_functional(mh, xis[i], P, io).value;
                    }
                    return V_functional(mh, xis[i], P, depth,
                                        derive_stream(opt.seed, stream_tag::cone_inner, i));
                });
                double acc = 0.0;
                for (double x : vals) acc += std::pow(x, lexp);
                v.levels.push_back(std::pow(acc / xis.size(), 1.0 / lexp));
                xs.push_back(depth * std::log(2.0));
            }
            break;
        }
    }
    detail::decide(v, xs, opt.band);
    return v;
}

// ---------------------------------------------------------------------------
// Closed-form parameter-region predicates (exact arithmetic)
// ---------------------------------------------------------------------------

// HT^p_{q,alpha} subset HT^t_{s,beta}?
inline bool inclusion_region(double p, double q, double alpha, double t, double s, double beta,
                             int n) {
    if (!(alpha > -n - 1.0) || !(beta > -n - 1.0))
        throw ContractViolation("inclusion_region: weights must exceed -n-1");
    const double A = (n + 1.0 + alpha) / q;
    const double B = (n + 1.0 + beta) / s;
    if (p >= t && q > s) return A < B;
    if (p >= t) return A <= B;  // q <= s
    return A + n / p <= B + n / t;  // p < t
}

// Is the inclusion compact?
inline bool compact_inclusion_region(double p, double q, double alpha, double t, double s,
                                     double beta, int n) {
    if (!(alpha > -n - 1.0) || !(beta > -n - 1.0))
        throw ContractViolation("compact_inclusion_region: weights must exceed -n-1");
    const double A = (n + 1.0 + alpha) / q;
    const double B = (n + 1.0 + beta) / s;
    if (p >= t) return A < B;
    return A + n / p < B + n / t;
}

struct SuperpositionDegree {
    int max_degree = 0;    // largest admissible N (0: none)
    bool strict = false;   // the defining bound excludes equality
    double bound = 0.0;    // the raw real bound on N
};

// Largest N such that every polynomial of degree N superposes
// HT^p_{q,alpha} -> HT^t_{s,beta}.
inline SuperpositionDegree superposition_degree(double p, double q, double alpha, double t,
                                                double s, double beta, int n) {
    if (!(alpha > -n - 1.0) || !(beta > -n - 1.0))
        throw ContractViolation("superposition_degree: weights must exceed -n-1");
    SuperpositionDegree out;
    const double A = p * (n + 1.0 + alpha) / q;
    const double B = t * (n + 1.0 + beta) / s;
    if (A < B) {
        out.bound = p * q * (t * (n + 1.0 + beta) + n * s) / (s * t * (p * (n + 1.0 + alpha) + n * q));
        out.strict = false;
    } else {
        out.bound = q * (n + 1.0 + beta) / (s * (n + 1.0 + alpha));
        out.strict = alpha > beta;
    }
    double d = std::floor(out.bound + 1e-12);
    if (out.strict && std::abs(out.bound - d) <= 1e-12) d -= 1.0;
    out.max_degree = std::max(0, static_cast<int>(d));
    return out;
}

// Bergman-space specialization A^p_alpha -> A^q_beta via the identification
// A^p_alpha = HT^p_{p, alpha-n}.
inline SuperpositionDegree superposition_degree_bergman(double p, double alpha, double q,
                                                        double beta, int n) {
    if (!(alpha > -1.0) || !(beta > -1.0))
        throw ContractViolation("superposition_degree_bergman: weights must exceed -1");
    return superposition_degree(p, p, alpha - n, q, q, beta - n, n);
}

// ---------------------------------------------------------------------------
// Discretized sequences and the necessity test
// ---------------------------------------------------------------------------

// eta_k^{(delta)} = mu_hat_delta(a_k) (1-|a_k|^2)^{(q-s)(n+1+alpha)/q}
inline std::vector<double> eta_sequence(const MeasureSpec& mu, const Lattice& Z, double delta,
                                        const TentParams& P, std::uint64_t seed) {
    MuHat mh(mu, P.n, delta, P.alpha, seed);
    const double e = (P.q - P.s) * (P.n + 1.0 + P.alpha) / P.q;
    std::vector<double> eta(Z.size());
    for (std::size_t k = 0; k < Z.size(); ++k)
        eta[k] = mh(Z.point(k)) * std::pow(Z.point(k).one_minus_sq(), e);
    return eta;
}

struct NecessityReport {
    double lhs = 0.0;      // int (sum_{a_k in Gamma(xi)} |lambda_k|^s eta_k^{(2r)})^{t/s} dsigma
    double rhs = 0.0;      // opnorm^t ||lambda||^t_{T^p_q(Z)}
    double ratio = 0.0;
    double opnorm = 0.0;   // max over sampled tau of ||A_{mu,s} F_tau||_{L^t} / ||F_tau||
};

struct NecessityOptions {
    std::size_t sphere_budget = 256;
    std::size_t norm_budget = 80000;
    std::uint64_t seed = 1;
    double theta = 0.0;  // 0: use n*max{1, q/p, 1/p, 1/q} + 0.5
    std::vector<double> taus = {0.03125, 0.28125, 0.53125, 0.78125};
};

inline NecessityReport necessity_test(const MeasureSpec& mu, std::shared_ptr<const Lattice> Z,
                                      const CVec& lambda, const TentParams& P,
                                      const NecessityOptions& opt) {
    if (lambda.size() != Z->size())
        throw ContractViolation("necessity_test: coefficients must match the lattice");
    NecessityReport rep;
    const auto eta = eta_sequence(mu, *Z, 2.0 * P.r, P, opt.seed);

    const auto xis = sample_sphere(P.n, opt.sphere_budget, opt.seed);
    double acc = 0.0;
    for (const auto& xi : xis) {
        double s = 0.0;
        for (std::size_t k = 0; k < lambda.size(); ++k) {
            const BallPoint& a = Z->point(k);
            if (std::abs(1.0 - inner(a, xi)) < 0.5 * P.gamma * a.one_minus_sq())
                s += std::pow(std::abs(lambda[k]), P.s) * eta[k];
        }
        acc += std::pow(s, P.t / P.s);
    }
    rep.lhs = acc / xis.size();

    const double theta =
        opt.theta > 0.0
            ? opt.theta
            : P.n * std::max({1.0, P.q / P.p, 1.0 / P.p, 1.0 / P.q}) + 0.5;
    const LatticeSum base{Z, lambda, theta, P.alpha, P.q};
    const MeasureSpec va = MeasureSpec::weighted_volume(P.n + P.alpha);
    TentNormOptions tno;
    tno.budget = opt.norm_budget;
    for (std::size_t i = 0; i < opt.taus.size(); ++i) {
        const HoloFunction F = HoloFunction::rademacher_sum(base, opt.taus[i]);
        tno.seed = derive_stream(opt.seed, stream_tag::generic, 40 + i);
        const double fn = tent_norm(F, va, P.n, P.p, P.q, P.gamma, tno).value;
        if (!(fn > 0.0)) continue;
        const double an = area_norm(F, mu, P.n, P.s, P.t, P.gamma, tno).value;
        rep.opnorm = std::max(rep.opnorm, an / fn);
    }
    const double lam_norm =
        seq_tent_norm(lambda, *Z, SeqExponent::finite(P.p), SeqExponent::finite(P.q),
                      opt.sphere_budget, opt.seed, P.gamma)
            .value;
    rep.rhs = std::pow(rep.opnorm, P.t) * std::pow(lam_norm, P.t);
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// Compactness statistics (truncated functionals over rho -> 1)
// ---------------------------------------------------------------------------

struct CompactnessReport {
    CaseTag tag;
    std::vector<double> rho;
    std::vector<double> statistics;
    std::string trend;  // "decreasing", "flat", or "growing"
};

inline CompactnessReport compactness_evaluators(const MeasureSpec& mu, const TentParams& P,
                                                std::vector<double> rhos,
                                                const VerdictOptions& opt) {
    for (std::size_t i = 1; i < rhos.size(); ++i)
        if (!(rhos[i] > rhos[i - 1]))
            throw ContractViolation("compactness_evaluators: rho values must increase");
    CompactnessReport rep;
    rep.tag = case_dispatch(P.p, P.q, P.s, P.t);
    rep.rho = std::move(rhos);
    MuHat mh(mu, P.n, P.r, P.alpha, opt.seed);
    const auto dirs = sample_sphere(P.n, 16, derive_stream(opt.seed, stream_tag::generic, 5));

    for (double rho_cut : rep.rho) {
        double stat = 0.0;
        switch (rep.tag) {
            case CaseTag::Case1: {
                // sup of G over the annulus |z| > rho_cut
                for (double f : {0.5, 0.9, 0.99}) {
                    const double rho = 1.0 - (1.0 - rho_cut) * (1.0 - f);
                    for (const auto& d : dirs) {
                        CVec c(d.coords());
                        for (auto& x : c) x *= rho;
                        stat = std::max(stat, G_functional(mh, BallPoint(std::move(c)), P));
                    }
                }
                break;
            }
            case CaseTag::Case2: {
                CarlesonOptions co;
                co.seed = opt.seed;
                co.budget = opt.budget;
                co.rho_cut = rho_cut;
                const double e = P.q / (P.q - P.s);
                // nu_mu as a density against dv_{alpha+n}
                const double base = std::max(P.alpha + P.n, -0.9);
                stat = carleson_constant(
                           MeasureSpec::weighted_volume(base), P.n, co,
                           [&](const BallPoint& z) {
                               return std::pow(mh(z), e) *
                                      std::pow(z.one_minus_sq(), P.alpha + P.n - base);
                           })
                           .cap_statistic;
                break;
            }
            case CaseTag::Case3:
            case CaseTag::Case4: {
                const double lexp = P.p * P.t / (P.s * (P.p - P.t));
                const auto xis = sample_sphere(P.n, std::min<std::size_t>(opt.xi_count, 48),
                                               derive_stream(opt.seed, stream_tag::generic, 6));
                const auto vals = parallel_map<double>(xis.size(), [&](std::size_t i) {
                    if (rep.tag == CaseTag::Case3) {
                        IntegrateOptions io;
                        io.budget = std::max<std::size_t>(1000, opt.budget / xis.size());
                        io.seed = derive_stream(opt.seed, stream_tag::cone_inner, i);
                        return U_functional(mh, xis[i], P, io, rho_cut).value;
                    }
                    return V_functional(mh, xis[i], P, 14,
                                        derive_stream(opt.seed, stream_tag::cone_inner, i),
                                        rho_cut);
                });
                double acc = 0.0;
                for (double x : vals) acc += std::pow(x, lexp);
                stat = std::pow(acc / xis.size(), 1.0 / lexp);
                break;
            }
        }
        rep.statistics.push_back(stat);
    }

    bool dec = true, grow = true;
    for (std::size_t i = 1; i < rep.statistics.size(); ++i) {
        if (!(rep.statistics[i] <= 0.5 * rep.statistics[i - 1])) dec = false;
        if (!(rep.statistics[i] >= 2.0 * rep.statistics[i - 1])) grow = false;
    }
    rep.trend = dec ? "decreasing" : (grow ? "growing" : "flat");
    return rep;
}

// ---------------------------------------------------------------------------
// Discretization checks
// ---------------------------------------------------------------------------

struct DiscretizationReport {
    // chain ||eta^{(r/2)}|| <= C ||nu_mu||^{(q-s)/q}_CM <= C' ||eta^{(2r)}||
    double eta_half = 0.0;
    double nu_cm = 0.0;
    double eta_double = 0.0;
    double ratio_left = 0.0;   // nu_cm / eta_half
    double ratio_right = 0.0;  // eta_double / nu_cm
    // integral-vs-sum display at exponents (p_d, q_d, beta_d)
    double int_side = 0.0;
    double sum_side = 0.0;
    // sup display on sampled xi
    double sup_int_side = 0.0;
    double sup_sum_side = 0.0;
};

struct DiscretizationOptions {
    std::size_t budget = 40000;
    std::size_t sphere_budget = 64;
    std::uint64_t seed = 1;
    double p_d = 1.0, q_d = 1.0, beta_d = 0.0;  // exponents of the two displays
};

inline DiscretizationReport discretization_check(const MeasureSpec& mu,
                                                 std::shared_ptr<const Lattice> Z,
                                                 const TentParams& P,
                                                 const DiscretizationOptions& opt) {
    if (!(P.q > P.s)) throw ContractViolation("discretization_check: q > s required");
    DiscretizationReport rep;
    const double qq = P.q / (P.q - P.s);

    const auto eta_h = eta_sequence(mu, *Z, P.r / 2.0, P, opt.seed);
    const auto eta_d = eta_sequence(mu, *Z, 2.0 * P.r, P, opt.seed);
    CVec ch(eta_h.size()), cd(eta_d.size());
    for (std::size_t k = 0; k < eta_h.size(); ++k) {
        ch[k] = eta_h[k];
        cd[k] = eta_d[k];
    }
    rep.eta_half = seq_tent_norm(ch, *Z, SeqExponent::inf(), SeqExponent::finite(qq),
                                 opt.sphere_budget, opt.seed)
                       .value;
    rep.eta_double = seq_tent_norm(cd, *Z, SeqExponent::inf(), SeqExponent::finite(qq),
                                   opt.sphere_budget, opt.seed)
                         .value;

    MuHat mh(mu, P.n, P.r, P.alpha, opt.seed);
    {
        CarlesonOptions co;
        co.seed = opt.seed;
        co.budget = opt.budget;
        co.xi_count = 8;  // the density evaluations dominate the cost here
        const double base = std::max(P.alpha + P.n, -0.9);
        const double cm = carleson_constant(
                              MeasureSpec::weighted_volume(base), P.n, co,
                              [&](const BallPoint& z) {
                                  return std::pow(mh(z), qq) *
                                         std::pow(z.one_minus_sq(), P.alpha + P.n - base);
                              })
                              .cap_statistic;
        rep.nu_cm = std::pow(cm, (P.q - P.s) / P.q);
    }
    rep.ratio_left = rep.eta_half > 0.0 ? rep.nu_cm / rep.eta_half : 0.0;
    rep.ratio_right = rep.nu_cm > 0.0 ? rep.eta_double / rep.nu_cm : 0.0;

    // Two discretization displays at (p_d, q_d, beta_d):
    //   int (int_{Gamma} mu_hat_r^p dv_b)^q dsigma <~
    //       int (sum_{a_k in Gamma} mu_hat_{2r}(a_k)^p (1-|a_k|^2)^{n+1+b})^q dsigma
    //   int sup_{Gamma} mu_hat_r^p (1-|z|^2)^b dsigma <~
    //       int sup_{a_k in Gamma} mu_hat_{2r}(a_k)^p (1-|a_k|^2)^b dsigma
    MuHat mh2(mu, P.n, 2.0 * P.r, P.alpha, opt.seed);
    const auto xis = sample_sphere(P.n, opt.sphere_budget,
                                   derive_stream(opt.seed, stream_tag::generic, 21));
    double acc_int = 0.0, acc_sum = 0.0, acc_sup_i = 0.0, acc_sup_s = 0.0;
    for (std::size_t i = 0; i < xis.size(); ++i) {
        const auto& xi = xis[i];
        IntegrateOptions io;
        io.budget = std::max<std::size_t>(1000, opt.budget / xis.size());
        io.seed = derive_stream(opt.seed, stream_tag::cone_inner, 300 + i);
        const auto inner_est = detail::integrate_weighted(
            P.n, opt.beta_d, RegionSpec::koranyi(xi, P.gamma),
            [&](const BallPoint& z) { return std::pow(mh(z), opt.p_d); }, io);
        acc_int += std::pow(inner_est.value, opt.q_d);

        double sum_cone = 0.0, sup_cone_s = 0.0;
        for (std::size_t k = 0; k < Z->size(); ++k) {
            const BallPoint& a = Z->point(k);
            if (!(std::abs(1.0 - inner(a, xi)) < 0.5 * P.gamma * a.one_minus_sq())) continue;
            const double m2 = std::pow(mh2(a), opt.p_d);
            sum_cone += m2 * std::pow(a.one_minus_sq(), P.n + 1.0 + opt.beta_d);
            sup_cone_s = std::max(sup_cone_s, m2 * std::pow(a.one_minus_sq(), opt.beta_d));
        }
        acc_sum += std::pow(sum_cone, opt.q_d);
        acc_sup_s += sup_cone_s;

        // sampled sup of the continuous side over the cone
        double sup_i = 0.0;
        Rng rng(opt.seed, stream_tag::cone_inner, 900 + i);
        for (int j = 0; j <= 24; ++j) {
            const double rho = 1.0 - std::pow(2.0, -0.5 * j);
            const double dd = 0.5 * P.gamma * (1.0 - rho * rho);
            for (int m = 0; m < 4; ++m) {
                auto draw = detail::sample_section(P.n, rho, dd, xi, rng);
                if (!draw || draw->weight <= 0.0) continue;
                CVec zc(draw->direction);
                for (auto& x : zc) x *= rho;
                const BallPoint z(std::move(zc));
                sup_i = std::max(sup_i,
                                 std::pow(mh(z), opt.p_d) * std::pow(z.one_minus_sq(), opt.beta_d));
            }
        }
        acc_sup_i += sup_i;
    }
    rep.int_side = acc_int / xis.size();
    rep.sum_side = acc_sum / xis.size();
    rep.sup_int_side = acc_sup_i / xis.size();
    rep.sup_sum_side = acc_sup_s / xis.size();
    return rep;
}

}  // namespace tentlab
