#pragma once

#include <cmath>
#include <optional>

#include "carleson.hpp"
#include "functions.hpp"
#include "measures.hpp"

namespace tentlab {

// Exponent tuple governing every functional.
struct TentParams {
    double p, q, s, t;
    double alpha, beta;
    int n;
    double gamma = 2.0;  // cone aperture
    double r = 0.5;      // Bergman-ball radius of mu_hat

    TentParams(double p_, double q_, double s_, double t_, double alpha_, double beta_, int n_,
               double gamma_ = 2.0, double r_ = 0.5)
        : p(p_), q(q_), s(s_), t(t_), alpha(alpha_), beta(beta_), n(n_), gamma(gamma_), r(r_) {
        if (!(p > 0 && q > 0 && s > 0 && t > 0))
            throw ContractViolation("TentParams: exponents must be positive");
        if (!(alpha > -n - 1.0) || !(beta > -n - 1.0))
            throw ContractViolation("TentParams: weights must exceed -n-1");
        if (n < 1) throw ContractViolation("TentParams: n must be >= 1");
        if (!(gamma > 1.0)) throw ContractViolation("TentParams: aperture must be > 1");
        if (!(r > 0.0 && r < 1.0)) throw ContractViolation("TentParams: r must be in (0,1)");
    }
};

// ---------------------------------------------------------------------------
// Outer sphere sampling, optionally stratified in dyadic rings around a
// boundary direction where the integrand is singular.
// ---------------------------------------------------------------------------

namespace detail {

// sigma{ |1 - <xi, zeta>| < eps }, exact for n = 1, 2.
inline double boundary_cap_sigma(int n, double eps) {
    if (eps <= 0.0) return 0.0;
    if (n == 1) {
        if (eps >= 2.0) return 1.0;
        return (2.0 / M_PI) * std::asin(eps / 2.0);
    }
    if (n == 2) {
        if (eps >= 2.0) return 1.0;
        // lens of the unit disk and the disk of radius eps about 1
        const double a1 = std::acos(std::clamp(1.0 - eps * eps / 2.0, -1.0, 1.0));
        const double a2 = std::acos(std::clamp(eps / 2.0, -1.0, 1.0));
        const double area = a1 + eps * eps * a2 - 0.5 * eps * std::sqrt(std::max(0.0, 4.0 - eps * eps));
        return area / M_PI;
    }
    throw ContractViolation("boundary_cap_sigma: n <= 2 only");
}

// Uniform sigma-draw of xi with eps1 <= |1 - <xi, zeta>| < eps2 (eps1 = 0
// gives the full cap).  Rejection against exact densities; weights are taken
// from boundary_cap_sigma, so the draw only needs the correct conditional law.
inline SpherePoint sample_boundary_ring(int n, const SpherePoint& zeta, double eps1, double eps2,
                                        Rng& rng) {
    if (n == 1) {
        const double t1 = 2.0 * std::asin(std::min(1.0, eps1 / 2.0));
        const double t2 = 2.0 * std::asin(std::min(1.0, eps2 / 2.0));
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const double theta = sign * (t1 + (t2 - t1) * rng.uniform());
        return SpherePoint({std::polar(1.0, theta) * zeta.coords()[0]});
    }
    // n = 2: w = <xi, zeta> uniform on the unit disk; draw w uniformly from
    // the ring {eps1 <= |1-w| < eps2} intersected with the disk by polar
    // sampling around 1 with rejection.
    for (int tries = 0; tries < 10000; ++tries) {
        const double rr =
            std::sqrt(eps1 * eps1 + (eps2 * eps2 - eps1 * eps1) * rng.uniform());
        const double phi = 2.0 * M_PI * rng.uniform();
        const cdouble w = 1.0 - std::polar(rr, phi);
        if (std::norm(w) >= 1.0) continue;
        const double res = std::sqrt(std::max(0.0, 1.0 - std::norm(w)));
        const double psi = 2.0 * M_PI * rng.uniform();
        const cdouble ph = std::polar(1.0, psi);
        const cdouble x1 = zeta.coords()[0], x2 = zeta.coords()[1];
        CVec omega(2);
        omega[0] = w * x1 + res * ph * (-std::conj(x2));
        omega[1] = w * x2 + res * ph * std::conj(x1);
        return SpherePoint(std::move(omega));
    }
    throw InternalError("sample_boundary_ring: rejection failed");
}

struct OuterSample {
    SpherePoint xi;
    double weight;        // sigma weight of its stratum / samples in stratum
    std::size_t stratum;  // for diagnostics
};

// Builds the outer xi sample: either plain uniform, or stratified into dyadic
// rings |1 - <xi,zeta>| ~ 2^{-m} around a singular direction zeta.
inline std::vector<OuterSample> outer_samples(int n, std::size_t n_xi,
                                              const std::vector<SpherePoint>& sing, int depth,
                                              std::uint64_t seed) {
    std::vector<OuterSample> out;
    if (sing.empty() || (n != 1 && n != 2)) {
        const auto xs = sample_sphere(n, n_xi, seed);
        out.reserve(xs.size());
        for (const auto& x : xs) out.push_back({x, 1.0 / n_xi, 0});
        return out;
    }
    const SpherePoint& zeta = sing.front();
    // Strata: far region |1-<xi,zeta>| >= 1, rings [2^{-m-1}, 2^{-m}) for
    // m = 0..depth-1, and the core cap |1-<xi,zeta>| < 2^{-depth}.
    const std::size_t strata = static_cast<std::size_t>(depth) + 2;
    const std::size_t per = std::max<std::size_t>(8, n_xi / strata);
    Rng rng(seed, stream_tag::sphere_sample, 999);
    // far stratum
    {
        const double w_far = 1.0 - boundary_cap_sigma(n, 1.0);
        std::size_t got = 0;
        while (got < per) {
            CVec c = rng.unit_sphere(n);
            SpherePoint x(std::move(c));
            if (std::abs(1.0 - inner(x, zeta)) < 1.0) continue;
            out.push_back({std::move(x), w_far / per, 0});
            ++got;
        }
    }
    for (int m = 0; m <= depth; ++m) {
        const double e2 = std::pow(2.0, -m);
        const double e1 = (m == depth) ? 0.0 : e2 / 2.0;
        const double w = boundary_cap_sigma(n, e2) - boundary_cap_sigma(n, e1);
        if (w <= 0.0) continue;
        for (std::size_t i = 0; i < per; ++i)
            out.push_back({sample_boundary_ring(n, zeta, e1, e2, rng), w / per,
                           static_cast<std::size_t>(m) + 1});
    }
    return out;
}

}  // namespace detail

struct TentNormOptions {
    std::size_t budget = 200000;
    std::uint64_t seed = 1;
    std::size_t n_xi = 0;    // 0: derived from budget
    int shell_levels = 20;   // radial truncation of inner integrals
    int cap_depth = 18;      // outer stratification depth near singular directions
};

// ||f||_{T^p_q(mu)} by sphere sampling of the outer integral and stratified
// quadrature of each cone integral.
inline IntegralEstimate tent_norm(const HoloFunction& f, const MeasureSpec& mu, int n, double p,
                                  double q, double gamma, const TentNormOptions& opt) {
    if (!(p > 0 && q > 0)) throw ContractViolation("tent_norm: p, q must be positive");
    if (!(gamma > 1.0)) throw ContractViolation("tent_norm: aperture must be > 1");
    const std::size_t n_xi =
        opt.n_xi ? opt.n_xi : std::clamp<std::size_t>(opt.budget / 1000, 64, 4096);
    const std::size_t inner_budget = std::max<std::size_t>(1000, opt.budget / n_xi);

    std::vector<SpherePoint> sing;
    if (n <= 2) sing = singular_directions(f);
    const auto outer = detail::outer_samples(n, n_xi, sing, opt.cap_depth, opt.seed);

    struct Cell {
        double contrib = 0.0;  // weight * inner^{p/q}
        bool diverged = false;
    };
    const auto cells = parallel_map<Cell>(outer.size(), [&](std::size_t i) {
        const auto& os = outer[i];
        IntegrateOptions io;
        io.budget = inner_budget;
        io.seed = derive_stream(opt.seed, stream_tag::cone_inner, i);
        io.shell_levels = opt.shell_levels;
        const auto inner = integrate(
            mu, n, RegionSpec::koranyi(os.xi, gamma),
            [&](const BallPoint& z) {
                const double av = std::abs(evaluate(f, z));
                return std::pow(av, q) / std::pow(z.one_minus_sq(), n);
            },
            io);
        Cell c;
        c.contrib = os.weight * std::pow(inner.value, p / q);
        c.diverged = inner.diverged;
        return c;
    });

    // Group by stratum for a delta-method error estimate.
    IntegralEstimate est;
    est.truncation_radius = 1.0 - std::pow(2.0, -opt.shell_levels);
    double total = 0.0, var = 0.0;
    std::size_t smax = 0;
    for (const auto& os : outer) smax = std::max(smax, os.stratum);
    for (std::size_t s = 0; s <= smax; ++s) {
        double sum = 0.0, sum2 = 0.0;
        std::size_t m = 0;
        for (std::size_t i = 0; i < outer.size(); ++i) {
            if (outer[i].stratum != s) continue;
            sum += cells[i].contrib;
            sum2 += cells[i].contrib * cells[i].contrib;
            ++m;
            est.diverged = est.diverged || cells[i].diverged;
        }
        if (m == 0) continue;
        total += sum;
        // variance of the stratum sum of m weighted draws
        const double mean = sum / m;
        var += std::max(0.0, sum2 / m - mean * mean) * m;
    }
    est.samples_used = outer.size() * inner_budget;
    est.value = std::pow(total, 1.0 / p);
    if (total > 0.0) est.std_error = std::sqrt(var) / p * std::pow(total, 1.0 / p - 1.0);
    return est;
}

// A_{mu,s} f (xi) = (int_{Gamma_gamma(xi)} |f|^s dmu / (1-|z|^2)^n)^{1/s}
inline IntegralEstimate area_operator(const HoloFunction& f, const MeasureSpec& mu, int n, double s,
                                      const SpherePoint& xi, double gamma, std::size_t budget,
                                      std::uint64_t seed) {
    if (!(s > 0)) throw ContractViolation("area_operator: s must be positive");
    IntegrateOptions io;
    io.budget = std::max<std::size_t>(1000, budget);
    io.seed = seed;
    auto inner = integrate(
        mu, n, RegionSpec::koranyi(xi, gamma),
        [&](const BallPoint& z) {
            const double av = std::abs(evaluate(f, z));
            return std::pow(av, s) / std::pow(z.one_minus_sq(), n);
        },
        io);
    IntegralEstimate est = inner;
    est.value = std::pow(inner.value, 1.0 / s);
    est.std_error = inner.value > 0.0
                        ? inner.std_error / s * std::pow(inner.value, 1.0 / s - 1.0)
                        : 0.0;
    return est;
}

// ||A_{mu,s} f||_{L^t(S_n)} by sphere sampling.  Uses its own sampling streams
// so it can serve as an independent cross-check of tent_norm(f, mu, t, s).
inline IntegralEstimate area_norm(const HoloFunction& f, const MeasureSpec& mu, int n, double s,
                                  double t, double gamma, const TentNormOptions& opt) {
    const std::size_t n_xi =
        opt.n_xi ? opt.n_xi : std::clamp<std::size_t>(opt.budget / 1000, 64, 4096);
    const std::size_t inner_budget = std::max<std::size_t>(1000, opt.budget / n_xi);
    const std::uint64_t outer_seed = derive_stream(opt.seed, stream_tag::generic, 0xA1EA);
    const auto xis = sample_sphere(n, n_xi, outer_seed);
    struct Cell {
        double v;
        bool diverged;
    };
    const auto cells = parallel_map<Cell>(n_xi, [&](std::size_t i) {
        const auto a = area_operator(f, mu, n, s, xis[i], gamma, inner_budget,
                                     derive_stream(outer_seed, stream_tag::cone_inner, i));
        return Cell{std::pow(a.value, t), a.diverged};
    });
    double sum = 0.0, sum2 = 0.0;
    IntegralEstimate est;
    for (const auto& c : cells) {
        sum += c.v;
        sum2 += c.v * c.v;
        est.diverged = est.diverged || c.diverged;
    }
    const double mean = sum / n_xi;
    const double var = std::max(0.0, sum2 / n_xi - mean * mean) / n_xi;
    est.value = std::pow(mean, 1.0 / t);
    if (mean > 0.0) est.std_error = std::sqrt(var) / t * std::pow(mean, 1.0 / t - 1.0);
    est.samples_used = n_xi * inner_budget;
    return est;
}

// ---------------------------------------------------------------------------
// Sequence tent norms
// ---------------------------------------------------------------------------

struct SeqExponent {
    bool is_inf = false;
    double value = 0.0;

    static SeqExponent finite(double v) {
        if (!(v > 0)) throw ContractViolation("SeqExponent: value must be positive");
        return {false, v};
    }
    static SeqExponent inf() { return {true, 0.0}; }
};

struct SeqNormResult {
    double value = 0.0;
    double vacuous_fraction = 0.0;  // sampled cones containing no lattice point
};

inline SeqNormResult seq_tent_norm(const CVec& c, const Lattice& Z, SeqExponent p, SeqExponent q,
                                   std::size_t sphere_budget, std::uint64_t seed,
                                   double gamma = 2.0) {
    if (c.size() != Z.size())
        throw ContractViolation("seq_tent_norm: coefficients must match the lattice");
    if (p.is_inf && q.is_inf)
        throw ContractViolation("seq_tent_norm: (inf, inf) is not one of the defined cases");

    if (p.is_inf) {
        // T^infty_q(Z) via the Carleson constant of
        // mu_c = sum |c_k|^q (1-|a_k|^2)^n delta_{a_k}.
        std::vector<std::pair<BallPoint, double>> atoms;
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double w = std::pow(std::abs(c[k]), q.value) *
                             std::pow(Z.point(k).one_minus_sq(), Z.n());
            if (w > 0.0) atoms.emplace_back(Z.point(k), w);
        }
        SeqNormResult res;
        if (atoms.empty()) return res;
        CarlesonOptions opt;
        opt.seed = seed;
        res.value = std::pow(
            carleson_constant(MeasureSpec::point_masses(std::move(atoms)), Z.n(), opt).cap_statistic,
            1.0 / q.value);
        return res;
    }

    const auto xis = sample_sphere(Z.n(), std::max<std::size_t>(sphere_budget, 16), seed);
    double sum = 0.0;
    std::size_t vacuous = 0;
    for (const auto& xi : xis) {
        double inner_sum = 0.0;
        double sup = 0.0;
        bool any = false;
        const double half_g = 0.5 * gamma;
        for (std::size_t k = 0; k < c.size(); ++k) {
            const BallPoint& a = Z.point(k);
            if (!(std::abs(1.0 - inner(a, xi)) < half_g * a.one_minus_sq())) continue;
            any = true;
            const double m = std::abs(c[k]);
            if (q.is_inf)
                sup = std::max(sup, m);
            else
                inner_sum += std::pow(m, q.value);
        }
        if (!any) ++vacuous;
        const double base = q.is_inf ? sup : inner_sum;
        sum += q.is_inf ? std::pow(base, p.value)
                        : std::pow(base, p.value / q.value);
    }
    SeqNormResult res;
    res.value = std::pow(sum / xis.size(), 1.0 / p.value);
    res.vacuous_fraction = static_cast<double>(vacuous) / xis.size();
    return res;
}

// <c,d> = sum_k c_k conj(d_k) (1-|a_k|^2)^n
inline cdouble pairing(const CVec& c, const CVec& d, const Lattice& Z) {
    if (c.size() != d.size() || c.size() != Z.size())
        throw ContractViolation("pairing: length mismatch");
    cdouble s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k)
        s += c[k] * std::conj(d[k]) * std::pow(Z.point(k).one_minus_sq(), Z.n());
    return s;
}

struct ProductCheck {
    double lhs = 0.0;
    double rhs_product = 0.0;
    double ratio = 0.0;
};

// ||c.d||_{T^{p0}_{q0}} vs ||c||_{T^{p1}_{q1}} ||d||_{T^{p2}_{q2}}, with the
// exponent tuple constrained as in the factorization theorem for sequence
// tent spaces: 1/p_j + 1/q_j > 0 and the harmonic sums must match.
inline ProductCheck product_inequality_check(const CVec& c, const CVec& d, const Lattice& Z,
                                             SeqExponent p0, SeqExponent q0, SeqExponent p1,
                                             SeqExponent q1, SeqExponent p2, SeqExponent q2,
                                             std::size_t sphere_budget, std::uint64_t seed) {
    auto invof = [](const SeqExponent& e) { return e.is_inf ? 0.0 : 1.0 / e.value; };
    for (auto [pe, qe] : {std::pair{p0, q0}, {p1, q1}, {p2, q2}})
        if (!(invof(pe) + invof(qe) > 0.0))
            throw ContractViolation("product_inequality_check: 1/p_j + 1/q_j must be positive");
    if (std::abs(invof(p1) + invof(p2) - invof(p0)) > 1e-12 ||
        std::abs(invof(q1) + invof(q2) - invof(q0)) > 1e-12)
        throw ContractViolation("product_inequality_check: exponent sums do not match");
    if (c.size() != d.size()) throw ContractViolation("product_inequality_check: length mismatch");
    CVec cd(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) cd[k] = c[k] * d[k];
    ProductCheck out;
    out.lhs = seq_tent_norm(cd, Z, p0, q0, sphere_budget, seed).value;
    out.rhs_product = seq_tent_norm(c, Z, p1, q1, sphere_budget, seed).value *
                      seq_tent_norm(d, Z, p2, q2, sphere_budget, seed).value;
    out.ratio = out.rhs_product > 0.0 ? out.lhs / out.rhs_product : 0.0;
    return out;
}

// Exact dyadic average of |sum c_k r_k(tau)|^p over tau, divided by
// (sum |c_k|^2)^{p/2}.
inline double khinchine_ratio(const CVec& c, double p, int K) {
    if (K < 1 || K > 16) throw ContractViolation("khinchine_ratio: K must be in 1..16");
    if (c.size() > static_cast<std::size_t>(K))
        throw ContractViolation("khinchine_ratio: more coefficients than K");
    const std::size_t panels = std::size_t{1} << K;
    double acc = 0.0;
    for (std::size_t m = 0; m < panels; ++m) {
        const double tau = (2.0 * m + 1.0) / (2.0 * panels);
        cdouble s = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k)
            s += c[k] * static_cast<double>(rademacher(static_cast<int>(k) + 1, tau));
        acc += std::pow(std::abs(s), p);
    }
    acc /= panels;
    double l2 = 0.0;
    for (const auto& x : c) l2 += std::norm(x);
    if (l2 == 0.0) return acc == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return acc / std::pow(l2, p / 2.0);
}

struct ForelliRudinCheck {
    double integral = 0.0;
    double std_error = 0.0;
    double bound = 0.0;
    double ratio = 0.0;
};

// int (1-|w|^2)^s dv(w) / (|1-<u,w>|^r |1-<z,w>|^t), compared against
// |1-<z,u>|^{-(r+t-s-n-1)}.
inline ForelliRudinCheck forelli_rudin_check(const BallPoint& u, const BallPoint& z, double s_exp,
                                             double r_exp, double t_exp, std::size_t budget,
                                             std::uint64_t seed) {
    const int n = u.n();
    if (z.n() != n) throw ContractViolation("forelli_rudin_check: dimension mismatch");
    if (!(s_exp > -1.0) || !(r_exp > 0.0) || !(t_exp > 0.0))
        throw ContractViolation("forelli_rudin_check: exponent ranges violated");
    const double excess = r_exp + t_exp - s_exp - n - 1.0;
    if (!(excess > 0.0) || !(s_exp + n + 1.0 > r_exp) || !(s_exp + n + 1.0 > t_exp))
        throw ContractViolation("forelli_rudin_check: r + t > s + n + 1 > r, t required");
    IntegrateOptions io;
    io.budget = budget;
    io.seed = seed;
    const auto est = integrate(
        MeasureSpec::weighted_volume(s_exp), n, RegionSpec::whole_ball(),
        [&](const BallPoint& w) {
            const double du = std::pow(std::abs(1.0 - inner(w, u)), r_exp);
            const double dz = std::pow(std::abs(1.0 - inner(w, z)), t_exp);
            return 1.0 / (du * dz);
        },
        io);
    ForelliRudinCheck out;
    out.integral = est.value;
    out.std_error = est.std_error;
    out.bound = std::pow(std::abs(1.0 - inner(z, u)), -excess);
    out.ratio = out.integral / out.bound;
    return out;
}

}  // namespace tentlab
