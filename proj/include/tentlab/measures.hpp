#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <variant>

#include "geometry.hpp"
#include "lattice.hpp"
#include "rng.hpp"

namespace tentlab {

// ---------------------------------------------------------------------------
// Measure families
// ---------------------------------------------------------------------------

struct PointMasses {
    std::vector<std::pair<BallPoint, double>> atoms;  // (location, weight > 0)
};

// Mass c * (1-|a_k|^2)^gamma_w at every lattice point a_k.
struct LatticeMasses {
    std::shared_ptr<const Lattice> lattice;
    double gamma_w;
    double c;
};

// dv_{beta_v} = (1-|z|^2)^{beta_v} dv, with v the normalized volume measure.
struct WeightedVolume {
    double beta_v;
};

// w(|z|) dv with w(r) = sum_i c_i (1-r^2)^{beta_i}, each c_i > 0, beta_i > -1.
struct RadialDensity {
    std::vector<std::pair<double, double>> terms;  // (c_i, beta_i)
};

class MeasureSpec {
public:
    using Variant = std::variant<PointMasses, LatticeMasses, WeightedVolume, RadialDensity>;

    MeasureSpec(Variant v) : v_(std::move(v)) { validate(); }

    static MeasureSpec point_masses(std::vector<std::pair<BallPoint, double>> atoms) {
        return MeasureSpec(PointMasses{std::move(atoms)});
    }
    static MeasureSpec lattice_masses(std::shared_ptr<const Lattice> L, double gamma_w, double c) {
        return MeasureSpec(LatticeMasses{std::move(L), gamma_w, c});
    }
    static MeasureSpec weighted_volume(double beta_v) { return MeasureSpec(WeightedVolume{beta_v}); }
    static MeasureSpec radial_density(std::vector<std::pair<double, double>> terms) {
        return MeasureSpec(RadialDensity{std::move(terms)});
    }
    static MeasureSpec zero() { return MeasureSpec(PointMasses{}); }

    const Variant& variant() const { return v_; }

    bool is_atomic() const {
        return std::holds_alternative<PointMasses>(v_) || std::holds_alternative<LatticeMasses>(v_);
    }

    // Atoms of the two atomic families as (location, weight).
    std::vector<std::pair<BallPoint, double>> atoms() const {
        if (const auto* pm = std::get_if<PointMasses>(&v_)) return pm->atoms;
        if (const auto* lm = std::get_if<LatticeMasses>(&v_)) {
            std::vector<std::pair<BallPoint, double>> out;
            out.reserve(lm->lattice->size());
            for (const auto& a : lm->lattice->points())
                out.emplace_back(a, lm->c * std::pow(a.one_minus_sq(), lm->gamma_w));
            return out;
        }
        throw ContractViolation("MeasureSpec::atoms: measure is not atomic");
    }

    // Radial density terms (c_i, beta_i) of the two continuous families.
    std::vector<std::pair<double, double>> radial_terms() const {
        if (const auto* wv = std::get_if<WeightedVolume>(&v_)) return {{1.0, wv->beta_v}};
        if (const auto* rd = std::get_if<RadialDensity>(&v_)) return rd->terms;
        throw ContractViolation("MeasureSpec::radial_terms: measure is not continuous");
    }

private:
    void validate() const {
        if (const auto* pm = std::get_if<PointMasses>(&v_)) {
            for (const auto& [p, w] : pm->atoms) {
                (void)p;
                if (!(w > 0.0)) throw ContractViolation("PointMasses: weights must be > 0");
            }
        } else if (const auto* lm = std::get_if<LatticeMasses>(&v_)) {
            if (!lm->lattice) throw ContractViolation("LatticeMasses: null lattice");
            if (!(lm->c > 0.0)) throw ContractViolation("LatticeMasses: c must be > 0");
        } else if (const auto* wv = std::get_if<WeightedVolume>(&v_)) {
            if (!(wv->beta_v > -1.0)) throw ContractViolation("WeightedVolume: beta_v must be > -1");
        } else if (const auto* rd = std::get_if<RadialDensity>(&v_)) {
            for (const auto& [c, b] : rd->terms) {
                if (!(c > 0.0)) throw ContractViolation("RadialDensity: coefficients must be > 0");
                if (!(b > -1.0)) throw ContractViolation("RadialDensity: exponents must be > -1");
            }
        }
    }

    Variant v_;
};

struct IntegralEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t samples_used = 0;
    double truncation_radius = 1.0;
    bool diverged = false;
};

// Total mass of a continuous measure: sum_i c_i * n * B(n, beta_i + 1).
inline double total_mass(const MeasureSpec& mu) {
    if (mu.is_atomic()) {
        double s = 0.0;
        for (const auto& [p, w] : mu.atoms()) {
            (void)p;
            s += w;
        }
        return s;
    }
    double s = 0.0;
    for (const auto& [c, b] : mu.radial_terms()) {
        // n * Beta(n, b+1) = Gamma(n+1)Gamma(b+1)/Gamma(n+b+1) -- but n enters
        // only through the dimension, which a radial measure does not carry;
        // callers supply it via total_mass(mu, n).
        (void)c;
        (void)b;
        throw ContractViolation("total_mass: dimension required for continuous measures");
    }
    return s;
}

inline double total_mass(const MeasureSpec& mu, int n) {
    if (mu.is_atomic()) return total_mass(mu);
    double s = 0.0;
    for (const auto& [c, b] : mu.radial_terms())
        s += c * std::exp(std::lgamma(n + 1.0) + std::lgamma(b + 1.0) - std::lgamma(n + b + 1.0));
    return s;
}

// ---------------------------------------------------------------------------
// Sphere sampling (the normalized surface measure sigma)
// ---------------------------------------------------------------------------

inline std::vector<SpherePoint> sample_sphere(int n, std::size_t count, std::uint64_t seed) {
    if (count < 1) throw ContractViolation("sample_sphere: count must be >= 1");
    std::vector<SpherePoint> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(seed, stream_tag::sphere_sample, i);
        out.emplace_back(rng.unit_sphere(n));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sphere sections of cap-type regions
//
// A cap region at radius rho restricts the direction omega to
// {|1 - rho <omega, xi>| < d}.  For n = 1 this is an arc; for n = 2 the
// inner product w = <omega, xi> is uniform on the unit disk and the
// constraint cuts out a lens, sampled by an x-then-y slice scheme with
// explicit density weights (no rejection).
// ---------------------------------------------------------------------------

namespace detail {

struct SectionDraw {
    CVec direction;  // unit vector omega
    double weight;   // sigma-measure importance weight of the draw
};

// Arc half-width for n = 1: |1 - rho e^{i theta}| < d  <=>  theta in (-t0, t0).
inline double arc_half_width(double rho, double d) {
    if (d >= 1.0 + rho) return M_PI;
    if (d <= 1.0 - rho || rho <= 0.0) return 0.0;
    const double c = (1.0 + rho * rho - d * d) / (2.0 * rho);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

inline std::optional<SectionDraw> sample_section(int n, double rho, double d,
                                                 const SpherePoint& xi, Rng& rng) {
    if (n == 1) {
        const double t0 = arc_half_width(rho, d);
        if (t0 <= 0.0) return std::nullopt;
        const double theta = t0 * (2.0 * rng.uniform() - 1.0);
        SectionDraw s;
        s.direction = {std::polar(1.0, theta) * xi.coords()[0]};
        s.weight = t0 / M_PI;
        return s;
    }
    if (n == 2) {
        if (d >= 1.0 + rho) {
            // Whole sphere qualifies.
            SectionDraw s;
            s.direction = rng.unit_sphere(2);
            s.weight = 1.0;
            return s;
        }
        if (d <= 1.0 - rho || rho <= 0.0) return std::nullopt;
        const double x_lo = std::max(-1.0, (1.0 - d) / rho);
        const double x_hi = std::min(1.0, (1.0 + d) / rho);
        if (!(x_hi > x_lo)) return std::nullopt;
        const double x = x_lo + (x_hi - x_lo) * rng.uniform();
        const double m1 = 1.0 - x * x;
        const double lin = (d - (1.0 - rho * x)) * (d + (1.0 - rho * x)) / (rho * rho);
        const double h = std::sqrt(std::max(0.0, std::min(m1, lin)));
        if (h <= 0.0) {
            SectionDraw s;  // zero-width slice: contributes weight 0
            s.direction = xi.coords();
            s.weight = 0.0;
            return s;
        }
        const double y = h * (2.0 * rng.uniform() - 1.0);
        const cdouble w{x, y};
        const double res = std::sqrt(std::max(0.0, 1.0 - std::norm(w)));
        const double psi = 2.0 * M_PI * rng.uniform();
        // omega = w xi + sqrt(1-|w|^2) e^{i psi} xi_perp
        const cdouble phase = std::polar(1.0, psi);
        CVec omega(2);
        const cdouble x1 = xi.coords()[0], x2 = xi.coords()[1];
        const cdouble perp1 = -std::conj(x2), perp2 = std::conj(x1);
        omega[0] = w * x1 + res * phase * perp1;
        omega[1] = w * x2 + res * phase * perp2;
        SectionDraw s;
        s.direction = std::move(omega);
        s.weight = 2.0 * h * (x_hi - x_lo) / M_PI;
        return s;
    }
    throw ContractViolation("cap-region quadrature supports n <= 2 only");
}

// Crude sigma-fraction of the section, used only for sample allocation.
inline double section_fraction(int n, double rho, double d) {
    if (n == 1) return arc_half_width(rho, d) / M_PI;
    if (d >= 1.0 + rho) return 1.0;
    if (d <= 1.0 - rho || rho <= 0.0) return 0.0;
    const double x_lo = std::max(-1.0, (1.0 - d) / rho);
    const double x_hi = std::min(1.0, (1.0 + d) / rho);
    if (!(x_hi > x_lo)) return 0.0;
    double area = 0.0;
    const int k = 16;
    for (int i = 0; i < k; ++i) {
        const double x = x_lo + (x_hi - x_lo) * (i + 0.5) / k;
        const double m1 = 1.0 - x * x;
        const double lin = (d - (1.0 - rho * x)) * (d + (1.0 - rho * x)) / (rho * rho);
        area += 2.0 * std::sqrt(std::max(0.0, std::min(m1, lin)));
    }
    return area * (x_hi - x_lo) / k / M_PI;
}

// Closed-form mass of sum_i c_i (1-|z|^2)^{beta_i} dv over the full-sphere
// shell u = |z|^2 in [u1, u2]:
//   n * integral u^{n-1} (1-u)^beta du
// expanded via u^{n-1} = sum_k C(n-1,k) (-1)^k (1-u)^k.
inline double shell_mass(int n, const std::vector<std::pair<double, double>>& terms, double u1,
                         double u2) {
    double total = 0.0;
    for (const auto& [c, beta] : terms) {
        double acc = 0.0;
        double binom = 1.0;
        for (int k = 0; k <= n - 1; ++k) {
            if (k > 0) binom *= -static_cast<double>(n - k) / k;
            const double e = beta + k + 1.0;
            acc += binom * (std::pow(1.0 - u1, e) - std::pow(1.0 - u2, e)) / e;
        }
        total += c * n * acc;
    }
    return total;
}

inline double radial_density_at(const std::vector<std::pair<double, double>>& terms, double u) {
    double s = 0.0;
    for (const auto& [c, beta] : terms) s += c * std::pow(1.0 - u, beta);
    return s;
}

// Cap parameters of a region at radius rho: returns (xi, d(rho)) when the
// region is of cap type, nullopt for the full-sphere kinds.
struct CapGeometry {
    const SpherePoint* xi;
    std::function<double(double)> d_of_rho;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// integrate
// ---------------------------------------------------------------------------

using Integrand = std::function<double(const BallPoint&)>;

namespace detail {

inline double checked_eval(const Integrand& f, const BallPoint& z) {
    const double v = f(z);
    if (std::isnan(v) || v < 0.0)
        throw ContractViolation("integrate: integrand returned NaN/negative at |z|=" +
                                std::to_string(z.abs()));
    return v;
}

struct StratResult {
    double value = 0.0;
    double variance = 0.0;  // variance of the estimator
    std::size_t samples = 0;
};

}  // namespace detail

struct IntegrateOptions {
    std::size_t budget = 100000;
    std::uint64_t seed = 1;
    int shell_levels = 20;  // shells [1-2^{-j}, 1-2^{-j-1}), j = 0..K-1
};

inline IntegralEstimate integrate(const MeasureSpec& mu, int n, const RegionSpec& region,
                                  const Integrand& f, const IntegrateOptions& opt) {
    if (opt.budget < 1000) throw ContractViolation("integrate: budget must be >= 1000");

    IntegralEstimate est;
    if (mu.is_atomic()) {
        std::vector<double> vals;
        const auto atoms = mu.atoms();
        vals.reserve(atoms.size());
        for (const auto& [a, w] : atoms)
            if (in_region(a, region)) vals.push_back(w * detail::checked_eval(f, a));
        est.value = pairwise_sum(vals);
        est.std_error = 0.0;
        est.samples_used = atoms.size();
        est.truncation_radius = 1.0;
        return est;
    }

    const auto terms = mu.radial_terms();
    if (terms.empty()) return est;

    // Bergman metric balls sit compactly inside; integrate by the Mobius
    // substitution z = phi_{z0}(u), u uniform in the ball of radius tanh(r).
    if (const auto* bb = std::get_if<BergmanBall>(&region.variant())) {
        const double T = std::tanh(bb->radius);
        const double vol = std::pow(T, 2.0 * n);  // v(T-ball)
        const double s0 = bb->center.one_minus_sq();
        Rng rng(opt.seed, stream_tag::shell_sample, 0);
        double sum = 0.0, sum2 = 0.0;
        const std::size_t m = opt.budget;
        for (std::size_t i = 0; i < m; ++i) {
            CVec u = rng.unit_ball(n);
            for (auto& c : u) c *= T;
            const BallPoint up(u);
            const BallPoint z = involution(bb->center, up);
            const cdouble uz = hermitian_inner(up.coords(), bb->center.coords());
            const double jac = std::pow(s0 / std::norm(1.0 - uz), n + 1.0);
            const double dens = detail::radial_density_at(terms, z.abs_sq());
            const double v = detail::checked_eval(f, z) * dens * jac * vol;
            sum += v;
            sum2 += v * v;
        }
        est.value = sum / m;
        const double var = std::max(0.0, sum2 / m - est.value * est.value);
        est.std_error = std::sqrt(var / m);
        est.samples_used = m;
        return est;
    }

    // Cap geometry, if any.
    const SpherePoint* cap_xi = nullptr;
    std::optional<SpherePoint> tent_xi;  // owns the tent's direction, if used
    std::function<double(double)> cap_d;
    double rho_floor = 0.0;  // annulus cut
    if (const auto* k = std::get_if<Koranyi>(&region.variant())) {
        cap_xi = &k->xi;
        const double g = k->gamma;
        cap_d = [g](double rho) { return 0.5 * g * (1.0 - rho * rho); };
    } else if (const auto* nb = std::get_if<NonisotropicBall>(&region.variant())) {
        cap_xi = &nb->xi;
        const double d = nb->delta;
        cap_d = [d](double) { return d; };
    } else if (const auto* t = std::get_if<TentRegion>(&region.variant())) {
        const double ua = t->u.abs();
        if (ua > 0.0) {
            CVec dir(t->u.coords());
            for (auto& c : dir) c /= ua;
            tent_xi.emplace(std::move(dir));
            cap_xi = &*tent_xi;
            const double d = t->u.one_minus_sq();
            cap_d = [d](double) { return d; };
        }
    } else if (const auto* an = std::get_if<Annulus>(&region.variant())) {
        rho_floor = an->rho;
    }

    // Radial shells in |z|: [1-2^{-j}, 1-2^{-j-1}), truncated at 1-2^{-K}.
    const int K = opt.shell_levels;
    est.truncation_radius = 1.0 - std::pow(2.0, -K);
    struct Shell {
        double u1, u2;     // |z|^2 range
        double mass;       // full-sphere shell mass of mu
        double frac;       // crude section fraction for allocation
        std::size_t m = 0;
    };
    std::vector<Shell> shells;
    for (int j = 0; j < K; ++j) {
        double r1 = std::max(rho_floor, 1.0 - std::pow(2.0, -j));
        double r2 = 1.0 - std::pow(2.0, -j - 1);
        if (j == K - 1) r2 = est.truncation_radius;
        if (r2 <= r1) continue;
        Shell s;
        s.u1 = r1 * r1;
        s.u2 = r2 * r2;
        s.mass = detail::shell_mass(n, terms, s.u1, s.u2);
        const double rho_mid = 0.5 * (r1 + r2);
        s.frac = cap_xi ? detail::section_fraction(n, rho_mid, cap_d(rho_mid)) : 1.0;
        shells.push_back(s);
    }
    double wsum = 0.0;
    for (auto& s : shells) wsum += s.mass * s.frac;
    if (wsum <= 0.0) {
        // Empty section everywhere (e.g. tiny cap): report 0.
        return est;
    }
    std::size_t assigned = 0;
    for (auto& s : shells) {
        s.m = std::max<std::size_t>(16, static_cast<std::size_t>(opt.budget * (s.mass * s.frac) / wsum));
        assigned += s.m;
    }
    (void)assigned;

    std::vector<double> level_value(shells.size(), 0.0);
    std::vector<double> level_var(shells.size(), 0.0);
    const auto results = parallel_map<detail::StratResult>(shells.size(), [&](std::size_t si) {
        const Shell& s = shells[si];
        Rng rng(opt.seed, stream_tag::shell_sample, si + 1);
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t i = 0; i < s.m; ++i) {
            const double u = s.u1 + (s.u2 - s.u1) * rng.uniform();
            const double rho = std::sqrt(u);
            // radial importance weight for uniform-u sampling
            const double rw =
                n * std::pow(u, n - 1.0) * detail::radial_density_at(terms, u) * (s.u2 - s.u1);
            double v = 0.0;
            if (cap_xi) {
                auto draw = detail::sample_section(n, rho, cap_d(rho), *cap_xi, rng);
                if (draw && draw->weight > 0.0) {
                    CVec zc(draw->direction);
                    for (auto& c : zc) c *= rho;
                    v = detail::checked_eval(f, BallPoint(std::move(zc))) * rw * draw->weight;
                }
            } else {
                CVec zc = rng.unit_sphere(n);
                for (auto& c : zc) c *= rho;
                v = detail::checked_eval(f, BallPoint(std::move(zc))) * rw;
            }
            sum += v;
            sum2 += v * v;
        }
        detail::StratResult r;
        r.value = sum / s.m;
        r.variance = std::max(0.0, sum2 / s.m - r.value * r.value) / s.m;
        r.samples = s.m;
        return r;
    });

    std::vector<double> vals(shells.size());
    double var_total = 0.0;
    for (std::size_t si = 0; si < shells.size(); ++si) {
        vals[si] = results[si].value;
        var_total += results[si].variance;
        est.samples_used += results[si].samples;
    }
    est.value = pairwise_sum(vals);
    est.std_error = std::sqrt(var_total);

    // Divergence rule: the last three cumulative truncation levels each grow
    // by more than a factor 2.
    if (shells.size() >= 4) {
        double cum = 0.0;
        std::vector<double> cums;
        for (double v : vals) {
            cum += v;
            cums.push_back(cum);
        }
        bool grows = true;
        for (std::size_t j = cums.size() - 3; j < cums.size(); ++j) {
            const double prev = cums[j - 1];
            if (!(prev > 0.0) || !(cums[j] > 2.0 * prev)) {
                grows = false;
                break;
            }
        }
        est.diverged = grows;
    }
    return est;
}

inline IntegralEstimate integrate(const MeasureSpec& mu, int n, const RegionSpec& region,
                                  const Integrand& f, std::size_t budget, std::uint64_t seed) {
    IntegrateOptions opt;
    opt.budget = budget;
    opt.seed = seed;
    return integrate(mu, n, region, f, opt);
}

// ---------------------------------------------------------------------------
// mu_hat: the Bergman-ball average density
//   mu_hat_r(z) = mu(D(z,r)) / (1-|z|^2)^{2n+1+alpha}
// Exact for atomic measures; for radial measures mu(D(z,r)) depends only on
// |z| and is served from a log-log interpolated radial profile.
// ---------------------------------------------------------------------------

class MuHat {
public:
    MuHat(MeasureSpec mu, int n, double r, double alpha, std::uint64_t seed,
          std::size_t node_budget = 4000)
        : mu_(std::move(mu)), n_(n), r_(r), alpha_(alpha), seed_(seed) {
        // radii up to 2 are allowed so that discretized sequences built from
        // doubled radii stay inside the contract
        if (!(r > 0.0 && r <= 2.0)) throw ContractViolation("MuHat: r must be in (0,2]");
        if (!(alpha > -n - 1.0)) throw ContractViolation("MuHat: alpha must be > -n-1");
        if (!mu_.is_atomic()) build_profile(node_budget);
    }

    double ball_mass(const BallPoint& z) const {
        if (const auto* lm = std::get_if<LatticeMasses>(&mu_.variant())) {
            double s = 0.0;
            for (std::size_t k : lm->lattice->neighbors_within(z, r_))
                s += lm->c * std::pow(lm->lattice->point(k).one_minus_sq(), lm->gamma_w);
            return s;
        }
        if (const auto* pm = std::get_if<PointMasses>(&mu_.variant())) {
            double s = 0.0;
            for (const auto& [a, w] : pm->atoms)
                if (bergman_metric(z, a) < r_) s += w;
            return s;
        }
        return profile_mass(z.abs());
    }

    double operator()(const BallPoint& z) const {
        return ball_mass(z) / std::pow(z.one_minus_sq(), 2.0 * n_ + 1.0 + alpha_);
    }

    double r() const { return r_; }
    double alpha() const { return alpha_; }
    const MeasureSpec& measure() const { return mu_; }

private:
    void build_profile(std::size_t node_budget) {
        const auto terms = mu_.radial_terms();
        if (terms.empty()) return;
        // Nodes rho_i = 1 - 2^{-i/4}; x = log(1-rho^2) is the interpolation axis.
        const int imax = 84;
        for (int i = 0; i <= imax; ++i) {
            const double rho = 1.0 - std::pow(2.0, -i / 4.0);
            CVec c(static_cast<std::size_t>(n_), 0.0);
            c[0] = rho;
            const BallPoint z(c);
            IntegrateOptions opt;
            opt.budget = std::max<std::size_t>(1000, node_budget);
            opt.seed = derive_stream(seed_, stream_tag::generic, 100 + i);
            const auto est =
                integrate(mu_, n_, RegionSpec::bergman_ball(z, r_), [](const BallPoint&) { return 1.0; },
                          opt);
            xs_.push_back(std::log(z.one_minus_sq()));
            ys_.push_back(std::log(std::max(est.value, 1e-300)));
        }
        // xs_ is decreasing in i; reverse for binary search.
        std::reverse(xs_.begin(), xs_.end());
        std::reverse(ys_.begin(), ys_.end());
    }

    double profile_mass(double rho) const {
        if (xs_.empty()) return 0.0;
        const double x = std::log(std::max(1e-300, 1.0 - rho * rho));
        if (x >= xs_.back()) return std::exp(ys_.back());
        std::size_t hi = std::lower_bound(xs_.begin(), xs_.end(), x) - xs_.begin();
        if (hi == 0) {
            // Beyond the deepest node: extrapolate with the last slope.
            const double slope = (ys_[1] - ys_[0]) / (xs_[1] - xs_[0]);
            return std::exp(ys_[0] + slope * (x - xs_[0]));
        }
        const std::size_t lo = hi - 1;
        const double tfrac = (x - xs_[lo]) / (xs_[hi] - xs_[lo]);
        return std::exp(ys_[lo] + tfrac * (ys_[hi] - ys_[lo]));
    }

    MeasureSpec mu_;
    int n_;
    double r_;
    double alpha_;
    std::uint64_t seed_;
    std::vector<double> xs_, ys_;  // log(1-rho^2) -> log mass, increasing xs_
};

inline double mu_hat(const MeasureSpec& mu, int n, const BallPoint& z, double r, double alpha,
                     std::uint64_t seed = 1) {
    if (!(r > 0.0 && r < 1.0)) throw ContractViolation("mu_hat: r must be in (0,1)");
    return MuHat(mu, n, r, alpha, seed)(z);
}

}  // namespace tentlab
