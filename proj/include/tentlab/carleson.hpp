#pragma once

#include <cmath>

#include "measures.hpp"

namespace tentlab {

struct CarlesonEstimate {
    double cap_statistic = 0.0;       // sup mu(B_delta(xi)) / delta^n over the grid
    double integral_statistic = 0.0;  // sup_a int (1-|a|^2)/|1-<z,a>|^{n+1} dmu
    double best_delta = 0.0;
    bool diverged = false;
};

struct CarlesonOptions {
    std::size_t budget = 50000;    // per continuous sub-integral
    std::uint64_t seed = 1;
    std::size_t xi_count = 32;     // sampled sup-grid directions
    double rho_cut = 0.0;          // restrict the measure to {|z| > rho_cut}
    int delta_levels = 12;         // delta in {2^{-j}}, j = 0..delta_levels
};

// The optional pointwise density g turns mu into g dmu (used for measures of
// the form f(z) dv_{alpha+n} whose density is only available pointwise).
inline CarlesonEstimate carleson_constant(const MeasureSpec& mu, int n, const CarlesonOptions& opt,
                                          const Integrand& density = nullptr) {
    CarlesonEstimate est;

    // delta grid; the extra value just above 1 captures mass near the origin
    // (0 lies in B_delta(xi) exactly when delta > 1).
    std::vector<double> deltas;
    for (int j = 0; j <= opt.delta_levels; ++j) deltas.push_back(std::pow(2.0, -j));
    deltas.push_back(1.0 + 1e-9);

    // Candidate directions: sampled, plus each atom's own direction for
    // atomic measures (the sup is attained there).
    std::vector<SpherePoint> xis = sample_sphere(n, opt.xi_count, opt.seed);
    // A pointwise density breaks rotation invariance even for radial mu.
    const bool radial = !mu.is_atomic() && !density;
    if (mu.is_atomic()) {
        std::size_t added = 0;
        for (const auto& [a, w] : mu.atoms()) {
            (void)w;
            const double r = a.abs();
            if (r < 1e-12) continue;
            CVec d(a.coords());
            for (auto& c : d) c /= r;
            xis.emplace_back(std::move(d));
            if (++added >= 256) break;
        }
    }

    auto mass_in = [&](const SpherePoint& xi, double delta) -> std::pair<double, bool> {
        if (mu.is_atomic()) {
            double s = 0.0;
            for (const auto& [a, w] : mu.atoms()) {
                if (a.abs() <= opt.rho_cut) continue;
                if (std::abs(1.0 - inner(a, xi)) < delta)
                    s += density ? w * density(a) : w;
            }
            return {s, false};
        }
        IntegrateOptions io;
        io.budget = std::max<std::size_t>(1000, opt.budget / deltas.size());
        io.seed = derive_stream(opt.seed, stream_tag::generic,
                                static_cast<std::uint64_t>(delta * 1e6) + 31);
        const double cut = opt.rho_cut;
        const auto e = integrate(
            mu, n, RegionSpec::nonisotropic_ball(xi, delta),
            [&](const BallPoint& z) {
                if (z.abs() <= cut) return 0.0;
                return density ? density(z) : 1.0;
            },
            io);
        return {e.value, e.diverged};
    };

    // Radial measures are rotation invariant: one direction suffices.
    const std::size_t xi_used = radial ? 1 : xis.size();
    for (std::size_t i = 0; i < xi_used; ++i) {
        for (double d : deltas) {
            auto [m, div] = mass_in(xis[i], d);
            est.diverged = est.diverged || div;
            const double v = m / std::pow(d, n);
            if (v > est.cap_statistic) {
                est.cap_statistic = v;
                est.best_delta = d;
            }
        }
    }

    // Integral form at theta = 1: sup_a int (1-|a|^2)/|1-<z,a>|^{n+1} dmu.
    std::vector<BallPoint> as;
    as.push_back(BallPoint::origin(n));
    const std::vector<double> rads = {0.5, 0.9, 0.99};
    const std::size_t xi_for_int = radial ? 1 : std::min<std::size_t>(xis.size(), 24);
    for (std::size_t i = 0; i < xi_for_int; ++i)
        for (double rr : rads) {
            CVec c(xis[i].coords());
            for (auto& x : c) x *= rr;
            as.emplace_back(std::move(c));
        }
    for (const auto& a : as) {
        const double oma = a.one_minus_sq();
        auto kern = [&](const BallPoint& z) {
            if (z.abs() <= opt.rho_cut) return 0.0;
            const double base = oma / std::pow(std::abs(1.0 - inner(z, a)), n + 1.0);
            return density ? base * density(z) : base;
        };
        double v;
        if (mu.is_atomic()) {
            double s = 0.0;
            for (const auto& [p, w] : mu.atoms()) s += w * kern(p);
            v = s;
        } else {
            IntegrateOptions io;
            io.budget = std::max<std::size_t>(1000, opt.budget / as.size());
            io.seed = derive_stream(opt.seed, stream_tag::generic, 7000 + (&a - as.data()));
            const auto e = integrate(mu, n, RegionSpec::whole_ball(), kern, io);
            est.diverged = est.diverged || e.diverged;
            v = e.value;
        }
        est.integral_statistic = std::max(est.integral_statistic, v);
    }
    return est;
}

struct VanishingReport {
    std::vector<double> rho;         // truncation radii
    std::vector<double> constants;   // cap statistics of chi_{(rho B)^c} mu
    bool decreasing = false;         // each step drops by >= 2x
};

inline VanishingReport vanishing_carleson(const MeasureSpec& mu, int n, const CarlesonOptions& base,
                                          const Integrand& density = nullptr,
                                          std::vector<double> rhos = {0.9, 0.99, 0.999}) {
    VanishingReport rep;
    rep.rho = std::move(rhos);
    for (double r : rep.rho) {
        CarlesonOptions opt = base;
        opt.rho_cut = r;
        rep.constants.push_back(carleson_constant(mu, n, opt, density).cap_statistic);
    }
    rep.decreasing = true;
    for (std::size_t i = 1; i < rep.constants.size(); ++i)
        if (!(rep.constants[i] <= 0.5 * rep.constants[i - 1])) rep.decreasing = false;
    return rep;
}

}  // namespace tentlab
