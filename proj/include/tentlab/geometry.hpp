#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <variant>

#include "common.hpp"
#include "rng.hpp"

namespace tentlab {

// Point of the open unit ball of C^n, |z| < 1 strictly.
class BallPoint {
public:
    explicit BallPoint(CVec coords) : coords_(std::move(coords)) {
        if (coords_.empty()) throw ContractViolation("BallPoint: n must be >= 1");
        if (euclid_norm(coords_) >= 1.0 - 1e-15)
            throw ContractViolation("BallPoint: |z| must be < 1 - 1e-15");
    }

    int n() const { return static_cast<int>(coords_.size()); }
    const CVec& coords() const { return coords_; }
    double abs() const { return euclid_norm(coords_); }
    double abs_sq() const { return norm_sq(coords_); }
    // 1 - |z|^2
    double one_minus_sq() const { return 1.0 - norm_sq(coords_); }

    static BallPoint origin(int n) { return BallPoint(CVec(static_cast<std::size_t>(n), 0.0)); }

private:
    CVec coords_;
};

// Point of the unit sphere of C^n.  Input must be within 1e-6 of unit length
// and is normalized exactly once here; downstream code never re-normalizes.
class SpherePoint {
public:
    explicit SpherePoint(CVec coords) : coords_(std::move(coords)) {
        if (coords_.empty()) throw ContractViolation("SpherePoint: n must be >= 1");
        const double nrm = euclid_norm(coords_);
        if (std::abs(nrm - 1.0) > 1e-6)
            throw ContractViolation("SpherePoint: |xi| must be within 1e-6 of 1");
        for (auto& c : coords_) c /= nrm;
    }

    int n() const { return static_cast<int>(coords_.size()); }
    const CVec& coords() const { return coords_; }

private:
    CVec coords_;
};

inline cdouble inner(const BallPoint& z, const BallPoint& w) {
    return hermitian_inner(z.coords(), w.coords());
}
inline cdouble inner(const BallPoint& z, const SpherePoint& xi) {
    return hermitian_inner(z.coords(), xi.coords());
}
inline cdouble inner(const SpherePoint& xi, const SpherePoint& eta) {
    return hermitian_inner(xi.coords(), eta.coords());
}

// phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z,a>), the Mobius involution
// swapping a and 0.  P_a is projection onto Ca, Q_a = I - P_a,
// s_a = sqrt(1-|a|^2).
inline BallPoint involution(const BallPoint& a, const BallPoint& z) {
    if (a.n() != z.n()) throw ContractViolation("involution: dimension mismatch");
    const int n = a.n();
    const double a2 = a.abs_sq();
    if (a2 == 0.0) {
        CVec out(z.coords());
        for (auto& c : out) c = -c;
        return BallPoint(std::move(out));
    }
    const cdouble za = inner(z, a);
    const cdouble proj = za / a2;  // P_a z = proj * a
    const double sa = std::sqrt(std::max(0.0, 1.0 - a2));
    const cdouble denom = 1.0 - za;
    CVec out(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const cdouble pa = proj * a.coords()[j];
        const cdouble qa = z.coords()[j] - pa;
        out[j] = (a.coords()[j] - pa - sa * qa) / denom;
    }
    const double r = euclid_norm(out);
    if (!(r < 1.0)) throw InternalError("involution: image left the ball");
    return BallPoint(std::move(out));
}

// |phi_z(w)| via the identity 1-|phi_z(w)|^2 = (1-|z|^2)(1-|w|^2)/|1-<z,w>|^2.
inline double pseudo_hyperbolic(const BallPoint& z, const BallPoint& w) {
    if (z.n() != w.n()) throw ContractViolation("pseudo_hyperbolic: dimension mismatch");
    const cdouble zw = inner(z, w);
    const double num = z.one_minus_sq() * w.one_minus_sq();
    const double den = std::norm(1.0 - zw);
    const double one_minus = num / den;
    return std::sqrt(std::max(0.0, 1.0 - one_minus));
}

// Bergman metric beta(z,w) = (1/2) log((1+rho)/(1-rho)) = atanh(rho) with
// rho the pseudo-hyperbolic distance.
inline double bergman_metric(const BallPoint& z, const BallPoint& w) {
    const double rho = pseudo_hyperbolic(z, w);
    if (rho >= 1.0) throw InternalError("bergman_metric: rho >= 1");
    return std::atanh(rho);
}

// Regions the library integrates over.
struct Koranyi {  // {z : |1-<z,xi>| < (gamma/2)(1-|z|^2)}
    SpherePoint xi;
    double gamma;
};
struct BergmanBall {  // D(z0, r) = {z : beta(z, z0) < r}
    BallPoint center;
    double radius;
};
struct NonisotropicBall {  // B_delta(xi) = {z : |1-<z,xi>| < delta}
    SpherePoint xi;
    double delta;
};
struct TentRegion {  // Q(u) = {z : |1-<z,u/|u|>| < 1-|u|^2}; Q(0) = whole ball
    BallPoint u;
};
struct Annulus {  // {z : |z| > rho}
    double rho;
};
struct WholeBall {};

class RegionSpec {
public:
    using Variant = std::variant<Koranyi, BergmanBall, NonisotropicBall, TentRegion, Annulus, WholeBall>;

    RegionSpec(Variant v) : v_(std::move(v)) { validate(); }

    static RegionSpec koranyi(SpherePoint xi, double gamma) { return RegionSpec(Koranyi{std::move(xi), gamma}); }
    static RegionSpec bergman_ball(BallPoint z0, double r) { return RegionSpec(BergmanBall{std::move(z0), r}); }
    static RegionSpec nonisotropic_ball(SpherePoint xi, double delta) {
        return RegionSpec(NonisotropicBall{std::move(xi), delta});
    }
    static RegionSpec tent(BallPoint u) { return RegionSpec(TentRegion{std::move(u)}); }
    static RegionSpec annulus(double rho) { return RegionSpec(Annulus{rho}); }
    static RegionSpec whole_ball() { return RegionSpec(WholeBall{}); }

    const Variant& variant() const { return v_; }

private:
    void validate() const {
        if (auto* k = std::get_if<Koranyi>(&v_)) {
            if (!(k->gamma > 1.0)) throw ContractViolation("Koranyi: gamma must be > 1");
        } else if (auto* b = std::get_if<BergmanBall>(&v_)) {
            if (!(b->radius > 0.0)) throw ContractViolation("BergmanBall: r must be > 0");
        } else if (auto* nb = std::get_if<NonisotropicBall>(&v_)) {
            if (!(nb->delta > 0.0)) throw ContractViolation("NonisotropicBall: delta must be > 0");
        } else if (auto* an = std::get_if<Annulus>(&v_)) {
            if (!(an->rho >= 0.0 && an->rho < 1.0)) throw ContractViolation("Annulus: rho must be in [0,1)");
        }
    }

    Variant v_;
};

// Membership by the defining strict inequality, no tolerance slack.
inline bool in_region(const BallPoint& z, const RegionSpec& region) {
    return std::visit(
        [&](const auto& r) -> bool {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Koranyi>) {
                if (z.n() != r.xi.n()) throw ContractViolation("in_region: dimension mismatch");
                return std::abs(1.0 - inner(z, r.xi)) < 0.5 * r.gamma * z.one_minus_sq();
            } else if constexpr (std::is_same_v<T, BergmanBall>) {
                return bergman_metric(z, r.center) < r.radius;
            } else if constexpr (std::is_same_v<T, NonisotropicBall>) {
                if (z.n() != r.xi.n()) throw ContractViolation("in_region: dimension mismatch");
                return std::abs(1.0 - inner(z, r.xi)) < r.delta;
            } else if constexpr (std::is_same_v<T, TentRegion>) {
                if (z.n() != r.u.n()) throw ContractViolation("in_region: dimension mismatch");
                const double ua = r.u.abs();
                if (ua == 0.0) return true;  // Q(0) is the whole ball
                CVec dir(r.u.coords());
                for (auto& c : dir) c /= ua;
                const cdouble zd = hermitian_inner(z.coords(), dir);
                return std::abs(1.0 - zd) < r.u.one_minus_sq();
            } else if constexpr (std::is_same_v<T, Annulus>) {
                return z.abs() > r.rho;
            } else {
                return true;  // WholeBall
            }
        },
        region.variant());
}

struct CapEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
    bool zero_hits = false;
};

// Monte-Carlo estimate of sigma(I(z)) where I(z) = {xi : z in Gamma_gamma(xi)}.
inline CapEstimate cap_measure(const BallPoint& z, std::size_t sphere_samples, std::uint64_t seed,
                               double gamma = 2.0) {
    if (sphere_samples < 1000) throw ContractViolation("cap_measure: need >= 1000 samples");
    const double bound = 0.5 * gamma * z.one_minus_sq();
    Rng rng(seed, stream_tag::sphere_sample, 0);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < sphere_samples; ++i) {
        const CVec xi = rng.unit_sphere(z.n());
        if (std::abs(1.0 - hermitian_inner(z.coords(), xi)) < bound) ++hits;
    }
    CapEstimate est;
    est.samples = sphere_samples;
    est.value = static_cast<double>(hits) / sphere_samples;
    est.std_error = std::sqrt(est.value * (1.0 - est.value) / sphere_samples);
    est.zero_hits = (hits == 0);
    return est;
}

// Smallest tested aperture gamma' (by doubling) with
// union_{z in Gamma_gamma(xi)} D(z, r) contained in Gamma_{gamma'}(xi),
// verified on `witnesses` sampled pairs (z in the cone, w in D(z,r)).
inline double widened_aperture(double gamma, double r, int n, std::uint64_t seed,
                               std::size_t witnesses = 10000) {
    if (!(gamma > 1.0) || !(r > 0.0)) throw ContractViolation("widened_aperture: bad parameters");
    // Collect witness points w in union of D(z,r), z in the cone over xi = e1.
    CVec e1(static_cast<std::size_t>(n), 0.0);
    e1[0] = 1.0;
    const SpherePoint xi(e1);
    Rng rng(seed, stream_tag::generic, 7);
    std::vector<BallPoint> ws;
    ws.reserve(witnesses);
    const double tr = std::tanh(r);
    while (ws.size() < witnesses) {
        // Bias |z| toward the boundary: the constraint degenerates there.
        const double radial = 1.0 - std::pow(2.0, -14.0 * rng.uniform());
        CVec dir = rng.unit_sphere(n);
        CVec zc(dir);
        for (auto& c : zc) c *= radial;
        BallPoint z(zc);
        if (!in_region(z, RegionSpec::koranyi(xi, gamma))) continue;
        // w = phi_z(u) with u uniform in the ball of radius tanh(r): D(z,r).
        CVec u = rng.unit_ball(n);
        for (auto& c : u) c *= tr;
        ws.push_back(involution(z, BallPoint(u)));
    }
    double gp = 2.0 * gamma;
    for (int iter = 0; iter < 40; ++iter) {
        bool all_in = true;
        for (const auto& w : ws)
            if (!in_region(w, RegionSpec::koranyi(xi, gp))) {
                all_in = false;
                break;
            }
        if (all_in) return gp;
        gp *= 2.0;
    }
    throw InternalError("widened_aperture: no aperture found after 40 doublings");
}

}  // namespace tentlab
