#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace tentlab {

struct LatticeReport {
    bool covering_ok = false;
    double min_pairwise_separation = std::numeric_limits<double>::infinity();
    int max_overlap_observed = 0;
    std::size_t covering_samples = 0;
    std::string failure_witness;  // empty when covering_ok
};

// Truncated maximal delta/2-separated set in the Bergman metric, covering
// {beta(0,z) <= r_max}.  Points are stored in nondecreasing beta(0, .) order.
//
// For n = 1 all points live on circles |z| = tanh(i*h) with h = delta/8, and
// the membership test beta(z,w) < d is equivalent to
//   |1 - <z,w>|^2 < cosh(d)^2 (1-|z|^2)(1-|w|^2),
// which on two circles depends on the angle gap alone; neighbor queries become
// per-circle angular window lookups in sorted angle lists.
class Lattice {
public:
    Lattice(int n, double delta, double r_max) : n_(n), delta_(delta), r_max_(r_max) {
        if (n < 1) throw ContractViolation("Lattice: n must be >= 1");
        if (!(delta > 0.0 && delta < 1.0)) throw ContractViolation("Lattice: delta must be in (0,1)");
        if (!(r_max > 0.0 && r_max <= 12.0)) throw ContractViolation("Lattice: r_max must be in (0,12]");
        if (n == 1) {
            level_h_ = delta / 8.0;
            levels_.resize(static_cast<std::size_t>(std::ceil(r_max / level_h_)) + 1);
        }
    }

    int n() const { return n_; }
    double delta() const { return delta_; }
    double r_max() const { return r_max_; }
    std::size_t size() const { return points_.size(); }
    const std::vector<BallPoint>& points() const { return points_; }
    const BallPoint& point(std::size_t k) const { return points_[k]; }
    double beta0(std::size_t k) const { return beta0_[k]; }
    const LatticeReport& report() const { return report_; }
    LatticeReport& mutable_report() { return report_; }

    // Appends a point; callers must keep beta(0, .) nondecreasing.
    void push(BallPoint p, double beta_origin, int level = -1, double angle = 0.0) {
        if (!beta0_.empty() && beta_origin < beta0_.back() - 1e-12)
            throw InternalError("Lattice::push: points must arrive in radial order");
        if (n_ == 1) {
            if (level < 0 || static_cast<std::size_t>(level) >= levels_.size())
                throw InternalError("Lattice::push: bad level");
            levels_[level].push_back({angle, points_.size()});
        }
        points_.push_back(std::move(p));
        beta0_.push_back(beta_origin);
    }

    double level_beta(int i) const { return i * level_h_; }
    int level_count() const { return static_cast<int>(levels_.size()); }

    // Indices of stored points with beta(z, a_k) < d; stops early once
    // max_needed hits are collected.
    std::vector<std::size_t> neighbors_within(const BallPoint& z, double d,
                                              std::size_t max_needed = SIZE_MAX) const {
        std::vector<std::size_t> out;
        if (n_ == 1) {
            const cdouble zc = z.coords()[0];
            query_disk(std::abs(zc), std::arg(zc), d, [&](std::size_t k) {
                out.push_back(k);
                return out.size() < max_needed;
            });
        } else {
            const double bz = bergman_metric(BallPoint::origin(n_), z);
            band_query(z, bz, d, [&](std::size_t k) {
                out.push_back(k);
                return out.size() < max_needed;
            });
        }
        return out;
    }

    bool any_within(const BallPoint& z, double d) const {
        return !neighbors_within(z, d, 1).empty();
    }

    // Fast path for n = 1 greedy construction: true iff some stored point is
    // at Bergman distance < d from rho*e^{i*theta}.
    bool any_within_disk(double rho, double theta, double d) const {
        bool found = false;
        query_disk(rho, theta, d, [&](std::size_t) {
            found = true;
            return false;
        });
        return found;
    }

private:
    template <typename Fn>  // Fn(index) -> bool keep_going
    void query_disk(double rho1, double theta, double d, Fn&& fn) const {
        const double cd2 = std::cosh(d) * std::cosh(d);
        const double om1 = 1.0 - rho1 * rho1;
        const double beta_z = std::atanh(std::min(rho1, 1.0 - 1e-16));
        const int lo = std::max(0, static_cast<int>(std::floor((beta_z - d) / level_h_)));
        const int hi = std::min(level_count() - 1, static_cast<int>(std::ceil((beta_z + d) / level_h_)));
        for (int i = lo; i <= hi; ++i) {
            const auto& lv = levels_[i];
            if (lv.empty()) continue;
            const double rho2 = std::tanh(i * level_h_);
            const double A = (1.0 - rho1 * rho2) * (1.0 - rho1 * rho2);
            const double B = 4.0 * rho1 * rho2;
            const double C = cd2 * om1 * (1.0 - rho2 * rho2);
            if (C <= A) continue;  // radial gap alone is >= d
            if (B <= C - A) {      // every angle on this circle qualifies
                for (const auto& e : lv)
                    if (!fn(e.second)) return;
                continue;
            }
            // sin^2(dtheta/2) < (C-A)/B  =>  |dtheta| < 2 asin(sqrt((C-A)/B))
            const double w = 2.0 * std::asin(std::min(1.0, std::sqrt((C - A) / B)));
            if (!scan_window(lv, theta, w, fn)) return;
        }
    }

    template <typename Fn>
    bool scan_window(const std::vector<std::pair<double, std::size_t>>& lv, double theta, double w,
                     Fn&& fn) const {
        auto emit_range = [&](double a, double b) -> bool {  // [a,b] within [0,2pi)
            auto it = std::lower_bound(lv.begin(), lv.end(), a,
                                       [](const auto& e, double v) { return e.first < v; });
            for (; it != lv.end() && it->first <= b; ++it)
                if (!fn(it->second)) return false;
            return true;
        };
        double t = std::fmod(theta, 2.0 * M_PI);
        if (t < 0.0) t += 2.0 * M_PI;
        double a = t - w, b = t + w;
        if (b - a >= 2.0 * M_PI) return emit_range(0.0, 2.0 * M_PI);
        if (a < 0.0) {
            if (!emit_range(a + 2.0 * M_PI, 2.0 * M_PI)) return false;
            a = 0.0;
        }
        if (b > 2.0 * M_PI) {
            if (!emit_range(0.0, b - 2.0 * M_PI)) return false;
            b = 2.0 * M_PI;
        }
        return emit_range(a, b);
    }

    template <typename Fn>
    void band_query(const BallPoint& z, double beta_z, double d, Fn&& fn) const {
        auto lo = std::lower_bound(beta0_.begin(), beta0_.end(), beta_z - d);
        auto hi = std::upper_bound(beta0_.begin(), beta0_.end(), beta_z + d);
        for (auto it = lo; it != hi; ++it) {
            const std::size_t k = static_cast<std::size_t>(it - beta0_.begin());
            if (bergman_metric(z, points_[k]) < d)
                if (!fn(k)) return;
        }
    }

    int n_;
    double delta_;
    double r_max_;
    LatticeReport report_;
    std::vector<BallPoint> points_;
    std::vector<double> beta0_;
    // n = 1 only: per radial level, (angle in [0,2pi), point index), angle-sorted.
    double level_h_ = 0.0;
    std::vector<std::vector<std::pair<double, std::size_t>>> levels_;
};

// Expected cardinality of a maximal delta/2-separated subset of
// {beta(0,z) <= r_max}: invariant volume ratio sinh^{2n}(r_max)/sinh^{2n}(delta/4)
// is an upper (packing) bound; sinh^{2n}(r_max)/sinh^{2n}(delta/2) a lower one.
inline double lattice_size_upper_bound(int n, double delta, double r_max) {
    return std::pow(std::sinh(r_max + delta / 4.0) / std::sinh(delta / 4.0), 2.0 * n);
}

inline constexpr std::size_t kLatticeMaxPoints = 500000;

// Greedy maximal delta/2-separated set.  n = 1 enumerates a deterministic
// radial-angular mesh at resolution delta/8 in the Bergman metric; n >= 2
// draws candidates from the invariant measure (density matched to the target
// separation, seeded), so maximality is certified only at the sampled
// resolution there.
inline Lattice build_lattice(int n, double delta, double r_max, std::uint64_t seed) {
    Lattice L(n, delta, r_max);
    const double sep = delta / 2.0;
    if (n == 1) {
        const double h = delta / 8.0;
        L.push(BallPoint::origin(1), 0.0, 0, 0.0);
        const int levels = static_cast<int>(std::ceil(r_max / h));
        Rng rng(seed, stream_tag::lattice, 0);
        for (int i = 1; i <= levels; ++i) {
            const double beta_i = i * h;
            const double rho = std::tanh(beta_i);
            // angular step of Bergman length h along the circle
            const double dtheta = h * (1.0 - rho * rho) / rho;
            const int m = std::max(8, static_cast<int>(std::ceil(2.0 * M_PI / dtheta)));
            const double step = 2.0 * M_PI / m;
            const double offset = rng.uniform() * step;
            for (int k = 0; k < m; ++k) {
                const double theta = offset + k * step;
                if (L.any_within_disk(rho, theta, sep)) continue;
                if (L.size() >= kLatticeMaxPoints)
                    throw ContractViolation("build_lattice: point budget exceeded (" +
                                            std::to_string(kLatticeMaxPoints) + ")");
                L.push(BallPoint(CVec{std::polar(rho, theta)}), beta_i, i, theta);
            }
        }
    } else {
        const double predicted = lattice_size_upper_bound(n, delta, r_max);
        if (predicted > static_cast<double>(kLatticeMaxPoints) * 4.0)
            throw ContractViolation("build_lattice: predicted cardinality " +
                                    std::to_string(predicted) + " exceeds the point budget");
        const double target = std::pow(std::sinh(r_max) / std::sinh(sep), 2.0 * n);
        const std::size_t candidates =
            std::min<std::size_t>(2000000, static_cast<std::size_t>(std::ceil(24.0 * target)) + 64);
        Rng rng(seed, stream_tag::lattice, 1);
        std::vector<double> betas(candidates);
        const double sh = std::sinh(r_max);
        for (auto& b : betas) b = std::asinh(std::pow(rng.uniform(), 1.0 / (2.0 * n)) * sh);
        std::sort(betas.begin(), betas.end());
        Rng dir_rng(seed, stream_tag::lattice, 2);
        L.push(BallPoint::origin(n), 0.0);
        for (double b : betas) {
            const double rho = std::tanh(b);
            CVec c = dir_rng.unit_sphere(n);
            for (auto& x : c) x *= rho;
            BallPoint z(std::move(c));
            if (L.any_within(z, sep)) continue;
            if (L.size() >= kLatticeMaxPoints)
                throw ContractViolation("build_lattice: point budget exceeded");
            L.push(std::move(z), b);
        }
    }
    return L;
}

// Draws z with beta(0,z) <= r_cap from the normalized invariant measure.
inline BallPoint sample_invariant_ball(int n, double r_cap, Rng& rng) {
    const double b = std::asinh(std::pow(rng.uniform(), 1.0 / (2.0 * n)) * std::sinh(r_cap));
    const double rho = std::tanh(b);
    CVec c = rng.unit_sphere(n);
    for (auto& x : c) x *= rho;
    return BallPoint(std::move(c));
}

inline LatticeReport verify_lattice(const Lattice& L, std::size_t samples, std::uint64_t seed) {
    LatticeReport rep;
    rep.covering_samples = samples;
    // Pairwise separation: nearest neighbor within probe distance delta.
    double min_sep = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < L.size(); ++k) {
        for (std::size_t j : L.neighbors_within(L.point(k), L.delta())) {
            if (j == k) continue;
            min_sep = std::min(min_sep, bergman_metric(L.point(k), L.point(j)));
        }
    }
    rep.min_pairwise_separation = min_sep;
    // Covering of {beta(0,z) <= r_max - delta} at radius delta.
    rep.covering_ok = true;
    Rng rng(seed, stream_tag::lattice, 11);
    const double r_inner = L.r_max() - L.delta();
    for (std::size_t i = 0; i < samples && r_inner > 0.0; ++i) {
        BallPoint z = sample_invariant_ball(L.n(), r_inner, rng);
        if (!L.any_within(z, L.delta())) {
            rep.covering_ok = false;
            rep.failure_witness = "uncovered point at beta(0,z)=" +
                                  std::to_string(bergman_metric(BallPoint::origin(L.n()), z));
            break;
        }
    }
    // Observed overlap of the 4*delta balls.
    Rng rng2(seed, stream_tag::lattice, 12);
    const std::size_t overlap_samples = std::min<std::size_t>(samples, 10000);
    for (std::size_t i = 0; i < overlap_samples; ++i) {
        BallPoint z = sample_invariant_ball(L.n(), L.r_max(), rng2);
        const auto hits = L.neighbors_within(z, 4.0 * L.delta());
        rep.max_overlap_observed = std::max<int>(rep.max_overlap_observed, static_cast<int>(hits.size()));
    }
    return rep;
}

}  // namespace tentlab
