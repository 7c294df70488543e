#pragma once

#include <cmath>
#include <memory>
#include <variant>

#include "geometry.hpp"
#include "lattice.hpp"

namespace tentlab {

// Principal-branch power (1-w)^{-e}; valid on the ball since Re(1-<z,a>) > 0.
inline cdouble kernel_power(cdouble one_minus, double e) {
    return std::exp(-e * std::log(one_minus));
}

// r_k(tau) = sign(sin(2^k pi tau)), with +1 at the zeros.
inline int rademacher(int k, double tau) {
    if (k < 1) throw ContractViolation("rademacher: k must be >= 1");
    if (!(tau >= 0.0 && tau < 1.0)) throw ContractViolation("rademacher: tau must be in [0,1)");
    const double x = std::ldexp(tau, k);  // 2^k * tau
    const double fl = std::floor(x);
    if (x == fl) return 1;  // zero of sin
    return (static_cast<long long>(fl) % 2 == 0) ? 1 : -1;
}

struct Polynomial {
    // multi-index (m_1..m_n) -> coefficient
    std::vector<std::pair<std::vector<int>, cdouble>> terms;
    int n = 1;
};

// f_a(z) = (1-|a|^2)^theta / (1-<z,a>)^e with e = theta + (n+1+alpha)/q + n/p.
struct KernelPowerFa {
    BallPoint a;
    double theta;
    double e;
};

// g_zeta(z) = (1-<z,zeta>)^{-theta}
struct BoundaryKernelG {
    SpherePoint zeta;
    double theta;
};

// S^theta_Z(lambda)(z) = sum_k lambda_k (1-|a_k|^2)^theta / (1-<z,a_k>)^{theta+(n+1+alpha)/q}
struct LatticeSum {
    std::shared_ptr<const Lattice> lattice;
    CVec lambda;
    double theta;
    double alpha;
    double q;
};

// F_tau: the lattice sum with coefficients lambda_k * r_k(tau), indexed from k = 1.
struct RademacherSum {
    LatticeSum base;
    double tau;
};

struct Composed;  // outer one-variable polynomial applied to an inner function

class HoloFunction {
public:
    using Variant =
        std::variant<Polynomial, KernelPowerFa, BoundaryKernelG, LatticeSum, RademacherSum,
                     std::shared_ptr<const Composed>>;

    HoloFunction(Variant v) : v_(std::move(v)) {}

    static HoloFunction polynomial(std::vector<std::pair<std::vector<int>, cdouble>> terms, int n) {
        for (const auto& [m, c] : terms) {
            (void)c;
            if (static_cast<int>(m.size()) != n)
                throw ContractViolation("polynomial: multi-index length must equal n");
            for (int mi : m)
                if (mi < 0) throw ContractViolation("polynomial: negative exponent");
        }
        return HoloFunction(Polynomial{std::move(terms), n});
    }
    static HoloFunction constant(cdouble c, int n) {
        return polynomial({{std::vector<int>(static_cast<std::size_t>(n), 0), c}}, n);
    }
    // The test family of kernel powers adapted to (p, q, alpha).
    static HoloFunction make_fa(BallPoint a, double theta, double alpha, double q, double p) {
        if (!(theta > 0.0)) throw ContractViolation("make_fa: theta must be > 0");
        const int n = a.n();
        const double e = theta + (n + 1.0 + alpha) / q + n / p;
        return HoloFunction(KernelPowerFa{std::move(a), theta, e});
    }
    static HoloFunction make_g(SpherePoint zeta, double theta) {
        if (!(theta > 0.0)) throw ContractViolation("make_g: theta must be > 0");
        return HoloFunction(BoundaryKernelG{std::move(zeta), theta});
    }
    static HoloFunction lattice_sum(std::shared_ptr<const Lattice> Z, CVec lambda, double theta,
                                    double alpha, double q) {
        if (!Z) throw ContractViolation("lattice_sum: null lattice");
        if (lambda.size() != Z->size())
            throw ContractViolation("lattice_sum: coefficient count must match the lattice");
        return HoloFunction(LatticeSum{std::move(Z), std::move(lambda), theta, alpha, q});
    }
    static HoloFunction rademacher_sum(LatticeSum base, double tau) {
        return HoloFunction(RademacherSum{std::move(base), tau});
    }
    static HoloFunction composed(std::vector<cdouble> outer_coeffs, HoloFunction inner);

    const Variant& variant() const { return v_; }
    int dim() const;

private:
    Variant v_;
};

struct Composed {
    std::vector<cdouble> outer;  // phi(u) = sum_j outer[j] u^j
    HoloFunction inner;
};

inline HoloFunction HoloFunction::composed(std::vector<cdouble> outer_coeffs, HoloFunction inner) {
    return HoloFunction(std::make_shared<const Composed>(
        Composed{std::move(outer_coeffs), std::move(inner)}));
}

inline cdouble evaluate(const HoloFunction& f, const BallPoint& z);

namespace detail {

inline cdouble eval_lattice_sum(const LatticeSum& ls, const BallPoint& z, const double* signs) {
    const int n = z.n();
    const double e = ls.theta + (n + 1.0 + ls.alpha) / ls.q;
    cdouble s = 0.0;
    for (std::size_t k = 0; k < ls.lambda.size(); ++k) {
        const BallPoint& a = ls.lattice->point(k);
        const cdouble om = 1.0 - hermitian_inner(z.coords(), a.coords());
        cdouble term = ls.lambda[k] * std::pow(a.one_minus_sq(), ls.theta) * kernel_power(om, e);
        if (signs) term *= signs[k];
        s += term;
    }
    return s;
}

}  // namespace detail

inline cdouble evaluate(const HoloFunction& f, const BallPoint& z) {
    return std::visit(
        [&](const auto& v) -> cdouble {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Polynomial>) {
                if (v.n != z.n()) throw ContractViolation("evaluate: dimension mismatch");
                cdouble s = 0.0;
                for (const auto& [m, c] : v.terms) {
                    cdouble t = c;
                    for (int j = 0; j < v.n; ++j)
                        for (int i = 0; i < m[static_cast<std::size_t>(j)]; ++i)
                            t *= z.coords()[static_cast<std::size_t>(j)];
                    s += t;
                }
                return s;
            } else if constexpr (std::is_same_v<T, KernelPowerFa>) {
                if (v.a.n() != z.n()) throw ContractViolation("evaluate: dimension mismatch");
                const cdouble om = 1.0 - hermitian_inner(z.coords(), v.a.coords());
                return std::pow(v.a.one_minus_sq(), v.theta) * kernel_power(om, v.e);
            } else if constexpr (std::is_same_v<T, BoundaryKernelG>) {
                if (v.zeta.n() != z.n()) throw ContractViolation("evaluate: dimension mismatch");
                const cdouble om = 1.0 - hermitian_inner(z.coords(), v.zeta.coords());
                return kernel_power(om, v.theta);
            } else if constexpr (std::is_same_v<T, LatticeSum>) {
                return detail::eval_lattice_sum(v, z, nullptr);
            } else if constexpr (std::is_same_v<T, RademacherSum>) {
                std::vector<double> signs(v.base.lambda.size());
                for (std::size_t k = 0; k < signs.size(); ++k)
                    signs[k] = rademacher(static_cast<int>(k) + 1, v.tau);
                return detail::eval_lattice_sum(v.base, z, signs.data());
            } else {  // Composed
                const cdouble u = evaluate(v->inner, z);
                cdouble s = 0.0;
                for (std::size_t j = v->outer.size(); j-- > 0;) s = s * u + v->outer[j];
                return s;
            }
        },
        f.variant());
}

inline int HoloFunction::dim() const {
    return std::visit(
        [](const auto& v) -> int {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Polynomial>) return v.n;
            else if constexpr (std::is_same_v<T, KernelPowerFa>) return v.a.n();
            else if constexpr (std::is_same_v<T, BoundaryKernelG>) return v.zeta.n();
            else if constexpr (std::is_same_v<T, LatticeSum>) return v.lattice->n();
            else if constexpr (std::is_same_v<T, RademacherSum>) return v.base.lattice->n();
            else return v->inner.dim();
        },
        v_);
}

// phi composed with f, phi a one-variable polynomial given by coefficients.
inline HoloFunction superpose(std::vector<cdouble> phi_coeffs, HoloFunction f) {
    if (phi_coeffs.empty()) throw ContractViolation("superpose: empty polynomial");
    return HoloFunction::composed(std::move(phi_coeffs), std::move(f));
}

// Boundary directions where |f| can blow up as |z| -> 1; used to focus
// outer-integral sampling near them.
inline std::vector<SpherePoint> singular_directions(const HoloFunction& f) {
    return std::visit(
        [](const auto& v) -> std::vector<SpherePoint> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, BoundaryKernelG>) {
                return {v.zeta};
            } else if constexpr (std::is_same_v<T, KernelPowerFa>) {
                const double r = v.a.abs();
                if (r < 1e-12) return {};
                CVec d(v.a.coords());
                for (auto& c : d) c /= r;
                return {SpherePoint(std::move(d))};
            } else if constexpr (std::is_same_v<T, std::shared_ptr<const Composed>>) {
                return singular_directions(v->inner);
            } else {
                return {};
            }
        },
        f.variant());
}

}  // namespace tentlab
