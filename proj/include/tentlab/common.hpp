#pragma once

#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <future>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace tentlab {

using cdouble = std::complex<double>;
using CVec = std::vector<cdouble>;

/// Thrown when a documented precondition is violated by the caller.
struct ContractViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown on conditions that should be unreachable for valid inputs.
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

// Hermitian inner product <z,w> = sum z_j * conj(w_j).
inline cdouble hermitian_inner(std::span<const cdouble> z, std::span<const cdouble> w) {
    if (z.size() != w.size())
        throw ContractViolation("hermitian_inner: dimension mismatch");
    cdouble s = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) s += z[j] * std::conj(w[j]);
    return s;
}

inline double norm_sq(std::span<const cdouble> z) {
    double s = 0.0;
    for (const auto& c : z) s += std::norm(c);
    return s;
}

inline double euclid_norm(std::span<const cdouble> z) { return std::sqrt(norm_sq(z)); }

// Pairwise summation; the fixed reduction order keeps results reproducible
// regardless of how the terms were produced.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

inline int worker_count() {
    if (const char* env = std::getenv("TENTLAB_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Evaluates fn(0..n-1) with fn pure; results are collected in index order so
// the reduction is deterministic for any worker count.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn) {
    std::vector<T> out(n);
    const int workers = std::min<int>(worker_count(), static_cast<int>(n == 0 ? 1 : n));
    if (workers <= 1 || n < 4) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::vector<std::future<void>> futs;
    futs.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        futs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
        }));
    }
    for (auto& f : futs) f.get();
    return out;
}

}  // namespace tentlab
