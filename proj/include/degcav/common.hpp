// common.hpp — shared numerics: quadrature, angle reduction, parallel maps, hashing

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace degcav {

using complexd = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

// ------------------------------- error types --------------------------------
// ValidationError -> bad inputs/configs (CLI exit 2)
// NumericError    -> a computation that cannot proceed or failed to converge (exit 3)
// IoError         -> filesystem problems (exit 4)

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ------------------------------- small helpers ------------------------------

// Reduce an angle to the principal branch (-pi, pi].
inline double wrap_angle(double x) {
    double y = std::remainder(x, 2.0 * pi);
    if (y <= -pi) y += 2.0 * pi;
    return y;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0) throw ValidationError("linspace: empty grid");
    std::vector<double> x(n);
    if (n == 1) {
        x[0] = lo;
        return x;
    }
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) x[i] = lo + h * static_cast<double>(i);
    x.back() = hi;
    return x;
}

inline bool is_uniform(std::span<const double> x, double rel_tol = 1e-9) {
    if (x.size() < 2) return true;
    const double h = x[1] - x[0];
    for (std::size_t i = 1; i + 1 < x.size(); ++i)
        if (std::abs((x[i + 1] - x[i]) - h) > rel_tol * std::max(1.0, std::abs(h))) return false;
    return true;
}

// ------------------------------- quadrature ---------------------------------

// Composite Simpson weights on a uniform grid (trapezoid patch on the last
// interval when the point count is even).
inline std::vector<double> simpson_weights(std::size_t n, double h) {
    if (n < 2) throw ValidationError("simpson_weights: need at least 2 points");
    std::vector<double> w(n, 0.0);
    const std::size_t m = (n % 2 == 1) ? n : n - 1;
    w[0] = 1.0;
    for (std::size_t i = 1; i + 1 < m; ++i) w[i] = (i % 2 == 1) ? 4.0 : 2.0;
    w[m - 1] += 1.0;
    for (auto& v : w) v *= h / 3.0;
    if (m != n) {
        w[n - 2] += 0.5 * h;
        w[n - 1] += 0.5 * h;
    }
    return w;
}

inline double integrate_simpson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("integrate_simpson: size mismatch");
    if (!is_uniform(x)) throw ValidationError("integrate_simpson: grid must be uniform");
    const auto w = simpson_weights(x.size(), x[1] - x[0]);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * y[i];
    return s;
}

inline double integrate_trapezoid(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("integrate_trapezoid: bad sizes");
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) s += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
    return s;
}

// Cumulative trapezoid evaluated at an arbitrary abscissa; monotone
// nondecreasing when y >= 0.
inline double cumulative_trapezoid_at(std::span<const double> x, std::span<const double> y, double x_eval) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("cumulative_trapezoid_at: bad sizes");
    if (x_eval < x.front() - 1e-15) throw ValidationError("cumulative_trapezoid_at: point below grid");
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        if (x_eval >= x[i + 1]) {
            s += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
        } else {
            const double t = (x_eval - x[i]) / (x[i + 1] - x[i]);
            const double y_at = y[i] + t * (y[i + 1] - y[i]);
            s += 0.5 * (y[i] + y_at) * (x_eval - x[i]);
            return s;
        }
    }
    return s;
}

// Regularized upper incomplete gamma Q(a, z) for integer a >= 1:
// Q(a, z) = e^{-z} sum_{k=0}^{a-1} z^k / k!
inline double gamma_q_int(int a, double z) {
    if (a < 1) throw ValidationError("gamma_q_int: a must be >= 1");
    if (z < 0.0) throw ValidationError("gamma_q_int: z must be >= 0");
    if (z == 0.0) return 1.0;
    // accumulate in log-safe form: term_{k+1} = term_k * z / (k+1)
    double term = std::exp(-z);
    double sum = term;
    for (int k = 1; k < a; ++k) {
        term *= z / static_cast<double>(k);
        sum += term;
    }
    return std::min(1.0, sum);
}

// ------------------------------ parallel map ---------------------------------

// Deterministic parallel loop: results land in caller-owned slots indexed by i.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned nt = std::max(1u, std::min({threads == 0 ? hw : threads, hw, static_cast<unsigned>(n)}));
    if (nt == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&, t]() {
            try {
                for (std::size_t i = t; i < n; i += nt) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ------------------------------- hashing ------------------------------------

// FNV-1a 64-bit, used for run manifests and sweep tags.
inline std::uint64_t fnv1a(std::span<const std::byte> data, std::uint64_t seed = 0xcbf29ce484222325ull) {
    std::uint64_t h = seed;
    for (std::byte b : data) {
        h ^= static_cast<std::uint64_t>(b);
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::string& s) {
    return fnv1a(std::as_bytes(std::span<const char>(s.data(), s.size())));
}

}  // namespace degcav
