#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>

#include "dasm/mesh.hpp"
#include "dasm/random.hpp"
#include "dasm/shapes.hpp"

namespace dasm::test {

/// Closed mesh with irregular degrees and jittered positions.
inline TriangleMesh random_closed_mesh(int vertices, std::uint64_t seed, double jitter = 0.03) {
    return add_noise(make_fibonacci_sphere(vertices), jitter, seed);
}

inline Vector random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    Rng rng(seed);
    Vector v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Central differences of `f` at `x`.
inline Vector numeric_gradient(const std::function<double(std::span<const double>)>& f, std::span<const double> x,
                               double h = 1e-6) {
    Vector probe(x.begin(), x.end());
    Vector g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep = probe[i];
        probe[i] = keep + h;
        const double fp = f(probe);
        probe[i] = keep - h;
        const double fm = f(probe);
        probe[i] = keep;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

/// Scratch directory unique to the calling test.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("dasm_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace dasm::test
