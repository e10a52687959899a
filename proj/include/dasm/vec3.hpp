#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace dasm {

using Vec3 = std::array<double, 3>;

/// Stacked 3N coordinate vector [x0,y0,z0,x1,...].
using Vector = std::vector<double>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec3 operator*(const Vec3& a, double s) { return s * a; }
inline Vec3& operator+=(Vec3& a, const Vec3& b) {
    a[0] += b[0]; a[1] += b[1]; a[2] += b[2];
    return a;
}
inline Vec3& operator-=(Vec3& a, const Vec3& b) {
    a[0] -= b[0]; a[1] -= b[1]; a[2] -= b[2];
    return a;
}

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 get3(std::span<const double> phi, std::size_t i) {
    return {phi[3 * i], phi[3 * i + 1], phi[3 * i + 2]};
}
inline void set3(std::span<double> phi, std::size_t i, const Vec3& v) {
    phi[3 * i] = v[0]; phi[3 * i + 1] = v[1]; phi[3 * i + 2] = v[2];
}
inline void add3(std::span<double> phi, std::size_t i, const Vec3& v) {
    phi[3 * i] += v[0]; phi[3 * i + 1] += v[1]; phi[3 * i + 2] += v[2];
}

}  // namespace dasm
