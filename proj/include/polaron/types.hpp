// Copyright 2026 The polaron-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace polaron {

/// Real 3-vector in inverse-length units.
using Vec3 = std::array<double, 3>;

/// Integer lattice coordinates; physical momentum is spacing * coordinates.
using IVec3 = std::array<std::int64_t, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator-(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

inline IVec3 operator+(const IVec3& a, const IVec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline IVec3 operator-(const IVec3& a, const IVec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline IVec3 operator-(const IVec3& a) { return {-a[0], -a[1], -a[2]}; }
inline std::int64_t norm2(const IVec3& a) { return a[0] * a[0] + a[1] * a[1] + a[2] * a[2]; }

inline Vec3 scaled(double spacing, const IVec3& n) {
    return {spacing * static_cast<double>(n[0]), spacing * static_cast<double>(n[1]),
            spacing * static_cast<double>(n[2])};
}

// Error taxonomy. Preconditions raise std::invalid_argument, singular
// evaluations raise std::domain_error.

/// A combinatorial size exceeded its configured limit.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative method ran out of iterations; carries the last residual.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace polaron
