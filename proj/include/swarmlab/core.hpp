#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace swarmlab {

/// Raised for invalid configurations; the message lists each violated bound.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a non-finite value shows up in simulation state.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;

    double norm() const { return std::sqrt(x * x + y * y); }
    constexpr double norm2() const { return x * x + y * y; }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

/// Velocity in domain units per time-step.
using Velocity = Vec2;

inline void require_finite(const Vec2& v, const char* what) {
    if (!v.finite()) {
        throw NumericError(std::string("non-finite ") + what);
    }
}

inline double dist(const Vec2& a, const Vec2& b) {
    require_finite(a, "position");
    require_finite(b, "position");
    return (a - b).norm();
}

/// Squared distance without finiteness checks, for inner loops.
constexpr double dist2(const Vec2& a, const Vec2& b) { return (a - b).norm2(); }

/// Conditional clamp: scales v down to v_max only when it is faster.
inline Velocity limit_speed(const Velocity& v, double v_max) {
    require_finite(v, "velocity");
    if (!(v_max > 0.0)) {
        throw ConfigError("limit_speed: v_max must be > 0");
    }
    const double speed = v.norm();
    if (speed <= v_max) {
        return v;
    }
    // Rounding can leave the scaled vector an ulp too long; shave it so the
    // result is within the limit and a second call is a no-op.
    Velocity out = v * (v_max / speed);
    while (out.norm() > v_max) {
        out *= 1.0 - 0x1.0p-52;
    }
    return out;
}

/// Unconditional rescale to exactly v_max (zero vectors pass through).
inline Velocity rescale_speed(const Velocity& v, double v_max) {
    require_finite(v, "velocity");
    if (!(v_max > 0.0)) {
        throw ConfigError("rescale_speed: v_max must be > 0");
    }
    const double speed = v.norm();
    if (speed == 0.0) {
        return v;
    }
    return v * (v_max / speed);
}

/// splitmix64 finalizer; used for seed derivation and pair hashing.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Run-level random source. mt19937_64 is fully specified by the standard and
/// uniform draws use the top 53 bits, so sequences are portable across
/// standard libraries (std::uniform_real_distribution is not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace swarmlab
