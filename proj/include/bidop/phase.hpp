#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace bidop {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into [0, 2pi).
inline double wrap_2pi(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

/// Wraps an angle into (-pi, pi].
inline double wrap_pi(double x) {
    double r = std::remainder(x, kTwoPi);
    if (r <= -std::numbers::pi) r += kTwoPi;
    return r;
}

/// Unsigned angular distance in [0, pi].
inline double angular_distance(double a, double b) { return std::abs(wrap_pi(a - b)); }

/**
 * @brief Phase on the circle, stored as a fixed-point fraction of a turn.
 *
 * The full 2^64 range maps onto one revolution, so addition and subtraction
 * are exact modulo 2pi. Offsets that are common to two phases cancel
 * bit-exactly when the phases are subtracted.
 */
class Phase {
public:
    constexpr Phase() = default;

    static constexpr Phase from_turns(std::uint64_t turns) {
        Phase p;
        p.turns_ = turns;
        return p;
    }

    static Phase from_radians(double rad) {
        double t = rad / kTwoPi;
        t -= std::floor(t);
        // t in [0, 1]; 1.0 can appear through rounding and means a full turn
        double scaled = std::ldexp(t, 64);
        if (!(scaled < 18446744073709551616.0)) return Phase{};
        return from_turns(static_cast<std::uint64_t>(scaled));
    }

    constexpr std::uint64_t turns() const { return turns_; }

    /// Angle in [0, 2pi).
    double radians() const {
        double r = std::ldexp(static_cast<double>(turns_ >> 11), -53) * kTwoPi;
        if (r >= kTwoPi) r = std::nextafter(kTwoPi, 0.0);
        return r;
    }

    /// Signed angle of this phase in (-pi, pi].
    double signed_radians() const {
        auto s = static_cast<std::int64_t>(turns_);
        if (s == INT64_MIN) return std::numbers::pi;
        return std::ldexp(static_cast<double>(s), -64) * kTwoPi;
    }

    friend constexpr Phase operator+(Phase a, Phase b) { return from_turns(a.turns_ + b.turns_); }
    friend constexpr Phase operator-(Phase a, Phase b) { return from_turns(a.turns_ - b.turns_); }
    friend constexpr bool operator==(Phase a, Phase b) = default;

private:
    std::uint64_t turns_ = 0;
};

}  // namespace bidop
