#pragma once

#include <compare>
#include <ostream>

namespace screening {

/// Extended real used for frontier values and one-sided slopes.
///
/// Frontiers are -inf off their effective domain and one-sided slopes may be
/// +-inf at domain boundaries. Those sentinels are representable here, but any
/// arithmetic involving them throws (ErrorCode::SentinelArithmetic): a -inf
/// frontier value must be handled explicitly, never silently propagated.
class ExtReal {
public:
    enum class Kind { Finite, PosInf, NegInf, Undefined };

    constexpr ExtReal() noexcept = default;
    constexpr ExtReal(double v) noexcept : value_(v) {}  // NOLINT(google-explicit-constructor)

    static constexpr ExtReal pos_inf() noexcept { return ExtReal(Kind::PosInf); }
    static constexpr ExtReal neg_inf() noexcept { return ExtReal(Kind::NegInf); }
    static constexpr ExtReal undefined() noexcept { return ExtReal(Kind::Undefined); }

    constexpr Kind kind() const noexcept { return kind_; }
    constexpr bool is_finite() const noexcept { return kind_ == Kind::Finite; }
    constexpr bool is_neg_inf() const noexcept { return kind_ == Kind::NegInf; }
    constexpr bool is_pos_inf() const noexcept { return kind_ == Kind::PosInf; }
    constexpr bool is_undefined() const noexcept { return kind_ == Kind::Undefined; }

    /// Finite payload; throws on a sentinel.
    double value() const;

    /// Finite payload, or the IEEE infinity of the same sign. Undefined maps
    /// to NaN. Meant for reporting, not for arithmetic.
    double to_double() const noexcept;

    friend ExtReal operator+(const ExtReal& a, const ExtReal& b);
    friend ExtReal operator-(const ExtReal& a, const ExtReal& b);
    friend ExtReal operator*(const ExtReal& a, const ExtReal& b);
    friend ExtReal operator-(const ExtReal& a);

    /// Total order on NegInf < finite < PosInf; Undefined is unordered.
    friend std::partial_ordering operator<=>(const ExtReal& a, const ExtReal& b) noexcept;
    friend bool operator==(const ExtReal& a, const ExtReal& b) noexcept;

    friend std::ostream& operator<<(std::ostream& os, const ExtReal& x);

private:
    constexpr explicit ExtReal(Kind k) noexcept : kind_(k) {}

    Kind kind_ = Kind::Finite;
    double value_ = 0.0;
};

inline constexpr ExtReal NEG_INF = ExtReal::neg_inf();
inline constexpr ExtReal POS_INF = ExtReal::pos_inf();

}  // namespace screening
