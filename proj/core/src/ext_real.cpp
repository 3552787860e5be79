#include "screening/ext_real.hpp"

#include <cmath>
#include <limits>

#include "screening/errors.hpp"

namespace screening {

namespace {

void require_finite(const ExtReal& a, const ExtReal& b, const char* op) {
    if (!a.is_finite() || !b.is_finite()) {
        throw Error(ErrorCode::SentinelArithmetic,
                    std::string("operator") + op + " applied to a non-finite extended real");
    }
}

}  // namespace

double ExtReal::value() const {
    if (!is_finite()) {
        throw Error(ErrorCode::SentinelArithmetic, "value() of a non-finite extended real");
    }
    return value_;
}

double ExtReal::to_double() const noexcept {
    switch (kind_) {
        case Kind::Finite: return value_;
        case Kind::PosInf: return std::numeric_limits<double>::infinity();
        case Kind::NegInf: return -std::numeric_limits<double>::infinity();
        case Kind::Undefined: return std::numeric_limits<double>::quiet_NaN();
    }
    return std::numeric_limits<double>::quiet_NaN();
}

ExtReal operator+(const ExtReal& a, const ExtReal& b) {
    require_finite(a, b, "+");
    return ExtReal(a.value_ + b.value_);
}

ExtReal operator-(const ExtReal& a, const ExtReal& b) {
    require_finite(a, b, "-");
    return ExtReal(a.value_ - b.value_);
}

ExtReal operator*(const ExtReal& a, const ExtReal& b) {
    require_finite(a, b, "*");
    return ExtReal(a.value_ * b.value_);
}

ExtReal operator-(const ExtReal& a) {
    require_finite(a, a, "-");
    return ExtReal(-a.value_);
}

std::partial_ordering operator<=>(const ExtReal& a, const ExtReal& b) noexcept {
    using K = ExtReal::Kind;
    if (a.kind_ == K::Undefined || b.kind_ == K::Undefined) return std::partial_ordering::unordered;
    auto rank = [](const ExtReal& x) {
        switch (x.kind_) {
            case K::NegInf: return 0;
            case K::Finite: return 1;
            default: return 2;
        }
    };
    if (rank(a) != rank(b)) return rank(a) <=> rank(b);
    if (a.kind_ != K::Finite) return std::partial_ordering::equivalent;
    return a.value_ <=> b.value_;
}

bool operator==(const ExtReal& a, const ExtReal& b) noexcept {
    return (a <=> b) == std::partial_ordering::equivalent;
}

std::ostream& operator<<(std::ostream& os, const ExtReal& x) {
    switch (x.kind_) {
        case ExtReal::Kind::Finite: return os << x.value_;
        case ExtReal::Kind::PosInf: return os << "+inf";
        case ExtReal::Kind::NegInf: return os << "-inf";
        case ExtReal::Kind::Undefined: return os << "undefined";
    }
    return os;
}

}  // namespace screening
