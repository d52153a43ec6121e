#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>

#include "errors.hpp"

namespace bendlab {

/// Exact fraction with 64-bit numerator and denominator, always reduced and
/// with a positive denominator.
class Rational {
public:
    constexpr Rational(std::int64_t n = 0, std::int64_t d = 1) : n_(n), d_(d) {
        if (d_ == 0) throw DomainError("zero denominator");
        if (d_ < 0) {
            n_ = -n_;
            d_ = -d_;
        }
        const std::int64_t g = std::gcd(n_ < 0 ? -n_ : n_, d_);
        if (g > 1) {
            n_ /= g;
            d_ /= g;
        }
    }

    constexpr std::int64_t num() const { return n_; }
    constexpr std::int64_t den() const { return d_; }
    constexpr double to_double() const { return static_cast<double>(n_) / static_cast<double>(d_); }

    friend constexpr Rational operator+(Rational a, Rational b) { return {a.n_ * b.d_ + b.n_ * a.d_, a.d_ * b.d_}; }
    friend constexpr Rational operator-(Rational a, Rational b) { return {a.n_ * b.d_ - b.n_ * a.d_, a.d_ * b.d_}; }
    friend constexpr Rational operator*(Rational a, Rational b) { return {a.n_ * b.n_, a.d_ * b.d_}; }
    friend constexpr Rational operator/(Rational a, Rational b) { return {a.n_ * b.d_, a.d_ * b.n_}; }
    friend constexpr bool operator==(Rational a, Rational b) { return a.n_ == b.n_ && a.d_ == b.d_; }
    friend constexpr bool operator<(Rational a, Rational b) { return a.n_ * b.d_ < b.n_ * a.d_; }

    friend std::ostream& operator<<(std::ostream& os, Rational r) {
        os << r.n_;
        if (r.d_ != 1) os << '/' << r.d_;
        return os;
    }

private:
    std::int64_t n_;
    std::int64_t d_;
};

inline std::string to_string(Rational r) {
    return r.den() == 1 ? std::to_string(r.num()) : std::to_string(r.num()) + "/" + std::to_string(r.den());
}

}  // namespace bendlab
