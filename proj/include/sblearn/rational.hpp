#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sblearn {

using Int = boost::multiprecision::cpp_int;

/// Rational number over arbitrary-precision integers, extended with the two
/// infinities stored as 1/0 and -1/0.  Values are always kept irreducible
/// with a non-negative denominator; zero is 0/1.
class Rational {
  public:
    Rational() : num_(0), den_(1) {}

    Rational(Int numerator, Int denominator) {
        if (denominator < 0) {
            numerator = -numerator;
            denominator = -denominator;
        }
        if (denominator == 0) {
            if (numerator == 0)
                throw std::invalid_argument("rational: 0/0 is not a value");
            num_ = numerator > 0 ? 1 : -1;
            den_ = 0;
            return;
        }
        Int g = boost::multiprecision::gcd(boost::multiprecision::abs(numerator), denominator);
        if (g > 1) {
            numerator /= g;
            denominator /= g;
        }
        num_ = std::move(numerator);
        den_ = std::move(denominator);
    }

    Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design

    static Rational infinity() { return Rational(1, 0); }
    static Rational neg_infinity() { return Rational(-1, 0); }

    /// Builds a value that is already known to be irreducible with den >= 0
    /// (mediants along Stern-Brocot boundary chains have this property).
    /// Skips the gcd; a debug assertion checks the claim.
    static Rational raw_irreducible(Int numerator, Int denominator) {
        BOOST_ASSERT(denominator >= 0);
        BOOST_ASSERT(denominator != 0 || boost::multiprecision::abs(numerator) == 1);
        BOOST_ASSERT(boost::multiprecision::gcd(boost::multiprecision::abs(numerator),
                                                denominator) <= 1);
        Rational r;
        r.num_ = std::move(numerator);
        r.den_ = std::move(denominator);
        return r;
    }

    const Int& num() const { return num_; }
    const Int& den() const { return den_; }

    bool is_finite() const { return den_ != 0; }
    bool is_infinite() const { return den_ == 0; }
    bool is_zero() const { return num_ == 0; }
    int sign() const { return num_ > 0 ? 1 : num_ < 0 ? -1 : 0; }

    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    Rational abs() const { return num_ < 0 ? -*this : *this; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        if (a == b)
            return std::strong_ordering::equal;
        if (a.is_infinite() || b.is_infinite()) {
            // distinct, so at most one side can be a given infinity
            if (a.den_ == 0)
                return a.num_ > 0 ? std::strong_ordering::greater : std::strong_ordering::less;
            return b.num_ > 0 ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        Int lhs = a.num_ * b.den_;
        Int rhs = b.num_ * a.den_;
        return lhs < rhs ? std::strong_ordering::less : std::strong_ordering::greater;
    }

    std::string to_string() const {
        if (den_ == 0)
            return num_ > 0 ? "inf" : "-inf";
        if (den_ == 1)
            return num_.str();
        return num_.str() + "/" + den_.str();
    }

    /// Parses "a/b", a bare integer, "inf" or "-inf".
    static Rational parse(std::string_view text) {
        if (text == "inf" || text == "+inf")
            return infinity();
        if (text == "-inf")
            return neg_infinity();
        auto slash = text.find('/');
        try {
            if (slash == std::string_view::npos)
                return Rational(Int(std::string(text)), 1);
            Int n{std::string(text.substr(0, slash))};
            Int d{std::string(text.substr(slash + 1))};
            return Rational(std::move(n), std::move(d));
        } catch (const std::exception&) {
            throw std::invalid_argument("rational: cannot parse '" + std::string(text) + "'");
        }
    }

  private:
    Int num_;
    Int den_;
};

/// Number of binary digits of |x|, with bitlen(0) = 1.
inline std::size_t bit_length(const Int& x) {
    if (x == 0)
        return 1;
    return boost::multiprecision::msb(boost::multiprecision::abs(x)) + 1;
}

/// Representation size of a rational: bitlen(|num|) + bitlen(den), except
/// that zero has size 1.
inline std::size_t bit_size(const Rational& q) {
    if (q.is_zero())
        return 1;
    return bit_length(q.num()) + bit_length(q.den());
}

}  // namespace sblearn
