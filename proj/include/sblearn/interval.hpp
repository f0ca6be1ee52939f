#pragma once

#include "sblearn/rational.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace sblearn {

/// Non-empty interval over the rationals with exact endpoints.  Infinite
/// endpoints are never included, so (-inf and inf force the open side.
struct Interval {
    Rational lo;
    Rational hi;
    bool lo_closed = false;
    bool hi_closed = false;

    Interval(Rational lo_, Rational hi_, bool lo_closed_, bool hi_closed_)
        : lo(std::move(lo_)), hi(std::move(hi_)), lo_closed(lo_closed_), hi_closed(hi_closed_) {
        if (lo.is_infinite() && lo_closed)
            throw std::invalid_argument("interval: infinite endpoints must be open");
        if (hi.is_infinite() && hi_closed)
            throw std::invalid_argument("interval: infinite endpoints must be open");
        if (lo > hi || (lo == hi && !(lo_closed && hi_closed)))
            throw std::invalid_argument("interval: empty");
    }

    static Interval full() {
        return {Rational::neg_infinity(), Rational::infinity(), false, false};
    }

    static Interval singleton(const Rational& q) { return {q, q, true, true}; }

    bool is_singleton() const { return lo == hi; }

    bool contains(const Rational& q) const {
        if (q < lo || (q == lo && !lo_closed))
            return false;
        if (q > hi || (q == hi && !hi_closed))
            return false;
        return true;
    }

    bool operator==(const Interval&) const = default;

    std::string to_string() const {
        std::string s = lo_closed ? "[" : "(";
        s += lo.to_string();
        s += ", ";
        s += hi.to_string();
        s += hi_closed ? "]" : ")";
        return s;
    }
};

/// Closed hull of two finite rationals, [min, max]; both ends included even
/// when p = q.
inline Interval closed_hull(const Rational& p, const Rational& q) {
    return p <= q ? Interval(p, q, true, true) : Interval(q, p, true, true);
}

namespace detail {

// Of two left boundaries at the same or different positions, the one that
// starts later (open beats closed on ties).
inline std::pair<Rational, bool> tighter_lo(const Rational& a, bool ac, const Rational& b,
                                            bool bc) {
    if (a > b)
        return {a, ac};
    if (b > a)
        return {b, bc};
    return {a, ac && bc};
}

inline std::pair<Rational, bool> tighter_hi(const Rational& a, bool ac, const Rational& b,
                                            bool bc) {
    if (a < b)
        return {a, ac};
    if (b < a)
        return {b, bc};
    return {a, ac && bc};
}

}  // namespace detail

inline bool intersects(const Interval& x, const Interval& y) {
    auto [lo, lo_closed] = detail::tighter_lo(x.lo, x.lo_closed, y.lo, y.lo_closed);
    auto [hi, hi_closed] = detail::tighter_hi(x.hi, x.hi_closed, y.hi, y.hi_closed);
    return lo < hi || (lo == hi && lo_closed && hi_closed && lo.is_finite());
}

}  // namespace sblearn
