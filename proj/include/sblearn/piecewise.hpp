#pragma once

#include "sblearn/interval.hpp"
#include "sblearn/stern_brocot.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sblearn {

using Label = std::string;

struct Piece {
    Interval interval;
    Label label;

    bool operator==(const Piece&) const = default;
};

/// A finite piecewise function over the rationals, stored as an ordered
/// interval partition with one label per piece.  The partition invariants
/// (full coverage, touching endpoints with complementary openness) are
/// checked on construction.
class PiecewiseFunction {
  public:
    explicit PiecewiseFunction(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
        validate();
    }

    static PiecewiseFunction constant(Label label) {
        return PiecewiseFunction({{Interval::full(), std::move(label)}});
    }

    const std::vector<Piece>& pieces() const { return pieces_; }
    std::size_t piece_count() const { return pieces_.size(); }

    const Label& evaluate(const Rational& q) const {
        if (q.is_infinite())
            throw std::invalid_argument("evaluate: argument must be finite");
        std::size_t lo = 0, hi = pieces_.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            const Interval& iv = pieces_[mid].interval;
            // does piece mid end at or after q?
            if (q < iv.hi || (q == iv.hi && iv.hi_closed))
                hi = mid;
            else
                lo = mid + 1;
        }
        return pieces_[lo].label;
    }

    bool is_canonical() const {
        for (std::size_t j = 0; j + 1 < pieces_.size(); ++j)
            if (pieces_[j].label == pieces_[j + 1].label)
                return false;
        return true;
    }

    /// Merges adjacent equal-label pieces; the result is the unique
    /// canonical representation of the same function.
    PiecewiseFunction canonicalize() const {
        std::vector<Piece> out;
        out.reserve(pieces_.size());
        for (const Piece& p : pieces_) {
            if (!out.empty() && out.back().label == p.label) {
                Interval merged(out.back().interval.lo, p.interval.hi,
                                out.back().interval.lo_closed, p.interval.hi_closed);
                out.back().interval = merged;
            } else {
                out.push_back(p);
            }
        }
        return PiecewiseFunction(std::move(out));
    }

    /// Sum of the endpoint sizes of every piece (labels are not counted).
    std::size_t size_bits() const {
        std::size_t total = 0;
        for (const Piece& p : pieces_)
            total += bit_size(p.interval.lo) + bit_size(p.interval.hi);
        return total;
    }

    bool operator==(const PiecewiseFunction&) const = default;

    std::string to_string() const {
        std::string s;
        for (const Piece& p : pieces_) {
            s += p.interval.to_string();
            s += p.label;
        }
        return s;
    }

  private:
    std::vector<Piece> pieces_;

    void validate() const {
        if (pieces_.empty())
            throw std::invalid_argument("piecewise: no pieces");
        const Interval& first = pieces_.front().interval;
        const Interval& last = pieces_.back().interval;
        if (!(first.lo == Rational::neg_infinity() && last.hi == Rational::infinity()))
            throw std::invalid_argument("piecewise: partition must span -inf..inf");
        for (const Piece& p : pieces_)
            if (p.label.empty())
                throw std::invalid_argument("piecewise: empty label");
        for (std::size_t j = 0; j + 1 < pieces_.size(); ++j) {
            const Interval& a = pieces_[j].interval;
            const Interval& b = pieces_[j + 1].interval;
            if (a.hi != b.lo || a.hi.is_infinite())
                throw std::invalid_argument("piecewise: pieces must touch at finite endpoints");
            if (a.hi_closed == b.lo_closed)
                throw std::invalid_argument(
                    "piecewise: touching endpoints need complementary openness");
        }
    }
};

enum class BoundKind { left, right, both };

/// Finite endpoints of a canonical representation, classified by whether
/// they are the closed infimum of their piece, the closed supremum, or both
/// (singleton pieces).
inline std::vector<std::pair<Rational, BoundKind>> bounds_of(const PiecewiseFunction& f) {
    std::vector<std::pair<Rational, BoundKind>> out;
    for (const Piece& p : f.pieces()) {
        const Interval& iv = p.interval;
        if (iv.is_singleton()) {
            out.emplace_back(iv.lo, BoundKind::both);
            continue;
        }
        if (iv.lo_closed)
            out.emplace_back(iv.lo, BoundKind::left);
        if (iv.hi_closed)
            out.emplace_back(iv.hi, BoundKind::right);
    }
    return out;
}

/// Exact monochromaticity test: every piece of f intersecting the interval
/// carries the same label.
inline bool is_monochromatic(const PiecewiseFunction& f, const Interval& window) {
    const Label* seen = nullptr;
    for (const Piece& p : f.pieces()) {
        if (!intersects(p.interval, window))
            continue;
        if (seen && *seen != p.label)
            return false;
        seen = &p.label;
    }
    return true;
}

namespace detail {

// Some rational strictly between lo and hi (either may be infinite).
inline Rational rational_strictly_between(const Rational& lo, const Rational& hi) {
    if (lo.is_infinite() && hi.is_infinite())
        return Rational(0, 1);
    if (lo.is_infinite())
        return Rational(hi.num() - hi.den(), hi.den());
    if (hi.is_infinite())
        return Rational(lo.num() + lo.den(), lo.den());
    return mediant(lo, hi);
}

}  // namespace detail

/// Leftmost cell of the common refinement of the two partitions on which
/// the functions disagree, or nothing when they are pointwise equal.
inline std::optional<Interval> first_disagreement(const PiecewiseFunction& f,
                                                  const PiecewiseFunction& g) {
    std::vector<Rational> cuts;
    for (const PiecewiseFunction* h : {&f, &g})
        for (const Piece& p : h->pieces()) {
            if (p.interval.lo.is_finite())
                cuts.push_back(p.interval.lo);
            if (p.interval.hi.is_finite())
                cuts.push_back(p.interval.hi);
        }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto differs_at = [&](const Rational& q) { return f.evaluate(q) != g.evaluate(q); };

    Rational prev = Rational::neg_infinity();
    for (const Rational& cut : cuts) {
        if (differs_at(detail::rational_strictly_between(prev, cut)))
            return Interval(prev, cut, false, false);
        if (differs_at(cut))
            return Interval::singleton(cut);
        prev = cut;
    }
    if (differs_at(detail::rational_strictly_between(prev, Rational::infinity())))
        return Interval(prev, Rational::infinity(), false, false);
    return std::nullopt;
}

/// The shallowest Stern-Brocot node inside the interval; unique because the
/// in-interval nodes form a subtree-connected region crossed by one path.
inline Rational simplest_rational_in(const Interval& window) {
    SbNode node = SbNode::root();
    while (!window.contains(node.value)) {
        if (node.value > window.hi || (node.value == window.hi && !window.hi_closed))
            node = left_child(node);
        else
            node = right_child(node);
    }
    return node.value;
}

}  // namespace sblearn
