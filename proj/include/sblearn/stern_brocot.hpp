#pragma once

#include "sblearn/rational.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace sblearn {

/// Mediant of p < q: (p.num + q.num) / (p.den + q.den), reduced.  The root
/// case mediant(-inf, inf) = 0 is allowed; arguments out of order signal
/// misuse.
inline Rational mediant(const Rational& p, const Rational& q) {
    if (!(p < q))
        throw std::invalid_argument("mediant: requires p < q");
    if (p.is_infinite() && q.is_infinite())
        return Rational(0, 1);
    return Rational(p.num() + q.num(), p.den() + q.den());
}

/// A Stern-Brocot tree node together with its boundary pair.  The value is
/// always the mediant of the two bounds, and the bounds are the nearest
/// ancestors on each side (the root has bounds -inf, inf).
struct SbNode {
    Rational value;
    Rational lo;
    Rational hi;

    static SbNode root() { return {Rational(0, 1), Rational::neg_infinity(), Rational::infinity()}; }
};

inline SbNode left_child(const SbNode& n) {
    return {mediant(n.lo, n.value), n.lo, n.value};
}

inline SbNode right_child(const SbNode& n) {
    return {mediant(n.value, n.hi), n.value, n.hi};
}

enum class Dir { left, right };

inline Dir opposite(Dir d) { return d == Dir::left ? Dir::right : Dir::left; }

/// Value of the node m steps straight down the given branch of n, i.e.
/// (a + m*c)/(b + m*d) where c/d is the bound on that side.
inline Rational branch_offset_value(const SbNode& n, Dir dir, const Int& m) {
    const Rational& b = dir == Dir::right ? n.hi : n.lo;
    return Rational::raw_irreducible(n.value.num() + m * b.num(), n.value.den() + m * b.den());
}

/// Same as branch_offset_value but carries the boundary pair along.
inline SbNode branch_offset_node(const SbNode& n, Dir dir, const Int& m) {
    if (m < 1)
        throw std::invalid_argument("branch_offset_node: m must be >= 1");
    const Rational& b = dir == Dir::right ? n.hi : n.lo;
    Rational value = branch_offset_value(n, dir, m);
    Rational inner = Rational::raw_irreducible(n.value.num() + (m - 1) * b.num(),
                                               n.value.den() + (m - 1) * b.den());
    if (dir == Dir::right)
        return {std::move(value), std::move(inner), b};
    return {std::move(value), b, std::move(inner)};
}

/// Run-length encoding of the root path: sign plus the lengths of the
/// maximal straight segments.  Positive paths start with right moves,
/// negative ones with left moves; zero is the empty encoding.
struct SbEncoding {
    int sign = 0;                // -1, 0, +1
    std::vector<Int> runs;       // all entries >= 1

    bool operator==(const SbEncoding&) const = default;

    std::string to_string() const {
        if (sign == 0)
            return "0[]";
        std::string s = sign > 0 ? "+[" : "-[";
        for (std::size_t i = 0; i < runs.size(); ++i) {
            if (i)
                s += ',';
            s += runs[i].str();
        }
        return s + "]";
    }
};

/// SB-encoding computed through the continued-fraction correspondence:
/// the quotients of |q|+1 are the run lengths, with the last one less one.
/// Cost is one Euclidean run, never a per-level tree walk.
inline SbEncoding sb_encode(const Rational& q) {
    if (q.is_infinite())
        throw std::invalid_argument("sb_encode: value must be finite");
    if (q.is_zero())
        return {};
    SbEncoding enc;
    enc.sign = q.sign();
    Int n = boost::multiprecision::abs(q.num()) + q.den();  // |q| + 1, numerator
    Int d = q.den();
    while (d != 0) {
        Int quot = n / d;
        Int rem = n % d;
        enc.runs.push_back(std::move(quot));
        n = std::move(d);
        d = std::move(rem);
    }
    enc.runs.back() -= 1;  // final Euclid quotient is always >= 2
    return enc;
}

inline Rational sb_decode(const SbEncoding& enc) {
    if (enc.sign == 0) {
        if (!enc.runs.empty())
            throw std::invalid_argument("sb_decode: malformed encoding (zero sign with runs)");
        return Rational(0, 1);
    }
    if (enc.runs.empty())
        throw std::invalid_argument("sb_decode: malformed encoding (empty runs)");
    // Continued-fraction convergent recurrence on the quotients, with the
    // last run incremented back; the encoded value is h/k - 1.
    Int h_prev = 1, h = 0;  // h_{-2}, h_{-1}
    Int k_prev = 0, k = 1;
    for (std::size_t i = 0; i < enc.runs.size(); ++i) {
        Int a = enc.runs[i];
        if (a < 1)
            throw std::invalid_argument("sb_decode: malformed encoding (run < 1)");
        if (i + 1 == enc.runs.size())
            a += 1;
        Int h_next = a * h + h_prev;
        Int k_next = a * k + k_prev;
        h_prev = std::move(h);
        h = std::move(h_next);
        k_prev = std::move(k);
        k = std::move(k_next);
    }
    Int num = h - k;
    if (enc.sign < 0)
        num = -num;
    return Rational::raw_irreducible(std::move(num), std::move(k));
}

/// Depth of q in the tree (total path length); the root has depth 0.
inline Int sb_depth(const Rational& q) {
    Int total = 0;
    for (const Int& r : sb_encode(q).runs)
        total += r;
    return total;
}

namespace detail {

// Walks the run-length path, invoking visit(node) after each completed run.
// Cost is linear in the number of runs.
template <typename Visit>
SbNode replay_runs(const SbEncoding& enc, Visit&& visit) {
    SbNode node = SbNode::root();
    Dir dir = enc.sign > 0 ? Dir::right : Dir::left;
    for (const Int& run : enc.runs) {
        node = branch_offset_node(node, dir, run);
        visit(node);
        dir = opposite(dir);
    }
    return node;
}

}  // namespace detail

/// Node of a finite rational, with its boundary pair, computed by replaying
/// the run-length path (one convergent jump per run).
inline SbNode node_of(const Rational& q) {
    if (q.is_infinite())
        throw std::invalid_argument("node_of: value must be finite");
    return detail::replay_runs(sb_encode(q), [](const SbNode&) {});
}

/// The unique p with left_child(p) = q or right_child(p) = q; this is the
/// deeper of q's two bounds.
inline Rational parent(const Rational& q) {
    SbNode n = node_of(q);
    if (n.lo.is_infinite() && n.hi.is_infinite())
        throw std::invalid_argument("parent: the root has no parent");
    if (n.lo.is_infinite())
        return n.hi;
    if (n.hi.is_infinite())
        return n.lo;
    // Both bounds lie on the root path, at different depths; node weight
    // |num| + den grows strictly along any descent.
    Int wl = boost::multiprecision::abs(n.lo.num()) + n.lo.den();
    Int wr = boost::multiprecision::abs(n.hi.num()) + n.hi.den();
    return wl > wr ? n.lo : n.hi;
}

/// Convergents of q: the values decoded from every prefix of the run array,
/// i.e. the turning points of the path plus q itself.  Empty for q = 0.
inline std::vector<Rational> convergents(const Rational& q) {
    std::vector<Rational> out;
    detail::replay_runs(sb_encode(q), [&](const SbNode& n) { out.push_back(n.value); });
    return out;
}

/// Strict ancestry via the run-prefix rule on the encodings; avoids ever
/// materializing the L/R strings.  The root is an ancestor of everything
/// else, and no value is its own ancestor.
inline bool is_ancestor(const SbEncoding& ep, const SbEncoding& eq) {
    if (ep == eq)
        return false;
    if (ep.sign == 0)
        return true;
    if (eq.sign == 0)
        return false;
    if (ep.sign != eq.sign || ep.runs.size() > eq.runs.size())
        return false;
    std::size_t k = ep.runs.size();
    for (std::size_t i = 0; i + 1 < k; ++i)
        if (ep.runs[i] != eq.runs[i])
            return false;
    if (k < eq.runs.size())
        return ep.runs[k - 1] <= eq.runs[k - 1];
    return ep.runs[k - 1] < eq.runs[k - 1];
}

inline bool is_ancestor(const Rational& p, const Rational& q) {
    return is_ancestor(sb_encode(p), sb_encode(q));
}

}  // namespace sblearn
