#pragma once

#include "sblearn/teacher.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sblearn {

/// Sorted, duplicate-free list of labeled rationals collected from break
/// links; the learner's whole state.  Each entry caches its SB-encoding and
/// depth so ancestry scans never re-encode stored values.
class BreakLinkStore {
  public:
    struct Entry {
        Rational value;
        Label label;
        SbEncoding enc;
        Int depth;
    };

    BreakLinkStore() = default;

    static BreakLinkStore from_entries(const std::vector<std::pair<Rational, Label>>& entries) {
        BreakLinkStore store;
        for (const auto& [value, label] : entries)
            if (!store.insert(value, label))
                throw std::invalid_argument("break-link store: duplicate value " +
                                            value.to_string());
        return store;
    }

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const Entry& operator[](std::size_t i) const { return entries_[i]; }

    std::optional<std::size_t> index_of(const Rational& q) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), q,
                                   [](const Entry& e, const Rational& v) { return e.value < v; });
        if (it == entries_.end() || it->value != q)
            return std::nullopt;
        return static_cast<std::size_t>(it - entries_.begin());
    }

    bool contains(const Rational& q) const { return index_of(q).has_value(); }

    /// Inserts keeping the order; returns false (and does nothing) when the
    /// value is already present.
    bool insert(const Rational& q, Label label) {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), q,
                                   [](const Entry& e, const Rational& v) { return e.value < v; });
        if (it != entries_.end() && it->value == q)
            return false;
        SbEncoding enc = sb_encode(q);
        Int depth = 0;
        for (const Int& r : enc.runs)
            depth += r;
        entries_.insert(it, Entry{q, std::move(label), std::move(enc), std::move(depth)});
        return true;
    }

    /// Adjacent entries must be related by ancestry; holds at every point of
    /// a learning run and is asserted by the tests.
    bool neighbor_chain_ok() const {
        for (std::size_t i = 0; i + 1 < entries_.size(); ++i)
            if (!is_ancestor(entries_[i].enc, entries_[i + 1].enc) &&
                !is_ancestor(entries_[i + 1].enc, entries_[i].enc))
                return false;
        return true;
    }

  private:
    std::vector<Entry> entries_;
};

/// Builds a representation consistent with the store: a stored value opens a
/// closed piece on its left when its predecessor is a descendant with a
/// different label, and closes its piece on the right when it is an ancestor
/// of a differently-labeled successor; the border pieces run to the
/// infinities.
inline PiecewiseFunction construct_representation(const BreakLinkStore& store) {
    if (store.empty())
        throw std::invalid_argument("construct_representation: empty store");
    const std::size_t m = store.size();
    std::vector<Piece> pieces;
    Rational left = Rational::neg_infinity();
    bool left_closed = false;
    Label current = store[0].label;
    for (std::size_t i = 0; i < m; ++i) {
        if (i > 0 && is_ancestor(store[i].enc, store[i - 1].enc) &&
            store[i - 1].label != store[i].label) {
            pieces.push_back({Interval(left, store[i].value, left_closed, false), current});
            left = store[i].value;
            left_closed = true;
            current = store[i].label;
        }
        if (i + 1 < m && is_ancestor(store[i].enc, store[i + 1].enc) &&
            store[i].label != store[i + 1].label) {
            pieces.push_back({Interval(left, store[i].value, left_closed, true), store[i].label});
            left = store[i].value;
            left_closed = false;
            current = store[i + 1].label;
        }
    }
    pieces.push_back({Interval(left, Rational::infinity(), left_closed, false),
                      store[m - 1].label});
    return PiecewiseFunction(std::move(pieces));
}

/// Deepest element of the store that is a strict ancestor of q; the root
/// (always present during learning) is the universal fallback.
inline std::size_t find_closest_ancestor_index(const Rational& q_star,
                                               const BreakLinkStore& store) {
    SbEncoding enc = sb_encode(q_star);
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < store.size(); ++i) {
        const auto& e = store[i];
        if (e.value == q_star)
            throw TeacherInconsistency("counterexample already stored: " + q_star.to_string());
        if (!is_ancestor(e.enc, enc))
            continue;
        if (!best || e.depth > store[*best].depth)
            best = i;
    }
    if (!best)
        throw std::invalid_argument("find_closest_ancestor: store has no ancestor of " +
                                    q_star.to_string());
    return *best;
}

inline Rational find_closest_ancestor(const Rational& q_star, const BreakLinkStore& store) {
    return store[find_closest_ancestor_index(q_star, store)].value;
}

namespace detail {

// Membership calls made while hunting one break link; each distinct point
// is queried at most once per hunt.
class SearchMemo {
  public:
    explicit SearchMemo(MembershipOracle& mq) : mq_(mq) {}

    const Label& operator()(const Rational& q) {
        auto it = cache_.find(q);
        if (it == cache_.end())
            it = cache_.emplace(q, mq_(q)).first;
        return it->second;
    }

  private:
    MembershipOracle& mq_;
    std::map<Rational, Label> cache_;
};

// One directed branch hunt: exponential probing down the straight branch of
// the origin followed by an offset binary search.  The window invariant is
// that the node at offset lo carries the origin label while either the node
// at offset hi does not, or a point with a known different label sits
// strictly inside the window; every certificate the guards can observe has
// that shape.
struct BranchSearch {
    Dir dir;
    SbNode origin;
    Label origin_label;
    Rational q_star;
    std::optional<Rational> limit;        // nearest stored value in this direction
    std::optional<Label> limit_label;
    SearchMemo& memo;

    // a lies strictly past b in the search direction
    bool beyond(const Rational& a, const Rational& b) const {
        return dir == Dir::right ? a > b : a < b;
    }

    bool strictly_inside(const Rational& near, const Rational& x, const Rational& far) const {
        return beyond(x, near) && beyond(far, x);
    }

    Rational chain(const Int& m) const { return branch_offset_value(origin, dir, m); }

    TreeEdge run() {
        unsigned k = 0;
        while (true) {
            Rational e = chain(Int(1) << k);
            const Label& e_label = memo(e);
            if (e_label != origin_label)
                return bisect(k);
            if (memo(q_star) != origin_label && beyond(e, q_star))
                return bisect(k);
            if (limit && beyond(e, *limit))
                return bisect(k);
            ++k;
        }
    }

    TreeEdge bisect(unsigned k) {
        if (k == 0) {
            SbNode child = dir == Dir::right ? right_child(origin) : left_child(origin);
            return {origin.value, child.value};
        }
        Int lo = Int(1) << (k - 1);
        Int hi = Int(1) << k;
        const Label& r_label = memo(origin.value);
        while (true) {
            if (hi - lo <= 2)
                return resolve_window(lo, hi);
            Int mid = (lo + hi + 1) / 2;
            Rational q = chain(mid);
            const Label& q_label = memo(q);
            Rational p = chain(mid - 1);
            const Label& p_label = memo(p);
            if (limit && !beyond(*limit, q)) {
                hi = mid;  // reached or passed the stored neighbor; pull back
            } else if (p_label != q_label) {
                return {p, q};
            } else if (r_label == q_label && strictly_inside(p, q_star, q) &&
                       memo(q_star) != r_label) {
                return {p, q};
            } else if (r_label != p_label) {
                hi = mid - 1;
            } else if (memo(q_star) != r_label) {
                if (beyond(q_star, p))
                    lo = mid;
                else
                    hi = mid - 1;
            } else {
                lo = mid;
            }
        }
    }

    // hi - lo is 1 or 2; returns the window edge certified by the labels at
    // hand or, failing that, by the interior witness the invariant promises.
    TreeEdge resolve_window(const Int& lo, const Int& hi) {
        Rational lo_v = chain(lo);
        Rational hi_v = chain(hi);
        if (hi - lo == 1)
            return {std::move(lo_v), std::move(hi_v)};
        Rational mid_v = chain(lo + 1);
        const Label& lo_l = memo(lo_v);
        const Label& mid_l = memo(mid_v);
        const Label& hi_l = memo(hi_v);
        if (lo_l != mid_l)
            return {std::move(lo_v), std::move(mid_v)};
        if (mid_l != hi_l)
            return {std::move(mid_v), std::move(hi_v)};
        if (strictly_inside(lo_v, q_star, hi_v) && memo(q_star) != mid_l)
            return beyond(mid_v, q_star) ? TreeEdge{std::move(lo_v), std::move(mid_v)}
                                         : TreeEdge{std::move(mid_v), std::move(hi_v)};
        if (limit && limit_label && *limit_label != mid_l &&
            strictly_inside(lo_v, *limit, hi_v))
            return beyond(mid_v, *limit) ? TreeEdge{std::move(lo_v), std::move(mid_v)}
                                         : TreeEdge{std::move(mid_v), std::move(hi_v)};
        throw TeacherInconsistency("branch search window lost its certificate");
    }
};

}  // namespace detail

/// Exponential probe down the right branch of r followed by the bounded
/// binary search; returns a break link absent from the store.  r_right is
/// the stored successor of r (infinite when r is the maximum).
inline TreeEdge search_right(const Rational& r, const Rational& q_star,
                             const BreakLinkStore& store, MembershipOracle& mq) {
    auto ri = store.index_of(r);
    if (!ri)
        throw std::invalid_argument("search_right: origin not in store");
    detail::SearchMemo memo(mq);
    detail::BranchSearch hunt{Dir::right,
                              node_of(r),
                              store[*ri].label,
                              q_star,
                              std::nullopt,
                              std::nullopt,
                              memo};
    if (*ri + 1 < store.size()) {
        hunt.limit = store[*ri + 1].value;
        hunt.limit_label = store[*ri + 1].label;
    }
    return hunt.run();
}

inline TreeEdge search_left(const Rational& r, const Rational& q_star,
                            const BreakLinkStore& store, MembershipOracle& mq) {
    auto ri = store.index_of(r);
    if (!ri)
        throw std::invalid_argument("search_left: origin not in store");
    detail::SearchMemo memo(mq);
    detail::BranchSearch hunt{Dir::left,   node_of(r), store[*ri].label, q_star,
                              std::nullopt, std::nullopt, memo};
    if (*ri > 0) {
        hunt.limit = store[*ri - 1].value;
        hunt.limit_label = store[*ri - 1].label;
    }
    return hunt.run();
}

/// Offset binary search on the right branch, assuming search_right's
/// invariant: an undiscovered break link between branch offsets 2^(k-1) and
/// 2^k.  Exposed for direct exercise; the label of r_right, when known,
/// completes the witness certificates.
inline TreeEdge bs_right(const Rational& r, const Rational& q_star, unsigned k,
                         const Rational& r_right, MembershipOracle& mq, const Label& r_label,
                         std::optional<Label> r_right_label = std::nullopt) {
    detail::SearchMemo memo(mq);
    detail::BranchSearch hunt{Dir::right, node_of(r), r_label, q_star,
                              std::nullopt, std::move(r_right_label), memo};
    if (r_right.is_finite())
        hunt.limit = r_right;
    return hunt.bisect(k);
}

inline TreeEdge bs_left(const Rational& r, const Rational& q_star, unsigned k,
                        const Rational& r_left, MembershipOracle& mq, const Label& r_label,
                        std::optional<Label> r_left_label = std::nullopt) {
    detail::SearchMemo memo(mq);
    detail::BranchSearch hunt{Dir::left, node_of(r), r_label, q_star,
                              std::nullopt, std::move(r_left_label), memo};
    if (r_left.is_finite())
        hunt.limit = r_left;
    return hunt.bisect(k);
}

/// Finds a break link of the hidden target on the branch of r that contains
/// the counterexample.  At least one endpoint of the returned edge is new.
inline TreeEdge find_break_link(const Rational& r, const Rational& q_star,
                                const BreakLinkStore& store, MembershipOracle& mq) {
    if (q_star == r)
        throw TeacherInconsistency("find_break_link: counterexample equals its ancestor");
    TreeEdge edge =
        q_star < r ? search_left(r, q_star, store, mq) : search_right(r, q_star, store, mq);
    if (store.contains(edge.first) && store.contains(edge.second))
        throw TeacherInconsistency("find_break_link: rediscovered a stored break link");
    return edge;
}

struct LearnerReport {
    PiecewiseFunction result;
    std::size_t mq_count = 0;
    std::size_t eq_count = 0;
    std::size_t break_links_found = 0;
    std::size_t iterations = 0;
};

/// Snapshot handed to the learn observer after each counterexample round.
struct LearnEvent {
    const BreakLinkStore& store;           // after the insertions
    const PiecewiseFunction& hypothesis;   // the one the counterexample refuted
    Rational origin;                       // closest stored ancestor of the counterexample
    TreeEdge edge;                         // break link found this round
    Rational counterexample;
    std::size_t search_mq = 0;             // membership calls spent inside find_break_link
};

struct LearnOptions {
    std::function<void(const LearnEvent&)> observer;
};

/// The main loop: keep a store of break-link endpoints, synthesize a
/// hypothesis, and on every counterexample descend from its closest stored
/// ancestor to one new break link, inserting both endpoints with fresh
/// membership labels.
inline LearnerReport learn(MembershipOracle& mq, EquivalenceOracle& eq,
                           const LearnOptions& options = {}) {
    const std::size_t mq_base = mq.count();
    const std::size_t eq_base = eq.count();
    BreakLinkStore store;
    const Rational root(0, 1);
    store.insert(root, mq(root));

    std::size_t iterations = 0;
    std::size_t links = 0;
    while (true) {
        ++iterations;
        PiecewiseFunction hypothesis = construct_representation(store);
        std::optional<Rational> counterexample = eq(hypothesis);
        if (!counterexample) {
            return {hypothesis.canonicalize(), mq.count() - mq_base, eq.count() - eq_base, links,
                    iterations};
        }
        if (mq(*counterexample) == hypothesis.evaluate(*counterexample))
            throw TeacherInconsistency("learn: counterexample agrees with the hypothesis");
        const std::size_t size_before = store.size();
        const std::size_t mq_before = mq.count();
        std::size_t origin_index = find_closest_ancestor_index(*counterexample, store);
        Rational origin = store[origin_index].value;
        TreeEdge edge = find_break_link(origin, *counterexample, store, mq);
        const std::size_t search_mq = mq.count() - mq_before;
        for (const Rational& v : {edge.first, edge.second})
            if (!store.contains(v))
                store.insert(v, mq(v));
        if (store.size() == size_before)
            throw TeacherInconsistency("learn: no progress in a counterexample round");
        ++links;
        if (options.observer)
            options.observer(LearnEvent{store, hypothesis, std::move(origin), std::move(edge),
                                        *counterexample, search_mq});
    }
}

/// Branch offset of a node value relative to an origin node, i.e. the m
/// with value = (a + m*c)/(b + m*d); used to express search distances.
inline Int branch_offset_of(const SbNode& origin, Dir dir, const Rational& value) {
    const Rational& bound = dir == Dir::right ? origin.hi : origin.lo;
    if (bound.den() != 0)
        return (value.den() - origin.value.den()) / bound.den();
    return (value.num() - origin.value.num()) / bound.num();
}

}  // namespace sblearn
