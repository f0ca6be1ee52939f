#pragma once

#include "sblearn/piecewise.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>

namespace sblearn {

struct TranscriptEntry {
    std::string kind;
    std::string input;
    std::string output;
};

using TranscriptSink = std::function<void(const TranscriptEntry&)>;

/// Thrown when an oracle contradicts itself (for example an equivalence
/// counterexample on which hypothesis and target agree, or a learning loop
/// that stops making progress, which only a broken teacher can cause).
struct TeacherInconsistency : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Counting wrapper around a membership callback.  One instance belongs to
/// one thread of control; distinct teachers are independent.
class MembershipOracle {
  public:
    using Fn = std::function<Label(const Rational&)>;

    explicit MembershipOracle(Fn fn) : fn_(std::move(fn)) {}

    Label operator()(const Rational& q) {
        ++count_;
        Label out = fn_(q);
        if (sink_)
            sink_({"mq", q.to_string(), out});
        return out;
    }

    std::size_t count() const { return count_; }
    void set_transcript_sink(TranscriptSink sink) { sink_ = std::move(sink); }

  private:
    Fn fn_;
    std::size_t count_ = 0;
    TranscriptSink sink_;
};

/// Counting wrapper around an equivalence callback; nullopt means the
/// hypothesis equals the target.
class EquivalenceOracle {
  public:
    using Fn = std::function<std::optional<Rational>(const PiecewiseFunction&)>;

    explicit EquivalenceOracle(Fn fn) : fn_(std::move(fn)) {}

    std::optional<Rational> operator()(const PiecewiseFunction& hypothesis) {
        ++count_;
        std::optional<Rational> out = fn_(hypothesis);
        if (sink_)
            sink_({"eq", hypothesis.to_string(), out ? out->to_string() : "equal"});
        return out;
    }

    std::size_t count() const { return count_; }
    void set_transcript_sink(TranscriptSink sink) { sink_ = std::move(sink); }

  private:
    Fn fn_;
    std::size_t count_ = 0;
    TranscriptSink sink_;
};

namespace detail {

inline Dir step_toward(const Interval& cell, const SbNode& node) {
    if (node.value > cell.hi || (node.value == cell.hi && !cell.hi_closed))
        return Dir::left;
    return Dir::right;
}

// Whether the subtree of node's child in the given direction still meets
// the cell; only meaningful while node.value lies inside the cell.
inline bool child_meets_cell(const Interval& cell, const SbNode& node, Dir dir) {
    return dir == Dir::left ? cell.lo < node.value : cell.hi > node.value;
}

}  // namespace detail

/// A rational inside the cell whose tree path has length >= depth, found by
/// descending from the simplest element and alternating directions.
inline Rational deep_witness(const Interval& cell, const Int& depth) {
    if (cell.is_singleton())
        return cell.lo;
    SbNode node = node_of(simplest_rational_in(cell));
    Int walked = sb_depth(node.value);
    Dir last = Dir::left;
    while (walked < depth || !cell.contains(node.value)) {
        Dir dir;
        if (!cell.contains(node.value)) {
            dir = detail::step_toward(cell, node);
        } else {
            dir = opposite(last);
            if (!detail::child_meets_cell(cell, node, dir))
                dir = opposite(dir);
        }
        node = dir == Dir::left ? left_child(node) : right_child(node);
        last = dir;
        walked += 1;
    }
    return node.value;
}

/// How the simulated teacher chooses a counterexample inside the leftmost
/// disagreement cell.  The learning guarantees must not depend on this
/// choice; the deep and random kinds exist to stress that.
struct CounterexampleStrategy {
    enum class Kind { simplest, boundary_adjacent, deep, seeded_random };

    Kind kind = Kind::simplest;
    Int depth = 0;
    std::uint64_t seed = 0;

    static CounterexampleStrategy simplest() { return {}; }
    static CounterexampleStrategy boundary_adjacent() { return {Kind::boundary_adjacent, 0, 0}; }
    static CounterexampleStrategy deep(Int d) { return {Kind::deep, std::move(d), 0}; }
    static CounterexampleStrategy seeded_random(std::uint64_t s) {
        return {Kind::seeded_random, 0, s};
    }
};

namespace detail {

inline Rational random_witness(const Interval& cell, std::mt19937_64& rng) {
    if (cell.is_singleton())
        return cell.lo;
    SbNode node = node_of(simplest_rational_in(cell));
    auto extra = static_cast<int>(rng() % 24);
    for (int i = 0; i < extra; ++i) {
        Dir dir = (rng() & 1) ? Dir::right : Dir::left;
        if (cell.contains(node.value) && !child_meets_cell(cell, node, dir))
            dir = opposite(dir);
        node = dir == Dir::left ? left_child(node) : right_child(node);
    }
    while (!cell.contains(node.value)) {
        Dir dir = step_toward(cell, node);
        node = dir == Dir::left ? left_child(node) : right_child(node);
    }
    return node.value;
}

inline Rational pick_witness(const Interval& cell, const CounterexampleStrategy& strategy,
                             std::mt19937_64& rng) {
    using Kind = CounterexampleStrategy::Kind;
    switch (strategy.kind) {
        case Kind::simplest:
            return simplest_rational_in(cell);
        case Kind::boundary_adjacent: {
            if (!cell.lo.is_finite())
                return simplest_rational_in(cell);
            if (cell.lo_closed)
                return cell.lo;
            return mediant(cell.lo, simplest_rational_in(cell));
        }
        case Kind::deep:
            return deep_witness(cell, strategy.depth);
        case Kind::seeded_random:
            return random_witness(cell, rng);
    }
    throw std::logic_error("pick_witness: unknown strategy");
}

}  // namespace detail

struct SimulatedTeacher {
    MembershipOracle mq;
    EquivalenceOracle eq;
};

/// Builds the oracle pair for a hidden canonical target.  Membership
/// evaluates the target; equivalence runs the exact refinement scan and, on
/// disagreement, picks a witness inside the leftmost differing cell.
inline SimulatedTeacher make_simulated_teacher(
    PiecewiseFunction target,
    CounterexampleStrategy strategy = CounterexampleStrategy::simplest()) {
    if (!target.is_canonical())
        throw std::invalid_argument("make_simulated_teacher: target must be canonical");
    auto rng = std::make_shared<std::mt19937_64>(strategy.seed);
    MembershipOracle mq([target](const Rational& q) { return target.evaluate(q); });
    EquivalenceOracle eq(
        [target, strategy, rng](const PiecewiseFunction& hyp) -> std::optional<Rational> {
            std::optional<Interval> cell = first_disagreement(hyp, target);
            if (!cell)
                return std::nullopt;
            Rational witness = detail::pick_witness(*cell, strategy, *rng);
            if (hyp.evaluate(witness) == target.evaluate(witness))
                throw TeacherInconsistency("simulated teacher picked a non-counterexample");
            return witness;
        });
    return {std::move(mq), std::move(eq)};
}

/// Tree edge (parent, child); child is one of parent's two children.
using TreeEdge = std::pair<Rational, Rational>;

inline bool is_break_link(const PiecewiseFunction& target, const TreeEdge& edge) {
    return edge.first.is_zero() || !is_monochromatic(target, closed_hull(edge.first, edge.second));
}

/// All break links whose child endpoint sits at depth <= max_depth, by
/// exhaustive tree walk.  Exponential in the depth; test oracle only.
inline std::set<TreeEdge> enumerate_break_links(const PiecewiseFunction& target,
                                                unsigned max_depth) {
    std::set<TreeEdge> out;
    std::queue<std::pair<SbNode, unsigned>> frontier;
    frontier.emplace(SbNode::root(), 0);
    while (!frontier.empty()) {
        auto [node, depth] = frontier.front();
        frontier.pop();
        if (depth >= max_depth)
            continue;
        for (SbNode child : {left_child(node), right_child(node)}) {
            TreeEdge edge{node.value, child.value};
            if (is_break_link(target, edge))
                out.insert(edge);
            frontier.emplace(std::move(child), depth + 1);
        }
    }
    return out;
}

/// The complete break-link set, without a depth cutoff.  Candidates are
/// restricted to edges incident to convergents of the target's bounds (plus
/// the root edges); completeness of that restriction is exactly the
/// convergent-duality property, which the depth-limited enumeration
/// cross-checks in tests.
inline std::set<TreeEdge> full_break_link_set(const PiecewiseFunction& target) {
    std::set<Rational> nodes;
    for (const auto& [bound, kind] : bounds_of(target))
        for (const Rational& c : convergents(bound))
            nodes.insert(c);

    std::set<TreeEdge> candidates;
    candidates.insert({Rational(0, 1), Rational(1, 1)});
    candidates.insert({Rational(0, 1), Rational(-1, 1)});
    for (const Rational& c : nodes) {
        candidates.insert({parent(c), c});
        SbNode n = node_of(c);
        candidates.insert({c, left_child(n).value});
        candidates.insert({c, right_child(n).value});
    }

    std::set<TreeEdge> out;
    for (const TreeEdge& edge : candidates)
        if (is_break_link(target, edge))
            out.insert(edge);
    return out;
}

}  // namespace sblearn
